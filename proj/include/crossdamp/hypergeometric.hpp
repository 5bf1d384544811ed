#ifndef CROSSDAMP_HYPERGEOMETRIC_HPP
#define CROSSDAMP_HYPERGEOMETRIC_HPP

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "crossdamp/error.hpp"

namespace crossdamp {

namespace detail {

template <class Real>
bool is_nonpositive_integer(Real x) {
  using std::floor;
  return x <= Real(0) && floor(x) == x;
}

template <class Real>
std::string hyp2f1_args(Real a, Real b, Real c, Real z) {
  std::ostringstream os;
  os.precision(17);
  os << "2F1(a=" << static_cast<double>(a) << ", b=" << static_cast<double>(b)
     << ", c=" << static_cast<double>(c) << ", z=" << static_cast<double>(z) << ")";
  return os.str();
}

// Gauss series sum_j (a)_j (b)_j / ((c)_j j!) z^j. Terminates exactly when a
// or b is a non-positive integer.
template <class Real>
Real hyp2f1_gauss_series(Real a, Real b, Real c, Real z, long max_terms) {
  using std::abs;
  const Real eps = std::numeric_limits<Real>::epsilon();
  Real term(1);
  Real sum(1);
  for (long j = 0; j < max_terms; ++j) {
    const Real jj(j);
    term *= (a + jj) * (b + jj) / ((c + jj) * (jj + Real(1))) * z;
    sum += term;
    if (term == Real(0)) return sum;
    // Term ratios approach |z| monotonically, so max(ratio, |z|) bounds the
    // tail by a geometric series once it drops below one.
    Real ratio = abs((a + jj + 1) * (b + jj + 1) / ((c + jj + 1) * (jj + 2)) * z);
    if (abs(z) > ratio) ratio = abs(z);
    if (ratio < Real(1) && abs(term) * ratio / (Real(1) - ratio) <= eps * abs(sum) / 4) return sum;
  }
  throw convergence_error("hypergeometric series did not converge: " + hyp2f1_args(a, b, c, z));
}

}  // namespace detail

/// Gauss hypergeometric function 2F1(a, b; c; z) for real arguments.
///
/// Direct series on [0, 1/2]; on (1/2, 1) the Euler transformation
/// (1-z)^(c-a-b) 2F1(c-a, c-b; c; z) when it terminates, otherwise the direct
/// series with an extended term budget; Pfaff's transformation maps z < 0
/// into (0, 1). Polynomial cases (a or b a non-positive integer) are summed
/// exactly for any z.
template <class Real>
Real hyp2f1(Real a, Real b, Real c, Real z, long max_terms = 1'000'000) {
  using std::pow;
  if (detail::is_nonpositive_integer(c))
    throw std::invalid_argument("hyp2f1: c is a non-positive integer: " +
                                detail::hyp2f1_args(a, b, c, z));
  if (detail::is_nonpositive_integer(a) || detail::is_nonpositive_integer(b))
    return detail::hyp2f1_gauss_series(a, b, c, z, max_terms);
  if (z == Real(0)) return Real(1);
  if (z < Real(0)) {
    const Real w = z / (z - Real(1));
    return pow(Real(1) - z, -a) * hyp2f1(a, c - b, c, w, max_terms);
  }
  if (z >= Real(1))
    throw convergence_error("hyp2f1: |z| >= 1 outside the supported domain: " +
                            detail::hyp2f1_args(a, b, c, z));
  if (z <= Real(0.5)) return detail::hyp2f1_gauss_series(a, b, c, z, max_terms);
  if (detail::is_nonpositive_integer(c - a) || detail::is_nonpositive_integer(c - b))
    return pow(Real(1) - z, c - a - b) * detail::hyp2f1_gauss_series(c - a, c - b, c, z, max_terms);
  return detail::hyp2f1_gauss_series(a, b, c, z, max_terms);
}

}  // namespace crossdamp

#endif  // CROSSDAMP_HYPERGEOMETRIC_HPP
