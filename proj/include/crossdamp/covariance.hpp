#ifndef CROSSDAMP_COVARIANCE_HPP
#define CROSSDAMP_COVARIANCE_HPP

#include <cmath>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "crossdamp/error.hpp"
#include "crossdamp/moments.hpp"

namespace crossdamp {

// Quadratures x = (a + a^dag)/sqrt2, p = i(a^dag - a)/sqrt2; vacuum variance 1/2.
// Ordering (x1, p1, x2, p2).
struct CovarianceReal {
  Eigen::Matrix4d matrix = Eigen::Matrix4d::Identity() / 2.0;

  Eigen::Matrix2d local1() const { return matrix.block<2, 2>(0, 0); }
  Eigen::Matrix2d local2() const { return matrix.block<2, 2>(2, 2); }
  Eigen::Matrix2d cross() const { return matrix.block<2, 2>(0, 2); }
};

inline Eigen::Matrix2d symplectic_unit() {
  Eigen::Matrix2d j;
  j << 0.0, 1.0, -1.0, 0.0;
  return j;
}

inline Eigen::Matrix4d symplectic_form() {
  Eigen::Matrix4d j = Eigen::Matrix4d::Zero();
  j.block<2, 2>(0, 0) = symplectic_unit();
  j.block<2, 2>(2, 2) = symplectic_unit();
  return j;
}

/// Smallest eigenvalue of sigma + (i/2) J; non-negative for physical states.
inline double uncertainty_margin(const CovarianceReal& s) {
  const Eigen::Matrix4cd h = s.matrix.cast<cplx>() + cplx{0.0, 0.5} * symplectic_form().cast<cplx>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline bool is_physical(const CovarianceReal& s, double tol = 1e-10) {
  if (!s.matrix.allFinite()) return false;
  if ((s.matrix - s.matrix.transpose()).cwiseAbs().maxCoeff() > tol * std::max(1.0, s.matrix.cwiseAbs().maxCoeff()))
    return false;
  return uncertainty_margin(s) >= -tol * std::max(1.0, s.matrix.trace());
}

namespace detail {

inline CovarianceReal covariance_from_moments(const MomentState& s) {
  CovarianceReal out;
  Eigen::Matrix4d& v = out.matrix;
  const double n[2] = {s.n1, s.n2};
  const cplx m[2] = {s.m1, s.m2};
  for (int j = 0; j < 2; ++j) {
    const int x = 2 * j;
    v(x, x) = 0.5 + n[j] - m[j].real();
    v(x + 1, x + 1) = 0.5 + n[j] + m[j].real();
    v(x, x + 1) = v(x + 1, x) = -m[j].imag();
  }
  const cplx c = s.c12;
  const cplx p = s.s12;
  v(0, 2) = v(2, 0) = p.real() + c.real();  // x1 x2
  v(1, 3) = v(3, 1) = c.real() - p.real();  // p1 p2
  v(0, 3) = v(3, 0) = c.imag() + p.imag();  // x1 p2
  v(1, 2) = v(2, 1) = p.imag() - c.imag();  // p1 x2
  return out;
}

}  // namespace detail

/// Real quadrature covariance of a physical moment state.
inline CovarianceReal to_real_covariance(const MomentState& s) {
  CovarianceReal out = detail::covariance_from_moments(s);
  if (!is_physical(out))
    throw std::invalid_argument("to_real_covariance: moment state violates the uncertainty principle");
  return out;
}

/// Inverse of to_real_covariance; the input is symmetrized first.
inline MomentState from_real_covariance(const CovarianceReal& cov) {
  const Eigen::Matrix4d v = (cov.matrix + cov.matrix.transpose()) / 2.0;
  MomentState s;
  s.n1 = (v(0, 0) + v(1, 1)) / 2.0 - 0.5;
  s.n2 = (v(2, 2) + v(3, 3)) / 2.0 - 0.5;
  s.m1 = {(v(1, 1) - v(0, 0)) / 2.0, -v(0, 1)};
  s.m2 = {(v(3, 3) - v(2, 2)) / 2.0, -v(2, 3)};
  s.c12 = {(v(0, 2) + v(1, 3)) / 2.0, (v(0, 3) - v(1, 2)) / 2.0};
  s.s12 = {(v(0, 2) - v(1, 3)) / 2.0, (v(0, 3) + v(1, 2)) / 2.0};
  return s;
}

}  // namespace crossdamp

#endif  // CROSSDAMP_COVARIANCE_HPP
