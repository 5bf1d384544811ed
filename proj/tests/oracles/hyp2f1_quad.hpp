#ifndef CROSSDAMP_TESTS_HYP2F1_QUAD_HPP
#define CROSSDAMP_TESTS_HYP2F1_QUAD_HPP

// Brute-force Gauss series in 113-bit binary floating point, summed term by
// term until the terms are negligible at that precision.

#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using quad = boost::multiprecision::cpp_bin_float_quad;

inline quad hyp2f1_quad(const quad& a, const quad& b, const quad& c, const quad& z, long max_terms = 200000) {
  quad term = 1, sum = 1;
  const quad tiny = quad(1e-34);
  int small_run = 0;
  for (long j = 0; j < max_terms; ++j) {
    term *= (a + j) * (b + j) / ((c + j) * (j + 1)) * z;
    sum += term;
    // Stop after several consecutive negligible terms (ratios tend to z < 1).
    if (abs(term) <= tiny * abs(sum)) {
      if (++small_run >= 8) return sum;
    } else {
      small_run = 0;
    }
  }
  throw std::runtime_error("hyp2f1_quad: no convergence");
}

}  // namespace oracle

#endif
