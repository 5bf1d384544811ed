#ifndef CROSSDAMP_MOMENTS_HPP
#define CROSSDAMP_MOMENTS_HPP

#include <complex>

#include <Eigen/Core>

namespace crossdamp {

using cplx = std::complex<double>;

// Second moments of a zero-mean two-mode Gaussian state (10 real degrees of
// freedom). Anomalous moments use the sign convention m_j = -<a_j^2>.
struct MomentState {
  double n1 = 0.0;   // <a1^dag a1>
  double n2 = 0.0;   // <a2^dag a2>
  cplx c12{};        // <a1^dag a2>
  cplx m1{};         // -<a1^2>
  cplx m2{};         // -<a2^2>
  cplx s12{};        // <a1 a2>

  static MomentState thermal(double nbar1, double nbar2) { return {nbar1, nbar2, {}, {}, {}, {}}; }

  // Hermitian matrix N_jk = <a_j^dag a_k>.
  Eigen::Matrix2cd number_matrix() const {
    Eigen::Matrix2cd n;
    n << n1, c12, std::conj(c12), n2;
    return n;
  }

  // Symmetric matrix S_jk = <a_j a_k>.
  Eigen::Matrix2cd pair_matrix() const {
    Eigen::Matrix2cd s;
    s << -m1, s12, s12, -m2;
    return s;
  }

  static MomentState from_matrices(const Eigen::Matrix2cd& number, const Eigen::Matrix2cd& pair) {
    MomentState out;
    out.n1 = number(0, 0).real();
    out.n2 = number(1, 1).real();
    out.c12 = number(0, 1);
    out.m1 = -pair(0, 0);
    out.m2 = -pair(1, 1);
    out.s12 = pair(0, 1);
    return out;
  }

  friend bool operator==(const MomentState&, const MomentState&) = default;
};

}  // namespace crossdamp

#endif  // CROSSDAMP_MOMENTS_HPP
