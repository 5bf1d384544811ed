#ifndef CROSSDAMP_TESTS_MOMENT_ODE_HPP
#define CROSSDAMP_TESTS_MOMENT_ODE_HPP

// Reference solution of the second-moment equations by adaptive numerical
// integration. Shares nothing with the library beyond the MomentState record.

#include <array>
#include <complex>

#include <boost/numeric/odeint.hpp>

#include "crossdamp/moments.hpp"

namespace oracle {

using cplx = std::complex<double>;

struct LangevinRates {
  double omega0, coupling, gamma, gamma12, nbar;
};

// State layout: N11, N12, N21, N22, S11, S12, S21, S22 as (re, im) pairs.
using OdeState = std::array<double, 16>;

struct MomentRhs {
  LangevinRates p;

  void operator()(const OdeState& x, OdeState& dx, double) const {
    // a_dot = K a + F with K = -i [[w0 - i g/2, W - i g12/2], [W - i g12/2, w0 - i g/2]]
    const cplx i(0.0, 1.0);
    cplx k[2][2];
    k[0][0] = k[1][1] = -i * cplx(p.omega0, -p.gamma / 2.0);
    k[0][1] = k[1][0] = -i * cplx(p.coupling, -p.gamma12 / 2.0);
    const double diff[2][2] = {{p.gamma, p.gamma12}, {p.gamma12, p.gamma}};
    cplx n[2][2], s[2][2];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        n[a][b] = {x[2 * (2 * a + b)], x[2 * (2 * a + b) + 1]};
        s[a][b] = {x[8 + 2 * (2 * a + b)], x[8 + 2 * (2 * a + b) + 1]};
      }
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        // d<a_a^dag a_b> = sum_l conj(K_al) N_lb + N_al K_bl + nbar gamma_ab
        cplx dn = p.nbar * diff[a][b];
        cplx ds = 0.0;
        for (int l = 0; l < 2; ++l) {
          dn += std::conj(k[a][l]) * n[l][b] + n[a][l] * k[b][l];
          ds += k[a][l] * s[l][b] + s[a][l] * k[b][l];
        }
        dx[2 * (2 * a + b)] = dn.real();
        dx[2 * (2 * a + b) + 1] = dn.imag();
        dx[8 + 2 * (2 * a + b)] = ds.real();
        dx[8 + 2 * (2 * a + b) + 1] = ds.imag();
      }
  }
};

inline OdeState pack(const crossdamp::MomentState& m) {
  OdeState x{};
  const cplx n[4] = {m.n1, m.c12, std::conj(m.c12), m.n2};
  const cplx s[4] = {-m.m1, m.s12, m.s12, -m.m2};
  for (int q = 0; q < 4; ++q) {
    x[2 * q] = n[q].real();
    x[2 * q + 1] = n[q].imag();
    x[8 + 2 * q] = s[q].real();
    x[8 + 2 * q + 1] = s[q].imag();
  }
  return x;
}

inline crossdamp::MomentState unpack(const OdeState& x) {
  crossdamp::MomentState m;
  m.n1 = x[0];
  m.c12 = {x[2], x[3]};
  m.n2 = x[6];
  m.m1 = -cplx(x[8], x[9]);
  m.s12 = {x[10], x[11]};
  m.m2 = -cplx(x[14], x[15]);
  return m;
}

/// Integrates the moment equations from 0 to t with an embedded 7(8)
/// Runge-Kutta-Fehlberg pair at tolerance `tol`.
inline crossdamp::MomentState integrate_moments(const crossdamp::MomentState& start, const LangevinRates& p,
                                                double t, double tol = 1e-13) {
  namespace ode = boost::numeric::odeint;
  OdeState x = pack(start);
  if (t > 0.0) {
    auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_fehlberg78<OdeState>());
    ode::integrate_adaptive(stepper, MomentRhs{p}, x, 0.0, t, t / 1000.0);
  }
  return unpack(x);
}

}  // namespace oracle

#endif
