#ifndef CROSSDAMP_DYNAMICS_HPP
#define CROSSDAMP_DYNAMICS_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <utility>

#include <Eigen/Core>

#include "crossdamp/error.hpp"
#include "crossdamp/model.hpp"
#include "crossdamp/moments.hpp"

namespace crossdamp {

// Drift matrix M of  d/dt a = -i M a + F  with independent damping entries.
struct DriftMatrix {
  double omega0 = 0.0;
  double coupling = 0.0;
  double gamma11 = 0.0;
  double gamma22 = 0.0;
  double gamma12 = 0.0;
  double gamma21 = 0.0;

  static DriftMatrix symmetric(const ModelParams& p) {
    return {p.omega0(), p.coupling(), p.gamma(), p.gamma(), p.gamma12(), p.gamma12()};
  }

  bool is_symmetric() const { return gamma11 == gamma22 && gamma12 == gamma21; }

  Eigen::Matrix2cd entries() const {
    const cplx i{0.0, 1.0};
    Eigen::Matrix2cd m;
    m << omega0 - i * gamma11 / 2.0, coupling - i * gamma12 / 2.0,
        coupling - i * gamma21 / 2.0, omega0 - i * gamma22 / 2.0;
    return m;
  }
};

struct DriftEigenvalues {
  cplx plus;
  cplx minus;
};

/// Closed-form roots of the 2x2 drift matrix. The branch of the square root
/// is the one continuously connected to coupling - i*(gamma12+gamma21)/4, so
/// that `plus` is the symmetric-mode root (omega0 + coupling) whatever the
/// sign of the coupling.
inline DriftEigenvalues drift_eigenvalues(const DriftMatrix& m) {
  const cplx i{0.0, 1.0};
  const cplx centre = m.omega0 - i * (m.gamma11 + m.gamma22) / 4.0;
  const double asym = (m.gamma11 - m.gamma22) / 4.0;
  const cplx delta = (m.coupling - i * m.gamma12 / 2.0) * (m.coupling - i * m.gamma21 / 2.0) - asym * asym;
  cplx root = std::sqrt(delta);
  const cplx reference = m.coupling - i * (m.gamma12 + m.gamma21) / 4.0;
  if ((std::conj(root) * reference).real() < 0.0) root = -root;
  return {centre + root, centre - root};
}

struct CollectiveRates {
  double plus;   // symmetric (superradiant) mode A
  double minus;  // antisymmetric (subradiant) mode B
};

inline CollectiveRates collective_rates(const ModelParams& p) {
  return {p.gamma() + p.gamma12(), p.gamma() - p.gamma12()};
}

namespace detail {

inline void require_time(double t) {
  require(std::isfinite(t) && t >= 0.0, "time must be finite and non-negative");
}

// Orthogonal, symmetric, self-inverse map to the normal modes A, B.
inline Eigen::Matrix2cd normal_mode_transform() {
  const double h = std::numbers::sqrt2 / 2.0;
  Eigen::Matrix2cd u;
  u << h, h, h, -h;
  return u;
}

// Closed-form mean excitation of ion j (0 or 1) for a diagonal initial state.
// No validation: gradient code evaluates it off the physical parameter box.
inline double population_closed_form(int j, double n1_0, double n2_0, double coupling,
                                     double gamma, double gamma12, double nbar, double t) {
  const double own = j == 0 ? n1_0 : n2_0;
  const double other = j == 0 ? n2_0 : n1_0;
  const double c = std::cos(coupling * t);
  const double s = std::sin(coupling * t);
  const double e = std::exp(-gamma * t);
  const double e_minus = std::exp(-(gamma - gamma12) * t);
  const double x = std::expm1(-gamma12 * t);
  // e^{-gt}(cosh(g12 t) - 1) and 1 - e^{-gt}cosh(g12 t) without forming cosh.
  const double cosh_excess = 0.5 * e_minus * x * x;
  const double one_minus_c =
      -0.5 * (std::expm1(-(gamma - gamma12) * t) + std::expm1(-(gamma + gamma12) * t));
  return e * (own * c * c + other * s * s) + 0.5 * (n1_0 + n2_0) * cosh_excess + nbar * one_minus_c;
}

inline void require_diagonal_start(double n1_0, double n2_0) {
  require(n1_0 >= 0.0 && n2_0 >= 0.0, "initial occupations must be non-negative");
}

}  // namespace detail

/// Exact second moments at time t. Works in the normal-mode basis, where the
/// occupation, pair and cross families decouple, and in a frame rotating at
/// omega0; the lab-frame phase is reattached to the pair moments at the end.
inline MomentState propagate(const MomentState& state0, const ModelParams& p, double t) {
  detail::require_time(t);
  if (t == 0.0) return state0;

  const Eigen::Matrix2cd u = detail::normal_mode_transform();
  const Eigen::Matrix2cd number = u * state0.number_matrix() * u.transpose();
  const Eigen::Matrix2cd pair = u * state0.pair_matrix() * u.transpose();

  const CollectiveRates rates = collective_rates(p);
  const double decay[2] = {rates.plus, rates.minus};
  const double detuning[2] = {p.coupling(), -p.coupling()};

  cplx amp[2];
  for (int x = 0; x < 2; ++x)
    amp[x] = std::exp(-0.5 * decay[x] * t) * std::polar(1.0, -detuning[x] * t);

  Eigen::Matrix2cd number_t;
  Eigen::Matrix2cd pair_t;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      number_t(x, y) = std::conj(amp[x]) * amp[y] * number(x, y);
      pair_t(x, y) = amp[x] * amp[y] * pair(x, y);
    }
    number_t(x, x) += -p.nbar() * std::expm1(-decay[x] * t);
  }
  pair_t *= std::polar(1.0, -2.0 * p.omega0() * t);

  return MomentState::from_matrices(u * number_t * u.transpose(), u * pair_t * u.transpose());
}

/// Mean excitation of ion `j` (1 or 2) for an uncorrelated start with no
/// anomalous moments.
inline double population(int j, double n1_0, double n2_0, const ModelParams& p, double t) {
  detail::require(j == 1 || j == 2, "population: ion index must be 1 or 2");
  detail::require_diagonal_start(n1_0, n2_0);
  detail::require_time(t);
  return detail::population_closed_form(j - 1, n1_0, n2_0, p.coupling(), p.gamma(), p.gamma12(),
                                        p.nbar(), t);
}

enum class SteadyRegime { thermal, dfs };

struct SteadyState {
  double occupation;
  SteadyRegime regime;
};

inline SteadyState steady_state(double n1_0, double n2_0, const ModelParams& p) {
  detail::require_diagonal_start(n1_0, n2_0);
  if (p.is_dfs()) return {0.5 * (p.nbar() + 0.5 * (n1_0 + n2_0)), SteadyRegime::dfs};
  return {p.nbar(), SteadyRegime::thermal};
}

/// Quadratic-order expansion of the population in the damping rates, with the
/// coherent exchange cos^2, sin^2 kept exact. The exchange part also carries
/// the local decay factor 1 - gamma t + (gamma t)^2/2; without it the
/// remainder would be first order in t whenever the ions start excited.
inline double short_time_population(int j, double n1_0, double n2_0, const ModelParams& p, double t) {
  detail::require(j == 1 || j == 2, "short_time_population: ion index must be 1 or 2");
  const double own = j == 1 ? n1_0 : n2_0;
  const double other = j == 1 ? n2_0 : n1_0;
  const double c = std::cos(p.coupling() * t);
  const double s = std::sin(p.coupling() * t);
  const double g = p.gamma();
  const double g12 = p.gamma12();
  const double exchange = own * c * c + other * s * s;
  const double decay = 1.0 - g * t + 0.5 * g * g * t * t;
  const double curvature = 0.5 * (0.5 * g12 * g12 * (n1_0 + n2_0) - p.nbar() * (g * g + g12 * g12));
  return exchange * decay + p.nbar() * g * t + curvature * t * t;
}

/// Anomalous moment m1(t) = -<a1^2(t)> for a start with no inter-ion pair
/// correlation (s12 = 0). Normalized so that m1(0) is returned at t = 0.
inline cplx anomalous_moment_1(const MomentState& init, const ModelParams& p, double t) {
  detail::require(init.s12 == cplx{}, "anomalous_moment_1: initial pair correlation must vanish");
  detail::require_time(t);
  const double g = p.gamma();
  const double g12 = p.gamma12();
  const cplx sum = init.m1 + init.m2;
  const cplx diff = init.m1 - init.m2;
  const cplx modes = std::exp(-(g - g12) * t) * std::polar(1.0, 2.0 * p.coupling() * t) +
                     std::exp(-(g + g12) * t) * std::polar(1.0, -2.0 * p.coupling() * t);
  return std::polar(0.25, -2.0 * p.omega0() * t) * (sum * modes + 2.0 * std::exp(-g * t) * diff);
}

}  // namespace crossdamp

#endif  // CROSSDAMP_DYNAMICS_HPP
