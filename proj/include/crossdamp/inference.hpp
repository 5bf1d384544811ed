#ifndef CROSSDAMP_INFERENCE_HPP
#define CROSSDAMP_INFERENCE_HPP

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "crossdamp/dynamics.hpp"
#include "crossdamp/error.hpp"
#include "crossdamp/model.hpp"
#include "crossdamp/parallel.hpp"
#include "crossdamp/phonon_stats.hpp"

namespace crossdamp {

// Estimation parameters in their fixed order theta_1..theta_6.
enum class Param : std::size_t { n1_0 = 0, n2_0 = 1, coupling = 2, gamma = 3, gamma12 = 4, nbar = 5 };

inline constexpr std::size_t kNumParams = 6;
inline constexpr std::array<const char*, kNumParams> kParamNames = {"n1_0", "n2_0", "Omega",
                                                                     "gamma", "gamma12", "nbar"};

using Gradient = std::array<double, kNumParams>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

struct ParamVector {
  std::array<double, kNumParams> values{};

  double operator[](Param p) const { return values[static_cast<std::size_t>(p)]; }
  double& operator[](Param p) { return values[static_cast<std::size_t>(p)]; }

  static ParamVector from_model(double n1_0, double n2_0, const ModelParams& p) {
    return {{n1_0, n2_0, p.coupling(), p.gamma(), p.gamma12(), p.nbar()}};
  }

  void validate() const {
    const auto& v = values;
    for (double x : v) detail::require(std::isfinite(x), "ParamVector: entries must be finite");
    detail::require(v[0] >= 0.0 && v[1] >= 0.0 && v[5] >= 0.0,
                    "ParamVector: occupations must be non-negative");
    detail::require(v[3] >= 0.0, "ParamVector: gamma must be non-negative");
    detail::require(v[4] >= 0.0 && v[4] <= v[3], "ParamVector: need 0 <= gamma12 <= gamma");
  }

  ModelParams model(double omega0 = 0.0) const { return {omega0, values[2], values[3], values[4], values[5]}; }
};

namespace detail {

inline double population_of(const ParamVector& th, double t) {
  const auto& v = th.values;
  return population_closed_form(0, v[0], v[1], v[2], v[3], v[4], v[5], t);
}

}  // namespace detail

/// Mean excitation of ion 1 at time t for a thermal start.
inline double population(const ParamVector& theta, double t) {
  theta.validate();
  detail::require_time(t);
  return detail::population_of(theta, t);
}

/// Analytic partial derivatives of n1(t) with respect to every theta_alpha.
/// gamma and gamma12 are independent coordinates, so the result is defined
/// at gamma12 == gamma as an evaluation point.
inline Gradient population_gradient(const ParamVector& theta, double t) {
  theta.validate();
  detail::require_time(t);
  const auto& v = theta.values;
  const double a = v[0], b = v[1], om = v[2], g = v[3], g12 = v[4], nbar = v[5];

  const double c = std::cos(om * t);
  const double s = std::sin(om * t);
  const double e = std::exp(-g * t);
  const double e_plus = std::exp(-(g + g12) * t);
  const double e_minus = std::exp(-(g - g12) * t);
  const double x = std::expm1(-g12 * t);
  const double cosh_part = 0.5 * (e_minus + e_plus);   // e^{-gt} cosh(g12 t)
  const double sinh_part = 0.5 * (e_minus - e_plus);   // e^{-gt} sinh(g12 t)
  const double cosh_excess = 0.5 * e_minus * x * x;    // e^{-gt}(cosh(g12 t) - 1)
  const double one_minus_c = -0.5 * (std::expm1(-(g - g12) * t) + std::expm1(-(g + g12) * t));
  const double sum0 = a + b;

  Gradient out;
  out[0] = e * c * c + 0.5 * cosh_excess;
  out[1] = e * s * s + 0.5 * cosh_excess;
  out[2] = e * (b - a) * t * std::sin(2.0 * om * t);
  out[3] = -t * e * (a * c * c + b * s * s) - 0.5 * sum0 * t * cosh_excess + nbar * t * cosh_part;
  out[4] = t * sinh_part * (0.5 * sum0 - nbar);
  out[5] = one_minus_c;
  return out;
}

struct FisherMatrix {
  Matrix6d matrix = Matrix6d::Zero();
  double t = 0.0;

  // One-based access matching F_11 ... F_66.
  double element(int alpha, int beta) const { return matrix(alpha - 1, beta - 1); }
  double operator()(Param a, Param b) const {
    return matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
};

/// Fisher information of the geometric phonon distribution of ion 1:
/// F = grad n1 grad n1^T / (n1 (1 + n1)).
inline FisherMatrix fim_thermal(const ParamVector& theta, double t) {
  const double n = population(theta, t);
  if (!(n > 0.0))
    throw degenerate_error("fim_thermal: n1(t) = 0, the phonon distribution carries no information");
  const Gradient g = population_gradient(theta, t);
  Eigen::Map<const Eigen::Matrix<double, 6, 1>> gv(g.data());
  return {gv * gv.transpose() / (n * (1.0 + n)), t};
}

namespace detail {

// Finite-difference scale for theta_alpha. Rates are additionally limited by
// 1/t because n1 depends on them through products with t.
inline double fd_scale(std::size_t alpha, const ParamVector& theta, double t) {
  const auto& v = theta.values;
  double s;
  if (alpha == 0 || alpha == 1 || alpha == 5) {
    s = std::max(std::abs(v[alpha]), 1.0);
  } else {
    s = std::max({std::abs(v[alpha]), v[3], std::abs(v[2])});
    if (t > 0.0) s = std::min(s, 1.0 / t);
    if (!(s > 0.0)) s = 1.0;
  }
  return s;
}

}  // namespace detail

template <class Path>
concept ReducedStatePath = requires(const Path& p, const ParamVector& th, double t) {
  { p(th, t) } -> std::convertible_to<LocalGaussian>;
};

// Reduced state of ion 1 for an uncorrelated start with anomalous moments
// m1(0), m2(0); theta supplies the occupations and rates.
struct SqueezedStartPath {
  cplx m1_0{};
  cplx m2_0{};
  double omega0 = 0.0;

  LocalGaussian operator()(const ParamVector& th, double t) const {
    const auto& v = th.values;
    const double n = detail::population_closed_form(0, v[0], v[1], v[2], v[3], v[4], v[5], t);
    const double g = v[3], g12 = v[4], om = v[2];
    const cplx modes = std::exp(-(g - g12) * t) * std::polar(1.0, 2.0 * om * t) +
                       std::exp(-(g + g12) * t) * std::polar(1.0, -2.0 * om * t);
    const cplx m = std::polar(0.25, -2.0 * omega0 * t) *
                   ((m1_0 + m2_0) * modes + 2.0 * std::exp(-g * t) * (m1_0 - m2_0));
    return {n, m};
  }
};

/// Fisher information of the general phonon distribution along a reduced
/// state path theta -> (n1(t), m1(t)); probabilities are differentiated by
/// central differences with step rel_step times the parameter scale.
template <ReducedStatePath Path>
FisherMatrix fim_general(const Path& path, const ParamVector& theta, double t, double rel_step = 1e-5) {
  theta.validate();
  detail::require_time(t);
  const Pmf base = general_pmf(path(theta, t));
  const std::size_t k_max = base.k_max();

  std::array<std::vector<double>, kNumParams> dp;
  for (std::size_t a = 0; a < kNumParams; ++a) {
    const double h = rel_step * detail::fd_scale(a, theta, t);
    ParamVector up = theta, down = theta;
    up.values[a] += h;
    down.values[a] -= h;
    const Pmf pu = general_pmf(path(up, t), k_max);
    const Pmf pd = general_pmf(path(down, t), k_max);
    dp[a].resize(k_max + 1);
    for (std::size_t k = 0; k <= k_max; ++k) dp[a][k] = (pu[k] - pd[k]) / (2.0 * h);
  }

  FisherMatrix out;
  out.t = t;
  for (std::size_t k = 0; k <= k_max; ++k) {
    if (!(base[k] > 0.0)) continue;
    for (std::size_t a = 0; a < kNumParams; ++a)
      for (std::size_t b = a; b < kNumParams; ++b)
        out.matrix(a, b) += dp[a][k] * dp[b][k] / base[k];
  }
  out.matrix.triangularView<Eigen::StrictlyLower>() = out.matrix.transpose().triangularView<Eigen::StrictlyLower>();
  return out;
}

/// Scales F_ab by u_a u_b with natural units u = (1, 1, |Omega|, gamma, gamma, 1)
/// (a vanishing unit is replaced by 1), i.e. information about log-rates.
inline FisherMatrix dimensionless(const FisherMatrix& f, const ParamVector& theta) {
  std::array<double, kNumParams> u = {1.0, 1.0, std::abs(theta.values[2]), theta.values[3], theta.values[3], 1.0};
  for (double& x : u)
    if (!(x > 0.0)) x = 1.0;
  FisherMatrix out = f;
  for (std::size_t a = 0; a < kNumParams; ++a)
    for (std::size_t b = 0; b < kNumParams; ++b) out.matrix(a, b) *= u[a] * u[b];
  return out;
}

// Information about the collective rates Gamma_+ = gamma + gamma12 and
// Gamma_- = gamma - gamma12, by the chain rule through (gamma, gamma12).
struct CollectiveRateInformation {
  double gamma_plus;
  double gamma_minus;
  double cross;
};

inline CollectiveRateInformation collective_rate_information(const FisherMatrix& f) {
  const double f44 = f.element(4, 4), f55 = f.element(5, 5), f45 = f.element(4, 5);
  return {0.25 * (f44 + 2.0 * f45 + f55), 0.25 * (f44 - 2.0 * f45 + f55), 0.25 * (f44 - f55)};
}

// ---------------------------------------------------------------------------
// Late-time behaviour at the decoherence-free point.

struct DfsNullReport {
  bool degenerate = false;
  double slope_f44 = std::numeric_limits<double>::quiet_NaN();
  double slope_gamma_minus = std::numeric_limits<double>::quiet_NaN();
  double slope_gamma_plus_envelope = std::numeric_limits<double>::quiet_NaN();
  double f44_f55_mismatch = std::numeric_limits<double>::quiet_NaN();  // |F44 - F55| / F44 at the last time
  double f44_f45_mismatch = std::numeric_limits<double>::quiet_NaN();  // |F44 + F45| / F44 at the last time
  std::vector<double> times;
  std::vector<double> f44;
  std::vector<double> f55;
  std::vector<double> f45;
};

namespace detail {

inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

// Log-log slope through the per-block maxima of an oscillating positive series.
inline double envelope_slope(const std::vector<double>& t, const std::vector<double>& y, std::size_t blocks) {
  std::vector<double> bx, by;
  const std::size_t n = t.size();
  blocks = std::max<std::size_t>(2, std::min(blocks, n));
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * n / blocks, hi = (b + 1) * n / blocks;
    std::size_t best = lo;
    for (std::size_t i = lo; i < hi; ++i)
      if (y[i] > y[best]) best = i;
    if (hi > lo && y[best] > 0.0) {
      bx.push_back(t[best]);
      by.push_back(y[best]);
    }
  }
  if (bx.size() < 2) return -std::numeric_limits<double>::infinity();
  return log_log_slope(bx, by);
}

}  // namespace detail

/// Fits the growth of F44 over a late-time grid at gamma12 == gamma and
/// checks the F44 = F55 = -F45 structure. A start with n1(0)+n2(0) = 2 nbar
/// removes the secular term and is reported as degenerate.
inline DfsNullReport dfs_null_scaling(const ParamVector& theta, const std::vector<double>& t_grid) {
  theta.validate();
  const double g = theta[Param::gamma];
  detail::require(theta[Param::gamma12] == g, "dfs_null_scaling: requires gamma12 == gamma exactly");
  detail::require(g > 0.0, "dfs_null_scaling: requires gamma > 0");
  detail::require(t_grid.size() >= 2, "dfs_null_scaling: need at least two times");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    detail::require(t_grid[i] >= 10.0 / g * (1.0 - 1e-12), "dfs_null_scaling: times must satisfy t >= 10/gamma");
    if (i > 0) detail::require(t_grid[i] > t_grid[i - 1], "dfs_null_scaling: time grid must increase");
  }

  DfsNullReport r;
  r.times = t_grid;
  const double bracket = theta[Param::nbar] - 0.5 * (theta[Param::n1_0] + theta[Param::n2_0]);
  const double scale = std::max({1.0, theta[Param::nbar], 0.5 * (theta[Param::n1_0] + theta[Param::n2_0])});
  if (std::abs(bracket) <= 1e-12 * scale) {
    r.degenerate = true;
    return r;
  }
  std::vector<double> minus, plus;
  for (double t : t_grid) {
    const FisherMatrix f = fim_thermal(theta, t);
    r.f44.push_back(f.element(4, 4));
    r.f55.push_back(f.element(5, 5));
    r.f45.push_back(f.element(4, 5));
    const auto info = collective_rate_information(f);
    minus.push_back(info.gamma_minus);
    plus.push_back(info.gamma_plus);
  }
  r.slope_f44 = detail::log_log_slope(t_grid, r.f44);
  r.slope_gamma_minus = detail::log_log_slope(t_grid, minus);
  r.slope_gamma_plus_envelope = detail::envelope_slope(t_grid, plus, 10);
  const double f44 = r.f44.back();
  r.f44_f55_mismatch = std::abs(f44 - r.f55.back()) / f44;
  r.f44_f45_mismatch = std::abs(f44 + r.f45.back()) / f44;
  return r;
}

// ---------------------------------------------------------------------------
// Cramer-Rao bounds.

struct CrbReport {
  double t = 0.0;
  std::size_t repetitions = 1;
  std::array<double, kNumParams> variance_bounds{};  // 1/(M F_aa), +inf where F_aa = 0
  Matrix6d matrix_bound = Matrix6d::Zero();          // F^+ / M
  bool singular = false;  // matrix_bound is a pseudo-inverse
  int rank = 0;
};

inline CrbReport crb(const FisherMatrix& f, std::size_t repetitions) {
  detail::require(repetitions >= 1, "crb: repetitions must be at least 1");
  CrbReport r;
  r.t = f.t;
  r.repetitions = repetitions;
  const double m = static_cast<double>(repetitions);
  for (std::size_t a = 0; a < kNumParams; ++a) {
    const double faa = f.matrix(a, a);
    r.variance_bounds[a] = faa > 0.0 ? 1.0 / (m * faa) : std::numeric_limits<double>::infinity();
  }
  const Matrix6d sym = 0.5 * (f.matrix + f.matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix6d> es(sym);
  const auto& lam = es.eigenvalues();
  const double top = std::max(lam.cwiseAbs().maxCoeff(), 0.0);
  Matrix6d pinv = Matrix6d::Zero();
  for (int i = 0; i < 6; ++i) {
    if (top > 0.0 && lam(i) > 1e-10 * top) {
      ++r.rank;
      pinv += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose() / lam(i);
    }
  }
  r.singular = r.rank < 6;
  r.matrix_bound = pinv / m;
  return r;
}

// ---------------------------------------------------------------------------
// Monte-Carlo maximum-likelihood check of the single-parameter bound.

struct MleOptions {
  double bracket_lo = 0.0;
  double bracket_hi = 1.0;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  double tolerance = 1e-10;
};

struct MleReport {
  std::vector<double> estimates;
  double true_value = 0.0;
  double mean = 0.0;
  double bias = 0.0;
  double variance = std::numeric_limits<double>::quiet_NaN();
  double bias_standard_error = std::numeric_limits<double>::quiet_NaN();
  double fisher = 0.0;
  double bound = 0.0;  // 1 / (M F_target)
  double variance_ratio = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

template <class Fn>
double golden_section_max(Fn&& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Repeats the measure-and-estimate protocol `trials` times: draw M phonon
/// counts of ion 1 at time t, then maximize the geometric log-likelihood over
/// theta_target with every other parameter known.
inline MleReport mle_harness(const ParamVector& truth, double t, std::size_t repetitions, std::size_t trials,
                             Param target, const MleOptions& opt = {}) {
  truth.validate();
  detail::require_time(t);
  detail::require(repetitions >= 1 && trials >= 1, "mle_harness: repetitions and trials must be >= 1");
  detail::require(opt.bracket_hi > opt.bracket_lo, "mle_harness: empty search bracket");
  const auto ti = static_cast<std::size_t>(target);

  const double n_true = population(truth, t);
  const Gradient grad = population_gradient(truth, t);
  const double unit = std::max(std::abs(truth.values[ti]), detail::fd_scale(ti, truth, t));
  if (!(n_true > 0.0) || std::abs(grad[ti]) * unit <= 1e-12 * n_true)
    throw degenerate_error(std::string("mle_harness: parameter ") + kParamNames[ti] +
                           " is not identifiable at this time (zero population gradient)");

  const Pmf pmf = geometric_pmf(n_true);
  MleReport r;
  r.true_value = truth.values[ti];
  r.fisher = fim_thermal(truth, t).matrix(ti, ti);
  r.bound = 1.0 / (static_cast<double>(repetitions) * r.fisher);
  r.estimates.resize(trials);

  parallel_for(trials, opt.workers, [&](std::size_t i) {
    std::mt19937_64 rng(derive_seed(opt.seed, i));
    const auto draws = sample(pmf, repetitions, rng);
    const double kbar = std::accumulate(draws.begin(), draws.end(), 0.0) / static_cast<double>(repetitions);
    auto loglik = [&](double value) {
      ParamVector th = truth;
      th.values[ti] = value;
      const double n = detail::population_of(th, t);
      if (!(n > 0.0)) return kbar > 0.0 ? -std::numeric_limits<double>::infinity() : 0.0;
      return kbar * std::log(n) - (kbar + 1.0) * std::log1p(n);
    };
    r.estimates[i] = detail::golden_section_max(loglik, opt.bracket_lo, opt.bracket_hi, opt.tolerance);
  });

  const double dn = static_cast<double>(trials);
  r.mean = std::accumulate(r.estimates.begin(), r.estimates.end(), 0.0) / dn;
  r.bias = r.mean - r.true_value;
  if (trials >= 2) {
    double ss = 0.0;
    for (double x : r.estimates) ss += (x - r.mean) * (x - r.mean);
    r.variance = ss / (dn - 1.0);
    r.bias_standard_error = std::sqrt(r.variance / dn);
    r.variance_ratio = r.variance / r.bound;
  }
  return r;
}

}  // namespace crossdamp

#endif  // CROSSDAMP_INFERENCE_HPP
