#ifndef CROSSDAMP_PHONON_STATS_HPP
#define CROSSDAMP_PHONON_STATS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <vector>

#include "crossdamp/error.hpp"
#include "crossdamp/hypergeometric.hpp"
#include "crossdamp/moments.hpp"

namespace crossdamp {

// Reduced single-ion Gaussian state: n = <a^dag a>, m = -<a^2>.
struct LocalGaussian {
  double n = 0.0;
  cplx m{};

  // n(n+1) - |m|^2 >= 0, up to a relative slack for rounding.
  bool is_physical(double tol = 1e-12) const {
    return n >= 0.0 && n * (n + 1.0) - std::norm(m) >= -tol * std::max(1.0, n * (n + 1.0));
  }
};

// Truncated phonon-number distribution over k = 0..k_max().
struct Pmf {
  std::vector<double> probabilities;
  double tail_bound = 0.0;  // probability mass beyond k_max()

  std::size_t k_max() const { return probabilities.empty() ? 0 : probabilities.size() - 1; }
  double operator[](std::size_t k) const { return probabilities[k]; }

  double total() const {
    double s = 0.0;
    for (double p : probabilities) s += p;
    return s;
  }

  double mean() const {
    double s = 0.0;
    for (std::size_t k = 0; k < probabilities.size(); ++k) s += static_cast<double>(k) * probabilities[k];
    return s;
  }
};

inline constexpr double kPmfTailTarget = 1e-12;
inline constexpr std::size_t kPmfSupportCap = 100'000;

/// Thermal (geometric) distribution n^k / (1+n)^(k+1).
inline Pmf geometric_pmf(double n, std::size_t k_max) {
  detail::require(n >= 0.0 && std::isfinite(n), "geometric_pmf: mean occupation must be non-negative");
  const double q = n / (1.0 + n);
  const double p0 = 1.0 / (1.0 + n);
  Pmf out;
  out.probabilities.resize(k_max + 1);
  double qk = 1.0;
  for (std::size_t k = 0; k <= k_max; ++k) {
    out.probabilities[k] = p0 * qk;
    qk *= q;
  }
  out.tail_bound = std::pow(q, static_cast<double>(k_max + 1));
  return out;
}

/// Geometric distribution on the smallest support whose tail is <= 1e-12.
inline Pmf geometric_pmf(double n) {
  detail::require(n >= 0.0 && std::isfinite(n), "geometric_pmf: mean occupation must be non-negative");
  if (n == 0.0) return geometric_pmf(0.0, 0);
  const double q = n / (1.0 + n);
  const double needed = std::ceil(std::log(kPmfTailTarget) / std::log(q)) - 1.0;
  const auto k_max = static_cast<std::size_t>(
      std::clamp(needed, 0.0, static_cast<double>(kPmfSupportCap)));
  return geometric_pmf(n, k_max);
}

namespace detail {

// Closed form in terms of 2F1((k+1)/2, (k+2)/2; 1; z); requires n^2 > |m|^2.
// Returns nullopt when the factors leave double range.
inline std::optional<double> phonon_probability_direct(const LocalGaussian& g, std::size_t k) {
  const double m2 = std::norm(g.m);
  const double d = g.n * g.n - m2;
  if (!(d > 0.0)) return std::nullopt;
  const double beta = g.n * (g.n + 1.0) - m2;
  const double z = m2 / (beta * beta);
  const double kk = static_cast<double>(k);
  const double f = hyp2f1((kk + 1.0) / 2.0, (kk + 2.0) / 2.0, 1.0, z);
  if (!std::isfinite(f) || !(f > 0.0)) return std::nullopt;
  const double log_p = std::log(f) - (kk + 1.0) * std::log1p(g.n / d) - 0.5 * std::log(d);
  const double p = std::exp(log_p);
  if (!std::isfinite(p)) return std::nullopt;
  return p;
}

// Euler-transformed form of the same expression:
//   P(k) = alpha^(-k-1/2) sum_j c_j |m|^(2j) beta^(k-2j),
//   c_j = (-k/2)_j ((1-k)/2)_j / (j!)^2,
// with alpha = (1+n)^2 - |m|^2 and beta = n(n+1) - |m|^2. The sum terminates,
// every term is non-negative, and it stays real when n^2 <= |m|^2.
inline double phonon_probability_terminating(const LocalGaussian& g, std::size_t k) {
  const double m2 = std::norm(g.m);
  const double alpha = (1.0 + g.n) * (1.0 + g.n) - m2;
  const double beta = std::max(0.0, g.n * (g.n + 1.0) - m2);
  const double kk = static_cast<double>(k);
  const double log_alpha = std::log(alpha);
  const double log_m2 = m2 > 0.0 ? std::log(m2) : 0.0;
  const double log_beta = beta > 0.0 ? std::log(beta) : 0.0;

  const std::size_t jmax = k / 2;
  std::vector<double> logs;
  logs.reserve(jmax + 1);
  double log_c = 0.0;
  for (std::size_t j = 0; j <= jmax; ++j) {
    const double jj = static_cast<double>(j);
    const std::size_t beta_power = k - 2 * j;
    const bool vanishes = (j > 0 && m2 == 0.0) || (beta_power > 0 && beta == 0.0);
    if (!vanishes) {
      double lt = log_c - (kk + 0.5) * log_alpha;
      if (j > 0) lt += jj * log_m2;
      if (beta_power > 0) lt += static_cast<double>(beta_power) * log_beta;
      logs.push_back(lt);
    }
    if (j < jmax) log_c += std::log((jj - kk / 2.0) * (jj + (1.0 - kk) / 2.0)) - 2.0 * std::log(jj + 1.0);
  }
  if (logs.empty()) return 0.0;
  const double top = *std::max_element(logs.begin(), logs.end());
  double s = 0.0;
  for (double lt : logs) s += std::exp(lt - top);
  return std::exp(top) * s;
}

inline void require_supported(const LocalGaussian& g) {
  require(std::isfinite(g.n) && std::isfinite(g.m.real()) && std::isfinite(g.m.imag()),
          "general_pmf: non-finite moments");
  require(g.is_physical(), "general_pmf: unphysical local state (n(n+1) < |m|^2)");
  if (g.n > 0.0 && (1.0 + g.n) * (1.0 + g.n) - std::norm(g.m) <= 0.0)
    throw unsupported_regime("general_pmf: alpha = (1+n)^2 - |m|^2 vanishes");
}

inline double phonon_probability(const LocalGaussian& g, std::size_t k) {
  if (g.n == 0.0) return k == 0 ? 1.0 : 0.0;
  if (auto p = phonon_probability_direct(g, k)) return *p;
  return phonon_probability_terminating(g, k);
}

}  // namespace detail

/// Phonon-number distribution of a zero-mean single-mode Gaussian state.
///
/// Evaluates the hypergeometric closed form where n^2 > |m|^2. Elsewhere on
/// the physical domain (strong squeezing, weak thermal noise) the
/// square-root factor turns imaginary and the Euler-transformed terminating
/// sum, which is the same function, is used instead.
inline Pmf general_pmf(const LocalGaussian& g, std::size_t k_max) {
  detail::require_supported(g);
  Pmf out;
  out.probabilities.resize(k_max + 1);
  double s = 0.0;
  for (std::size_t k = 0; k <= k_max; ++k) {
    out.probabilities[k] = detail::phonon_probability(g, k);
    s += out.probabilities[k];
  }
  out.tail_bound = std::max(0.0, 1.0 - s);
  return out;
}

/// Same, with the support grown until the remaining mass is <= 1e-12.
inline Pmf general_pmf(const LocalGaussian& g) {
  detail::require_supported(g);
  Pmf out;
  double s = 0.0;
  for (std::size_t k = 0; k <= kPmfSupportCap; ++k) {
    const double p = detail::phonon_probability(g, k);
    out.probabilities.push_back(p);
    s += p;
    if (1.0 - s <= kPmfTailTarget) break;
  }
  out.tail_bound = std::max(0.0, 1.0 - s);
  return out;
}

namespace detail {

// 53 random bits mapped to [0, 1); identical on every platform.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Inverse-CDF draws of phonon counts; mass beyond k_max lands on k_max.
inline std::vector<std::uint32_t> sample(const Pmf& pmf, std::size_t count, std::mt19937_64& rng) {
  detail::require(count >= 1, "sample: count must be at least 1");
  detail::require(!pmf.probabilities.empty(), "sample: empty distribution");
  std::vector<double> cdf(pmf.probabilities.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < cdf.size(); ++k) {
    acc += pmf.probabilities[k];
    cdf[k] = acc;
  }
  std::vector<std::uint32_t> out(count);
  const auto last = static_cast<std::uint32_t>(cdf.size() - 1);
  for (auto& k : out) {
    const double u = detail::uniform01(rng);
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    k = it == cdf.end() ? last : static_cast<std::uint32_t>(it - cdf.begin());
  }
  return out;
}

inline std::vector<std::uint32_t> sample(const Pmf& pmf, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample(pmf, count, rng);
}

inline std::vector<std::size_t> histogram(const std::vector<std::uint32_t>& draws, std::size_t k_max) {
  std::vector<std::size_t> counts(k_max + 1, 0);
  for (auto k : draws) ++counts[std::min<std::size_t>(k, k_max)];
  return counts;
}

inline void write_pmf_csv(std::ostream& os, const Pmf& pmf) {
  os << "k,probability\n";
  char buf[64];
  for (std::size_t k = 0; k < pmf.probabilities.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", k, pmf.probabilities[k]);
    os << buf;
  }
}

}  // namespace crossdamp

#endif  // CROSSDAMP_PHONON_STATS_HPP
