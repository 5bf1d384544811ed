#ifndef CROSSDAMP_ENTANGLEMENT_HPP
#define CROSSDAMP_ENTANGLEMENT_HPP

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "crossdamp/covariance.hpp"
#include "crossdamp/dynamics.hpp"
#include "crossdamp/error.hpp"
#include "crossdamp/model.hpp"
#include "crossdamp/moments.hpp"
#include "crossdamp/parallel.hpp"

namespace crossdamp {

// Squeezed thermal state with squeezing phase 0: the x quadrature is squeezed.
struct SqueezedThermalSpec {
  double nbar = 0.0;
  double r = 0.0;

  void validate() const {
    detail::require(std::isfinite(nbar) && nbar >= 0.0, "SqueezedThermalSpec: nbar must be >= 0");
    detail::require(std::isfinite(r), "SqueezedThermalSpec: r must be finite");
  }
  double n() const { return (nbar + 0.5) * std::cosh(2.0 * r) - 0.5; }
  double m() const { return (nbar + 0.5) * std::sinh(2.0 * r); }
};

/// Uncorrelated start: ion 1 thermal with nbar1, ion 2 squeezed thermal.
inline MomentState thermal_squeezed_product(double nbar1, const SqueezedThermalSpec& ion2) {
  detail::require(std::isfinite(nbar1) && nbar1 >= 0.0, "thermal_squeezed_product: nbar1 must be >= 0");
  ion2.validate();
  MomentState s = MomentState::thermal(nbar1, ion2.n());
  s.m2 = ion2.m();
  return s;
}

struct YInvariant {
  double y = 0.0;
  double i1 = 0.0;  // det V1
  double i2 = 0.0;  // det V2
  double i3 = 0.0;  // det C
  double i4 = 0.0;  // tr(V1 J C J V2 J C^T J)

  bool entangled() const { return y < 0.0; }
  double depth() const { return std::abs(y); }
};

/// Separability function Y = I1 I2 + (1/4 - |I3|)^2 - I4 - (I1 + I2)/4.
/// Y < 0 exactly when the two-mode Gaussian state is entangled.
inline YInvariant y_invariant(const CovarianceReal& s) {
  const Eigen::Matrix2d v1 = s.local1(), v2 = s.local2(), c = s.cross();
  const Eigen::Matrix2d j = symplectic_unit();
  YInvariant out;
  out.i1 = v1.determinant();
  out.i2 = v2.determinant();
  out.i3 = c.determinant();
  out.i4 = (v1 * j * c * j * v2 * j * c.transpose() * j).trace();
  const double q = 0.25 - std::abs(out.i3);
  out.y = out.i1 * out.i2 + q * q - out.i4 - 0.25 * (out.i1 + out.i2);
  return out;
}

// Alternative evaluation: smallest symplectic eigenvalue of the partially
// transposed covariance. The state is entangled iff it is below 1/2.
inline double pt_symplectic_min(const CovarianceReal& s) {
  const double i1 = s.local1().determinant(), i2 = s.local2().determinant(), i3 = s.cross().determinant();
  const double delta = i1 + i2 - 2.0 * i3;
  const double det = s.matrix.determinant();
  const double disc = std::max(0.0, delta * delta - 4.0 * det);
  return std::sqrt(std::max(0.0, (delta - std::sqrt(disc)) / 2.0));
}

/// Y(t) along the grid for the thermal x squeezed-thermal product start.
inline std::vector<YInvariant> evolve_y(double nbar1, const SqueezedThermalSpec& ion2, const ModelParams& p,
                                        const std::vector<double>& t_grid) {
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    detail::require_time(t_grid[i]);
    if (i > 0) detail::require(t_grid[i] > t_grid[i - 1], "evolve_y: time grid must be strictly increasing");
  }
  const MomentState s0 = thermal_squeezed_product(nbar1, ion2);
  std::vector<YInvariant> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) out.push_back(y_invariant(to_real_covariance(propagate(s0, p, t))));
  return out;
}

// ---------------------------------------------------------------------------
// Grid scans.

enum class ScanAxis { time, gamma12_ratio, temperature_ratio, squeeze_r };

inline const char* axis_name(ScanAxis a) {
  switch (a) {
    case ScanAxis::time: return "t";
    case ScanAxis::gamma12_ratio: return "gamma12_over_gamma";
    case ScanAxis::temperature_ratio: return "hbar_omega0_over_kT";
    case ScanAxis::squeeze_r: return "r";
  }
  return "?";
}

struct ScanAxisGrid {
  ScanAxis axis = ScanAxis::time;
  std::vector<double> values;
};

// Values for every quantity that is not scanned. N-bar of the bath follows
// from temperature_ratio.
struct ScanFixed {
  double omega0 = 0.0;
  double coupling = 0.0;
  double gamma = 1.0;
  double gamma12_ratio = 1.0;
  double temperature_ratio = 1.0;
  double r = 2.0;
  double nbar1 = 0.0;
  double nbar2 = 0.0;
  double t = 0.0;
};

struct ScanRow {
  std::size_t index = 0;
  std::array<double, 3> coords{};  // axis values in axis order; unused slots are 0
  YInvariant y;
};

namespace detail {

inline void validate_axes(const std::vector<ScanAxisGrid>& axes) {
  require(axes.size() >= 1 && axes.size() <= 3, "scan: between one and three axes are required");
  for (std::size_t a = 0; a < axes.size(); ++a) {
    for (std::size_t b = 0; b < a; ++b)
      require(axes[a].axis != axes[b].axis, std::string("scan: duplicate axis ") + axis_name(axes[a].axis));
    const auto& v = axes[a].values;
    require(!v.empty(), std::string("scan: empty grid for axis ") + axis_name(axes[a].axis));
    for (std::size_t i = 1; i < v.size(); ++i)
      require(v[i] > v[i - 1], std::string("scan: grid must be strictly increasing for axis ") +
                                   axis_name(axes[a].axis));
  }
}

inline YInvariant scan_point(const ScanFixed& base, const std::vector<ScanAxisGrid>& axes,
                             const std::array<double, 3>& coords) {
  ScanFixed f = base;
  for (std::size_t a = 0; a < axes.size(); ++a) {
    switch (axes[a].axis) {
      case ScanAxis::time: f.t = coords[a]; break;
      case ScanAxis::gamma12_ratio: f.gamma12_ratio = coords[a]; break;
      case ScanAxis::temperature_ratio: f.temperature_ratio = coords[a]; break;
      case ScanAxis::squeeze_r: f.r = coords[a]; break;
    }
  }
  const ModelParams p(f.omega0, f.coupling, f.gamma, f.gamma12_ratio * f.gamma, bose_occupation(f.temperature_ratio));
  require_time(f.t);
  const MomentState s0 = thermal_squeezed_product(f.nbar1, {f.nbar2, f.r});
  return y_invariant(to_real_covariance(propagate(s0, p, f.t)));
}

}  // namespace detail

inline std::size_t scan_size(const std::vector<ScanAxisGrid>& axes) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return n;
}

/// Evaluates Y on the tensor grid of `axes` (last axis fastest) and hands each
/// row to `sink` in grid order. Rows are computed in blocks of `block` points,
/// optionally across worker threads, so memory stays bounded for large grids.
inline void scan(const std::vector<ScanAxisGrid>& axes, const ScanFixed& fixed,
                 const std::function<void(const ScanRow&)>& sink, unsigned workers = 1,
                 std::size_t block = 4096) {
  detail::validate_axes(axes);
  block = std::max<std::size_t>(block, 1);
  const std::size_t total = scan_size(axes);
  std::vector<ScanRow> rows;
  for (std::size_t start = 0; start < total; start += block) {
    const std::size_t n = std::min(block, total - start);
    rows.assign(n, ScanRow{});
    parallel_for(n, workers, [&](std::size_t i) {
      ScanRow& row = rows[i];
      row.index = start + i;
      std::size_t rem = row.index;
      for (std::size_t a = axes.size(); a-- > 0;) {
        const std::size_t len = axes[a].values.size();
        row.coords[a] = axes[a].values[rem % len];
        rem /= len;
      }
      row.y = detail::scan_point(fixed, axes, row.coords);
    });
    for (const auto& row : rows) sink(row);
  }
}

/// Convenience: the whole grid in memory.
inline std::vector<ScanRow> scan(const std::vector<ScanAxisGrid>& axes, const ScanFixed& fixed,
                                 unsigned workers = 1) {
  std::vector<ScanRow> out;
  out.reserve(scan_size(axes));
  scan(axes, fixed, [&](const ScanRow& r) { out.push_back(r); }, workers);
  return out;
}

}  // namespace crossdamp

#endif  // CROSSDAMP_ENTANGLEMENT_HPP
