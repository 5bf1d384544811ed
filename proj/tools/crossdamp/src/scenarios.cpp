#include "scenarios.hpp"

#include <cmath>
#include <string>

#include "crossdamp.hpp"

namespace cdtool {

namespace cd = crossdamp;

namespace {

constexpr std::size_t kBlock = 4096;

double unit_time(const ScenarioConfig& c, std::size_t i) { return c.time.values[i]; }

cd::ModelParams curve_model(const ScenarioConfig& c, double ratio) {
  return {c.omega0, c.coupling, c.gamma, ratio * c.gamma, c.nbar};
}

cd::ParamVector curve_theta(const ScenarioConfig& c, double ratio) {
  return cd::ParamVector::from_model(c.n1, c.n2, curve_model(c, ratio));
}

// Computes f(i) for every time index in parallel blocks and emits the results
// in grid order, so the output does not depend on the worker count.
template <class Result, class Compute, class Emit>
void over_times(const ScenarioConfig& c, Compute&& compute, Emit&& emit) {
  const std::size_t total = c.times_seconds.size();
  std::vector<Result> buf;
  for (std::size_t start = 0; start < total; start += kBlock) {
    const std::size_t n = std::min(kBlock, total - start);
    buf.assign(n, Result{});
    cd::parallel_for(n, c.workers, [&](std::size_t i) { buf[i] = compute(start + i); });
    for (std::size_t i = 0; i < n; ++i) emit(start + i, buf[i]);
  }
}

nlohmann::ordered_json run_population(const ScenarioConfig& c, OutputSet& out) {
  TableWriter w(out, "population", {"gamma12_over_gamma", "t", "t_seconds", "n1", "n2"}, c.format);
  nlohmann::ordered_json final_values = nlohmann::ordered_json::array();
  for (double ratio : c.gamma12_ratios) {
    const auto p = curve_model(c, ratio);
    std::array<double, 2> last{};
    over_times<std::array<double, 2>>(
        c,
        [&](std::size_t i) {
          const double t = c.times_seconds[i];
          return std::array<double, 2>{cd::population(1, c.n1, c.n2, p, t), cd::population(2, c.n1, c.n2, p, t)};
        },
        [&](std::size_t i, const std::array<double, 2>& v) {
          w.row({ratio, unit_time(c, i), c.times_seconds[i], v[0], v[1]});
          last = v;
        });
    const auto ss = cd::steady_state(c.n1, c.n2, p);
    final_values.push_back({{"gamma12_over_gamma", ratio},
                            {"n1_final", last[0]},
                            {"n2_final", last[1]},
                            {"steady_state", ss.occupation},
                            {"regime", ss.regime == cd::SteadyRegime::dfs ? "dfs" : "thermal"}});
  }
  w.close();
  return {{"curves", final_values}};
}

nlohmann::ordered_json run_fim(const ScenarioConfig& c, OutputSet& out) {
  std::vector<std::string> cols = {"gamma12_over_gamma", "t", "t_seconds"};
  for (auto [a, b] : c.fim_entries) cols.push_back("F" + std::to_string(a) + std::to_string(b));
  for (const char* s : {"I_gamma_plus", "I_gamma_minus", "I_cross"}) cols.push_back(s);
  TableWriter w(out, "fim", cols, c.format);
  const bool squeezed = c.m1 != 0.0 || c.m2 != 0.0;
  for (double ratio : c.gamma12_ratios) {
    const auto theta = curve_theta(c, ratio);
    const cd::SqueezedStartPath path{c.m1, c.m2, c.omega0};
    over_times<cd::FisherMatrix>(
        c,
        [&](std::size_t i) {
          const double t = c.times_seconds[i];
          cd::FisherMatrix f = squeezed ? cd::fim_general(path, theta, t) : cd::fim_thermal(theta, t);
          return c.fim_dimensionless ? cd::dimensionless(f, theta) : f;
        },
        [&](std::size_t i, const cd::FisherMatrix& f) {
          std::vector<Cell> row = {ratio, unit_time(c, i), c.times_seconds[i]};
          for (auto [a, b] : c.fim_entries) row.emplace_back(f.element(a, b));
          const auto info = cd::collective_rate_information(f);
          row.emplace_back(info.gamma_plus);
          row.emplace_back(info.gamma_minus);
          row.emplace_back(info.cross);
          w.row(row);
        });
  }
  w.close();
  return {{"model", squeezed ? "general" : "thermal"}, {"view", c.fim_dimensionless ? "dimensionless" : "raw"}};
}

nlohmann::ordered_json run_crb(const ScenarioConfig& c, OutputSet& out) {
  TableWriter w(out, "crb",
                {"gamma12_over_gamma", "t", "t_seconds", "parameter", "fisher_diagonal", "variance_bound",
                 "std_bound", "matrix_bound", "rank", "singular"},
                c.format);
  for (double ratio : c.gamma12_ratios) {
    const auto theta = curve_theta(c, ratio);
    over_times<cd::CrbReport>(
        c, [&](std::size_t i) { return cd::crb(cd::fim_thermal(theta, c.times_seconds[i]), c.repetitions); },
        [&](std::size_t i, const cd::CrbReport& r) {
          for (std::size_t a = 0; a < cd::kNumParams; ++a) {
            const double faa = 1.0 / (static_cast<double>(c.repetitions) * r.variance_bounds[a]);
            w.row({ratio, unit_time(c, i), c.times_seconds[i], std::string(cd::kParamNames[a]), faa,
                   r.variance_bounds[a], std::sqrt(r.variance_bounds[a]), r.matrix_bound(a, a),
                   std::int64_t{r.rank}, r.singular});
          }
        });
  }
  w.close();
  return {{"repetitions", c.repetitions}};
}

cd::Param param_from_name(const std::string& s) {
  for (std::size_t a = 0; a < cd::kNumParams; ++a)
    if (s == cd::kParamNames[a]) return static_cast<cd::Param>(a);
  throw ValidationError("unknown parameter " + s);
}

nlohmann::ordered_json run_mle(const ScenarioConfig& c, OutputSet& out) {
  const cd::Param target = param_from_name(c.target);
  TableWriter est(out, "mle_estimates", {"gamma12_over_gamma", "t", "t_seconds", "trial", "estimate"}, c.format);
  TableWriter sum(out, "mle_summary",
                  {"gamma12_over_gamma", "t", "t_seconds", "target", "true_value", "mean", "bias",
                   "bias_standard_error", "variance", "fisher", "bound", "variance_ratio"},
                  c.format);
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  std::uint64_t combo = 0;
  for (double ratio : c.gamma12_ratios) {
    const auto theta = curve_theta(c, ratio);
    for (std::size_t i = 0; i < c.times_seconds.size(); ++i, ++combo) {
      cd::MleOptions opt;
      opt.bracket_lo = c.bracket_lo;
      opt.bracket_hi = c.bracket_hi;
      opt.seed = combo == 0 ? c.seed : cd::derive_seed(c.seed, combo);
      opt.workers = c.workers;
      const double t = c.times_seconds[i];
      const auto r = cd::mle_harness(theta, t, c.repetitions, c.trials, target, opt);
      for (std::size_t k = 0; k < r.estimates.size(); ++k)
        est.row({ratio, unit_time(c, i), t, static_cast<std::int64_t>(k), r.estimates[k]});
      sum.row({ratio, unit_time(c, i), t, c.target, r.true_value, r.mean, r.bias, r.bias_standard_error, r.variance,
               r.fisher, r.bound, r.variance_ratio});
      runs.push_back({{"gamma12_over_gamma", ratio}, {"t_seconds", t}, {"seed", opt.seed},
                      {"variance_ratio", r.variance_ratio}});
    }
  }
  est.close();
  sum.close();
  return {{"target", c.target}, {"runs", runs}};
}

struct EvolveRow {
  cd::YInvariant y;
  double nu = 0.0;
};

nlohmann::ordered_json run_entangle_evolve(const ScenarioConfig& c, OutputSet& out) {
  TableWriter w(out, "entanglement",
                {"gamma12_over_gamma", "t", "t_seconds", "Y", "I1", "I2", "I3", "I4", "nu_pt_min", "entangled"},
                c.format);
  const auto s0 = cd::thermal_squeezed_product(c.n1, {c.n2, c.squeeze_r});
  nlohmann::ordered_json curves = nlohmann::ordered_json::array();
  for (double ratio : c.gamma12_ratios) {
    const auto p = curve_model(c, ratio);
    double min_y = INFINITY, last_entangled = -1.0;
    over_times<EvolveRow>(
        c,
        [&](std::size_t i) {
          const auto cov = cd::to_real_covariance(cd::propagate(s0, p, c.times_seconds[i]));
          return EvolveRow{cd::y_invariant(cov), cd::pt_symplectic_min(cov)};
        },
        [&](std::size_t i, const EvolveRow& r) {
          w.row({ratio, unit_time(c, i), c.times_seconds[i], r.y.y, r.y.i1, r.y.i2, r.y.i3, r.y.i4, r.nu,
                 r.y.entangled()});
          min_y = std::min(min_y, r.y.y);
          if (r.y.entangled()) last_entangled = c.times_seconds[i];
        });
    nlohmann::ordered_json curve = {{"gamma12_over_gamma", ratio}, {"min_Y", min_y}};
    curve["last_entangled_t_seconds"] = last_entangled >= 0.0 ? nlohmann::ordered_json(last_entangled) : nullptr;
    curves.push_back(curve);
  }
  w.close();
  return {{"curves", curves}};
}

cd::ScanAxis axis_of(const std::string& s) {
  if (s == "t") return cd::ScanAxis::time;
  if (s == "gamma12_over_gamma") return cd::ScanAxis::gamma12_ratio;
  if (s == "temperature_ratio") return cd::ScanAxis::temperature_ratio;
  if (s == "r") return cd::ScanAxis::squeeze_r;
  throw ValidationError("unknown scan axis " + s);
}

nlohmann::ordered_json run_entangle_scan(const ScenarioConfig& c, OutputSet& out) {
  std::vector<cd::ScanAxisGrid> axes;
  bool scans_temperature = false;
  for (const auto& a : c.axes) {
    axes.push_back({axis_of(a.axis), a.values});
    scans_temperature |= a.axis == "temperature_ratio";
  }
  cd::ScanFixed f;
  f.omega0 = c.omega0;
  f.coupling = c.coupling;
  f.gamma = c.gamma;
  f.gamma12_ratio = c.gamma12_ratios.front();
  f.r = c.squeeze_r;
  f.nbar1 = c.n1;
  f.nbar2 = c.n2;
  if (c.temperature_ratio) {
    f.temperature_ratio = *c.temperature_ratio;
  } else if (c.nbar > 0.0) {
    f.temperature_ratio = std::log1p(1.0 / c.nbar);
  } else if (!scans_temperature) {
    throw ValidationError(c.source + ": error: entangle-scan needs model.temperature_ratio (nbar = 0 has no finite ratio)");
  }

  std::vector<std::string> cols = {"index"};
  for (const auto& a : c.axes) cols.push_back(a.axis);
  for (const char* s : {"Y", "I1", "I2", "I3", "I4", "entangled"}) cols.push_back(s);
  TableWriter w(out, "scan", cols, c.format);
  std::size_t entangled = 0;
  double min_y = INFINITY;
  cd::scan(
      axes, f,
      [&](const cd::ScanRow& r) {
        std::vector<Cell> row = {static_cast<std::int64_t>(r.index)};
        for (std::size_t a = 0; a < axes.size(); ++a) row.emplace_back(r.coords[a]);
        for (double v : {r.y.y, r.y.i1, r.y.i2, r.y.i3, r.y.i4}) row.emplace_back(v);
        row.emplace_back(r.y.entangled());
        w.row(row);
        entangled += r.y.entangled();
        min_y = std::min(min_y, r.y.y);
      },
      c.workers, kBlock);
  w.close();

  nlohmann::ordered_json meta;
  meta["table"] = w.name();
  meta["order"] = "row-major, last axis fastest";
  auto& ax = meta["axes"] = nlohmann::ordered_json::array();
  for (const auto& a : c.axes) ax.push_back({{"axis", a.axis}, {"values", a.values}});
  meta["fixed"] = {{"omega0_rad_s", f.omega0},       {"coupling_rad_s", f.coupling}, {"gamma_per_s", f.gamma},
                   {"gamma12_over_gamma", f.gamma12_ratio}, {"temperature_ratio", f.temperature_ratio},
                   {"r", f.r},                       {"nbar1", f.nbar1},            {"nbar2", f.nbar2}};
  meta["time_unit"] = "seconds";
  write_json_file(out, "scan.meta.json", meta);
  return {{"points", cd::scan_size(axes)}, {"entangled_points", entangled}, {"min_Y", min_y}};
}

nlohmann::ordered_json run_dfs_null(const ScenarioConfig& c, OutputSet& out) {
  const auto theta = curve_theta(c, 1.0);
  const auto r = cd::dfs_null_scaling(theta, c.times_seconds);
  TableWriter w(out, "dfs_null", {"t", "t_seconds", "F44", "F55", "F45", "I_gamma_minus", "I_gamma_plus"}, c.format);
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    const double f44 = r.f44[i], f55 = r.f55[i], f45 = r.f45[i];
    w.row({unit_time(c, i), r.times[i], f44, f55, f45, 0.25 * (f44 - 2.0 * f45 + f55),
           0.25 * (f44 + 2.0 * f45 + f55)});
  }
  w.close();
  nlohmann::ordered_json s = {{"degenerate", r.degenerate},
                              {"slope_F44", r.slope_f44},
                              {"slope_I_gamma_minus", r.slope_gamma_minus},
                              {"slope_I_gamma_plus_envelope", r.slope_gamma_plus_envelope},
                              {"F44_F55_mismatch", r.f44_f55_mismatch},
                              {"F44_F45_mismatch", r.f44_f45_mismatch}};
  write_json_file(out, "dfs_null_summary.json", s);
  return s;
}

}  // namespace

nlohmann::ordered_json run_scenario(const ScenarioConfig& cfg, OutputSet& out) {
  switch (cfg.scenario) {
    case Scenario::population: return run_population(cfg, out);
    case Scenario::fim: return run_fim(cfg, out);
    case Scenario::crb: return run_crb(cfg, out);
    case Scenario::mle: return run_mle(cfg, out);
    case Scenario::entangle_evolve: return run_entangle_evolve(cfg, out);
    case Scenario::entangle_scan: return run_entangle_scan(cfg, out);
    case Scenario::dfs_null: return run_dfs_null(cfg, out);
  }
  return {};
}

}  // namespace cdtool
