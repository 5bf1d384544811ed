#ifndef CROSSDAMP_MODEL_HPP
#define CROSSDAMP_MODEL_HPP

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "crossdamp/error.hpp"

namespace crossdamp {

// CODATA 2018 exact/recommended values, SI units.
struct Constants {
  static constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
  static constexpr double reduced_planck = 1.054571817e-34;        // J s
  static constexpr double boltzmann = 1.380649e-23;                // J/K
  static constexpr double elementary_charge = 1.602176634e-19;     // C
  static constexpr double coulomb_constant =
      1.0 / (4.0 * std::numbers::pi * vacuum_permittivity);
};

// Trap geometry of two identical ions along the axis joining them.
struct PhysicalParams {
  double mass = 0.0;            // kg
  double charge = 0.0;          // C
  double separation = 0.0;      // m
  double trap_frequency = 0.0;  // rad/s
  std::optional<double> temperature_ratio;  // hbar*omega0/(k_B T)

  void validate() const {
    detail::require(mass > 0.0, "PhysicalParams: mass must be positive");
    detail::require(charge != 0.0 && std::isfinite(charge),
                    "PhysicalParams: charge must be non-zero");
    detail::require(separation > 0.0, "PhysicalParams: separation must be positive");
    detail::require(trap_frequency > 0.0,
                    "PhysicalParams: trap frequency must be positive");
    if (temperature_ratio)
      detail::require(*temperature_ratio > 0.0,
                      "PhysicalParams: temperature ratio must be positive");
  }
};

// Coherent part of the two-ion model: renormalized frequency and exchange coupling.
struct TrapCoupling {
  double omega0 = 0.0;    // rad/s
  double coupling = 0.0;  // rad/s, negative for Coulomb repulsion
};

/// Coulomb-induced frequency shift and beam-splitter coupling for the
/// second-order expansion of the ion-ion repulsion.
inline TrapCoupling effective_model(const PhysicalParams& p) {
  p.validate();
  const double d3 = p.separation * p.separation * p.separation;
  const double shift = Constants::coulomb_constant * p.charge * p.charge /
                       (p.mass * p.trap_frequency * d3);
  return {p.trap_frequency + shift, -shift};
}

/// Bose-Einstein occupation 1/(e^x - 1) for x = hbar*omega0/(k_B T).
inline double bose_occupation(double ratio) {
  detail::require(ratio > 0.0 && !std::isnan(ratio),
                  "bose_occupation: ratio must be positive");
  return 1.0 / std::expm1(ratio);
}

// Effective parameters consumed by every downstream module. The damping is
// symmetric: gamma = gamma_11 = gamma_22 and gamma12 = gamma_12 = gamma_21.
class ModelParams {
 public:
  ModelParams(double omega0, double coupling, double gamma, double gamma12, double nbar)
      : omega0_(omega0), coupling_(coupling), gamma_(gamma), gamma12_(gamma12), nbar_(nbar) {
    detail::require(std::isfinite(omega0) && std::isfinite(coupling),
                    "ModelParams: frequencies must be finite");
    detail::require(std::isfinite(gamma) && gamma >= 0.0,
                    "ModelParams: gamma must be non-negative");
    detail::require(std::isfinite(gamma12) && gamma12 >= 0.0,
                    "ModelParams: gamma12 must be non-negative");
    detail::require(gamma12 <= gamma,
                    "ModelParams: gamma12 exceeds gamma (Cauchy-Schwarz bound)");
    detail::require(std::isfinite(nbar) && nbar >= 0.0,
                    "ModelParams: reservoir occupation must be non-negative");
  }

  ModelParams(const TrapCoupling& trap, double gamma, double gamma12, double nbar)
      : ModelParams(trap.omega0, trap.coupling, gamma, gamma12, nbar) {}

  double omega0() const { return omega0_; }
  double coupling() const { return coupling_; }
  double gamma() const { return gamma_; }
  double gamma12() const { return gamma12_; }
  double nbar() const { return nbar_; }

  // Decoherence-free point: stored values compare bit-equal.
  bool is_dfs() const { return gamma12_ == gamma_; }

  ModelParams with_coupling(double v) const { return {omega0_, v, gamma_, gamma12_, nbar_}; }
  ModelParams with_gamma12(double v) const { return {omega0_, coupling_, gamma_, v, nbar_}; }
  ModelParams with_nbar(double v) const { return {omega0_, coupling_, gamma_, gamma12_, v}; }
  ModelParams with_rates(double g, double g12) const { return {omega0_, coupling_, g, g12, nbar_}; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  double omega0_;
  double coupling_;
  double gamma_;
  double gamma12_;
  double nbar_;
};

}  // namespace crossdamp

#endif  // CROSSDAMP_MODEL_HPP
