#pragma once

#include <numbers>

namespace ecollapse {

namespace codata {
inline constexpr double kHbarEvSeconds = 6.582119569e-16;
inline constexpr double kPlanckTimeSeconds = 5.391247e-44;
inline constexpr double kSpeedOfLight = 299792458.0;       // m/s
inline constexpr double kBoltzmannEvPerKelvin = 8.617333262e-5;
inline constexpr double kElementaryCharge = 1.602176634e-19;  // J per eV
inline constexpr double kElectronMassKg = 9.1093837015e-31;
}  // namespace codata

/// The two constants that fix the collapse dynamics: the discrete time unit
/// t_P and the reduced Planck constant. The Planck energy is always derived as
/// E_P = h / t_P with h = 2*pi*hbar, so the invariant holds by construction.
class CollapseConstants {
 public:
  CollapseConstants() : CollapseConstants(codata::kPlanckTimeSeconds, codata::kHbarEvSeconds) {}
  CollapseConstants(double planck_time_s, double hbar_ev_s);

  double planck_time() const noexcept { return planck_time_; }
  double hbar() const noexcept { return hbar_; }
  double planck_constant() const noexcept { return 2.0 * std::numbers::pi * hbar_; }
  double planck_energy() const noexcept { return planck_constant() / planck_time_; }

  /// Multiplier turning an energy in units of E_P into k = dE * t_P / hbar.
  /// Equal to 2*pi up to rounding.
  double strength_per_planck_energy() const noexcept {
    return planck_energy() * planck_time_ / hbar_;
  }

 private:
  double planck_time_;
  double hbar_;
};

/// Constants used by the physical case studies. Energies in eV, lengths in
/// metres, masses in kilograms, temperatures in kelvin.
struct PhysicalConstants {
  CollapseConstants collapse{};
  double speed_of_light = codata::kSpeedOfLight;
  double boltzmann = codata::kBoltzmannEvPerKelvin;
  double universe_radius = 1e25;
  double electron_mass = codata::kElectronMassKg;
  double standard_temperature = 300.0;

  double hbar() const noexcept { return collapse.hbar(); }
  double planck_constant() const noexcept { return collapse.planck_constant(); }
  double planck_time() const noexcept { return collapse.planck_time(); }
  double planck_energy() const noexcept { return collapse.planck_energy(); }

  /// Throws DomainError unless every constant is finite and positive.
  void validate() const;
};

}  // namespace ecollapse
