#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ecollapse/constants.hpp"

namespace ecollapse {

/// An energy stored as a fraction of the Planck energy E_P. Physical units
/// appear only at construction and when reading the value back out.
class Energy {
 public:
  constexpr Energy() = default;

  static constexpr Energy from_planck(double fraction) { return Energy(fraction); }
  static Energy from_eV(double ev, const CollapseConstants& constants = {});
  /// E = hbar * omega.
  static Energy from_angular_frequency(double omega_rad_s, const CollapseConstants& constants = {});

  constexpr double planck() const noexcept { return fraction_; }
  double eV(const CollapseConstants& constants = {}) const noexcept;

  friend constexpr Energy operator+(Energy a, Energy b) { return Energy(a.fraction_ + b.fraction_); }
  friend constexpr Energy operator-(Energy a, Energy b) { return Energy(a.fraction_ - b.fraction_); }
  friend constexpr Energy operator*(double s, Energy e) { return Energy(s * e.fraction_); }
  friend constexpr auto operator<=>(Energy, Energy) = default;

 private:
  constexpr explicit Energy(double fraction) : fraction_(fraction) {}
  double fraction_ = 0.0;
};

/// Eigenvalues E_i of a multi-level system, in units of E_P.
class EnergySpectrum {
 public:
  static EnergySpectrum from_planck(std::vector<double> fractions);
  static EnergySpectrum from_eV(std::span<const double> ev, const CollapseConstants& constants = {});
  static EnergySpectrum from_angular_frequencies(std::span<const double> omega_rad_s,
                                                 const CollapseConstants& constants = {});

  std::size_t size() const noexcept { return levels_.size(); }
  Energy level(std::size_t i) const { return Energy::from_planck(levels_.at(i)); }
  std::span<const double> planck() const noexcept { return levels_; }
  std::vector<double> to_eV(const CollapseConstants& constants = {}) const;

 private:
  explicit EnergySpectrum(std::vector<double> levels);
  std::vector<double> levels_;
};

/// Per-subsystem, per-branch energies E_li of an entangled many-body state.
/// Row l is subsystem l; column i is branch i. Units of E_P.
class ManyBodySpectrum {
 public:
  static ManyBodySpectrum from_planck(const std::vector<std::vector<double>>& rows);
  static ManyBodySpectrum from_eV(const std::vector<std::vector<double>>& rows,
                                  const CollapseConstants& constants = {});

  std::size_t subsystems() const noexcept { return subsystems_; }
  std::size_t branches() const noexcept { return branches_; }
  double at(std::size_t subsystem, std::size_t branch) const {
    return energies_.at(subsystem * branches_ + branch);
  }
  std::span<const double> row(std::size_t subsystem) const;
  EnergySpectrum row_spectrum(std::size_t subsystem) const;
  /// Branch energies of the whole system, sum over subsystems.
  EnergySpectrum total_energy() const;

 private:
  ManyBodySpectrum(std::size_t subsystems, std::size_t branches, std::vector<double> energies);
  std::size_t subsystems_;
  std::size_t branches_;
  std::vector<double> energies_;
};

}  // namespace ecollapse
