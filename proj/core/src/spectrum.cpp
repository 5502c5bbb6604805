#include "ecollapse/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ecollapse/errors.hpp"

namespace ecollapse {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + " contains a non-finite energy");
  }
}

}  // namespace

Energy Energy::from_eV(double ev, const CollapseConstants& constants) {
  return Energy(ev / constants.planck_energy());
}

Energy Energy::from_angular_frequency(double omega_rad_s, const CollapseConstants& constants) {
  return from_eV(constants.hbar() * omega_rad_s, constants);
}

double Energy::eV(const CollapseConstants& constants) const noexcept {
  return fraction_ * constants.planck_energy();
}

EnergySpectrum::EnergySpectrum(std::vector<double> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw DimensionError("energy spectrum needs at least one level");
  require_finite(levels_, "energy spectrum");
}

EnergySpectrum EnergySpectrum::from_planck(std::vector<double> fractions) {
  return EnergySpectrum(std::move(fractions));
}

EnergySpectrum EnergySpectrum::from_eV(std::span<const double> ev, const CollapseConstants& constants) {
  std::vector<double> levels(ev.size());
  const double planck = constants.planck_energy();
  std::transform(ev.begin(), ev.end(), levels.begin(), [planck](double e) { return e / planck; });
  return EnergySpectrum(std::move(levels));
}

EnergySpectrum EnergySpectrum::from_angular_frequencies(std::span<const double> omega_rad_s,
                                                       const CollapseConstants& constants) {
  std::vector<double> ev(omega_rad_s.size());
  std::transform(omega_rad_s.begin(), omega_rad_s.end(), ev.begin(),
                 [&](double w) { return constants.hbar() * w; });
  return from_eV(ev, constants);
}

std::vector<double> EnergySpectrum::to_eV(const CollapseConstants& constants) const {
  std::vector<double> ev(levels_.size());
  const double planck = constants.planck_energy();
  std::transform(levels_.begin(), levels_.end(), ev.begin(), [planck](double e) { return e * planck; });
  return ev;
}

ManyBodySpectrum::ManyBodySpectrum(std::size_t subsystems, std::size_t branches,
                                   std::vector<double> energies)
    : subsystems_(subsystems), branches_(branches), energies_(std::move(energies)) {
  if (subsystems_ == 0 || branches_ == 0) {
    throw DimensionError("many-body spectrum needs at least one subsystem and one branch");
  }
  require_finite(energies_, "many-body spectrum");
}

ManyBodySpectrum ManyBodySpectrum::from_planck(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw DimensionError("many-body spectrum needs at least one subsystem");
  const std::size_t m = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * m);
  for (const auto& row : rows) {
    if (row.size() != m) {
      throw DimensionError("many-body spectrum rows must all have " + std::to_string(m) + " branches");
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return ManyBodySpectrum(rows.size(), m, std::move(flat));
}

ManyBodySpectrum ManyBodySpectrum::from_eV(const std::vector<std::vector<double>>& rows,
                                           const CollapseConstants& constants) {
  auto scaled = rows;
  const double planck = constants.planck_energy();
  for (auto& row : scaled) {
    for (double& e : row) e /= planck;
  }
  return from_planck(scaled);
}

std::span<const double> ManyBodySpectrum::row(std::size_t subsystem) const {
  if (subsystem >= subsystems_) throw DimensionError("subsystem index out of range");
  return std::span<const double>(energies_).subspan(subsystem * branches_, branches_);
}

EnergySpectrum ManyBodySpectrum::row_spectrum(std::size_t subsystem) const {
  auto r = row(subsystem);
  return EnergySpectrum::from_planck(std::vector<double>(r.begin(), r.end()));
}

EnergySpectrum ManyBodySpectrum::total_energy() const {
  std::vector<double> total(branches_, 0.0);
  for (std::size_t l = 0; l < subsystems_; ++l) {
    auto r = row(l);
    for (std::size_t i = 0; i < branches_; ++i) total[i] += r[i];
  }
  return EnergySpectrum::from_planck(std::move(total));
}

}  // namespace ecollapse
