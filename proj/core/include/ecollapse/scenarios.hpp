#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ecollapse/constants.hpp"

namespace ecollapse {

enum class Unit {
  Second,
  ElectronVolt,
  ElectronVoltPerSecond,
  Meter,
  Centimeter,
  Gram,
  Watt,
  Volt,
  Kelvin,
  PerSquareCentimeterSecond,
  Dimensionless,
};
std::string_view unit_symbol(Unit unit) noexcept;

struct Quantity {
  double value = 0.0;
  Unit unit = Unit::Dimensionless;
};

struct NamedQuantity {
  std::string name;
  Quantity quantity;
};

/// How a row is judged. QuotedFactor: computed/quoted within [1/f, f].
/// DerivedOracle: the quoted value is known to disagree with its own formula,
/// so the row is checked against an independent evaluation (relative
/// tolerance) and the quoted ratio is only reported.
enum class CheckKind { QuotedFactor, DerivedOracle };

struct ScenarioResult {
  std::string name;
  std::vector<NamedQuantity> inputs;
  Quantity computed;
  Quantity quoted;
  double ratio = 1.0;  // computed / quoted
  CheckKind check = CheckKind::QuotedFactor;
  double tolerance = 10.0;
  std::optional<Quantity> derived;
  bool within_tolerance = false;
  std::string note;

  bool flagged() const noexcept { return check == CheckKind::DerivedOracle; }
};

/// Unit tags of `computed` and `quoted` must agree (DimensionError otherwise);
/// the ratio must be finite and positive (DomainError otherwise).
ScenarioResult make_quoted_row(std::string name, std::vector<NamedQuantity> inputs, Quantity computed,
                               Quantity quoted, double factor = 10.0, std::string note = {});
ScenarioResult make_flagged_row(std::string name, std::vector<NamedQuantity> inputs, Quantity computed,
                                Quantity quoted, Quantity derived, double relative_tolerance = 0.05,
                                std::string note = {});

/// Photon, SQUID and 180Ta coherence: collapse times from the closed form.
std::vector<ScenarioResult> coherence_scenarios(const PhysicalConstants& pc = {});

/// Photodiode (energy dissipated per measuring interval), single neuron and a
/// 10^7-neuron perception.
std::vector<ScenarioResult> measurement_scenarios(const PhysicalConstants& pc = {});

struct DustAccretion {
  double mass_g = 1e-7;
  double temperature_k = 300.0;
  double accretion_interval_s = 1e-14;
  /// Kinetic-energy difference per accreted molecule; (3/2) k_B T when unset.
  std::optional<double> per_molecule_energy_ev{};
};

struct Elapsed {
  double seconds = 1e-4;
};
struct SelfConsistent {};
using DustMode = std::variant<Elapsed, SelfConsistent>;

struct DustCollapse {
  double energy_rate_ev_per_s = 0.0;
  double delta_e_ev = 0.0;        // at `elapsed`, or at the solved time
  double collapse_time_s = 0.0;   // +infinity when nothing accretes
  bool collapses = false;
};

/// Energy uncertainty growing linearly with accreted molecules,
/// dE(t) = (per-molecule dE / interval) * t.
/// Elapsed: tau_c of dE(elapsed). SelfConsistent: the time T at which the
/// accumulated contraction sum_n k_n^2 = integral k(t)^2 dt / t_P reaches ln 2.
DustCollapse dust_accretion_collapse(const DustAccretion& dust, const DustMode& mode,
                                     const PhysicalConstants& pc = {});

struct Massless {};
struct Massive {
  double mass_kg = codata::kElectronMassKg;
};
using ParticleKind = std::variant<Massless, Massive>;

/// Level n of a particle confined by the horizon radius R_U, in eV:
/// n^2 h c / (4 R_U) for massless, n^2 h^2 / (32 m R_U^2) for massive.
/// Throws DomainError for n == 0 or a non-positive radius.
double discrete_spectrum(const ParticleKind& kind, unsigned long long n, double universe_radius_m,
                         const PhysicalConstants& pc = {});

struct SmoothnessReport {
  double max_level = 0.0;            // sqrt(e_max / e_min)
  double typical_probability = 0.0;  // 1 / max_level
  double strength = 0.0;             // k for delta_e
  double delta_p = 0.0;              // k (1 - P) per instant
  double sharp_delta_e_ev = 0.0;     // dE at which k (1 - P) reaches sharp_delta_p
  double sharp_fraction_of_planck = 0.0;
};

/// Size of the per-instant probability change for a spectrum spanning
/// [e_min, e_max]. Throws DomainError unless 0 < e_min < e_max.
SmoothnessReport smoothness_report(double delta_e_ev, double e_min_ev, double e_max_ev,
                                   const PhysicalConstants& pc = {}, double sharp_delta_p = 1e-5);

struct LocalizationInputs {
  double mass_g = 1e-7;
  double width_cm = 1e-5;
  double localization_rate = 1e12;  // cm^-2 s^-1
  double elapsed_s = 1.0;
  double temperature_k = 300.0;
  double rms_energy_fluctuation_ev = 1e3;
};

struct LocalizationReport {
  double doubling_time_s = 0.0;     // 2 m D^2 / hbar
  double thermal_spread_m = 0.0;    // sqrt(Lambda m tau^3), CGS evaluation
  double wavepacket_width_m = 0.0;  // hbar c / dE_rms
};

LocalizationReport localization_estimates(const LocalizationInputs& in, const PhysicalConstants& pc = {});

/// Every case study with the published inputs, one row each.
std::vector<ScenarioResult> reproduction_table(const PhysicalConstants& pc = {});

/// True iff every row is within its tolerance.
bool all_within_tolerance(const std::vector<ScenarioResult>& rows) noexcept;

}  // namespace ecollapse
