#include "ecollapse/constants.hpp"

#include <cmath>
#include <string>

#include "ecollapse/errors.hpp"

namespace ecollapse {

namespace {

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw DomainError(std::string(name) + " must be finite and positive");
  }
}

}  // namespace

CollapseConstants::CollapseConstants(double planck_time_s, double hbar_ev_s)
    : planck_time_(planck_time_s), hbar_(hbar_ev_s) {
  require_positive(planck_time_s, "planck_time");
  require_positive(hbar_ev_s, "hbar");
}

void PhysicalConstants::validate() const {
  require_positive(collapse.planck_time(), "planck_time");
  require_positive(collapse.hbar(), "hbar");
  require_positive(speed_of_light, "speed_of_light");
  require_positive(boltzmann, "boltzmann");
  require_positive(universe_radius, "universe_radius");
  require_positive(electron_mass, "electron_mass");
  require_positive(standard_temperature, "standard_temperature");
}

}  // namespace ecollapse
