#pragma once

#include <stdexcept>
#include <string>

namespace ecollapse {

/// Mismatched lengths or shapes between distributions, spectra and statistics.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// A value outside the mathematical domain of an operation (negative energy
/// uncertainty, k outside [0,1], malformed partition, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A configured work budget (step-trajectory products, event-tree nodes) would
/// be exceeded.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ecollapse
