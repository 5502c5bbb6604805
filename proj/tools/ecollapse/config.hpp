#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "ecollapse/ensemble.hpp"
#include "ecollapse/scenarios.hpp"

namespace ecollapse::cli {

/// Problem with a configuration file or command-line value. `key` names the
/// offending entry as "[section] key" when there is one.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

using Ini = boost::property_tree::ptree;

/// Reads a `key = value` file with [sections]. Comments start with ';' or '#'.
Ini load_ini(const std::filesystem::path& path);
Ini parse_ini(const std::string& text);

enum class Mutation { None, BiasedStep, FlippedSign };

struct VerifyConfig {
  std::uint64_t trajectories = 20000;
  std::uint64_t steps = 200;
  std::uint64_t oracle_steps = 8;
  std::uint64_t born_trajectories = 4000;
  std::uint64_t seed = 1;
  double z_threshold = 5.0;
  Mutation mutation = Mutation::None;
};

/// [system], [dynamics], [ensemble] sections. Unknown sections or keys are
/// rejected.
RunConfig parse_run_config(const Ini& ini);
/// [verify] section only.
VerifyConfig parse_verify_config(const Ini& ini);
/// [constants] section only; every override must be finite and positive.
PhysicalConstants parse_constants(const Ini& ini);

// Value parsers, exposed for tests.
std::vector<double> parse_number_list(const std::string& key, const std::string& text);
Partition parse_partition(const std::string& key, const std::string& text);

}  // namespace ecollapse::cli
