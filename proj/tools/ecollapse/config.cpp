#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "ecollapse/errors.hpp"

namespace ecollapse::cli {

namespace {

using Schema = std::map<std::string, std::set<std::string>>;

std::string qualified(const std::string& section, const std::string& key) {
  return "[" + section + "] " + key;
}

// The INI reader keeps comment-free lines only; strip trailing comments too.
std::string strip_comment(const std::string& line) {
  const auto pos = line.find_first_of(";#");
  return pos == std::string::npos ? line : line.substr(0, pos);
}

void check_schema(const Ini& ini, const Schema& schema, const std::set<std::string>& allowed_sections) {
  for (const auto& [section, body] : ini) {
    if (!allowed_sections.contains(section)) throw ConfigError("[" + section + "]", "unknown section");
    if (!body.data().empty()) throw ConfigError(section, "key outside of any section");
    const auto& keys = schema.at(section);
    for (const auto& [key, value] : body) {
      if (!keys.contains(key)) throw ConfigError(qualified(section, key), "unknown key");
    }
  }
}

std::optional<std::string> get(const Ini& ini, const std::string& section, const std::string& key) {
  const auto s = ini.get_child_optional(boost::property_tree::ptree::path_type(section, '\0'));
  if (!s) return std::nullopt;
  const auto v = s->get_child_optional(boost::property_tree::ptree::path_type(key, '\0'));
  if (!v) return std::nullopt;
  return v->data();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(key, "expected a finite number, got '" + t + "'");
  }
  return v;
}

std::uint64_t parse_count(const std::string& key, const std::string& text, bool allow_scientific = true) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (!t.empty() && ec == std::errc{} && ptr == t.data() + t.size()) return v;
  if (allow_scientific) {
    // 1e5 style counts
    const double d = parse_double(key, t);
    if (d >= 0.0 && d < 1.8e19 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
  }
  throw ConfigError(key, "expected a non-negative integer, got '" + t + "'");
}

template <class F>
auto wrap(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key, e.what());
  }
}

const Schema kRunSchema{
    {"system", {"initial", "energies", "energy_unit", "subsystem_0", "subsystem_1", "subsystem_2", "subsystem_3",
                "subsystem_4", "subsystem_5", "subsystem_6", "subsystem_7", "subsystem_8", "subsystem_9"}},
    {"dynamics", {"mode", "k", "steps"}},
    {"ensemble", {"trajectories", "seed", "record_stride", "absorption_threshold", "budget", "observe_groups"}},
};

const Schema kVerifySchema{
    {"verify", {"trajectories", "steps", "oracle_steps", "born_trajectories", "seed", "z_threshold", "mutation"}},
};

const Schema kConstantsSchema{
    {"constants", {"planck_time", "hbar", "speed_of_light", "boltzmann", "universe_radius", "electron_mass",
                   "standard_temperature"}},
};

}  // namespace

Ini parse_ini(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream cleaned;
  std::string line;
  while (std::getline(in, line)) cleaned << strip_comment(line) << '\n';
  std::istringstream stream(cleaned.str());
  Ini ini;
  try {
    boost::property_tree::ini_parser::read_ini(stream, ini);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("", "line " + std::to_string(e.line()) + ": " + e.message());
  }
  return ini;
}

Ini load_ini(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_ini(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError("", path.string() + ": " + e.what());
  }
}

std::vector<double> parse_number_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::string token;
  std::istringstream in(text);
  std::string field;
  while (in >> field) {
    std::istringstream parts(field);
    while (std::getline(parts, token, ',')) {
      if (!trim(token).empty()) out.push_back(parse_double(key, token));
    }
  }
  if (out.empty()) throw ConfigError(key, "expected a list of numbers");
  return out;
}

Partition parse_partition(const std::string& key, const std::string& text) {
  Partition groups;
  std::istringstream in(text);
  std::string group;
  while (std::getline(in, group, '|')) {
    auto& g = groups.emplace_back();
    std::istringstream members(group);
    std::string field, token;
    while (members >> field) {
      std::istringstream parts(field);
      while (std::getline(parts, token, ',')) {
        if (!trim(token).empty()) g.push_back(static_cast<std::size_t>(parse_count(key, token, false)));
      }
    }
    if (g.empty()) throw ConfigError(key, "empty group");
  }
  if (groups.empty()) throw ConfigError(key, "expected groups separated by '|'");
  return groups;
}

RunConfig parse_run_config(const Ini& ini) {
  check_schema(ini, kRunSchema, {"system", "dynamics", "ensemble"});
  RunConfig cfg;

  const auto initial = get(ini, "system", "initial");
  if (!initial) throw ConfigError("[system] initial", "missing initial distribution");
  const std::string initial_key = "[system] initial";
  cfg.initial = wrap(initial_key, [&] { return BranchDistribution(parse_number_list(initial_key, *initial)); });

  const std::string unit = get(ini, "system", "energy_unit").value_or("planck");
  if (unit != "planck" && unit != "eV") {
    throw ConfigError("[system] energy_unit", "expected 'planck' or 'eV', got '" + unit + "'");
  }
  auto to_planck = [&](std::vector<double> values) {
    if (unit == "eV") {
      for (double& v : values) v = Energy::from_eV(v, cfg.constants).planck();
    }
    return values;
  };

  std::vector<std::vector<double>> rows;
  for (int l = 0; l < 10; ++l) {
    const std::string name = "subsystem_" + std::to_string(l);
    const auto row = get(ini, "system", name);
    if (!row) {
      for (int rest = l + 1; rest < 10; ++rest) {
        if (get(ini, "system", "subsystem_" + std::to_string(rest))) {
          throw ConfigError(qualified("system", name), "subsystem rows must be numbered consecutively from 0");
        }
      }
      break;
    }
    rows.push_back(to_planck(parse_number_list(qualified("system", name), *row)));
  }
  const auto energies = get(ini, "system", "energies");
  if (energies && !rows.empty()) {
    throw ConfigError("[system] energies", "give either 'energies' or 'subsystem_<l>' rows, not both");
  }
  if (energies) {
    const std::string key = "[system] energies";
    cfg.spectrum = wrap(key, [&] { return EnergySpectrum::from_planck(to_planck(parse_number_list(key, *energies))); });
  } else if (!rows.empty()) {
    cfg.spectrum = wrap("[system] subsystem_0", [&] { return ManyBodySpectrum::from_planck(rows); });
  }
  if (const std::size_t levels = branch_count(cfg.spectrum); levels != 0 && levels != cfg.initial.size()) {
    throw ConfigError(energies ? "[system] energies" : "[system] subsystem_0",
                      "spectrum has " + std::to_string(levels) + " levels but the initial distribution has " +
                          std::to_string(cfg.initial.size()));
  }

  const std::string mode = get(ini, "dynamics", "mode").value_or("fixed-k");
  const auto k = get(ini, "dynamics", "k");
  if (mode == "fixed-k") {
    if (!k) throw ConfigError("[dynamics] k", "fixed-k mode needs a value for k");
    const double value = parse_double("[dynamics] k", *k);
    if (!(value >= 0.0 && value <= 1.0)) throw ConfigError("[dynamics] k", "k must lie in [0,1]");
    cfg.mode = FixedK{value};
  } else if (mode == "model-k") {
    if (k) throw ConfigError("[dynamics] k", "model-k mode derives k from the spectrum; remove this key");
    if (branch_count(cfg.spectrum) == 0) {
      throw ConfigError("[system] energies", "model-k mode needs an energy spectrum");
    }
    cfg.mode = ModelK{};
  } else {
    throw ConfigError("[dynamics] mode", "expected 'fixed-k' or 'model-k', got '" + mode + "'");
  }

  const auto steps = get(ini, "dynamics", "steps");
  if (!steps) throw ConfigError("[dynamics] steps", "missing step count");
  cfg.steps = parse_count("[dynamics] steps", *steps);
  if (cfg.steps == 0) throw ConfigError("[dynamics] steps", "must be positive");

  const auto trajectories = get(ini, "ensemble", "trajectories");
  if (!trajectories) throw ConfigError("[ensemble] trajectories", "missing trajectory count");
  cfg.trajectories = parse_count("[ensemble] trajectories", *trajectories);
  if (cfg.trajectories == 0) throw ConfigError("[ensemble] trajectories", "must be positive");

  const auto seed = get(ini, "ensemble", "seed");
  if (!seed) throw ConfigError("[ensemble] seed", "missing seed");
  cfg.base_seed = parse_count("[ensemble] seed", *seed, false);

  if (const auto v = get(ini, "ensemble", "record_stride")) {
    cfg.record_stride = parse_count("[ensemble] record_stride", *v);
    if (cfg.record_stride == 0) throw ConfigError("[ensemble] record_stride", "must be positive");
  }
  if (const auto v = get(ini, "ensemble", "absorption_threshold")) {
    cfg.absorption_threshold = parse_double("[ensemble] absorption_threshold", *v);
    if (!(cfg.absorption_threshold > 0.0 && cfg.absorption_threshold < 1.0)) {
      throw ConfigError("[ensemble] absorption_threshold", "must lie in (0,1)");
    }
  }
  if (const auto v = get(ini, "ensemble", "budget")) {
    cfg.step_budget = parse_double("[ensemble] budget", *v);
    if (!(cfg.step_budget > 0.0)) throw ConfigError("[ensemble] budget", "must be positive");
  }
  if (const auto v = get(ini, "ensemble", "observe_groups")) {
    const std::string key = "[ensemble] observe_groups";
    auto groups = parse_partition(key, *v);
    wrap(key, [&] {
      validate_partition(groups, cfg.initial.size());
      return 0;
    });
    cfg.observe_groups = std::move(groups);
  }
  return cfg;
}

VerifyConfig parse_verify_config(const Ini& ini) {
  check_schema(ini, kVerifySchema, {"verify"});
  VerifyConfig cfg;
  auto count = [&](const char* key, std::uint64_t& field) {
    if (const auto v = get(ini, "verify", key)) {
      field = parse_count(qualified("verify", key), *v);
      if (field == 0) throw ConfigError(qualified("verify", key), "must be positive");
    }
  };
  count("trajectories", cfg.trajectories);
  count("steps", cfg.steps);
  count("oracle_steps", cfg.oracle_steps);
  count("born_trajectories", cfg.born_trajectories);
  if (const auto v = get(ini, "verify", "seed")) cfg.seed = parse_count("[verify] seed", *v, false);
  if (const auto v = get(ini, "verify", "z_threshold")) {
    cfg.z_threshold = parse_double("[verify] z_threshold", *v);
    if (!(cfg.z_threshold > 0.0)) throw ConfigError("[verify] z_threshold", "must be positive");
  }
  if (const auto v = get(ini, "verify", "mutation")) {
    const std::string m = trim(*v);
    if (m == "none") {
      cfg.mutation = Mutation::None;
    } else if (m == "biased-step") {
      cfg.mutation = Mutation::BiasedStep;
    } else if (m == "flipped-sign") {
      cfg.mutation = Mutation::FlippedSign;
    } else {
      throw ConfigError("[verify] mutation", "expected none, biased-step or flipped-sign, got '" + m + "'");
    }
  }
  return cfg;
}

PhysicalConstants parse_constants(const Ini& ini) {
  check_schema(ini, kConstantsSchema, {"constants"});
  PhysicalConstants pc;
  double planck_time = pc.planck_time();
  double hbar = pc.hbar();
  auto read = [&](const char* key, double& field) {
    if (const auto v = get(ini, "constants", key)) {
      const std::string name = qualified("constants", key);
      field = parse_double(name, *v);
      if (!(field > 0.0)) throw ConfigError(name, "must be positive");
    }
  };
  read("planck_time", planck_time);
  read("hbar", hbar);
  read("speed_of_light", pc.speed_of_light);
  read("boltzmann", pc.boltzmann);
  read("universe_radius", pc.universe_radius);
  read("electron_mass", pc.electron_mass);
  read("standard_temperature", pc.standard_temperature);
  pc.collapse = CollapseConstants(planck_time, hbar);
  pc.validate();
  return pc;
}

}  // namespace ecollapse::cli
