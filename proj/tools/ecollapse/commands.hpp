#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace ecollapse::cli {

enum class Format { Csv, StructuredText };

struct CliConfig {
  std::string command;
  std::optional<std::filesystem::path> config;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;  // 0: hardware concurrency
  Format format = Format::Csv;
  bool force = false;
  std::optional<std::filesystem::path> input;  // report only
};

int cmd_simulate(const CliConfig& cli, std::ostream& out);
int cmd_oracle(const CliConfig& cli, std::ostream& out);
int cmd_verify(const CliConfig& cli, std::ostream& out);
int cmd_scenarios(const CliConfig& cli, std::ostream& out);
int cmd_report(const CliConfig& cli, std::ostream& out);

}  // namespace ecollapse::cli
