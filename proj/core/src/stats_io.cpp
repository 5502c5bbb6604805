#include "ecollapse/stats_io.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ecollapse/errors.hpp"

namespace ecollapse {

namespace {

using nlohmann::json;

std::string pair_label(std::size_t i, std::size_t j, std::size_t branches) {
  return branches > 10 ? fmt::format("{}_{}", i, j) : fmt::format("{}{}", i, j);
}

std::string number(double v) { return fmt::format("{:.17g}", v); }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw DomainError("malformed number '" + text + "' in statistics CSV");
  }
  if (used != text.size()) throw DomainError("malformed number '" + text + "' in statistics CSV");
  return v;
}

// Infinite z-scores (exact mismatch) serialize as strings rather than null.
json finite_or_tag(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? json("nan") : json(v > 0 ? "inf" : "-inf");
}

}  // namespace

std::vector<std::string> stats_csv_header(std::size_t branches) {
  std::vector<std::string> header{"step"};
  for (std::size_t i = 0; i < branches; ++i) {
    header.push_back(fmt::format("mean_P{}", i));
    header.push_back(fmt::format("se_P{}", i));
  }
  for (std::size_t i = 0; i < branches; ++i) {
    for (std::size_t j = i + 1; j < branches; ++j) {
      const auto label = pair_label(i, j, branches);
      header.push_back("cross_" + label);
      header.push_back("se_" + label);
    }
  }
  return header;
}

void write_stats_csv(std::ostream& out, const EnsembleStats& stats) {
  const auto header = stats_csv_header(stats.branches);
  out << fmt::format("{}\n", fmt::join(header, ","));
  std::string line;
  for (std::size_t r = 0; r < stats.records(); ++r) {
    line = std::to_string(stats.steps[r]);
    for (const auto& est : stats.diagonal[r]) {
      line += ',' + number(est.mean);
      line += ',' + number(est.std_error);
    }
    for (const auto& est : stats.cross[r]) {
      line += ',' + number(est.mean);
      line += ',' + number(est.std_error);
    }
    out << line << '\n';
  }
}

EnsembleStats read_stats_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("statistics CSV is empty");
  const auto header = split_csv_line(line);
  // header = 1 + 2m + m(m-1) = 1 + m(m+1) columns.
  std::size_t m = 0;
  while (1 + m * (m + 1) < header.size()) ++m;
  if (m == 0 || 1 + m * (m + 1) != header.size() || header != stats_csv_header(m)) {
    throw DimensionError("statistics CSV header does not match the ensemble schema");
  }

  EnsembleStats stats;
  stats.branches = m;
  stats.absorbed.assign(m, 0);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw DimensionError("statistics CSV row has " + std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(header.size()));
    }
    stats.steps.push_back(static_cast<std::uint64_t>(std::stoull(fields[0])));
    auto& diag = stats.diagonal.emplace_back();
    std::size_t col = 1;
    for (std::size_t i = 0; i < m; ++i, col += 2) diag.push_back({parse_double(fields[col]), parse_double(fields[col + 1])});
    auto& cross = stats.cross.emplace_back();
    for (std::size_t p = 0; p < pair_count(m); ++p, col += 2) {
      cross.push_back({parse_double(fields[col]), parse_double(fields[col + 1])});
    }
  }
  return stats;
}

void write_stats_jsonl(std::ostream& out, const EnsembleStats& stats) {
  const auto header = stats_csv_header(stats.branches);
  for (std::size_t r = 0; r < stats.records(); ++r) {
    json record = json::object();
    record["step"] = stats.steps[r];
    std::size_t col = 1;
    for (const auto& est : stats.diagonal[r]) {
      record[header[col++]] = est.mean;
      record[header[col++]] = est.std_error;
    }
    for (const auto& est : stats.cross[r]) {
      record[header[col++]] = est.mean;
      record[header[col++]] = est.std_error;
    }
    out << record.dump() << '\n';
  }
}

void write_scenarios_csv(std::ostream& out, const std::vector<ScenarioResult>& rows) {
  out << "name,computed,unit,quoted,ratio,check,tolerance,derived,within_tolerance,note\n";
  for (const auto& row : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},\"{}\"\n", row.name, number(row.computed.value),
                       unit_symbol(row.computed.unit), number(row.quoted.value), number(row.ratio),
                       row.flagged() ? "derived" : "quoted-factor", number(row.tolerance),
                       row.derived ? number(row.derived->value) : std::string{}, row.within_tolerance ? "yes" : "no",
                       row.note);
  }
}

void write_scenarios_jsonl(std::ostream& out, const std::vector<ScenarioResult>& rows) {
  for (const auto& row : rows) {
    json record;
    record["name"] = row.name;
    json inputs = json::object();
    for (const auto& in : row.inputs) {
      inputs[in.name] = {{"value", in.quantity.value}, {"unit", unit_symbol(in.quantity.unit)}};
    }
    record["inputs"] = inputs;
    record["computed"] = {{"value", row.computed.value}, {"unit", unit_symbol(row.computed.unit)}};
    record["quoted"] = {{"value", row.quoted.value}, {"unit", unit_symbol(row.quoted.unit)}};
    record["ratio"] = row.ratio;
    record["check"] = row.flagged() ? "derived" : "quoted-factor";
    record["tolerance"] = row.tolerance;
    if (row.derived) record["derived"] = row.derived->value;
    record["within_tolerance"] = row.within_tolerance;
    if (!row.note.empty()) record["note"] = row.note;
    out << record.dump() << '\n';
  }
}

void write_scenarios_text(std::ostream& out, const std::vector<ScenarioResult>& rows) {
  std::size_t name_width = 8;
  for (const auto& row : rows) name_width = std::max(name_width, row.name.size());
  out << fmt::format("{:<{}}  {:>12} {:<4}  {:>12}  {:>10}  {:<13}  {:>12}  {}\n", "scenario", name_width, "computed",
                     "", "quoted", "ratio", "check", "derived", "ok");
  for (const auto& row : rows) {
    out << fmt::format("{:<{}}  {:>12.4g} {:<4}  {:>12.4g}  {:>10.4g}  {:<13}  {:>12}  {}\n", row.name, name_width,
                       row.computed.value, unit_symbol(row.computed.unit), row.quoted.value, row.ratio,
                       row.flagged() ? "derived" : "factor-10",
                       row.derived ? fmt::format("{:.4g}", row.derived->value) : std::string("-"),
                       row.within_tolerance ? "yes" : "NO");
  }
}

std::string summary_record(const EnsembleStats& stats) {
  json record;
  record["record"] = "ensemble";
  record["branches"] = stats.branches;
  record["trajectories"] = stats.trajectories;
  record["recorded_steps"] = stats.records();
  record["absorbed"] = stats.absorbed;
  record["unabsorbed"] = stats.unabsorbed;
  if (stats.records() > 0) {
    json final_mean = json::array();
    for (const auto& est : stats.diagonal.back()) final_mean.push_back(est.mean);
    record["final_step"] = stats.steps.back();
    record["final_mean"] = final_mean;
  }
  return record.dump();
}

std::string summary_record(std::string_view name, const MartingaleReport& report) {
  json record;
  record["record"] = "martingale";
  record["name"] = name;
  record["verdict"] = to_string(report.verdict);
  record["max_z"] = finite_or_tag(report.max_z);
  record["threshold"] = report.threshold;
  record["worst_step"] = report.worst_step;
  record["worst_branch"] = report.worst_branch;
  record["checked"] = report.checked;
  if (!report.note.empty()) record["note"] = report.note;
  return record.dump();
}

std::string summary_record(std::string_view name, const DecayFitReport& report) {
  json record;
  record["record"] = "decay_fit";
  record["name"] = name;
  record["verdict"] = to_string(report.verdict);
  record["fitted_rate"] = report.fitted_rate;
  record["expected_rate"] = finite_or_tag(report.expected_rate);
  record["rate_tolerance"] = report.rate_tolerance;
  record["intercept"] = report.intercept;
  record["expected_intercept"] = report.expected_intercept;
  record["intercept_z"] = finite_or_tag(report.intercept_z);
  record["points"] = report.points;
  if (!report.note.empty()) record["note"] = report.note;
  return record.dump();
}

std::string summary_record(std::string_view name, const ComparisonReport& report) {
  json record;
  record["record"] = "comparison";
  record["name"] = name;
  record["verdict"] = to_string(report.verdict);
  record["max_z"] = finite_or_tag(report.max_z);
  record["max_abs_diff"] = report.max_abs_diff;
  record["threshold"] = report.threshold;
  record["entries"] = report.entries.size();
  return record.dump();
}

std::string summary_record(std::string_view name, const BornReport& report) {
  json record;
  record["record"] = "born";
  record["name"] = name;
  record["verdict"] = to_string(report.verdict);
  record["fraction"] = report.fraction;
  record["expected"] = report.expected;
  record["z"] = finite_or_tag(report.z);
  record["threshold"] = report.threshold;
  record["absorbed"] = report.absorbed;
  record["trajectories"] = report.trajectories;
  return record.dump();
}

}  // namespace ecollapse
