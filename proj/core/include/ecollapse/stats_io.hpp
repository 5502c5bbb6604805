#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ecollapse/analysis.hpp"
#include "ecollapse/scenarios.hpp"
#include "ecollapse/stats.hpp"

namespace ecollapse {

/// Column names: step, then mean_P<i>, se_P<i> per branch, then cross_<i><j>,
/// se_<i><j> per pair i<j. With more than ten branches the pair indices are
/// separated by an underscore (cross_3_12).
std::vector<std::string> stats_csv_header(std::size_t branches);

/// Values are written with 17 significant digits, so a read-back is exact.
void write_stats_csv(std::ostream& out, const EnsembleStats& stats);
/// Parses a file written by write_stats_csv. Trajectory count and absorption
/// histogram are not part of the schema and are left at zero.
EnsembleStats read_stats_csv(std::istream& in);

/// One JSON object per recorded step, keyed like the CSV columns.
void write_stats_jsonl(std::ostream& out, const EnsembleStats& stats);

void write_scenarios_csv(std::ostream& out, const std::vector<ScenarioResult>& rows);
void write_scenarios_jsonl(std::ostream& out, const std::vector<ScenarioResult>& rows);
/// Aligned plain-text table.
void write_scenarios_text(std::ostream& out, const std::vector<ScenarioResult>& rows);

// Single-line JSON records for run summaries.
std::string summary_record(const EnsembleStats& stats);
std::string summary_record(std::string_view name, const MartingaleReport& report);
std::string summary_record(std::string_view name, const DecayFitReport& report);
std::string summary_record(std::string_view name, const ComparisonReport& report);
std::string summary_record(std::string_view name, const BornReport& report);

}  // namespace ecollapse
