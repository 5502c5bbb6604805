#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ecollapse/ensemble.hpp"
#include "ecollapse/errors.hpp"
#include "ecollapse/stats_io.hpp"

using namespace ecollapse;

TEST_CASE("CSV header") {
  const auto h = stats_csv_header(3);
  REQUIRE(h.size() == 13);
  CHECK(h[0] == "step");
  CHECK(h[1] == "mean_P0");
  CHECK(h[2] == "se_P0");
  CHECK(h[7] == "cross_01");
  CHECK(h[12] == "se_12");
  CHECK(stats_csv_header(12)[25] == "cross_0_1");
}

TEST_CASE("CSV round trip") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    RunConfig cfg;
    const std::size_t m = 2 + gen() % 4;
    std::vector<double> w(m);
    for (auto& x : w) x = 0.1 + static_cast<double>(gen() % 100);
    cfg.initial = BranchDistribution::normalized(w);
    cfg.mode = FixedK{0.05 * static_cast<double>(1 + gen() % 10)};
    cfg.steps = 30;
    cfg.record_stride = 1 + gen() % 5;
    cfg.trajectories = 50;
    cfg.base_seed = gen();
    const auto stats = run_ensemble(cfg);

    std::stringstream buffer;
    write_stats_csv(buffer, stats);
    auto back = read_stats_csv(buffer);
    back.trajectories = stats.trajectories;
    back.absorbed = stats.absorbed;
    back.unabsorbed = stats.unabsorbed;
    CHECK(back == stats);
  }
}

TEST_CASE("CSV reader rejects malformed input") {
  std::istringstream empty("");
  CHECK_THROWS_AS(read_stats_csv(empty), DomainError);
  std::istringstream header("step,mean_P0,se_P0,mean_P1\n");
  CHECK_THROWS_AS(read_stats_csv(header), DimensionError);
  std::istringstream short_row("step,mean_P0,se_P0,mean_P1,se_P1,cross_01,se_01\n0,0.5,0\n");
  CHECK_THROWS_AS(read_stats_csv(short_row), DimensionError);
  std::istringstream bad_number("step,mean_P0,se_P0,mean_P1,se_P1,cross_01,se_01\n0,0.5,x,0.5,0,0.25,0\n");
  CHECK_THROWS_AS(read_stats_csv(bad_number), DomainError);
}

TEST_CASE("JSON Lines output") {
  RunConfig cfg;
  cfg.initial = BranchDistribution({0.5, 0.5});
  cfg.mode = FixedK{0.1};
  cfg.steps = 4;
  cfg.trajectories = 10;
  const auto stats = run_ensemble(cfg);
  std::stringstream out;
  write_stats_jsonl(out, stats);
  std::string line;
  int lines = 0;
  while (std::getline(out, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("step").get<int>() == lines);
    CHECK(j.contains("cross_01"));
    ++lines;
  }
  CHECK(lines == 5);

  const auto summary = nlohmann::json::parse(summary_record(stats));
  CHECK(summary.at("trajectories") == 10);
  MartingaleReport bad;
  bad.max_z = std::numeric_limits<double>::infinity();
  CHECK(nlohmann::json::parse(summary_record("m", bad)).at("max_z") == "inf");
}

TEST_CASE("scenario writers") {
  const auto rows = reproduction_table();
  std::stringstream csv, jsonl, text;
  write_scenarios_csv(csv, rows);
  write_scenarios_jsonl(jsonl, rows);
  write_scenarios_text(text, rows);
  std::string line;
  int n = 0;
  while (std::getline(csv, line)) ++n;
  CHECK(n == 19);
  std::getline(jsonl, line);
  const auto first = nlohmann::json::parse(line);
  CHECK(first.at("name") == "photon_coherence");
  CHECK(first.at("computed").at("unit") == "s");
  CHECK(text.str().find("dust_wavepacket_width") != std::string::npos);
}
