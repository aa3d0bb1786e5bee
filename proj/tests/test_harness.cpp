#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "bgi/bounds.hpp"
#include "bgi/core.hpp"
#include "bgi/errors.hpp"
#include "bgi/harness.hpp"
#include "bgi/io.hpp"
#include "bgi/triple_elimination.hpp"

using namespace bgi;
using nlohmann::json;

namespace {

json small_gpsi() {
  return json{{"preset", "vary_k"},    {"algorithms", {"te", "age", "unis"}},
              {"delta", 0.1},          {"epsilon", 0.05},
              {"replications", 3},     {"master_seed", 11},
              {"grid", {{"k_values", {2, 3}}}},
              {"n_groups", 3},         {"n_dims", 2},
              {"pareto_count", 1}};
}

json small_lbgi() {
  return json{{"preset", "weight_sweep"},
              {"algorithms", {"eecb"}},
              {"delta", 0.1},
              {"replications", 2},
              {"master_seed", 5},
              {"grid", {{"weights", {{1.0, 1.0}, {1.0, 3.0}}}}},
              {"n_groups", 3},
              {"n_arms", 2},
              {"n_dims", 2},
              {"delta_min", 0.1}};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("config parsing applies preset defaults and overrides") {
  const ExperimentConfig c = config_from_json(small_gpsi());
  CHECK(c.preset == Preset::vary_k);
  CHECK(c.algorithms == std::vector<std::string>{"te", "age", "unis"});
  CHECK(c.k_values == std::vector<std::size_t>{2, 3});
  CHECK(c.n_groups == 3);
  CHECK(c.pareto_count == std::optional<std::size_t>(1));
  CHECK(c.master_seed == 11);

  const ExperimentConfig round = config_from_json(config_to_json(c));
  CHECK(config_to_json(round) == config_to_json(c));

  const ExperimentConfig desk = preset_config(Preset::vary_n, Scale::desk);
  CHECK(desk.n_values == std::vector<std::size_t>{3, 4, 5});
  CHECK(desk.delta == 0.1);
}

TEST_CASE("invalid configs are rejected") {
  auto reject = [](json j) { CHECK_THROWS_AS(run_sweep(config_from_json(j)), ArgumentError); };
  json j = small_gpsi();
  j["algorithms"] = {"te", "eecb"};
  reject(j);
  j = small_gpsi();
  j["algorithms"] = {"nope"};
  reject(j);
  j = small_gpsi();
  j["delta"] = 1.5;
  reject(j);
  j = small_gpsi();
  j["replications"] = 0;
  reject(j);
  j = small_gpsi();
  j["grid"]["k_values"] = json::array();
  reject(j);
  CHECK_THROWS_AS(config_from_json(json{{"preset", "bogus"}}), ArgumentError);
  CHECK_THROWS_AS(config_from_json(json{{"delta", "high"}}), ArgumentError);
}

TEST_CASE("replication streams are shared across algorithms and distinct across replications") {
  CHECK(replication_stream(0) != replication_stream(1));
  CHECK(replication_stream(3) == replication_stream(3));
}

TEST_CASE("mean and standard deviation") {
  CHECK(mean_and_std({4.0}) == std::pair<double, double>{4.0, 0.0});
  const auto [m, s] = mean_and_std({1.0, 2.0, 3.0, 4.0});
  CHECK(m == 2.5);
  CHECK(s == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
}

TEST_CASE("real formatting round-trips") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 10000; ++k) {
    const double x = u(gen) * std::pow(10.0, static_cast<int>(gen() % 20) - 10);
    const std::string text = format_real(x);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(back == x);
  }
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("instance json round-trips exactly") {
  RngStream rng(3, 0);
  const Instance inst = gen_random_gpsi(4, 3, 2, 2, 0.02, rng);
  CHECK(instance_from_json(json::parse(instance_to_json(inst).dump())) == inst);
}

TEST_CASE("sweep output is identical for any worker count") {
  ExperimentConfig c = config_from_json(small_gpsi());
  c.workers = 1;
  const SweepResult one = run_sweep(c);
  c.workers = 4;
  const SweepResult four = run_sweep(c);
  CHECK(records_to_csv(one.records) == records_to_csv(four.records));
  CHECK(summary_to_json(one.summary) == summary_to_json(four.summary));
  CHECK(one.records.size() == 2 * 3 * 3);
}

TEST_CASE("csv columns and the summary agree") {
  ExperimentConfig c = config_from_json(small_gpsi());
  const auto dir = std::filesystem::temp_directory_path() / "bgi_test_harness";
  std::filesystem::remove_all(dir);
  c.output_dir = dir;
  const SweepResult result = run_sweep(c);

  const auto rows = parse_csv(read_text_file(dir / "records.csv"));
  REQUIRE(rows.size() == result.records.size() + 1);
  const std::vector<std::string> header{"algorithm", "preset",  "grid_point",  "replication", "instance_label", "seed",
                                        "N",         "K",       "D",           "epsilon",     "delta",          "beta_scale",
                                        "stopping_time", "rounds", "correct", "status",      "wall_clock_ms"};
  CHECK(rows[0] == header);

  // Recompute the summary from the file alone.
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    REQUIRE(rows[r].size() == header.size());
    CHECK(rows[r][15] == "ok");
    groups[{rows[r][2], rows[r][0]}].push_back(std::stod(rows[r][12]));
  }
  const json summary = json::parse(read_text_file(dir / "summary.json"));
  REQUIRE(summary.size() == groups.size());
  for (const json& row : summary) {
    const auto& values = groups.at({row.at("grid_point"), row.at("algorithm")});
    const auto [m, s] = mean_and_std(values);
    CHECK(row.at("mean").get<double>() == doctest::Approx(m).epsilon(1e-12));
    CHECK(row.at("std").get<double>() == doctest::Approx(s).epsilon(1e-12));
    CHECK(row.at("n").get<std::size_t>() == values.size());
  }

  // Every record points at a saved instance and its replication stream.
  for (const ExperimentRecord& rec : result.records) {
    const Instance inst = load_instance(dir / "instances" / (rec.instance_label + ".json"));
    CHECK(inst.tensor.n_arms() == rec.n_arms);
    CHECK(rec.seed == replication_stream(rec.replication));
  }
  const json meta = json::parse(read_text_file(dir / "metadata.json"));
  CHECK(meta.contains("config"));
  CHECK(meta.contains("rng_algorithm"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("correct flag matches an independent judgement") {
  ExperimentConfig c = config_from_json(small_gpsi());
  const auto dir = std::filesystem::temp_directory_path() / "bgi_test_harness_judge";
  std::filesystem::remove_all(dir);
  c.output_dir = dir;
  c.algorithms = {"te"};
  const SweepResult result = run_sweep(c);
  for (const ExperimentRecord& rec : result.records) {
    const Instance inst = load_instance(dir / "instances" / (rec.instance_label + ".json"));
    TeConfig tc;
    tc.delta = rec.delta;
    tc.epsilon = rec.epsilon;
    RngStream rng(c.master_seed, rec.seed);
    const GpsiResult r = run_te(inst, tc, rng);
    CHECK(r.total_pulls == rec.stopping_time);
    const EfficiencyMatrix eff = efficiency(inst.tensor);
    const GroupSet exact = brute_pareto(eff, 0.0), relaxed = brute_pareto(eff, rec.epsilon);
    const bool ok = std::includes(r.recommended.begin(), r.recommended.end(), exact.begin(), exact.end()) &&
                    std::includes(relaxed.begin(), relaxed.end(), r.recommended.begin(), r.recommended.end());
    CHECK(ok == rec.correct);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("weighted sweep shares one instance across weight vectors") {
  const SweepResult result = run_sweep(config_from_json(small_lbgi()));
  REQUIRE(result.records.size() == 4);
  CHECK(result.records[0].instance_label == result.records[2].instance_label);
  CHECK(result.records[0].grid_point == "w1");
  CHECK(result.records[2].grid_point == "w2");
  for (const auto& r : result.records) CHECK(r.correct);
}

TEST_CASE("budget exhaustion is recorded, not fatal") {
  json j = small_gpsi();
  j["algorithms"] = {"te"};
  j["max_rounds"] = 2;
  const SweepResult result = run_sweep(config_from_json(j));
  for (const auto& r : result.records) CHECK(r.status == "budget_exhausted");
  for (const auto& s : result.summary) CHECK(s.n == 0);
}
