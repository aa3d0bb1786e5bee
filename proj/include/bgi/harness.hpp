#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bgi/environment.hpp"

namespace bgi {

enum class Preset { vary_n, vary_k, weight_sweep, custom };
enum class Scale { desk, paper };

std::string to_string(Preset preset);
Preset preset_from_string(const std::string& name);

// Algorithm ids: te, age, ge, unis (group Pareto set problem) and eecb, tel
// (weighted problem).
bool is_gpsi_algorithm(const std::string& id);
bool is_lbgi_algorithm(const std::string& id);

struct ExperimentConfig {
  Preset preset = Preset::custom;
  std::vector<std::string> algorithms;
  double delta = 0.01;
  double epsilon = 0.01;
  double beta_scale = 1.0;
  std::size_t replications = 20;
  std::uint64_t master_seed = 0;

  // Grid. vary_n uses n_values, vary_k uses k_values, weight_sweep uses
  // weights (labelled w1, w2, ... unless weight_labels is given).
  std::vector<std::size_t> n_values;
  std::vector<std::size_t> k_values;
  std::vector<std::vector<double>> weights;
  std::vector<std::string> weight_labels;

  // Fixed shape for the dimensions a preset does not vary.
  std::size_t n_groups = 5;
  std::size_t n_arms = 6;
  std::size_t n_dims = 3;
  // Pareto-optimal group count; vary_n defaults to ceil(0.3 N).
  std::optional<std::size_t> pareto_count;
  // Pareto problem: instances are drawn with every group gap above
  // 3 * generation_epsilon. Defaults to epsilon.
  std::optional<double> generation_epsilon;
  // Weighted problem: minimum gap of the best group.
  double delta_min = 0.05;
  // Weighted problem: minimum Pareto gap (at the TEL epsilon) of every group.
  std::optional<double> pareto_gap_min;

  NoiseModel noise{};
  std::uint64_t max_rounds = 10'000'000;
  std::uint64_t max_generation_attempts = 100000;
  std::size_t workers = 0;  // 0: hardware concurrency
  bool regenerate_instances = false;
  bool record_timing = false;
  // custom preset: run on this instance instead of generating one.
  std::optional<std::filesystem::path> instance_file;
  std::filesystem::path output_dir;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig preset_config(Preset preset, Scale scale);

struct ExperimentRecord {
  std::string algorithm;
  std::string preset;
  std::string grid_point;
  std::size_t replication = 0;
  std::string instance_label;
  std::uint64_t seed = 0;
  std::size_t n_groups = 0;
  std::size_t n_arms = 0;
  std::size_t n_dims = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double beta_scale = 1.0;
  std::uint64_t stopping_time = 0;
  std::uint64_t rounds = 0;
  bool correct = false;
  std::string status = "ok";  // ok | budget_exhausted
  double wall_clock_ms = 0.0;
};

struct SummaryRow {
  std::string grid_point;
  std::string algorithm;
  double mean = 0.0;
  double std = 0.0;
  std::size_t n = 0;
};

struct GridFailure {
  std::string grid_point;
  std::string message;
};

struct SweepResult {
  std::vector<ExperimentRecord> records;
  std::vector<SummaryRow> summary;
  std::vector<GridFailure> failures;
};

// Stream index of a replication. Every algorithm gets the same stream for
// the same replication, so comparisons between algorithms are paired.
std::uint64_t replication_stream(std::size_t replication);

// Runs every (grid point, algorithm, replication) and aggregates stopping
// times. Output is independent of the worker count. When output_dir is set,
// writes records.csv, summary.json, metadata.json and the instances used.
SweepResult run_sweep(const ExperimentConfig& config);

std::string records_to_csv(const std::vector<ExperimentRecord>& records);
std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records);
nlohmann::json summary_to_json(const std::vector<SummaryRow>& summary);

// Arithmetic mean and standard deviation with divisor n - 1 (0 when n = 1).
std::pair<double, double> mean_and_std(const std::vector<double>& values);

// Shortest decimal text that reads back to exactly `x`.
std::string format_real(double x);

}  // namespace bgi
