#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bgi/core.hpp"
#include "bgi/environment.hpp"
#include "bgi/trace.hpp"

namespace bgi {

// Working state of Triple Elimination. Sets are stored as membership flags.
// When a group leaves the active set, or a dimension of a group is resolved,
// the corresponding dimension/arm flags are cleared, so an arm flag is set
// only for an active group and an active dimension.
struct TeState {
  std::size_t n_groups = 0;
  std::size_t n_arms = 0;
  std::size_t n_dims = 0;

  std::vector<bool> active_groups;                     // G
  std::vector<bool> active_dims;                       // D_i, [i][d]
  std::vector<bool> active_arms;                       // A_{i,d}, [i][d][j]
  std::vector<std::optional<double>> frozen_values;    // [i][d]
  std::vector<double> sums;                            // [i][j][d]
  std::vector<std::uint64_t> pulls;                    // [i][j]
  GroupSet accepted;                                   // P
  std::uint64_t round = 0;  // completed rounds
  std::uint64_t total_pulls = 0;

  static TeState initial(std::size_t n_groups, std::size_t n_arms, std::size_t n_dims);

  bool dim_active(std::size_t i, std::size_t d) const { return active_dims[i * n_dims + d]; }
  bool arm_active(std::size_t i, std::size_t d, std::size_t j) const {
    return active_arms[(i * n_dims + d) * n_arms + j];
  }
  // Active in at least one dimension, hence pulled next round.
  bool arm_in_play(std::size_t i, std::size_t j) const;
  double mean(std::size_t i, std::size_t j, std::size_t d) const;
  // R-hat_i: frozen value on resolved dimensions, otherwise the maximum
  // empirical mean over all arms of the group.
  RewardVector efficiency_estimate(std::size_t i) const;
  GroupSet active_group_set() const;
};

struct TeConfig {
  double delta = 0.01;
  double epsilon = 0.01;
  double beta_scale = 1.0;
  std::uint64_t max_rounds = 10'000'000;
  bool record_trace = false;
  // Switches used by the AGE and GE baselines.
  bool dimension_elimination = true;
  bool arm_elimination = true;
  // Called with the state at the end of every round.
  std::function<void(const TeState&)> observer;
};

struct GpsiResult {
  GroupSet recommended;
  std::uint64_t total_pulls = 0;
  std::vector<std::vector<std::uint64_t>> per_arm_pulls;
  std::uint64_t rounds = 0;
  // Efficiency estimates held when the run stopped (frozen where resolved).
  EfficiencyMatrix final_estimates;
  Trace trace;
};

GpsiResult run_te(const Instance& instance, const TeConfig& config, RngStream& rng);

// Throws InvariantViolation naming the first broken property. When
// `noiseless_truth` is given (noise scale 0 runs), also checks that for every
// active group and active dimension the arm attaining the true maximum is
// still active.
void te_round_invariant_check(const TeState& state,
                              const ArmMeansTensor* noiseless_truth = nullptr);

}  // namespace bgi
