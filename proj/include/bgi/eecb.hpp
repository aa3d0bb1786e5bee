#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bgi/core.hpp"
#include "bgi/environment.hpp"
#include "bgi/trace.hpp"

namespace bgi {

struct EecbState {
  std::size_t n_groups = 0;
  std::size_t n_arms = 0;
  std::size_t n_dims = 0;

  std::vector<bool> active_groups;          // G
  std::vector<bool> active_arms;            // A_d, [d][i][j]
  std::vector<std::uint64_t> focus_counts;  // n(r)
  std::vector<double> sums;                 // [i][j][d]
  std::vector<std::uint64_t> pulls;         // [i][j]
  std::uint64_t round = 1;
  std::uint64_t total_pulls = 0;
  std::uint64_t anomalies = 0;

  bool arm_active(std::size_t d, std::size_t i, std::size_t j) const {
    return active_arms[(d * n_groups + i) * n_arms + j];
  }
  double mean(std::size_t i, std::size_t j, std::size_t d) const;
  RewardVector efficiency_estimate(std::size_t i) const;
  GroupSet active_group_set() const;
};

struct EecbConfig {
  std::vector<double> weights;
  double delta = 0.01;
  double beta_scale = 1.0;
  std::uint64_t max_rounds = 10'000'000;
  bool record_trace = false;
  // Called after initialization and at the end of every round.
  std::function<void(const EecbState&)> observer;
};

struct LbgiResult {
  std::size_t recommended = 0;
  std::uint64_t total_pulls = 0;
  std::vector<std::vector<std::uint64_t>> per_arm_pulls;
  std::uint64_t rounds = 0;
  Trace trace;
};

LbgiResult run_eecb(const Instance& instance, const EecbConfig& config, RngStream& rng);

// Replays the focus_dim events of an EECB trace and checks that every focused
// dimension maximized w^d beta(n^d) (ties to the smallest index), that the
// focus strictly lowered that value, and that n advanced by one unit vector
// per round. Throws InvariantViolation.
void eecb_schedule_property(const Trace& trace, std::span<const double> weights, double delta,
                            ConfidenceSize size, double beta_scale = 1.0);

// Throws InvariantViolation on a broken state property. With
// `noiseless_truth`, also checks that every active group's best arm in each
// dimension is still in A_d.
void eecb_state_invariant_check(const EecbState& state,
                                const ArmMeansTensor* noiseless_truth = nullptr);

}  // namespace bgi
