#include "bgi/triple_elimination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bgi/errors.hpp"

namespace bgi {

TeState TeState::initial(std::size_t n_groups, std::size_t n_arms, std::size_t n_dims) {
  TeState s;
  s.n_groups = n_groups;
  s.n_arms = n_arms;
  s.n_dims = n_dims;
  s.active_groups.assign(n_groups, true);
  s.active_dims.assign(n_groups * n_dims, true);
  s.active_arms.assign(n_groups * n_dims * n_arms, true);
  s.frozen_values.assign(n_groups * n_dims, std::nullopt);
  s.sums.assign(n_groups * n_arms * n_dims, 0.0);
  s.pulls.assign(n_groups * n_arms, 0);
  s.round = 0;
  return s;
}

bool TeState::arm_in_play(std::size_t i, std::size_t j) const {
  for (std::size_t d = 0; d < n_dims; ++d) {
    if (arm_active(i, d, j)) return true;
  }
  return false;
}

double TeState::mean(std::size_t i, std::size_t j, std::size_t d) const {
  const std::uint64_t n = pulls[i * n_arms + j];
  if (n == 0) return -std::numeric_limits<double>::infinity();
  return sums[(i * n_arms + j) * n_dims + d] / static_cast<double>(n);
}

RewardVector TeState::efficiency_estimate(std::size_t i) const {
  RewardVector out(n_dims);
  for (std::size_t d = 0; d < n_dims; ++d) {
    if (const auto& frozen = frozen_values[i * n_dims + d]) {
      out[d] = *frozen;
      continue;
    }
    double best = mean(i, 0, d);
    for (std::size_t j = 1; j < n_arms; ++j) best = std::max(best, mean(i, j, d));
    out[d] = best;
  }
  return out;
}

GroupSet TeState::active_group_set() const {
  GroupSet out;
  for (std::size_t i = 0; i < n_groups; ++i) {
    if (active_groups[i]) out.push_back(i);
  }
  return out;
}

namespace {

nlohmann::json estimate_json(const RewardVector& v) { return nlohmann::json(v); }

void retire_group(TeState& s, std::size_t i) {
  s.active_groups[i] = false;
  for (std::size_t d = 0; d < s.n_dims; ++d) {
    s.active_dims[i * s.n_dims + d] = false;
    for (std::size_t j = 0; j < s.n_arms; ++j) s.active_arms[(i * s.n_dims + d) * s.n_arms + j] = false;
  }
}

class TeRun {
 public:
  TeRun(const Instance& instance, const TeConfig& config, RngStream& rng)
      : instance_(instance),
        config_(config),
        streams_(instance.tensor.n_groups(), instance.tensor.n_arms(), rng),
        size_{instance.tensor.n_groups(), instance.tensor.n_arms(), instance.tensor.n_dims()},
        state_(TeState::initial(size_.n_groups, size_.n_arms, size_.n_dims)),
        draw_(size_.n_dims) {}

  GpsiResult run() {
    while (std::any_of(state_.active_groups.begin(), state_.active_groups.end(), [](bool b) { return b; })) {
      if (state_.round >= config_.max_rounds) {
        BudgetExhaustedError::PartialState partial{state_.total_pulls, state_.round,
                                                   state_.active_group_set(), state_.accepted};
        throw BudgetExhaustedError("triple elimination exceeded " + std::to_string(config_.max_rounds) +
                                       " rounds",
                                   std::move(partial));
      }
      ++state_.round;
      play_round();
      if (config_.observer) config_.observer(state_);
    }

    GpsiResult result;
    result.recommended = state_.accepted;
    result.total_pulls = state_.total_pulls;
    result.rounds = state_.round;
    result.per_arm_pulls.assign(size_.n_groups, std::vector<std::uint64_t>(size_.n_arms, 0));
    for (std::size_t i = 0; i < size_.n_groups; ++i) {
      for (std::size_t j = 0; j < size_.n_arms; ++j) result.per_arm_pulls[i][j] = state_.pulls[i * size_.n_arms + j];
    }
    result.final_estimates = estimates_;
    result.trace = std::move(trace_);
    return result;
  }

 private:
  void emit(const char* event, nlohmann::json payload) {
    if (config_.record_trace) trace_.push_back({state_.round, event, std::move(payload)});
  }

  void pull_active_arms() {
    const std::size_t dims = size_.n_dims;
    for (std::size_t i = 0; i < size_.n_groups; ++i) {
      if (!state_.active_groups[i]) continue;
      for (std::size_t j = 0; j < size_.n_arms; ++j) {
        if (!state_.arm_in_play(i, j)) continue;
        sample_into(instance_, i, j, streams_.arm(i, j), draw_);
        double* sum = &state_.sums[(i * size_.n_arms + j) * dims];
        for (std::size_t d = 0; d < dims; ++d) sum[d] += draw_[d];
        ++state_.pulls[i * size_.n_arms + j];
        ++state_.total_pulls;
      }
    }
  }

  void refresh_estimates() {
    estimates_.resize(size_.n_groups);
    for (std::size_t i = 0; i < size_.n_groups; ++i) {
      if (state_.active_groups[i] || estimates_[i].empty()) estimates_[i] = state_.efficiency_estimate(i);
    }
  }

  void reject_groups(double radius) {
    for (std::size_t i = 0; i < size_.n_groups; ++i) {
      if (!state_.active_groups[i]) continue;
      for (std::size_t j = 0; j < size_.n_groups; ++j) {
        if (!state_.active_groups[j]) continue;
        if (m_gap(estimates_[i], estimates_[j]) >= 2.0 * radius) {
          retire_group(state_, i);
          emit("reject_group", {{"group", i + 1}, {"by", j + 1}, {"estimate", estimate_json(estimates_[i])}});
          break;
        }
      }
    }
  }

  void resolve_dimensions(double radius) {
    const double threshold = 4.0 * radius + config_.epsilon;
    const std::size_t dims = size_.n_dims;
    std::vector<std::pair<std::size_t, std::size_t>> resolved;
    for (std::size_t i = 0; i < size_.n_groups; ++i) {
      if (!state_.active_groups[i]) continue;
      for (std::size_t d = 0; d < dims; ++d) {
        if (!state_.dim_active(i, d)) continue;
        bool separated = true;
        for (std::size_t j = 0; j < size_.n_groups && separated; ++j) {
          if (j == i || !state_.active_groups[j]) continue;
          separated = std::fabs(estimates_[j][d] - estimates_[i][d]) >= threshold;
        }
        if (separated) resolved.emplace_back(i, d);
      }
    }
    for (auto [i, d] : resolved) {
      state_.active_dims[i * dims + d] = false;
      state_.frozen_values[i * dims + d] = estimates_[i][d];
      for (std::size_t j = 0; j < size_.n_arms; ++j) state_.active_arms[(i * dims + d) * size_.n_arms + j] = false;
      emit("resolve_dim", {{"group", i + 1}, {"dim", d + 1}, {"value", estimates_[i][d]}});
    }
  }

  void eliminate_arms(double radius) {
    const std::size_t dims = size_.n_dims;
    for (std::size_t i = 0; i < size_.n_groups; ++i) {
      if (!state_.active_groups[i]) continue;
      for (std::size_t d = 0; d < dims; ++d) {
        if (!state_.dim_active(i, d)) continue;
        for (std::size_t j = 0; j < size_.n_arms; ++j) {
          if (!state_.arm_active(i, d, j)) continue;
          if (state_.mean(i, j, d) <= estimates_[i][d] - 2.0 * radius) {
            state_.active_arms[(i * dims + d) * size_.n_arms + j] = false;
            emit("eliminate_arm", {{"group", i + 1}, {"arm", j + 1}, {"dim", d + 1}});
          }
        }
      }
    }
  }

  void accept_groups(double radius) {
    const GroupSet active = state_.active_group_set();
    const double eps = config_.epsilon;
    GroupSet first;
    for (std::size_t i : active) {
      const bool separated = std::all_of(active.begin(), active.end(), [&](std::size_t j) {
        return j == i || big_m_gap(estimates_[i], estimates_[j], eps) >= 2.0 * radius;
      });
      if (separated) first.push_back(i);
    }
    GroupSet rest;
    std::set_difference(active.begin(), active.end(), first.begin(), first.end(), std::back_inserter(rest));
    GroupSet second;
    for (std::size_t i : first) {
      const bool safe = std::all_of(rest.begin(), rest.end(), [&](std::size_t j) {
        return big_m_gap(estimates_[j], estimates_[i], eps) >= 2.0 * radius;
      });
      if (safe) second.push_back(i);
    }
    for (std::size_t i : second) {
      retire_group(state_, i);
      emit("accept_group", {{"group", i + 1}, {"estimate", estimate_json(estimates_[i])}});
    }
    GroupSet merged;
    std::set_union(state_.accepted.begin(), state_.accepted.end(), second.begin(), second.end(),
                   std::back_inserter(merged));
    state_.accepted = std::move(merged);
  }

  void play_round() {
    const double radius = beta(state_.round, config_.delta, size_, config_.beta_scale);
    pull_active_arms();
    refresh_estimates();
    reject_groups(radius);
    if (config_.dimension_elimination) resolve_dimensions(radius);
    if (config_.arm_elimination) eliminate_arms(radius);
    accept_groups(radius);
  }

  const Instance& instance_;
  const TeConfig& config_;
  ArmStreams streams_;
  ConfidenceSize size_;
  TeState state_;
  RewardVector draw_;
  EfficiencyMatrix estimates_;
  Trace trace_;
};

void validate(const TeConfig& config) {
  if (!(config.delta > 0.0 && config.delta < 1.0)) throw ArgumentError("delta must lie in (0,1)");
  if (!(config.epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  if (!(config.beta_scale > 0.0)) throw ArgumentError("beta scale must be positive");
  if (config.max_rounds == 0) throw ArgumentError("max_rounds must be positive");
}

}  // namespace

GpsiResult run_te(const Instance& instance, const TeConfig& config, RngStream& rng) {
  validate(config);
  return TeRun(instance, config, rng).run();
}

void te_round_invariant_check(const TeState& s, const ArmMeansTensor* noiseless_truth) {
  auto fail = [](const char* name, const std::string& detail) { throw InvariantViolation(name, detail); };
  auto where = [](std::size_t i, std::size_t j) {
    return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
  };

  for (std::size_t i : s.accepted) {
    if (i >= s.n_groups) fail("accepted_index", "group " + std::to_string(i + 1) + " out of range");
    if (s.active_groups[i]) fail("accepted_disjoint_active", "group " + std::to_string(i + 1) + " is in both P and G");
  }
  if (!std::is_sorted(s.accepted.begin(), s.accepted.end()) ||
      std::adjacent_find(s.accepted.begin(), s.accepted.end()) != s.accepted.end()) {
    fail("accepted_sorted_unique", "P is not a sorted set");
  }

  std::uint64_t pull_sum = 0;
  for (std::uint64_t p : s.pulls) pull_sum += p;
  if (pull_sum != s.total_pulls) fail("pull_accounting", "per-arm pulls do not sum to the total");

  for (std::size_t i = 0; i < s.n_groups; ++i) {
    for (std::size_t d = 0; d < s.n_dims; ++d) {
      const bool dim_on = s.dim_active(i, d);
      if (dim_on && !s.active_groups[i]) {
        fail("dim_requires_group", "dimension " + std::to_string(d + 1) + " active for retired group " +
                                       std::to_string(i + 1));
      }
      if (s.active_groups[i] && dim_on == s.frozen_values[i * s.n_dims + d].has_value()) {
        fail("frozen_iff_resolved", "group " + std::to_string(i + 1) + ", dimension " + std::to_string(d + 1));
      }
      for (std::size_t j = 0; j < s.n_arms; ++j) {
        if (s.arm_active(i, d, j) && !dim_on) {
          fail("arm_requires_dim", "arm " + where(i, j) + " active in inactive dimension " + std::to_string(d + 1));
        }
      }
    }
    for (std::size_t j = 0; j < s.n_arms; ++j) {
      const std::uint64_t p = s.pulls[i * s.n_arms + j];
      if (p > s.round) fail("pulls_bounded_by_round", "arm " + where(i, j));
      // Active sets only shrink, so an arm still in play was pulled every round.
      if (s.arm_in_play(i, j) && p != s.round) {
        fail("pulls_equal_active_rounds", "arm " + where(i, j) + " pulled " + std::to_string(p) + " times by round " +
                                              std::to_string(s.round));
      }
    }
  }

  if (noiseless_truth != nullptr) {
    for (std::size_t i = 0; i < s.n_groups; ++i) {
      if (!s.active_groups[i]) continue;
      for (std::size_t d = 0; d < s.n_dims; ++d) {
        if (!s.dim_active(i, d)) continue;
        const std::size_t best = best_arm_in_dim(*noiseless_truth, i, d);
        if (!s.arm_active(i, d, best)) {
          fail("best_arm_active", "arm " + where(i, best) + " dropped from dimension " + std::to_string(d + 1));
        }
      }
    }
  }
}

}  // namespace bgi
