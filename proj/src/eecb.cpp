#include "bgi/eecb.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "bgi/errors.hpp"

namespace bgi {

double EecbState::mean(std::size_t i, std::size_t j, std::size_t d) const {
  const std::uint64_t n = pulls[i * n_arms + j];
  if (n == 0) return -std::numeric_limits<double>::infinity();
  return sums[(i * n_arms + j) * n_dims + d] / static_cast<double>(n);
}

RewardVector EecbState::efficiency_estimate(std::size_t i) const {
  RewardVector out(n_dims);
  for (std::size_t d = 0; d < n_dims; ++d) {
    double best = mean(i, 0, d);
    for (std::size_t j = 1; j < n_arms; ++j) best = std::max(best, mean(i, j, d));
    out[d] = best;
  }
  return out;
}

GroupSet EecbState::active_group_set() const {
  GroupSet out;
  for (std::size_t i = 0; i < n_groups; ++i) {
    if (active_groups[i]) out.push_back(i);
  }
  return out;
}

namespace {

std::size_t focus_dimension(std::span<const double> weights, const std::vector<double>& radii) {
  std::size_t best = 0;
  for (std::size_t d = 1; d < radii.size(); ++d) {
    if (weights[d] * radii[d] > weights[best] * radii[best]) best = d;
  }
  return best;
}

class EecbRun {
 public:
  EecbRun(const Instance& instance, const EecbConfig& config, RngStream& rng)
      : instance_(instance),
        config_(config),
        streams_(instance.tensor.n_groups(), instance.tensor.n_arms(), rng),
        size_{instance.tensor.n_groups(), instance.tensor.n_arms(), instance.tensor.n_dims()},
        draw_(size_.n_dims) {
    state_.n_groups = size_.n_groups;
    state_.n_arms = size_.n_arms;
    state_.n_dims = size_.n_dims;
    state_.active_groups.assign(size_.n_groups, true);
    state_.active_arms.assign(size_.n_dims * size_.n_groups * size_.n_arms, true);
    state_.focus_counts.assign(size_.n_dims, 1);
    state_.sums.assign(size_.n_groups * size_.n_arms * size_.n_dims, 0.0);
    state_.pulls.assign(size_.n_groups * size_.n_arms, 0);
  }

  LbgiResult run() {
    for (std::size_t i = 0; i < size_.n_groups; ++i) {
      for (std::size_t j = 0; j < size_.n_arms; ++j) pull(i, j);
    }
    if (config_.observer) config_.observer(state_);

    while (count_active() > 1) {
      if (state_.round > config_.max_rounds) {
        BudgetExhaustedError::PartialState partial{state_.total_pulls, state_.round - 1,
                                                   state_.active_group_set(), {}};
        throw BudgetExhaustedError("EECB exceeded " + std::to_string(config_.max_rounds) + " rounds",
                                   std::move(partial));
      }
      play_round();
      if (config_.observer) config_.observer(state_);
    }

    const GroupSet survivors = state_.active_group_set();
    if (survivors.size() != 1) throw InternalError("EECB finished with no active group");

    LbgiResult result;
    result.recommended = survivors.front();
    result.total_pulls = state_.total_pulls;
    result.rounds = state_.round;
    result.per_arm_pulls.assign(size_.n_groups, std::vector<std::uint64_t>(size_.n_arms, 0));
    for (std::size_t i = 0; i < size_.n_groups; ++i) {
      for (std::size_t j = 0; j < size_.n_arms; ++j) result.per_arm_pulls[i][j] = state_.pulls[i * size_.n_arms + j];
    }
    result.trace = std::move(trace_);
    return result;
  }

 private:
  void emit(const char* event, nlohmann::json payload) {
    if (config_.record_trace) trace_.push_back({state_.round, event, std::move(payload)});
  }

  std::size_t count_active() const {
    return static_cast<std::size_t>(std::count(state_.active_groups.begin(), state_.active_groups.end(), true));
  }

  void pull(std::size_t i, std::size_t j) {
    sample_into(instance_, i, j, streams_.arm(i, j), draw_);
    double* sum = &state_.sums[(i * size_.n_arms + j) * size_.n_dims];
    for (std::size_t d = 0; d < size_.n_dims; ++d) sum[d] += draw_[d];
    ++state_.pulls[i * size_.n_arms + j];
    ++state_.total_pulls;
  }

  void eliminate_groups(const std::vector<double>& radii) {
    double threshold = 0.0;
    for (std::size_t d = 0; d < size_.n_dims; ++d) threshold += config_.weights[d] * radii[d];
    threshold *= 2.0;

    std::vector<double> rewards(size_.n_groups, 0.0);
    for (std::size_t i = 0; i < size_.n_groups; ++i) {
      if (state_.active_groups[i]) rewards[i] = dot(state_.efficiency_estimate(i), config_.weights);
    }
    for (std::size_t i = 0; i < size_.n_groups; ++i) {
      if (!state_.active_groups[i]) continue;
      for (std::size_t j = 0; j < size_.n_groups; ++j) {
        if (state_.active_groups[j] && rewards[j] - rewards[i] > threshold) {
          state_.active_groups[i] = false;
          emit("eliminate_group", {{"group", i + 1}, {"by", j + 1}, {"gap", rewards[j] - rewards[i]},
                                   {"threshold", threshold}});
          break;
        }
      }
    }
  }

  void eliminate_arms(const std::vector<double>& radii) {
    const std::size_t k = size_.n_arms;
    for (std::size_t d = 0; d < size_.n_dims; ++d) {
      for (std::size_t i = 0; i < size_.n_groups; ++i) {
        // The in-set maximum is never removed, so comparing against it is the
        // same as the pairwise test.
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
          if (state_.arm_active(d, i, j)) best = std::max(best, state_.mean(i, j, d));
        }
        for (std::size_t j = 0; j < k; ++j) {
          if (state_.arm_active(d, i, j) && best > state_.mean(i, j, d) + 2.0 * radii[d]) {
            state_.active_arms[(d * size_.n_groups + i) * k + j] = false;
            emit("eliminate_arm_dim", {{"group", i + 1}, {"arm", j + 1}, {"dim", d + 1}});
          }
        }
      }
    }
  }

  void play_round() {
    std::vector<double> radii(size_.n_dims);
    for (std::size_t d = 0; d < size_.n_dims; ++d) {
      radii[d] = beta(state_.focus_counts[d], config_.delta, size_, config_.beta_scale);
    }
    eliminate_groups(radii);
    eliminate_arms(radii);

    const std::size_t focus = focus_dimension(config_.weights, radii);
    const std::uint64_t level = state_.focus_counts[focus];
    std::uint64_t pulled = 0;
    for (std::size_t i = 0; i < size_.n_groups; ++i) {
      if (!state_.active_groups[i]) continue;
      bool any = false;
      for (std::size_t j = 0; j < size_.n_arms; ++j) {
        if (state_.arm_active(focus, i, j) && state_.pulls[i * size_.n_arms + j] == level) {
          pull(i, j);
          any = true;
          ++pulled;
        }
      }
      if (!any && !has_arm_in_dim(focus, i)) {
        ++state_.anomalies;
        emit("anomaly", {{"group", i + 1}, {"dim", focus + 1}, {"reason", "no arm of the group in A_d"}});
      }
    }
    emit("focus_dim", {{"dim", focus + 1}, {"counts", state_.focus_counts}, {"pulled", pulled}});
    ++state_.focus_counts[focus];
    ++state_.round;
  }

  bool has_arm_in_dim(std::size_t d, std::size_t i) const {
    for (std::size_t j = 0; j < size_.n_arms; ++j) {
      if (state_.arm_active(d, i, j)) return true;
    }
    return false;
  }

  const Instance& instance_;
  const EecbConfig& config_;
  ArmStreams streams_;
  ConfidenceSize size_;
  EecbState state_;
  RewardVector draw_;
  Trace trace_;
};

}  // namespace

LbgiResult run_eecb(const Instance& instance, const EecbConfig& config, RngStream& rng) {
  if (config.weights.size() != instance.tensor.n_dims()) throw DimensionError("weight vector length must equal D");
  for (double w : config.weights) {
    if (!(w > 0.0)) throw ArgumentError("weights must be positive");
  }
  if (!(config.delta > 0.0 && config.delta < 1.0)) throw ArgumentError("delta must lie in (0,1)");
  if (!(config.beta_scale > 0.0)) throw ArgumentError("beta scale must be positive");
  if (config.max_rounds == 0) throw ArgumentError("max_rounds must be positive");
  return EecbRun(instance, config, rng).run();
}

void eecb_schedule_property(const Trace& trace, std::span<const double> weights, double delta,
                            ConfidenceSize size, double beta_scale) {
  std::vector<std::uint64_t> expected(size.n_dims, 1);
  std::uint64_t expected_round = 1;
  for (const TraceEvent& ev : trace) {
    if (ev.event != "focus_dim") continue;
    const auto counts = ev.payload.at("counts").get<std::vector<std::uint64_t>>();
    const std::size_t focus = ev.payload.at("dim").get<std::size_t>() - 1;
    const std::string at_round = "round " + std::to_string(ev.round);
    if (counts.size() != size.n_dims || focus >= size.n_dims) {
      throw InvariantViolation("schedule_shape", at_round);
    }
    if (ev.round != expected_round) throw InvariantViolation("schedule_one_focus_per_round", at_round);
    if (counts != expected) throw InvariantViolation("schedule_counts_advance_by_unit_vector", at_round);

    std::uint64_t excess = 0;
    for (std::uint64_t c : counts) excess += c - 1;
    if (excess != ev.round - 1) throw InvariantViolation("schedule_count_sum", at_round);

    std::vector<double> radii(size.n_dims);
    for (std::size_t d = 0; d < size.n_dims; ++d) radii[d] = beta(counts[d], delta, size, beta_scale);
    if (focus_dimension(weights, radii) != focus) throw InvariantViolation("schedule_focus_is_argmax", at_round);
    const double after = weights[focus] * beta(counts[focus] + 1, delta, size, beta_scale);
    if (!(after < weights[focus] * radii[focus])) throw InvariantViolation("schedule_focus_decreases", at_round);

    ++expected[focus];
    ++expected_round;
  }
}

void eecb_state_invariant_check(const EecbState& s, const ArmMeansTensor* noiseless_truth) {
  auto fail = [](const char* name, const std::string& detail) { throw InvariantViolation(name, detail); };
  std::uint64_t excess = 0;
  for (std::uint64_t n : s.focus_counts) {
    if (n < 1) fail("focus_counts_positive", "a dimension has n^d = 0");
    excess += n - 1;
  }
  if (excess != s.round - 1) {
    fail("focus_count_sum", "sum of (n^d - 1) is " + std::to_string(excess) + " at round " + std::to_string(s.round));
  }
  std::uint64_t pull_sum = 0;
  for (std::uint64_t p : s.pulls) pull_sum += p;
  if (pull_sum != s.total_pulls) fail("pull_accounting", "per-arm pulls do not sum to the total");
  if (std::none_of(s.active_groups.begin(), s.active_groups.end(), [](bool b) { return b; })) {
    fail("active_nonempty", "no active group");
  }
  const std::uint64_t max_focus = *std::max_element(s.focus_counts.begin(), s.focus_counts.end());
  for (std::size_t i = 0; i < s.n_groups; ++i) {
    for (std::size_t j = 0; j < s.n_arms; ++j) {
      const std::uint64_t p = s.pulls[i * s.n_arms + j];
      if (p > max_focus) fail("pulls_bounded_by_focus", "arm (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
      if (!s.active_groups[i]) continue;
      for (std::size_t d = 0; d < s.n_dims; ++d) {
        if (s.arm_active(d, i, j) && p < s.focus_counts[d]) {
          fail("active_arm_has_focus_samples", "arm (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                                   ") in dimension " + std::to_string(d + 1));
        }
      }
    }
  }
  if (noiseless_truth != nullptr) {
    for (std::size_t i = 0; i < s.n_groups; ++i) {
      if (!s.active_groups[i]) continue;
      for (std::size_t d = 0; d < s.n_dims; ++d) {
        const std::size_t best = best_arm_in_dim(*noiseless_truth, i, d);
        if (!s.arm_active(d, i, best)) {
          fail("best_arm_active", "arm (" + std::to_string(i + 1) + "," + std::to_string(best + 1) +
                                      ") dropped from dimension " + std::to_string(d + 1));
        }
      }
    }
  }
}

}  // namespace bgi
