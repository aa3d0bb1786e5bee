#include "bgi/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "bgi/errors.hpp"

namespace bgi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("vector lengths differ: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
}

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

ArmMeansTensor::ArmMeansTensor(std::size_t n_groups, std::size_t n_arms, std::size_t n_dims,
                               std::vector<double> means)
    : n_groups_(n_groups), n_arms_(n_arms), n_dims_(n_dims), means_(std::move(means)) {
  if (n_groups == 0 || n_arms == 0 || n_dims == 0) {
    throw DimensionError("tensor dimensions must be positive");
  }
  if (means_.size() != n_groups * n_arms * n_dims) {
    throw DimensionError("tensor expects " + std::to_string(n_groups * n_arms * n_dims) +
                         " entries, got " + std::to_string(means_.size()));
  }
  for (std::size_t k = 0; k < means_.size(); ++k) {
    const double x = means_[k];
    if (!(x >= 0.0 && x <= 1.0)) {
      const std::size_t d = k % n_dims;
      const std::size_t j = (k / n_dims) % n_arms;
      const std::size_t i = k / (n_dims * n_arms);
      throw ArgumentError("arm mean outside [0,1] at group " + std::to_string(i + 1) + ", arm " +
                          std::to_string(j + 1) + ", dim " + std::to_string(d + 1));
    }
  }
}

Dominance dominance(std::span<const double> u, std::span<const double> v) {
  require_same_length(u, v);
  bool all_le = true;
  bool all_lt = true;
  bool any_lt = false;
  for (std::size_t d = 0; d < u.size(); ++d) {
    if (u[d] < v[d]) {
      any_lt = true;
    } else {
      all_lt = false;
      if (u[d] > v[d]) all_le = false;
    }
  }
  if (!all_le) return Dominance::none;
  if (all_lt) return Dominance::strict;
  if (any_lt) return Dominance::strict_partial;
  return Dominance::weak;
}

double m_gap(std::span<const double> v, std::span<const double> u) {
  require_same_length(v, u);
  double lo = kInf;
  for (std::size_t d = 0; d < v.size(); ++d) lo = std::min(lo, u[d] - v[d]);
  return positive_part(lo);
}

double big_m_gap(std::span<const double> v, std::span<const double> u, double alpha) {
  require_same_length(v, u);
  if (!(alpha >= 0.0)) throw ArgumentError("alpha must be non-negative");
  double hi = -kInf;
  for (std::size_t d = 0; d < v.size(); ++d) hi = std::max(hi, (v[d] + alpha) - u[d]);
  return positive_part(hi);
}

EfficiencyMatrix efficiency(const ArmMeansTensor& tensor) {
  EfficiencyMatrix out(tensor.n_groups(), RewardVector(tensor.n_dims(), 0.0));
  for (std::size_t i = 0; i < tensor.n_groups(); ++i) {
    for (std::size_t d = 0; d < tensor.n_dims(); ++d) {
      out[i][d] = tensor.at(i, best_arm_in_dim(tensor, i, d), d);
    }
  }
  return out;
}

std::size_t best_arm_in_dim(const ArmMeansTensor& tensor, std::size_t group, std::size_t dim) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < tensor.n_arms(); ++j) {
    if (tensor.at(group, j, dim) > tensor.at(group, best, dim)) best = j;
  }
  return best;
}

GroupSet pareto_set(const EfficiencyMatrix& efficiency, double epsilon) {
  if (!(epsilon >= 0.0)) throw ArgumentError("epsilon must be non-negative");
  GroupSet out;
  RewardVector shifted;
  for (std::size_t i = 0; i < efficiency.size(); ++i) {
    shifted = efficiency[i];
    for (double& x : shifted) x += epsilon;
    const bool dominated = std::any_of(efficiency.begin(), efficiency.end(), [&](const RewardVector& other) {
      return dominance(shifted, other) == Dominance::strict;
    });
    if (!dominated) out.push_back(i);
  }
  return out;
}

GpsiGapReport gpsi_gaps(const ArmMeansTensor& tensor, double epsilon) {
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  const EfficiencyMatrix eff = efficiency(tensor);
  const std::size_t n = tensor.n_groups();

  GpsiGapReport report;
  report.epsilon = epsilon;
  report.pareto_set = pareto_set(eff, 0.0);
  std::vector<bool> optimal(n, false);
  for (std::size_t i : report.pareto_set) optimal[i] = true;

  report.group_gaps.assign(n, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    if (optimal[i]) continue;
    double gap = 0.0;
    for (std::size_t j : report.pareto_set) gap = std::max(gap, m_gap(eff[i], eff[j]));
    report.group_gaps[i] = gap;
  }
  for (std::size_t i : report.pareto_set) {
    double plus = kInf;
    double minus = kInf;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (optimal[j]) {
        plus = std::min(plus, std::min(big_m_gap(eff[i], eff[j]), big_m_gap(eff[j], eff[i])));
      } else {
        minus = std::min(minus, big_m_gap(eff[j], eff[i]) + 2.0 * report.group_gaps[j]);
      }
    }
    report.plus_gaps[i] = plus;
    report.minus_gaps[i] = minus;
    report.group_gaps[i] = std::min(plus, minus);
  }

  report.arm_gaps.assign(n, std::vector<double>(tensor.n_arms(), 0.0));
  report.effective_gaps = report.arm_gaps;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < tensor.n_arms(); ++j) {
      const double arm_gap = m_gap(tensor.arm(i, j), eff[i]);
      report.arm_gaps[i][j] = arm_gap;
      report.effective_gaps[i][j] = std::max({arm_gap, report.group_gaps[i], epsilon});
    }
  }
  return report;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b);
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

std::size_t weighted_best_group(const EfficiencyMatrix& efficiency, std::span<const double> weights) {
  if (efficiency.empty()) throw DimensionError("no groups");
  std::size_t best = 0;
  double best_value = dot(efficiency[0], weights);
  bool tied = false;
  for (std::size_t i = 1; i < efficiency.size(); ++i) {
    const double value = dot(efficiency[i], weights);
    if (value > best_value) {
      best = i;
      best_value = value;
      tied = false;
    } else if (value == best_value) {
      tied = true;
    }
  }
  if (tied) {
    throw NonUniqueOptimumError("weighted-best group is not unique (value " +
                                std::to_string(best_value) + ")");
  }
  return best;
}

double arm_overtake_alpha(const ArmMeansTensor& tensor, std::size_t group, std::size_t arm,
                          std::span<const double> weights, double target) {
  const std::size_t dims = tensor.n_dims();
  const EfficiencyMatrix eff = efficiency(tensor);
  const auto& row = eff[group];
  const auto mu = tensor.arm(group, arm);

  // Crossing points where mu^d + alpha overtakes R^d; beyond a crossing, the
  // weighted reward grows with slope w^d.
  std::vector<std::size_t> order(dims);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> crossing(dims);
  for (std::size_t d = 0; d < dims; ++d) crossing[d] = row[d] - mu[d];
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return crossing[a] < crossing[b]; });

  const double deficit = target - dot(row, weights);
  if (deficit < 0.0) return 0.0;

  double slope = 0.0;
  double weighted_crossings = 0.0;
  for (std::size_t k = 0; k < dims; ++k) {
    slope += weights[order[k]];
    weighted_crossings += weights[order[k]] * crossing[order[k]];
    // On the segment after crossing k: gain(alpha) = slope*alpha - weighted_crossings.
    const double alpha = (deficit + weighted_crossings) / slope;
    if (k + 1 == dims || alpha <= crossing[order[k + 1]]) return alpha;
  }
  throw InternalError("arm_overtake_alpha: no segment contains the root");
}

LbgiGapReport lbgi_gaps(const ArmMeansTensor& tensor, std::span<const double> weights) {
  if (weights.size() != tensor.n_dims()) throw DimensionError("weight vector length must equal D");
  for (double w : weights) {
    if (!(w > 0.0)) throw ArgumentError("weights must be positive");
  }
  const EfficiencyMatrix eff = efficiency(tensor);
  const std::size_t n = tensor.n_groups();
  const std::size_t k = tensor.n_arms();
  const double w_norm = std::accumulate(weights.begin(), weights.end(), 0.0);

  LbgiGapReport report;
  report.weights.assign(weights.begin(), weights.end());
  report.best_group = weighted_best_group(eff, weights);
  const std::size_t star = report.best_group;
  for (const auto& row : eff) report.weighted_rewards.push_back(dot(row, weights));
  const double target = report.weighted_rewards[star];

  report.group_gaps.assign(n, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == star) continue;
    report.group_gaps[i] = (target - report.weighted_rewards[i]) / w_norm;
    report.group_gaps[star] = std::min(report.group_gaps[star], report.group_gaps[i]);
  }

  report.arm_alphas.assign(n, std::vector<double>(k, 0.0));
  report.arm_gaps = report.arm_alphas;
  report.refined_arm_gaps = report.arm_alphas;
  const double dims = static_cast<double>(tensor.n_dims());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double alpha = i == star ? m_gap(tensor.arm(i, j), eff[i])
                                     : arm_overtake_alpha(tensor, i, j, weights, target);
      report.arm_alphas[i][j] = alpha;
      report.arm_gaps[i][j] = std::max(alpha, report.group_gaps[i]);
      double refined = kInf;
      for (std::size_t d = 0; d < tensor.n_dims(); ++d) {
        refined = std::min(refined, report.group_gaps[i] * w_norm / (dims * weights[d]) +
                                        (eff[i][d] - tensor.at(i, j, d)));
      }
      report.refined_arm_gaps[i][j] = refined;
    }
  }
  return report;
}

double beta(std::uint64_t samples, double delta, ConfidenceSize size, double scale) {
  if (samples == 0) throw ArgumentError("beta needs at least one sample");
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta must lie in (0,1)");
  if (!(scale > 0.0)) throw ArgumentError("beta scale must be positive");
  const double r = static_cast<double>(samples);
  const double nkd = static_cast<double>(size.n_groups) * static_cast<double>(size.n_arms) *
                     static_cast<double>(size.n_dims);
  return scale * std::sqrt(2.0 * std::log(4.0 * nkd * r * r / delta) / r);
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const DimensionError*>(&e)) return "dimension_error";
  if (dynamic_cast<const ArgumentError*>(&e)) return "argument_error";
  if (dynamic_cast<const NonUniqueOptimumError*>(&e)) return "non_unique_optimum";
  if (dynamic_cast<const GenerationError*>(&e)) return "generation_failure";
  if (dynamic_cast<const BudgetExhaustedError*>(&e)) return "budget_exhausted";
  if (dynamic_cast<const InvariantViolation*>(&e)) return "invariant_violation";
  if (dynamic_cast<const InternalError*>(&e)) return "internal_error";
  if (dynamic_cast<const IoError*>(&e)) return "io_error";
  return "error";
}

}  // namespace bgi
