#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace bgi {

using RewardVector = std::vector<double>;
// One efficiency vector per group.
using EfficiencyMatrix = std::vector<RewardVector>;
// Sorted, duplicate-free 0-based group indices.
using GroupSet = std::vector<std::size_t>;

// N x K x D tensor of arm means, every entry in [0,1].
class ArmMeansTensor {
 public:
  ArmMeansTensor() = default;
  // `means` is laid out group-major, then arm, then dimension.
  ArmMeansTensor(std::size_t n_groups, std::size_t n_arms, std::size_t n_dims,
                 std::vector<double> means);

  std::size_t n_groups() const noexcept { return n_groups_; }
  std::size_t n_arms() const noexcept { return n_arms_; }
  std::size_t n_dims() const noexcept { return n_dims_; }

  double at(std::size_t group, std::size_t arm, std::size_t dim) const {
    return means_[index(group, arm, dim)];
  }
  std::span<const double> arm(std::size_t group, std::size_t arm) const {
    return {means_.data() + index(group, arm, 0), n_dims_};
  }
  const std::vector<double>& flat() const noexcept { return means_; }

  friend bool operator==(const ArmMeansTensor&, const ArmMeansTensor&) = default;

 private:
  std::size_t index(std::size_t group, std::size_t arm, std::size_t dim) const noexcept {
    return (group * n_arms_ + arm) * n_dims_ + dim;
  }

  std::size_t n_groups_ = 0;
  std::size_t n_arms_ = 0;
  std::size_t n_dims_ = 0;
  std::vector<double> means_;
};

// Strongest relation of v over u, following the componentwise order:
// weak (u <= v), strict-partial (u <= v, some coordinate strictly smaller),
// strict (every coordinate strictly smaller).
enum class Dominance { none, weak, strict_partial, strict };

Dominance dominance(std::span<const double> u, std::span<const double> v);

// [min_d (u^d - v^d)]^+ : smallest uniform addition to v that stops u from
// strictly dominating it.
double m_gap(std::span<const double> v, std::span<const double> u);

// [max_d (v^d - u^d + alpha)]^+ : smallest uniform addition to u making it
// weakly dominate v + alpha.
double big_m_gap(std::span<const double> v, std::span<const double> u, double alpha = 0.0);

EfficiencyMatrix efficiency(const ArmMeansTensor& tensor);

// In-group index of the arm attaining R_i^d; ties go to the smallest index.
std::size_t best_arm_in_dim(const ArmMeansTensor& tensor, std::size_t group, std::size_t dim);

// Groups i with no j such that R_i + epsilon is strictly dominated by R_j.
GroupSet pareto_set(const EfficiencyMatrix& efficiency, double epsilon = 0.0);

struct GpsiGapReport {
  double epsilon = 0.0;
  GroupSet pareto_set;
  std::vector<double> group_gaps;  // Delta_i
  // Keyed by Pareto-optimal group. Empty minimizations give +inf.
  std::map<std::size_t, double> plus_gaps;
  std::map<std::size_t, double> minus_gaps;
  std::vector<std::vector<double>> arm_gaps;        // Delta_{i,j}
  std::vector<std::vector<double>> effective_gaps;  // max(Delta_{i,j}, Delta_i, epsilon)
};

GpsiGapReport gpsi_gaps(const ArmMeansTensor& tensor, double epsilon);

struct LbgiGapReport {
  std::vector<double> weights;
  std::size_t best_group = 0;
  std::vector<double> weighted_rewards;  // R_i^T w
  std::vector<double> group_gaps;
  std::vector<std::vector<double>> arm_alphas;
  std::vector<std::vector<double>> arm_gaps;
  std::vector<std::vector<double>> refined_arm_gaps;
};

// Throws ArgumentError on a non-positive weight and NonUniqueOptimumError
// when two groups share the maximal weighted reward.
LbgiGapReport lbgi_gaps(const ArmMeansTensor& tensor, std::span<const double> weights);

// Index of the unique maximizer of R_i^T w.
std::size_t weighted_best_group(const EfficiencyMatrix& efficiency, std::span<const double> weights);

// Smallest uniform addition to arm (group, arm) after which the group's
// weighted reward strictly exceeds `target`. Solved exactly over the
// piecewise-linear map alpha -> sum_d w^d max(R^d, mu^d + alpha).
double arm_overtake_alpha(const ArmMeansTensor& tensor, std::size_t group, std::size_t arm,
                          std::span<const double> weights, double target);

struct ConfidenceSize {
  std::size_t n_groups = 1;
  std::size_t n_arms = 1;
  std::size_t n_dims = 1;
};

// Anytime confidence radius after `samples` samples:
// scale * sqrt(2 log(4 N K D r^2 / delta) / r).
double beta(std::uint64_t samples, double delta, ConfidenceSize size, double scale = 1.0);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace bgi
