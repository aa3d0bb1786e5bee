#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bgi/core.hpp"

namespace bgi {

// Value of a sample-complexity expression on one instance. Lower-bound
// reports carry the explicit summand with the Omega constant dropped: they are
// expression values, not certified bounds.
struct BoundReport {
  std::string kind;
  std::vector<std::vector<double>> per_arm_terms;
  // Terms attributed to a whole group rather than to its arms (the
  // weighted-best group in the LBGI lower bound).
  std::map<std::size_t, double> group_terms;
  double total = 0.0;
  double constant_used = 1.0;
  double log_confidence = 0.0;
  std::string note;
};

// sum_{i,j} C / g^2 * log(NKD / (delta g)) with g = max(Delta_ij, Delta_i, eps).
BoundReport te_upper_bound(const ArmMeansTensor& tensor, double epsilon, double delta, double constant = 1.0);

// sum_{i,j} 1 / g^2 * log(1 / (2.4 delta)), same g.
BoundReport gpsi_lower_bound(const ArmMeansTensor& tensor, double epsilon, double delta);

// sum_{i,j} C' / g^2 * log(NKD / (delta Delta_ij)) with g = Delta_ij / D, or
// the per-dimension refined gap when `refined` is set.
BoundReport eecb_upper_bound(const ArmMeansTensor& tensor, std::span<const double> weights, double delta,
                             double constant = 1.0, bool refined = false);

// 1 / Delta_ij^2 * log(1 / (2.4 delta)) per arm outside the best group, and a
// single 1 / Delta_{i*}^2 * log(1 / (2.4 delta)) term for the best group.
BoundReport lbgi_lower_bound(const ArmMeansTensor& tensor, std::span<const double> weights, double delta);

// Literal pairwise scan for the epsilon-Pareto set. Shares no code with
// pareto_set.
GroupSet brute_pareto(const EfficiencyMatrix& efficiency, double epsilon = 0.0);

// Bisection on [0, 2] for the smallest alpha at which `predicate` turns true.
// The predicate must be monotone. Returns 0 when it already holds at 0 and
// throws ArgumentError when it never holds on the interval.
double gap_bisection_oracle(const std::function<bool(double)>& predicate, double tolerance);

// Smallest uniform addition to R_group making the group Pareto optimal.
double pareto_gap_by_bisection(const EfficiencyMatrix& efficiency, std::size_t group, double tolerance);

// Smallest uniform addition to arm (group, arm) after which the group's
// weighted efficiency strictly beats the best group's.
double arm_alpha_by_bisection(const ArmMeansTensor& tensor, std::size_t group, std::size_t arm,
                              std::span<const double> weights, double tolerance);

}  // namespace bgi
