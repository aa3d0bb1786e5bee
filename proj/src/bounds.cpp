#include "bgi/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bgi/errors.hpp"

namespace bgi {

namespace {

double nkd(const ArmMeansTensor& t) {
  return static_cast<double>(t.n_groups()) * static_cast<double>(t.n_arms()) * static_cast<double>(t.n_dims());
}

// C / g^2 * log(x) with infinite gaps contributing nothing and negative logs
// clamped to zero.
double term(double constant, double gap, double log_value) {
  if (std::isinf(gap)) return 0.0;
  return constant / (gap * gap) * std::max(0.0, log_value);
}

void validate_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta must lie in (0,1)");
}

double sum_terms(const BoundReport& r) {
  double total = 0.0;
  for (const auto& row : r.per_arm_terms) {
    for (double x : row) total += x;
  }
  for (const auto& [group, x] : r.group_terms) total += x;
  return total;
}

}  // namespace

BoundReport te_upper_bound(const ArmMeansTensor& tensor, double epsilon, double delta, double constant) {
  validate_delta(delta);
  if (!(constant > 0.0)) throw ArgumentError("constant must be positive");
  const GpsiGapReport gaps = gpsi_gaps(tensor, epsilon);
  BoundReport r;
  r.kind = "te_upper";
  r.constant_used = constant;
  r.per_arm_terms = gaps.effective_gaps;
  for (auto& row : r.per_arm_terms) {
    for (double& g : row) g = term(constant, g, std::log(nkd(tensor) / (delta * g)));
  }
  r.total = sum_terms(r);
  return r;
}

BoundReport gpsi_lower_bound(const ArmMeansTensor& tensor, double epsilon, double delta) {
  validate_delta(delta);
  const GpsiGapReport gaps = gpsi_gaps(tensor, epsilon);
  BoundReport r;
  r.kind = "gpsi_lower";
  r.log_confidence = std::log(1.0 / (2.4 * delta));
  r.per_arm_terms = gaps.effective_gaps;
  for (auto& row : r.per_arm_terms) {
    for (double& g : row) g = term(1.0, g, r.log_confidence);
  }
  r.total = sum_terms(r);
  r.note = "expression value without the Omega constant; the lower bound itself only holds on a restricted instance class";
  return r;
}

BoundReport eecb_upper_bound(const ArmMeansTensor& tensor, std::span<const double> weights, double delta,
                             double constant, bool refined) {
  validate_delta(delta);
  if (!(constant > 0.0)) throw ArgumentError("constant must be positive");
  const LbgiGapReport gaps = lbgi_gaps(tensor, weights);
  const double dims = static_cast<double>(tensor.n_dims());
  BoundReport r;
  r.kind = refined ? "eecb_upper_refined" : "eecb_upper";
  r.constant_used = constant;
  r.per_arm_terms.assign(tensor.n_groups(), std::vector<double>(tensor.n_arms(), 0.0));
  for (std::size_t i = 0; i < tensor.n_groups(); ++i) {
    for (std::size_t j = 0; j < tensor.n_arms(); ++j) {
      const double arm_gap = gaps.arm_gaps[i][j];
      if (std::isinf(arm_gap)) continue;
      const double denom = refined ? gaps.refined_arm_gaps[i][j] : arm_gap / dims;
      r.per_arm_terms[i][j] = term(constant, denom, std::log(nkd(tensor) / (delta * arm_gap)));
    }
  }
  r.total = sum_terms(r);
  return r;
}

BoundReport lbgi_lower_bound(const ArmMeansTensor& tensor, std::span<const double> weights, double delta) {
  validate_delta(delta);
  const LbgiGapReport gaps = lbgi_gaps(tensor, weights);
  BoundReport r;
  r.kind = "lbgi_lower";
  r.log_confidence = std::log(1.0 / (2.4 * delta));
  r.per_arm_terms.assign(tensor.n_groups(), std::vector<double>(tensor.n_arms(), 0.0));
  for (std::size_t i = 0; i < tensor.n_groups(); ++i) {
    if (i == gaps.best_group) continue;
    for (std::size_t j = 0; j < tensor.n_arms(); ++j) {
      r.per_arm_terms[i][j] = term(1.0, gaps.arm_gaps[i][j], r.log_confidence);
    }
  }
  r.group_terms[gaps.best_group] = term(1.0, gaps.group_gaps[gaps.best_group], r.log_confidence);
  r.total = sum_terms(r);
  r.note = "expression value without the Omega constant";
  return r;
}

GroupSet brute_pareto(const EfficiencyMatrix& efficiency, double epsilon) {
  if (!(epsilon >= 0.0)) throw ArgumentError("epsilon must be non-negative");
  GroupSet out;
  const std::size_t n = efficiency.size();
  for (std::size_t i = 0; i < n; ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < n && !dominated; ++j) {
      if (efficiency[j].size() != efficiency[i].size()) throw DimensionError("ragged efficiency matrix");
      std::size_t below = 0;
      for (std::size_t d = 0; d < efficiency[i].size(); ++d) {
        if (efficiency[i][d] + epsilon < efficiency[j][d]) ++below;
      }
      dominated = below == efficiency[i].size();
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

double gap_bisection_oracle(const std::function<bool(double)>& predicate, double tolerance) {
  if (!(tolerance > 0.0)) throw ArgumentError("tolerance must be positive");
  double lo = 0.0;
  double hi = 2.0;
  if (predicate(lo)) return 0.0;
  if (!predicate(hi)) throw ArgumentError("predicate does not flip on [0, 2]");
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (predicate(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double pareto_gap_by_bisection(const EfficiencyMatrix& efficiency, std::size_t group, double tolerance) {
  if (group >= efficiency.size()) throw ArgumentError("group out of range");
  const auto is_optimal = [&](double alpha) {
    const auto& row = efficiency[group];
    for (std::size_t j = 0; j < efficiency.size(); ++j) {
      bool strictly_below = true;
      for (std::size_t d = 0; d < row.size(); ++d) {
        if (!(row[d] + alpha < efficiency[j][d])) {
          strictly_below = false;
          break;
        }
      }
      if (strictly_below) return false;
    }
    return true;
  };
  return gap_bisection_oracle(is_optimal, tolerance);
}

double arm_alpha_by_bisection(const ArmMeansTensor& tensor, std::size_t group, std::size_t arm,
                              std::span<const double> weights, double tolerance) {
  const std::size_t n = tensor.n_groups();
  const std::size_t k = tensor.n_arms();
  const std::size_t dims = tensor.n_dims();
  if (weights.size() != dims) throw DimensionError("weight vector length must equal D");

  // Weighted efficiency of group i when `bump` is added to arm (group, arm).
  const auto weighted = [&](std::size_t i, double bump) {
    double total = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) {
        const double x = tensor.at(i, j, d) + ((i == group && j == arm) ? bump : 0.0);
        top = std::max(top, x);
      }
      total += weights[d] * top;
    }
    return total;
  };
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) best = std::max(best, weighted(i, 0.0));
  return gap_bisection_oracle([&](double alpha) { return alpha > 0.0 && weighted(group, alpha) > best; },
                              tolerance);
}

}  // namespace bgi
