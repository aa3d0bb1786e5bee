#include "bgi/baselines.hpp"

#include <cmath>

#include "bgi/errors.hpp"

namespace bgi {

std::string to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::age:
      return "age";
    case BaselineKind::ge:
      return "ge";
    case BaselineKind::unis:
      return "unis";
    case BaselineKind::tel:
      return "tel";
  }
  return "unknown";
}

GpsiResult run_age(const Instance& instance, TeConfig config, RngStream& rng) {
  config.dimension_elimination = false;
  config.arm_elimination = true;
  return run_te(instance, config, rng);
}

GpsiResult run_ge(const Instance& instance, TeConfig config, RngStream& rng) {
  config.dimension_elimination = false;
  config.arm_elimination = false;
  return run_te(instance, config, rng);
}

std::uint64_t unis_pulls_per_arm(std::size_t n_groups, std::size_t n_arms, std::size_t n_dims,
                                 double epsilon, double delta) {
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta must lie in (0,1)");
  const double nkd = static_cast<double>(n_groups) * static_cast<double>(n_arms) * static_cast<double>(n_dims);
  return static_cast<std::uint64_t>(std::ceil(8.0 / (epsilon * epsilon) * std::log(2.0 * nkd / delta)));
}

GpsiResult run_unis(const Instance& instance, double delta, double epsilon, RngStream& rng) {
  const ArmMeansTensor& t = instance.tensor;
  const std::size_t n = t.n_groups();
  const std::size_t k = t.n_arms();
  const std::size_t dims = t.n_dims();
  const std::uint64_t per_arm = unis_pulls_per_arm(n, k, dims, epsilon, delta);

  std::vector<double> means(n * k * dims, 0.0);
  ArmStreams streams(n, k, rng);
  RewardVector draw(dims);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      double* sum = &means[(i * k + j) * dims];
      for (std::uint64_t s = 0; s < per_arm; ++s) {
        sample_into(instance, i, j, streams.arm(i, j), draw);
        for (std::size_t d = 0; d < dims; ++d) sum[d] += draw[d];
      }
      for (std::size_t d = 0; d < dims; ++d) sum[d] /= static_cast<double>(per_arm);
    }
  }

  // Empirical means can leave [0,1], so the efficiency matrix is built
  // directly rather than through ArmMeansTensor.
  EfficiencyMatrix estimates(n, RewardVector(dims, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dims; ++d) {
      double best = means[(i * k) * dims + d];
      for (std::size_t j = 1; j < k; ++j) best = std::max(best, means[(i * k + j) * dims + d]);
      estimates[i][d] = best;
    }
  }

  const GroupSet optimal = pareto_set(estimates, 0.0);
  std::vector<bool> chosen(n, false);
  for (std::size_t i : optimal) chosen[i] = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (chosen[i]) continue;
    double gap = 0.0;
    for (std::size_t j : optimal) gap = std::max(gap, m_gap(estimates[i], estimates[j]));
    if (gap < epsilon) chosen[i] = true;
  }

  GpsiResult result;
  for (std::size_t i = 0; i < n; ++i) {
    if (chosen[i]) result.recommended.push_back(i);
  }
  result.per_arm_pulls.assign(n, std::vector<std::uint64_t>(k, per_arm));
  result.total_pulls = per_arm * n * k;
  result.rounds = per_arm;
  result.final_estimates = std::move(estimates);
  return result;
}

TelResult run_tel(const Instance& instance, const TelConfig& config, RngStream& rng) {
  if (config.weights.size() != instance.tensor.n_dims()) throw DimensionError("weight vector length must equal D");
  for (double w : config.weights) {
    if (!(w > 0.0)) throw ArgumentError("weights must be positive");
  }
  TeConfig te;
  te.delta = config.delta;
  te.epsilon = config.epsilon;
  te.beta_scale = config.beta_scale;
  te.max_rounds = config.max_rounds;
  te.record_trace = config.record_trace;

  TelResult out;
  out.pareto_run = run_te(instance, te, rng);
  const GpsiResult& run = out.pareto_run;
  if (run.recommended.empty()) throw InternalError("TEL: triple elimination recommended no group");

  std::size_t best = run.recommended.front();
  double best_value = dot(run.final_estimates[best], config.weights);
  for (std::size_t i : run.recommended) {
    const double value = dot(run.final_estimates[i], config.weights);
    if (value > best_value) {
      best = i;
      best_value = value;
    }
  }
  out.lbgi.recommended = best;
  out.lbgi.total_pulls = run.total_pulls;
  out.lbgi.per_arm_pulls = run.per_arm_pulls;
  out.lbgi.rounds = run.rounds;
  out.lbgi.trace = run.trace;
  return out;
}

}  // namespace bgi
