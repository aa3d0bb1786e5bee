#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "bgi/eecb.hpp"
#include "bgi/environment.hpp"
#include "bgi/triple_elimination.hpp"

namespace bgi {

enum class BaselineKind { age, ge, unis, tel };

std::string to_string(BaselineKind kind);

// Triple Elimination without the dimension elimination phase.
GpsiResult run_age(const Instance& instance, TeConfig config, RngStream& rng);

// Group-level elimination only: every arm of every active group is pulled
// each round.
GpsiResult run_ge(const Instance& instance, TeConfig config, RngStream& rng);

// Per-arm sample count of uniform sampling: ceil(8/eps^2 * log(2NKD/delta)).
std::uint64_t unis_pulls_per_arm(std::size_t n_groups, std::size_t n_arms, std::size_t n_dims,
                                 double epsilon, double delta);

// Pulls every arm the same fixed number of times, then returns the estimated
// Pareto set plus every group whose estimated gap is below epsilon.
GpsiResult run_unis(const Instance& instance, double delta, double epsilon, RngStream& rng);

inline constexpr double kTelEpsilon = 0.01;

struct TelConfig {
  std::vector<double> weights;
  double delta = 0.01;
  double epsilon = kTelEpsilon;
  double beta_scale = 1.0;
  std::uint64_t max_rounds = 10'000'000;
  bool record_trace = false;
};

struct TelResult {
  LbgiResult lbgi;
  // The Triple Elimination run the answer was read from.
  GpsiResult pareto_run;
};

// Runs Triple Elimination ignoring the weights, then picks the recommended
// group with the largest weighted estimate (ties to the smallest index).
TelResult run_tel(const Instance& instance, const TelConfig& config, RngStream& rng);

}  // namespace bgi
