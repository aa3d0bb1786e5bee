#include "bgi/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bgi/errors.hpp"

namespace bgi {

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::independent_gaussian:
      return "independent_gaussian";
    case NoiseKind::fully_dependent:
      return "fully_dependent";
  }
  return "unknown";
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "independent_gaussian") return NoiseKind::independent_gaussian;
  if (name == "fully_dependent") return NoiseKind::fully_dependent;
  throw ArgumentError("unknown noise kind '" + name + "'");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_seed_(master_seed),
      stream_index_(stream_index),
      engine_(splitmix64(master_seed ^ splitmix64(stream_index + 0x5851f42d4c957f2dULL))) {}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw ArgumentError("uniform_index over an empty range");
  // Rejection keeps the draw unbiased.
  const std::uint64_t range = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % range);
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * factor;
  has_cached_normal_ = true;
  return u * factor;
}

void sample_into(const Instance& instance, std::size_t group, std::size_t arm, RngStream& rng,
                 std::span<double> out) {
  const ArmMeansTensor& t = instance.tensor;
  if (group >= t.n_groups() || arm >= t.n_arms()) {
    throw ArgumentError("arm (" + std::to_string(group + 1) + "," + std::to_string(arm + 1) +
                        ") out of range");
  }
  if (out.size() != t.n_dims()) throw DimensionError("sample buffer length must equal D");
  const auto mu = t.arm(group, arm);
  const double scale = instance.noise.scale;
  if (scale == 0.0) {
    std::copy(mu.begin(), mu.end(), out.begin());
    return;
  }
  switch (instance.noise.kind) {
    case NoiseKind::independent_gaussian:
      for (std::size_t d = 0; d < mu.size(); ++d) out[d] = mu[d] + scale * rng.normal();
      break;
    case NoiseKind::fully_dependent: {
      const double first = mu[0] + scale * rng.normal();
      out[0] = first;
      for (std::size_t d = 1; d < mu.size(); ++d) out[d] = first + (mu[d] - mu[0]);
      break;
    }
  }
}

ArmStreams::ArmStreams(std::size_t n_groups, std::size_t n_arms, RngStream& base) : n_arms_(n_arms) {
  streams_.reserve(n_groups * n_arms);
  for (std::size_t k = 0; k < n_groups * n_arms; ++k) streams_.emplace_back(base.master_seed(), base.next_u64());
}

RewardVector sample(const Instance& instance, std::size_t group, std::size_t arm, RngStream& rng) {
  RewardVector out(instance.tensor.n_dims());
  sample_into(instance, group, arm, rng, out);
  return out;
}

namespace {

ArmMeansTensor uniform_tensor(std::size_t n, std::size_t k, std::size_t d, RngStream& rng) {
  std::vector<double> means(n * k * d);
  for (double& x : means) x = rng.uniform();
  return ArmMeansTensor(n, k, d, std::move(means));
}

void require_positive_sizes(std::size_t n, std::size_t k, std::size_t d) {
  if (n == 0 || k == 0 || d == 0) throw ArgumentError("N, K and D must be positive");
}

std::string shape_label(const char* prefix, std::size_t n, std::size_t k, std::size_t d) {
  std::ostringstream os;
  os << prefix << "-N" << n << "-K" << k << "-D" << d;
  return os.str();
}

}  // namespace

Instance gen_random_gpsi(std::size_t n_groups, std::size_t n_arms, std::size_t n_dims,
                         std::size_t pareto_count, double epsilon, RngStream& rng,
                         const GenerationOptions& options) {
  require_positive_sizes(n_groups, n_arms, n_dims);
  if (pareto_count < 1 || pareto_count > n_groups) {
    throw ArgumentError("pareto_count must lie in [1, N]");
  }
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");

  std::uint64_t wrong_count = 0;
  std::uint64_t small_gap = 0;
  double best_min_gap = 0.0;
  for (std::uint64_t attempt = 0; attempt < options.max_attempts; ++attempt) {
    ArmMeansTensor tensor = uniform_tensor(n_groups, n_arms, n_dims, rng);
    const GpsiGapReport gaps = gpsi_gaps(tensor, epsilon);
    if (gaps.pareto_set.size() != pareto_count) {
      ++wrong_count;
      continue;
    }
    const double min_gap = *std::min_element(gaps.group_gaps.begin(), gaps.group_gaps.end());
    best_min_gap = std::max(best_min_gap, min_gap);
    if (!(min_gap > 3.0 * epsilon)) {
      ++small_gap;
      continue;
    }
    std::ostringstream label;
    label << shape_label("gpsi", n_groups, n_arms, n_dims) << "-P" << pareto_count;
    return Instance{std::move(tensor), options.noise, label.str()};
  }
  std::ostringstream os;
  os << "gen_random_gpsi: no instance after " << options.max_attempts << " attempts (" << wrong_count
     << " with the wrong Pareto count, " << small_gap << " with min gap <= " << 3.0 * epsilon
     << ", largest min gap seen " << best_min_gap << ")";
  throw GenerationError(os.str());
}

Instance gen_random_lbgi(std::size_t n_groups, std::size_t n_arms, std::size_t n_dims,
                         std::span<const double> weights, double delta_min, RngStream& rng,
                         const GenerationOptions& options) {
  return gen_random_lbgi_multi(n_groups, n_arms, n_dims,
                               {std::vector<double>(weights.begin(), weights.end())}, delta_min, rng,
                               options);
}

Instance gen_random_lbgi_multi(std::size_t n_groups, std::size_t n_arms, std::size_t n_dims,
                               const std::vector<std::vector<double>>& weight_sets,
                               double delta_min, RngStream& rng, const GenerationOptions& options) {
  require_positive_sizes(n_groups, n_arms, n_dims);
  if (weight_sets.empty()) throw ArgumentError("at least one weight vector is required");
  for (const auto& w : weight_sets) {
    if (w.size() != n_dims) throw DimensionError("weight vector length must equal D");
    for (double x : w) {
      if (!(x > 0.0)) throw ArgumentError("weights must be positive");
    }
  }
  if (!(delta_min > 0.0)) throw ArgumentError("delta_min must be positive");

  std::uint64_t ties = 0;
  std::uint64_t small_gap = 0;
  std::uint64_t small_pareto_gap = 0;
  for (std::uint64_t attempt = 0; attempt < options.max_attempts; ++attempt) {
    ArmMeansTensor tensor = uniform_tensor(n_groups, n_arms, n_dims, rng);
    if (n_groups == 1) {
      return Instance{std::move(tensor), options.noise, shape_label("lbgi", n_groups, n_arms, n_dims)};
    }
    const EfficiencyMatrix eff = efficiency(tensor);
    bool ok = true;
    for (const auto& w : weight_sets) {
      double norm = 0.0;
      for (double x : w) norm += x;
      std::vector<double> sums;
      for (const auto& row : eff) sums.push_back(dot(row, w));
      std::vector<double> sorted = sums;
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      if (sorted[0] == sorted[1]) {
        ++ties;
        ok = false;
        break;
      }
      // Gap of the best group: distance to the runner-up.
      if ((sorted[0] - sorted[1]) / norm < delta_min) {
        ++small_gap;
        ok = false;
        break;
      }
    }
    if (ok && options.min_pareto_gap) {
      const GpsiGapReport gaps = gpsi_gaps(tensor, options.pareto_gap_epsilon);
      if (*std::min_element(gaps.group_gaps.begin(), gaps.group_gaps.end()) < *options.min_pareto_gap) {
        ++small_pareto_gap;
        ok = false;
      }
    }
    if (ok) {
      return Instance{std::move(tensor), options.noise, shape_label("lbgi", n_groups, n_arms, n_dims)};
    }
  }
  std::ostringstream os;
  os << "gen_random_lbgi: no instance after " << options.max_attempts << " attempts (" << ties
     << " ties, " << small_gap << " with best-group gap < " << delta_min << ", "
     << small_pareto_gap << " with a small Pareto gap)";
  throw GenerationError(os.str());
}

Instance gen_hard_gpsi(std::size_t n_groups, std::size_t n_arms, std::size_t n_dims, double epsilon,
                       const HardInstanceParams& params, RngStream& rng) {
  if (n_groups < 3) throw ArgumentError("hard instance needs N >= 3");
  if (n_dims < 3) throw ArgumentError("hard instance needs D >= 3");
  if (n_arms == 0) throw ArgumentError("K must be positive");
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  const auto [a1, a2, a3, a4, a5] = params.a;
  for (std::size_t k = 0; k < 5; ++k) {
    const double x = params.a[k];
    if (!(x > 0.0 && x < 1.0)) {
      throw ArgumentError("a" + std::to_string(k + 1) + " must lie in (0,1)");
    }
  }
  auto check = [](bool ok, const char* inequality) {
    if (!ok) throw ArgumentError(std::string("hard instance constraint violated: ") + inequality);
  };
  check(a1 > a2, "a1 > a2");
  check(a3 > epsilon, "a3 > epsilon");
  check(a3 - a5 > a2 - a4, "a3 - a5 > a2 - a4");
  check(a2 - a4 > epsilon, "a2 - a4 > epsilon");
  check(a1 - a2 < 2.0 * (a2 - a4), "a1 - a2 < 2(a2 - a4)");
  check(a2 > 2.0 * a4, "a2 > 2 a4");
  check(a1 < 2.0 * a2, "a1 < 2 a2");

  const double floor = 2.0 * a2 - a1;
  std::vector<double> means(n_groups * n_arms * n_dims);
  for (std::size_t i = 0; i < n_groups; ++i) {
    RewardVector target(n_dims);
    for (std::size_t d = 0; d < n_dims; ++d) {
      if (i == 0) target[d] = d == 0 ? a1 : d == 1 ? a2 : a3;
      else if (i == 1) target[d] = d == 0 ? a2 : d == 1 ? a1 : a3;
      else target[d] = d < 2 ? a4 : a5;
    }
    for (std::size_t j = 0; j < n_arms; ++j) {
      for (std::size_t d = 0; d < n_dims; ++d) {
        const double lo = (i < 2 && d < 2) ? floor : 0.0;
        means[(i * n_arms + j) * n_dims + d] = lo + rng.uniform_open() * (target[d] - lo);
      }
    }
    for (std::size_t d = 0; d < n_dims; ++d) {
      const std::size_t pinned = rng.uniform_index(n_arms);
      means[(i * n_arms + pinned) * n_dims + d] = target[d];
    }
  }
  return Instance{ArmMeansTensor(n_groups, n_arms, n_dims, std::move(means)),
                  NoiseModel{NoiseKind::fully_dependent, 1.0},
                  shape_label("hard-gpsi", n_groups, n_arms, n_dims)};
}

double kl_fully_dependent(double alpha) { return alpha * alpha / 2.0; }

}  // namespace bgi
