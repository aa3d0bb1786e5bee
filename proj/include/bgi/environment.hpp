#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "bgi/core.hpp"

namespace bgi {

enum class NoiseKind { independent_gaussian, fully_dependent };

struct NoiseModel {
  NoiseKind kind = NoiseKind::independent_gaussian;
  // Standard deviation multiplier. Zero gives deterministic rewards.
  double scale = 1.0;

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

struct Instance {
  ArmMeansTensor tensor;
  NoiseModel noise;
  std::string label;

  friend bool operator==(const Instance&, const Instance&) = default;
};

// Identifier of the uniform and normal deviate generators below. Sample
// sequences are reproducible only between builds reporting the same value.
inline constexpr const char* kRngAlgorithm = "mt19937_64+splitmix64-seed/marsaglia-polar/v1";

// Seeded random stream. Identical (master_seed, stream_index) pairs produce
// identical sequences; distinct stream indices give independent streams.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0,1) with 53 random bits.
  double uniform();
  // Uniform on (0,1).
  double uniform_open();
  std::size_t uniform_index(std::size_t n);
  double normal();

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

// Draws one reward vector from arm (group, arm) into `out` (length D).
void sample_into(const Instance& instance, std::size_t group, std::size_t arm, RngStream& rng,
                 std::span<double> out);
RewardVector sample(const Instance& instance, std::size_t group, std::size_t arm, RngStream& rng);

// One independent stream per arm, seeded from `base` in (group, arm) order.
// The k-th sample of an arm is then the same whatever order the arms are
// pulled in, so algorithms run from equal base streams see common noise.
class ArmStreams {
 public:
  ArmStreams(std::size_t n_groups, std::size_t n_arms, RngStream& base);
  RngStream& arm(std::size_t group, std::size_t arm) { return streams_[group * n_arms_ + arm]; }

 private:
  std::size_t n_arms_;
  std::vector<RngStream> streams_;
};

struct GenerationOptions {
  std::uint64_t max_attempts = 100000;
  NoiseModel noise{};
  // Weighted generators only: also require every group-Pareto gap, computed
  // at `pareto_gap_epsilon`, to be at least this value.
  std::optional<double> min_pareto_gap;
  double pareto_gap_epsilon = 0.01;
};

// Uniform [0,1) tensors, redrawn until exactly `pareto_count` groups are
// Pareto optimal and every group gap exceeds 3 * epsilon.
Instance gen_random_gpsi(std::size_t n_groups, std::size_t n_arms, std::size_t n_dims,
                         std::size_t pareto_count, double epsilon, RngStream& rng,
                         const GenerationOptions& options = {});

// Uniform [0,1) tensors, redrawn until the weighted-best group is unique and
// its gap is at least `delta_min`.
Instance gen_random_lbgi(std::size_t n_groups, std::size_t n_arms, std::size_t n_dims,
                         std::span<const double> weights, double delta_min, RngStream& rng,
                         const GenerationOptions& options = {});

// Same, but the candidate must satisfy the constraint under every weight
// vector in `weight_sets`.
Instance gen_random_lbgi_multi(std::size_t n_groups, std::size_t n_arms, std::size_t n_dims,
                               const std::vector<std::vector<double>>& weight_sets,
                               double delta_min, RngStream& rng,
                               const GenerationOptions& options = {});

struct HardInstanceParams {
  std::array<double, 5> a{0.9, 0.7, 0.7, 0.3, 0.1};
};

// Lower-bound family: R_1 = (a1, a2, a3, ..., a3), R_2 = (a2, a1, a3, ..., a3),
// R_i = (a4, a4, a5, ..., a5) for i > 2, with fully-dependent unit noise.
Instance gen_hard_gpsi(std::size_t n_groups, std::size_t n_arms, std::size_t n_dims, double epsilon,
                       const HardInstanceParams& params, RngStream& rng);

// KL divergence between two fully-dependent unit-Gaussian vectors whose means
// differ by alpha in every coordinate.
double kl_fully_dependent(double alpha);

}  // namespace bgi
