#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "bgi/core.hpp"
#include "bgi/environment.hpp"
#include "bgi/errors.hpp"
#include "bgi/triple_elimination.hpp"

using namespace bgi;

namespace {

Instance noiseless_hard(std::uint64_t seed = 6) {
  RngStream rng(seed, 0);
  Instance inst = gen_hard_gpsi(4, 3, 3, 0.05, {}, rng);
  inst.noise.scale = 0.0;
  return inst;
}

TeConfig config(double delta, double epsilon) {
  TeConfig c;
  c.delta = delta;
  c.epsilon = epsilon;
  return c;
}

bool subset(const GroupSet& a, const GroupSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

}  // namespace

TEST_CASE("a single group is accepted in round one") {
  const Instance inst{ArmMeansTensor(1, 4, 2, std::vector<double>(8, 0.5)), {}, "one"};
  RngStream rng(1, 1);
  const GpsiResult r = run_te(inst, config(0.1, 0.05), rng);
  CHECK(r.recommended == GroupSet{0});
  CHECK(r.rounds == 1);
  CHECK(r.total_pulls == 4);
}

TEST_CASE("noiseless lower-bound instance gives the exact pareto set") {
  for (std::uint64_t seed : {1u, 2u, 3u, 6u}) {
    const Instance inst = noiseless_hard(seed);
    RngStream rng(seed, 9);
    const GpsiResult r = run_te(inst, config(0.1, 0.05), rng);
    CHECK(r.recommended == pareto_set(efficiency(inst.tensor), 0.0));
    CHECK(r.recommended == GroupSet{0, 1});
  }
}

TEST_CASE("result accounting") {
  const Instance inst = noiseless_hard();
  RngStream rng(2, 2);
  const GpsiResult r = run_te(inst, config(0.1, 0.05), rng);
  std::uint64_t sum = 0;
  for (const auto& row : r.per_arm_pulls)
    for (auto p : row) sum += p;
  CHECK(sum == r.total_pulls);
  CHECK(!r.recommended.empty());
  CHECK(r.final_estimates.size() == 4);
}

TEST_CASE("invariants hold every round on noiseless and noisy runs") {
  for (double scale : {0.0, 1.0}) {
    RngStream gen(31, 0);
    Instance inst = gen_random_gpsi(4, 3, 3, 2, 0.05, gen);
    inst.noise.scale = scale;
    const ArmMeansTensor* truth = scale == 0.0 ? &inst.tensor : nullptr;

    TeConfig c = config(0.1, 0.05);
    std::vector<bool> prev_groups, prev_dims, prev_arms;
    GroupSet prev_accepted;
    std::vector<std::optional<double>> first_frozen(inst.tensor.n_groups() * inst.tensor.n_dims());
    int rounds_seen = 0;
    c.observer = [&](const TeState& s) {
      te_round_invariant_check(s, truth);
      if (!prev_groups.empty()) {
        for (std::size_t k = 0; k < s.active_groups.size(); ++k) CHECK_UNARY(!(s.active_groups[k] && !prev_groups[k]));
        for (std::size_t k = 0; k < s.active_dims.size(); ++k) CHECK_UNARY(!(s.active_dims[k] && !prev_dims[k]));
        for (std::size_t k = 0; k < s.active_arms.size(); ++k) CHECK_UNARY(!(s.active_arms[k] && !prev_arms[k]));
        CHECK(subset(prev_accepted, s.accepted));
      }
      // Frozen values never move once set.
      for (std::size_t i = 0; i < s.n_groups; ++i) {
        if (!s.active_groups[i]) continue;
        const RewardVector est = s.efficiency_estimate(i);
        for (std::size_t d = 0; d < s.n_dims; ++d) {
          auto& slot = first_frozen[i * s.n_dims + d];
          if (s.frozen_values[i * s.n_dims + d]) {
            if (!slot) slot = *s.frozen_values[i * s.n_dims + d];
            CHECK(est[d] == *slot);
          }
        }
      }
      prev_groups = s.active_groups;
      prev_dims = s.active_dims;
      prev_arms = s.active_arms;
      prev_accepted = s.accepted;
      ++rounds_seen;
    };
    RngStream rng(4, 4);
    const GpsiResult r = run_te(inst, c, rng);
    CHECK(rounds_seen == static_cast<int>(r.rounds));
  }
}

TEST_CASE("noiseless runs stop by the first round with beta below epsilon / 4") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RngStream gen(seed, 0);
    Instance inst = gen_random_gpsi(3, 3, 2, 1, 0.05, gen);
    inst.noise.scale = 0.0;
    const double eps = 0.05;
    const ConfidenceSize size{3, 3, 2};
    std::uint64_t limit = 1;
    while (!(beta(limit, 0.1, size) < eps / 4)) ++limit;
    RngStream rng(seed, 1);
    const GpsiResult r = run_te(inst, config(0.1, eps), rng);
    CHECK(r.rounds <= limit);
    CHECK(r.recommended == pareto_set(efficiency(inst.tensor), 0.0));
  }
}

TEST_CASE("dimension resolution freezes values and is traced") {
  // Group 1 far above group 2 in dimension 1, close in dimension 2.
  const Instance inst{ArmMeansTensor(2, 2, 2, {0.95, 0.50, 0.10, 0.20, 0.05, 0.52, 0.02, 0.30}),
                      {NoiseKind::independent_gaussian, 0.0}, "resolve"};
  TeConfig c = config(0.1, 0.01);
  c.record_trace = true;
  RngStream rng(1, 1);
  const GpsiResult r = run_te(inst, c, rng);
  CHECK(r.recommended == GroupSet{0, 1});
  const bool resolved = std::any_of(r.trace.begin(), r.trace.end(), [](const TraceEvent& e) {
    return e.event == "resolve_dim" && e.payload.at("dim") == 1;
  });
  CHECK(resolved);
  for (const TraceEvent& e : r.trace) {
    const bool known = e.event == "reject_group" || e.event == "resolve_dim" || e.event == "eliminate_arm" ||
                       e.event == "accept_group";
    CHECK(known);
    CHECK(e.round >= 1);
  }
}

TEST_CASE("traces are identical for identical seeds") {
  RngStream gen(5, 0);
  const Instance inst = gen_random_gpsi(3, 2, 2, 1, 0.05, gen);
  TeConfig c = config(0.1, 0.05);
  c.record_trace = true;
  RngStream a(8, 1), b(8, 1);
  const GpsiResult x = run_te(inst, c, a), y = run_te(inst, c, b);
  CHECK(x.total_pulls == y.total_pulls);
  REQUIRE(x.trace.size() == y.trace.size());
  for (std::size_t k = 0; k < x.trace.size(); ++k) {
    CHECK(x.trace[k].round == y.trace[k].round);
    CHECK(x.trace[k].event == y.trace[k].event);
    CHECK(x.trace[k].payload == y.trace[k].payload);
  }
}

TEST_CASE("round budget exhaustion carries the partial state") {
  RngStream gen(5, 0);
  const Instance inst = gen_random_gpsi(3, 2, 2, 1, 0.05, gen);
  TeConfig c = config(0.1, 0.05);
  c.max_rounds = 3;
  RngStream rng(1, 1);
  try {
    run_te(inst, c, rng);
    FAIL("expected budget exhaustion");
  } catch (const BudgetExhaustedError& e) {
    CHECK(e.state().rounds == 3);
    CHECK(e.state().total_pulls > 0);
    CHECK(!e.state().active_groups.empty());
  }
}

TEST_CASE("invariant check reports a group both accepted and active") {
  TeState s = TeState::initial(2, 2, 2);
  CHECK_NOTHROW(te_round_invariant_check(s));
  s.accepted = {0};
  try {
    te_round_invariant_check(s);
    FAIL("expected a violation");
  } catch (const InvariantViolation& e) {
    CHECK(e.name() == "accepted_disjoint_active");
  }
}

TEST_CASE("invariant check reports broken pull accounting") {
  TeState s = TeState::initial(2, 2, 2);
  s.pulls[0] = 1;
  CHECK_THROWS_AS(te_round_invariant_check(s), InvariantViolation);
}

TEST_CASE("argument validation") {
  const Instance inst = noiseless_hard();
  RngStream rng(1, 1);
  CHECK_THROWS_AS(run_te(inst, config(0.0, 0.05), rng), ArgumentError);
  CHECK_THROWS_AS(run_te(inst, config(0.1, 0.0), rng), ArgumentError);
  TeConfig c = config(0.1, 0.05);
  c.beta_scale = 0.0;
  CHECK_THROWS_AS(run_te(inst, c, rng), ArgumentError);
}

TEST_CASE("seeded runs on small random instances are correct") {
  RngStream gen(2024, 0);
  const Instance inst = gen_random_gpsi(3, 2, 2, 1, 0.05, gen);
  const EfficiencyMatrix r = efficiency(inst.tensor);
  const GroupSet exact = pareto_set(r, 0.0), relaxed = pareto_set(r, 0.05);
  for (std::uint64_t s = 1; s <= 30; ++s) {
    RngStream rng(2024, s);
    const GpsiResult out = run_te(inst, config(0.1, 0.05), rng);
    CHECK(subset(exact, out.recommended));
    CHECK(subset(out.recommended, relaxed));
  }
}
