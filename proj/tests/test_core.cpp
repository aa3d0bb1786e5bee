#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "bgi/bounds.hpp"
#include "bgi/core.hpp"
#include "bgi/errors.hpp"

using namespace bgi;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// Smallest alpha on a 1e-6 grid after which (v + alpha) is no longer strictly
// dominated by u.
double m_gap_grid(const RewardVector& v, const RewardVector& u) {
  for (long k = 0; k <= 2'000'000; ++k) {
    const double a = static_cast<double>(k) * 1e-6;
    bool strictly = true;
    for (std::size_t d = 0; d < v.size(); ++d) strictly = strictly && v[d] + a < u[d];
    if (!strictly) return a;
  }
  return kInf;
}

// Smallest beta on a 1e-6 grid with v <= u + beta.
double big_m_grid(const RewardVector& v, const RewardVector& u, double alpha) {
  for (long k = 0; k <= 2'000'000; ++k) {
    const double b = static_cast<double>(k) * 1e-6;
    bool weak = true;
    for (std::size_t d = 0; d < v.size(); ++d) weak = weak && v[d] + alpha <= u[d] + b + 1e-12;
    if (weak) return b;
  }
  return kInf;
}

ArmMeansTensor random_tensor(std::mt19937_64& gen, std::size_t n, std::size_t k, std::size_t d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> flat(n * k * d);
  for (double& x : flat) x = u(gen);
  return ArmMeansTensor(n, k, d, std::move(flat));
}

ArmMeansTensor hard_default_tensor() {
  // Efficiency rows (0.9,0.7,0.7), (0.7,0.9,0.7), (0.3,0.3,0.1) x2, one arm
  // per group reaching the row and a second arm below it.
  std::vector<double> flat = {0.9, 0.7, 0.7, 0.5, 0.6, 0.2,  //
                              0.7, 0.9, 0.7, 0.6, 0.5, 0.1,  //
                              0.3, 0.3, 0.1, 0.2, 0.1, 0.0,  //
                              0.3, 0.3, 0.1, 0.1, 0.2, 0.05};
  return ArmMeansTensor(4, 2, 3, std::move(flat));
}

}  // namespace

TEST_CASE("tensor validates shape and range") {
  CHECK_THROWS_AS(ArmMeansTensor(2, 2, 2, std::vector<double>(7, 0.5)), DimensionError);
  CHECK_THROWS_AS(ArmMeansTensor(1, 1, 2, {0.5, 1.5}), ArgumentError);
  CHECK_THROWS_AS(ArmMeansTensor(0, 1, 1, {}), DimensionError);
  const ArmMeansTensor t(1, 2, 2, {0.2, 0.9, 0.8, 0.1});
  CHECK(t.at(0, 1, 0) == 0.8);
  CHECK(t.arm(0, 0)[1] == 0.9);
}

TEST_CASE("dominance relations") {
  CHECK(dominance(RewardVector{0.5, 0.5}, RewardVector{0.5, 0.5}) == Dominance::weak);
  CHECK(dominance(RewardVector{0.1, 0.2}, RewardVector{0.3, 0.5}) == Dominance::strict);
  CHECK(dominance(RewardVector{0.5, 0.1}, RewardVector{0.3, 0.9}) == Dominance::none);
  CHECK(dominance(RewardVector{0.3, 0.1}, RewardVector{0.3, 0.9}) == Dominance::strict_partial);
  CHECK_THROWS_AS(dominance(RewardVector{0.1}, RewardVector{0.1, 0.2}), DimensionError);
}

TEST_CASE("m and M operators on the documented pairs") {
  CHECK(m_gap(RewardVector{0.4, 0.4}, RewardVector{0.4, 0.4}) == 0.0);
  CHECK(m_gap(RewardVector{0.1, 0.2}, RewardVector{0.3, 0.5}) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(m_gap(RewardVector{0.5, 0.1}, RewardVector{0.3, 0.9}) == 0.0);
  CHECK(big_m_gap(RewardVector{0.3, 0.3}, RewardVector{0.3, 0.3}, 0.0) == 0.0);
  CHECK(big_m_gap(RewardVector{0.6, 0.2}, RewardVector{0.5, 0.4}, 0.0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(big_m_gap(RewardVector{0.4, 0.4}, RewardVector{0.5, 0.5}, 0.1) == 0.0);
  CHECK_THROWS_AS(big_m_gap(RewardVector{0.4}, RewardVector{0.5}, -0.1), ArgumentError);
  CHECK_THROWS_AS(m_gap(RewardVector{0.4}, RewardVector{0.5, 0.1}), DimensionError);
}

TEST_CASE("m and M operators agree with a 1e-6 grid oracle") {
  CHECK(m_gap_grid({0.1, 0.2}, {0.3, 0.5}) == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(big_m_grid({0.6, 0.2}, {0.5, 0.4}, 0.0) == doctest::Approx(0.1).epsilon(1e-9));
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> cent(0, 100);
  for (int trial = 0; trial < 25; ++trial) {
    // Two-decimal vectors so the grid hits the exact answer.
    RewardVector v(3), u(3);
    for (auto& x : v) x = cent(gen) / 100.0;
    for (auto& x : u) x = cent(gen) / 100.0;
    CHECK(m_gap(v, u) == doctest::Approx(m_gap_grid(v, u)).epsilon(2e-6));
    CHECK(big_m_gap(v, u, 0.0) == doctest::Approx(big_m_grid(v, u, 0.0)).epsilon(2e-6));
  }
}

TEST_CASE("operator properties on random pairs and triples") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 3);
  auto draw = [&](std::size_t d) {
    RewardVector r(d);
    // Some coordinates on a coarse grid to produce ties.
    for (auto& x : r) x = coin(gen) == 0 ? std::round(u01(gen) * 4) / 4 : u01(gen);
    return r;
  };
  for (int k = 0; k < 10000; ++k) {
    const RewardVector v = draw(3), u = draw(3), s = draw(3);
    CHECK((m_gap(v, u) == 0.0) == (dominance(v, u) != Dominance::strict));
    bool leq = true;
    for (std::size_t d = 0; d < 3; ++d) leq = leq && v[d] <= u[d];
    CHECK((big_m_gap(v, u) == 0.0) == leq);
    CHECK(big_m_gap(u, s) <= big_m_gap(u, v) + big_m_gap(v, s) + 1e-15);
  }
}

TEST_CASE("efficiency") {
  const ArmMeansTensor one(1, 1, 2, {0.3, 0.4});
  CHECK(efficiency(one)[0] == RewardVector{0.3, 0.4});
  const ArmMeansTensor two(1, 2, 2, {0.2, 0.9, 0.8, 0.1});
  CHECK(efficiency(two)[0] == RewardVector{0.8, 0.9});
  std::mt19937_64 gen(3);
  const ArmMeansTensor t = random_tensor(gen, 3, 4, 2);
  const EfficiencyMatrix r = efficiency(t);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t d = 0; d < 2; ++d) {
      double best = -1.0;
      for (std::size_t j = 0; j < 4; ++j) best = t.at(i, j, d) > best ? t.at(i, j, d) : best;
      CHECK(r[i][d] == best);
    }
  }
  const ArmMeansTensor ties(1, 3, 1, {0.5, 0.7, 0.7});
  CHECK(best_arm_in_dim(ties, 0, 0) == 1);
}

TEST_CASE("pareto set examples") {
  CHECK(pareto_set({{0.2, 0.2}}) == GroupSet{0});
  CHECK(pareto_set({{0.9, 0.7}, {0.7, 0.9}}) == GroupSet{0, 1});
  CHECK(pareto_set(efficiency(hard_default_tensor()), 0.05) == GroupSet{0, 1});
  CHECK_THROWS_AS(pareto_set({{0.2}}, -0.1), ArgumentError);
}

TEST_CASE("pareto set matches the brute-force scan and grows with epsilon") {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<std::size_t> nd(1, 20), dd(1, 6);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const std::size_t n = nd(gen), d = dd(gen);
    EfficiencyMatrix r(n, RewardVector(d));
    for (auto& row : r)
      for (auto& x : row) x = std::round(u01(gen) * 20) / 20;
    const double eps = u01(gen) * 0.1;
    CHECK(pareto_set(r, 0.0) == brute_pareto(r, 0.0));
    CHECK(pareto_set(r, eps) == brute_pareto(r, eps));
    const GroupSet exact = pareto_set(r, 0.0), relaxed = pareto_set(r, eps);
    CHECK(!exact.empty());
    CHECK(std::includes(relaxed.begin(), relaxed.end(), exact.begin(), exact.end()));
  }
}

TEST_CASE("gpsi gaps on the lower-bound instance") {
  const GpsiGapReport g = gpsi_gaps(hard_default_tensor(), 0.05);
  CHECK(g.pareto_set == GroupSet{0, 1});
  CHECK(g.group_gaps[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(g.group_gaps[1] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(g.group_gaps[2] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(g.group_gaps[3] == doctest::Approx(0.4).epsilon(1e-12));
  for (std::size_t i : g.pareto_set) {
    CHECK(g.group_gaps[i] == std::min(g.plus_gaps.at(i), g.minus_gaps.at(i)));
  }
  // Arm (1,2) = (0.5,0.6,0.2) against R_1 = (0.9,0.7,0.7).
  CHECK(g.arm_gaps[0][1] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(g.arm_gaps[0][0] == 0.0);
  for (const auto& row : g.effective_gaps)
    for (double x : row) CHECK(x >= 0.05);
  CHECK_THROWS_AS(gpsi_gaps(hard_default_tensor(), 0.0), ArgumentError);
}

TEST_CASE("gpsi gaps of a single group are infinite") {
  const GpsiGapReport g = gpsi_gaps(ArmMeansTensor(1, 2, 2, {0.1, 0.2, 0.3, 0.1}), 0.01);
  CHECK(std::isinf(g.group_gaps[0]));
  CHECK(std::isinf(g.plus_gaps.at(0)));
  CHECK(std::isinf(g.minus_gaps.at(0)));
  CHECK(std::isinf(g.effective_gaps[0][0]));
}

TEST_CASE("non-optimal gpsi gaps match the bisection oracle") {
  std::mt19937_64 gen(23);
  int checked = 0;
  for (int k = 0; k < 300; ++k) {
    const ArmMeansTensor t = random_tensor(gen, 3, 2, 2);
    const GpsiGapReport g = gpsi_gaps(t, 0.01);
    const EfficiencyMatrix r = efficiency(t);
    for (std::size_t i = 0; i < 3; ++i) {
      if (std::binary_search(g.pareto_set.begin(), g.pareto_set.end(), i)) continue;
      CHECK(g.group_gaps[i] == doctest::Approx(pareto_gap_by_bisection(r, i, 1e-12)).epsilon(1e-9));
      ++checked;
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("lbgi gaps on the two-group example") {
  // Group 1 reaches (0.9,0.5); group 2 reaches (0.6,0.6) and holds the arm
  // (0.6,0.4).
  const ArmMeansTensor t(2, 2, 2, {0.9, 0.5, 0.2, 0.2, 0.6, 0.4, 0.1, 0.6});
  const std::vector<double> w{1.0, 1.0};
  const LbgiGapReport g = lbgi_gaps(t, w);
  CHECK(g.best_group == 0);
  CHECK(g.group_gaps[1] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(g.group_gaps[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(g.arm_alphas[1][0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(g.arm_alphas[1][0] == doctest::Approx(arm_alpha_by_bisection(t, 1, 0, w, 1e-13)).epsilon(1e-9));
  CHECK(g.arm_alphas[0][0] == 0.0);
  for (std::size_t j = 0; j < 2; ++j) CHECK(g.arm_gaps[1][j] >= g.group_gaps[1]);
}

TEST_CASE("lbgi gaps reject ties and bad weights") {
  const ArmMeansTensor t(2, 1, 2, {0.6, 0.4, 0.4, 0.6});
  CHECK_THROWS_AS(lbgi_gaps(t, std::vector<double>{1.0, 1.0}), NonUniqueOptimumError);
  CHECK_THROWS_AS(lbgi_gaps(t, std::vector<double>{1.0, 0.0}), ArgumentError);
  CHECK_THROWS_AS(lbgi_gaps(t, std::vector<double>{1.0}), DimensionError);
}

TEST_CASE("lbgi arm alphas and refined gaps on random instances") {
  std::mt19937_64 gen(29);
  std::uniform_real_distribution<double> wd(0.1, 3.0);
  for (int k = 0; k < 200; ++k) {
    const ArmMeansTensor t = random_tensor(gen, 3, 3, 3);
    std::vector<double> w(3);
    for (auto& x : w) x = wd(gen);
    const LbgiGapReport g = lbgi_gaps(t, w);
    double min_other = kInf;
    for (std::size_t i = 0; i < 3; ++i)
      if (i != g.best_group) min_other = std::min(min_other, g.group_gaps[i]);
    CHECK(g.group_gaps[g.best_group] == min_other);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        if (i != g.best_group) {
          CHECK(g.arm_alphas[i][j] == doctest::Approx(arm_alpha_by_bisection(t, i, j, w, 1e-13)).epsilon(1e-9));
          CHECK(g.arm_gaps[i][j] == g.arm_alphas[i][j]);
          CHECK(g.arm_alphas[i][j] >= g.group_gaps[i] - 1e-12);
        }
        CHECK(g.refined_arm_gaps[i][j] >= g.arm_gaps[i][j] / 3.0 - 1e-12);
      }
    }
  }
}

TEST_CASE("beta values and monotonicity") {
  // Reference: 30-digit evaluation of sqrt(2 ln(4*75/0.01)).
  CHECK(beta(1, 0.01, {5, 5, 3}) == doctest::Approx(4.54069436554461181837745426834).epsilon(1e-14));
  CHECK(beta(1, 0.01, {5, 5, 3}, 2.0) == doctest::Approx(2 * 4.54069436554461181837745426834).epsilon(1e-14));
  double prev = beta(1, 0.1, {2, 2, 2});
  for (std::uint64_t r = 2; r <= 1'000'000; ++r) {
    const double b = beta(r, 0.1, {2, 2, 2});
    if (!(b < prev)) FAIL("beta not decreasing at r=" << r);
    prev = b;
  }
  CHECK(beta(10, 0.1, {3, 2, 2}) > beta(10, 0.1, {2, 2, 2}));
  CHECK(beta(10, 0.1, {2, 3, 2}) > beta(10, 0.1, {2, 2, 2}));
  CHECK(beta(10, 0.1, {2, 2, 3}) > beta(10, 0.1, {2, 2, 2}));
  const double gap = 0.3;
  const auto r = static_cast<std::uint64_t>(std::ceil(30 * std::log(8 / (0.1 * gap)) / (gap * gap)));
  CHECK(beta(r, 0.1, {2, 2, 2}) < gap);
  CHECK_THROWS_AS(beta(1, 1.0, {1, 1, 1}), ArgumentError);
  CHECK_THROWS_AS(beta(0, 0.1, {1, 1, 1}), ArgumentError);
}
