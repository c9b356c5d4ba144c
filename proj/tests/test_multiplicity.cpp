#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "excl/multiplicity.hpp"
#include "excl/stats.hpp"

using namespace excl;

namespace {
AlterationSet s(std::initializer_list<int> members) { return AlterationSet(members); }
}  // namespace

TEST_CASE("set_weight") {
  SUBCASE("k_max = 2 gives weight 1 to every pair") {
    WeightScheme scheme(100, 2, 0.05);
    CHECK(scheme.set_weight(2) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("average-1 identity by direct summation (m=6, k_max=4)") {
    WeightScheme scheme(6, 4, 0.05);
    double weighted = 0, count = 0;
    for (int l = 2; l <= 4; ++l) {
      const double c = std::exp(log_binom(6, l));
      weighted += c * scheme.set_weight(l);
      count += c;
    }
    CHECK(weighted == doctest::Approx(count).epsilon(1e-10));
  }
  SUBCASE("telescoping ratio w(size+1)/w(size)") {
    const int m = 40;
    WeightScheme scheme(m, 6, 0.07);
    for (int size = 2; size < 6; ++size) {
      const double expected = 1 - std::pow(1 - 0.07, 1.0 / (m - size));
      CHECK(scheme.set_weight(size + 1) / scheme.set_weight(size) ==
            doctest::Approx(expected).epsilon(1e-10));
    }
  }
  SUBCASE("weights strictly decrease in size") {
    WeightScheme scheme(50, 8, 0.05);
    for (int size = 2; size < 8; ++size)
      CHECK(scheme.set_weight(size + 1) < scheme.set_weight(size));
  }
  CHECK_THROWS_AS(WeightScheme(100, 5, 0.05).set_weight(1), std::invalid_argument);
  CHECK_THROWS_AS(WeightScheme(100, 5, 0.05).set_weight(6), std::invalid_argument);
}

TEST_CASE("correction_factor reference values (m=1418, alpha=0.05)") {
  struct Entry {
    int k_max, size;
    double value;
  };
  const Entry table[] = {
      {2, 2, 1.004653e6},  {3, 2, 1.021830e6},  {4, 2, 1.022050e6},
      {5, 2, 1.022053e6},  {3, 3, 2.820910e10}, {4, 3, 2.821518e10},
      {5, 3, 2.821524e10}, {4, 4, 7.783707e14}, {5, 4, 7.783725e14},
      {5, 5, 2.145775e19},
  };
  for (const auto& e : table) {
    WeightScheme scheme(1418, e.k_max, 0.05);
    CHECK(scheme.correction_factor(e.size) ==
          doctest::Approx(e.value).epsilon(1e-6));
  }
  SUBCASE("k_max = 2 pair factor is exactly C(m,2)") {
    WeightScheme scheme(137, 2, 0.05);
    CHECK(scheme.correction_factor(2) == doctest::Approx(137.0 * 136 / 2).epsilon(1e-12));
  }
  SUBCASE("monotone in size and k_max") {
    WeightScheme s5(200, 5, 0.05);
    for (int size = 2; size < 5; ++size)
      CHECK(s5.correction_factor(size + 1) > s5.correction_factor(size));
    WeightScheme s8(200, 8, 0.05);
    CHECK(s8.correction_factor(2) >= s5.correction_factor(2));
  }
  SUBCASE("k_max up to m evaluates without overflow") {
    WeightScheme scheme(300, 300, 0.05);
    CHECK(std::isfinite(scheme.log_correction_factor(2)));
    CHECK(scheme.correction_factor(2) > std::exp(log_binom(300, 2)));
  }
}

TEST_CASE("correction_factor_approx") {
  CHECK(correction_factor_approx(1418, 0.05, 2) ==
        doctest::Approx(1.022053e6).epsilon(1e-3));
  SUBCASE("approx/exact ratio approaches 1 for large k_max") {
    for (int m : {50, 200}) {
      WeightScheme scheme(m, std::min(m, 20), 0.01);
      for (int size = 2; size <= 4; ++size)
        CHECK(correction_factor_approx(m, 0.01, size) /
                  scheme.correction_factor(size) ==
              doctest::Approx(1.0).epsilon(0.02));
    }
  }
  SUBCASE("alpha -> 0 limit for pairs approaches C(m,2)") {
    // (e^a - 1 - a) ~ a^2/2 * (1 + a/3), so the pair factor tends to C(m,2)
    CHECK(correction_factor_approx(100, 1e-3, 2) ==
          doctest::Approx(std::exp(log_binom(100, 2))).epsilon(1e-3));
  }
}

TEST_CASE("weighted_bonferroni") {
  WeightScheme scheme(1418, 10, 0.05);
  SUBCASE("extreme p-values stay finite in log space") {
    auto out = weighted_bonferroni({{s({0, 1, 2, 3, 4}), 1.22e-53}}, scheme, 0.05);
    REQUIRE(out.size() == 1);
    // k_max >= 5 factor is stable near 2.145775e19
    CHECK(out[0].p_adjusted == doctest::Approx(1.22e-53 * 2.145775e19).epsilon(1e-4));
    CHECK(out[0].significant);
  }
  SUBCASE("p_raw of zero stays zero") {
    auto out = weighted_bonferroni({{s({0, 1}), 0.0}}, scheme, 0.05);
    CHECK(out[0].p_adjusted == 0);
    CHECK(out[0].significant);
  }
  SUBCASE("empty input") {
    CHECK(weighted_bonferroni({}, scheme, 0.05).empty());
  }
}

TEST_CASE("weighted_bh") {
  WeightScheme uniform(100, 2, 0.05);  // all weights 1: classical BH
  SUBCASE("hand-executed step-up on five p-values") {
    std::vector<std::pair<AlterationSet, double>> results = {
        {s({0, 1}), 0.01}, {s({0, 2}), 0.02}, {s({0, 3}), 0.04},
        {s({0, 4}), 0.2},  {s({0, 5}), 0.9}};
    auto reject = weighted_bh(results, uniform, 0.05);
    // thresholds i*0.05/5: 0.01, 0.02, 0.03, 0.04, 0.05; step-up stops at rank 2
    CHECK(reject == std::vector<bool>{true, true, false, false, false});
  }
  SUBCASE("all zero p-values are all rejected") {
    std::vector<std::pair<AlterationSet, double>> results = {
        {s({0, 1}), 0.0}, {s({0, 2}), 0.0}, {s({1, 2}), 0.0}};
    auto reject = weighted_bh(results, uniform, 0.05);
    CHECK(reject == std::vector<bool>{true, true, true});
  }
  SUBCASE("single hypothesis rejects iff p/w <= level") {
    WeightScheme scheme(30, 4, 0.05);
    const double w = scheme.set_weight(2);
    auto yes = weighted_bh({{s({0, 1}), 0.9 * w * 0.05}}, scheme, 0.05);
    auto no = weighted_bh({{s({0, 1}), 1.1 * w * 0.05}}, scheme, 0.05);
    CHECK(yes == std::vector<bool>{true});
    CHECK(no == std::vector<bool>{false});
  }
}

TEST_CASE("average-1 identity for randomized parameters") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 5 + static_cast<int>(rng() % 20);
    const int k_max = 2 + static_cast<int>(rng() % (m - 1));
    const double alpha = 0.01 + 0.4 * (rng() % 1000) / 1000.0;
    WeightScheme scheme(m, k_max, alpha);
    double weighted = 0, count = 0;
    for (int l = 2; l <= k_max; ++l) {
      const double c = std::exp(log_binom(m, l));
      weighted += c * scheme.set_weight(l);
      count += c;
    }
    CHECK(weighted / count == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("prune_nested") {
  auto make = [](AlterationSet set, double adj) {
    AdjustedResult r;
    r.set = std::move(set);
    r.p_adjusted = adj;
    r.log_p_adjusted = std::log(adj);
    r.significant = true;
    return r;
  };
  SUBCASE("subset dominates superset") {
    auto kept = prune_nested({make(s({0, 1}), 1e-10), make(s({0, 1, 2}), 1e-8)});
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].set == s({0, 1}));
  }
  SUBCASE("disjoint sets all survive") {
    auto kept = prune_nested({make(s({0, 1}), 1e-4), make(s({2, 3}), 1e-6)});
    CHECK(kept.size() == 2);
  }
  SUBCASE("chain keeps only the middle") {
    auto kept = prune_nested({make(s({0, 1}), 1e-6), make(s({0, 1, 2}), 1e-9),
                              make(s({0, 1, 2, 3}), 1e-7)});
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].set == s({0, 1, 2}));
  }
  SUBCASE("tie keeps the smaller set") {
    auto kept = prune_nested({make(s({0, 1}), 1e-5), make(s({0, 1, 2}), 1e-5)});
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].set == s({0, 1}));
  }
}
