#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "excl/oracle.hpp"
#include "excl/pipeline.hpp"
#include "test_util.hpp"

using namespace excl;
using excl::test::make_matrix;

namespace {

AlterationMatrix planted_triple_matrix() {
  // rows 0-2 tile the 60 samples exactly; 5 background rows with coverage 20
  const int n = 60;
  std::vector<std::string> rows;
  for (int r = 0; r < 3; ++r) {
    std::string s(n, '0');
    for (int j = 20 * r; j < 20 * (r + 1); ++j) s[j] = '1';
    rows.push_back(s);
  }
  std::mt19937 rng(12345);
  for (int r = 0; r < 5; ++r) {
    std::string s(n, '0');
    std::vector<int> idx(n);
    for (int j = 0; j < n; ++j) idx[j] = j;
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int t = 0; t < 20; ++t) s[idx[t]] = '1';
    rows.push_back(s);
  }
  return make_matrix(rows);
}

RunConfig small_config() {
  RunConfig cfg;
  cfg.k_max = 3;
  cfg.max_iter = 50;
  cfg.seed = 1;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines_with(const std::string& text, const std::string& needle) {
  int count = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.find(needle) != std::string::npos) ++count;
  return count;
}

}  // namespace

TEST_CASE("run_on_matrix recovers a planted exclusive triple") {
  auto mat = planted_triple_matrix();
  auto report = run_on_matrix(mat, small_config());
  REQUIRE_FALSE(report.significant.empty());
  const AlterationSet triple = {0, 1, 2};
  const bool found = std::any_of(
      report.significant.begin(), report.significant.end(),
      [&](const ReportedSet& rs) { return rs.set == triple; });
  CHECK(found);
  // pruning removed the contained pairs
  for (const auto& rs : report.significant)
    if (rs.set != triple) CHECK_FALSE(is_subset(rs.set, triple));
  // ascending adjusted p
  for (std::size_t r = 1; r < report.significant.size(); ++r)
    CHECK(report.significant[r - 1].log_p_adjusted <=
          report.significant[r].log_p_adjusted);
  CHECK(report.m_input == 8);
  CHECK(report.m_tested == 8);
}

TEST_CASE("run_on_matrix is reproducible for a fixed seed") {
  auto mat = planted_triple_matrix();
  auto a = run_on_matrix(mat, small_config());
  auto b = run_on_matrix(mat, small_config());
  REQUIRE(a.scored.size() == b.scored.size());
  for (std::size_t i = 0; i < a.scored.size(); ++i) {
    CHECK(a.scored[i].set == b.scored[i].set);
    CHECK(a.scored[i].p_raw == b.scored[i].p_raw);
    CHECK(a.scored[i].significant == b.scored[i].significant);
  }
}

TEST_CASE("pairwise baseline scores every pair with a plain denominator") {
  auto mat = planted_triple_matrix();
  auto cfg = small_config();
  cfg.pairwise_baseline = true;
  auto report = run_on_matrix(mat, cfg);
  CHECK(report.scored.size() == 8 * 7 / 2);
  for (const auto& r : report.scored) {
    CHECK(r.set.size() == 2);
    if (r.p_raw > 0)
      CHECK(r.p_adjusted == doctest::Approx(r.p_raw * 28).epsilon(1e-12));
  }
}

TEST_CASE("set_pvalue modes") {
  auto mat = planted_triple_matrix();
  const AlterationSet pair = {0, 1};
  const double mid = set_pvalue(mat, pair, false, 0);
  const double rand1 = set_pvalue(mat, pair, true, 7);
  const double rand2 = set_pvalue(mat, pair, true, 7);
  CHECK(rand1 == rand2);
  CHECK(mid > 0);
  CHECK(mid < 1);
  SUBCASE("set within one gene is non-informative") {
    // fused to a single pseudo-member: point-mass test, mid-p exactly 1/2
    auto fused = make_matrix({"1100", "0011"}, {}, {"TP53(A)", "TP53(D)"});
    CHECK(set_pvalue(fused, {0, 1}, false, 0) == doctest::Approx(0.5));
  }
}

TEST_CASE("p-values are invariant to row and column presentation order") {
  const std::vector<std::string> rows = {"110100101100", "001010010010",
                                         "010001100001"};
  auto mat = make_matrix(rows);
  // reverse every row string: a pure column permutation
  std::vector<std::string> rev = rows;
  for (auto& s : rev) std::reverse(s.begin(), s.end());
  auto col_perm = make_matrix(rev);
  // reverse the row order
  std::vector<std::string> flipped(rows.rbegin(), rows.rend());
  auto row_perm = make_matrix(flipped);

  const double base = set_pvalue(mat, {0, 1, 2}, false, 0);
  CHECK(set_pvalue(col_perm, {0, 1, 2}, false, 0) == doctest::Approx(base).epsilon(1e-12));
  CHECK(set_pvalue(row_perm, {0, 1, 2}, false, 0) == doctest::Approx(base).epsilon(1e-12));
  CHECK(set_pvalue(row_perm, {2, 1, 0}, false, 0) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("simulate_null") {
  NullSpec spec;
  spec.groups = {{"A", 10}, {"B", 15}};
  spec.margins = {{3, 7}, {0, 15}, {10, 0}};
  auto mat = simulate_null(spec, 42);
  CHECK(mat.sample_count() == 25);
  REQUIRE(mat.row_count() == 3);
  CHECK(mat.row_coverage(0, mat.group_index("A")) == 3);
  CHECK(mat.row_coverage(0, mat.group_index("B")) == 7);
  CHECK(mat.row_coverage(1) == 15);
  CHECK(mat.row_coverage(2) == 10);

  SUBCASE("deterministic per seed") {
    auto again = simulate_null(spec, 42);
    for (int i = 0; i < 3; ++i) CHECK(mat.row_bits(i) == again.row_bits(i));
    auto other = simulate_null(spec, 43);
    bool all_same = true;
    for (int i = 0; i < 3; ++i)
      if (!(mat.row_bits(i) == other.row_bits(i))) all_same = false;
    CHECK_FALSE(all_same);
  }
  SUBCASE("infeasible margin throws") {
    spec.margins = {{11, 0}};
    CHECK_THROWS_AS(simulate_null(spec, 0), DataError);
  }
  SUBCASE("no groups throws") {
    CHECK_THROWS_AS(simulate_null(NullSpec{}, 0), DataError);
  }
}

TEST_CASE("matrix TSV round trip") {
  NullSpec spec;
  spec.groups = {{"A", 6}, {"B", 6}};
  spec.margins = {{2, 3}, {4, 1}, {3, 3}};
  auto mat = simulate_null(spec, 9);
  const std::string dir = "/tmp/excl_test_roundtrip";
  std::filesystem::create_directories(dir);
  write_matrix_tsv(mat, dir + "/matrix.tsv");
  write_groups_tsv(mat, dir + "/groups.tsv");
  auto back = load_matrix(dir + "/matrix.tsv", dir + "/groups.tsv");
  REQUIRE(back.row_count() == 3);
  REQUIRE(back.sample_count() == 12);
  for (int i = 0; i < 3; ++i)
    for (int g = 0; g < 2; ++g)
      CHECK(back.row_coverage(i, g) == mat.row_coverage(i, g));
  CHECK(back.coverage({0, 1, 2}) == mat.coverage({0, 1, 2}));
  std::filesystem::remove_all(dir);
}

TEST_CASE("export_report file formats") {
  const std::string dir = "/tmp/excl_test_export";
  std::filesystem::remove_all(dir);

  SUBCASE("empty report writes a header-only table and an empty graph") {
    ResultReport report;
    auto mat = make_matrix({"10", "01"});
    export_report(report, mat, dir);
    CHECK(slurp(dir + "/results.tsv") ==
          "rank\tcoverage_fraction\tp_raw\tp_adjusted\tmembers\n");
    const std::string gml = slurp(dir + "/graph.gml");
    CHECK(count_lines_with(gml, "node [") == 0);
    CHECK(count_lines_with(gml, "edge [") == 0);
    CHECK(gml.find("graph [") == 0);
  }
  SUBCASE("a significant pair yields two nodes and one edge") {
    auto mat = make_matrix({"1100", "0011"}, {}, {"KRAS", "TP53"});
    ResultReport report;
    ReportedSet rs;
    rs.set = {0, 1};
    rs.labels = {"KRAS", "TP53"};
    rs.coverage_fraction = 1.0;
    rs.p_raw = 0.0123;
    rs.p_adjusted = 0.0456;
    report.significant.push_back(rs);
    export_report(report, mat, dir);

    const std::string tsv = slurp(dir + "/results.tsv");
    CHECK(count_lines_with(tsv, "KRAS, TP53") == 1);
    CHECK(tsv.find("100.0%") != std::string::npos);
    CHECK(tsv.find("1.230000e-02") != std::string::npos);
    CHECK(tsv.find("4.560000e-02") != std::string::npos);

    const std::string gml = slurp(dir + "/graph.gml");
    CHECK(count_lines_with(gml, "node [") == 2);
    CHECK(count_lines_with(gml, "edge [") == 1);
    CHECK(gml.find("label \"KRAS\"") != std::string::npos);

    const std::string meta = slurp(dir + "/run_metadata.txt");
    for (const char* key : {"version", "kmax", "seed", "correction", "significant_sets"})
      CHECK(meta.find(key) != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("run propagates input errors as DataError") {
  RunConfig cfg;
  cfg.matrix_path = "/tmp/excl_test_does_not_exist.tsv";
  cfg.groups_path = "/tmp/excl_test_does_not_exist_either.tsv";
  CHECK_THROWS_AS(run(cfg), DataError);

  SUBCASE("bad parameters are rejected before any work") {
    auto mat = make_matrix({"10", "01"});
    RunConfig bad;
    bad.k_max = 1;
    CHECK_THROWS_AS(run_on_matrix(mat, bad), DataError);
    bad = RunConfig{};
    bad.level = 0;
    CHECK_THROWS_AS(run_on_matrix(mat, bad), DataError);
  }
}

TEST_CASE("BH correction can only widen the Bonferroni rejection set") {
  auto mat = planted_triple_matrix();
  auto cfg = small_config();
  auto bonf = run_on_matrix(mat, cfg);
  cfg.correction = CorrectionMethod::BH;
  auto bh = run_on_matrix(mat, cfg);
  REQUIRE(bonf.scored.size() == bh.scored.size());
  for (std::size_t i = 0; i < bonf.scored.size(); ++i) {
    REQUIRE(bonf.scored[i].set == bh.scored[i].set);
    if (bonf.scored[i].significant) CHECK(bh.scored[i].significant);
  }
}
