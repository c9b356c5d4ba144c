#include "excl/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <thread>

#include "excl/combine.hpp"
#include "excl/greedy.hpp"
#include "excl/stats.hpp"
#include "excl/union_test.hpp"

namespace excl {

namespace {

constexpr const char* kVersion = "0.1.0";

struct GroupTest {
  std::string label;
  PValueTriple triple;
  double weight = 0;
  double log_chain_bound_minus = kNegInf;  // lower bound on log p_minus
};

// Per-group evidence for one set, plus a cheap chain lower bound on each
// group's p_minus used to screen out hopeless candidates before running the
// full convolution.
std::vector<GroupTest> group_tests(const AlterationMatrix& matrix,
                                   const AlterationSet& members, bool with_bound) {
  const auto fused = effective_members(matrix, members);
  const auto& groups = matrix.groups();

  std::vector<BitRow> fused_bits;
  std::vector<int> fused_total;
  for (const auto& f : fused) {
    fused_bits.push_back(matrix.union_of(f));
    fused_total.push_back(fused_bits.back().popcount());
  }
  std::vector<int> order(fused.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return fused_total[a] > fused_total[b]; });

  std::vector<GroupTest> out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const int gi = static_cast<int>(g);
    const int n_tau = groups[g].size();
    GroupTest gt;
    gt.label = groups[g].label;

    std::vector<double> pair_ws;
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b)
        pair_ws.push_back(pairwise_weight(n_tau, matrix.row_coverage(members[a], gi),
                                          matrix.row_coverage(members[b], gi)));
    gt.weight = group_weight(pair_ws);
    if (gt.weight <= 0) {
      out.push_back(std::move(gt));
      continue;
    }

    std::vector<int> covs;
    for (const auto& fb : fused_bits) covs.push_back(matrix.coverage_in_group(fb, gi));
    BitRow uni(matrix.sample_count());
    for (const auto& fb : fused_bits) uni.or_with(fb);
    const int gamma_obs = matrix.coverage_in_group(uni, gi);

    if (with_bound) {
      // Chain product of one-sided conditional Fisher tails, final step at
      // gamma_obs + 1 so the product bounds p_minus from below.
      BitRow prefix(matrix.sample_count());
      int prev = 0;
      double log_bound = 0;
      for (std::size_t s = 0; s < order.size(); ++s) {
        prefix.or_with(fused_bits[order[s]]);
        const int cur = matrix.coverage_in_group(prefix, gi);
        if (s == 0) {
          prev = cur;
          continue;
        }
        const int threshold = (s + 1 == order.size()) ? gamma_obs + 1 : cur;
        log_bound += log_conditional_step_tail(n_tau, prev, covs[order[s]], threshold);
        prev = cur;
      }
      gt.log_chain_bound_minus = order.size() < 2 ? kNegInf : log_bound;
    }

    gt.triple = upper_p(n_tau, covs, gamma_obs);
    out.push_back(std::move(gt));
  }
  return out;
}

// Same per-group loop but stops after the chain bounds; no convolution.
double screening_bound(const AlterationMatrix& matrix, const AlterationSet& members) {
  const auto fused = effective_members(matrix, members);
  if (fused.size() < 3) return 0;  // pairs are cheap exactly
  const auto& groups = matrix.groups();

  std::vector<BitRow> fused_bits;
  std::vector<int> fused_total;
  for (const auto& f : fused) {
    fused_bits.push_back(matrix.union_of(f));
    fused_total.push_back(fused_bits.back().popcount());
  }
  std::vector<int> order(fused.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return fused_total[a] > fused_total[b]; });

  std::vector<double> ps, ws;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const int gi = static_cast<int>(g);
    const int n_tau = groups[g].size();
    std::vector<double> pair_ws;
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b)
        pair_ws.push_back(pairwise_weight(n_tau, matrix.row_coverage(members[a], gi),
                                          matrix.row_coverage(members[b], gi)));
    const double w = group_weight(pair_ws);
    if (w <= 0) continue;

    BitRow prefix(matrix.sample_count());
    int prev = 0;
    double log_bound = 0;
    BitRow uni(matrix.sample_count());
    for (const auto& fb : fused_bits) uni.or_with(fb);
    const int gamma_obs = matrix.coverage_in_group(uni, gi);
    for (std::size_t s = 0; s < order.size(); ++s) {
      prefix.or_with(fused_bits[order[s]]);
      const int cur = matrix.coverage_in_group(prefix, gi);
      const int c = matrix.coverage_in_group(fused_bits[order[s]], gi);
      if (s == 0) {
        prev = cur;
        continue;
      }
      const int threshold = (s + 1 == order.size()) ? gamma_obs + 1 : cur;
      log_bound += log_conditional_step_tail(n_tau, prev, c, threshold);
      prev = cur;
    }
    if (log_bound == kNegInf) return 0;  // perfect exclusivity; compute exactly
    ps.push_back(std::exp(log_bound));
    ws.push_back(w);
  }
  if (ps.empty()) return 1;
  for (double p : ps)
    if (p <= 0) return 0;
  return stouffer(ps, ws);
}

}  // namespace

double set_pvalue(const AlterationMatrix& matrix, const AlterationSet& members,
                  bool randomized, std::uint64_t seed) {
  auto tests = group_tests(matrix, members, /*with_bound=*/false);
  std::vector<GroupEvidence> evidence;
  for (auto& gt : tests)
    evidence.push_back({std::move(gt.label), gt.triple, gt.weight});
  CombineConfig cc;
  cc.mode = randomized ? CombineMode::RANDOMIZED : CombineMode::MID;
  cc.seed = seed;
  return combine_across_groups(evidence, cc, set_key(members));
}

ResultReport run_on_matrix(const AlterationMatrix& input, const RunConfig& config) {
  if (config.k_max < 2) throw DataError("k_max must be >= 2");
  if (!(config.level > 0 && config.level < 1) || !(config.alpha_w > 0 && config.alpha_w < 1))
    throw DataError("level and alpha-weights must be in (0, 1)");

  ResultReport report;
  report.config = config;
  report.m_input = input.row_count();
  report.n_samples = input.sample_count();

  const AlterationMatrix matrix = input.merge_identical_rows().filter_rare();
  const int m = matrix.row_count();
  report.m_tested = m;
  if (m < 2) return report;

  const int k_max = std::min(config.k_max, m);

  // Candidate generation
  std::vector<AlterationSet> candidates;
  if (config.pairwise_baseline) {
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) candidates.push_back({i, j});
  } else {
    GreedyParams gp;
    gp.max_iter = config.max_iter;
    gp.k_max = k_max;
    CandidatePool pool = generate_candidates(matrix, gp);
    if (!config.candidate_dump_path.empty()) {
      std::ofstream dump(config.candidate_dump_path);
      dump << "set\tscore\n";
      char buf[32];
      for (const auto& entry : pool.sets) {
        std::snprintf(buf, sizeof buf, "%.17g", entry.score);
        dump << set_key(entry.set) << '\t' << buf << '\n';
      }
    }
    pool = subset_closure(pool, config.closure_budget);
    for (const auto& entry : pool.sets)
      if (entry.set.size() >= 2) candidates.push_back(entry.set);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  if (candidates.empty()) return report;

  // Exact p-values, fanned out across workers. A candidate whose screening
  // lower bound already exceeds its significance threshold (with a wide
  // safety margin) skips the convolution; the bound is recorded as its p.
  const bool randomized = !config.pairwise_baseline;
  WeightScheme scheme(m, k_max, config.alpha_w);
  const double log_level = std::log(config.level);

  std::vector<double> pvals(candidates.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= candidates.size()) return;
      const auto& set = candidates[i];
      const int size = static_cast<int>(set.size());
      if (config.correction == CorrectionMethod::Bonferroni &&
          !config.pairwise_baseline && size > 2) {
        const double log_crit = log_level - scheme.log_correction_factor(size);
        const double bound = screening_bound(matrix, set);
        if (bound > 0 && std::log(bound) > log_crit + 16) {  // e^16 safety margin
          pvals[i] = bound;
          continue;
        }
      }
      pvals[i] = set_pvalue(matrix, set, randomized, config.seed);
    }
  };
  const int threads = std::max(1, config.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> ts;
    for (int t = 0; t < threads; ++t) ts.emplace_back(worker);
    for (auto& t : ts) t.join();
  }

  // Correction
  std::vector<std::pair<AlterationSet, double>> results;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    results.emplace_back(candidates[i], pvals[i]);

  if (config.pairwise_baseline) {
    const double denom = 0.5 * static_cast<double>(m) * (m - 1);
    for (const auto& [set, p] : results) {
      AdjustedResult r;
      r.set = set;
      r.p_raw = p;
      r.log_p_adjusted = p > 0 ? std::log(p) + std::log(denom) : kNegInf;
      r.p_adjusted = p > 0 ? std::exp(r.log_p_adjusted) : 0.0;
      r.weight = 1;
      r.significant = r.log_p_adjusted <= log_level;
      report.scored.push_back(std::move(r));
    }
  } else {
    report.scored = weighted_bonferroni(results, scheme, config.level);
    if (config.correction == CorrectionMethod::BH) {
      auto flags = weighted_bh(results, scheme, config.level);
      for (std::size_t i = 0; i < flags.size(); ++i)
        report.scored[i].significant = flags[i];
    }
  }

  std::vector<AdjustedResult> significant;
  for (const auto& r : report.scored)
    if (r.significant) significant.push_back(r);
  significant = prune_nested(significant);
  std::sort(significant.begin(), significant.end(),
            [](const AdjustedResult& a, const AdjustedResult& b) {
              if (a.log_p_adjusted != b.log_p_adjusted)
                return a.log_p_adjusted < b.log_p_adjusted;
              if (a.set.size() != b.set.size()) return a.set.size() < b.set.size();
              return a.set < b.set;
            });

  for (const auto& r : significant) {
    ReportedSet rs;
    rs.set = r.set;
    for (int i : r.set) rs.labels.push_back(matrix.row(i).label);
    rs.coverage_fraction =
        static_cast<double>(matrix.coverage(r.set)) / matrix.sample_count();
    rs.p_raw = r.p_raw;
    rs.p_adjusted = std::min(1.0, r.p_adjusted);
    rs.log_p_adjusted = r.log_p_adjusted;
    report.significant.push_back(std::move(rs));
  }
  return report;
}

ResultReport run(const RunConfig& config) {
  AlterationMatrix matrix = load_matrix(config.matrix_path, config.groups_path);
  ResultReport report = run_on_matrix(matrix, config);
  if (!config.out_dir.empty()) {
    const AlterationMatrix processed = matrix.merge_identical_rows().filter_rare();
    export_report(report, processed, config.out_dir);
  }
  return report;
}

namespace {
std::string format_sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}
}  // namespace

void export_report(const ResultReport& report, const AlterationMatrix& matrix,
                   const std::string& dir) {
  std::filesystem::create_directories(dir);

  {
    std::ofstream tsv(dir + "/results.tsv");
    if (!tsv) throw DataError("cannot write " + dir + "/results.tsv");
    tsv << "rank\tcoverage_fraction\tp_raw\tp_adjusted\tmembers\n";
    char frac[16];
    for (std::size_t r = 0; r < report.significant.size(); ++r) {
      const auto& rs = report.significant[r];
      std::snprintf(frac, sizeof frac, "%.1f%%", 100 * rs.coverage_fraction);
      tsv << (r + 1) << '\t' << frac << '\t' << format_sci(rs.p_raw) << '\t'
          << format_sci(rs.p_adjusted) << '\t';
      for (std::size_t i = 0; i < rs.labels.size(); ++i)
        tsv << (i ? ", " : "") << rs.labels[i];
      tsv << '\n';
    }
  }

  {
    // Union of per-set complete graphs, GML node/edge list.
    std::set<int> nodes;
    std::set<std::pair<int, int>> edges;
    for (const auto& rs : report.significant) {
      for (int i : rs.set) nodes.insert(i);
      for (std::size_t a = 0; a < rs.set.size(); ++a)
        for (std::size_t b = a + 1; b < rs.set.size(); ++b)
          edges.emplace(rs.set[a], rs.set[b]);
    }
    std::ofstream gml(dir + "/graph.gml");
    if (!gml) throw DataError("cannot write " + dir + "/graph.gml");
    gml << "graph [\n  directed 0\n";
    for (int i : nodes)
      gml << "  node [ id " << i << " label \"" << matrix.row(i).label
          << "\" coverage " << matrix.row_coverage(i) << " ]\n";
    for (const auto& [a, b] : edges)
      gml << "  edge [ source " << a << " target " << b << " ]\n";
    gml << "]\n";
  }

  {
    std::ofstream meta(dir + "/run_metadata.txt");
    if (!meta) throw DataError("cannot write " + dir + "/run_metadata.txt");
    const auto& c = report.config;
    meta << "version\t" << kVersion << '\n'
         << "matrix\t" << c.matrix_path << '\n'
         << "groups\t" << c.groups_path << '\n'
         << "kmax\t" << c.k_max << '\n'
         << "max_iter\t" << c.max_iter << '\n'
         << "alpha_weights\t" << format_sci(c.alpha_w) << '\n'
         << "level\t" << format_sci(c.level) << '\n'
         << "correction\t"
         << (c.correction == CorrectionMethod::Bonferroni ? "bonferroni" : "bh") << '\n'
         << "pairwise_baseline\t" << (c.pairwise_baseline ? 1 : 0) << '\n'
         << "seed\t" << c.seed << '\n'
         << "rows_input\t" << report.m_input << '\n'
         << "rows_tested\t" << report.m_tested << '\n'
         << "samples\t" << report.n_samples << '\n'
         << "candidates_scored\t" << report.scored.size() << '\n'
         << "significant_sets\t" << report.significant.size() << '\n';
  }
}

AlterationMatrix simulate_null(const NullSpec& spec, std::uint64_t seed) {
  const std::size_t g_count = spec.groups.size();
  if (g_count == 0) throw DataError("simulate_null: no groups");
  std::vector<std::string> sample_ids, group_of;
  for (const auto& [label, size] : spec.groups) {
    if (size <= 0) throw DataError("simulate_null: group size must be positive");
    for (int j = 0; j < size; ++j) {
      sample_ids.push_back(label + "_s" + std::to_string(j));
      group_of.push_back(label);
    }
  }
  const int n = static_cast<int>(sample_ids.size());

  std::vector<int> group_offset;
  {
    int off = 0;
    for (const auto& [label, size] : spec.groups) {
      group_offset.push_back(off);
      off += size;
    }
  }

  std::mt19937_64 rng(mix64(seed));
  std::vector<RowInfo> rows;
  std::vector<BitRow> bits;
  for (std::size_t i = 0; i < spec.margins.size(); ++i) {
    if (spec.margins[i].size() != g_count)
      throw DataError("simulate_null: margin row length mismatch");
    BitRow row(n);
    for (std::size_t g = 0; g < g_count; ++g) {
      const int size = spec.groups[g].second;
      const int margin = spec.margins[i][g];
      if (margin < 0 || margin > size) throw DataError("simulate_null: infeasible margin");
      std::vector<int> idx(size);
      for (int t = 0; t < size; ++t) idx[t] = group_offset[g] + t;
      for (int t = 0; t < margin; ++t) {
        std::uniform_int_distribution<int> pick(t, size - 1);
        std::swap(idx[t], idx[pick(rng)]);
        row.set(idx[t]);
      }
    }
    std::string label = i < spec.row_labels.size() ? spec.row_labels[i]
                                                   : "r" + std::to_string(i);
    rows.push_back(parse_row_label(label));
    bits.push_back(std::move(row));
  }
  return AlterationMatrix(std::move(rows), std::move(sample_ids), std::move(group_of),
                          std::move(bits));
}

void write_matrix_tsv(const AlterationMatrix& matrix, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "alteration";
  for (const auto& id : matrix.sample_ids()) out << '\t' << id;
  out << '\n';
  for (int i = 0; i < matrix.row_count(); ++i) {
    out << matrix.row(i).label;
    for (int j = 0; j < matrix.sample_count(); ++j)
      out << '\t' << (matrix.row_bits(i).test(j) ? '1' : '0');
    out << '\n';
  }
}

void write_groups_tsv(const AlterationMatrix& matrix, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "sample\tgroup\n";
  for (const auto& span : matrix.groups())
    for (int j = span.begin; j < span.end; ++j)
      out << matrix.sample_ids()[j] << '\t' << span.label << '\n';
}

}  // namespace excl
