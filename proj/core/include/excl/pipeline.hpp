#ifndef EXCL_PIPELINE_HPP
#define EXCL_PIPELINE_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "excl/dataset.hpp"
#include "excl/multiplicity.hpp"

// End-to-end orchestration: preprocess, greedy candidates, subset closure,
// exact per-group tests, randomised Stouffer combination, weighted correction,
// nested-set pruning, reports.
namespace excl {

enum class CorrectionMethod { Bonferroni, BH };

struct RunConfig {
  std::string matrix_path;
  std::string groups_path;
  int k_max = 10;
  int max_iter = 5000;
  double alpha_w = 0.05;   // weight parameter; independent of level
  double level = 0.05;     // significance level
  CorrectionMethod correction = CorrectionMethod::Bonferroni;
  std::uint64_t seed = 0;
  std::string out_dir;
  int threads = 1;
  // Pairwise-only baseline: tests all pairs with mid-p Stouffer and a plain
  // m(m-1)/2 Bonferroni denominator.
  bool pairwise_baseline = false;
  std::size_t closure_budget = 5'000'000;
  std::string candidate_dump_path;  // optional debug dump of the greedy pool
};

struct ReportedSet {
  AlterationSet set;
  std::vector<std::string> labels;
  double coverage_fraction = 0;  // coverage(M) / n
  double p_raw = 1;
  double p_adjusted = 1;  // clamped to 1 for display
  double log_p_adjusted = 0;
};

struct ResultReport {
  std::vector<ReportedSet> significant;  // pruned, adjusted p ascending
  std::vector<AdjustedResult> scored;    // every tested candidate, pre-pruning
  int m_input = 0;   // rows before preprocessing
  int m_tested = 0;  // rows after merge + rarity filter
  int n_samples = 0;
  RunConfig config;
};

// Exact combined p-value for one alteration set: same-gene members fused,
// per-group upper-tail test, Stouffer combination in the given mode.
double set_pvalue(const AlterationMatrix& matrix, const AlterationSet& members,
                  bool randomized, std::uint64_t seed);

// Full pipeline on an already-loaded (but not yet preprocessed) matrix.
ResultReport run_on_matrix(const AlterationMatrix& matrix, const RunConfig& config);

// Loads inputs, runs the pipeline, exports to config.out_dir when set.
ResultReport run(const RunConfig& config);

// Writes results.tsv, graph.gml and run_metadata.txt into dir.
void export_report(const ResultReport& report, const AlterationMatrix& matrix,
                   const std::string& dir);

struct NullSpec {
  std::vector<std::pair<std::string, int>> groups;  // label, sample count
  std::vector<std::string> row_labels;              // generated if empty
  std::vector<std::vector<int>> margins;            // [row][group]
};

// Each row drawn as an independent uniform subset of each group's columns
// with exactly the requested margin.
AlterationMatrix simulate_null(const NullSpec& spec, std::uint64_t seed);

void write_matrix_tsv(const AlterationMatrix& matrix, const std::string& path);
void write_groups_tsv(const AlterationMatrix& matrix, const std::string& path);

}  // namespace excl

#endif
