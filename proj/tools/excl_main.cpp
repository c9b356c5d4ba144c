// Command-line front end: `run` executes the full mining pipeline, `simulate`
// draws fixed-margin null matrices, `test-one` tests a single alteration set.
#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "excl/combine.hpp"
#include "excl/dataset.hpp"
#include "excl/pipeline.hpp"
#include "excl/stats.hpp"
#include "excl/union_test.hpp"

namespace {

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

int find_row(const excl::AlterationMatrix& matrix, const std::string& label) {
  for (int i = 0; i < matrix.row_count(); ++i)
    if (matrix.row(i).label == label) return i;
  throw excl::DataError("unknown alteration label: " + label);
}

int cmd_run(const excl::RunConfig& config) {
  excl::ResultReport report = excl::run(config);
  std::cerr << "rows tested: " << report.m_tested
            << ", candidates scored: " << report.scored.size()
            << ", significant sets: " << report.significant.size() << "\n";
  for (std::size_t r = 0; r < report.significant.size(); ++r) {
    const auto& rs = report.significant[r];
    std::cout << (r + 1) << '\t' << rs.p_adjusted << '\t';
    for (std::size_t i = 0; i < rs.labels.size(); ++i)
      std::cout << (i ? ", " : "") << rs.labels[i];
    std::cout << '\n';
  }
  return 0;
}

int cmd_simulate(const std::string& sizes_arg, const std::string& margins_path,
                 int rows, int cov_min, int cov_max, std::uint64_t seed,
                 const std::string& out_dir) {
  excl::NullSpec spec;
  for (const auto& item : split_commas(sizes_arg)) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw excl::DataError("--sizes expects label=count[,label=count...]");
    spec.groups.emplace_back(item.substr(0, eq), std::stoi(item.substr(eq + 1)));
  }
  if (!margins_path.empty()) {
    std::ifstream in(margins_path);
    if (!in) throw excl::DataError("cannot open margins file: " + margins_path);
    std::string line;
    std::getline(in, line);  // header: alteration + one column per group
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string label;
      ss >> label;
      std::vector<int> margin;
      int v;
      while (ss >> v) margin.push_back(v);
      spec.row_labels.push_back(label);
      spec.margins.push_back(std::move(margin));
    }
  } else {
    // Random margins, uniform in [cov_min, cov_max] per group.
    std::uint64_t state = seed;
    for (int i = 0; i < rows; ++i) {
      std::vector<int> margin;
      for (std::size_t g = 0; g < spec.groups.size(); ++g) {
        state = excl::mix64(state + 1);
        const int span = cov_max - cov_min + 1;
        margin.push_back(cov_min + static_cast<int>(state % span));
      }
      spec.margins.push_back(std::move(margin));
    }
  }
  excl::AlterationMatrix matrix = excl::simulate_null(spec, seed);
  std::filesystem::create_directories(out_dir);
  excl::write_matrix_tsv(matrix, out_dir + "/matrix.tsv");
  excl::write_groups_tsv(matrix, out_dir + "/groups.tsv");
  std::cerr << "wrote " << matrix.row_count() << " rows x " << matrix.sample_count()
            << " samples to " << out_dir << "\n";
  return 0;
}

int cmd_test_one(const std::string& matrix_path, const std::string& groups_path,
                 const std::string& set_arg, const std::string& mode,
                 std::uint64_t seed) {
  excl::AlterationMatrix matrix = excl::load_matrix(matrix_path, groups_path);
  excl::AlterationSet members;
  for (const auto& label : split_commas(set_arg))
    members.push_back(find_row(matrix, label));
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.size() < 2) throw excl::DataError("--set needs at least 2 alterations");

  const auto fused = excl::effective_members(matrix, members);
  std::cout << "group\tn\tgamma_obs\tp\tp_minus\tmid\tweight\n";
  for (std::size_t g = 0; g < matrix.groups().size(); ++g) {
    const auto& span = matrix.groups()[g];
    const int gi = static_cast<int>(g);
    std::vector<int> covs;
    for (const auto& f : fused)
      covs.push_back(matrix.coverage_in_group(matrix.union_of(f), gi));
    const int gamma = matrix.coverage_in_group(matrix.union_of(members), gi);
    auto triple = excl::upper_p(span.size(), covs, gamma);
    std::vector<double> pair_ws;
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b)
        pair_ws.push_back(excl::pairwise_weight(span.size(),
                                                matrix.row_coverage(members[a], gi),
                                                matrix.row_coverage(members[b], gi)));
    std::cout << span.label << '\t' << span.size() << '\t' << gamma << '\t' << triple.p
              << '\t' << triple.p_minus << '\t' << triple.mid << '\t'
              << excl::group_weight(pair_ws) << '\n';
  }
  const double combined =
      excl::set_pvalue(matrix, members, mode == "randomized", seed);
  std::cout << "combined (" << mode << ")\t" << combined << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mining of statistically significant anti-co-occurring alteration sets"};
  app.require_subcommand(1);

  excl::RunConfig config;
  std::string correction = "bonferroni";
  auto* run = app.add_subcommand("run", "Run the full mining pipeline");
  run->add_option("--matrix", config.matrix_path, "Alteration matrix TSV")->required();
  run->add_option("--groups", config.groups_path, "Sample-to-group TSV")->required();
  run->add_option("--kmax", config.k_max, "Maximum alteration set size");
  run->add_option("--max-iter", config.max_iter, "Greedy iterations");
  run->add_option("--alpha-weights", config.alpha_w, "Weighting parameter");
  run->add_option("--level", config.level, "Significance level");
  run->add_option("--correction", correction, "bonferroni|bh")
      ->check(CLI::IsMember({"bonferroni", "bh"}));
  run->add_option("--seed", config.seed, "Master seed for p-value randomisation");
  run->add_option("--out", config.out_dir, "Output directory")->required();
  run->add_option("--threads", config.threads, "Worker threads");
  run->add_flag("--pairwise-baseline", config.pairwise_baseline,
                "Pairwise-only analysis with plain m(m-1)/2 Bonferroni");
  run->add_option("--dump-candidates", config.candidate_dump_path,
                  "Debug dump of the greedy candidate pool (TSV)");

  std::string sizes_arg, margins_path, out_dir;
  int rows = 20, cov_min = 10, cov_max = 50;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Draw a fixed-margin null matrix");
  simulate->add_option("--sizes", sizes_arg, "Group sizes, label=count[,...]")->required();
  simulate->add_option("--margins", margins_path,
                       "TSV of per-row per-group margins (alteration + one column per group)");
  simulate->add_option("--rows", rows, "Row count for random margins");
  simulate->add_option("--coverage-min", cov_min, "Minimum random margin");
  simulate->add_option("--coverage-max", cov_max, "Maximum random margin");
  simulate->add_option("--seed", sim_seed, "Seed");
  simulate->add_option("--out", out_dir, "Output directory")->required();

  std::string t1_matrix, t1_groups, t1_set, t1_mode = "mid";
  std::uint64_t t1_seed = 0;
  auto* test_one = app.add_subcommand("test-one", "Test a single alteration set");
  test_one->add_option("--matrix", t1_matrix, "Alteration matrix TSV")->required();
  test_one->add_option("--groups", t1_groups, "Sample-to-group TSV")->required();
  test_one->add_option("--set", t1_set, "Comma-separated alteration labels")->required();
  test_one->add_option("--mode", t1_mode, "mid|randomized")
      ->check(CLI::IsMember({"mid", "randomized"}));
  test_one->add_option("--seed", t1_seed, "Seed for randomized mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) {
      config.correction = correction == "bh" ? excl::CorrectionMethod::BH
                                             : excl::CorrectionMethod::Bonferroni;
      return cmd_run(config);
    }
    if (simulate->parsed())
      return cmd_simulate(sizes_arg, margins_path, rows, cov_min, cov_max, sim_seed,
                          out_dir);
    if (test_one->parsed())
      return cmd_test_one(t1_matrix, t1_groups, t1_set, t1_mode, t1_seed);
  } catch (const excl::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
