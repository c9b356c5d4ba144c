#ifndef EXCL_MULTIPLICITY_HPP
#define EXCL_MULTIPLICITY_HPP

#include <utility>
#include <vector>

#include "excl/dataset.hpp"

// Size-dependent hypothesis weights, the weighted Bonferroni correction and
// its closed-form approximation, weighted Benjamini-Hochberg, and nested-set
// pruning.
namespace excl {

// Weights over all alteration sets of sizes 2..k_max out of m alterations,
// normalised to average 1 and strictly decreasing in size. Everything is
// evaluated through log-gamma, so k_max up to m is fine.
class WeightScheme {
 public:
  WeightScheme(int m, int k_max, double alpha_w);

  int m() const { return m_; }
  int k_max() const { return k_max_; }
  double alpha_w() const { return alpha_w_; }

  double set_weight(int size) const;
  // Multiplier applied to an uncorrected p-value: sum_l C(m,l) / w(size).
  double correction_factor(int size) const;
  double log_correction_factor(int size) const;

 private:
  void check_size(int size) const;
  int m_;
  int k_max_;
  double alpha_w_;
  std::vector<double> log_prefix_;  // log prod_{k=2}^{size} f_k, index by size
  double log_total_;                // log sum_l C(m,l)
  double log_denom_;                // log sum_l C(m,l) prod f
};

// (e^a - 1 - a) * a^{-size} * size! * C(m, size); valid for large m, small
// alpha_w, large k_max.
double correction_factor_approx(int m, double alpha_w, int size);

struct AdjustedResult {
  AlterationSet set;
  double p_raw = 1;
  double p_adjusted = 1;      // p_raw * correction; may exceed 1
  double log_p_adjusted = 0;  // natural log; pruning compares this
  double weight = 1;
  bool significant = false;
};

std::vector<AdjustedResult> weighted_bonferroni(
    const std::vector<std::pair<AlterationSet, double>>& results,
    const WeightScheme& scheme, double level);

// Standard step-up procedure on p/w. Returns one rejection flag per input.
std::vector<bool> weighted_bh(
    const std::vector<std::pair<AlterationSet, double>>& results,
    const WeightScheme& scheme, double level);

// Keeps a set only if no other input set nested with it (subset or superset)
// has a strictly smaller adjusted p; on ties the smaller set wins.
std::vector<AdjustedResult> prune_nested(const std::vector<AdjustedResult>& significant);

}  // namespace excl

#endif
