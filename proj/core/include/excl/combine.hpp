#ifndef EXCL_COMBINE_HPP
#define EXCL_COMBINE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "excl/union_test.hpp"

// Combining per-group discrete p-values via Stouffer's method, with mid-p
// (greedy scoring) or randomised p-values (final inference).
namespace excl {

struct GroupEvidence {
  std::string group;
  PValueTriple triple;
  double weight = 0;  // zero-weight groups are skipped
};

enum class CombineMode { MID, RANDOMIZED };

struct CombineConfig {
  CombineMode mode = CombineMode::MID;
  std::uint64_t seed = 0;  // master seed, RANDOMIZED mode only
};

// Inverse asymptotic standard deviation of the empirical log-odds ratio for a
// 2x2 table with margins (c1, c2) out of n_tau samples. Returns 0 for
// degenerate margins (c in {0, n_tau}); such groups carry no information.
double pairwise_weight(int n_tau, int c1, int c2);

// Heuristic group weight: root of the sum of squared pairwise weights.
double group_weight(std::span<const double> pair_weights);

// Phi( sum w * Phi^{-1}(p) / sqrt(sum w^2) ). Requires at least one positive
// weight; p == 0 short-circuits to 0.
double stouffer(std::span<const double> ps, std::span<const double> ws);

// Pearson randomisation: p - (p - p_minus) * u, strictly inside (p_minus, p).
double randomize_p(const PValueTriple& triple, double u);

// Combines the evidence with Stouffer's method. RANDOMIZED mode draws one
// uniform per (seed, set_key, group) from the counter-based generator, so the
// result is independent of evaluation order and thread count. Returns 1 when
// every group is degenerate.
double combine_across_groups(std::span<const GroupEvidence> evidence,
                             const CombineConfig& config,
                             const std::string& set_key);

}  // namespace excl

#endif
