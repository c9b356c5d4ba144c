#ifndef EXCL_GREEDY_HPP
#define EXCL_GREEDY_HPP

#include <cstddef>
#include <vector>

#include "excl/dataset.hpp"

// Greedy candidate generation: repeatedly union the two most significantly
// anti-co-occurring sets in the pool, with size caps that grow by epoch.
namespace excl {

struct GreedyParams {
  int max_iter = 5000;  // total number of new sets across all epochs
  int k_max = 10;
};

struct PoolEntry {
  AlterationSet set;
  double score = 1;  // combined mid-p of the pair whose union formed this set
};

struct CandidatePool {
  std::vector<PoolEntry> sets;  // singleton seeds first, then unions in creation order
  GreedyParams params;
};

// Per-group one-sided Fisher test between the indicators "any member of s1"
// and "any member of s2", combined with mid-p Stouffer using pairwise weights
// on the indicator coverages. Degenerate groups are skipped; 1 if all are.
double score_pair(const AlterationMatrix& matrix, const AlterationSet& s1,
                  const AlterationSet& s2);

// Deterministic given the matrix and params. Iterations are split into
// k_max - 1 epochs; epoch e allows new sets up to size e + 1. Ties break on
// score, then union size, then the lexicographically smallest member list.
CandidatePool generate_candidates(const AlterationMatrix& matrix,
                                  const GreedyParams& params);

// Adds every subset of size >= 2 of every pool set, deduplicated. Throws
// std::runtime_error naming the count if the closure would exceed the budget.
CandidatePool subset_closure(const CandidatePool& pool,
                             std::size_t budget = 5'000'000);

}  // namespace excl

#endif
