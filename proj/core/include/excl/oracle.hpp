#ifndef EXCL_ORACLE_HPP
#define EXCL_ORACLE_HPP

#include <cstdint>

#include "excl/dataset.hpp"
#include "excl/union_test.hpp"

// Independent verification oracles: exhaustive enumeration of the union-size
// null distribution, and Monte Carlo permutation testing with fixed margins.
// Slow by design; used by the test suite, never by the main p-value path.
namespace excl {

// Exact pmf of the union size over all tuples of subsets, each row drawn
// uniformly among the c_i-subsets of the n columns. Throws std::runtime_error
// if the tuple count exceeds the budget.
TailDistribution enumerate_gamma(int n, std::span<const int> coverages,
                                 std::uint64_t budget = 10'000'000);

// Each row's bits are permuted uniformly within each group's columns;
// per-group margins are preserved exactly.
AlterationMatrix permute_rows(const AlterationMatrix& matrix, std::uint64_t seed);

struct McEstimate {
  double p = 1;
  double se = 0;
};

// Fraction of permuted matrices with union coverage >= observed, add-one
// smoothed: (r+1)/(n_perm+1). Requires n_perm >= 1000.
McEstimate mc_permutation_p(const AlterationMatrix& matrix, const AlterationSet& members,
                            int n_perm, std::uint64_t seed);

}  // namespace excl

#endif
