#include "excl/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "excl/stats.hpp"

namespace excl {

namespace {

// All n-bit masks with the given popcount, in increasing numeric order.
std::vector<std::uint64_t> masks_with_popcount(int n, int c) {
  std::vector<std::uint64_t> out;
  if (c == 0) {
    out.push_back(0);
    return out;
  }
  std::uint64_t mask = (std::uint64_t{1} << c) - 1;
  const std::uint64_t limit = std::uint64_t{1} << n;
  while (mask < limit) {
    out.push_back(mask);
    // Gosper's hack
    std::uint64_t lowest = mask & (~mask + 1);
    std::uint64_t ripple = mask + lowest;
    mask = ripple | (((mask ^ ripple) >> 2) / lowest);
  }
  return out;
}

}  // namespace

TailDistribution enumerate_gamma(int n, std::span<const int> coverages,
                                 std::uint64_t budget) {
  if (n < 1 || n > 62) throw std::runtime_error("enumerate_gamma: n out of [1, 62]");
  double tuples = 1;
  for (int c : coverages) {
    if (c < 0 || c > n) throw std::runtime_error("enumerate_gamma: coverage out of range");
    tuples *= std::exp(log_binom(n, c));
  }
  if (tuples > static_cast<double>(budget))
    throw std::runtime_error("enumerate_gamma: tuple count exceeds budget");

  std::vector<std::vector<std::uint64_t>> rows;
  for (int c : coverages) rows.push_back(masks_with_popcount(n, c));

  std::vector<double> hist(n + 1, 0);
  // Depth-first product over rows, accumulating the union mask.
  std::vector<std::size_t> cursor(rows.size(), 0);
  std::vector<std::uint64_t> unions(rows.size() + 1, 0);
  std::size_t depth = 0;
  for (;;) {
    if (depth == rows.size()) {
      hist[std::popcount(unions[depth])] += 1;
      --depth;
      continue;
    }
    if (cursor[depth] == rows[depth].size()) {
      cursor[depth] = 0;
      if (depth == 0) break;
      --depth;
      continue;
    }
    unions[depth + 1] = unions[depth] | rows[depth][cursor[depth]];
    ++cursor[depth];
    ++depth;
  }

  double total = 0;
  for (double h : hist) total += h;
  int lo = 0, hi = n;
  while (lo < hi && hist[lo] == 0) ++lo;
  while (hi > lo && hist[hi] == 0) --hi;
  TailDistribution dist;
  dist.n = n;
  dist.support_floor = lo;
  for (int x = lo; x <= hi; ++x) dist.masses.push_back(hist[x] / total);
  return dist;
}

namespace {

// Sets `count` uniformly chosen positions from idx[begin..end) in `bits`.
// Partially reshuffles idx in place; uniformity is unaffected.
void sample_positions(BitRow& bits, std::vector<int>& idx, int count,
                      std::mt19937_64& rng) {
  const int size = static_cast<int>(idx.size());
  for (int t = 0; t < count; ++t) {
    std::uniform_int_distribution<int> pick(t, size - 1);
    std::swap(idx[t], idx[pick(rng)]);
    bits.set(idx[t]);
  }
}

}  // namespace

AlterationMatrix permute_rows(const AlterationMatrix& matrix, std::uint64_t seed) {
  std::mt19937_64 rng(mix64(seed));
  const int n = matrix.sample_count();
  std::vector<std::string> group_of(n);
  for (const auto& span : matrix.groups())
    for (int j = span.begin; j < span.end; ++j) group_of[j] = span.label;

  std::vector<RowInfo> rows;
  std::vector<BitRow> bits;
  for (int i = 0; i < matrix.row_count(); ++i) {
    rows.push_back(matrix.row(i));
    BitRow row(n);
    for (std::size_t g = 0; g < matrix.groups().size(); ++g) {
      const auto& span = matrix.groups()[g];
      std::vector<int> idx(span.size());
      for (int t = 0; t < span.size(); ++t) idx[t] = span.begin + t;
      sample_positions(row, idx, matrix.row_coverage(i, static_cast<int>(g)), rng);
    }
    bits.push_back(std::move(row));
  }
  return AlterationMatrix(std::move(rows), matrix.sample_ids(), std::move(group_of),
                          std::move(bits));
}

McEstimate mc_permutation_p(const AlterationMatrix& matrix, const AlterationSet& members,
                            int n_perm, std::uint64_t seed) {
  if (n_perm < 1000) throw std::invalid_argument("mc_permutation_p: n_perm < 1000");
  const int n = matrix.sample_count();
  const int observed = matrix.coverage(members);
  std::mt19937_64 rng(mix64(seed));

  std::vector<std::vector<int>> group_idx;
  for (const auto& span : matrix.groups()) {
    std::vector<int> idx(span.size());
    for (int t = 0; t < span.size(); ++t) idx[t] = span.begin + t;
    group_idx.push_back(std::move(idx));
  }

  long long hits = 0;
  for (int rep = 0; rep < n_perm; ++rep) {
    BitRow uni(n);
    for (int i : members)
      for (std::size_t g = 0; g < group_idx.size(); ++g)
        sample_positions(uni, group_idx[g], matrix.row_coverage(i, static_cast<int>(g)),
                        rng);
    if (uni.popcount() >= observed) ++hits;
  }
  McEstimate est;
  est.p = static_cast<double>(hits + 1) / (n_perm + 1);
  est.se = std::sqrt(est.p * (1 - est.p) / n_perm);
  return est;
}

}  // namespace excl
