#include "excl/greedy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <stdexcept>

#include "excl/combine.hpp"
#include "excl/union_test.hpp"

namespace excl {

namespace {

double score_indicator_pair(const AlterationMatrix& matrix, const BitRow& b1,
                            const BitRow& b2) {
  BitRow u = b1;
  u.or_with(b2);
  std::vector<GroupEvidence> evidence;
  const auto& groups = matrix.groups();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const int n_tau = groups[g].size();
    const int c1 = matrix.coverage_in_group(b1, static_cast<int>(g));
    const int c2 = matrix.coverage_in_group(b2, static_cast<int>(g));
    const double w = pairwise_weight(n_tau, c1, c2);
    if (w <= 0) continue;
    GroupEvidence ev;
    ev.group = groups[g].label;
    const int covs[2] = {c1, c2};
    ev.triple = upper_p(n_tau, covs, matrix.coverage_in_group(u, static_cast<int>(g)));
    ev.weight = w;
    evidence.push_back(std::move(ev));
  }
  return combine_across_groups(evidence, CombineConfig{CombineMode::MID, 0}, "");
}

struct FrontierEntry {
  double score;
  AlterationSet uni;
  bool operator<(const FrontierEntry& o) const {
    if (score != o.score) return score < o.score;
    if (uni.size() != o.uni.size()) return uni.size() < o.uni.size();
    return uni < o.uni;
  }
};

}  // namespace

double score_pair(const AlterationMatrix& matrix, const AlterationSet& s1,
                  const AlterationSet& s2) {
  if (s1 == s2) throw std::invalid_argument("score_pair: identical sets");
  return score_indicator_pair(matrix, matrix.union_of(s1), matrix.union_of(s2));
}

CandidatePool generate_candidates(const AlterationMatrix& matrix,
                                  const GreedyParams& params) {
  if (params.k_max < 2) throw std::invalid_argument("k_max must be >= 2");
  CandidatePool pool;
  pool.params = params;
  std::vector<BitRow> pool_bits;
  std::set<AlterationSet> present;

  const int m = matrix.row_count();
  for (int i = 0; i < m; ++i) {
    pool.sets.push_back({{i}, 1.0});
    pool_bits.push_back(matrix.row_bits(i));
    present.insert({i});
  }

  std::multiset<FrontierEntry> frontier;
  auto push_pairs_with = [&](std::size_t idx) {
    for (std::size_t j = 0; j < pool.sets.size(); ++j) {
      if (j == idx) continue;
      AlterationSet uni = set_union_of(pool.sets[idx].set, pool.sets[j].set);
      if (static_cast<int>(uni.size()) > params.k_max) continue;
      if (uni == pool.sets[idx].set || uni == pool.sets[j].set) continue;
      if (present.count(uni)) continue;
      frontier.insert(
          {score_indicator_pair(matrix, pool_bits[idx], pool_bits[j]), std::move(uni)});
    }
  };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      AlterationSet uni = set_union_of(pool.sets[i].set, pool.sets[j].set);
      if (present.count(uni)) continue;  // merged rows cannot collide, but cheap
      frontier.insert({score_indicator_pair(matrix, pool_bits[i], pool_bits[j]),
                       std::move(uni)});
    }

  const int epochs = params.k_max - 1;
  const int base = params.max_iter / epochs;
  for (int e = 1; e <= epochs; ++e) {
    const int iters = (e == epochs) ? params.max_iter - base * (epochs - 1) : base;
    const int cap = e + 1;
    for (int it = 0; it < iters; ++it) {
      const FrontierEntry* chosen = nullptr;
      for (auto f = frontier.begin(); f != frontier.end();) {
        if (present.count(f->uni)) {
          f = frontier.erase(f);
          continue;
        }
        if (static_cast<int>(f->uni.size()) <= cap) {
          chosen = &*f;
          break;
        }
        ++f;
      }
      if (!chosen) break;  // no admissible pair; move on to the next epoch

      const std::size_t idx = pool.sets.size();
      pool.sets.push_back({chosen->uni, chosen->score});
      pool_bits.push_back(matrix.union_of(chosen->uni));
      present.insert(chosen->uni);
      push_pairs_with(idx);
    }
  }
  return pool;
}

CandidatePool subset_closure(const CandidatePool& pool, std::size_t budget) {
  CandidatePool out;
  out.params = pool.params;
  std::set<AlterationSet> present;
  for (const auto& entry : pool.sets) {
    if (present.insert(entry.set).second) out.sets.push_back(entry);
  }
  const std::size_t original = out.sets.size();
  for (std::size_t i = 0; i < original; ++i) {
    const AlterationSet members = out.sets[i].set;  // copy: out.sets grows
    const int k = static_cast<int>(members.size());
    if (k < 3) continue;
    for (unsigned mask = 1; mask + 1 < (1u << k); ++mask) {
      if (std::popcount(mask) < 2) continue;
      AlterationSet sub;
      for (int b = 0; b < k; ++b)
        if (mask & (1u << b)) sub.push_back(members[b]);
      if (present.insert(sub).second) {
        if (out.sets.size() + 1 > budget)
          throw std::runtime_error("subset closure exceeds budget: " +
                                   std::to_string(out.sets.size() + 1) + " sets");
        out.sets.push_back({std::move(sub), 1.0});
      }
    }
  }
  return out;
}

}  // namespace excl
