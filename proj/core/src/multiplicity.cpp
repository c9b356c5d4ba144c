#include "excl/multiplicity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "excl/stats.hpp"

namespace excl {

WeightScheme::WeightScheme(int m, int k_max, double alpha_w)
    : m_(m), k_max_(k_max), alpha_w_(alpha_w) {
  if (m < 2 || k_max < 2 || k_max > m)
    throw std::invalid_argument("WeightScheme: need 2 <= k_max <= m");
  if (!(alpha_w > 0 && alpha_w <= 1))
    throw std::invalid_argument("WeightScheme: alpha_w must be in (0, 1]");

  // f_k = 1 - (1 - alpha)^(1/(m-k+1)), in log via expm1/log1p
  log_prefix_.assign(k_max + 1, 0.0);
  const double log1m_alpha = std::log1p(-alpha_w);
  double acc = 0;
  for (int k = 2; k <= k_max; ++k) {
    acc += std::log(-std::expm1(log1m_alpha / (m - k + 1)));
    log_prefix_[k] = acc;
  }

  std::vector<double> log_counts, log_terms;
  for (int l = 2; l <= k_max; ++l) {
    log_counts.push_back(log_binom(m, l));
    log_terms.push_back(log_binom(m, l) + log_prefix_[l]);
  }
  log_total_ = log_sum(log_counts);
  log_denom_ = log_sum(log_terms);
}

void WeightScheme::check_size(int size) const {
  if (size < 2 || size > k_max_)
    throw std::invalid_argument("set size out of [2, k_max]");
}

double WeightScheme::set_weight(int size) const {
  check_size(size);
  return std::exp(log_total_ + log_prefix_[size] - log_denom_);
}

double WeightScheme::log_correction_factor(int size) const {
  check_size(size);
  return log_denom_ - log_prefix_[size];
}

double WeightScheme::correction_factor(int size) const {
  return std::exp(log_correction_factor(size));
}

double correction_factor_approx(int m, double alpha_w, int size) {
  const double log_lead = std::log(std::exp(alpha_w) - 1 - alpha_w);
  return std::exp(log_lead - size * std::log(alpha_w) + std::lgamma(size + 1) +
                  log_binom(m, size));
}

std::vector<AdjustedResult> weighted_bonferroni(
    const std::vector<std::pair<AlterationSet, double>>& results,
    const WeightScheme& scheme, double level) {
  std::vector<AdjustedResult> out;
  out.reserve(results.size());
  for (const auto& [set, p_raw] : results) {
    AdjustedResult r;
    r.set = set;
    r.p_raw = p_raw;
    const int size = static_cast<int>(set.size());
    r.weight = scheme.set_weight(size);
    const double log_factor = scheme.log_correction_factor(size);
    r.log_p_adjusted = p_raw > 0 ? std::log(p_raw) + log_factor : kNegInf;
    r.p_adjusted = p_raw > 0 ? std::exp(r.log_p_adjusted) : 0.0;
    r.significant = r.log_p_adjusted <= std::log(level);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<bool> weighted_bh(
    const std::vector<std::pair<AlterationSet, double>>& results,
    const WeightScheme& scheme, double level) {
  const std::size_t n = results.size();
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i)
    q[i] = results[i].second / scheme.set_weight(static_cast<int>(results[i].first.size()));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return q[a] < q[b]; });
  std::size_t cut = 0;  // step-up: largest rank i with q_(i) <= i * level / n
  for (std::size_t i = n; i >= 1; --i) {
    if (q[order[i - 1]] <= static_cast<double>(i) * level / static_cast<double>(n)) {
      cut = i;
      break;
    }
  }
  std::vector<bool> reject(n, false);
  for (std::size_t i = 0; i < cut; ++i) reject[order[i]] = true;
  return reject;
}

std::vector<AdjustedResult> prune_nested(const std::vector<AdjustedResult>& significant) {
  std::vector<AdjustedResult> kept;
  for (std::size_t i = 0; i < significant.size(); ++i) {
    const auto& a = significant[i];
    bool dominated = false;
    for (std::size_t j = 0; j < significant.size() && !dominated; ++j) {
      if (j == i) continue;
      const auto& b = significant[j];
      if (!is_subset(a.set, b.set) && !is_subset(b.set, a.set)) continue;
      if (b.log_p_adjusted < a.log_p_adjusted)
        dominated = true;
      else if (b.log_p_adjusted == a.log_p_adjusted && b.set.size() < a.set.size())
        dominated = true;
    }
    if (!dominated) kept.push_back(a);
  }
  return kept;
}

}  // namespace excl
