#include "excl/combine.hpp"

#include <cmath>
#include <stdexcept>

#include "excl/stats.hpp"

namespace excl {

double pairwise_weight(int n_tau, int c1, int c2) {
  if (c1 <= 0 || c1 >= n_tau || c2 <= 0 || c2 >= n_tau) return 0;
  const double n = n_tau;
  const double inv_var = n / (static_cast<double>(c1) * c2) +
                         n / (static_cast<double>(c1) * (n - c2)) +
                         n / (static_cast<double>(n - c1) * c2) +
                         n / ((n - c1) * (n - c2));
  return 1.0 / std::sqrt(inv_var);
}

double group_weight(std::span<const double> pair_weights) {
  if (pair_weights.empty())
    throw std::invalid_argument("group_weight: empty pair weight sequence");
  double ss = 0;
  for (double v : pair_weights) ss += v * v;
  return std::sqrt(ss);
}

double stouffer(std::span<const double> ps, std::span<const double> ws) {
  if (ps.size() != ws.size())
    throw std::invalid_argument("stouffer: length mismatch");
  double num = 0, ss = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ws[i] <= 0) continue;
    if (ps[i] <= 0) return 0;
    num += ws[i] * norm_quantile(ps[i]);
    ss += ws[i] * ws[i];
  }
  if (ss <= 0) throw std::invalid_argument("stouffer: no positive weight");
  const double z = num / std::sqrt(ss);
  if (z < -8) return std::exp(log_norm_cdf(z));
  return norm_cdf(z);
}

double randomize_p(const PValueTriple& triple, double u) {
  return triple.p - (triple.p - triple.p_minus) * u;
}

double combine_across_groups(std::span<const GroupEvidence> evidence,
                             const CombineConfig& config,
                             const std::string& set_key) {
  std::vector<double> ps, ws;
  for (const auto& ev : evidence) {
    if (ev.weight <= 0) continue;
    double p;
    if (config.mode == CombineMode::MID) {
      p = ev.triple.mid;
      if (p >= 1) continue;  // degenerate single-point support
    } else {
      const double u = keyed_uniform(config.seed, set_key + "|" + ev.group);
      p = randomize_p(ev.triple, u);
    }
    ps.push_back(p);
    ws.push_back(ev.weight);
  }
  if (ps.empty()) return 1;  // no informative group
  return stouffer(ps, ws);
}

}  // namespace excl
