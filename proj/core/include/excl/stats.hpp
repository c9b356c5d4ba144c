#ifndef EXCL_STATS_HPP
#define EXCL_STATS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

// Shared numeric kernels: log-space combinatorics, normal cdf/quantile with
// usable accuracy far into the tails, and the counter-based uniform generator
// used for reproducible p-value randomisation.
namespace excl {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(n choose k); -inf outside 0 <= k <= n
double log_binom(double n, double k);

// log(n!), cached per thread for integer arguments
double log_factorial(int n);

// integer-argument log(n choose k) backed by the factorial cache
double log_binom_int(int n, int k);

// log(exp(a) + exp(b)) without overflow
double log_add(double a, double b);

// sum of log-space terms
double log_sum(std::span<const double> terms);

// Phi(z), standard normal CDF
double norm_cdf(double z);

// log Phi(z); accurate for arbitrarily negative z (asymptotic series past
// the range where erfc underflows)
double log_norm_cdf(double z);

// Phi^{-1}(p); rational initial guess refined by Newton steps on log Phi,
// keeps relative accuracy for p down to ~1e-300
double norm_quantile(double p);

// SplitMix64 finaliser
std::uint64_t mix64(std::uint64_t x);

// Deterministic uniform in the open interval (0,1) keyed by the master seed
// and a canonical string key. Independent of call order and thread count.
double keyed_uniform(std::uint64_t seed, std::string_view key);

}  // namespace excl

#endif
