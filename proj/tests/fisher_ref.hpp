#ifndef EXCL_TESTS_FISHER_REF_HPP
#define EXCL_TESTS_FISHER_REF_HPP

#include <algorithm>
#include <vector>

// Reference one-sided 2x2 Fisher exact test, independent of the library's
// log-gamma convolution path: unnormalised hypergeometric terms built by a
// long double ratio recurrence, normalised by their own sum.
namespace excl::test {

// P(X <= x_obs) for X ~ Hyperg(n; c1 marked, c2 drawn): the "less" tail of
// the co-occurrence count. Equivalent to the one-sided Fisher p-value for
// anti-co-occurrence with union size gamma = c1 + c2 - x_obs.
inline double fisher22_less(int n, int c1, int c2, int x_obs) {
  const int lo = std::max(0, c1 + c2 - n);
  const int hi = std::min(c1, c2);
  std::vector<long double> terms;
  long double t = 1.0L;
  terms.push_back(t);
  for (int k = lo; k < hi; ++k) {
    t *= static_cast<long double>(c1 - k) * (c2 - k) /
         (static_cast<long double>(k + 1) * (n - c1 - c2 + k + 1));
    terms.push_back(t);
  }
  long double total = 0, tail = 0;
  for (int k = lo; k <= hi; ++k) {
    total += terms[k - lo];
    if (k <= x_obs) tail += terms[k - lo];
  }
  return static_cast<double>(tail / total);
}

}  // namespace excl::test

#endif
