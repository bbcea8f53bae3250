#include "chaoswave/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>

#include "chaoswave/errors.hpp"

namespace chaoswave {

McNemarResult mcnemar_from_counts(std::uint64_t b, std::uint64_t c) {
  McNemarResult r;
  r.b = b;
  r.c = c;
  const std::uint64_t n = b + c;
  if (n == 0) return r;
  const double diff = std::abs(static_cast<double>(b) - static_cast<double>(c)) - 1.0;
  r.statistic = diff * diff / static_cast<double>(n);
  if (n < 25) {
    // Two-sided exact binomial with p = 1/2.
    const std::uint64_t k = std::min(b, c);
    double tail = 0.0, term = std::ldexp(1.0, -static_cast<int>(n));  // C(n,0) / 2^n
    for (std::uint64_t i = 0; i <= k; ++i) {
      tail += term;
      term = term * static_cast<double>(n - i) / static_cast<double>(i + 1);
    }
    r.p_value = std::min(1.0, 2.0 * tail);
    r.exact = true;
  } else {
    r.p_value = std::erfc(std::sqrt(*r.statistic / 2.0));
  }
  return r;
}

McNemarResult mcnemar_test(const std::vector<int>& preds_a, const std::vector<int>& preds_b,
                           const std::vector<int>& labels) {
  if (preds_a.size() != labels.size() || preds_b.size() != labels.size()) {
    throw InvalidInput("mcnemar_test: sequences must have equal length");
  }
  std::uint64_t b = 0, c = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool a_ok = preds_a[i] == labels[i];
    const bool b_ok = preds_b[i] == labels[i];
    if (a_ok && !b_ok) ++b;
    if (!a_ok && b_ok) ++c;
  }
  return mcnemar_from_counts(b, c);
}

MeanSd mean_sd(const std::vector<double>& values) {
  MeanSd r;
  if (values.empty()) return r;
  r.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return r;
}

PairedTestResult paired_t_test(const std::vector<double>& xs, const std::vector<double>& ys) {
  PairedTestResult r;
  if (xs.size() != ys.size()) {
    r.note = "length mismatch";
    return r;
  }
  if (xs.size() < 2) {
    r.note = "need at least two pairs";
    return r;
  }
  std::vector<double> d(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) d[i] = xs[i] - ys[i];
  const MeanSd ms = mean_sd(d);
  if (!ms.sd || *ms.sd <= 1e-12 * std::max(1.0, std::abs(ms.mean))) {
    r.note = "zero variance in paired differences";
    return r;
  }
  const double n = static_cast<double>(d.size());
  const double t = ms.mean / (*ms.sd / std::sqrt(n));
  const boost::math::students_t dist(n - 1.0);
  r.statistic = t;
  r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
  return r;
}

PairedTestResult wilcoxon_signed_rank(const std::vector<double>& xs, const std::vector<double>& ys) {
  PairedTestResult r;
  if (xs.size() != ys.size()) {
    r.note = "length mismatch";
    return r;
  }
  std::vector<double> d;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] != ys[i]) d.push_back(xs[i] - ys[i]);
  }
  const std::size_t n = d.size();

  // Average ranks of |d|, doubled so they stay integral.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::sort(order, [&](std::size_t a, std::size_t b) { return std::abs(d[a]) < std::abs(d[b]); });
  std::vector<std::uint64_t> rank2(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && std::abs(d[order[j]]) == std::abs(d[order[i]])) ++j;
    const std::uint64_t doubled = i + 1 + j;  // 2 * average of ranks i+1..j
    for (std::size_t t = i; t < j; ++t) rank2[order[t]] = doubled;
    const double ties = static_cast<double>(j - i);
    tie_term += ties * ties * ties - ties;
    i = j;
  }
  std::uint64_t w_plus2 = 0, total2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total2 += rank2[i];
    if (d[i] > 0) w_plus2 += rank2[i];
  }
  const std::uint64_t w_min2 = std::min(w_plus2, total2 - w_plus2);
  r.statistic = static_cast<double>(w_min2) / 2.0;
  if (n < 5) {
    r.note = "fewer than 5 nonzero differences";
    r.p_value.reset();
    return r;
  }

  if (n <= 30) {
    // Null distribution of the doubled W+: every sign pattern is equally likely.
    std::vector<double> ways(total2 + 1, 0.0);
    ways[0] = 1.0;
    for (std::uint64_t rk : rank2) {
      for (std::uint64_t s = total2; s + 1 > rk; --s) ways[s] += ways[s - rk];
    }
    double below = 0.0;
    for (std::uint64_t s = 0; s <= w_min2; ++s) below += ways[s];
    r.p_value = std::min(1.0, 2.0 * below / std::ldexp(1.0, static_cast<int>(n)));
  } else {
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    const double z = (static_cast<double>(w_min2) / 2.0 - mean) / std::sqrt(var);
    r.p_value = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
  }
  return r;
}

}  // namespace chaoswave
