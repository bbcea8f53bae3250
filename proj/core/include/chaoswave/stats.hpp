#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace chaoswave {

struct McNemarResult {
  std::uint64_t b = 0;  // A correct, B wrong
  std::uint64_t c = 0;  // A wrong, B correct
  // Continuity-corrected chi-square (|b-c|-1)^2/(b+c); nullopt when b+c == 0.
  std::optional<double> statistic;
  std::optional<double> p_value;
  bool exact = false;  // p from the exact binomial (b+c < 25)

  bool significant(double alpha = 0.05) const noexcept { return p_value && *p_value < alpha; }
};

McNemarResult mcnemar_from_counts(std::uint64_t b, std::uint64_t c);
McNemarResult mcnemar_test(const std::vector<int>& preds_a, const std::vector<int>& preds_b,
                           const std::vector<int>& labels);

/// Result of a paired test. An undefined result (zero variance, too few
/// nonzero differences) carries nullopt statistic and p-value plus a reason.
struct PairedTestResult {
  std::optional<double> statistic;
  std::optional<double> p_value;
  std::string note;

  bool defined() const noexcept { return p_value.has_value(); }
  bool significant(double alpha = 0.05) const noexcept { return p_value && *p_value < alpha; }
};

/// Two-sided paired t-test on xs - ys with n-1 degrees of freedom.
PairedTestResult paired_t_test(const std::vector<double>& xs, const std::vector<double>& ys);

/// Wilcoxon signed-rank test; zero differences are dropped and tied |d|
/// receive average ranks. statistic = min(W+, W-). Exact two-sided p from
/// the signed-rank distribution for up to 30 nonzero differences, normal
/// approximation with tie correction above that. Needs >= 5 nonzero
/// differences.
PairedTestResult wilcoxon_signed_rank(const std::vector<double>& xs, const std::vector<double>& ys);

/// Sample mean and (n-1) standard deviation; sd is nullopt for n < 2.
struct MeanSd {
  double mean = 0.0;
  std::optional<double> sd;
};
MeanSd mean_sd(const std::vector<double>& values);

}  // namespace chaoswave
