#ifndef PROMO_STATS_HPP
#define PROMO_STATS_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace promo {

enum class Side { greater, less, two_sided };

struct TestResult {
  double statistic = 0.0;
  std::optional<double> p_value;  // absent when the test is undefined
  std::string note;               // sidedness, approximation used, degeneracy
};

double normal_cdf(double z);
double student_t_cdf(double t, double df);

// Exact binomial tail. greater: P(X >= k); less: P(X <= k); two_sided: sum of
// PMF values <= PMF(k) (minlike convention).
double binomial_test(std::size_t k, std::size_t n, double p0, Side side = Side::greater);

// Welch unequal-variance t test with Welch-Satterthwaite df. Optional per-
// observation reliability weights (effective sample sizes via (Σw)²/Σw²).
TestResult welch_t_test(std::span<const double> a, std::span<const double> b,
                        Side side = Side::two_sided,
                        std::span<const double> weights_a = {},
                        std::span<const double> weights_b = {});

// Two-sample Kolmogorov-Smirnov. Exact p (lattice-path count over all
// orderings, valid for tie-free samples) when n*m <= exact_limit, otherwise
// the asymptotic Kolmogorov distribution.
struct KsResult {
  double d = 0.0;
  double p_value = 1.0;
  bool exact = false;
};
KsResult ks_test(std::span<const double> a, std::span<const double> b,
                 std::size_t exact_limit = 10000);

// Wilcoxon signed-rank on paired differences (a[i] - b[i]); zero differences
// dropped, midranks for ties. Exact enumeration of the 2^n sign patterns for
// n <= exact_limit, normal approximation (with tie correction) above.
TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                Side side = Side::two_sided, std::size_t exact_limit = 25);

double mean(std::span<const double> v);
double sample_variance(std::span<const double> v);  // n-1 denominator
double pearson_r(std::span<const double> x, std::span<const double> y);

}  // namespace promo

#endif
