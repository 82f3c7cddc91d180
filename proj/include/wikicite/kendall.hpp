#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace wikicite {

/// Length mismatch, n < 2 or non-finite input.
class KendallInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One of the lists is fully tied, so tau-b is undefined.
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Pair counts behind tau-b, computed in O(n log n) (Knight's merge-sort
/// method). `s` is concordant minus discordant pairs.
struct KendallCounts {
  std::int64_t n = 0;
  std::int64_t s = 0;
  std::int64_t pairs = 0;      // n(n-1)/2
  std::int64_t x_ties = 0;     // pairs tied in x
  std::int64_t y_ties = 0;     // pairs tied in y
  std::int64_t joint_ties = 0; // pairs tied in both
  std::vector<std::int64_t> x_groups;  // sizes of tie groups (>1) in x
  std::vector<std::int64_t> y_groups;
};

KendallCounts kendall_counts(std::span<const double> x, std::span<const double> y);

/// (C - D) / sqrt((n0 - n1)(n0 - n2)).
double kendall_tau_b(std::span<const double> x, std::span<const double> y);
double tau_from_counts(const KendallCounts& counts);

/// Null variance of S with the usual tie corrections.
double tie_corrected_variance(const KendallCounts& counts);

enum class PValueMethod {
  normal,  // continuity-corrected normal approximation on S
  exact,   // exact null distribution over all n! orderings; no ties only
};

struct TauTest {
  double tau = 0.0;
  double z = 0.0;
  double p_value = 1.0;  // two-sided
};

/// Two-sided test of independence. The exact method throws
/// KendallInputError when either list has ties or n > 18; z is still the
/// normal-approximation statistic.
TauTest tau_p_value(std::span<const double> x, std::span<const double> y, PValueMethod method = PValueMethod::normal);

/// P(|S| >= |s|) for n untied observations, from the inversion-count
/// (Mahonian) distribution. n <= 18 so that n! is exact in a double.
double exact_two_sided_p(std::int64_t n, std::int64_t s);

}  // namespace wikicite
