#include "wikicite/kendall.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace wikicite {

namespace {

void check_input(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw KendallInputError("kendall: length mismatch (" + std::to_string(x.size()) + " vs " +
                            std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw KendallInputError("kendall: need at least 2 observations");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw KendallInputError("kendall: non-finite value");
  }
}

// Tie groups of an already sorted sequence; returns the tied-pair count.
std::int64_t tie_groups(const std::vector<double>& sorted, std::vector<std::int64_t>& groups) {
  std::int64_t pairs = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const auto t = static_cast<std::int64_t>(j - i);
    if (t > 1) {
      groups.push_back(t);
      pairs += t * (t - 1) / 2;
    }
    i = j;
  }
  return pairs;
}

// Sorts v ascending, returning the number of strict inversions removed.
std::int64_t merge_count(std::vector<double>& v, std::vector<double>& scratch, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(v, scratch, lo, mid) + merge_count(v, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      scratch[k++] = v[j++];
    } else {
      scratch[k++] = v[i++];
    }
  }
  while (i < mid) scratch[k++] = v[i++];
  while (j < hi) scratch[k++] = v[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo), scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

double sum_poly(const std::vector<std::int64_t>& groups, double (*f)(double)) {
  double total = 0.0;
  for (auto t : groups) total += f(static_cast<double>(t));
  return total;
}

}  // namespace

KendallCounts kendall_counts(std::span<const double> x, std::span<const double> y) {
  check_input(x, y);
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });

  KendallCounts c;
  c.n = static_cast<std::int64_t>(n);
  c.pairs = c.n * (c.n - 1) / 2;

  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }
  c.x_ties = tie_groups(xs, c.x_groups);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && xs[j] == xs[i] && ys[j] == ys[i]) ++j;
    const auto t = static_cast<std::int64_t>(j - i);
    c.joint_ties += t * (t - 1) / 2;
    i = j;
  }

  std::vector<double> scratch(n);
  const std::int64_t discordant = merge_count(ys, scratch, 0, n);
  c.y_ties = tie_groups(ys, c.y_groups);
  c.s = c.pairs - c.x_ties - c.y_ties + c.joint_ties - 2 * discordant;
  return c;
}

double tau_from_counts(const KendallCounts& c) {
  const double denom = static_cast<double>(c.pairs - c.x_ties) * static_cast<double>(c.pairs - c.y_ties);
  if (denom <= 0.0) throw DegenerateError("kendall: a list is entirely tied; tau-b is undefined");
  const double tau = static_cast<double>(c.s) / std::sqrt(denom);
  return std::clamp(tau, -1.0, 1.0);
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  return tau_from_counts(kendall_counts(x, y));
}

double tie_corrected_variance(const KendallCounts& c) {
  const double n = static_cast<double>(c.n);
  auto a = [](double t) { return t * (t - 1.0) * (2.0 * t + 5.0); };
  auto b = [](double t) { return t * (t - 1.0); };
  auto d = [](double t) { return t * (t - 1.0) * (t - 2.0); };
  double var = (a(n) - sum_poly(c.x_groups, a) - sum_poly(c.y_groups, a)) / 18.0;
  var += sum_poly(c.x_groups, b) * sum_poly(c.y_groups, b) / (2.0 * n * (n - 1.0));
  if (c.n > 2) var += sum_poly(c.x_groups, d) * sum_poly(c.y_groups, d) / (9.0 * n * (n - 1.0) * (n - 2.0));
  return var;
}

double exact_two_sided_p(std::int64_t n, std::int64_t s) {
  if (n < 2 || n > 18) throw KendallInputError("exact p-value supports 2 <= n <= 18");
  // counts[k] = number of permutations of size m with k inversions.
  const std::int64_t max_inv = n * (n - 1) / 2;
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(max_inv + 1), 0);
  counts[0] = 1;
  for (std::int64_t m = 2; m <= n; ++m) {
    std::vector<std::uint64_t> next(counts.size(), 0);
    const std::int64_t top = m * (m - 1) / 2;
    for (std::int64_t k = 0; k <= top; ++k) {
      std::uint64_t sum = 0;
      for (std::int64_t j = 0; j < m && j <= k; ++j) sum += counts[static_cast<std::size_t>(k - j)];
      next[static_cast<std::size_t>(k)] = sum;
    }
    counts.swap(next);
  }
  // S = n0 - 2 * inversions.
  std::uint64_t extreme = 0, total = 0;
  const std::int64_t abs_s = s < 0 ? -s : s;
  for (std::int64_t k = 0; k <= max_inv; ++k) {
    total += counts[static_cast<std::size_t>(k)];
    const std::int64_t sk = max_inv - 2 * k;
    if ((sk < 0 ? -sk : sk) >= abs_s) extreme += counts[static_cast<std::size_t>(k)];
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

TauTest tau_p_value(std::span<const double> x, std::span<const double> y, PValueMethod method) {
  const auto c = kendall_counts(x, y);
  TauTest out;
  out.tau = tau_from_counts(c);
  const double var = tie_corrected_variance(c);
  const double corrected = std::max(std::abs(static_cast<double>(c.s)) - 1.0, 0.0);
  out.z = (c.s < 0 ? -corrected : corrected) / std::sqrt(var);
  if (method == PValueMethod::exact) {
    if (c.x_ties != 0 || c.y_ties != 0) throw KendallInputError("exact p-value requires untied data");
    out.p_value = exact_two_sided_p(c.n, c.s);
  } else {
    out.p_value = std::clamp(std::erfc(std::abs(out.z) / std::sqrt(2.0)), 0.0, 1.0);
  }
  return out;
}

}  // namespace wikicite
