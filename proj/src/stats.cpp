#include "gfuzz/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace gfuzz {

namespace {

constexpr int kExactMaxTotal = 16;

// Number of ways to choose n1 ranks out of n1+n2 so that the U statistic of
// that subset equals u. Classic two-index recurrence:
//   c(n1, n2, u) = c(n1-1, n2, u - n2) + c(n1, n2-1, u)
// Returns the full distribution over u = 0 .. n1*n2.
std::vector<double> exact_u_distribution(int n1, int n2) {
  // table[i][j] is the count vector for sample sizes (i, j).
  std::vector<std::vector<std::vector<double>>> table(
      static_cast<size_t>(n1) + 1,
      std::vector<std::vector<double>>(static_cast<size_t>(n2) + 1));
  for (int i = 0; i <= n1; ++i) {
    for (int j = 0; j <= n2; ++j) {
      auto& cell = table[static_cast<size_t>(i)][static_cast<size_t>(j)];
      cell.assign(static_cast<size_t>(i * j) + 1, 0.0);
      if (i == 0 || j == 0) {
        cell[0] = 1.0;
        continue;
      }
      const auto& up = table[static_cast<size_t>(i - 1)][static_cast<size_t>(j)];
      const auto& left = table[static_cast<size_t>(i)][static_cast<size_t>(j - 1)];
      for (int u = 0; u <= i * j; ++u) {
        double v = 0.0;
        if (u - j >= 0 && u - j < static_cast<int>(up.size()))
          v += up[static_cast<size_t>(u - j)];
        if (u < static_cast<int>(left.size())) v += left[static_cast<size_t>(u)];
        cell[static_cast<size_t>(u)] = v;
      }
    }
  }
  return table[static_cast<size_t>(n1)][static_cast<size_t>(n2)];
}

double normal_sf_times_two(double z_abs) {
  // two-sided tail of the standard normal
  return std::erfc(z_abs / std::sqrt(2.0));
}

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("mann_whitney_u: both samples must be non-empty");
  const int n1 = static_cast<int>(a.size());
  const int n2 = static_cast<int>(b.size());
  const int total = n1 + n2;

  struct Obs {
    double value;
    int group;  // 0 = a, 1 = b
  };
  std::vector<Obs> all;
  all.reserve(static_cast<size_t>(total));
  for (double v : a) all.push_back({v, 0});
  for (double v : b) all.push_back({v, 1});
  std::sort(all.begin(), all.end(),
            [](const Obs& x, const Obs& y) { return x.value < y.value; });

  // Midranks; tie runs share the average of the ranks they occupy.
  double rank_sum_a = 0.0;
  double tie_term = 0.0;  // sum of t^3 - t over tie runs
  bool has_ties = false;
  size_t i = 0;
  while (i < all.size()) {
    size_t j = i;
    while (j < all.size() && all[j].value == all[i].value) ++j;
    const double run = static_cast<double>(j - i);
    if (run > 1.0) {
      has_ties = true;
      tie_term += run * run * run - run;
    }
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k)
      if (all[k].group == 0) rank_sum_a += midrank;
    i = j;
  }

  const double u1 =
      rank_sum_a - static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;
  const double mean = static_cast<double>(n1) * static_cast<double>(n2) / 2.0;

  if (total <= kExactMaxTotal && !has_ties) {
    std::vector<double> dist = exact_u_distribution(n1, n2);
    double total_count = 0.0;
    for (double c : dist) total_count += c;
    const int u_int = static_cast<int>(std::llround(u1));
    double le = 0.0, ge = 0.0;
    for (int u = 0; u < static_cast<int>(dist.size()); ++u) {
      if (u <= u_int) le += dist[static_cast<size_t>(u)];
      if (u >= u_int) ge += dist[static_cast<size_t>(u)];
    }
    double p = 2.0 * std::min(le, ge) / total_count;
    return {u1, std::min(1.0, p)};
  }

  const double nn = static_cast<double>(total);
  const double variance =
      (static_cast<double>(n1) * static_cast<double>(n2) / 12.0) *
      ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
  if (variance <= 0.0) return {u1, 1.0};  // all observations identical
  const double sd = std::sqrt(variance);
  const double z = std::max(0.0, std::abs(u1 - mean) - 0.5) / sd;  // continuity corrected
  double p = normal_sf_times_two(z);
  return {u1, std::min(1.0, p)};
}

}  // namespace gfuzz
