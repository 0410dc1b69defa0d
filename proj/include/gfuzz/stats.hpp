#ifndef GFUZZ_STATS_HPP
#define GFUZZ_STATS_HPP

#include <span>

namespace gfuzz {

struct MannWhitneyResult {
  double u;            // U statistic of the first sample
  double p_two_sided;
};

// Two-sample Mann-Whitney U with midranks for ties. The two-sided p-value is
// exact (2 * min(P(U <= u), P(U >= u)), capped at 1) when the combined size
// is at most 16 and there are no ties; otherwise the normal approximation
// with tie and continuity corrections is used. Degenerate samples (zero rank
// variance) yield p = 1.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

}  // namespace gfuzz

#endif
