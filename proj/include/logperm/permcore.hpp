#pragma once
// Permanent engines.  For an m x n matrix with m <= n the permanent is
//
//   perm A = sum over injections f: rows -> columns of prod_i a_{i, f(i)}
//
// All engines report log(perm) and never materialize linear-domain
// permanents.
//
//   perm_brute  - direct sum over all n!/(n-m)! injections.  Tiny sizes
//                 only; this is the ground truth everything else is
//                 measured against.
//   perm_ryser  - square only.  Gray-coded inclusion-exclusion over
//                 column subsets, O(2^n * n).  Rows are scaled by their
//                 maximum entry, subset row-sums are maintained
//                 incrementally in the scaled linear domain with one
//                 compensation term per row, and the signed subset terms
//                 go through the two-bucket accumulator.  Alternating
//                 signs cost precision: good to ~1e-9 relative (in log)
//                 through n = 16 and ~1e-6 at n = 24.  Rows whose entries
//                 span more than ~600 in log exhaust double range; the
//                 engine detects the resulting cancellation and raises
//                 NumericError instead of returning garbage (use perm_dp).
//   perm_dp     - rectangular subset DP over columns, state = set of
//                 matched rows, O(n * 2^m * m) log_add operations.  Only
//                 additions of positive terms, so it is subtraction-free
//                 and unconditionally stable: the truth engine wherever
//                 it fits, and the cross-check for perm_ryser.
//   perm_sis    - sequential importance sampling: row by row, pick a
//                 column with probability proportional to the entry among
//                 the unused columns; the sample weight is the product of
//                 restricted row sums.  Unbiased for any positive matrix.
//                 Reported standard error of log(perm) is delta-method.

#include <cstdint>
#include <optional>

#include "logperm/logreal.hpp"
#include "logperm/matrix.hpp"

namespace logperm {

enum class Engine { brute, ryser, dp, sis };

const char* engine_name(Engine e);

struct PermResult {
    LogReal log_perm;                     // the permanent, log domain
    Engine engine;
    std::optional<double> est_stderr_log; // sis only, >= 2 samples
    std::uint64_t work = 0;               // elementary terms processed
};

inline constexpr int kBruteMaxM = 7;
inline constexpr int kBruteMaxN = 9;
inline constexpr int kRyserMaxN = 24;
inline constexpr int kDpMaxM = 22;
inline constexpr std::uint64_t kDefaultDpBudget = std::uint64_t(1) << 31;

PermResult perm_brute(const LogMatrix& a);

// workers > 1 partitions the subset range; single worker is
// bit-deterministic, multi-worker results agree within the stated
// tolerances (merge order is fixed, per-worker rounding is not)
PermResult perm_ryser(const LogMatrix& a, int workers = 1);

PermResult perm_dp(const LogMatrix& a, std::uint64_t work_budget = kDefaultDpBudget);

// samples paths keyed by (seed, sample index): bit-deterministic for a
// fixed seed regardless of worker count
PermResult perm_sis(const LogMatrix& a, std::uint64_t samples, const SeedSpec& s,
                    int workers = 1);

// work estimate used for the perm_dp admission check (n * 2^m * m)
std::uint64_t dp_work_estimate(int m, int n);

} // namespace logperm
