#include "logperm/permcore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>
#include <vector>

#include "logperm/errors.hpp"

namespace logperm {

const char* engine_name(Engine e) {
    switch (e) {
        case Engine::brute: return "brute";
        case Engine::ryser: return "ryser";
        case Engine::dp: return "dp";
        case Engine::sis: return "sis";
    }
    return "?";
}

std::uint64_t dp_work_estimate(int m, int n) {
    return static_cast<std::uint64_t>(n) * (std::uint64_t(1) << m) *
           static_cast<std::uint64_t>(m);
}

// ---------------------------------------------------------------- brute

namespace {

void brute_rec(const LogMatrix& a, int i, std::uint32_t used, double partial,
               std::vector<double>& terms) {
    const int m = a.rows(), n = a.cols();
    if (i == m) {
        terms.push_back(partial);
        return;
    }
    for (int j = 0; j < n; ++j) {
        if (used & (std::uint32_t(1) << j)) continue;
        const double lv = a.log_at(i, j);
        if (lv == kNegInf) continue; // zero entry kills the injection
        brute_rec(a, i + 1, used | (std::uint32_t(1) << j), partial + lv, terms);
    }
}

} // namespace

PermResult perm_brute(const LogMatrix& a) {
    if (a.rows() > kBruteMaxM || a.cols() > kBruteMaxN)
        throw CeilingError("perm_brute: refuses m > 7 or n > 9 (use ryser or dp)");
    std::vector<double> terms;
    brute_rec(a, 0, 0, 0.0, terms);
    PermResult r;
    r.engine = Engine::brute;
    r.work = terms.size();
    r.log_perm = LogReal::from_log(log_sum_raw(terms));
    return r;
}

// ---------------------------------------------------------------- ryser

namespace {

struct RyserBuckets {
    long double pos = 0.0L, pos_c = 0.0L, neg = 0.0L, neg_c = 0.0L;
};

// perm A = sum_{S nonempty} (-1)^(n-|S|) prod_i (sum_{j in S} a_ij).
// Subsets are visited in Gray-code order of their index t in [lo, hi);
// the subset for index t is t ^ (t >> 1) and consecutive indices differ
// in bit ctz(t).  Entries arrive scaled to (0,1] per row; terms are
// accumulated relative to exp(M) with M = sum_i log(full row sum), which
// bounds every subset term because row sums are monotone in S.
//
// Accumulation runs in long double: even balanced, the bucket totals
// exceed the surviving difference by ~n^n/n! (measured 4e10 at n = 22),
// which eats 10-11 of double's 16 digits; the extra mantissa bits keep
// the answer at <= 1e-9 relative through n = 24.
RyserBuckets ryser_range(const std::vector<std::vector<double>>& e,
                         const std::vector<double>& inv_full,
                         std::uint64_t lo, std::uint64_t hi) {
    const int n = static_cast<int>(e.size());
    std::vector<long double> rowsum(static_cast<std::size_t>(n), 0.0L);
    std::vector<long double> comp(static_cast<std::size_t>(n), 0.0L);

    auto row_add = [&](int i, long double x) {
        long double& s = rowsum[static_cast<std::size_t>(i)];
        long double& c = comp[static_cast<std::size_t>(i)];
        const long double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    };

    // build the starting subset's row sums from scratch
    const std::uint64_t start = lo ^ (lo >> 1);
    for (int j = 0; j < n; ++j)
        if (start & (std::uint64_t(1) << j))
            for (int i = 0; i < n; ++i) row_add(i, e[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);

    RyserBuckets b;
    std::uint64_t subset = start;
    for (std::uint64_t t = lo; t < hi; ++t) {
        if (t != lo) {
            const int j = std::countr_zero(t);
            subset ^= (std::uint64_t(1) << j);
            const bool added = (subset >> j) & 1;
            for (int i = 0; i < n; ++i) {
                const double x = e[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                row_add(i, added ? x : -x);
            }
        }
        long double prod = 1.0L;
        for (int i = 0; i < n; ++i)
            prod *= (rowsum[static_cast<std::size_t>(i)] + comp[static_cast<std::size_t>(i)]) *
                    inv_full[static_cast<std::size_t>(i)];
        const bool negative = ((n - std::popcount(subset)) & 1) != 0;
        // two-bucket accumulation, inlined (prod can be a tiny negative
        // from compensated cancellation; route it by actual sign)
        long double v = negative ? -prod : prod;
        long double* s;
        long double* c;
        if (v >= 0.0L) { s = &b.pos; c = &b.pos_c; } else { v = -v; s = &b.neg; c = &b.neg_c; }
        const long double tt = *s + v;
        if (*s >= v)
            *c += (*s - tt) + v;
        else
            *c += (v - tt) + *s;
        *s = tt;
    }
    return b;
}

// does the positive-entry pattern admit a perfect matching?  Kuhn's
// augmenting paths; decides whether perm is structurally zero, which
// lets the engine tell an exact zero apart from numeric cancellation
bool support_has_matching(const LogMatrix& a) {
    const int m = a.rows(), n = a.cols();
    std::vector<int> match_col(static_cast<std::size_t>(n), -1);
    std::vector<char> seen(static_cast<std::size_t>(n));
    auto augment = [&](auto&& self, int i) -> bool {
        for (int j = 0; j < n; ++j) {
            if (seen[static_cast<std::size_t>(j)] || a.log_at(i, j) == kNegInf) continue;
            seen[static_cast<std::size_t>(j)] = 1;
            if (match_col[static_cast<std::size_t>(j)] < 0 ||
                self(self, match_col[static_cast<std::size_t>(j)])) {
                match_col[static_cast<std::size_t>(j)] = i;
                return true;
            }
        }
        return false;
    };
    for (int i = 0; i < m; ++i) {
        std::fill(seen.begin(), seen.end(), 0);
        if (!augment(augment, i)) return false;
    }
    return true;
}

} // namespace

PermResult perm_ryser(const LogMatrix& a, int workers) {
    const int n = a.cols();
    if (a.rows() != n)
        throw ConfigError("perm_ryser: needs a square matrix (use dp for rectangles)");
    if (n > kRyserMaxN)
        throw CeilingError("perm_ryser: refuses n > 24");
    if (workers < 1) throw ConfigError("perm_ryser: workers >= 1");

    // structurally zero permanents (no matching on the positive pattern)
    // would otherwise surface as a cancelled inclusion-exclusion sum
    if (!support_has_matching(a)) {
        PermResult r;
        r.engine = Engine::ryser;
        r.log_perm = LogReal::zero();
        r.work = 0;
        return r;
    }

    // Balance the matrix toward doubly stochastic first (Sinkhorn, in the
    // log domain).  perm(D1 A D2) = perm(A) * prod(D1) * prod(D2), so the
    // row/column factors are an exact bookkeeping device; what they buy is
    // conditioning: a balanced matrix has every inclusion-exclusion term
    // <= 1 while its permanent sits above the n!/n^n floor, so the
    // compensated sum keeps a positive margin even at n = 24.  Without
    // the column pass, draws whose large entries share a column cancel to
    // nothing.  Capped iterations: a matchable but decomposable support
    // only balances in the limit, and a partial balance is still exact.
    std::vector<double> rbal(static_cast<std::size_t>(n), 0.0);
    std::vector<double> cbal(static_cast<std::size_t>(n), 0.0);
    {
        std::vector<double> buf(static_cast<std::size_t>(n));
        for (int pass = 0; pass < 60; ++pass) {
            double worst = 0.0;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j)
                    buf[static_cast<std::size_t>(j)] =
                        a.log_at(i, j) - rbal[static_cast<std::size_t>(i)] -
                        cbal[static_cast<std::size_t>(j)];
                const double li = log_sum_raw(buf);
                rbal[static_cast<std::size_t>(i)] += li;
                worst = std::max(worst, std::abs(li));
            }
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i)
                    buf[static_cast<std::size_t>(i)] =
                        a.log_at(i, j) - rbal[static_cast<std::size_t>(i)] -
                        cbal[static_cast<std::size_t>(j)];
                const double lj = log_sum_raw(buf);
                cbal[static_cast<std::size_t>(j)] += lj;
                worst = std::max(worst, std::abs(lj));
            }
            if (worst < 1e-8) break;
        }
    }
    KahanSum bal_corr;
    for (double v : rbal) bal_corr.add(v);
    for (double v : cbal) bal_corr.add(v);

    // scale each balanced row by its max entry; accumulate the scale
    // separately
    double log_scale = bal_corr.total();
    std::vector<std::vector<double>> e(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i) {
        double mx = kNegInf;
        for (int j = 0; j < n; ++j)
            mx = std::max(mx, a.log_at(i, j) - rbal[static_cast<std::size_t>(i)] -
                                  cbal[static_cast<std::size_t>(j)]);
        log_scale += mx;
        for (int j = 0; j < n; ++j)
            e[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                std::exp(a.log_at(i, j) - rbal[static_cast<std::size_t>(i)] -
                         cbal[static_cast<std::size_t>(j)] - mx);
    }

    // M = sum_i log(full row sum of scaled entries) bounds every term
    std::vector<double> inv_full(static_cast<std::size_t>(n));
    double big_m = 0.0;
    for (int i = 0; i < n; ++i) {
        KahanSum s;
        for (int j = 0; j < n; ++j) s.add(e[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        const double full = s.total();
        inv_full[static_cast<std::size_t>(i)] = 1.0 / full;
        big_m += std::log(full);
    }

    const std::uint64_t count = (std::uint64_t(1) << n) - 1;
    const int w = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), count));

    std::vector<RyserBuckets> parts(static_cast<std::size_t>(w));
    if (w == 1) {
        parts[0] = ryser_range(e, inv_full, 1, count + 1);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = count / static_cast<std::uint64_t>(w);
        for (int k = 0; k < w; ++k) {
            const std::uint64_t lo = 1 + chunk * static_cast<std::uint64_t>(k);
            const std::uint64_t hi = (k == w - 1) ? count + 1 : lo + chunk;
            pool.emplace_back([&, k, lo, hi] { parts[static_cast<std::size_t>(k)] = ryser_range(e, inv_full, lo, hi); });
        }
        for (auto& th : pool) th.join();
    }

    // merge per-worker buckets in fixed worker order
    long double pos = 0.0L, neg = 0.0L;
    for (const auto& b : parts) {
        pos += b.pos + b.pos_c;
        neg += b.neg + b.neg_c;
    }
    const long double diff = pos - neg;
    if (!(diff > 0.0L))
        throw NumericError("perm_ryser: inclusion-exclusion cancelled to <= 0; the "
                           "matrix exceeds extended-precision dynamic range (use perm_dp)");
    PermResult r;
    r.engine = Engine::ryser;
    r.work = count;
    r.log_perm = LogReal::from_log(
        static_cast<double>(static_cast<long double>(log_scale) + big_m + std::log(diff)));
    return r;
}

// ------------------------------------------------------------------- dp

PermResult perm_dp(const LogMatrix& a, std::uint64_t work_budget) {
    const int m = a.rows(), n = a.cols();
    if (m > kDpMaxM)
        throw CeilingError("perm_dp: refuses m > 22");
    const std::uint64_t est = dp_work_estimate(m, n);
    if (est > work_budget)
        throw CeilingError("perm_dp: estimated work " + std::to_string(est) +
                           " exceeds budget " + std::to_string(work_budget));

    // W[S] = permanent of (rows S) x (columns seen so far); scanning
    // columns left to right, each column extends S by at most one row.
    // Updating S in descending numeric order keeps W[S \ {i}] at its
    // previous-column value during the sweep.
    const std::size_t full = std::size_t(1) << m;
    std::vector<double> w(full, kNegInf);
    w[0] = 0.0;
    std::uint64_t work = 0;
    for (int c = 0; c < n; ++c) {
        for (std::size_t s = full - 1; s > 0; --s) {
            double acc = w[s];
            std::size_t rem = s;
            while (rem) {
                const int i = std::countr_zero(rem);
                rem &= rem - 1;
                const double prev = w[s ^ (std::size_t(1) << i)];
                if (prev != kNegInf) {
                    const double lv = a.log_at(i, c);
                    if (lv != kNegInf) acc = log_add_raw(acc, prev + lv);
                }
                ++work;
            }
            w[s] = acc;
        }
    }
    PermResult r;
    r.engine = Engine::dp;
    r.work = work;
    r.log_perm = LogReal::from_log(w[full - 1]);
    return r;
}

// ------------------------------------------------------------------ sis

namespace {

// one proposal path; returns the log weight (product of restricted row
// sums).  The column for row i of sample k is driven by uniform01(seed,
// k, i), so the path depends only on (seed, sample index).
double sis_path(const LogMatrix& a, const SeedSpec& s, std::uint64_t sample) {
    const int m = a.rows(), n = a.cols();
    std::vector<int> avail(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) avail[static_cast<std::size_t>(j)] = j;
    double logw = 0.0;
    std::vector<double> scaled(static_cast<std::size_t>(n));
    for (int i = 0; i < m; ++i) {
        const int navail = n - i;
        // restricted row in scaled linear domain
        double mr = kNegInf;
        for (int t = 0; t < navail; ++t)
            mr = std::max(mr, a.log_at(i, avail[static_cast<std::size_t>(t)]));
        if (mr == kNegInf) return kNegInf;  // dead end: zero-weight path
        KahanSum sum;
        int last_pos = 0;
        for (int t = 0; t < navail; ++t) {
            scaled[static_cast<std::size_t>(t)] =
                std::exp(a.log_at(i, avail[static_cast<std::size_t>(t)]) - mr);
            if (scaled[static_cast<std::size_t>(t)] > 0.0) last_pos = t;
            sum.add(scaled[static_cast<std::size_t>(t)]);
        }
        const double total = sum.total();
        // inverse-CDF pick among the available columns (ascending order);
        // the rounding fallback must never land on a zero entry
        const double u = uniform01(s, sample, static_cast<std::uint64_t>(i));
        const double target = u * total;
        double cum = 0.0;
        int pick = last_pos;
        for (int t = 0; t < navail; ++t) {
            cum += scaled[static_cast<std::size_t>(t)];
            if (target <= cum && scaled[static_cast<std::size_t>(t)] > 0.0) { pick = t; break; }
        }
        logw += mr + std::log(total);
        avail.erase(avail.begin() + pick);
    }
    return logw;
}

} // namespace

PermResult perm_sis(const LogMatrix& a, std::uint64_t samples, const SeedSpec& s0,
                    int workers) {
    if (samples < 1) throw ConfigError("perm_sis: needs samples >= 1");
    if (workers < 1) throw ConfigError("perm_sis: workers >= 1");

    // private lane: even if the caller hands us the seed the matrix was
    // generated from, proposal draws stay independent of the entries
    const SeedSpec s = subseed(s0, 0x5150'AB1E'0000'0001ULL);

    std::vector<double> logw(samples);
    const int w = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), samples));
    if (w == 1) {
        for (std::uint64_t k = 0; k < samples; ++k) logw[k] = sis_path(a, s, k);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (samples + static_cast<std::uint64_t>(w) - 1) / static_cast<std::uint64_t>(w);
        for (int t = 0; t < w; ++t) {
            const std::uint64_t lo = chunk * static_cast<std::uint64_t>(t);
            const std::uint64_t hi = std::min(samples, lo + chunk);
            pool.emplace_back([&, lo, hi] {
                for (std::uint64_t k = lo; k < hi; ++k) logw[k] = sis_path(a, s, k);
            });
        }
        for (auto& th : pool) th.join();
    }

    // mean and delta-method stderr of log(perm), all in log domain
    const double log_n = std::log(static_cast<double>(samples));
    const double log_mean = log_sum_raw(logw) - log_n;
    PermResult r;
    r.engine = Engine::sis;
    r.work = samples * static_cast<std::uint64_t>(a.rows());
    r.log_perm = LogReal::from_log(log_mean);
    if (log_mean == kNegInf) {  // every sampled path was zero-weight
        r.est_stderr_log = 0.0;
        return r;
    }
    if (samples >= 2) {
        std::vector<double> twice(logw.size());
        for (std::size_t k = 0; k < logw.size(); ++k) twice[k] = 2.0 * logw[k];
        const double log_m2 = log_sum_raw(twice) - log_n;
        const double gap = 2.0 * log_mean - log_m2;  // <= 0 up to rounding
        double se = 0.0;
        if (gap < 0.0) {
            // var = (m2 - mean^2) * n/(n-1);  se(log) = sd(mean)/mean
            const double log_var = log_m2 + std::log1p(-std::exp(gap)) +
                                   std::log(static_cast<double>(samples) /
                                            static_cast<double>(samples - 1));
            se = std::exp(0.5 * log_var - 0.5 * log_n - log_mean);
        }
        r.est_stderr_log = se;
    }
    return r;
}

} // namespace logperm
