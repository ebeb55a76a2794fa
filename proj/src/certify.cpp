#include "logperm/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "logperm/errors.hpp"
#include "logperm/permcore.hpp"

namespace logperm {

BinaryMatrix::BinaryMatrix(int m_, int n_) : m(m_), n(n_) {
    if (m < 1 || n < 1 || m > n)
        throw ConfigError("binary matrix: needs 1 <= m <= n");
    bits.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(n), 0);
}

int BinaryMatrix::row_ones(int i) const {
    int c = 0;
    for (int j = 0; j < n; ++j) c += at(i, j) ? 1 : 0;
    return c;
}

BinaryMatrix threshold(const LogMatrix& a, double log_q) {
    BinaryMatrix b(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            b.set(i, j, a.log_at(i, j) >= log_q);
    return b;
}

namespace {

bool try_augment(const BinaryMatrix& b, int i, std::vector<int>& row_of_col,
                 std::vector<char>& visited) {
    for (int j = 0; j < b.n; ++j) {
        if (!b.at(i, j) || visited[static_cast<std::size_t>(j)]) continue;
        visited[static_cast<std::size_t>(j)] = 1;
        if (row_of_col[static_cast<std::size_t>(j)] < 0 ||
            try_augment(b, row_of_col[static_cast<std::size_t>(j)], row_of_col, visited)) {
            row_of_col[static_cast<std::size_t>(j)] = i;
            return true;
        }
    }
    return false;
}

} // namespace

HallResult hall_check(const BinaryMatrix& b) {
    std::vector<int> row_of_col(static_cast<std::size_t>(b.n), -1);
    int matched = 0;
    for (int i = 0; i < b.m; ++i) {
        std::vector<char> visited(static_cast<std::size_t>(b.n), 0);
        if (try_augment(b, i, row_of_col, visited)) ++matched;
    }
    HallResult r;
    r.matching.assign(static_cast<std::size_t>(b.m), -1);
    for (int j = 0; j < b.n; ++j)
        if (row_of_col[static_cast<std::size_t>(j)] >= 0)
            r.matching[static_cast<std::size_t>(row_of_col[static_cast<std::size_t>(j)])] = j;
    r.saturated = (matched == b.m);
    if (!r.saturated) {
        // alternating-path forest from the unmatched rows: reachable rows
        // form W, reachable columns form N(W), and |N(W)| = |W| - (number
        // of unmatched roots) < |W|
        std::vector<char> row_seen(static_cast<std::size_t>(b.m), 0);
        std::vector<char> col_seen(static_cast<std::size_t>(b.n), 0);
        std::vector<int> stack;
        for (int i = 0; i < b.m; ++i)
            if (r.matching[static_cast<std::size_t>(i)] < 0 && !row_seen[static_cast<std::size_t>(i)]) {
                row_seen[static_cast<std::size_t>(i)] = 1;
                stack.push_back(i);
            }
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            for (int j = 0; j < b.n; ++j) {
                if (!b.at(i, j) || col_seen[static_cast<std::size_t>(j)]) continue;
                col_seen[static_cast<std::size_t>(j)] = 1;
                const int i2 = row_of_col[static_cast<std::size_t>(j)];
                if (i2 >= 0 && !row_seen[static_cast<std::size_t>(i2)]) {
                    row_seen[static_cast<std::size_t>(i2)] = 1;
                    stack.push_back(i2);
                }
            }
        }
        for (int i = 0; i < b.m; ++i)
            if (row_seen[static_cast<std::size_t>(i)]) r.violating_rows.push_back(i);
        for (int j = 0; j < b.n; ++j)
            if (col_seen[static_cast<std::size_t>(j)]) r.neighborhood.push_back(j);
    }
    return r;
}

namespace {

// log of k!/(k-m)! when k >= m, else log k!
double factorial_route(int k, int m) {
    if (k >= m)
        return std::lgamma(static_cast<double>(k) + 1.0) -
               std::lgamma(static_cast<double>(k - m) + 1.0);
    return std::lgamma(static_cast<double>(k) + 1.0);
}

} // namespace

LogReal mann_ryser_bound(const BinaryMatrix& b) {
    if (!hall_check(b).saturated)
        throw ConfigError("mann_ryser_bound: matrix has no row-saturating matching; "
                          "the bound does not apply");
    int k = b.n;
    for (int i = 0; i < b.m; ++i) k = std::min(k, b.row_ones(i));
    return LogReal::from_log(factorial_route(k, b.m));
}

const char* cert_method_name(CertMethod m) {
    switch (m) {
        case CertMethod::greedy_hall: return "greedy_hall";
        case CertMethod::rowsum: return "rowsum";
        case CertMethod::rowmax_factorial: return "rowmax_factorial";
    }
    return "?";
}

double greedy_injection_logsum(const LogMatrix& a, std::vector<int>* cols_out) {
    std::vector<char> used(static_cast<std::size_t>(a.cols()), 0);
    double total = 0.0;
    if (cols_out) cols_out->clear();
    for (int i = 0; i < a.rows(); ++i) {
        double best = kNegInf;
        int best_j = -1;
        for (int j = 0; j < a.cols(); ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            const double v = a.log_at(i, j);
            if (v > best) { best = v; best_j = j; }
        }
        used[static_cast<std::size_t>(best_j)] = 1;
        total += best;
        if (cols_out) cols_out->push_back(best_j);
    }
    return total;
}

Certificate lower_certificate(const LogMatrix& a, double rho, double log_q) {
    if (!(rho > 0.0 && rho < 1.0))
        throw ConfigError("lower_certificate: needs rho in (0,1)");
    const int m = a.rows(), n = a.cols();
    const int k = static_cast<int>(std::floor(rho * m));

    // greedy pivots: step i works on original row i, maxima taken over
    // the still-live columns, ties resolved to the lowest column index
    std::vector<char> col_used(static_cast<std::size_t>(n), 0);
    std::vector<GreedyPivot> pivots;
    double pivot_sum = 0.0;
    for (int i = 0; i < k; ++i) {
        double best = kNegInf;
        int best_j = -1;
        for (int j = 0; j < n; ++j) {
            if (col_used[static_cast<std::size_t>(j)]) continue;
            const double v = a.log_at(i, j);
            if (v > best) { best = v; best_j = j; }
        }
        col_used[static_cast<std::size_t>(best_j)] = 1;
        pivots.push_back({i, best_j, best});
        pivot_sum += best;
    }

    // remainder: rows k..m-1 x live columns
    SubmatrixSelector sel;
    for (int i = k; i < m; ++i) sel.rows.push_back(i);
    for (int j = 0; j < n; ++j)
        if (!col_used[static_cast<std::size_t>(j)]) sel.cols.push_back(j);
    const LogMatrix rem = a.extract(sel);
    const int r = rem.rows();

    // threshold route: q^r * (factorial bound) when Hall passes
    double route_threshold = kNegInf;
    std::vector<int> matching_orig;
    const BinaryMatrix bin = threshold(rem, log_q);
    const HallResult hall = hall_check(bin);
    if (hall.saturated) {
        int kmin = bin.n;
        for (int i = 0; i < bin.m; ++i) kmin = std::min(kmin, bin.row_ones(i));
        route_threshold = static_cast<double>(r) * log_q + factorial_route(kmin, r);
        matching_orig.reserve(static_cast<std::size_t>(r));
        for (int i = 0; i < r; ++i)
            matching_orig.push_back(
                sel.cols[static_cast<std::size_t>(hall.matching[static_cast<std::size_t>(i)])]);
    }

    // injection route: greedy row-maxima product of the remainder
    std::vector<int> inj_cols_local;
    const double route_injection = greedy_injection_logsum(rem, &inj_cols_local);

    Certificate c;
    c.side = Certificate::Side::lower;
    c.pivots = std::move(pivots);
    c.log_q = log_q;
    if (route_threshold >= route_injection) {
        c.method = CertMethod::greedy_hall;
        c.log_bound = pivot_sum + route_threshold;
        c.matching = std::move(matching_orig);
    } else {
        c.method = CertMethod::rowmax_factorial;
        c.log_bound = pivot_sum + route_injection;
        c.matching.reserve(inj_cols_local.size());
        for (int jj : inj_cols_local)
            c.matching.push_back(sel.cols[static_cast<std::size_t>(jj)]);
    }
    return c;
}

Certificate upper_certificate(const LogMatrix& a) {
    // perm <= product of row sums (every injection term appears in the
    // expansion of the product, all terms nonnegative)
    double total = 0.0;
    for (int i = 0; i < a.rows(); ++i) total += log_sum(a.row(i)).log();
    Certificate c;
    c.side = Certificate::Side::upper;
    c.method = CertMethod::rowsum;
    c.log_bound = total;
    return c;
}

namespace {

// remainder geometry implied by a lower certificate's pivots
struct RemainderView {
    std::vector<int> rows, cols; // original indices
};

RemainderView remainder_of(const LogMatrix& a, const Certificate& c) {
    const int m = a.rows(), n = a.cols();
    const int k = static_cast<int>(c.pivots.size());
    std::vector<char> col_used(static_cast<std::size_t>(n), 0);
    for (const auto& p : c.pivots) {
        if (p.row < 0 || p.row >= m || p.col < 0 || p.col >= n)
            throw ConfigError("certificate: pivot out of range");
        if (col_used[static_cast<std::size_t>(p.col)])
            throw ConfigError("certificate: duplicate pivot column");
        col_used[static_cast<std::size_t>(p.col)] = 1;
    }
    RemainderView v;
    for (int i = k; i < m; ++i) v.rows.push_back(i);
    for (int j = 0; j < n; ++j)
        if (!col_used[static_cast<std::size_t>(j)]) v.cols.push_back(j);
    return v;
}

} // namespace

bool verify_certificate(const LogMatrix& a, const Certificate& c, double tol) {
    if (c.side == Certificate::Side::upper) {
        if (c.method != CertMethod::rowsum) return false;
        double total = 0.0;
        for (int i = 0; i < a.rows(); ++i) total += log_sum(a.row(i)).log();
        return std::abs(total - c.log_bound) <= tol;
    }

    // lower side: pivots must be an injection prefix; values must match
    double pivot_sum = 0.0;
    for (std::size_t i = 0; i < c.pivots.size(); ++i) {
        const auto& p = c.pivots[i];
        if (p.row != static_cast<int>(i)) return false; // rows 0..k-1 in order
        if (a.log_at(p.row, p.col) != p.log_value) return false;
        pivot_sum += p.log_value;
    }
    RemainderView rem;
    try {
        rem = remainder_of(a, c);
    } catch (const ConfigError&) {
        return false;
    }
    const int r = static_cast<int>(rem.rows.size());
    if (c.matching.size() != static_cast<std::size_t>(r)) return false;
    // matching columns must be distinct remainder columns
    std::vector<char> seen(static_cast<std::size_t>(a.cols()), 0);
    for (int j : c.matching) {
        if (j < 0 || j >= a.cols() || seen[static_cast<std::size_t>(j)]) return false;
        if (std::find(rem.cols.begin(), rem.cols.end(), j) == rem.cols.end()) return false;
        seen[static_cast<std::size_t>(j)] = 1;
    }

    double route = kNegInf;
    if (c.method == CertMethod::greedy_hall) {
        // every matched entry must clear the threshold; the factorial term
        // is recomputed from the thresholded remainder
        for (int i = 0; i < r; ++i)
            if (a.log_at(rem.rows[static_cast<std::size_t>(i)],
                         c.matching[static_cast<std::size_t>(i)]) < c.log_q)
                return false;
        int kmin = static_cast<int>(rem.cols.size());
        for (int i = 0; i < r; ++i) {
            int ones = 0;
            for (int j : rem.cols)
                if (a.log_at(rem.rows[static_cast<std::size_t>(i)], j) >= c.log_q) ++ones;
            kmin = std::min(kmin, ones);
        }
        route = static_cast<double>(r) * c.log_q + factorial_route(kmin, r);
    } else if (c.method == CertMethod::rowmax_factorial) {
        // plain injection product
        double s = 0.0;
        for (int i = 0; i < r; ++i)
            s += a.log_at(rem.rows[static_cast<std::size_t>(i)],
                          c.matching[static_cast<std::size_t>(i)]);
        route = s;
    } else {
        return false;
    }
    return std::abs((pivot_sum + route) - c.log_bound) <= tol;
}

std::string Certificate::to_json() const {
    char buf[40];
    auto num = [&buf](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    std::ostringstream o;
    o << "{\"side\":\"" << (side == Side::lower ? "lower" : "upper")
      << "\",\"method\":\"" << cert_method_name(method)
      << "\",\"log_bound\":" << num(log_bound);
    if (side == Side::lower) {
        o << ",\"log_q\":" << num(log_q) << ",\"pivots\":[";
        for (std::size_t i = 0; i < pivots.size(); ++i) {
            if (i) o << ',';
            o << "{\"row\":" << pivots[i].row << ",\"col\":" << pivots[i].col
              << ",\"log_value\":" << num(pivots[i].log_value) << '}';
        }
        o << "],\"matching\":[";
        for (std::size_t i = 0; i < matching.size(); ++i) {
            if (i) o << ',';
            o << matching[i];
        }
        o << ']';
    }
    o << '}';
    return o.str();
}

// ------------------------------------------------------------------ scan

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i)
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

// first k-combination (lexicographic), then successor; false when done
bool next_combination(std::vector<int>& c, int n) {
    const int k = static_cast<int>(c.size());
    int i = k - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return false;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
        c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
    return true;
}

// uniform k-subset of {0..n-1} via partial Fisher-Yates on an index pool
std::vector<int> random_subset(int n, int k, CounterStream& cs) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
        const int left = n - i;
        int pick = i + static_cast<int>(cs.next() * left);
        if (pick >= n) pick = n - 1; // u < 1 makes this unreachable, belt & braces
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick)]);
    }
    std::vector<int> out(pool.begin(), pool.begin() + k);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

ScanResult submatrix_scan(const LogMatrix& a, double alpha, std::uint64_t samples,
                          const SeedSpec& s) {
    const int n = a.cols();
    if (a.rows() != n) throw ConfigError("submatrix_scan: needs a square matrix");
    if (n > kRyserMaxN)
        throw CeilingError("submatrix_scan: exact engine caps the order at 24");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("submatrix_scan: needs alpha in (0,1)");
    const int k_lo = std::max(2, static_cast<int>(std::ceil(alpha * n)));
    if (k_lo > n)
        throw ConfigError("submatrix_scan: k range is empty (matrix too small)");

    ScanResult res;
    bool first = true;
    for (int k = k_lo; k <= n; ++k) {
        ScanRecordPerK rec;
        rec.k = k;
        const double pairs = binom(n, k) * binom(n, k);
        rec.exhaustive = pairs <= 1e5;
        const double denom = static_cast<double>(k) * std::log(static_cast<double>(k));

        auto consider = [&](const SubmatrixSelector& sel) {
            const LogMatrix b = a.extract(sel);
            const double ratio = perm_ryser(b).log_perm.log() / denom;
            if (rec.scanned == 0 || ratio < rec.min_ratio) {
                rec.min_ratio = ratio;
                rec.min_sel = sel;
            }
            if (rec.scanned == 0 || ratio > rec.max_ratio) {
                rec.max_ratio = ratio;
                rec.max_sel = sel;
            }
            ++rec.scanned;
        };

        if (rec.exhaustive) {
            std::vector<int> rsel(static_cast<std::size_t>(k));
            for (int i = 0; i < k; ++i) rsel[static_cast<std::size_t>(i)] = i;
            do {
                std::vector<int> csel(static_cast<std::size_t>(k));
                for (int i = 0; i < k; ++i) csel[static_cast<std::size_t>(i)] = i;
                do {
                    SubmatrixSelector sel;
                    sel.rows = rsel;
                    sel.cols = csel;
                    consider(sel);
                } while (next_combination(csel, n));
            } while (next_combination(rsel, n));
        } else {
            for (std::uint64_t t = 0; t < samples; ++t) {
                // per-selector stream keyed by (k, t)
                const SeedSpec ss = subseed(s, (static_cast<std::uint64_t>(k) << 40) | t);
                CounterStream rows(ss, 0), cols(ss, 1);
                SubmatrixSelector sel;
                sel.rows = random_subset(n, k, rows);
                sel.cols = random_subset(n, k, cols);
                consider(sel);
            }
        }

        if (first || rec.min_ratio < res.min_ratio) {
            res.min_ratio = rec.min_ratio;
            res.min_sel = rec.min_sel;
        }
        if (first || rec.max_ratio > res.max_ratio) {
            res.max_ratio = rec.max_ratio;
            res.max_sel = rec.max_sel;
        }
        first = false;
        res.per_k.push_back(std::move(rec));
    }
    return res;
}

} // namespace logperm
