#pragma once
// Rigorous one-sided bounds on log(perm) that are cheap to verify.
//
// Lower route ("greedy + Hall + factorial"): run k = floor(rho*m) greedy
// pivot steps - take the maximum entry of the current first row (ties:
// lowest column), record it, delete its row and column.  The pivots form
// an injection, so perm A >= (prod_i zeta_i) * perm(remainder).  The
// remainder is bounded below by the better of two sub-certificates:
//   * threshold route: entries >= q become ones; if the 0/1 matrix has a
//     perfect matching (Hall), perm(remainder) >= q^(m-k) * F where F is
//     the factorial bound k0!/(k0-r)! (k0 = minimum number of ones in a
//     row, r = remainder height) or k0! when k0 < r;
//   * injection route: the greedy row-maxima product of the remainder,
//     a single-term bound that needs no matching at all.
// The certificate records which route won, the pivots, and (threshold
// route) q plus the matching, so a verifier can replay the bound from
// the matrix and the witness alone - no argmax re-derivation needed.
//
// Upper route: perm A <= prod_i (row sum), computed with log_sum.
//
// submatrix_scan measures min/max of log perm(B) / (k log k) over k x k
// submatrices, exhaustively when C(n,k)^2 <= 1e5 and by seeded sampling
// otherwise.

#include <cstdint>
#include <string>
#include <vector>

#include "logperm/logreal.hpp"
#include "logperm/matrix.hpp"
#include "logperm/randsrc.hpp"

namespace logperm {

// 0/1 matrix, m <= n
struct BinaryMatrix {
    int m = 0, n = 0;
    std::vector<std::uint8_t> bits; // row-major

    BinaryMatrix() = default;
    BinaryMatrix(int m_, int n_);
    bool at(int i, int j) const { return bits[static_cast<std::size_t>(i) * n + j] != 0; }
    void set(int i, int j, bool v) { bits[static_cast<std::size_t>(i) * n + j] = v ? 1 : 0; }
    int row_ones(int i) const;
};

BinaryMatrix threshold(const LogMatrix& a, double log_q);

struct HallResult {
    bool saturated = false;
    std::vector<int> matching;        // per row, matched column (-1 if none)
    std::vector<int> violating_rows;  // Hall violator W when unsaturated:
    std::vector<int> neighborhood;    // N(W), |N(W)| < |W|
};

// maximum bipartite matching (augmenting paths); when the matching misses
// a row the violator set is read off the alternating-path forest
HallResult hall_check(const BinaryMatrix& b);

// log of k!/(k-m)! if k >= m else log k!, k = min ones per row; requires
// a saturated matrix (ConfigError otherwise)
LogReal mann_ryser_bound(const BinaryMatrix& b);

enum class CertMethod { greedy_hall, rowsum, rowmax_factorial };

const char* cert_method_name(CertMethod m);

struct GreedyPivot {
    int row, col;      // original matrix coordinates
    double log_value;
};

struct Certificate {
    enum class Side { lower, upper };
    Side side;
    double log_bound;
    CertMethod method;
    // witness
    std::vector<GreedyPivot> pivots;  // greedy pivots (lower side)
    double log_q = 0.0;               // threshold (greedy_hall only)
    std::vector<int> matching;        // per remainder row: original column

    std::string to_json() const;
};

Certificate lower_certificate(const LogMatrix& a, double rho, double log_q);
Certificate upper_certificate(const LogMatrix& a);

// replay a certificate against the matrix; true iff the witness is
// structurally valid and the recomputed bound matches within tol
bool verify_certificate(const LogMatrix& a, const Certificate& c, double tol = 1e-12);

// greedy single-injection lower bound on log perm: scan rows top to
// bottom taking the max entry among unused columns (ties: lowest column).
// Returns the log product and, optionally, the chosen columns.
double greedy_injection_logsum(const LogMatrix& a, std::vector<int>* cols_out = nullptr);

struct ScanRecordPerK {
    int k = 0;
    bool exhaustive = false;
    std::uint64_t scanned = 0;
    double min_ratio = 0.0, max_ratio = 0.0;
    SubmatrixSelector min_sel, max_sel;
};

struct ScanResult {
    double min_ratio = 0.0, max_ratio = 0.0;
    SubmatrixSelector min_sel, max_sel;
    std::vector<ScanRecordPerK> per_k;
};

// ratio = log perm(B) / (k log k) over k x k submatrices, k from
// max(2, ceil(alpha*n)) to n; square input, n <= 24 (exact engine)
ScanResult submatrix_scan(const LogMatrix& a, double alpha, std::uint64_t samples,
                          const SeedSpec& s);

} // namespace logperm
