#pragma once
// Rectangular matrices of log-domain entries, their generation from a
// (dist, seed) pair, submatrix extraction, and file persistence.
//
// Shape invariant: 1 <= m <= n (rows <= columns).  Constructing a taller-
// than-wide matrix silently transposes it and sets was_transposed(); the
// permanent is invariant under transposition so nothing downstream cares,
// but the flag keeps provenance honest.
//
// File format (extension .permmat.json): a single JSON object
//   { "m":, "n":, "dist": <textual DistSpec or null>, "seed":, "trial":,
//     "log_entries": [[...], ...] }
// with entries printed to 17 significant digits so save->load round-trips
// bit-exactly.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "logperm/logreal.hpp"
#include "logperm/randsrc.hpp"

namespace logperm {

// strictly increasing row/column index lists; |rows| <= |cols|
struct SubmatrixSelector {
    std::vector<int> rows, cols;

    void validate(int m, int n) const;
    static SubmatrixSelector full(int m, int n);
    // selector equivalent to applying `inner` after `outer`
    static SubmatrixSelector compose(const SubmatrixSelector& outer,
                                     const SubmatrixSelector& inner);
};

class LogMatrix {
  public:
    // row-major entries; transposes (and flags) when m > n
    LogMatrix(int m, int n, std::vector<LogReal> entries);

    // entry (i,j) = sample(dist, uniform01(seed, i, j)); indices are the
    // ones *requested*, so generating any submatrix of the same (dist,
    // seed) reproduces identical overlapping entries
    static LogMatrix generate(int m, int n, const DistSpec& d, const SeedSpec& s);

    int rows() const { return m_; }
    int cols() const { return n_; }
    bool was_transposed() const { return transposed_; }

    LogReal at(int i, int j) const { return e_[static_cast<std::size_t>(i) * n_ + j]; }
    double log_at(int i, int j) const { return at(i, j).log(); }
    std::span<const LogReal> row(int i) const {
        return {e_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)};
    }

    const std::optional<DistSpec>& dist() const { return dist_; }
    const std::optional<SeedSpec>& seed() const { return seed_; }

    LogMatrix extract(const SubmatrixSelector& sel) const;

    // p-quantile of the log-entries (type-7 interpolation); used for the
    // default certificate threshold
    double log_quantile(double p) const;

    void save(const std::string& path) const;
    static LogMatrix load(const std::string& path);

  private:
    int m_, n_;
    std::vector<LogReal> e_;
    bool transposed_ = false;
    std::optional<DistSpec> dist_;
    std::optional<SeedSpec> seed_;
};

} // namespace logperm
