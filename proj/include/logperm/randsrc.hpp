#pragma once
// Counter-based splittable randomness and the entry distributions.
//
// There is no generator state anywhere in the library.  The uniform for
// cell (i,j) of trial t under master seed s is a pure function
//
//   u = uniform01({s,t}, i, j)
//
// built from four chained applications of the SplitMix64 finalizer:
//
//   h = mix64(seed); h = mix64(h ^ trial); h = mix64(h ^ i); h = mix64(h ^ j)
//   u = ((h >> 12) * 2 + 1) * 2^-53          // strictly inside (0,1)
//
//   mix64(z): z += 0x9E3779B97F4A7C15
//             z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//             z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//             return z ^ (z >> 31)
//
// Consequences: any subset of trials/cells can be regenerated in any
// order on any number of workers and always yields the same numbers, and
// a submatrix of a generated matrix is bitwise a restriction of the full
// one.  Ten golden input->output pairs are frozen in the test suite and
// listed in the README; they must never change.
//
// Distributions (sampled by inverse transform from a single uniform, in
// log domain so heavy tails never overflow):
//   pareto:beta=B   P(xi >= t) = t^(-1/B) for t >= 1;  log xi = -B log u
//   exp1            log xi = -log u, i.e. log xi is rate-1 exponential
//                   (the beta = 1 convention: xi itself is Pareto(1))
//   lattice:...     discrete, support t_k = exp(lambda^k), k = 1..k_max,
//                   unnormalized log-weights -lambda^k/c1 (k not in s) or
//                   -lambda^k/c2 (k in s), truncated and renormalized
//   point:logval=v  point mass at e^v

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "logperm/logreal.hpp"

namespace logperm {

// master seed plus trial index; every random quantity is keyed by one
struct SeedSpec {
    std::uint64_t seed = 1;
    std::uint64_t trial = 0;
};

// SplitMix64 finalizer (public-domain constants)
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t cell_bits(const SeedSpec& s, std::uint64_t i, std::uint64_t j) {
    std::uint64_t h = mix64(s.seed);
    h = mix64(h ^ s.trial);
    h = mix64(h ^ i);
    h = mix64(h ^ j);
    return h;
}

// strictly in (0,1): (2k+1) * 2^-53 with k in [0, 2^52)
inline double uniform01(const SeedSpec& s, std::uint64_t i, std::uint64_t j) {
    const std::uint64_t k = cell_bits(s, i, j) >> 12;
    return static_cast<double>(2 * k + 1) * 0x1p-53;
}

// derive an unrelated stream (used for per-selector / per-sample seeds)
inline SeedSpec subseed(const SeedSpec& s, std::uint64_t tag) {
    return SeedSpec{mix64(s.seed ^ mix64(tag)), s.trial};
}

// a lane of sequential uniforms on top of the counter scheme
class CounterStream {
  public:
    CounterStream(const SeedSpec& s, std::uint64_t lane) : s_(s), lane_(lane) {}
    double next() { return uniform01(s_, lane_, counter_++); }

  private:
    SeedSpec s_;
    std::uint64_t lane_;
    std::uint64_t counter_ = 0;
};

struct ParetoDist { double beta; };
struct ExpRate1Dist {};
struct LatticeDist {
    double lambda, c1, c2;
    std::vector<int> s_set; // strictly increasing, each > 2x predecessor
    int k_max;
};
struct PointMassDist { double logval; };

// Validated, immutable distribution description.  Parse/format round-trip
// through the textual forms shown in the header comment.
class DistSpec {
  public:
    static DistSpec pareto(double beta);
    static DistSpec exp_rate1();
    static DistSpec lattice(double lambda, double c1, double c2,
                            std::vector<int> s_set, int k_max);
    static DistSpec point_mass(double logval);

    static DistSpec parse(const std::string& text);
    std::string to_string() const;

    // inverse-transform sample; u must lie in (0,1)
    LogReal sample_log(double u) const;

    // log P(xi >= t) / log t for log t > 0; closed form per distribution.
    // Returns -inf when the tail probability is exactly zero.
    double tail_exponent(double log_t) const;

    bool is_lattice() const { return std::holds_alternative<LatticeDist>(d_); }
    bool is_pareto() const { return std::holds_alternative<ParetoDist>(d_); }
    const LatticeDist* lattice_params() const { return std::get_if<LatticeDist>(&d_); }
    const ParetoDist* pareto_params() const { return std::get_if<ParetoDist>(&d_); }

    // limit of log perm A_n / (n log n) when one exists for this family:
    // max(1,beta) for pareto, 1 for exp1 (beta = 1), nothing otherwise
    std::optional<double> lln_target() const;

    // --- lattice internals, exposed for the domination checks ---
    // normalized log p_k, k = 1..k_max (index 0 unused)
    const std::vector<double>& lattice_log_p() const;
    // log P(xi >= t) for arbitrary real log t (exact truncated tail sum)
    double lattice_log_tail(double log_t) const;

  private:
    DistSpec() = default;
    void init_lattice_tables();

    std::variant<ParetoDist, ExpRate1Dist, LatticeDist, PointMassDist> d_;
    // lattice caches
    std::vector<double> log_p_;   // normalized, 1-based
    std::vector<double> cum_p_;   // linear CDF for sampling, 1-based
};

} // namespace logperm
