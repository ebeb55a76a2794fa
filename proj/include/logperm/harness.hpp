#pragma once
// Experiment drivers and CSV emission.  Everything here is a thin,
// deterministic loop over (size, trial) pairs: trial t of an experiment
// with master seed s always works on generate(..., {s, t}), so any row
// can be reproduced in isolation and the output is byte-identical for a
// fixed config regardless of --threads (trials are the unit of
// parallelism; rows are buffered and emitted in (n, trial) order).
//
// CSV conventions: one '# ...' comment line with the config (plus a
// timestamp line unless deterministic mode is on), then a header row,
// then data.  Doubles are printed with %.17g; empty cells mean "not
// applicable".  The converge/rect schema is
//
//   n,m,trial,seed,engine,log_perm,log_lower,log_upper,ratio,target
//
// (rect appends height_condition).  ratio = log_perm / (m log n); target
// is the limit max(1,beta) when the entry distribution has one.  After
// each n the trial rows are followed by a summary row (trial="summary")
// carrying the median ratio in `ratio` and the lower/upper quartiles in
// `log_lower`/`log_upper`; bounds-only runs instead get summary_lower /
// summary_upper rows summarizing the certified bracket ratios.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "logperm/randsrc.hpp"

namespace logperm {

enum class ExperimentKind {
    converge,       // square LLN trend
    converge_rect,  // rectangular, heights from the (log n)^2/log log n rule
    zstat,          // permutation-sum histograms vs closed-form means
    maxdiag,        // row-max statistic R and permutation-sum extremes
    tailcheck,      // tail_exponent sweep (report-only)
    scan,           // submatrix ratio extremes
    domcheck        // lattice domination inequality (report-only)
};

enum class EnginePolicy {
    automatic,    // exact when the ceilings allow, certificates always
    exact_only,   // refuse upfront if any size exceeds the exact ceilings
    certify_only, // no exact values, bounds only
    force_brute,
    force_ryser,
    force_dp,
    force_sis
};

ExperimentKind parse_kind(const std::string& s);
EnginePolicy parse_policy(const std::string& s);
const char* kind_name(ExperimentKind k);
const char* policy_name(EnginePolicy p);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::converge;
    DistSpec dist = DistSpec::pareto(2.0);
    std::vector<int> sizes;
    int trials = 20;
    std::uint64_t seed = 1;
    EnginePolicy policy = EnginePolicy::automatic;
    std::uint64_t sis_samples = 100000;
    double rho = 0.5;
    std::optional<double> log_q;        // default: per-matrix lower quartile
    double alpha = 0.5;                 // scan
    double t_threshold = 1.5;           // maxdiag
    double lambda = 2.0;                // maxdiag permutation-sum threshold
    double gamma = 2.0;                 // zstat exceedance exponent
    double height_c = 1.2;              // rect height rule constant
    std::uint64_t grid_points = 10000;  // domcheck / tailcheck / scan samples
    int threads = 1;
    bool deterministic = false;
    std::string out;                    // empty = stdout

    static ExperimentConfig from_json_file(const std::string& path);
    void validate() const;
};

// m_n = ceil(c * (log n)^2 / log log n); n >= 3, c > 1
int height_rule(int n, double c);
// m * log log n / (log n)^2, the condition that must exceed 1
double height_condition(int n, int m);

void run_converge(const ExperimentConfig& cfg, std::ostream& os);
void run_converge_rect(const ExperimentConfig& cfg, std::ostream& os);
void run_zstat(const ExperimentConfig& cfg, std::ostream& os);
void run_maxdiag(const ExperimentConfig& cfg, std::ostream& os);
void run_tailcheck(const ExperimentConfig& cfg, std::ostream& os);
void run_scan(const ExperimentConfig& cfg, std::ostream& os);
void run_domcheck(const ExperimentConfig& cfg, std::ostream& os);

// dispatch on cfg.kind, honoring cfg.out (file vs stdout)
void run_experiment(const ExperimentConfig& cfg);

// %.17g, shared formatting for all emitted doubles
std::string fmt17(double x);

} // namespace logperm
