// logperm - log-domain permanents of heavy-tailed random matrices.
//
// Subcommands: gen, perm, estimate, certify (single-matrix tools) and
// converge, rect, zstat, maxdiag, tailcheck, scan, domcheck (CSV
// experiments).  Exit codes: 0 success, 2 configuration error, 3 an
// engine refused the requested size, 1 anything else.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "logperm/asymstats.hpp"
#include "logperm/certify.hpp"
#include "logperm/errors.hpp"
#include "logperm/harness.hpp"
#include "logperm/matrix.hpp"
#include "logperm/permcore.hpp"

using namespace logperm;

namespace {

Engine parse_engine(const std::string& s) {
    if (s == "brute") return Engine::brute;
    if (s == "ryser") return Engine::ryser;
    if (s == "dp") return Engine::dp;
    if (s == "sis") return Engine::sis;
    throw ConfigError("unknown engine '" + s + "' (brute|ryser|dp|sis)");
}

// pick an exact engine for this shape, preferring the cheap one
PermResult perm_auto(const LogMatrix& a, int workers) {
    if (a.rows() == a.cols()) {
        if (a.cols() <= kRyserMaxN) {
            try {
                return perm_ryser(a, workers);
            } catch (const NumericError&) {
                if (a.rows() <= kDpMaxM && dp_work_estimate(a.rows(), a.cols()) <= kDefaultDpBudget)
                    return perm_dp(a);
                throw;
            }
        }
    } else if (a.rows() <= kDpMaxM && dp_work_estimate(a.rows(), a.cols()) <= kDefaultDpBudget) {
        return perm_dp(a);
    }
    throw CeilingError("no exact engine accepts a " + std::to_string(a.rows()) + "x" +
                       std::to_string(a.cols()) + " matrix (try estimate or certify)");
}

int run(int argc, char** argv) {
    CLI::App app{"log-domain permanents of random matrices with heavy-tailed entries"};
    app.require_subcommand(1);

    // ---- gen
    auto* gen = app.add_subcommand("gen", "generate a matrix file");
    int gen_m = 8, gen_n = 8;
    std::string gen_dist = "pareto:beta=2", gen_out;
    std::uint64_t gen_seed = 1, gen_trial = 0;
    gen->add_option("--m", gen_m, "rows");
    gen->add_option("--n", gen_n, "columns");
    gen->add_option("--dist", gen_dist, "entry distribution");
    gen->add_option("--seed", gen_seed, "master seed");
    gen->add_option("--trial", gen_trial, "trial index");
    gen->add_option("--out", gen_out, "output .permmat.json path")->required();

    // ---- perm
    auto* perm = app.add_subcommand("perm", "exact log-permanent of a matrix file");
    std::string perm_in, perm_engine = "auto";
    int perm_workers = 1;
    bool perm_json = false;
    perm->add_option("--in", perm_in, "matrix file")->required();
    perm->add_option("--engine", perm_engine, "auto|brute|ryser|dp");
    perm->add_option("--workers", perm_workers, "ryser worker threads");
    perm->add_flag("--json", perm_json, "JSON output");

    // ---- estimate
    auto* est = app.add_subcommand("estimate", "importance-sampling estimate");
    std::string est_in;
    std::uint64_t est_samples = 100000, est_seed = 1;
    int est_workers = 1;
    bool est_json = false;
    est->add_option("--in", est_in, "matrix file")->required();
    est->add_option("--samples", est_samples, "sample paths");
    est->add_option("--seed", est_seed, "estimator seed");
    est->add_option("--workers", est_workers, "worker threads");
    est->add_flag("--json", est_json, "JSON output");

    // ---- certify
    auto* cert = app.add_subcommand("certify", "certified bounds on log perm");
    std::string cert_in, cert_side = "both";
    double cert_rho = 0.5;
    double cert_logq = std::numeric_limits<double>::quiet_NaN();
    cert->add_option("--in", cert_in, "matrix file")->required();
    cert->add_option("--rho", cert_rho, "greedy pivot fraction, in (0,1)");
    cert->add_option("--logq", cert_logq, "threshold (default: lower quartile)");
    cert->add_option("--side", cert_side, "lower|upper|both");

    // ---- experiments
    struct ExpCmd {
        CLI::App* cmd;
        ExperimentKind kind;
    };
    std::vector<ExpCmd> experiments = {
        {app.add_subcommand("converge", "square LLN convergence trend"), ExperimentKind::converge},
        {app.add_subcommand("rect", "rectangular convergence via the height rule"), ExperimentKind::converge_rect},
        {app.add_subcommand("zstat", "permutation-sum histograms vs closed form"), ExperimentKind::zstat},
        {app.add_subcommand("maxdiag", "row-max and permutation-sum extremes"), ExperimentKind::maxdiag},
        {app.add_subcommand("tailcheck", "tail exponent sweep"), ExperimentKind::tailcheck},
        {app.add_subcommand("scan", "submatrix ratio extremes"), ExperimentKind::scan},
        {app.add_subcommand("domcheck", "lattice domination inequality"), ExperimentKind::domcheck},
    };

    ExperimentConfig cfg;
    // --config pre-pass so explicit flags win over file values
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config")
            cfg = ExperimentConfig::from_json_file(argv[i + 1]);

    std::string cfg_dist, cfg_policy, cfg_sizes, cfg_path;
    for (auto& e : experiments) {
        CLI::App* c = e.cmd;
        c->add_option("--config", cfg_path, "JSON config file (flags override)");
        c->add_option("--sizes", cfg_sizes, "comma-separated size grid");
        c->add_option("--trials", cfg.trials, "trials per size");
        c->add_option("--seed", cfg.seed, "master seed");
        c->add_option("--dist", cfg_dist, "entry distribution");
        c->add_option("--engine", cfg_policy,
                      "auto|exact_only|certify_only|brute|ryser|dp|sis");
        c->add_option("--samples", cfg.sis_samples, "sis sample paths");
        c->add_option("--rho", cfg.rho, "greedy pivot fraction");
        c->add_option("--logq", [&cfg](const std::vector<std::string>& v) {
            cfg.log_q = std::stod(v.at(0));
            return true;
        }, "certificate threshold (default: per-matrix lower quartile)");
        c->add_option("--alpha", cfg.alpha, "scan: smallest k as a fraction of n");
        c->add_option("--t", cfg.t_threshold, "maxdiag: R threshold");
        c->add_option("--lambda", cfg.lambda, "maxdiag: permutation-sum slack");
        c->add_option("--gamma", cfg.gamma, "zstat: exceedance exponent");
        c->add_option("--height-c", cfg.height_c, "rect: height rule constant");
        c->add_option("--points", cfg.grid_points, "grid points / scan samples");
        c->add_option("--threads", cfg.threads, "trial-level worker threads");
        c->add_option("--out", cfg.out, "output CSV path (default stdout)");
        c->add_flag("--deterministic", cfg.deterministic,
                    "suppress the timestamp line for byte-identical reruns");
    }

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) {
        const LogMatrix a = LogMatrix::generate(gen_m, gen_n, DistSpec::parse(gen_dist),
                                                SeedSpec{gen_seed, gen_trial});
        a.save(gen_out);
        std::cout << "wrote " << gen_out << " (" << a.rows() << "x" << a.cols()
                  << (a.was_transposed() ? ", transposed" : "") << ")\n";
        return 0;
    }
    if (perm->parsed()) {
        const LogMatrix a = LogMatrix::load(perm_in);
        const PermResult r = perm_engine == "auto"
                                 ? perm_auto(a, perm_workers)
                                 : [&] {
                                       switch (parse_engine(perm_engine)) {
                                           case Engine::brute: return perm_brute(a);
                                           case Engine::ryser: return perm_ryser(a, perm_workers);
                                           case Engine::dp: return perm_dp(a);
                                           default:
                                               throw ConfigError(
                                                   "perm: use the estimate subcommand for sis");
                                       }
                                   }();
        if (perm_json)
            std::cout << "{\"engine\":\"" << engine_name(r.engine)
                      << "\",\"log_perm\":" << fmt17(r.log_perm.log())
                      << ",\"work\":" << r.work << "}\n";
        else
            std::cout << "engine=" << engine_name(r.engine)
                      << " log_perm=" << fmt17(r.log_perm.log()) << " work=" << r.work
                      << "\n";
        return 0;
    }
    if (est->parsed()) {
        const LogMatrix a = LogMatrix::load(est_in);
        const PermResult r =
            perm_sis(a, est_samples, SeedSpec{est_seed, 0}, est_workers);
        const double se = r.est_stderr_log.value_or(0.0);
        if (est_json)
            std::cout << "{\"engine\":\"sis\",\"log_perm\":" << fmt17(r.log_perm.log())
                      << ",\"stderr_log\":" << fmt17(se) << ",\"samples\":" << est_samples
                      << "}\n";
        else
            std::cout << "engine=sis log_perm=" << fmt17(r.log_perm.log())
                      << " stderr_log=" << fmt17(se) << " samples=" << est_samples << "\n";
        return 0;
    }
    if (cert->parsed()) {
        const LogMatrix a = LogMatrix::load(cert_in);
        const double logq = std::isnan(cert_logq) ? a.log_quantile(0.25) : cert_logq;
        std::cout << "{";
        bool first = true;
        if (cert_side == "lower" || cert_side == "both") {
            const Certificate c = lower_certificate(a, cert_rho, logq);
            if (!verify_certificate(a, c))
                throw NumericError("certify: lower certificate failed self-verification");
            std::cout << "\"lower\":" << c.to_json();
            first = false;
        }
        if (cert_side == "upper" || cert_side == "both") {
            const Certificate c = upper_certificate(a);
            if (!verify_certificate(a, c))
                throw NumericError("certify: upper certificate failed self-verification");
            std::cout << (first ? "" : ",") << "\"upper\":" << c.to_json();
            first = false;
        }
        if (first)
            throw ConfigError("certify: --side must be lower, upper or both");
        std::cout << "}\n";
        return 0;
    }

    for (auto& e : experiments) {
        if (!e.cmd->parsed()) continue;
        cfg.kind = e.kind;
        if (!cfg_dist.empty()) cfg.dist = DistSpec::parse(cfg_dist);
        if (!cfg_policy.empty()) cfg.policy = parse_policy(cfg_policy);
        if (!cfg_sizes.empty()) {
            cfg.sizes.clear();
            std::stringstream ss(cfg_sizes);
            std::string item;
            while (std::getline(ss, item, ','))
                cfg.sizes.push_back(std::stoi(item));
        }
        run_experiment(cfg);
        return 0;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const CeilingError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
