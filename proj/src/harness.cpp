#include "logperm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "logperm/asymstats.hpp"
#include "logperm/certify.hpp"
#include "logperm/errors.hpp"
#include "logperm/matrix.hpp"
#include "logperm/permcore.hpp"

namespace logperm {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ExperimentKind parse_kind(const std::string& s) {
    if (s == "converge") return ExperimentKind::converge;
    if (s == "rect") return ExperimentKind::converge_rect;
    if (s == "zstat") return ExperimentKind::zstat;
    if (s == "maxdiag") return ExperimentKind::maxdiag;
    if (s == "tailcheck") return ExperimentKind::tailcheck;
    if (s == "scan") return ExperimentKind::scan;
    if (s == "domcheck") return ExperimentKind::domcheck;
    throw ConfigError("unknown experiment kind '" + s + "'");
}

const char* kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::converge: return "converge";
        case ExperimentKind::converge_rect: return "rect";
        case ExperimentKind::zstat: return "zstat";
        case ExperimentKind::maxdiag: return "maxdiag";
        case ExperimentKind::tailcheck: return "tailcheck";
        case ExperimentKind::scan: return "scan";
        case ExperimentKind::domcheck: return "domcheck";
    }
    return "?";
}

EnginePolicy parse_policy(const std::string& s) {
    if (s == "auto") return EnginePolicy::automatic;
    if (s == "exact_only") return EnginePolicy::exact_only;
    if (s == "certify_only") return EnginePolicy::certify_only;
    if (s == "brute") return EnginePolicy::force_brute;
    if (s == "ryser") return EnginePolicy::force_ryser;
    if (s == "dp") return EnginePolicy::force_dp;
    if (s == "sis") return EnginePolicy::force_sis;
    throw ConfigError("unknown engine policy '" + s + "'");
}

const char* policy_name(EnginePolicy p) {
    switch (p) {
        case EnginePolicy::automatic: return "auto";
        case EnginePolicy::exact_only: return "exact_only";
        case EnginePolicy::certify_only: return "certify_only";
        case EnginePolicy::force_brute: return "brute";
        case EnginePolicy::force_ryser: return "ryser";
        case EnginePolicy::force_dp: return "dp";
        case EnginePolicy::force_sis: return "sis";
    }
    return "?";
}

int height_rule(int n, double c) {
    if (n < 3) throw ConfigError("height_rule: needs n >= 3");
    if (!(c > 1.0)) throw ConfigError("height_rule: needs c > 1");
    const double ln = std::log(static_cast<double>(n));
    const double lln = std::log(ln);
    if (!(lln > 0.0)) throw ConfigError("height_rule: needs log log n > 0");
    return static_cast<int>(std::ceil(c * ln * ln / lln));
}

double height_condition(int n, int m) {
    const double ln = std::log(static_cast<double>(n));
    return static_cast<double>(m) * std::log(ln) / (ln * ln);
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw ConfigError("config: trials >= 1 required");
    if (threads < 1) throw ConfigError("config: threads >= 1 required");
    switch (kind) {
        case ExperimentKind::converge:
        case ExperimentKind::converge_rect:
        case ExperimentKind::scan:
        case ExperimentKind::zstat:
        case ExperimentKind::maxdiag: {
            if (sizes.empty()) throw ConfigError("config: at least one size required");
            int prev = 0;
            for (int n : sizes) {
                if (n <= prev) throw ConfigError("config: sizes must be strictly increasing");
                prev = n;
            }
            const int floor_n = (kind == ExperimentKind::converge ||
                                 kind == ExperimentKind::scan) ? 2 : 3;
            if (kind != ExperimentKind::zstat && sizes.front() < floor_n)
                throw ConfigError("config: smallest size below what this experiment "
                                  "can normalize");
            break;
        }
        case ExperimentKind::tailcheck:
        case ExperimentKind::domcheck:
            break;
    }
    if (kind == ExperimentKind::domcheck && !dist.is_lattice())
        throw ConfigError("config: domcheck requires a lattice distribution");
    if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("config: rho in (0,1) required");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("config: alpha in (0,1) required");
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: '" + path + "': " + e.what());
    }
    ExperimentConfig c;
    try {
        if (j.contains("kind")) c.kind = parse_kind(j.at("kind").get<std::string>());
        if (j.contains("dist")) c.dist = DistSpec::parse(j.at("dist").get<std::string>());
        if (j.contains("sizes")) c.sizes = j.at("sizes").get<std::vector<int>>();
        if (j.contains("trials")) c.trials = j.at("trials").get<int>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("engine")) c.policy = parse_policy(j.at("engine").get<std::string>());
        if (j.contains("samples")) c.sis_samples = j.at("samples").get<std::uint64_t>();
        if (j.contains("rho")) c.rho = j.at("rho").get<double>();
        if (j.contains("log_q")) c.log_q = j.at("log_q").get<double>();
        if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
        if (j.contains("t")) c.t_threshold = j.at("t").get<double>();
        if (j.contains("lambda")) c.lambda = j.at("lambda").get<double>();
        if (j.contains("gamma")) c.gamma = j.at("gamma").get<double>();
        if (j.contains("height_c")) c.height_c = j.at("height_c").get<double>();
        if (j.contains("grid_points")) c.grid_points = j.at("grid_points").get<std::uint64_t>();
        if (j.contains("threads")) c.threads = j.at("threads").get<int>();
        if (j.contains("deterministic")) c.deterministic = j.at("deterministic").get<bool>();
        if (j.contains("out")) c.out = j.at("out").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: '" + path + "': " + e.what());
    }
    return c;
}

namespace {

void emit_preamble(const ExperimentConfig& cfg, std::ostream& os) {
    if (!cfg.deterministic) {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char stamp[64];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        os << "# generated " << stamp << "\n";
    }
    os << "# kind=" << kind_name(cfg.kind) << " dist=" << cfg.dist.to_string()
       << " seed=" << cfg.seed << " trials=" << cfg.trials
       << " engine=" << policy_name(cfg.policy) << "\n";
}

template <typename F>
void parallel_for(std::uint64_t count, int threads, F&& body) {
    const int w = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(std::max(threads, 1)), count));
    if (w <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (int t = 0; t < w; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const std::uint64_t i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                    next.store(count);
                    break;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

// type-7 quantile (linear interpolation), q in [0,1]
double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double h = q * (static_cast<double>(v.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

struct TrialRow {
    std::string engine;
    std::string log_perm;  // empty when no exact value
    double log_lower = 0.0, log_upper = 0.0;
    std::optional<double> ratio;
};

// one converge/rect trial: generate, certify, maybe compute exact
TrialRow run_one_trial(const ExperimentConfig& cfg, int m, int n, std::uint64_t trial) {
    const SeedSpec s{cfg.seed, trial};
    const LogMatrix a = LogMatrix::generate(m, n, cfg.dist, s);
    const double logq = cfg.log_q ? *cfg.log_q : a.log_quantile(0.25);

    const Certificate lo = lower_certificate(a, cfg.rho, logq);
    const Certificate hi = upper_certificate(a);

    TrialRow row;
    row.log_lower = lo.log_bound;
    row.log_upper = hi.log_bound;

    const bool square = (m == n);
    std::optional<PermResult> exact;
    switch (cfg.policy) {
        case EnginePolicy::certify_only:
            break;
        case EnginePolicy::force_brute:
            exact = perm_brute(a);
            break;
        case EnginePolicy::force_ryser:
            exact = perm_ryser(a);
            break;
        case EnginePolicy::force_dp:
            exact = perm_dp(a);
            break;
        case EnginePolicy::force_sis:
            exact = perm_sis(a, cfg.sis_samples, s);
            break;
        case EnginePolicy::automatic:
        case EnginePolicy::exact_only: {
            if (square && n <= kRyserMaxN) {
                try {
                    exact = perm_ryser(a);
                } catch (const NumericError&) {
                    // cancellation blow-up: retry subtraction-free if it fits
                    if (m <= kDpMaxM && dp_work_estimate(m, n) <= kDefaultDpBudget)
                        exact = perm_dp(a);
                    else
                        throw;
                }
            } else if (m <= kDpMaxM && dp_work_estimate(m, n) <= kDefaultDpBudget) {
                exact = perm_dp(a);
            } else if (cfg.policy == EnginePolicy::exact_only) {
                throw CeilingError("exact_only: size " + std::to_string(m) + "x" +
                                   std::to_string(n) + " exceeds every exact engine");
            }
            break;
        }
    }

    if (exact) {
        const double lp = exact->log_perm.log();
        row.engine = engine_name(exact->engine);
        row.log_perm = fmt17(lp);
        row.ratio = lp / (static_cast<double>(m) * std::log(static_cast<double>(n)));
        // certificates must sandwich every exact value (estimates may
        // legitimately stray outside the bracket, so sis is exempt)
        if (exact->engine != Engine::sis) {
            if (!(lo.log_bound <= lp + 1e-9) || !(lp <= hi.log_bound + 1e-9))
                throw NumericError(
                    "certificate sandwich violated at n=" + std::to_string(n) +
                    " trial=" + std::to_string(trial) + ": lower=" + fmt17(lo.log_bound) +
                    " exact=" + fmt17(lp) + " upper=" + fmt17(hi.log_bound));
        }
    }
    return row;
}

void emit_converge_rows(const ExperimentConfig& cfg, std::ostream& os, int m, int n,
                        const std::vector<TrialRow>& rows, const std::string& extra) {
    const std::string target =
        cfg.dist.lln_target() ? fmt17(*cfg.dist.lln_target()) : std::string();
    for (std::size_t t = 0; t < rows.size(); ++t) {
        const TrialRow& r = rows[t];
        os << n << ',' << m << ',' << t << ',' << cfg.seed << ',' << r.engine << ','
           << r.log_perm << ',' << fmt17(r.log_lower) << ',' << fmt17(r.log_upper) << ','
           << (r.ratio ? fmt17(*r.ratio) : std::string()) << ',' << target << extra
           << '\n';
    }
    const double denom = static_cast<double>(m) * std::log(static_cast<double>(n));
    std::vector<double> ratios;
    for (const auto& r : rows)
        if (r.ratio) ratios.push_back(*r.ratio);
    if (!ratios.empty()) {
        os << n << ',' << m << ',' << "summary" << ',' << cfg.seed << ",summary,,"
           << fmt17(quantile(ratios, 0.25)) << ',' << fmt17(quantile(ratios, 0.75)) << ','
           << fmt17(quantile(ratios, 0.5)) << ',' << target << extra << '\n';
    } else {
        // bounds-only: summarize the certified bracket ratios instead
        std::vector<double> lo, hi;
        for (const auto& r : rows) {
            lo.push_back(r.log_lower / denom);
            hi.push_back(r.log_upper / denom);
        }
        os << n << ',' << m << ',' << "summary_lower" << ',' << cfg.seed << ",summary,,"
           << fmt17(quantile(lo, 0.25)) << ',' << fmt17(quantile(lo, 0.75)) << ','
           << fmt17(quantile(lo, 0.5)) << ',' << target << extra << '\n';
        os << n << ',' << m << ',' << "summary_upper" << ',' << cfg.seed << ",summary,,"
           << fmt17(quantile(hi, 0.25)) << ',' << fmt17(quantile(hi, 0.75)) << ','
           << fmt17(quantile(hi, 0.5)) << ',' << target << extra << '\n';
    }
}

} // namespace

void run_converge(const ExperimentConfig& cfg, std::ostream& os) {
    cfg.validate();
    if (cfg.policy == EnginePolicy::exact_only || cfg.policy == EnginePolicy::force_ryser) {
        std::string bad;
        for (int n : cfg.sizes)
            if (n > kRyserMaxN) bad += (bad.empty() ? "" : ", ") + std::to_string(n);
        if (!bad.empty())
            throw CeilingError("converge: exact engines cap square sizes at 24; "
                               "offending sizes: " + bad);
    }
    emit_preamble(cfg, os);
    os << "n,m,trial,seed,engine,log_perm,log_lower,log_upper,ratio,target\n";
    for (int n : cfg.sizes) {
        std::vector<TrialRow> rows(static_cast<std::size_t>(cfg.trials));
        parallel_for(static_cast<std::uint64_t>(cfg.trials), cfg.threads, [&](std::uint64_t t) {
            rows[t] = run_one_trial(cfg, n, n, t);
        });
        emit_converge_rows(cfg, os, n, n, rows, "");
    }
}

void run_converge_rect(const ExperimentConfig& cfg, std::ostream& os) {
    cfg.validate();
    emit_preamble(cfg, os);
    os << "n,m,trial,seed,engine,log_perm,log_lower,log_upper,ratio,target,"
          "height_condition\n";
    for (int n : cfg.sizes) {
        const int m_rule = height_rule(n, cfg.height_c);
        // the dp budget caps how tall we can actually go
        int m = std::min(m_rule, std::min(n, kDpMaxM));
        while (m > 1 && dp_work_estimate(m, n) > kDefaultDpBudget) --m;
        if (m < m_rule)
            std::cerr << "rect: n=" << n << ": height rule wants m=" << m_rule
                      << ", capped to m=" << m << " by the dp work budget\n";
        const std::string extra = "," + fmt17(height_condition(n, m));
        std::vector<TrialRow> rows(static_cast<std::size_t>(cfg.trials));
        parallel_for(static_cast<std::uint64_t>(cfg.trials), cfg.threads, [&](std::uint64_t t) {
            rows[t] = run_one_trial(cfg, m, n, t);
        });
        emit_converge_rows(cfg, os, m, n, rows, extra);
    }
}

void run_zstat(const ExperimentConfig& cfg, std::ostream& os) {
    cfg.validate();
    emit_preamble(cfg, os);
    os << "n,trials,seed,k,count,mean_per_trial,se_mean,expected_per_trial,gamma,"
          "exceed_rate\n";
    for (int n : cfg.sizes) {
        const ZHistogram h =
            z_histogram(n, static_cast<std::uint64_t>(cfg.trials), SeedSpec{cfg.seed, 0});
        for (const auto& [k, total] : h.counts) {
            const auto& per = h.per_trial.at(k);
            const double tn = static_cast<double>(h.trials);
            const double mean = static_cast<double>(total) / tn;
            double sq = 0.0;
            for (std::uint64_t c : per) {
                const double d = static_cast<double>(c) - mean;
                sq += d * d;
            }
            const double se = h.trials >= 2 ? std::sqrt(sq / (tn - 1.0) / tn) : 0.0;
            const double expected = expected_z(n, k);
            const double gate = std::pow(expected, cfg.gamma);
            std::uint64_t exceed = 0;
            for (std::uint64_t c : per)
                if (static_cast<double>(c) > gate) ++exceed;
            os << n << ',' << h.trials << ',' << cfg.seed << ',' << k << ',' << total << ','
               << fmt17(mean) << ',' << fmt17(se) << ',' << fmt17(expected) << ','
               << fmt17(cfg.gamma) << ',' << fmt17(static_cast<double>(exceed) / tn) << '\n';
        }
    }
}

void run_maxdiag(const ExperimentConfig& cfg, std::ostream& os) {
    cfg.validate();
    emit_preamble(cfg, os);
    os << "record,n,trials,seed,t,lambda,p_le,p_ge,mean_exp_r,se_mean,bound_p_le,"
          "bound_p_ge,bound_mean,threshold,exceed_rate,max_value\n";
    for (int n : cfg.sizes) {
        const MaxExpDiag d = max_exp_diagnostic(n, static_cast<std::uint64_t>(cfg.trials),
                                                cfg.t_threshold, SeedSpec{cfg.seed, 0});
        os << "maxexp," << n << ',' << d.trials << ',' << cfg.seed << ','
           << fmt17(d.t) << ",," << fmt17(d.p_le) << ',' << fmt17(d.p_ge) << ','
           << fmt17(d.mean_exp_r) << ',' << fmt17(d.se_mean_exp) << ','
           << fmt17(d.bound_p_le) << ',' << fmt17(d.bound_p_ge) << ','
           << fmt17(d.bound_mean) << ",,,\n";

        // permutation-sum extremes: rate-1 exponential log-entries (the
        // only case with a closed-form threshold), exact assignment max
        const double thr = maxperm_threshold(n, cfg.lambda);
        const DistSpec exp1 = DistSpec::exp_rate1();
        std::vector<double> maxima(static_cast<std::size_t>(cfg.trials));
        parallel_for(static_cast<std::uint64_t>(cfg.trials), cfg.threads, [&](std::uint64_t t) {
            const LogMatrix y = LogMatrix::generate(n, n, exp1, SeedSpec{cfg.seed, t});
            maxima[t] = max_perm_sum(y);
        });
        std::uint64_t exceed = 0;
        double mx = kNegInf;
        for (double v : maxima) {
            if (v > thr) ++exceed;
            mx = std::max(mx, v);
        }
        os << "permsum," << n << ',' << cfg.trials << ',' << cfg.seed << ",,"
           << fmt17(cfg.lambda) << ",,,,,,,," << fmt17(thr) << ','
           << fmt17(static_cast<double>(exceed) / static_cast<double>(cfg.trials)) << ','
           << fmt17(mx) << '\n';
    }
}

void run_tailcheck(const ExperimentConfig& cfg, std::ostream& os) {
    cfg.validate();
    emit_preamble(cfg, os);
    os << "dist,log_t,tail_exponent\n";
    // the lattice's textual form contains commas; quote it per RFC 4180
    std::string dname = cfg.dist.to_string();
    if (dname.find(',') != std::string::npos) dname = '"' + dname + '"';
    std::vector<double> grid;
    if (const auto* L = cfg.dist.lattice_params()) {
        // bracket every support point and the gaps between them
        for (int k = 1; k <= L->k_max; ++k) {
            const double lk = std::pow(L->lambda, k);
            grid.push_back(lk * (1.0 - 1e-9));
            grid.push_back(lk);
            grid.push_back(lk * (1.0 + 1e-9));
            if (k < L->k_max) grid.push_back(0.5 * (lk + std::pow(L->lambda, k + 1)));
        }
    } else {
        const std::uint64_t pts = std::max<std::uint64_t>(2, cfg.grid_points);
        const double lo = std::log(0.1), hi = std::log(100.0);
        for (std::uint64_t i = 0; i < pts; ++i)
            grid.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                             static_cast<double>(pts - 1)));
    }
    for (double lt : grid) {
        const double te = cfg.dist.tail_exponent(lt);
        os << dname << ',' << fmt17(lt) << ','
           << (te == kNegInf ? std::string("-inf") : fmt17(te)) << '\n';
    }
}

void run_scan(const ExperimentConfig& cfg, std::ostream& os) {
    cfg.validate();
    emit_preamble(cfg, os);
    os << "n,trial,seed,k,exhaustive,scanned,min_ratio,max_ratio,min_rows,min_cols,"
          "max_rows,max_cols\n";
    auto join = [](const std::vector<int>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += '/';
            s += std::to_string(v[i]);
        }
        return s;
    };
    for (int n : cfg.sizes) {
        for (int t = 0; t < cfg.trials; ++t) {
            const SeedSpec s{cfg.seed, static_cast<std::uint64_t>(t)};
            const LogMatrix a = LogMatrix::generate(n, n, cfg.dist, s);
            const ScanResult r = submatrix_scan(a, cfg.alpha, cfg.grid_points, s);
            for (const auto& rec : r.per_k) {
                os << n << ',' << t << ',' << cfg.seed << ',' << rec.k << ','
                   << (rec.exhaustive ? 1 : 0) << ',' << rec.scanned << ','
                   << fmt17(rec.min_ratio) << ',' << fmt17(rec.max_ratio) << ','
                   << join(rec.min_sel.rows) << ',' << join(rec.min_sel.cols) << ','
                   << join(rec.max_sel.rows) << ',' << join(rec.max_sel.cols) << '\n';
            }
        }
    }
}

void run_domcheck(const ExperimentConfig& cfg, std::ostream& os) {
    cfg.validate();
    const auto* L = cfg.dist.lattice_params();
    emit_preamble(cfg, os);
    os << "pair,k_lo,k_hi,points,max_violation\n";
    if (L->s_set.size() < 2)
        throw ConfigError("domcheck: the lattice needs at least two marked indices");

    // xi-tilde replaces every c2 weight with c1 (empty marked set); its
    // tail is what the shifted variable t_{k_i} * xi-tilde is built from
    const DistSpec tilde =
        DistSpec::lattice(L->lambda, L->c1, L->c2, std::vector<int>{}, L->k_max);

    const std::size_t pairs = L->s_set.size() - 1;
    const std::uint64_t per_pair =
        std::max<std::uint64_t>(3, cfg.grid_points / pairs);
    double global_max = 0.0;
    std::uint64_t total_points = 0;

    for (std::size_t pi = 0; pi < pairs; ++pi) {
        const int k_lo = L->s_set[pi];
        const int k_hi = L->s_set[pi + 1];
        const double a = std::pow(L->lambda, k_lo);
        const double b = std::pow(L->lambda, k_hi);
        std::vector<double> grid;
        grid.reserve(per_pair + static_cast<std::size_t>(k_hi - k_lo));
        for (std::uint64_t g = 0; g <= per_pair; ++g)
            grid.push_back(a + (b - a) * static_cast<double>(g) / static_cast<double>(per_pair));
        for (int k = k_lo + 1; k < k_hi; ++k)
            grid.push_back(std::pow(L->lambda, k)); // support points, exactly
        std::sort(grid.begin(), grid.end());

        double max_violation = 0.0;
        for (double log_t : grid) {
            // LHS: P(t <= xi < t_{k_hi}) = tail(log t) - tail above k_hi,
            // done as a sum over the qualifying support points
            std::vector<double> terms;
            for (int k = 1; k < k_hi; ++k)
                if (std::pow(L->lambda, k) >= log_t)
                    terms.push_back(cfg.dist.lattice_log_p()[static_cast<std::size_t>(k)]);
            const double lhs = log_sum_raw(terms);
            // RHS: P(t_{k_lo} * xi-tilde >= t) = P(xi-tilde >= t / t_{k_lo})
            const double rhs = tilde.lattice_log_tail(log_t - a);
            if (lhs > rhs) {
                const double viol = std::exp(lhs) - std::exp(rhs);
                max_violation = std::max(max_violation, viol);
            }
        }
        global_max = std::max(global_max, max_violation);
        total_points += grid.size();
        os << pi << ',' << k_lo << ',' << k_hi << ',' << grid.size() << ','
           << fmt17(max_violation) << '\n';
    }
    os << "all,,," << total_points << ',' << fmt17(global_max) << '\n';
}

void run_experiment(const ExperimentConfig& cfg) {
    auto dispatch = [&](std::ostream& os) {
        switch (cfg.kind) {
            case ExperimentKind::converge: run_converge(cfg, os); break;
            case ExperimentKind::converge_rect: run_converge_rect(cfg, os); break;
            case ExperimentKind::zstat: run_zstat(cfg, os); break;
            case ExperimentKind::maxdiag: run_maxdiag(cfg, os); break;
            case ExperimentKind::tailcheck: run_tailcheck(cfg, os); break;
            case ExperimentKind::scan: run_scan(cfg, os); break;
            case ExperimentKind::domcheck: run_domcheck(cfg, os); break;
        }
    };
    if (cfg.out.empty()) {
        dispatch(std::cout);
    } else {
        std::ofstream f(cfg.out);
        if (!f) throw ConfigError("cannot open output file '" + cfg.out + "'");
        dispatch(f);
        if (!f) throw ConfigError("write to '" + cfg.out + "' failed");
    }
}

} // namespace logperm
