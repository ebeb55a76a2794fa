#include "logperm/asymstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "logperm/errors.hpp"

namespace logperm {

namespace {

constexpr double kGammaEps = 1e-15;
constexpr int kGammaMaxIter = 500;

// lower series: P(a,x) = x^a e^-x / Gamma(a) * sum_k x^k / (a(a+1)...(a+k))
double gamma_p_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < kGammaMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kGammaEps)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw NumericError("reg_lower_gamma: series failed to converge");
}

// upper continued fraction (modified Lentz):
// Q(a,x) = x^a e^-x / Gamma(a) * 1/(x+1-a- 1*(1-a)/(x+3-a- ...))
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kGammaMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kGammaEps)
            return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
    throw NumericError("reg_upper_gamma: continued fraction failed to converge");
}

} // namespace

double reg_lower_gamma(double a, double x) {
    if (!(a > 0.0) || x < 0.0)
        throw ConfigError("reg_lower_gamma: needs a > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double reg_upper_gamma(double a, double x) {
    if (!(a > 0.0) || x < 0.0)
        throw ConfigError("reg_upper_gamma: needs a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double expected_z_log(int n, int k) {
    if (n < 1 || k < 1) throw ConfigError("expected_z: needs n >= 1, k >= 1");
    const double a = static_cast<double>(n);
    double diff;
    if (k == 1) {
        diff = reg_lower_gamma(a, a); // P(n, n) - P(n, 0)
    } else {
        // difference of upper tails: the larger term comes first, no
        // destructive cancellation this deep in the tail
        diff = reg_upper_gamma(a, static_cast<double>(k - 1) * a) -
               reg_upper_gamma(a, static_cast<double>(k) * a);
    }
    if (diff <= 0.0) return kNegInf;
    return std::lgamma(a + 1.0) + std::log(diff);
}

double expected_z(int n, int k) { return std::exp(expected_z_log(n, k)); }

ZHistogram z_histogram(int n, std::uint64_t trials, const SeedSpec& s) {
    if (n < 1) throw ConfigError("z_histogram: needs n >= 1");
    if (n > 8)
        throw CeilingError("z_histogram: full permutation enumeration caps n at 8");
    if (trials < 1) throw ConfigError("z_histogram: needs trials >= 1");

    ZHistogram h;
    h.n = n;
    h.trials = trials;
    const DistSpec d = DistSpec::exp_rate1();
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (std::uint64_t t = 0; t < trials; ++t) {
        const LogMatrix y = LogMatrix::generate(n, n, d, SeedSpec{s.seed, s.trial + t});
        std::map<int, std::uint64_t> local;
        for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
        do {
            double sum = 0.0;
            for (int i = 0; i < n; ++i) sum += y.log_at(i, perm[static_cast<std::size_t>(i)]);
            const int k = static_cast<int>(std::floor(sum / static_cast<double>(n))) + 1;
            ++local[k];
        } while (std::next_permutation(perm.begin(), perm.end()));
        for (auto& [k, c] : local) h.counts[k] += c;
        for (auto& [k, c] : local) {
            auto& v = h.per_trial[k];
            v.resize(trials, 0);
            v[t] = c;
        }
    }
    for (auto& [k, v] : h.per_trial) v.resize(trials, 0);
    return h;
}

double max_perm_sum(const LogMatrix& a) {
    // assignment by shortest augmenting paths with potentials;
    // maximize sum of logs == minimize sum of negated logs
    const int m = a.rows(), n = a.cols();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(m) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);   // matched row per column
    std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 1; i <= m; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
        std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = p[static_cast<std::size_t>(j0)];
            double delta = inf;
            int j1 = -1;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = -a.log_at(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                                   v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0);
    }
    double total = 0.0;
    for (int j = 1; j <= n; ++j)
        if (p[static_cast<std::size_t>(j)] != 0)
            total += a.log_at(p[static_cast<std::size_t>(j)] - 1, j - 1);
    return total;
}

MaxStats collect_max_stats(int n, std::uint64_t trials, const SeedSpec& s) {
    if (n < 3) throw ConfigError("collect_max_stats: needs n >= 3");
    if (trials < 1) throw ConfigError("collect_max_stats: needs trials >= 1");
    MaxStats ms;
    ms.n = n;
    ms.trials = trials;
    ms.r_samples.resize(trials);
    const double log_n = std::log(static_cast<double>(n));
    for (std::uint64_t t = 0; t < trials; ++t) {
        double mx = 0.0;
        const SeedSpec st{s.seed, s.trial + t};
        for (int j = 0; j < n; ++j)
            mx = std::max(mx, -std::log(uniform01(st, 0, static_cast<std::uint64_t>(j))));
        ms.r_samples[t] = mx / log_n;
    }
    return ms;
}

MaxExpDiag max_exp_diagnostic(int n, std::uint64_t trials, double t, const SeedSpec& s) {
    const MaxStats ms = collect_max_stats(n, trials, s);
    MaxExpDiag d;
    d.n = n;
    d.trials = trials;
    d.t = t;
    std::uint64_t le = 0, ge = 0;
    KahanSum mean, sq;
    for (double r : ms.r_samples) {
        if (r <= t) ++le;
        if (r >= t) ++ge;
        const double e = std::exp(r);
        mean.add(e);
        sq.add(e * e);
    }
    const double tn = static_cast<double>(trials);
    d.p_le = static_cast<double>(le) / tn;
    d.p_ge = static_cast<double>(ge) / tn;
    d.mean_exp_r = mean.total() / tn;
    if (trials >= 2) {
        const double var =
            std::max(0.0, (sq.total() / tn - d.mean_exp_r * d.mean_exp_r) * tn / (tn - 1.0));
        d.se_mean_exp = std::sqrt(var / tn);
    }
    const double log_n = std::log(static_cast<double>(n));
    d.bound_p_le = std::exp(-std::pow(static_cast<double>(n), 1.0 - t));
    d.bound_p_ge = std::min(1.0, std::pow(static_cast<double>(n), 1.0 - t));
    d.bound_mean = std::exp(1.0 + 1.0 / (log_n - 1.0));
    return d;
}

double maxperm_threshold(int n, double lambda) {
    if (n < 3) throw ConfigError("maxperm_threshold: needs n >= 3");
    if (!(lambda > 0.0)) throw ConfigError("maxperm_threshold: needs lambda > 0");
    const double dn = static_cast<double>(n);
    return dn * std::log(dn) + dn * std::log(std::log(dn)) / lambda;
}

} // namespace logperm
