#include "logperm/randsrc.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "logperm/errors.hpp"

namespace logperm {

namespace {

double parse_double(const std::string& key, const std::string& val) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(val, &pos);
        if (pos != val.size()) throw std::invalid_argument("trailing junk");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("dist: bad numeric value for '" + key + "': '" + val + "'");
    }
}

int parse_int(const std::string& key, const std::string& val) {
    const double x = parse_double(key, val);
    const int i = static_cast<int>(x);
    if (static_cast<double>(i) != x)
        throw ConfigError("dist: '" + key + "' must be an integer, got '" + val + "'");
    return i;
}

std::vector<std::pair<std::string, std::string>> split_kv(const std::string& body) {
    std::vector<std::pair<std::string, std::string>> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("dist: expected key=value, got '" + item + "'");
        out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
    return out;
}

std::string fmt_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    // trim to the shortest form that still round-trips, for readable specs
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[40];
        std::snprintf(shorter, sizeof shorter, "%.*g", prec, x);
        if (std::stod(shorter) == x) return shorter;
    }
    return buf;
}

} // namespace

DistSpec DistSpec::pareto(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw ConfigError("dist: pareto needs beta > 0");
    DistSpec d;
    d.d_ = ParetoDist{beta};
    return d;
}

DistSpec DistSpec::exp_rate1() {
    DistSpec d;
    d.d_ = ExpRate1Dist{};
    return d;
}

DistSpec DistSpec::point_mass(double logval) {
    if (!std::isfinite(logval))
        throw ConfigError("dist: point needs a finite logval");
    DistSpec d;
    d.d_ = PointMassDist{logval};
    return d;
}

DistSpec DistSpec::lattice(double lambda, double c1, double c2,
                           std::vector<int> s_set, int k_max) {
    // constraints: c2 > c1 > lambda > 1; s strictly increasing with
    // k_{i+1} > 2 k_i; s inside [1, k_max]
    if (!(lambda > 1.0) || !(c1 > lambda) || !(c2 > c1))
        throw ConfigError("dist: lattice needs c2 > c1 > lambda > 1");
    if (k_max < 1) throw ConfigError("dist: lattice needs kmax >= 1");
    int prev = 0;
    for (std::size_t i = 0; i < s_set.size(); ++i) {
        const int k = s_set[i];
        if (k < 1 || k > k_max)
            throw ConfigError("dist: lattice s entries must lie in [1, kmax]");
        if (i > 0 && !(k > 2 * prev))
            throw ConfigError("dist: lattice s entries must more than double: "
                              "need s[i+1] > 2*s[i]");
        if (i > 0 && k <= prev)
            throw ConfigError("dist: lattice s entries must be strictly increasing");
        prev = k;
    }
    DistSpec d;
    d.d_ = LatticeDist{lambda, c1, c2, std::move(s_set), k_max};
    d.init_lattice_tables();
    return d;
}

void DistSpec::init_lattice_tables() {
    const auto& L = std::get<LatticeDist>(d_);
    std::vector<double> logw(static_cast<std::size_t>(L.k_max) + 1, kNegInf);
    auto in_s = [&L](int k) {
        for (int s : L.s_set)
            if (s == k) return true;
        return false;
    };
    for (int k = 1; k <= L.k_max; ++k) {
        const double lk = std::pow(L.lambda, k);
        logw[static_cast<std::size_t>(k)] = -lk / (in_s(k) ? L.c2 : L.c1);
    }
    const double logz = log_sum_raw(std::span<const double>(logw.data() + 1,
                                                            static_cast<std::size_t>(L.k_max)));
    log_p_.assign(static_cast<std::size_t>(L.k_max) + 1, kNegInf);
    cum_p_.assign(static_cast<std::size_t>(L.k_max) + 1, 0.0);
    KahanSum cum;
    for (int k = 1; k <= L.k_max; ++k) {
        log_p_[static_cast<std::size_t>(k)] = logw[static_cast<std::size_t>(k)] - logz;
        cum.add(std::exp(log_p_[static_cast<std::size_t>(k)]));
        cum_p_[static_cast<std::size_t>(k)] = cum.total();
    }
    cum_p_[static_cast<std::size_t>(L.k_max)] = 1.0; // absorb rounding at the top
}

const std::vector<double>& DistSpec::lattice_log_p() const {
    if (!is_lattice()) throw ConfigError("lattice_log_p: not a lattice dist");
    return log_p_;
}

double DistSpec::lattice_log_tail(double log_t) const {
    const auto* L = std::get_if<LatticeDist>(&d_);
    if (!L) throw ConfigError("lattice_log_tail: not a lattice dist");
    // P(xi >= t) = sum of p_k over support points with lambda^k >= log t
    std::vector<double> terms;
    for (int k = 1; k <= L->k_max; ++k)
        if (std::pow(L->lambda, k) >= log_t)
            terms.push_back(log_p_[static_cast<std::size_t>(k)]);
    return log_sum_raw(terms);
}

DistSpec DistSpec::parse(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string body = colon == std::string::npos ? "" : text.substr(colon + 1);

    if (head == "exp1") {
        if (!body.empty()) throw ConfigError("dist: exp1 takes no parameters");
        return exp_rate1();
    }
    if (head == "pareto") {
        double beta = 0.0;
        bool have = false;
        for (auto& [k, v] : split_kv(body)) {
            if (k == "beta") { beta = parse_double(k, v); have = true; }
            else throw ConfigError("dist: unknown pareto key '" + k + "'");
        }
        if (!have) throw ConfigError("dist: pareto requires beta=...");
        return pareto(beta);
    }
    if (head == "point") {
        double lv = 0.0;
        bool have = false;
        for (auto& [k, v] : split_kv(body)) {
            if (k == "logval") { lv = parse_double(k, v); have = true; }
            else throw ConfigError("dist: unknown point key '" + k + "'");
        }
        if (!have) throw ConfigError("dist: point requires logval=...");
        return point_mass(lv);
    }
    if (head == "lattice") {
        double lambda = 1.5, c1 = 2.0, c2 = 3.0;
        int kmax = 25;
        std::vector<int> s = {2, 5, 11, 23};
        for (auto& [k, v] : split_kv(body)) {
            if (k == "lambda") lambda = parse_double(k, v);
            else if (k == "c1") c1 = parse_double(k, v);
            else if (k == "c2") c2 = parse_double(k, v);
            else if (k == "kmax") kmax = parse_int(k, v);
            else if (k == "s") {
                s.clear();
                std::stringstream ss(v);
                std::string item;
                while (std::getline(ss, item, '/'))
                    s.push_back(parse_int("s", item));
            } else {
                throw ConfigError("dist: unknown lattice key '" + k + "'");
            }
        }
        return lattice(lambda, c1, c2, std::move(s), kmax);
    }
    throw ConfigError("dist: unknown distribution '" + head + "'");
}

std::string DistSpec::to_string() const {
    struct V {
        std::string operator()(const ParetoDist& p) const {
            return "pareto:beta=" + fmt_num(p.beta);
        }
        std::string operator()(const ExpRate1Dist&) const { return "exp1"; }
        std::string operator()(const PointMassDist& p) const {
            return "point:logval=" + fmt_num(p.logval);
        }
        std::string operator()(const LatticeDist& l) const {
            std::string s = "lattice:lambda=" + fmt_num(l.lambda) +
                            ",c1=" + fmt_num(l.c1) + ",c2=" + fmt_num(l.c2) + ",s=";
            for (std::size_t i = 0; i < l.s_set.size(); ++i) {
                if (i) s += '/';
                s += std::to_string(l.s_set[i]);
            }
            s += ",kmax=" + std::to_string(l.k_max);
            return s;
        }
    };
    return std::visit(V{}, d_);
}

LogReal DistSpec::sample_log(double u) const {
    if (!(u > 0.0 && u < 1.0))
        throw NumericError("sample_log: u must lie strictly inside (0,1)");
    if (const auto* p = std::get_if<ParetoDist>(&d_)) {
        // P(xi >= t) = t^(-1/beta) inverted at u: xi = u^(-beta)
        return LogReal::from_log(-p->beta * std::log(u));
    }
    if (std::holds_alternative<ExpRate1Dist>(d_)) {
        return LogReal::from_log(-std::log(u));
    }
    if (const auto* p = std::get_if<PointMassDist>(&d_)) {
        return LogReal::from_log(p->logval);
    }
    const auto& L = std::get<LatticeDist>(d_);
    // inverse CDF over the truncated support; the final cum is pinned to 1
    for (int k = 1; k <= L.k_max; ++k)
        if (u <= cum_p_[static_cast<std::size_t>(k)])
            return LogReal::from_log(std::pow(L.lambda, k));
    return LogReal::from_log(std::pow(L.lambda, L.k_max)); // unreachable
}

double DistSpec::tail_exponent(double log_t) const {
    if (!(log_t > 0.0))
        throw ConfigError("tail_exponent: needs log t > 0");
    if (const auto* p = std::get_if<ParetoDist>(&d_)) {
        return -1.0 / p->beta; // log t^(-1/beta) / log t, exactly
    }
    if (std::holds_alternative<ExpRate1Dist>(d_)) {
        return -1.0; // Pareto(1) convention
    }
    if (const auto* p = std::get_if<PointMassDist>(&d_)) {
        // P(xi >= t) is 1 below the atom and 0 above it
        if (log_t <= p->logval) return 0.0;
        return kNegInf;
    }
    const double lt = lattice_log_tail(log_t);
    if (lt == kNegInf) return kNegInf;
    return lt / log_t;
}

std::optional<double> DistSpec::lln_target() const {
    if (const auto* p = std::get_if<ParetoDist>(&d_))
        return std::max(1.0, p->beta);
    if (std::holds_alternative<ExpRate1Dist>(d_)) return 1.0;
    return std::nullopt;
}

} // namespace logperm
