#include "logperm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "logperm/errors.hpp"

namespace logperm {

void SubmatrixSelector::validate(int m, int n) const {
    if (rows.empty() || cols.empty())
        throw ConfigError("selector: empty row or column list");
    if (rows.size() > cols.size())
        throw ConfigError("selector: needs |rows| <= |cols|");
    auto check = [](const std::vector<int>& v, int bound, const char* what) {
        int prev = -1;
        for (int x : v) {
            if (x < 0 || x >= bound)
                throw ConfigError(std::string("selector: ") + what + " index out of range");
            if (x <= prev)
                throw ConfigError(std::string("selector: ") + what +
                                  " indices must be strictly increasing");
            prev = x;
        }
    };
    check(rows, m, "row");
    check(cols, n, "column");
}

SubmatrixSelector SubmatrixSelector::full(int m, int n) {
    SubmatrixSelector s;
    s.rows.resize(static_cast<std::size_t>(m));
    s.cols.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < m; ++i) s.rows[static_cast<std::size_t>(i)] = i;
    for (int j = 0; j < n; ++j) s.cols[static_cast<std::size_t>(j)] = j;
    return s;
}

SubmatrixSelector SubmatrixSelector::compose(const SubmatrixSelector& outer,
                                             const SubmatrixSelector& inner) {
    SubmatrixSelector s;
    s.rows.reserve(inner.rows.size());
    s.cols.reserve(inner.cols.size());
    for (int r : inner.rows) s.rows.push_back(outer.rows.at(static_cast<std::size_t>(r)));
    for (int c : inner.cols) s.cols.push_back(outer.cols.at(static_cast<std::size_t>(c)));
    return s;
}

LogMatrix::LogMatrix(int m, int n, std::vector<LogReal> entries) : m_(m), n_(n) {
    if (m < 1 || n < 1) throw ConfigError("matrix: needs m >= 1 and n >= 1");
    if (entries.size() != static_cast<std::size_t>(m) * static_cast<std::size_t>(n))
        throw ConfigError("matrix: entry count does not match shape");
    if (m > n) {
        // store the transpose so m <= n holds everywhere downstream
        e_.resize(entries.size());
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
                e_[static_cast<std::size_t>(j) * m + i] =
                    entries[static_cast<std::size_t>(i) * n + j];
        std::swap(m_, n_);
        transposed_ = true;
    } else {
        e_ = std::move(entries);
    }
}

LogMatrix LogMatrix::generate(int m, int n, const DistSpec& d, const SeedSpec& s) {
    std::vector<LogReal> e(static_cast<std::size_t>(m) * static_cast<std::size_t>(n));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            e[static_cast<std::size_t>(i) * n + j] =
                d.sample_log(uniform01(s, static_cast<std::uint64_t>(i),
                                       static_cast<std::uint64_t>(j)));
    LogMatrix a(m, n, std::move(e));
    a.dist_ = d;
    a.seed_ = s;
    return a;
}

LogMatrix LogMatrix::extract(const SubmatrixSelector& sel) const {
    sel.validate(m_, n_);
    std::vector<LogReal> e;
    e.reserve(sel.rows.size() * sel.cols.size());
    for (int i : sel.rows)
        for (int j : sel.cols)
            e.push_back(at(i, j));
    LogMatrix b(static_cast<int>(sel.rows.size()), static_cast<int>(sel.cols.size()),
                std::move(e));
    b.dist_ = dist_;
    b.seed_ = seed_;
    return b;
}

double LogMatrix::log_quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("log_quantile: p outside [0,1]");
    std::vector<double> v;
    v.reserve(e_.size());
    for (LogReal x : e_) v.push_back(x.log());
    std::sort(v.begin(), v.end());
    const double h = p * (static_cast<double>(v.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= v.size()) return v.back();
    const double frac = h - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

void LogMatrix::save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw ConfigError("save: cannot open '" + path + "' for writing");
    // hand-rolled writer: JSON numbers at a fixed 17 significant digits so
    // the file round-trips bit-exactly
    char buf[40];
    f << "{\n  \"m\": " << m_ << ",\n  \"n\": " << n_ << ",\n";
    if (dist_)
        f << "  \"dist\": \"" << dist_->to_string() << "\",\n";
    else
        f << "  \"dist\": null,\n";
    if (seed_)
        f << "  \"seed\": " << seed_->seed << ",\n  \"trial\": " << seed_->trial << ",\n";
    else
        f << "  \"seed\": null,\n  \"trial\": null,\n";
    f << "  \"log_entries\": [\n";
    for (int i = 0; i < m_; ++i) {
        f << "    [";
        for (int j = 0; j < n_; ++j) {
            const double lv = log_at(i, j);
            if (lv == kNegInf) { // zero entry; JSON has no -inf literal
                f << "null" << (j + 1 < n_ ? ", " : "");
                continue;
            }
            std::snprintf(buf, sizeof buf, "%.17g", lv);
            f << buf << (j + 1 < n_ ? ", " : "");
        }
        f << (i + 1 < m_ ? "],\n" : "]\n");
    }
    f << "  ]\n}\n";
    if (!f) throw ConfigError("save: write to '" + path + "' failed");
}

LogMatrix LogMatrix::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("load: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("load: '" + path + "': " + e.what());
    }
    auto need = [&](const char* field) -> const nlohmann::json& {
        if (!j.contains(field))
            throw ConfigError("load: '" + path + "': missing field '" + field + "'");
        return j.at(field);
    };
    if (!need("m").is_number_integer() || !need("n").is_number_integer())
        throw ConfigError("load: '" + path + "': fields 'm' and 'n' must be integers");
    const int m = j.at("m").get<int>();
    const int n = j.at("n").get<int>();
    const auto& rows = need("log_entries");
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(m))
        throw ConfigError("load: '" + path + "': 'log_entries' must hold m rows");
    std::vector<LogReal> e;
    e.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (!r.is_array() || r.size() != static_cast<std::size_t>(n))
            throw ConfigError("load: '" + path + "': row " + std::to_string(i) +
                              " must hold n numbers");
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (r[c].is_null()) { // zero entry
                e.push_back(LogReal::zero());
                continue;
            }
            if (!r[c].is_number())
                throw ConfigError("load: '" + path + "': row " + std::to_string(i) +
                                  ", column " + std::to_string(c) + " is not a number");
            e.push_back(LogReal::from_log(r[c].get<double>()));
        }
    }
    LogMatrix a(m, n, std::move(e));
    const auto& dist = need("dist");
    if (dist.is_string()) a.dist_ = DistSpec::parse(dist.get<std::string>());
    const auto& seed = need("seed");
    const auto& trial = need("trial");
    if (seed.is_number() && trial.is_number())
        a.seed_ = SeedSpec{seed.get<std::uint64_t>(), trial.get<std::uint64_t>()};
    return a;
}

} // namespace logperm
