#pragma once
// Log-domain scalars and the accumulation primitives everything else is
// built on.
//
// A nonnegative quantity x is stored as log(x) (natural log); -infinity
// encodes exact zero and NaN is never stored.  Products become additions.
// Sums of terms spanning thousands of orders of magnitude go through
// max-factored forms: log(sum exp(x_i)) = M + log(sum exp(x_i - M)) with
// M = max x_i, so every exponentiated term lies in (0,1] and the linear
// accumulation is compensated (Neumaier).  Signed series (inclusion-
// exclusion) accumulate the positive and negative terms in separate
// buckets that are combined exactly once at the end.
//
// Accuracy notes, kept honest:
//  * log_add / log_sum never lose more than a few ulp relative to the
//    exact value; the result is >= max of the inputs by construction.
//  * signed accumulation cannot beat the usual cancellation limit: when
//    the true result is r and the largest term is T, about
//    log10(T/|r|) digits are gone.  Callers get <= 1e-9 relative error
//    whenever |r| >= 1e-7 * T, which is the regime the permanent
//    engines are specified for.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "logperm/errors.hpp"

namespace logperm {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

namespace detail {
inline void require_not_nan(double v, const char* who) {
    if (std::isnan(v)) throw NumericError(std::string(who) + ": NaN log value");
}
} // namespace detail

// log(x) for x >= 0; -inf <=> x == 0.  Never NaN, never +inf.
class LogReal {
  public:
    constexpr LogReal() : lv_(kNegInf) {}

    static LogReal from_log(double lv) {
        detail::require_not_nan(lv, "LogReal::from_log");
        if (lv == std::numeric_limits<double>::infinity())
            throw NumericError("LogReal::from_log: +inf is not a value");
        LogReal r;
        r.lv_ = lv;
        return r;
    }
    static LogReal from_linear(double x) {
        if (std::isnan(x) || x < 0.0)
            throw NumericError("LogReal::from_linear: needs x >= 0");
        return from_log(std::log(x)); // log(0) == -inf is fine
    }
    static constexpr LogReal zero() { return LogReal(); }
    static LogReal one() { return from_log(0.0); }

    double log() const { return lv_; }
    double linear() const { return std::exp(lv_); } // may overflow to +inf
    bool is_zero() const { return lv_ == kNegInf; }

    // value-domain product: logs add.  0 * anything == 0.
    friend LogReal operator*(LogReal a, LogReal b) {
        if (a.is_zero() || b.is_zero()) return zero();
        return from_log(a.lv_ + b.lv_);
    }
    LogReal& operator*=(LogReal b) { return *this = *this * b; }

    // x^k in value domain.  k == 0 is the empty product (== 1) for every
    // base including zero; 0^k with k < 0 has no value.
    LogReal pow(double k) const {
        if (k == 0.0) return one();
        if (is_zero()) {
            if (k < 0.0) throw NumericError("LogReal::pow: 0^k, k < 0");
            return zero();
        }
        return from_log(lv_ * k);
    }

    friend bool operator==(LogReal a, LogReal b) { return a.lv_ == b.lv_; }
    friend bool operator!=(LogReal a, LogReal b) { return a.lv_ != b.lv_; }
    friend bool operator<(LogReal a, LogReal b) { return a.lv_ < b.lv_; }
    friend bool operator<=(LogReal a, LogReal b) { return a.lv_ <= b.lv_; }
    friend bool operator>(LogReal a, LogReal b) { return a.lv_ > b.lv_; }
    friend bool operator>=(LogReal a, LogReal b) { return a.lv_ >= b.lv_; }

  private:
    double lv_;
};

// log(e^a + e^b), max-factored.  Symmetric in (a,b) bit-for-bit because it
// goes through max/min.  Result >= max(a,b).
inline double log_add_raw(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

inline LogReal log_add(LogReal a, LogReal b) {
    return LogReal::from_log(log_add_raw(a.log(), b.log()));
}

inline LogReal operator+(LogReal a, LogReal b) { return log_add(a, b); }

// Neumaier-compensated running sum of doubles.  The error of total() is
// bounded by ~2 eps * sum |x_i| independent of input order.
struct KahanSum {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double total() const { return s + c; }
    void reset() { s = c = 0.0; }
};

// log(sum_i e^{v_i}) over a sequence of log values.  Empty or all-zero
// input yields -inf.  Single pass for the max, compensated pass for the
// scaled linear terms; order-invariant to a few ulp.
//
// The max term scales to exactly 1, so the sum is computed as
// m + log1p(sum_i e^{v_i - m} - 1) with the -1 folded into the
// compensated accumulation.  That way contributions far below the
// max (down past double epsilon relative to it, e.g. a lone e^{-50}
// next to e^{0}) still move the result instead of rounding away.
inline double log_sum_raw(std::span<const double> logs) {
    double m = kNegInf;
    for (double v : logs) {
        detail::require_not_nan(v, "log_sum");
        m = std::max(m, v);
    }
    if (m == kNegInf) return kNegInf;
    KahanSum acc;
    for (double v : logs) acc.add(std::exp(v - m));
    acc.add(-1.0);
    const double rest = std::max(acc.total(), 0.0); // >= 0 in exact arithmetic
    return m + std::log1p(rest);
}

inline LogReal log_sum(std::span<const LogReal> xs) {
    double m = kNegInf;
    for (LogReal v : xs) m = std::max(m, v.log());
    if (m == kNegInf) return LogReal::zero();
    KahanSum acc;
    for (LogReal v : xs) acc.add(std::exp(v.log() - m));
    acc.add(-1.0);
    const double rest = std::max(acc.total(), 0.0);
    return LogReal::from_log(m + std::log1p(rest));
}

// A real number of either sign with log-encoded magnitude.
// sign == 0  <=>  logmag == -inf  (exact zero).
struct SignedLogReal {
    int sign = 0;       // -1, 0, +1
    double logmag = kNegInf;

    SignedLogReal() = default;
    SignedLogReal(int sg, double lm) : sign(sg), logmag(lm) {
        detail::require_not_nan(lm, "SignedLogReal");
        if (sg == 0)
            logmag = kNegInf;
        else if (lm == kNegInf)
            sign = 0;
    }
    static SignedLogReal from_linear(double x) {
        if (std::isnan(x)) throw NumericError("SignedLogReal::from_linear: NaN");
        if (x == 0.0) return SignedLogReal();
        return SignedLogReal(x > 0.0 ? +1 : -1, std::log(std::abs(x)));
    }
    bool is_zero() const { return sign == 0; }
    double linear() const { return sign * std::exp(logmag); }
};

// Streaming two-bucket signed accumulator.  All stored linear values are
// scaled by exp(-scale); the scale grows lazily when a larger term shows
// up (both buckets and their compensations are rescaled together, so the
// invariant "stored = value * exp(-scale)" is preserved).
class SignedAccumulator {
  public:
    SignedAccumulator() = default;
    explicit SignedAccumulator(double scale_hint) : scale_(scale_hint), seeded_(true) {}

    double scale() const { return scale_; }

    // add sign * exp(logmag)
    void add(int sign, double logmag) {
        if (sign == 0 || logmag == kNegInf) return;
        detail::require_not_nan(logmag, "SignedAccumulator::add");
        if (!seeded_) {
            scale_ = logmag;
            seeded_ = true;
        } else if (logmag > scale_) {
            rescale(logmag);
        }
        add_scaled(sign, std::exp(logmag - scale_));
    }

    // add sign * v * exp(scale()); |v| should be <= ~1.  Fast path for
    // callers that already work in the scaled linear domain.
    void add_scaled(int sign, double v) {
        if (v == 0.0) return;
        if (v < 0.0) { sign = -sign; v = -v; }
        if (sign > 0)
            pos_.add(v);
        else
            neg_.add(v);
    }

    // merge another accumulator (same scale required; used by the
    // deterministic fixed-order worker merge)
    void merge(const SignedAccumulator& o) {
        if (!o.seeded_) return;
        if (!seeded_) { scale_ = o.scale_; seeded_ = true; }
        double f = std::exp(o.scale_ - scale_);
        if (f > 1.0) { rescale(o.scale_); f = 1.0; }
        pos_.add(o.pos_.total() * f);
        neg_.add(o.neg_.total() * f);
    }

    SignedLogReal total() const {
        if (!seeded_) return SignedLogReal();
        const double diff = pos_.total() - neg_.total();
        if (diff == 0.0) return SignedLogReal();
        return SignedLogReal(diff > 0.0 ? +1 : -1, scale_ + std::log(std::abs(diff)));
    }

    // largest magnitude the accumulator was scaled for; -inf if nothing added
    double log_max_term() const { return seeded_ ? scale_ : kNegInf; }

  private:
    void rescale(double new_scale) {
        const double f = std::exp(scale_ - new_scale);
        pos_.s *= f; pos_.c *= f;
        neg_.s *= f; neg_.c *= f;
        scale_ = new_scale;
    }

    double scale_ = 0.0;
    bool seeded_ = false;
    KahanSum pos_, neg_;
};

// One-shot signed series: two-pass (max magnitude, then bucketed
// compensated accumulation).  Permutation of the input moves the result
// by at most ~1e-9 relative in the supported regime.
inline SignedLogReal signed_accumulate(std::span<const SignedLogReal> terms) {
    double m = kNegInf;
    for (const auto& t : terms)
        if (t.sign != 0) m = std::max(m, t.logmag);
    if (m == kNegInf) return SignedLogReal();
    SignedAccumulator acc(m);
    for (const auto& t : terms)
        if (t.sign != 0) acc.add_scaled(t.sign, std::exp(t.logmag - m));
    return acc.total();
}

} // namespace logperm
