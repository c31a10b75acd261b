#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace xormmap {

// Non-negative weight carried as its natural log. Weight zero is the sentinel
// -inf, never produced by rounding, so underflow on big grids cannot silently
// turn a positive weight into zero.
class LogWeight {
public:
    LogWeight() : log_(-std::numeric_limits<double>::infinity()) {}

    static LogWeight zero() { return LogWeight(); }
    static LogWeight one() { return from_log(0.0); }
    static LogWeight from_log(double ln) {
        LogWeight w;
        w.log_ = ln;
        return w;
    }
    static LogWeight from_linear(double x) {
        return x > 0.0 ? from_log(std::log(x)) : zero();
    }

    bool is_zero() const { return std::isinf(log_) && log_ < 0; }
    double log() const { return log_; }
    double log2() const { return log_ / std::numbers::ln2; }
    double log10() const { return log_ / std::numbers::ln10; }
    double linear() const { return is_zero() ? 0.0 : std::exp(log_); }

    // Log-sum-exp accumulation: *this <- *this + o.
    void add(LogWeight o) {
        if (o.is_zero()) return;
        if (is_zero()) {
            log_ = o.log_;
            return;
        }
        double hi = log_ > o.log_ ? log_ : o.log_;
        double lo = log_ > o.log_ ? o.log_ : log_;
        log_ = hi + std::log1p(std::exp(lo - hi));
    }

    LogWeight times(LogWeight o) const {
        if (is_zero() || o.is_zero()) return zero();
        return from_log(log_ + o.log_);
    }
    LogWeight scaled_pow2(int e) const {
        if (is_zero()) return zero();
        return from_log(log_ + e * std::numbers::ln2);
    }

    friend bool operator<(LogWeight a, LogWeight b) { return a.log_ < b.log_; }
    friend bool operator>(LogWeight a, LogWeight b) { return b < a; }
    friend bool operator<=(LogWeight a, LogWeight b) { return !(b < a); }
    friend bool operator>=(LogWeight a, LogWeight b) { return !(a < b); }
    friend bool operator==(LogWeight a, LogWeight b) {
        return a.log_ == b.log_ || (a.is_zero() && b.is_zero());
    }

private:
    double log_;
};

}  // namespace xormmap
