#include "rapid/rolling_window.hpp"

#include <algorithm>
#include <cmath>

namespace rapid {

void RollingWindow::push(double x) {
    if (!std::isfinite(x)) throw StreamError("RollingWindow: non-finite value");
    if (count_ == ring_.size()) {
        const double old = ring_[head_] - shift_;
        sum_ -= old;
        sumsq_ -= old * old;
    } else {
        ++count_;
    }
    ring_[head_] = x;
    head_ = (head_ + 1) % ring_.size();
    const double d = x - shift_;
    sum_ += d;
    sumsq_ += d * d;
    ++pushes_;
    bool recenter = pushes_ % std::max<std::uint64_t>(ring_.size(), 64) == 0;
    if (!recenter && count_ >= 2) {
        // A stale shift after a regime change makes the variance a difference
        // of large near-equal terms, costing ~(shifted/spread)^2 ulps of
        // relative accuracy. Re-center once the spread falls an order of
        // magnitude below the shifted values; recompute() restores the ratio
        // to ~1, so this stays amortized O(1) per push.
        const double n = static_cast<double>(count_);
        const double m = sum_ / n;
        recenter = sumsq_ / n - m * m < 1e-2 * (sumsq_ / n);
    }
    if (recenter) recompute();
}

double RollingWindow::stddev() const { return std::sqrt(variance()); }

NormalizedScore RollingWindow::normalize(double x, double eps) const {
    if (!(eps > 0.0)) throw ConfigError("normalize: eps must be > 0");
    if (!std::isfinite(x)) throw StreamError("normalize: non-finite value");
    NormalizedScore s;
    s.raw = x;
    if (count_ < 2) {
        s.mean = x;
        s.std = 0.0;
        s.z = 0.0;
        return s;
    }
    s.mean = mean();
    s.std = stddev();
    s.z = (x - s.mean) / (s.std + eps);
    return s;
}

void RollingWindow::recompute() {
    double raw = 0.0;
    for (std::size_t i = 0; i < count_; ++i) {
        const std::size_t idx = (head_ + ring_.size() - count_ + i) % ring_.size();
        raw += ring_[idx];
    }
    shift_ = count_ ? raw / static_cast<double>(count_) : 0.0;
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < count_; ++i) {
        const std::size_t idx = (head_ + ring_.size() - count_ + i) % ring_.size();
        const double d = ring_[idx] - shift_;
        sum += d;
        sumsq += d * d;
    }
    sum_ = sum;
    sumsq_ = sumsq;
}

}  // namespace rapid
