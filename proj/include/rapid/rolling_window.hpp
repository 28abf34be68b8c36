#pragma once

#include <cstdint>
#include <vector>

#include "rapid/errors.hpp"

namespace rapid {

struct NormalizedScore {
    double raw = 0.0;
    double mean = 0.0;
    double std = 0.0;
    double z = 0.0;
};

// Fixed-capacity ring with O(1) running statistics. Sums are accumulated
// against a shift K (the window mean at the last re-centering), the classic
// shifted-data trick: population variance = max(0, sumsq/n - (sum/n)^2) over
// the shifted values stays well conditioned even when the window spread is
// tiny next to its mean. The accumulators are re-centered and recomputed
// from the ring once per window turnover, so drift cannot accumulate and
// the shift tracks regime changes in the stream.
class RollingWindow {
  public:
    explicit RollingWindow(std::size_t capacity) : ring_(check_capacity(capacity), 0.0) {}

    void push(double x);

    std::size_t count() const { return count_; }
    std::size_t capacity() const { return ring_.size(); }

    double mean() const { return count_ ? shift_ + sum_ / static_cast<double>(count_) : 0.0; }

    double variance() const {
        if (count_ == 0) return 0.0;
        const double n = static_cast<double>(count_);
        const double m = sum_ / n;
        const double v = sumsq_ / n - m * m;
        return v > 0.0 ? v : 0.0;
    }

    double stddev() const;

    // Mean of current contents; 0 when empty. Same value as mean(), named
    // for the call sites that treat the window as a moving-average filter.
    double moving_average() const { return mean(); }

    // z-score of x against the window as it stands (x not yet pushed).
    // Fewer than two samples give no spread to normalize against: z = 0.
    NormalizedScore normalize(double x, double eps) const;

    std::size_t footprint_bytes() const { return sizeof(*this) + ring_.capacity() * sizeof(double); }

  private:
    static std::size_t check_capacity(std::size_t c) {
        if (c == 0) throw ConfigError("RollingWindow: capacity must be >= 1");
        return c;
    }
    void recompute();

    std::vector<double> ring_;
    std::size_t head_ = 0;   // next write slot
    std::size_t count_ = 0;
    double shift_ = 0.0;     // re-centering offset, updated by recompute()
    double sum_ = 0.0;       // running sum of (x - shift_)
    double sumsq_ = 0.0;     // running sum of (x - shift_)^2
    std::uint64_t pushes_ = 0;
};

}  // namespace rapid
