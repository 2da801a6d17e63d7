#pragma once

#include <cmath>
#include <span>

namespace mcie {

/// Neumaier-compensated running sum. Order of add() calls fixes the result.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Mean of `values`, accumulated as values[0] + sum(values[i] - values[0]) / n.
/// A constant input returns that constant exactly.
inline double shifted_mean(std::span<const double> values) noexcept {
    if (values.empty()) {
        return 0.0;
    }
    const double shift = values[0];
    CompensatedSum acc;
    for (double v : values) {
        acc.add(v - shift);
    }
    return shift + acc.value() / static_cast<double>(values.size());
}

}  // namespace mcie
