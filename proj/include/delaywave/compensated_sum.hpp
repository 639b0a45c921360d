#pragma once

#include <cmath>

namespace delaywave {

// Neumaier's variant of Kahan summation. Unlike the classic form it stays
// accurate when an addend is larger in magnitude than the running sum, which
// is the normal situation for alternating delay-trig partial sums.
class CompensatedSum {
public:
    CompensatedSum& operator+=(double value) noexcept {
        const double t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value)) {
            compensation_ += (sum_ - t) + value;
        } else {
            compensation_ += (value - t) + sum_;
        }
        sum_ = t;
        return *this;
    }

    double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

}  // namespace delaywave
