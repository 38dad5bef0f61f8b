#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

namespace negmem {

// Compensated (Kahan) accumulator. Long ledgers and covariance prefix sums
// cancel heavily, so plain += loses digits we need.
class KahanSum {
public:
    void add(double x) {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double kahan_total(std::span<const double> xs) {
    KahanSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

inline double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Shortest-exact decimal for doubles; used by every CSV/JSON writer so that
// identical runs produce identical bytes.
std::string format_double(double x);

}  // namespace negmem
