#pragma once

#include <cstdint>
#include <vector>

namespace bgw {

// Welford accumulator for mean and standard error.
class MeanAccumulator {
public:
    void add(double x);
    std::uint64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const;  // sample variance (n-1 denominator)
    double se() const;        // standard error of the mean

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return lo <= x && x <= hi; }
};

// Wilson score interval for a binomial proportion (default 95%).
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                         double z = 1.959963984540054);

// Quantile with linear interpolation; takes values by copy and sorts.
double quantile(std::vector<double> values, double q);
std::vector<double> quantiles(std::vector<double> values, const std::vector<double>& qs);

}  // namespace bgw
