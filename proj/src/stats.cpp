#include "bgw/stats.hpp"

#include <algorithm>
#include <cmath>

namespace bgw {

void MeanAccumulator::add(double x) {
    ++n_;
    double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
}

double MeanAccumulator::variance() const {
    if (n_ < 2) return 0.0;
    return m2_ / static_cast<double>(n_ - 1);
}

double MeanAccumulator::se() const {
    if (n_ < 2) return 0.0;
    return std::sqrt(variance() / static_cast<double>(n_));
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    double n = static_cast<double>(trials);
    double phat = static_cast<double>(successes) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (phat + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    Interval out{std::max(0.0, center - half), std::min(1.0, center + half)};
    // Degenerate proportions keep their endpoint despite rounding.
    if (successes == trials) out.hi = 1.0;
    if (successes == 0) out.lo = 0.0;
    return out;
}

double quantile(std::vector<double> values, double q) {
    return quantiles(std::move(values), {q}).front();
}

std::vector<double> quantiles(std::vector<double> values, const std::vector<double>& qs) {
    std::vector<double> out(qs.size(), 0.0);
    if (values.empty()) return out;
    std::sort(values.begin(), values.end());
    for (std::size_t k = 0; k < qs.size(); ++k) {
        double q = std::clamp(qs[k], 0.0, 1.0);
        double pos = q * static_cast<double>(values.size() - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        std::size_t hi = std::min(lo + 1, values.size() - 1);
        double frac = pos - static_cast<double>(lo);
        out[k] = values[lo] * (1.0 - frac) + values[hi] * frac;
    }
    return out;
}

}  // namespace bgw
