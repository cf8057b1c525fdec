#include "battlytics/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace battlytics::stats {

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty set");
    const auto n = values.size();
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    const double upper = *mid;
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), mid);
    return (lower + upper) / 2.0;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile of empty set");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + (values[hi] - values[lo]) * frac;
}

double mean(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("mean of empty set");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double relative_iqr(std::vector<double> values) {
    const double med = median(values);
    if (med == 0.0) throw std::invalid_argument("relative IQR with zero median");
    const double q1 = quantile(values, 0.25);
    const double q3 = quantile(std::move(values), 0.75);
    return (q3 - q1) / med;
}

}  // namespace battlytics::stats
