#pragma once

#include <span>
#include <vector>

namespace battlytics::stats {

/// Median; an even count averages the two middle values. Throws std::invalid_argument on empty input.
double median(std::vector<double> values);

/// Linearly interpolated quantile (q in [0, 1]) over the sorted values.
double quantile(std::vector<double> values, double q);

double mean(std::span<const double> values);

/// Interquartile range divided by the median.
double relative_iqr(std::vector<double> values);

}  // namespace battlytics::stats
