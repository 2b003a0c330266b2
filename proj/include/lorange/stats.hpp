#pragma once

#include <span>

namespace lorange {

double mean(std::span<const double> values);
double sample_std(std::span<const double> values);       // ddof = 1
double sample_skewness(std::span<const double> values);  // adjusted Fisher-Pearson

// Order statistic with lower interpolation: sorted[floor(q*(n-1))].
double lower_quantile(std::span<const double> sorted_values, double q);

}  // namespace lorange
