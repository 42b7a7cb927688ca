#pragma once

#include <span>

namespace geopulse::trigger {

// Pearson correlation. Returns 0 when either input is constant.
// Throws invalid_argument on length mismatch or fewer than 2 values.
double pearson(std::span<const double> x, std::span<const double> y);

double sigmoid(double z);

}  // namespace geopulse::trigger
