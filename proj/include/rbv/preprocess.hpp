#pragma once

#include "rbv/table.hpp"

namespace rbv {

// Replaces every missing cell with the arithmetic mean of the non-missing
// values of its column, computed over all rows of both classes. The missing
// mask is preserved for audit. Throws if a column is entirely missing.
FeatureTable impute_mean(const FeatureTable& table);

// Per-column winsorization: values below the lower_pct percentile (linear
// interpolation convention) are clipped to it, values above upper_pct
// likewise. Percentiles are computed over non-missing values only; missing
// cells are untouched. (0, 100) is the identity.
FeatureTable winsorize(const FeatureTable& table, double lower_pct, double upper_pct);

}  // namespace rbv
