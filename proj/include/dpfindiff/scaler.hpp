#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dpfindiff/schema.hpp"

namespace dpfd {

// Per-numeric-column standardization, population std convention.
struct ScalerParams {
    std::vector<double> mean; // one per numeric column
    std::vector<double> std;  // strictly positive after fitting

    double apply(std::size_t j, double x) const { return (x - mean[j]) / std[j]; }
    double invert(std::size_t j, double z) const { return z * std[j] + mean[j]; }
};

// Fit on the training split only. Constant columns are rejected.
ScalerParams fit_scaler(const Dataset& data, const TableSchema& schema);

// In-place standardization of a dataset's numeric block.
void apply_scaler(Dataset& data, const ScalerParams& scaler);

} // namespace dpfd
