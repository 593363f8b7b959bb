#include "dpfindiff/scaler.hpp"

#include <cmath>

#include "dpfindiff/errors.hpp"

namespace dpfd {

ScalerParams fit_scaler(const Dataset& data, const TableSchema& schema) {
    const std::size_t d_num = schema.d_num();
    ScalerParams params;
    params.mean.assign(d_num, 0.0);
    params.std.assign(d_num, 0.0);
    if (data.n_rows == 0) {
        throw DataError("fit_scaler: empty dataset");
    }

    std::vector<std::string> numeric_names;
    for (const auto& c : schema.features) {
        if (c.kind == ColumnKind::Numeric) numeric_names.push_back(c.name);
    }

    const double n = static_cast<double>(data.n_rows);
    for (std::size_t j = 0; j < d_num; ++j) {
        double sum = 0.0;
        for (std::size_t r = 0; r < data.n_rows; ++r) sum += data.num_at(r, j);
        const double mean = sum / n;
        double sq = 0.0;
        for (std::size_t r = 0; r < data.n_rows; ++r) {
            const double d = data.num_at(r, j) - mean;
            sq += d * d;
        }
        const double std_dev = std::sqrt(sq / n);
        if (!(std_dev > 0.0)) {
            throw DataError("fit_scaler: column '" + numeric_names[j] +
                            "' is constant (std = 0)");
        }
        params.mean[j] = mean;
        params.std[j] = std_dev;
    }
    return params;
}

void apply_scaler(Dataset& data, const ScalerParams& scaler) {
    const std::size_t d_num = data.schema->d_num();
    for (std::size_t r = 0; r < data.n_rows; ++r) {
        for (std::size_t j = 0; j < d_num; ++j) {
            data.numeric[r * d_num + j] = scaler.apply(j, data.numeric[r * d_num + j]);
        }
    }
}

} // namespace dpfd
