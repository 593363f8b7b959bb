#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dpfindiff/parallel.hpp"
#include "dpfindiff/rng.hpp"
#include "dpfindiff/scaler.hpp"
#include "dpfindiff/schema.hpp"

namespace dpfd {

// Trainable map from mixed-type records to the dense space the diffusion
// runs in. Numeric feature j contributes w_j * x_j (one weight vector per
// feature), categorical feature j an embedding-table lookup; slots are laid
// out in schema feature order, d_e entries each.
struct EmbeddingSpace {
    std::size_t d_e = 2;
    std::vector<double> numeric_weights;                  // d_num x d_e
    std::vector<std::vector<double>> category_embeddings; // per cat column: vocab x d_e

    std::span<const double> numeric_weight(std::size_t j) const {
        return {numeric_weights.data() + j * d_e, d_e};
    }
    std::span<const double> category_vector(std::size_t j, std::size_t idx) const {
        return {category_embeddings[j].data() + idx * d_e, d_e};
    }

    std::size_t parameter_count() const;
};

EmbeddingSpace init_embeddings(const TableSchema& schema, std::size_t d_e,
                               std::uint64_t seed);

inline std::size_t encoded_dim(const TableSchema& schema, std::size_t d_e) {
    return (schema.d_num() + schema.d_cat()) * d_e;
}

struct EncodedBatch {
    std::size_t dim = 0;
    std::vector<double> z;             // n x dim, row-major
    std::vector<std::size_t> labels;   // n when conditioning

    std::size_t size() const { return dim == 0 ? 0 : z.size() / dim; }
    std::span<const double> row(std::size_t i) const { return {z.data() + i * dim, dim}; }
    std::span<double> row(std::size_t i) { return {z.data() + i * dim, dim}; }
};

// Encode one parsed row (scaled numerics + category indices) into `out`.
void encode_row(const Dataset& data, std::size_t row, const EmbeddingSpace& emb,
                std::span<double> out);

// Encode a whole dataset; numeric values must already be scaled.
EncodedBatch encode(const Dataset& data, const EmbeddingSpace& emb,
                    exec::Mode mode = exec::Mode::Parallel);

struct DecodedRow {
    std::vector<double> numeric;     // unscaled data units, numeric-column order
    std::vector<std::size_t> cat;    // vocab indices, categorical-column order
};

// Nearest-neighbor decode for categorical slots (ties -> lowest vocab index),
// least-squares inversion x = (w.z)/(w.w) for numeric slots.
DecodedRow decode_row(std::span<const double> z, const TableSchema& schema,
                      const ScalerParams& scaler, const EmbeddingSpace& emb);

std::vector<DecodedRow> decode(const EncodedBatch& batch, const TableSchema& schema,
                               const ScalerParams& scaler, const EmbeddingSpace& emb,
                               exec::Mode mode = exec::Mode::Parallel);

} // namespace dpfd
