#include "dpfindiff/codec.hpp"

#include <cmath>
#include <limits>

#include "dpfindiff/errors.hpp"

namespace dpfd {

std::size_t EmbeddingSpace::parameter_count() const {
    std::size_t n = numeric_weights.size();
    for (const auto& table : category_embeddings) n += table.size();
    return n;
}

EmbeddingSpace init_embeddings(const TableSchema& schema, std::size_t d_e,
                               std::uint64_t seed) {
    if (d_e < 1) {
        throw ConfigError("init_embeddings: d_e must be >= 1");
    }
    EmbeddingSpace emb;
    emb.d_e = d_e;
    // N(0, 1/d_e) keeps every slot's norm O(1) so the forward-noise SNR is
    // comparable across features.
    const double stddev = 1.0 / std::sqrt(static_cast<double>(d_e));
    Rng rng(seed);
    emb.numeric_weights.resize(schema.d_num() * d_e);
    for (double& w : emb.numeric_weights) w = stddev * rng.next_gaussian();
    for (const auto& c : schema.features) {
        if (c.kind != ColumnKind::Categorical) continue;
        std::vector<double> table(c.vocab.size() * d_e);
        for (double& e : table) e = stddev * rng.next_gaussian();
        emb.category_embeddings.push_back(std::move(table));
    }
    return emb;
}

void encode_row(const Dataset& data, std::size_t row, const EmbeddingSpace& emb,
                std::span<double> out) {
    const TableSchema& schema = *data.schema;
    const std::size_t d_e = emb.d_e;
    std::size_t num_j = 0;
    std::size_t cat_j = 0;
    std::size_t slot = 0;
    for (const auto& c : schema.features) {
        double* dst = out.data() + slot * d_e;
        if (c.kind == ColumnKind::Numeric) {
            const double x = data.num_at(row, num_j);
            const double* w = emb.numeric_weights.data() + num_j * d_e;
            for (std::size_t k = 0; k < d_e; ++k) dst[k] = w[k] * x;
            ++num_j;
        } else {
            const std::size_t idx = data.cat_at(row, cat_j);
            const double* e = emb.category_embeddings[cat_j].data() + idx * d_e;
            for (std::size_t k = 0; k < d_e; ++k) dst[k] = e[k];
            ++cat_j;
        }
        ++slot;
    }
}

EncodedBatch encode(const Dataset& data, const EmbeddingSpace& emb, exec::Mode mode) {
    EncodedBatch batch;
    batch.dim = encoded_dim(*data.schema, emb.d_e);
    batch.z.resize(data.n_rows * batch.dim);
    batch.labels = data.labels;
    exec::parallel_for(data.n_rows, mode, [&](std::size_t i) {
        encode_row(data, i, emb, batch.row(i));
    });
    return batch;
}

DecodedRow decode_row(std::span<const double> z, const TableSchema& schema,
                      const ScalerParams& scaler, const EmbeddingSpace& emb) {
    const std::size_t d_e = emb.d_e;
    DecodedRow out;
    std::size_t num_j = 0;
    std::size_t cat_j = 0;
    std::size_t slot = 0;
    for (const auto& c : schema.features) {
        const double* v = z.data() + slot * d_e;
        if (c.kind == ColumnKind::Numeric) {
            const double* w = emb.numeric_weights.data() + num_j * d_e;
            double dot = 0.0;
            double norm_sq = 0.0;
            for (std::size_t k = 0; k < d_e; ++k) {
                dot += w[k] * v[k];
                norm_sq += w[k] * w[k];
            }
            if (norm_sq == 0.0) {
                throw DataError("decode: zero-norm weight vector for numeric column '" +
                                c.name + "'");
            }
            out.numeric.push_back(scaler.invert(num_j, dot / norm_sq));
            ++num_j;
        } else {
            const auto& table = emb.category_embeddings[cat_j];
            const std::size_t vocab_size = c.vocab.size();
            std::size_t best = 0;
            double best_dist = std::numeric_limits<double>::infinity();
            for (std::size_t idx = 0; idx < vocab_size; ++idx) {
                const double* e = table.data() + idx * d_e;
                double dist = 0.0;
                for (std::size_t k = 0; k < d_e; ++k) {
                    const double d = v[k] - e[k];
                    dist += d * d;
                }
                if (dist < best_dist) { // strict: ties keep the lowest index
                    best_dist = dist;
                    best = idx;
                }
            }
            out.cat.push_back(best);
            ++cat_j;
        }
        ++slot;
    }
    return out;
}

std::vector<DecodedRow> decode(const EncodedBatch& batch, const TableSchema& schema,
                               const ScalerParams& scaler, const EmbeddingSpace& emb,
                               exec::Mode mode) {
    std::vector<DecodedRow> rows(batch.size());
    exec::parallel_for(batch.size(), mode, [&](std::size_t i) {
        rows[i] = decode_row(batch.row(i), schema, scaler, emb);
    });
    return rows;
}

} // namespace dpfd
