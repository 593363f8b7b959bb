#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "dpfindiff/codec.hpp"
#include "dpfindiff/denoiser.hpp"
#include "dpfindiff/scaler.hpp"
#include "dpfindiff/schedule.hpp"
#include "dpfindiff/schema.hpp"

namespace dpfd {

// Flat offsets of every trainable tensor, canonical order: denoiser tensors
// first, then numeric weights, then one block per categorical table. The
// same order is used for gradients, Adam state and checkpoints.
struct ParamLayout {
    std::size_t w_in = 0, b_in = 0, p_time = 0, label_emb = 0;
    std::size_t w_h1 = 0, b_h1 = 0, w_h2 = 0, b_h2 = 0, w_out = 0, b_out = 0;
    std::size_t numeric_weights = 0;
    std::vector<std::size_t> category_tables;
    std::size_t total = 0;
};

// Everything the optimizer trains plus the frozen pieces (schema, scaler,
// schedule) needed to interpret it.
struct TrainableModel {
    TableSchema schema;
    ScalerParams scaler;
    EmbeddingSpace emb;
    DenoiserNet net;
    DiffusionSchedule schedule;
    ParamLayout layout;

    void build_layout();
    std::size_t parameter_count() const { return layout.total; }

    NetGrads net_grad_view(double* flat) const;

    // Visits every trainable tensor in canonical order.
    void for_each_tensor(const std::function<void(double*, std::size_t)>& fn);
    void for_each_tensor(const std::function<void(const double*, std::size_t)>& fn) const;

    std::vector<double> gather_params() const;
    void scatter_params(std::span<const double> flat);
};

} // namespace dpfd
