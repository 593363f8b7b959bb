#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dpfindiff/diffusion.hpp"
#include "dpfindiff/model.hpp"
#include "dpfindiff/parallel.hpp"

namespace dpfd {

// One prepared training example: dataset row, sampled timestep and the
// stored Gaussian draw, so the gradient is a pure function of the model.
struct TrainingSample {
    std::size_t row = 0;
    std::size_t t = 1;
    std::optional<std::size_t> label;
    std::vector<double> eps;
    double weight = 1.0; // importance-sampling correction, 1 when disabled
};

// Scratch owned by one worker.
struct GradWorkspace {
    DenoiserWorkspace net_ws;
    std::vector<double> z0;
    std::vector<double> z_t;
};

// Gradient of this sample's individual loss over all trainable parameters
// (denoiser plus embeddings). `grad` must be zeroed and layout.total wide.
// Returns the per-sample loss. Numeric columns of `data` must be scaled.
double per_sample_grad(const TrainableModel& model, const Dataset& data,
                       const TrainingSample& sample, LossKind kind,
                       std::span<double> grad, GradWorkspace& ws);

// Materialized per-sample gradients, one flat row per sample. Used by tests
// and diagnostics; the training loop streams through chunks instead.
struct PerSampleGrads {
    std::size_t width = 0;
    std::vector<double> rows; // B x width
    std::vector<double> losses;

    std::span<const double> grad(std::size_t i) const {
        return {rows.data() + i * width, width};
    }
};

PerSampleGrads per_sample_grads(const TrainableModel& model, const Dataset& data,
                                std::span<const TrainingSample> batch, LossKind kind,
                                exec::Mode mode = exec::Mode::Parallel);

// Gradient of the batch-mean loss, accumulated into a single buffer. Serves
// as the independent whole-batch route for the decomposition property.
std::vector<double> batch_mean_grad(const TrainableModel& model, const Dataset& data,
                                    std::span<const TrainingSample> batch,
                                    LossKind kind);

// Mean clipped per-sample gradient norm at each timestep of `t_grid`,
// reusing each sample's stored eps. Post-hoc diagnostic only; never feeds
// parameter updates.
std::vector<double> measure_dp_signal(const TrainableModel& model, const Dataset& data,
                                      std::span<const TrainingSample> samples,
                                      std::span<const std::size_t> t_grid,
                                      double clip_norm, LossKind kind,
                                      exec::Mode mode = exec::Mode::Parallel);

double l2_norm(std::span<const double> v);

} // namespace dpfd
