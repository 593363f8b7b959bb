#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dpfindiff/accountant.hpp"
#include "dpfindiff/grads.hpp"
#include "dpfindiff/model.hpp"
#include "dpfindiff/rng.hpp"

namespace dpfd {

struct DpConfig {
    double clip_norm = 1.0;        // C
    double noise_multiplier = 0.0; // sigma
    double sampling_rate = 0.0;    // q = B/N
    double delta = 1e-5;
    std::size_t batch_size = 0;    // expected Poisson lot size B
    std::size_t max_steps = 0;

    void validate() const; // throws ConfigError
};

// g <- g * min(1, C / ||g||); inputs already within the bound pass through
// without any arithmetic so their bits are untouched.
void clip_gradient(std::span<double> g, double clip_norm);

struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::size_t step = 0;
    std::vector<double> m;
    std::vector<double> v;
};

AdamState make_adam(std::size_t n_params, double lr);

// One Adam update from an averaged gradient.
void adam_update(TrainableModel& model, AdamState& adam,
                 std::span<const double> grad);

// DP-SGD step from materialized clipped per-sample gradients: validates the
// norm bound, sums, adds N(0, (sigma C)^2) per coordinate, divides by the
// expected batch size and applies Adam. Advances the ledger first so an
// exhausted budget refuses before touching parameters.
void dp_step(TrainableModel& model, const PerSampleGrads& clipped,
             const DpConfig& cfg, Rng& rng, AdamState& adam,
             PrivacyLedger& ledger);

// Same mechanism when the clipped sum has already been accumulated.
void dp_step_presummed(TrainableModel& model, std::span<const double> clipped_sum,
                       const DpConfig& cfg, Rng& rng, AdamState& adam,
                       PrivacyLedger& ledger);

// Per-epoch distribution summary of per-sample gradient norms (pre-clip).
struct GradNormStats {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;
    double rel_variance = 0.0; // Var / E^2
    double skewness = 0.0;
    double fraction_clipped = 0.0; // share with norm > C
};

GradNormStats grad_norm_diagnostics(std::span<const double> norms, double clip_norm);

// Streaming per-sample backprop + clip over a batch. Samples are processed
// in fixed-size chunks: gradients inside a chunk are computed in parallel
// into disjoint slots, then reduced serially in sample order, so the sum is
// bit-identical for every thread count. clip_norm = +inf disables clipping
// (non-DP path). Verifies the post-clip norm bound on every sample.
struct ClippedBatch {
    std::vector<double> sum;            // layout.total
    std::vector<double> pre_clip_norms; // one per sample
    std::vector<double> losses;         // one per sample
};

ClippedBatch accumulate_clipped_grads(const TrainableModel& model,
                                      const Dataset& data,
                                      std::span<const TrainingSample> batch,
                                      LossKind kind, double clip_norm,
                                      exec::Mode mode = exec::Mode::Parallel);

} // namespace dpfd
