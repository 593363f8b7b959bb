#include "dpfindiff/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dpfindiff/errors.hpp"
#include "dpfindiff/mathstat.hpp"

namespace dpfd {

void DpConfig::validate() const {
    if (!(clip_norm > 0.0)) throw ConfigError("dp: clip norm must be > 0");
    if (noise_multiplier < 0.0) throw ConfigError("dp: sigma must be >= 0");
    if (!(sampling_rate > 0.0) || sampling_rate > 1.0) {
        throw ConfigError("dp: sampling rate must be in (0, 1]");
    }
    if (!(delta > 0.0) || delta >= 1.0) throw ConfigError("dp: delta must be in (0, 1)");
    if (batch_size == 0) throw ConfigError("dp: batch size must be > 0");
}

void clip_gradient(std::span<double> g, double clip_norm) {
    const double norm = l2_norm(g);
    if (norm <= clip_norm) return;
    const double scale = clip_norm / norm;
    for (double& x : g) x *= scale;
}

AdamState make_adam(std::size_t n_params, double lr) {
    AdamState adam;
    adam.lr = lr;
    adam.m.assign(n_params, 0.0);
    adam.v.assign(n_params, 0.0);
    return adam;
}

void adam_update(TrainableModel& model, AdamState& adam,
                 std::span<const double> grad) {
    adam.step += 1;
    const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(adam.step));
    const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(adam.step));
    std::size_t k = 0;
    model.for_each_tensor([&](double* p, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i, ++k) {
            const double g = grad[k];
            adam.m[k] = adam.beta1 * adam.m[k] + (1.0 - adam.beta1) * g;
            adam.v[k] = adam.beta2 * adam.v[k] + (1.0 - adam.beta2) * g * g;
            const double m_hat = adam.m[k] / bc1;
            const double v_hat = adam.v[k] / bc2;
            p[i] -= adam.lr * m_hat / (std::sqrt(v_hat) + adam.eps);
        }
    });
}

namespace {

void noisy_average_and_update(TrainableModel& model,
                              std::span<const double> clipped_sum,
                              const DpConfig& cfg, Rng& rng, AdamState& adam) {
    std::vector<double> ghat(clipped_sum.begin(), clipped_sum.end());
    // Noise std sigma*C on the sum, matching the sensitivity-C analysis the
    // accountant assumes; then normalize by the expected lot size.
    const double noise_std = cfg.noise_multiplier * cfg.clip_norm;
    if (noise_std > 0.0) {
        for (double& x : ghat) x += noise_std * rng.next_gaussian();
    }
    const double inv_b = 1.0 / static_cast<double>(cfg.batch_size);
    for (double& x : ghat) x *= inv_b;
    adam_update(model, adam, ghat);
}

} // namespace

void dp_step_presummed(TrainableModel& model, std::span<const double> clipped_sum,
                       const DpConfig& cfg, Rng& rng, AdamState& adam,
                       PrivacyLedger& ledger) {
    cfg.validate();
    ledger.record_step(); // throws BudgetError when exhausted
    noisy_average_and_update(model, clipped_sum, cfg, rng, adam);
}

void dp_step(TrainableModel& model, const PerSampleGrads& clipped,
             const DpConfig& cfg, Rng& rng, AdamState& adam,
             PrivacyLedger& ledger) {
    cfg.validate();
    const std::size_t n = clipped.losses.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double norm = l2_norm(clipped.grad(i));
        if (norm > cfg.clip_norm + 1e-9) {
            throw DataError("dp_step: gradient " + std::to_string(i) +
                            " exceeds the clip bound: " + std::to_string(norm));
        }
    }
    std::vector<double> sum(clipped.width, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = clipped.rows.data() + i * clipped.width;
        for (std::size_t k = 0; k < clipped.width; ++k) sum[k] += row[k];
    }
    ledger.record_step();
    noisy_average_and_update(model, sum, cfg, rng, adam);
}

GradNormStats grad_norm_diagnostics(std::span<const double> norms, double clip_norm) {
    if (norms.size() < 2) {
        throw DataError("grad_norm_diagnostics: need at least 2 norms");
    }
    const Moments m = compute_moments(norms);
    GradNormStats stats;
    stats.count = m.count;
    stats.mean = m.mean;
    stats.variance = m.variance;
    stats.rel_variance = m.mean != 0.0 ? m.variance / (m.mean * m.mean) : 0.0;
    stats.skewness = m.skewness;
    std::size_t clipped = 0;
    for (double n : norms) clipped += n > clip_norm ? 1 : 0;
    stats.fraction_clipped =
        static_cast<double>(clipped) / static_cast<double>(norms.size());
    return stats;
}

ClippedBatch accumulate_clipped_grads(const TrainableModel& model,
                                      const Dataset& data,
                                      std::span<const TrainingSample> batch,
                                      LossKind kind, double clip_norm,
                                      exec::Mode mode) {
    // Fixed chunk size: the reduction order never depends on thread count.
    constexpr std::size_t kChunk = 32;
    const std::size_t width = model.layout.total;

    ClippedBatch out;
    out.sum.assign(width, 0.0);
    out.pre_clip_norms.resize(batch.size());
    out.losses.resize(batch.size());

    const bool clipping = std::isfinite(clip_norm);
    std::vector<double> slots(std::min(kChunk, batch.size()) * width);
    std::vector<GradWorkspace> pool(
        static_cast<std::size_t>(mode == exec::Mode::Parallel ? exec::max_threads() : 1));
    for (auto& ws : pool) {
        ws.net_ws.resize(model.net.cfg);
        ws.z0.resize(model.net.cfg.input_dim);
        ws.z_t.resize(model.net.cfg.input_dim);
    }

    for (std::size_t base = 0; base < batch.size(); base += kChunk) {
        const std::size_t chunk = std::min(kChunk, batch.size() - base);
        exec::parallel_for(chunk, mode, [&](std::size_t c) {
#ifdef _OPENMP
            const std::size_t w = mode == exec::Mode::Parallel
                                      ? static_cast<std::size_t>(omp_get_thread_num())
                                      : 0;
#else
            const std::size_t w = 0;
#endif
            std::span<double> grad{slots.data() + c * width, width};
            std::fill(grad.begin(), grad.end(), 0.0);
            const std::size_t i = base + c;
            out.losses[i] = per_sample_grad(model, data, batch[i], kind, grad, pool[w]);
            out.pre_clip_norms[i] = l2_norm(grad);
            if (clipping) {
                clip_gradient(grad, clip_norm);
                if (out.pre_clip_norms[i] > clip_norm &&
                    l2_norm(grad) > clip_norm + 1e-9) {
                    throw DataError("clip bound violated at sample " + std::to_string(i));
                }
            }
        });
        // Serial reduction in sample order keeps the sum deterministic.
        for (std::size_t c = 0; c < chunk; ++c) {
            const double* g = slots.data() + c * width;
            for (std::size_t k = 0; k < width; ++k) out.sum[k] += g[k];
        }
    }
    return out;
}

} // namespace dpfd
