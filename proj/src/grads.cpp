#include "dpfindiff/grads.hpp"

#include <algorithm>
#include <cmath>

#include "dpfindiff/errors.hpp"

namespace dpfd {

double l2_norm(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

namespace {

// Pool of workspaces, one per OpenMP thread.
std::vector<GradWorkspace> make_workspaces(const TrainableModel& model, exec::Mode mode) {
    const int n = mode == exec::Mode::Parallel ? exec::max_threads() : 1;
    std::vector<GradWorkspace> pool(static_cast<std::size_t>(n));
    const std::size_t d = model.net.cfg.input_dim;
    for (auto& ws : pool) {
        ws.net_ws.resize(model.net.cfg);
        ws.z0.resize(d);
        ws.z_t.resize(d);
    }
    return pool;
}

std::size_t worker_index(exec::Mode mode) {
#ifdef _OPENMP
    return mode == exec::Mode::Parallel ? static_cast<std::size_t>(omp_get_thread_num()) : 0;
#else
    (void)mode;
    return 0;
#endif
}

} // namespace

double per_sample_grad(const TrainableModel& model, const Dataset& data,
                       const TrainingSample& sample, LossKind kind,
                       std::span<double> grad, GradWorkspace& ws) {
    const std::size_t d = model.net.cfg.input_dim;
    encode_row(data, sample.row, model.emb, ws.z0);
    apply_forward_noise(ws.z0, sample.eps, sample.t, model.schedule, ws.z_t);
    denoiser_forward(model.net, ws.z_t, sample.t, sample.label, ws.net_ws);

    const double loss =
        sample.weight * per_sample_loss(kind, sample.eps, ws.net_ws.out);
    if (!std::isfinite(loss)) {
        throw DataError("non-finite loss at dataset row " + std::to_string(sample.row));
    }

    // dL/d eps_hat; the residual factor carries the loss scaling.
    const double scale = sample.weight *
                         (kind == LossKind::Fa ? 2.0 : 2.0 / static_cast<double>(d));
    for (std::size_t i = 0; i < d; ++i) {
        ws.net_ws.d_out[i] = scale * (ws.net_ws.out[i] - sample.eps[i]);
    }
    NetGrads views = model.net_grad_view(grad.data());
    denoiser_backward(model.net, ws.z_t, sample.label, ws.net_ws.d_out, views,
                      ws.net_ws);

    // Embedding gradients flow through z_t = sqrt(abar) z0 + ...
    const double signal = std::sqrt(model.schedule.alpha_bar(sample.t));
    const std::size_t d_e = model.emb.d_e;
    std::size_t num_j = 0;
    std::size_t cat_j = 0;
    std::size_t slot = 0;
    for (const auto& c : model.schema.features) {
        const double* dz = ws.net_ws.d_input.data() + slot * d_e;
        if (c.kind == ColumnKind::Numeric) {
            const double x = data.num_at(sample.row, num_j);
            double* g = grad.data() + model.layout.numeric_weights + num_j * d_e;
            for (std::size_t k = 0; k < d_e; ++k) g[k] += signal * dz[k] * x;
            ++num_j;
        } else {
            const std::size_t idx = data.cat_at(sample.row, cat_j);
            double* g = grad.data() + model.layout.category_tables[cat_j] + idx * d_e;
            for (std::size_t k = 0; k < d_e; ++k) g[k] += signal * dz[k];
            ++cat_j;
        }
        ++slot;
    }
    return loss;
}

PerSampleGrads per_sample_grads(const TrainableModel& model, const Dataset& data,
                                std::span<const TrainingSample> batch, LossKind kind,
                                exec::Mode mode) {
    if (batch.empty()) {
        throw DataError("per_sample_grads: empty batch");
    }
    PerSampleGrads out;
    out.width = model.layout.total;
    out.rows.assign(batch.size() * out.width, 0.0);
    out.losses.assign(batch.size(), 0.0);
    auto pool = make_workspaces(model, mode);
    exec::parallel_for(batch.size(), mode, [&](std::size_t i) {
        GradWorkspace& ws = pool[worker_index(mode)];
        std::span<double> grad{out.rows.data() + i * out.width, out.width};
        out.losses[i] = per_sample_grad(model, data, batch[i], kind, grad, ws);
    });
    return out;
}

std::vector<double> batch_mean_grad(const TrainableModel& model, const Dataset& data,
                                    std::span<const TrainingSample> batch,
                                    LossKind kind) {
    if (batch.empty()) {
        throw DataError("batch_mean_grad: empty batch");
    }
    std::vector<double> acc(model.layout.total, 0.0);
    std::vector<double> scratch(model.layout.total);
    GradWorkspace ws;
    ws.net_ws.resize(model.net.cfg);
    ws.z0.resize(model.net.cfg.input_dim);
    ws.z_t.resize(model.net.cfg.input_dim);
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (const auto& sample : batch) {
        std::fill(scratch.begin(), scratch.end(), 0.0);
        per_sample_grad(model, data, sample, kind, scratch, ws);
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += inv_b * scratch[k];
    }
    return acc;
}

std::vector<double> measure_dp_signal(const TrainableModel& model, const Dataset& data,
                                      std::span<const TrainingSample> samples,
                                      std::span<const std::size_t> t_grid,
                                      double clip_norm, LossKind kind,
                                      exec::Mode mode) {
    if (samples.empty()) {
        throw DataError("measure_dp_signal: empty sample");
    }
    std::vector<double> signal(t_grid.size(), 0.0);
    auto pool = make_workspaces(model, mode);
    std::vector<std::vector<double>> grad_pool(
        pool.size(), std::vector<double>(model.layout.total, 0.0));

    for (std::size_t gi = 0; gi < t_grid.size(); ++gi) {
        const std::size_t t = t_grid[gi];
        std::vector<double> clipped(samples.size(), 0.0);
        exec::parallel_for(samples.size(), mode, [&](std::size_t i) {
            const std::size_t w = worker_index(mode);
            TrainingSample probe = samples[i];
            probe.t = t;
            auto& grad = grad_pool[w];
            std::fill(grad.begin(), grad.end(), 0.0);
            per_sample_grad(model, data, probe, kind, grad, pool[w]);
            clipped[i] = std::min(l2_norm(grad), clip_norm);
        });
        double acc = 0.0;
        for (double v : clipped) acc += v;
        signal[gi] = acc / static_cast<double>(samples.size());
    }
    return signal;
}

} // namespace dpfd
