#include "dpfindiff/denoiser.hpp"

#include <cmath>

#include "dpfindiff/errors.hpp"
#include "dpfindiff/rng.hpp"

namespace dpfd {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double silu(double x) { return x * sigmoid(x); }
inline double silu_grad(double x) {
    const double s = sigmoid(x);
    return s * (1.0 + x * (1.0 - s));
}

// y = W x + b, W is rows x cols row-major.
void affine(const double* w, const double* b, const double* x,
            std::size_t rows, std::size_t cols, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* wr = w + r * cols;
        double acc = b ? b[r] : 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
        y[r] = acc;
    }
}

// x_grad = W^T y_grad.
void affine_backward_input(const double* w, const double* y_grad,
                           std::size_t rows, std::size_t cols, double* x_grad) {
    for (std::size_t c = 0; c < cols; ++c) x_grad[c] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double* wr = w + r * cols;
        const double g = y_grad[r];
        for (std::size_t c = 0; c < cols; ++c) x_grad[c] += g * wr[c];
    }
}

// w_grad += y_grad x^T; b_grad += y_grad.
void affine_backward_params(const double* x, const double* y_grad,
                            std::size_t rows, std::size_t cols,
                            double* w_grad, double* b_grad) {
    for (std::size_t r = 0; r < rows; ++r) {
        double* wr = w_grad + r * cols;
        const double g = y_grad[r];
        for (std::size_t c = 0; c < cols; ++c) wr[c] += g * x[c];
        if (b_grad) b_grad[r] += g;
    }
}

} // namespace

std::size_t DenoiserNet::parameter_count() const {
    return w_in.size() + b_in.size() + p_time.size() + label_emb.size() +
           w_h1.size() + b_h1.size() + w_h2.size() + b_h2.size() +
           w_out.size() + b_out.size();
}

DenoiserNet init_denoiser(const DenoiserConfig& cfg, std::uint64_t seed) {
    if (cfg.input_dim == 0 || cfg.hidden == 0) {
        throw ConfigError("init_denoiser: zero layer width");
    }
    if (cfg.time_dim < 2 || cfg.time_dim % 2 != 0) {
        throw ConfigError("init_denoiser: time_dim must be even and >= 2");
    }
    DenoiserNet net;
    net.cfg = cfg;
    const std::size_t d = cfg.input_dim;
    const std::size_t h = cfg.hidden;
    const std::size_t dt = cfg.time_dim;

    Rng rng(seed);
    auto fill = [&rng](std::vector<double>& v, std::size_t n, std::size_t fan_in) {
        v.resize(n);
        const double stddev = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (double& x : v) x = stddev * rng.next_gaussian();
    };
    fill(net.w_in, h * d, d);
    net.b_in.assign(h, 0.0);
    fill(net.p_time, h * dt, dt);
    if (cfg.n_classes > 0) fill(net.label_emb, cfg.n_classes * dt, dt);
    fill(net.w_h1, h * h, h);
    net.b_h1.assign(h, 0.0);
    fill(net.w_h2, h * h, h);
    net.b_h2.assign(h, 0.0);
    fill(net.w_out, d * h, h);
    net.b_out.assign(d, 0.0);
    return net;
}

void DenoiserWorkspace::resize(const DenoiserConfig& cfg) {
    t_emb.resize(cfg.time_dim);
    pre1.resize(cfg.hidden);
    h1.resize(cfg.hidden);
    pre2.resize(cfg.hidden);
    h2.resize(cfg.hidden);
    pre3.resize(cfg.hidden);
    h3.resize(cfg.hidden);
    out.resize(cfg.input_dim);
    d_out.resize(cfg.input_dim);
    d_pre.resize(cfg.hidden);
    d_h.resize(cfg.hidden);
    d_temb.resize(cfg.time_dim);
    d_input.resize(cfg.input_dim);
}

void sinusoidal_embedding(std::size_t t, std::span<double> out) {
    const std::size_t half = out.size() / 2;
    const double log_max_period = std::log(10000.0);
    for (std::size_t i = 0; i < half; ++i) {
        const double freq =
            std::exp(-log_max_period * static_cast<double>(i) / static_cast<double>(half));
        const double arg = static_cast<double>(t) * freq;
        out[i] = std::sin(arg);
        out[half + i] = std::cos(arg);
    }
}

void denoiser_forward(const DenoiserNet& net, std::span<const double> z_t,
                      std::size_t t, std::optional<std::size_t> label,
                      DenoiserWorkspace& ws) {
    const auto& cfg = net.cfg;
    if (z_t.size() != cfg.input_dim) {
        throw DataError("denoiser_forward: input width mismatch");
    }
    if (label && *label >= cfg.n_classes) {
        throw DataError("denoiser_forward: label out of range");
    }
    const std::size_t h = cfg.hidden;
    const std::size_t d = cfg.input_dim;
    const std::size_t dt = cfg.time_dim;

    sinusoidal_embedding(t, ws.t_emb);
    if (label) {
        const double* e = net.label_emb.data() + *label * dt;
        for (std::size_t i = 0; i < dt; ++i) ws.t_emb[i] += e[i];
    }

    affine(net.w_in.data(), net.b_in.data(), z_t.data(), h, d, ws.pre1.data());
    for (std::size_t r = 0; r < h; ++r) {
        const double* pr = net.p_time.data() + r * dt;
        double acc = 0.0;
        for (std::size_t c = 0; c < dt; ++c) acc += pr[c] * ws.t_emb[c];
        ws.pre1[r] += acc;
    }
    for (std::size_t r = 0; r < h; ++r) ws.h1[r] = silu(ws.pre1[r]);

    affine(net.w_h1.data(), net.b_h1.data(), ws.h1.data(), h, h, ws.pre2.data());
    for (std::size_t r = 0; r < h; ++r) ws.h2[r] = silu(ws.pre2[r]);

    affine(net.w_h2.data(), net.b_h2.data(), ws.h2.data(), h, h, ws.pre3.data());
    for (std::size_t r = 0; r < h; ++r) ws.h3[r] = silu(ws.pre3[r]);

    affine(net.w_out.data(), net.b_out.data(), ws.h3.data(), d, h, ws.out.data());
}

void denoiser_backward(const DenoiserNet& net, std::span<const double> z_t,
                       std::optional<std::size_t> label,
                       std::span<const double> d_out, const NetGrads& grads,
                       DenoiserWorkspace& ws) {
    const auto& cfg = net.cfg;
    const std::size_t h = cfg.hidden;
    const std::size_t d = cfg.input_dim;
    const std::size_t dt = cfg.time_dim;

    // output layer
    affine_backward_params(ws.h3.data(), d_out.data(), d, h, grads.w_out, grads.b_out);
    affine_backward_input(net.w_out.data(), d_out.data(), d, h, ws.d_h.data());

    // hidden 2
    for (std::size_t r = 0; r < h; ++r) ws.d_pre[r] = ws.d_h[r] * silu_grad(ws.pre3[r]);
    affine_backward_params(ws.h2.data(), ws.d_pre.data(), h, h, grads.w_h2, grads.b_h2);
    affine_backward_input(net.w_h2.data(), ws.d_pre.data(), h, h, ws.d_h.data());

    // hidden 1
    for (std::size_t r = 0; r < h; ++r) ws.d_pre[r] = ws.d_h[r] * silu_grad(ws.pre2[r]);
    affine_backward_params(ws.h1.data(), ws.d_pre.data(), h, h, grads.w_h1, grads.b_h1);
    affine_backward_input(net.w_h1.data(), ws.d_pre.data(), h, h, ws.d_h.data());

    // input layer (+ time/label injection)
    for (std::size_t r = 0; r < h; ++r) ws.d_pre[r] = ws.d_h[r] * silu_grad(ws.pre1[r]);
    affine_backward_params(z_t.data(), ws.d_pre.data(), h, d, grads.w_in, grads.b_in);
    affine_backward_params(ws.t_emb.data(), ws.d_pre.data(), h, dt, grads.p_time, nullptr);
    if (label) {
        affine_backward_input(net.p_time.data(), ws.d_pre.data(), h, dt, ws.d_temb.data());
        double* le = grads.label_emb + *label * dt;
        for (std::size_t i = 0; i < dt; ++i) le[i] += ws.d_temb[i];
    }
    affine_backward_input(net.w_in.data(), ws.d_pre.data(), h, d, ws.d_input.data());
}

} // namespace dpfd
