#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace dpfd {

struct DenoiserConfig {
    std::size_t input_dim = 0;  // d, the encoded width
    std::size_t hidden = 512;   // H
    std::size_t time_dim = 64;  // sinusoidal embedding width, must be even
    std::size_t n_classes = 0;  // 0 = unconditional
};

// Noise predictor: input layer d->H, two hidden layers HxH, output H->d,
// SiLU activations. The sinusoidal timestep embedding (plus the label
// embedding when conditioning) is linearly projected and added to the first
// hidden pre-activation.
struct DenoiserNet {
    DenoiserConfig cfg;
    std::vector<double> w_in;      // H x d
    std::vector<double> b_in;      // H
    std::vector<double> p_time;    // H x time_dim
    std::vector<double> label_emb; // n_classes x time_dim
    std::vector<double> w_h1;      // H x H
    std::vector<double> b_h1;      // H
    std::vector<double> w_h2;      // H x H
    std::vector<double> b_h2;      // H
    std::vector<double> w_out;     // d x H
    std::vector<double> b_out;     // d

    std::size_t parameter_count() const;
};

DenoiserNet init_denoiser(const DenoiserConfig& cfg, std::uint64_t seed);

// Per-call scratch. One instance per worker; reusable across samples.
struct DenoiserWorkspace {
    std::vector<double> t_emb;             // time_dim
    std::vector<double> pre1, h1;          // H
    std::vector<double> pre2, h2;          // H
    std::vector<double> pre3, h3;          // H
    std::vector<double> out;               // d
    std::vector<double> d_out;             // d (loss gradient wrt eps_hat)
    std::vector<double> d_pre;             // H (backward scratch)
    std::vector<double> d_h;               // H
    std::vector<double> d_temb;            // time_dim
    std::vector<double> d_input;           // d

    void resize(const DenoiserConfig& cfg);
};

void sinusoidal_embedding(std::size_t t, std::span<double> out);

// eps_hat lands in ws.out. Pure given (net, inputs).
void denoiser_forward(const DenoiserNet& net, std::span<const double> z_t,
                      std::size_t t, std::optional<std::size_t> label,
                      DenoiserWorkspace& ws);

// Flat-gradient views for the net's tensors, in canonical order.
struct NetGrads {
    double* w_in;
    double* b_in;
    double* p_time;
    double* label_emb;
    double* w_h1;
    double* b_h1;
    double* w_h2;
    double* b_h2;
    double* w_out;
    double* b_out;
};

// Accumulates parameter gradients for d_out = dL/d(eps_hat) into `grads`
// and leaves dL/d(z_t) in ws.d_input. Requires a preceding forward pass on
// the same workspace.
void denoiser_backward(const DenoiserNet& net, std::span<const double> z_t,
                       std::optional<std::size_t> label,
                       std::span<const double> d_out, const NetGrads& grads,
                       DenoiserWorkspace& ws);

} // namespace dpfd
