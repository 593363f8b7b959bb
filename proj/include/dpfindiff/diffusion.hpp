#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dpfindiff/denoiser.hpp"
#include "dpfindiff/rng.hpp"
#include "dpfindiff/schedule.hpp"

namespace dpfd {

enum class LossKind { Mse, Fa };

LossKind parse_loss_kind(const std::string& name);
const char* loss_kind_name(LossKind kind);

// One forward-noised example. z_t is reproducible from (z0, eps, t).
struct NoisePair {
    std::vector<double> z_t;
    std::vector<double> eps;
    std::size_t t = 0;
    std::optional<std::size_t> label;
};

NoisePair forward_noise(std::span<const double> z0, std::size_t t, Rng& rng,
                        const DiffusionSchedule& schedule);

// z_t = sqrt(abar_t) z0 + sqrt(1 - abar_t) eps with a caller-supplied draw.
void apply_forward_noise(std::span<const double> z0, std::span<const double> eps,
                         std::size_t t, const DiffusionSchedule& schedule,
                         std::span<double> z_t);

// Per-sample losses on the residual eps - eps_hat. FA sums squared errors
// over features, MSE averages them, so fa = d * mse identically.
double loss_mse(std::span<const double> eps, std::span<const double> eps_hat);
double loss_fa(std::span<const double> eps, std::span<const double> eps_hat);
double per_sample_loss(LossKind kind, std::span<const double> eps,
                       std::span<const double> eps_hat);

// One ancestral step z_t -> z_{t-1} with posterior std sqrt(beta_t).
// No noise is ever injected at t = 1.
void reverse_step(const DenoiserNet& net, std::span<double> z, std::size_t t,
                  Rng& rng, const DiffusionSchedule& schedule,
                  std::optional<std::size_t> label, bool add_noise,
                  DenoiserWorkspace& ws);

// Same update with an externally supplied eps_hat (oracle tests).
void reverse_step_with_eps(std::span<double> z, std::size_t t,
                           std::span<const double> eps_hat, Rng& rng,
                           const DiffusionSchedule& schedule, bool add_noise);

} // namespace dpfd
