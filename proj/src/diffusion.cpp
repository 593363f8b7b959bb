#include "dpfindiff/diffusion.hpp"

#include <cmath>
#include <string>

#include "dpfindiff/errors.hpp"

namespace dpfd {

LossKind parse_loss_kind(const std::string& name) {
    if (name == "mse") return LossKind::Mse;
    if (name == "fa") return LossKind::Fa;
    throw ConfigError("unknown loss kind '" + name + "' (expected mse or fa)");
}

const char* loss_kind_name(LossKind kind) {
    return kind == LossKind::Mse ? "mse" : "fa";
}

namespace {

void check_t(std::size_t t, const DiffusionSchedule& schedule) {
    if (t < 1 || t > schedule.T) {
        throw DataError("timestep " + std::to_string(t) + " out of range 1.." +
                        std::to_string(schedule.T));
    }
}

} // namespace

void apply_forward_noise(std::span<const double> z0, std::span<const double> eps,
                         std::size_t t, const DiffusionSchedule& schedule,
                         std::span<double> z_t) {
    check_t(t, schedule);
    const double abar = schedule.alpha_bar(t);
    const double signal = std::sqrt(abar);
    const double noise = std::sqrt(1.0 - abar);
    for (std::size_t i = 0; i < z0.size(); ++i) {
        z_t[i] = signal * z0[i] + noise * eps[i];
    }
}

NoisePair forward_noise(std::span<const double> z0, std::size_t t, Rng& rng,
                        const DiffusionSchedule& schedule) {
    check_t(t, schedule);
    NoisePair pair;
    pair.t = t;
    pair.eps.resize(z0.size());
    for (double& e : pair.eps) e = rng.next_gaussian();
    pair.z_t.resize(z0.size());
    apply_forward_noise(z0, pair.eps, t, schedule, pair.z_t);
    return pair;
}

double loss_fa(std::span<const double> eps, std::span<const double> eps_hat) {
    if (eps.size() != eps_hat.size()) {
        throw DataError("loss: residual width mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double r = eps[i] - eps_hat[i];
        acc += r * r;
    }
    return acc;
}

double loss_mse(std::span<const double> eps, std::span<const double> eps_hat) {
    return loss_fa(eps, eps_hat) / static_cast<double>(eps.size());
}

double per_sample_loss(LossKind kind, std::span<const double> eps,
                       std::span<const double> eps_hat) {
    return kind == LossKind::Fa ? loss_fa(eps, eps_hat) : loss_mse(eps, eps_hat);
}

void reverse_step_with_eps(std::span<double> z, std::size_t t,
                           std::span<const double> eps_hat, Rng& rng,
                           const DiffusionSchedule& schedule, bool add_noise) {
    check_t(t, schedule);
    const double beta = schedule.beta(t);
    const double alpha = schedule.alpha(t);
    const double abar = schedule.alpha_bar(t);
    const double mean_scale = 1.0 / std::sqrt(alpha);
    const double eps_scale = beta / std::sqrt(1.0 - abar);
    const bool inject = add_noise && t > 1;
    const double noise_std = std::sqrt(beta);
    for (std::size_t i = 0; i < z.size(); ++i) {
        double v = mean_scale * (z[i] - eps_scale * eps_hat[i]);
        if (inject) v += noise_std * rng.next_gaussian();
        z[i] = v;
    }
}

void reverse_step(const DenoiserNet& net, std::span<double> z, std::size_t t,
                  Rng& rng, const DiffusionSchedule& schedule,
                  std::optional<std::size_t> label, bool add_noise,
                  DenoiserWorkspace& ws) {
    denoiser_forward(net, {z.data(), z.size()}, t, label, ws);
    reverse_step_with_eps(z, t, ws.out, rng, schedule, add_noise);
}

} // namespace dpfd
