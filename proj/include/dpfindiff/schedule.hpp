#pragma once

#include <cstddef>
#include <vector>

namespace dpfd {

// Linear beta grid, inclusive of both endpoints. Timesteps are 1-based.
struct DiffusionSchedule {
    std::size_t T = 0;
    std::vector<double> betas;      // betas[t-1] = beta_t
    std::vector<double> alphas;     // 1 - beta_t
    std::vector<double> alpha_bars; // running product of alphas

    double beta(std::size_t t) const { return betas[t - 1]; }
    double alpha(std::size_t t) const { return alphas[t - 1]; }
    double alpha_bar(std::size_t t) const { return alpha_bars[t - 1]; }
};

DiffusionSchedule make_schedule(std::size_t T, double beta_start, double beta_end);

} // namespace dpfd
