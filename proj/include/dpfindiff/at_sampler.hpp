#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dpfindiff/rng.hpp"

namespace dpfd {

// alpha_k = alpha_start + (k/K)(alpha_end - alpha_start), k = completed epochs.
double alpha_at(std::size_t k, std::size_t total_epochs, double alpha_start,
                double alpha_end);

// P(t) = t^alpha / sum_s s^alpha over t = 1..T. Exactly uniform at alpha = 0.
std::vector<double> timestep_pmf(double alpha, std::size_t T);

// Annealed power-law distribution over timesteps. The pmf is frozen within
// an epoch; advance_to_epoch rebuilds it. alpha_start = alpha_end = 0 gives
// the plain uniform sampler.
struct ATSamplerState {
    double alpha_start = 3.0;
    double alpha_end = -1.0;
    std::size_t total_epochs = 1; // K
    std::size_t epoch = 0;        // k
    std::size_t T = 0;
    std::vector<double> pmf;
    std::vector<double> cdf;

    double current_alpha() const {
        return alpha_at(epoch, total_epochs, alpha_start, alpha_end);
    }
    double probability(std::size_t t) const { return pmf[t - 1]; }
};

ATSamplerState make_at_sampler(double alpha_start, double alpha_end,
                               std::size_t total_epochs, std::size_t T);

void advance_to_epoch(ATSamplerState& state, std::size_t epoch);

// i.i.d. draws from the cached pmf via inverse CDF; 1-based timesteps.
std::vector<std::size_t> sample_timesteps(const ATSamplerState& state,
                                          std::size_t count, Rng& rng);

// Per-epoch pmf rows (epoch, alpha, P(1)..P(T)) for heatmap reproduction.
void dump_pmf_csv(const std::string& path, double alpha_start, double alpha_end,
                  std::size_t total_epochs, std::size_t T);

} // namespace dpfd
