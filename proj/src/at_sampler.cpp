#include "dpfindiff/at_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "dpfindiff/csv.hpp"
#include "dpfindiff/errors.hpp"

namespace dpfd {

double alpha_at(std::size_t k, std::size_t total_epochs, double alpha_start,
                double alpha_end) {
    if (total_epochs == 0) {
        throw ConfigError("alpha_at: total epoch count must be >= 1");
    }
    if (k > total_epochs) {
        throw ConfigError("alpha_at: epoch index past the schedule");
    }
    const double frac = static_cast<double>(k) / static_cast<double>(total_epochs);
    return alpha_start + frac * (alpha_end - alpha_start);
}

std::vector<double> timestep_pmf(double alpha, std::size_t T) {
    if (T < 1) {
        throw ConfigError("timestep_pmf: T must be >= 1");
    }
    if (!std::isfinite(alpha)) {
        throw ConfigError("timestep_pmf: alpha must be finite");
    }
    std::vector<double> pmf(T);
    double total = 0.0;
    for (std::size_t t = 1; t <= T; ++t) {
        pmf[t - 1] = std::pow(static_cast<double>(t), alpha);
        total += pmf[t - 1];
    }
    for (double& p : pmf) p /= total;
    return pmf;
}

ATSamplerState make_at_sampler(double alpha_start, double alpha_end,
                               std::size_t total_epochs, std::size_t T) {
    ATSamplerState state;
    state.alpha_start = alpha_start;
    state.alpha_end = alpha_end;
    state.total_epochs = total_epochs;
    state.T = T;
    advance_to_epoch(state, 0);
    return state;
}

void advance_to_epoch(ATSamplerState& state, std::size_t epoch) {
    state.epoch = epoch;
    state.pmf = timestep_pmf(state.current_alpha(), state.T);
    state.cdf.resize(state.T);
    double running = 0.0;
    for (std::size_t i = 0; i < state.T; ++i) {
        running += state.pmf[i];
        state.cdf[i] = running;
    }
    state.cdf[state.T - 1] = 1.0;
}

std::vector<std::size_t> sample_timesteps(const ATSamplerState& state,
                                          std::size_t count, Rng& rng) {
    std::vector<std::size_t> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double u = rng.next_double();
        const auto it = std::upper_bound(state.cdf.begin(), state.cdf.end(), u);
        out[i] = static_cast<std::size_t>(it - state.cdf.begin()) + 1;
    }
    return out;
}

void dump_pmf_csv(const std::string& path, double alpha_start, double alpha_end,
                  std::size_t total_epochs, std::size_t T) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("pmf dump: cannot write '" + path + "'");
    }
    out << "epoch,alpha";
    for (std::size_t t = 1; t <= T; ++t) out << ",t" << t;
    out << '\n';
    for (std::size_t k = 0; k < total_epochs; ++k) {
        const double alpha = alpha_at(k, total_epochs, alpha_start, alpha_end);
        const auto pmf = timestep_pmf(alpha, T);
        out << k << ',' << format_double(alpha);
        for (double p : pmf) out << ',' << format_double(p);
        out << '\n';
    }
}

} // namespace dpfd
