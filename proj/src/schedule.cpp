#include "dpfindiff/schedule.hpp"

#include "dpfindiff/errors.hpp"

namespace dpfd {

DiffusionSchedule make_schedule(std::size_t T, double beta_start, double beta_end) {
    if (T < 1) {
        throw ConfigError("make_schedule: T must be >= 1");
    }
    if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0)) {
        throw ConfigError("make_schedule: need 0 < beta_start <= beta_end < 1");
    }
    DiffusionSchedule s;
    s.T = T;
    s.betas.resize(T);
    s.alphas.resize(T);
    s.alpha_bars.resize(T);
    double running = 1.0;
    for (std::size_t t = 0; t < T; ++t) {
        const double frac = T == 1 ? 0.0
                                   : static_cast<double>(t) / static_cast<double>(T - 1);
        s.betas[t] = beta_start + frac * (beta_end - beta_start);
        s.alphas[t] = 1.0 - s.betas[t];
        running *= s.alphas[t];
        s.alpha_bars[t] = running;
    }
    return s;
}

} // namespace dpfd
