#pragma once

#include <cstddef>
#include <vector>

namespace dpfd {

// Renyi-DP accounting for the Poisson-subsampled Gaussian mechanism,
// composed over steps and converted to (epsilon, delta) by minimizing over
// a fixed order grid. Slightly conservative compared to PRV accounting but
// fully self-contained.
namespace rdp {

// Order grid 1.25, 1.5, ..., 64 in steps of 0.25.
const std::vector<double>& order_grid();

// RDP of one step at Renyi order `alpha` for noise multiplier `sigma` and
// Poisson sampling rate `q`.
double step_rdp(double q, double sigma, double alpha);

// (epsilon, delta) after `steps` compositions, minimized over the grid.
double epsilon_for(double q, double sigma, std::size_t steps, double delta);

// Smallest sigma in [0.3, 100] whose epsilon is within the target;
// round-trips through epsilon_for within 1% relative error.
double calibrate_sigma(double epsilon_target, double delta, double q,
                       std::size_t steps);

} // namespace rdp

// Accumulated privacy loss of a training run. The (sigma, q) pair is frozen
// at construction; epsilon depends only on (sigma, q, steps, delta).
class PrivacyLedger {
public:
    PrivacyLedger() = default;
    PrivacyLedger(double sigma, double sampling_rate, double delta,
                  std::size_t max_steps);

    // Advances by one step; throws BudgetError once max_steps is reached.
    void record_step();

    double epsilon() const { return epsilon_at(delta_); }
    double epsilon_at(double delta) const;

    std::size_t steps_taken() const { return steps_taken_; }
    std::size_t max_steps() const { return max_steps_; }
    bool exhausted() const { return steps_taken_ >= max_steps_; }
    double sigma() const { return sigma_; }
    double sampling_rate() const { return sampling_rate_; }
    double delta() const { return delta_; }

    void restore_steps(std::size_t steps) { steps_taken_ = steps; }

private:
    double sigma_ = 0.0;
    double sampling_rate_ = 0.0;
    double delta_ = 1e-5;
    std::size_t max_steps_ = 0;
    std::size_t steps_taken_ = 0;
};

} // namespace dpfd
