#include "dpfindiff/accountant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dpfindiff/errors.hpp"
#include "dpfindiff/mathstat.hpp"

namespace dpfd {

namespace rdp {

namespace {

constexpr double kSeriesCutoff = -30.0; // matches the usual RDP implementations
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_integer(double x) { return x == std::floor(x); }

// log |binom(alpha, i)| and its sign for real alpha, integer i.
struct LogBinom {
    double log_abs;
    int sign;
};

LogBinom log_binom(double alpha, std::size_t i) {
    LogBinom b{0.0, 1};
    for (std::size_t k = 1; k <= i; ++k) {
        const double factor = (alpha - static_cast<double>(k) + 1.0) / static_cast<double>(k);
        if (factor == 0.0) {
            return {kNegInf, 1};
        }
        b.log_abs += std::log(std::fabs(factor));
        if (factor < 0.0) b.sign = -b.sign;
    }
    return b;
}

// Integer-order log of the subsampled-Gaussian moment A_alpha.
double log_a_int(double q, double sigma, std::size_t alpha) {
    const double log_q = std::log(q);
    const double log_1q = std::log1p(-q);
    double log_a = kNegInf;
    for (std::size_t i = 0; i <= alpha; ++i) {
        const LogBinom b = log_binom(static_cast<double>(alpha), i);
        const double di = static_cast<double>(i);
        const double term = b.log_abs + di * log_q +
                            (static_cast<double>(alpha) - di) * log_1q +
                            (di * di - di) / (2.0 * sigma * sigma);
        log_a = log_add(log_a, term);
    }
    return log_a;
}

// Fractional-order variant via the split-integral series.
double log_a_frac(double q, double sigma, double alpha) {
    const double log_q = std::log(q);
    const double log_1q = std::log1p(-q);
    const double z0 = sigma * sigma * std::log(1.0 / q - 1.0) + 0.5;
    const double sqrt2_sigma = std::sqrt(2.0) * sigma;
    const double log_half = std::log(0.5);

    double log_a0 = kNegInf;
    double log_a1 = kNegInf;
    for (std::size_t i = 0;; ++i) {
        const LogBinom b = log_binom(alpha, i);
        if (b.log_abs == kNegInf) break;
        const double di = static_cast<double>(i);
        const double j = alpha - di;

        const double log_t0 = b.log_abs + di * log_q + j * log_1q;
        const double log_t1 = b.log_abs + j * log_q + di * log_1q;
        const double log_e0 = log_half + log_erfc((di - z0) / sqrt2_sigma);
        const double log_e1 = log_half + log_erfc((z0 - j) / sqrt2_sigma);
        const double log_s0 = log_t0 + (di * di - di) / (2.0 * sigma * sigma) + log_e0;
        const double log_s1 = log_t1 + (j * j - j) / (2.0 * sigma * sigma) + log_e1;

        if (b.sign > 0) {
            log_a0 = log_add(log_a0, log_s0);
            log_a1 = log_add(log_a1, log_s1);
        } else {
            log_a0 = log_sub(log_a0, log_s0);
            log_a1 = log_sub(log_a1, log_s1);
        }
        if (std::max(log_s0, log_s1) < kSeriesCutoff && di > alpha) break;
        if (i > 10000) break;
    }
    return log_add(log_a0, log_a1);
}

} // namespace

const std::vector<double>& order_grid() {
    static const std::vector<double> grid = [] {
        std::vector<double> g;
        for (double a = 1.25; a <= 64.0 + 1e-9; a += 0.25) g.push_back(a);
        return g;
    }();
    return grid;
}

double step_rdp(double q, double sigma, double alpha) {
    if (!(q > 0.0) || q > 1.0) {
        throw ConfigError("rdp: sampling rate must be in (0, 1]");
    }
    if (!(sigma > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    if (q == 1.0) {
        return alpha / (2.0 * sigma * sigma);
    }
    const double log_a = is_integer(alpha)
                             ? log_a_int(q, sigma, static_cast<std::size_t>(alpha))
                             : log_a_frac(q, sigma, alpha);
    return log_a / (alpha - 1.0);
}

double epsilon_for(double q, double sigma, std::size_t steps, double delta) {
    if (!(delta > 0.0) || delta >= 1.0) {
        throw ConfigError("rdp: delta must be in (0, 1)");
    }
    if (steps == 0) return 0.0;
    if (!(sigma > 0.0)) return std::numeric_limits<double>::infinity();

    double best = std::numeric_limits<double>::infinity();
    for (double alpha : order_grid()) {
        const double total = static_cast<double>(steps) * step_rdp(q, sigma, alpha);
        if (!std::isfinite(total)) continue;
        // Improved RDP->(eps, delta) conversion.
        const double eps = total -
                           (std::log(delta) + std::log(alpha)) / (alpha - 1.0) +
                           std::log((alpha - 1.0) / alpha);
        best = std::min(best, eps);
    }
    return std::max(best, 0.0);
}

double calibrate_sigma(double epsilon_target, double delta, double q,
                       std::size_t steps) {
    if (!(epsilon_target > 0.0)) {
        throw ConfigError("calibrate_sigma: target epsilon must be positive");
    }
    double lo = 0.3;
    double hi = 100.0;
    if (epsilon_for(q, hi, steps, delta) > epsilon_target) {
        throw ConfigError("calibrate_sigma: epsilon " + std::to_string(epsilon_target) +
                          " unreachable with sigma <= 100");
    }
    if (epsilon_for(q, lo, steps, delta) <= epsilon_target) {
        return lo; // target is looser than the lowest noise considered
    }
    while ((hi - lo) / lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        if (epsilon_for(q, mid, steps, delta) > epsilon_target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi; // epsilon(hi) <= target, keeping reported eps under budget
}

} // namespace rdp

PrivacyLedger::PrivacyLedger(double sigma, double sampling_rate, double delta,
                             std::size_t max_steps)
    : sigma_(sigma), sampling_rate_(sampling_rate), delta_(delta),
      max_steps_(max_steps) {
    if (!(sampling_rate > 0.0) || sampling_rate > 1.0) {
        throw ConfigError("ledger: sampling rate must be in (0, 1]");
    }
    if (sigma < 0.0) {
        throw ConfigError("ledger: sigma must be >= 0");
    }
    if (!(delta > 0.0) || delta >= 1.0) {
        throw ConfigError("ledger: delta must be in (0, 1)");
    }
}

void PrivacyLedger::record_step() {
    if (steps_taken_ >= max_steps_) {
        throw BudgetError("privacy budget exhausted after " +
                          std::to_string(steps_taken_) + " steps");
    }
    ++steps_taken_;
}

double PrivacyLedger::epsilon_at(double delta) const {
    if (sigma_ <= 0.0) {
        return steps_taken_ == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return rdp::epsilon_for(sampling_rate_, sigma_, steps_taken_, delta);
}

} // namespace dpfd
