#include "dpfindiff/mathstat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dpfd {

double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

double log_sub(double a, double b) {
    if (b == -std::numeric_limits<double>::infinity()) return a;
    if (a == b) return -std::numeric_limits<double>::infinity();
    return a + std::log1p(-std::exp(b - a));
}

double log_erfc(double x) {
    const double r = std::erfc(x);
    if (r > 0.0) {
        return std::log(r);
    }
    // Laurent tail of erfc(x) ~ exp(-x^2 - .5/x^2 + .625/x^4) / (x sqrt(pi)).
    const double x2 = x * x;
    return -0.5 * std::log(M_PI) - std::log(x) - x2 - 0.5 / x2 +
           0.625 / (x2 * x2) - 37.0 / 24.0 / (x2 * x2 * x2) +
           353.0 / 64.0 / (x2 * x2 * x2 * x2);
}

double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

Moments compute_moments(std::span<const double> values) {
    Moments m;
    m.count = values.size();
    if (m.count == 0) return m;
    double sum = 0.0;
    for (double v : values) sum += v;
    m.mean = sum / static_cast<double>(m.count);
    double m2 = 0.0;
    double m3 = 0.0;
    for (double v : values) {
        const double d = v - m.mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= static_cast<double>(m.count);
    m3 /= static_cast<double>(m.count);
    m.variance = m2;
    m.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    return m;
}

} // namespace dpfd
