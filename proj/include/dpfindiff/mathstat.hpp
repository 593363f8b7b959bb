#pragma once

#include <cstddef>
#include <span>

namespace dpfd {

// log(exp(a) + exp(b)), stable for very negative inputs.
double log_add(double a, double b);

// log(exp(a) - exp(b)); requires a >= b.
double log_sub(double a, double b);

// log(erfc(x)) with an asymptotic tail expansion once erfc underflows.
double log_erfc(double x);

// Standard normal CDF.
double norm_cdf(double x);

// Sample moments computed with the population (1/n) convention.
struct Moments {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0; // standardized third moment; 0 when variance is 0
};

Moments compute_moments(std::span<const double> values);

} // namespace dpfd
