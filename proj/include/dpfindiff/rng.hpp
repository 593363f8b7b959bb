#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace dpfd {

// Deterministic random source. std::mt19937_64 is fully specified by the
// standard, but the std distributions are not, so uniform and Gaussian draws
// are generated here explicitly to keep streams bit-identical across
// platforms and library versions.
class Rng {
public:
    Rng() : Rng(0) {}
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t next_index(std::uint64_t n) {
        // Rejection sampling over the largest multiple of n below 2^64.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Standard normal via Box-Muller. The pair partner is cached, so the
    // cache is part of the serialized state.
    double next_gaussian() {
        if (has_cache_) {
            has_cache_ = false;
            return cache_;
        }
        double u1 = next_double();
        while (u1 <= 0.0) {
            u1 = next_double();
        }
        const double u2 = next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        cache_ = radius * std::sin(angle);
        has_cache_ = true;
        return radius * std::cos(angle);
    }

    // Derive an independent child stream. Consumes one draw from this stream.
    Rng spawn() {
        Rng child;
        child.engine_.seed(engine_());
        return child;
    }

    std::string serialize() const {
        std::ostringstream os;
        os << engine_ << ' ' << (has_cache_ ? 1 : 0) << ' ';
        os.precision(17);
        os << cache_;
        return os.str();
    }

    void deserialize(const std::string& text) {
        std::istringstream is(text);
        int cached = 0;
        is >> engine_ >> cached >> cache_;
        has_cache_ = cached != 0;
    }

    bool operator==(const Rng& other) const {
        return engine_ == other.engine_ && has_cache_ == other.has_cache_ &&
               (!has_cache_ || cache_ == other.cache_);
    }

private:
    std::mt19937_64 engine_;
    bool has_cache_ = false;
    double cache_ = 0.0;
};

} // namespace dpfd
