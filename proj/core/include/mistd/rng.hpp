#pragma once

#include <cmath>
#include <cstdint>

namespace mistd {

// splitmix64 generator. std::mt19937 + the standard distributions are
// implementation-defined in their float output, which would break the
// bit-exact reproducibility contract, so both the stream and the float
// conversion are pinned here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Derives an independent stream, pure function of (seed, tag).
    static Rng derive(std::uint64_t seed, std::uint64_t tag) {
        Rng r(seed + 0x9e3779b97f4a7c15ULL * (tag + 1));
        r.next();
        return r;
    }

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 24-bit mantissa.
    float uniform() { return static_cast<float>(next() >> 40) * (1.0f / 16777216.0f); }

    float uniform(float lo, float hi) { return lo + (hi - lo) * uniform(); }

    double uniform_d() { return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0); }

    double uniform_d(double lo, double hi) { return lo + (hi - lo) * uniform_d(); }

    // Box-Muller on the pinned uniform stream.
    float normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        float u1 = uniform();
        while (u1 <= 1e-12f) u1 = uniform();
        const float u2 = uniform();
        const float r = std::sqrt(-2.0f * std::log(u1));
        const float a = 6.28318530717958647692f * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t below(std::uint64_t n) { return next() % n; }

private:
    std::uint64_t state_;
    float spare_ = 0.0f;
    bool have_spare_ = false;
};

} // namespace mistd
