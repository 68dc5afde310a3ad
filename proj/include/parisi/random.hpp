#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace parisi {

// Deterministic uniform/normal stream. Doubles are derived from raw
// mt19937_64 output, so a (seed, index) pair reproduces the same values
// on every platform regardless of the standard library's distributions.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    // Independent child stream; stable under reordering of trials.
    static Rng substream(uint64_t seed, uint64_t index) {
        uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return Rng(z ^ (z >> 31));
    }

    double uniform() { return (gen_() >> 11) * 0x1.0p-53; }  // [0, 1)

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double normal() {
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace parisi
