#pragma once

#include <cstdint>

#include "qcw/rational.hpp"

namespace qcw {

// Deterministic 64-bit generator (splitmix64).  Used for probe points,
// property-test sampling and random element draws; the seed is always part
// of the reported metadata so every run is reproducible bit-for-bit.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        return next() % bound;
    }

    // Signed integer in [lo, hi] inclusive.
    long range(long lo, long hi) {
        return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Small nonzero rational with numerator in [-9,9]\{0} and denominator in [1,4].
    Rational small_nonzero_rational() {
        long num = 0;
        while (num == 0) num = range(-9, 9);
        long den = range(1, 4);
        return Rational(num, den);
    }

    // Small rational, zero allowed.
    Rational small_rational() {
        return Rational(range(-9, 9), range(1, 4));
    }

private:
    std::uint64_t state_;
};

// FNV-1a digest used to fingerprint input files in report metadata.
inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace qcw
