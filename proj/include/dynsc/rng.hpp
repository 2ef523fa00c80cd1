#pragma once

#include <cstdint>
#include <span>

namespace dynsc {

// SplitMix64 finalizer; full-period mixing of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based SplitMix64 stream. Streams are split by hashing a key
// tuple, so any (edge id, copy, side) triple gets an independent,
// reproducible generator regardless of thread scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // uniform in [0,1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in {0,...,bound-1}; bound > 0
    std::uint64_t next_below(std::uint64_t bound) {
        // rejection sampling to kill modulo bias
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    bool bernoulli(double p) { return next_double() < p; }

    // child stream keyed by a tuple of ids
    Rng split(std::initializer_list<std::uint64_t> key) const {
        std::uint64_t s = state_;
        for (std::uint64_t k : key) s = mix64(s ^ mix64(k));
        return Rng(s);
    }
    Rng split(std::uint64_t a) const { return split({a}); }
    Rng split(std::uint64_t a, std::uint64_t b) const { return split({a, b}); }
    Rng split(std::uint64_t a, std::uint64_t b, std::uint64_t c) const { return split({a, b, c}); }

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

// index into a prefix-summable weight array: returns i with
// sum(w[0..i)) <= x < sum(w[0..i]); caller guarantees x < total
inline std::size_t pick_by_weight(std::span<const double> w, double x) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        acc += w[i];
        if (x < acc) return i;
    }
    return w.empty() ? 0 : w.size() - 1;
}

} // namespace dynsc
