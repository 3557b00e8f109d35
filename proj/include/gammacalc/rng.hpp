#pragma once
#include <cstdint>
#include <random>

namespace gammacalc {

// splitmix64 step (Steele, Lea, Flood 2014). Used to derive independent
// per-stream / per-sample seeds from one master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic seed for stream `index` of a run with master seed `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL + index * 0xbf58476d1ce4e5b9ULL);
    splitmix64(s);
    return splitmix64(s);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(seed, a), b);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(derive_seed(seed, index));
}

// Light URBG over the splitmix64 stream. Construction is free, which matters
// for the per-coordinate / per-trial seeding used throughout the samplers;
// mt19937_64 stays in use for long per-stream draws.
class SplitMix64 {
public:
    using result_type = std::uint64_t;
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }
    result_type operator()() { return splitmix64(state_); }

private:
    std::uint64_t state_;
};

inline SplitMix64 make_fast_rng(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(derive_seed(seed, index));
}

} // namespace gammacalc
