#pragma once
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "gammacalc/rng.hpp"

namespace gammacalc {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;      // standard error of the mean
    double variance = 0.0; // sample variance (unbiased)
    std::size_t n = 0;
};

// Streaming mean/variance (Welford).
class Accumulator {
public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    // Merge another accumulator (Chan et al.); used to reduce streams in a
    // fixed order so results do not depend on thread scheduling.
    void merge(const Accumulator& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) { *this = o; return; }
        const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
        const double d = o.mean_ - mean_;
        mean_ += d * nb / (na + nb);
        m2_ += o.m2_ + d * d * na * nb / (na + nb);
        n_ += o.n_;
    }
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double se() const { return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }
    MeanSe result() const { return {mean(), se(), variance(), n_}; }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct McConfig {
    std::uint64_t seed = 0;
    std::size_t n_samples = 10000;
    int n_streams = 8; // fixed stream count; results depend on it, not on threads
    int threads = 0;   // 0 = resolve from GAMMA_CALC_THREADS / hardware
};

int resolve_threads(const McConfig& cfg);

// Runs fn(sample_index, rng) for sample_index in [0, n_samples) and reduces the
// scalar results into a MeanSe. Samples are assigned to streams round-robin and
// each sample gets its own rng seeded from (seed, index), so the reduction is
// deterministic for a fixed (seed, n_streams) pair regardless of thread count.
MeanSe mc_mean(const McConfig& cfg, const std::function<double(std::size_t, std::mt19937_64&)>& fn);

// Same splitting, but the per-sample payload is a vector accumulated by
// summation; returns the per-component mean over all samples.
std::vector<double> mc_mean_vector(const McConfig& cfg, std::size_t dim,
                                   const std::function<void(std::size_t, std::mt19937_64&, std::vector<double>&)>& fn);

} // namespace gammacalc
