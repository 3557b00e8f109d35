#include "gammacalc/mc.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace gammacalc {

int resolve_threads(const McConfig& cfg) {
    int t = cfg.threads;
    if (t <= 0) {
        if (const char* env = std::getenv("GAMMA_CALC_THREADS")) {
            t = std::atoi(env);
        }
    }
    if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
    if (t <= 0) t = 1;
    return std::min<int>(t, std::max(1, cfg.n_streams));
}

namespace {

// Runs the per-stream jobs on up to `threads` workers. Stream s owns samples
// {s, s+n_streams, s+2*n_streams, ...}; each sample is independently seeded.
template <typename StreamJob>
void run_streams(int n_streams, int threads, StreamJob&& job) {
    if (threads <= 1) {
        for (int s = 0; s < n_streams; ++s) job(s);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (int s = w; s < n_streams; s += threads) job(s);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

MeanSe mc_mean(const McConfig& cfg, const std::function<double(std::size_t, std::mt19937_64&)>& fn) {
    const int n_streams = std::max(1, cfg.n_streams);
    const int threads = resolve_threads(cfg);
    std::vector<Accumulator> acc(static_cast<std::size_t>(n_streams));
    run_streams(n_streams, threads, [&](int s) {
        for (std::size_t i = static_cast<std::size_t>(s); i < cfg.n_samples; i += static_cast<std::size_t>(n_streams)) {
            auto rng = make_rng(cfg.seed, i);
            acc[static_cast<std::size_t>(s)].add(fn(i, rng));
        }
    });
    Accumulator total;
    for (const auto& a : acc) total.merge(a);
    return total.result();
}

std::vector<double> mc_mean_vector(const McConfig& cfg, std::size_t dim,
                                   const std::function<void(std::size_t, std::mt19937_64&, std::vector<double>&)>& fn) {
    const int n_streams = std::max(1, cfg.n_streams);
    const int threads = resolve_threads(cfg);
    std::vector<std::vector<double>> partial(static_cast<std::size_t>(n_streams), std::vector<double>(dim, 0.0));
    std::vector<double> scratch_template(dim, 0.0);
    run_streams(n_streams, threads, [&](int s) {
        std::vector<double> scratch(dim, 0.0);
        auto& sum = partial[static_cast<std::size_t>(s)];
        for (std::size_t i = static_cast<std::size_t>(s); i < cfg.n_samples; i += static_cast<std::size_t>(n_streams)) {
            auto rng = make_rng(cfg.seed, i);
            std::fill(scratch.begin(), scratch.end(), 0.0);
            fn(i, rng, scratch);
            for (std::size_t k = 0; k < dim; ++k) sum[k] += scratch[k];
        }
    });
    std::vector<double> out(dim, 0.0);
    for (const auto& p : partial)
        for (std::size_t k = 0; k < dim; ++k) out[k] += p[k];
    if (cfg.n_samples > 0)
        for (auto& v : out) v /= static_cast<double>(cfg.n_samples);
    return out;
}

} // namespace gammacalc
