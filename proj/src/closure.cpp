#include <algorithm>
#include <cmath>
#include <sstream>

#include "gammacalc/structures/closure.hpp"

namespace gammacalc::structures {

namespace {

struct PairStats {
    double l2 = 0.0;
    double gamma_gap = 0.0;
    double gamma_n = 0.0;
};

PairStats estimate_pair(const ErrorStructure& S, const Functional& xn, const Functional& xm, const ClosureConfig& cfg) {
    const Functional diff = subtract(xm, xn);
    Accumulator l2_acc, gap_acc, gn_acc;
    for (int j = 0; j < cfg.n_mc; ++j) {
        const Sample w = S.sample(cfg.seed, static_cast<std::uint64_t>(j));
        const double d = diff(w);
        l2_acc.add(d * d);
        gap_acc.add(std::abs(S.gamma(diff, w)));
        gn_acc.add(S.gamma(xn, w));
    }
    return {std::sqrt(std::max(l2_acc.mean(), 0.0)), gap_acc.mean(), gn_acc.mean()};
}

} // namespace

ClosureResult closure_limit(const ErrorStructure& S, const std::function<Functional(int)>& seq, int n_max, double tol,
                            std::optional<Functional> known_limit, ClosureConfig cfg) {
    if (n_max < 1) throw InputError("closure_limit: n_max must be >= 1");
    const double gamma_tol = cfg.gamma_tol > 0.0 ? cfg.gamma_tol : tol;

    // halving ladder ending at n_max, so the final Cauchy pair is (n_max/2, n_max)
    std::vector<int> rungs;
    for (int n = n_max; n >= std::max(1, cfg.n0) && static_cast<int>(rungs.size()) < cfg.n_rungs; n /= 2) {
        rungs.push_back(n);
        if (n == 1) break;
    }
    std::reverse(rungs.begin(), rungs.end());

    ClosureResult result;
    for (std::size_t k = 0; k < rungs.size(); ++k) {
        const int n = rungs[k];
        const Functional xn = seq(n);
        ClosureRung rung;
        rung.n = n;
        if (known_limit) {
            rung.m = -1;
            const PairStats ps = estimate_pair(S, xn, *known_limit, cfg);
            rung.l2_distance = ps.l2;
            rung.gamma_gap = ps.gamma_gap;
            rung.gamma_n = ps.gamma_n;
        } else if (k + 1 < rungs.size()) {
            const int m = rungs[k + 1];
            rung.m = m;
            const PairStats ps = estimate_pair(S, xn, seq(m), cfg);
            rung.l2_distance = ps.l2;
            rung.gamma_gap = ps.gamma_gap;
            rung.gamma_n = ps.gamma_n;
        } else {
            rung.m = n;
            Accumulator gn_acc;
            for (int j = 0; j < cfg.n_mc; ++j) gn_acc.add(S.gamma(xn, S.sample(cfg.seed, static_cast<std::uint64_t>(j))));
            rung.gamma_n = gn_acc.mean();
        }
        result.ladder.push_back(rung);
    }

    const ClosureRung& last = known_limit ? result.ladder.back() : result.ladder[result.ladder.size() - 2];
    const bool l2_cauchy = last.l2_distance < tol;
    const bool gamma_cauchy = last.gamma_gap < gamma_tol;
    result.gamma_limit = result.ladder.back().gamma_n;

    if (l2_cauchy && gamma_cauchy) {
        result.status = ClosureStatus::LimitFound;
        result.limit_representative = known_limit ? *known_limit : seq(n_max);
        if (known_limit) {
            Accumulator g_acc;
            for (int j = 0; j < cfg.n_mc; ++j)
                g_acc.add(S.gamma(*known_limit, S.sample(cfg.seed, static_cast<std::uint64_t>(j))));
            result.gamma_of_limit = g_acc.mean();
            result.gamma_limit = result.gamma_of_limit;
        } else {
            result.gamma_of_limit = result.gamma_limit;
        }
        result.message = "both Cauchy criteria resolved; limit accepted";
        return result;
    }

    if (l2_cauchy && !gamma_cauchy) {
        // does Gamma[X_n - X] stabilize above a floor? compare the last rungs
        const std::size_t r = result.ladder.size();
        const double g_last = result.ladder[r - 1].gamma_gap;
        const double g_prev = r >= 2 ? result.ladder[r - 2].gamma_gap : g_last;
        const bool stabilized = g_last > 3.0 * gamma_tol && std::abs(g_last - g_prev) < 0.5 * std::max(g_last, g_prev);
        if (stabilized) {
            result.status = ClosureStatus::NonClosable;
            result.limit_representative = known_limit ? *known_limit : seq(n_max);
            if (known_limit) {
                Accumulator g_acc;
                for (int j = 0; j < cfg.n_mc; ++j)
                    g_acc.add(S.gamma(*known_limit, S.sample(cfg.seed, static_cast<std::uint64_t>(j))));
                result.gamma_of_limit = g_acc.mean();
            }
            std::ostringstream msg;
            msg << "L2 limit reached (distance " << last.l2_distance << ") while Gamma[X_n - X] stabilized at " << g_last
                << "; no closed extension can carry this sequence";
            result.message = msg.str();
            return result;
        }
    }

    result.status = ClosureStatus::Inconclusive;
    std::ostringstream msg;
    msg << "criteria not resolved within n_max = " << n_max << " (L2 " << last.l2_distance << ", Gamma gap "
        << last.gamma_gap << ")";
    result.message = msg.str();
    return result;
}

} // namespace gammacalc::structures
