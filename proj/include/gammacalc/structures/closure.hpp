#pragma once
#include <optional>

#include "gammacalc/mc.hpp"
#include "gammacalc/structures/structure.hpp"

namespace gammacalc::structures {

// One rung of the closure ladder: distances between consecutive elements (or
// between an element and the known limit) estimated over the MC sample.
struct ClosureRung {
    int n = 0;
    int m = 0;              // partner index (next rung, or -1 against the known limit)
    double l2_distance = 0; // estimated  |X_m - X_n|_{L^2}
    double gamma_gap = 0;   // estimated  E |Gamma[X_m - X_n]|
    double gamma_n = 0;     // estimated  E Gamma[X_n]
};

enum class ClosureStatus { LimitFound, NonClosable, Inconclusive };

// Result of driving the extension principle numerically: if X_n is L2-Cauchy
// and Gamma[X_m - X_n] -> 0 in L1, a closed structure forces Gamma[X_n - X] -> 0.
// A sequence whose Gamma stabilizes above a floor while X_n -> X in L2 is a
// witness that no closed extension exists.
struct ClosureResult {
    ClosureStatus status = ClosureStatus::Inconclusive;
    Functional limit_representative; // last element, or the known limit when given
    double gamma_limit = 0.0;        // lim estimate of E Gamma[X_n]
    double gamma_of_limit = 0.0;     // direct E Gamma[X] when the limit is known
    std::vector<ClosureRung> ladder;
    std::string message;

    bool non_closable() const { return status == ClosureStatus::NonClosable; }
};

using NonClosableWitness = ClosureResult;

struct ClosureConfig {
    int n_mc = 2000;          // samples per rung
    std::uint64_t seed = 99;
    int n_rungs = 6;          // geometric ladder n0, 2 n0, ... capped at n_max
    int n0 = 1;
    double gamma_tol = -1.0;  // defaults to tol when negative
};

// Drives the sequence seq(1..n_max) through the two Cauchy criteria at
// tolerance `tol`. With a known limit the criteria are tested against it,
// which is what detects the non-closable case; without one they are tested on
// consecutive ladder pairs.
ClosureResult closure_limit(const ErrorStructure& S, const std::function<Functional(int)>& seq, int n_max, double tol,
                            std::optional<Functional> known_limit = std::nullopt, ClosureConfig cfg = {});

} // namespace gammacalc::structures
