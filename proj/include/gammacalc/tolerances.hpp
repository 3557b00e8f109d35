#pragma once

namespace gammacalc {

// Numerical tolerances used by validation. All overridable via CLI flags.
struct ToleranceConfig {
    double symmetry = 1e-12;      // max abs asymmetry accepted in variance matrices
    double psd_floor_rel = 1e-10; // eigenvalues >= -psd_floor_rel * max(lambda_max, 1) are clamped to 0
    double generator_identity = 1e-10;
    double transport_roundtrip = 1e-10;
};

inline ToleranceConfig& default_tolerances() {
    static ToleranceConfig cfg;
    return cfg;
}

} // namespace gammacalc
