#pragma once
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gammacalc/differentiable_map.hpp"
#include "gammacalc/mc.hpp"
#include "gammacalc/structures/closure.hpp"
#include "gammacalc/structures/structure.hpp"
#include "gammacalc/wiener/wiener.hpp"

namespace gammacalc::trials {

// --- Example A: correlated errors on [0,1]-valued trials -----------------------

struct AllOnesCorrelation {};
struct ConstantMatrixCorrelation {
    Eigen::MatrixXd a; // PSD, sized to the largest section used
};
struct StationaryKernelCorrelation {
    std::function<double(int)> a; // a(|i-j|), Bochner-positive spectrum
};
using CorrelationSpec = std::variant<AllOnesCorrelation, ConstantMatrixCorrelation, StationaryKernelCorrelation>;

struct TrialSystemA {
    DifferentiableMap psi; // C1, vanishing at 0 and 1
    CorrelationSpec correlation;
};

// Verifies the finite section: eigenvalue check for constant matrices,
// FFT spectrum nonnegativity for stationary kernels. Throws on failure.
void validate_correlation(const CorrelationSpec& corr, int N);

// Gamma[(1/N) sum psi(U_n)] on one realization:
//   (1/N^2) sum_{m,n} psi'(U_m) psi'(U_n) a(m-n), exact on the sample.
// `shift` translates the trial indices (auto-isomorphism checks).
double example_a_mean_gamma(const TrialSystemA& sys, int N, std::uint64_t seed, std::uint64_t index,
                            std::uint64_t shift = 0);

// --- Example B: scalar trials with (f, g) errors -------------------------------

struct Distribution1D {
    std::string name;
    std::function<double(SplitMix64&)> sample;
    std::function<double(double)> pdf;
};
Distribution1D standard_normal_dist();
Distribution1D uniform01_dist();

struct TrialSystemB {
    Distribution1D rho;
    std::function<double(double)> f; // correlated multiplier, f in L2(rho)
    std::function<double(double)> g; // uncorrelated weight, g >= 0 in L1(rho)
};

// Gamma[(1/N) sum h(X_n)] on one realization:
//   ((1/N) sum h'(X_i) f(X_i))^2 + (1/N^2) sum h'(X_i)^2 g(X_i).
double example_b_mean_gamma(const TrialSystemB& sys, const DifferentiableMap& h, int N, std::uint64_t seed,
                            std::uint64_t index, std::uint64_t shift = 0);

// int h' f drho and the limit (int h' f drho)^2, estimated by MC.
MeanSe limit_b_integral(const TrialSystemB& sys, const DifferentiableMap& h, std::size_t n, std::uint64_t seed);

// The pre-structure of Example B as a countable-product-shaped error structure
// with the correlated field  C_ij = f(x_i) f(x_j) + delta_ij g(x_i).
structures::ErrorStructure b_structure(const TrialSystemB& sys);
// (1/N) sum_{n < N} h(X_n) as a functional on b_structure.
structures::Functional b_mean_functional(const DifferentiableMap& h, int N);

struct WitnessResult {
    bool possible = true;
    int N = 0;
    int M = 0;
    double l2_distance = 0.0;   // estimated |u_M - u_N|_{L2} via the iid scaling law
    double gamma_at_N = 0.0;    // Gamma[u_N] on a fresh realization
    double limit = 0.0;         // (int h' f drho)^2
    std::string message;
    structures::ClosureResult closure; // the packaged closure_limit diagnosis
};

// Non-closability witness: M, N <= n_max with |u_M - u_N|_{L2} < tol while
// Gamma[u_N] >= 0.9 * (int h' f drho)^2. Reports impossibility when the limit
// vanishes within MC resolution (f = 0 case).
WitnessResult nonclosability_witness(const TrialSystemB& sys, const DifferentiableMap& h, double tol, long long n_max,
                                     std::uint64_t seed = 20240601);

// --- Example C: repeated string throws with operator-correlated errors ----------

// K acts by multiplication: a(phi) on the Wiener factor, f_ang(phi) = b sqrt(g)
// on the angle factor; g_ang weights the uncorrelated angle term.
struct TrialSystemC {
    std::function<double(double)> a_weight;
    std::function<double(double)> f_ang;
    std::function<double(double)> g_ang;
    double L = 1.0;
    int n_steps = 256;
    int n_basis = 256;
};

enum class VariantC { Indicator, PhiWeighted };
// The paper's two explicit specs. The indicator variant uses the window
// [0, pi/2]; see limit_c for how the window is pinned against the MC oracle.
TrialSystemC make_variant_c(VariantC variant, double L = 1.0, int n_steps = 256);

struct CEstimate {
    MeanSe gamma_raw;       // E Gamma_N[(1/N) sum A_n] over replicas, exact per realization
    MeanSe gamma_limit;     // unbiased per-replica estimate of the N -> infinity limit
    MeanSe uncorrelated;    // the (1/N^2) sum |DA_n|^2 term alone
    int N = 0;
};

CEstimate example_c_mean_gamma(const TrialSystemC& sys, int N, const McConfig& mc, std::uint64_t shift = 0);

// MC estimate of |E[K DA]|^2 + (E[f_ang dphi A])^2 over n_trials draws,
// debiased; the independent oracle for limit_c_quadrature.
MeanSe limit_c_mc(const TrialSystemC& sys, std::size_t n_trials, std::uint64_t seed, int batch = 200);

struct LimitCResult {
    double value = 0.0;           // selected reading
    double atom = 0.0;            // the delta_0 contribution = inner(0)^2
    double reading_difference_inside = 0.0;
    double reading_cos_minus_mean = 0.0; // alternative grouping of the garbled display
    std::string selected;         // which reading `value` came from
    double inner_at_0 = 0.0;
    double phi_gradient_term = 0.0; // independently coded angle term; equals inner(0)
};

// Numerical quadrature of the asymptotic displays, including the delta_0 atom
// (the angle-direction contribution, added once at t = 0). For the indicator
// variant both grouping readings of the inner integrand are computed; `value`
// carries the one confirmed by the MC oracle and `selected` records the pick.
LimitCResult limit_c_quadrature(VariantC variant, double L, std::optional<double> mc_value = std::nullopt);

// inner(t) of the asymptotic display, series form (used by the quadrature and
// exposed for the display-form cross-check).
double limit_c_inner(VariantC variant, double t, double L);

} // namespace gammacalc::trials
