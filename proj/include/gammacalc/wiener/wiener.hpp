#pragma once
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gammacalc/errors.hpp"
#include "gammacalc/mc.hpp"
#include "gammacalc/rng.hpp"

namespace gammacalc::wiener {

// A realization of the coordinate variables together with the Brownian path
// values B(t_i) = sum_n X_n * int_0^{t_i} chi_n they synthesize.
struct BrownianPath {
    Eigen::VectorXd coords; // X_n, iid N(0,1)
    Eigen::VectorXd values; // B at the n_steps+1 grid nodes, B(0) = 0
};

// Dyadic grid on [0,1] carrying the Haar orthonormal family. Functions are
// represented two ways: cell values (piecewise constant, exact Haar inner
// products) and node values (for H^1 work); both use the L2 inner product.
class WienerDiscretization {
public:
    WienerDiscretization(int n_steps, int n_basis, std::uint64_t master_seed);

    int n_steps() const { return n_steps_; }
    int n_basis() const { return n_basis_; }
    std::uint64_t seed() const { return seed_; }
    double dt() const { return 1.0 / n_steps_; }
    double node(int i) const { return static_cast<double>(i) / n_steps_; }

    double haar_on_cell(int n, int cell) const;         // chi_n on cell [i/N, (i+1)/N)
    double cumulative_integral(int n, double t) const;  // int_0^t chi_n, exact

    // <f, chi_n> for all n < n_basis, f given by cell values.
    Eigen::VectorXd haar_coefficients(std::span<const double> f_cells) const;
    double cell_inner(std::span<const double> a, std::span<const double> b) const;
    Eigen::MatrixXd gram() const; // Gram matrix of the truncated family (test helper)

    BrownianPath sample_path(std::uint64_t index) const;
    BrownianPath sample_path(std::uint64_t seed, std::uint64_t index) const;
    BrownianPath path_from_coords(Eigen::VectorXd coords) const;

    // node values of f evaluated on the grid
    Eigen::VectorXd nodes_of(const std::function<double(double)>& f) const;
    Eigen::VectorXd cells_of(const std::function<double(double)>& f) const; // midpoint values

private:
    int n_steps_;
    int n_basis_;
    int levels_; // n_basis = 2^levels
    std::uint64_t seed_;
};

// sum_n <f, chi_n> X_n, the discrete Wiener integral of f (cell values).
double wiener_integral(const WienerDiscretization& disc, std::span<const double> f_cells, const BrownianPath& path);

// --- functionals of (phi, path) ----------------------------------------------

enum class GradientKind { Analytic, FiniteDifference };

// Gradient in H = L2([0,1]) represented by node values, plus the angle
// derivative. For functionals that do not depend on phi the latter is 0.
struct PathGradient {
    Eigen::VectorXd d_nodes; // t -> D_t F on the grid nodes
    double d_phi = 0.0;
};

// Scalar map handed to composite functionals; kept light so this header does
// not pull in the full differentiable-map machinery.
struct ScalarMap {
    std::function<double(const Eigen::VectorXd&)> eval;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

class PathFunctional {
public:
    // Wiener integral of f (cell values): Gamma_OU = |f|^2 exactly.
    static PathFunctional integral(const WienerDiscretization& disc, std::span<const double> f_cells);
    // Phi(int f_1 dB, ..., int f_d dB) for a C1 scalar Phi.
    static PathFunctional composite(const WienerDiscretization& disc, ScalarMap phi,
                                    std::vector<std::vector<double>> f_cells);
    // The string functional A(phi, omega) = int_0^L |cos(phi + B_s)| ds.
    static PathFunctional string(double L);
    // Arbitrary evaluation with finite-difference gradient over basis directions.
    static PathFunctional custom(std::function<double(double, const BrownianPath&)> eval);

    double operator()(double phi, const BrownianPath& path) const;
    GradientKind gradient_kind() const { return kind_; }
    PathGradient gradient(const WienerDiscretization& disc, double phi, const BrownianPath& path) const;

    struct Impl;
    std::shared_ptr<const Impl> impl;

private:
    GradientKind kind_ = GradientKind::FiniteDifference;
};

// Gamma_OU[F] = |DF|_H^2 on the realization; for integrals this is |f|^2,
// path-independent and exact at the grid resolution.
double gamma_ou(const WienerDiscretization& disc, const PathFunctional& F, const BrownianPath& path, double phi = 0.0);

// --- the string functional -----------------------------------------------------

double string_A(const WienerDiscretization& disc, double phi, const BrownianPath& path, double L);
// D_u A = -int_{u}^{L} sign[cos(phi+B_s)] sin(phi+B_s) ds on the nodes, and
// d_phi A = D_0 A (the same integral from 0). sign(0) := 0.
PathGradient grad_string_A(const WienerDiscretization& disc, double phi, const BrownianPath& path, double L);

// --- Gamma_1 (the H^1 structure of the second-quantized remark) ---------------

// Gamma_1[int f dB] = int f'^2 for f in H^1, f given by node values.
double gamma_one_integral(const WienerDiscretization& disc, std::span<const double> f_nodes);
double gamma_one_pair(const WienerDiscretization& disc, std::span<const double> f_nodes, std::span<const double> g_nodes);
// V_s = int_0^1 (u ^ s) dB_u computed from the path as int_0^s (B_1 - B_r) dr.
Eigen::VectorXd v_process(const WienerDiscretization& disc, const BrownianPath& path);
// Gamma_1[A] for the C2 string: double quadrature of
// sign[cos(phi+V_s)] sin(phi+V_s) sign[cos(phi+V_t)] sin(phi+V_t) (s ^ t).
double gamma_one_string(const WienerDiscretization& disc, double phi, const BrownianPath& path, double L);

// --- second quantization ---------------------------------------------------------

// Neumann cosine eigenbasis on [0,1]: e_0 = 1, e_k = sqrt(2) cos(k pi x) with
// heat eigenvalues exp(-k^2 pi^2 t).
class CosineBasis {
public:
    CosineBasis(int n_steps, int n_basis);
    int n_steps() const { return n_steps_; }
    int n_basis() const { return n_basis_; }
    Eigen::VectorXd sample_coords(std::uint64_t seed, std::uint64_t index) const;
    // B(t_i) = sum_k X_k int_0^{t_i} e_k
    Eigen::VectorXd synthesize(const Eigen::VectorXd& coords) const;
    double eigenvalue(int k, double t) const;

private:
    int n_steps_;
    int n_basis_;
    Eigen::MatrixXd cumint_; // (n_steps+1) x n_basis
};

// (P_t F)(omega) = E~[ F(p_t omega + sqrt(I - p_{2t}) omega~) ], Monte Carlo
// over independent copies; F takes the path node values.
MeanSe second_quantized_semigroup(const CosineBasis& basis, const std::function<double(const Eigen::VectorXd&)>& F,
                                  const Eigen::VectorXd& coords, double t, const McConfig& mc);

} // namespace gammacalc::wiener
