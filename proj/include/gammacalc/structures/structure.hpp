#pragma once
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gammacalc/differentiable_map.hpp"
#include "gammacalc/errored_vector.hpp"
#include "gammacalc/rng.hpp"

namespace gammacalc::structures {

// A point of the sample space. Finite-dimensional points carry their
// coordinates; points of countable products materialize coordinates on first
// touch from a pure seed-indexed generator, so every functional sees the same
// realization for the same master seed.
class Sample {
public:
    static Sample finite(Eigen::VectorXd coords);
    static Sample lazy(std::function<double(std::size_t)> gen);

    double coord(std::size_t i) const;
    Eigen::VectorXd gather(std::span<const std::size_t> coords) const;
    bool is_finite() const { return finite_; }
    std::size_t dim() const; // only for finite samples

private:
    bool finite_ = true;
    Eigen::VectorXd coords_;
    std::function<double(std::size_t)> gen_;
};

// A functional on the sample space through finitely many coordinates, with a
// declared smoothness certificate. Derivatives come from the attached map.
struct Functional {
    std::vector<std::size_t> coords; // touched coordinates, strictly increasing
    DifferentiableMap map;           // R^{coords.size()} -> R
    bool smooth = true;              // declared membership certificate for the domain
    bool infinite_dependence = false;

    double operator()(const Sample& w) const;
    Eigen::VectorXd gradient_at(const Sample& w) const; // partials wrt touched coords
};

Functional constant_functional(double c);
Functional coordinate_functional(std::size_t i);
Functional make_functional(std::vector<std::size_t> coords, DifferentiableMap map);
Functional functional_from_expression(const expr::ExprAst& ast, std::vector<std::size_t> coords = {});
Functional linear_combination(std::span<const std::pair<double, Functional>> terms);
Functional subtract(const Functional& a, const Functional& b);

using SamplerFn = std::function<Sample(std::uint64_t seed, std::uint64_t index)>;
// gf^T a(w)|_coords gg for gradients over the listed coordinates.
using QuadFn = std::function<double(const Sample&, std::span<const std::size_t>, const Eigen::VectorXd&, const Eigen::VectorXd&)>;
using DenseFieldFn = std::function<Eigen::MatrixXd(const Sample&, std::span<const std::size_t>)>;
using DiagFieldFn = std::function<double(const Sample&, std::size_t)>;

struct StructureSpec {
    std::string kind = "custom";
    int dim = 0; // -1 for countable products
    SamplerFn sampler;
    QuadFn quad;
    DenseFieldFn dense;     // optional; required for Hilbert gradients in finite dim
    DiagFieldFn diag;       // optional; per-coordinate field of diagonal countable structures
};

// An error structure: a seeded sampler for the probability space together with
// the quadratic error operator evaluated pathwise. Every structure built here
// has carre du champ of the form grad^T a(w) grad over the touched
// coordinates, which pins Gamma[constant] = 0 exactly.
class ErrorStructure {
public:
    ErrorStructure() = default;
    explicit ErrorStructure(StructureSpec spec);

    Sample sample(std::uint64_t seed, std::uint64_t index) const;
    int dimension() const;         // -1 when countable
    const std::string& kind() const;

    double gamma(const Functional& f, const Sample& w) const;
    double gamma(const Functional& f, const Functional& g, const Sample& w) const;

    bool has_gradient() const;
    // Coefficients of the Hilbert-space gradient: Gamma[f] = |gradient|^2.
    Eigen::VectorXd gradient(const Functional& f, const Sample& w) const;

    Eigen::MatrixXd field_matrix(const Sample& w, std::span<const std::size_t> coords) const;

private:
    void check_functional(const Functional& f) const;
    std::shared_ptr<const StructureSpec> spec_;
};

// --- atomic structures -----------------------------------------------------

// (R, B(R), N(0,1), H^1, gamma[f] = f'^2): the one-dimensional
// Ornstein-Uhlenbeck structure.
ErrorStructure ou_1d();

struct Box {
    std::vector<std::pair<double, double>> sides;
    int dim() const { return static_cast<int>(sides.size()); }
    double volume() const;
};

// Uniform measure on a unit-volume box with Gamma[u,v] = sum du dv a_ij(x).
ErrorStructure lebesgue_field(Box domain, std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> a);

// --- constructions ----------------------------------------------------------

ErrorStructure product_structure(std::vector<ErrorStructure> factors);
// Countable product of iid copies of a one-dimensional factor.
ErrorStructure product_structure_countable(ErrorStructure factor);

struct EstimatorConfig {
    std::size_t n_train = 4096;
    std::uint64_t train_seed = 1234567;
    double min_effective = 50.0; // minimum effective samples behind a query
    int max_widenings = 5;       // bandwidth doublings before giving up
    double bandwidth_scale = 1.0;
    bool prefer_binning_1d = false;
    int n_bins = 64;
};

// Conditional-expectation estimator for the image field
// a_ab(x) = E[ Gamma[X_a, X_b] | X = x ], by Nadaraya-Watson kernel regression
// (Gaussian kernel, Silverman bandwidth) with a binning fallback in dim 1.
class ConditionalFieldEstimator {
public:
    ConditionalFieldEstimator(const ErrorStructure& base, std::vector<Functional> components, EstimatorConfig cfg);

    struct Query {
        Eigen::MatrixXd field; // PSD-projected estimate
        Eigen::MatrixXd se;    // weighted-residual standard error per entry
        double n_effective = 0.0;
    };
    Query query(const Eigen::VectorXd& x) const;
    int dim() const { return dim_; }

private:
    Query query_binned(double x) const; // fallback for dim 1
    int dim_;
    EstimatorConfig cfg_;
    Eigen::MatrixXd points_;               // n_train x dim
    std::vector<Eigen::MatrixXd> values_;  // per-sample Gamma matrix
    Eigen::VectorXd bandwidth_;
};

// Push-forward of a structure through X = (X_1, ..., X_d):
//   sampler     = law of X(omega)
//   Gamma_X[f](x) = grad f(x)^T E[Gamma[X_a,X_b] | X=x] grad f(x)
// Exact pointwise when X is injective with a.e. nonsingular derivative; the
// conditional expectation is estimated per `cfg` otherwise.
ErrorStructure image_structure(const ErrorStructure& base, std::vector<Functional> components, EstimatorConfig cfg = {});

} // namespace gammacalc::structures
