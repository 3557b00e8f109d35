#pragma once
#include <cstdint>
#include <functional>
#include <string>

#include <json.hpp>

#include "gammacalc/differentiable_map.hpp"
#include "gammacalc/mc.hpp"
#include "gammacalc/structures/structure.hpp"

namespace gammacalc::fisher {

// Parametric statistical model: sampler of one observation under parameter x,
// the score (gradient of the log-likelihood in x), and optionally the analytic
// information matrix.
struct FisherModel {
    std::string name;
    int dim = 1;     // parameter dimension
    int obs_dim = 1; // observation dimension
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, std::mt19937_64&)> sample;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> score;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> analytic_info; // optional
};

FisherModel make_gaussian_location(double sigma);
FisherModel make_bernoulli();
FisherModel make_exponential();
FisherModel make_gaussian_location_2d(double sigma1, double sigma2);
FisherModel make_flat(); // score identically zero: singular information
// Registry addressed by name: gaussian-location, bernoulli, exponential.
FisherModel model_by_name(const std::string& name, double sigma = 1.0);
// Discrete model from a JSON score table:
// {"kind":"table","params":[...],"obs":[...],"logp":[[log p(obs_j | param_i)]]}.
FisherModel model_from_score_table(const nlohmann::json& spec);

enum class InfoMethod { Analytic, ScoreMc };

// J(x): the analytic matrix, or the empirical covariance of the score over n
// samples. Result is symmetric PSD (clamped at the shared tolerance).
Eigen::MatrixXd fisher_information(const FisherModel& model, const Eigen::VectorXd& x, InfoMethod method,
                                   std::size_t n = 100000, std::uint64_t seed = 7);

// MC mean of the score at the true parameter; zero for regular models.
std::vector<MeanSe> score_mean_check(const FisherModel& model, const Eigen::VectorXd& x, std::size_t n, std::uint64_t seed);

struct PrecisionResult {
    Eigen::MatrixXd A;
    bool pseudo_inverse = false; // J was singular; Moore-Penrose used
};

PrecisionResult precision_at(const FisherModel& model, const Eigen::VectorXd& x, InfoMethod method,
                             std::size_t n = 100000, std::uint64_t seed = 7);

// The field x -> A(x) = J(x)^{-1} feeding the propagation engine.
struct PrecisionField {
    std::function<PrecisionResult(const Eigen::VectorXd&)> at;
};
PrecisionField precision_field(const FisherModel& model, InfoMethod method, std::size_t n = 100000, std::uint64_t seed = 7);

// T maps a block of n_obs observations (rows) to an estimate in R^m.
using Estimator = std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>;

struct CramerRaoReport {
    Eigen::MatrixXd covariance;  // Cov_x(T) over replicas
    Eigen::MatrixXd bound;       // grad E_x T . (n_obs J)^{-1} . grad^T
    Eigen::MatrixXd grad_mean;   // dE_x T / dx by central differences
    double min_eigenvalue_gap = 0.0; // smallest eigenvalue of covariance - bound
    double tolerance = 0.0;          // 3 x combined standard error
    bool pass = false;
};

CramerRaoReport cramer_rao_check(const FisherModel& model, const Eigen::VectorXd& x, const Estimator& T, int n_obs,
                                 const McConfig& mc);

struct ReparamReport {
    Eigen::MatrixXd chain;     // grad psi J^{-1} grad psi^T
    Eigen::MatrixXd rederived; // inverse information of the psi-parametrized model (score MC)
    Eigen::MatrixXd image;     // image-structure estimate of the transported field
    double rederived_se = 0.0;
    double image_se = 0.0;
    bool pass = false;
    double max_gap_chain_rederived = 0.0;
    double max_gap_chain_image = 0.0;
};

// Checks that estimating psi(x) instead of x transports the precision field by
// the image construction: chain rule, re-derived information of the
// reparametrized model, and the image-structure estimate must agree.
ReparamReport reparametrize_consistency(const FisherModel& model, const DifferentiableMap& psi, const Eigen::VectorXd& x,
                                        std::size_t n_mc = 200000, std::uint64_t seed = 7);

} // namespace gammacalc::fisher
