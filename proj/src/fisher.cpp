#include <cmath>

#include "gammacalc/fisher/fisher.hpp"

namespace gammacalc::fisher {

FisherModel make_gaussian_location(double sigma) {
    if (!(sigma > 0.0)) throw InputError("gaussian-location: sigma must be positive");
    FisherModel m;
    m.name = "gaussian-location";
    m.sample = [sigma](const Eigen::VectorXd& x, std::mt19937_64& rng) {
        std::normal_distribution<double> normal;
        return Eigen::VectorXd::Constant(1, x[0] + sigma * normal(rng)).eval();
    };
    m.score = [sigma](const Eigen::VectorXd& x, const Eigen::VectorXd& obs) {
        return Eigen::VectorXd::Constant(1, (obs[0] - x[0]) / (sigma * sigma)).eval();
    };
    m.analytic_info = [sigma](const Eigen::VectorXd&) {
        return Eigen::MatrixXd::Constant(1, 1, 1.0 / (sigma * sigma)).eval();
    };
    return m;
}

FisherModel make_bernoulli() {
    FisherModel m;
    m.name = "bernoulli";
    m.sample = [](const Eigen::VectorXd& x, std::mt19937_64& rng) {
        if (!(x[0] > 0.0 && x[0] < 1.0)) throw InputError("bernoulli: p must lie in (0, 1)");
        std::uniform_real_distribution<double> unif;
        return Eigen::VectorXd::Constant(1, unif(rng) < x[0] ? 1.0 : 0.0).eval();
    };
    m.score = [](const Eigen::VectorXd& x, const Eigen::VectorXd& obs) {
        const double p = x[0];
        return Eigen::VectorXd::Constant(1, obs[0] > 0.5 ? 1.0 / p : -1.0 / (1.0 - p)).eval();
    };
    m.analytic_info = [](const Eigen::VectorXd& x) {
        const double p = x[0];
        return Eigen::MatrixXd::Constant(1, 1, 1.0 / (p * (1.0 - p))).eval();
    };
    return m;
}

FisherModel make_exponential() {
    FisherModel m;
    m.name = "exponential";
    m.sample = [](const Eigen::VectorXd& x, std::mt19937_64& rng) {
        if (!(x[0] > 0.0)) throw InputError("exponential: rate must be positive");
        std::exponential_distribution<double> expd(x[0]);
        return Eigen::VectorXd::Constant(1, expd(rng)).eval();
    };
    m.score = [](const Eigen::VectorXd& x, const Eigen::VectorXd& obs) {
        return Eigen::VectorXd::Constant(1, 1.0 / x[0] - obs[0]).eval();
    };
    m.analytic_info = [](const Eigen::VectorXd& x) {
        return Eigen::MatrixXd::Constant(1, 1, 1.0 / (x[0] * x[0])).eval();
    };
    return m;
}

FisherModel make_gaussian_location_2d(double sigma1, double sigma2) {
    FisherModel m;
    m.name = "gaussian-location-2d";
    m.dim = 2;
    m.obs_dim = 2;
    m.sample = [sigma1, sigma2](const Eigen::VectorXd& x, std::mt19937_64& rng) {
        std::normal_distribution<double> normal;
        Eigen::VectorXd obs(2);
        obs[0] = x[0] + sigma1 * normal(rng);
        obs[1] = x[1] + sigma2 * normal(rng);
        return obs;
    };
    m.score = [sigma1, sigma2](const Eigen::VectorXd& x, const Eigen::VectorXd& obs) {
        Eigen::VectorXd s(2);
        s[0] = (obs[0] - x[0]) / (sigma1 * sigma1);
        s[1] = (obs[1] - x[1]) / (sigma2 * sigma2);
        return s;
    };
    m.analytic_info = [sigma1, sigma2](const Eigen::VectorXd&) {
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2, 2);
        j(0, 0) = 1.0 / (sigma1 * sigma1);
        j(1, 1) = 1.0 / (sigma2 * sigma2);
        return j;
    };
    return m;
}

FisherModel make_flat() {
    FisherModel m;
    m.name = "flat";
    m.sample = [](const Eigen::VectorXd&, std::mt19937_64& rng) {
        std::normal_distribution<double> normal;
        return Eigen::VectorXd::Constant(1, normal(rng)).eval();
    };
    m.score = [](const Eigen::VectorXd&, const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1).eval(); };
    m.analytic_info = [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(1, 1).eval(); };
    return m;
}

FisherModel model_by_name(const std::string& name, double sigma) {
    if (name == "gaussian-location") return make_gaussian_location(sigma);
    if (name == "bernoulli") return make_bernoulli();
    if (name == "exponential") return make_exponential();
    if (name == "flat") return make_flat();
    throw InputError("unknown model '" + name + "' (expected gaussian-location, bernoulli, exponential, flat)");
}

FisherModel model_from_score_table(const nlohmann::json& spec) {
    try {
        const auto params = spec.at("params").get<std::vector<double>>();
        const auto obs = spec.at("obs").get<std::vector<double>>();
        const auto logp = spec.at("logp").get<std::vector<std::vector<double>>>();
        if (params.size() < 2 || logp.size() != params.size()) throw InputError("score table: bad shapes");
        for (const auto& row : logp)
            if (row.size() != obs.size()) throw InputError("score table: bad row length");

        auto nearest = [params](double x) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < params.size(); ++i)
                if (std::abs(params[i] - x) < std::abs(params[best] - x)) best = i;
            return best;
        };
        FisherModel m;
        m.name = "table";
        m.sample = [params, obs, logp, nearest](const Eigen::VectorXd& x, std::mt19937_64& rng) {
            const std::size_t pi = nearest(x[0]);
            std::vector<double> probs(obs.size());
            double total = 0.0;
            for (std::size_t j = 0; j < obs.size(); ++j) total += probs[j] = std::exp(logp[pi][j]);
            std::uniform_real_distribution<double> unif(0.0, total);
            double u = unif(rng);
            std::size_t j = 0;
            while (j + 1 < obs.size() && u > probs[j]) u -= probs[j++];
            return Eigen::VectorXd::Constant(1, obs[j]).eval();
        };
        m.score = [params, obs, logp, nearest](const Eigen::VectorXd& x, const Eigen::VectorXd& o) {
            const std::size_t pi = nearest(x[0]);
            const std::size_t lo = pi == 0 ? 0 : pi - 1;
            const std::size_t hi = pi + 1 < params.size() ? pi + 1 : pi;
            std::size_t j = 0;
            for (std::size_t k = 1; k < obs.size(); ++k)
                if (std::abs(obs[k] - o[0]) < std::abs(obs[j] - o[0])) j = k;
            const double d = (logp[hi][j] - logp[lo][j]) / (params[hi] - params[lo]);
            return Eigen::VectorXd::Constant(1, d).eval();
        };
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("score table JSON: ") + e.what());
    }
}

Eigen::MatrixXd fisher_information(const FisherModel& model, const Eigen::VectorXd& x, InfoMethod method, std::size_t n,
                                   std::uint64_t seed) {
    if (method == InfoMethod::Analytic) {
        if (!model.analytic_info) throw UnsupportedFunctional("model '" + model.name + "' has no analytic information");
        return clamp_psd(model.analytic_info(x), default_tolerances(), "fisher information");
    }
    if (n < 100) throw InputError("fisher_information: score MC needs n >= 100");
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(model.dim, model.dim);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(model.dim);
    for (std::size_t j = 0; j < n; ++j) {
        auto rng = make_rng(seed, j);
        Eigen::VectorXd s;
        try {
            s = model.score(x, model.sample(x, rng));
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw NumericalFailure(std::string("score evaluation failed: ") + e.what());
        }
        mean += s;
        second += s * s.transpose();
    }
    mean /= static_cast<double>(n);
    second /= static_cast<double>(n);
    Eigen::MatrixXd cov = (second - mean * mean.transpose()) * (static_cast<double>(n) / (n - 1.0));
    return clamp_psd((cov + cov.transpose()) / 2.0, default_tolerances(), "fisher information (score MC)");
}

std::vector<MeanSe> score_mean_check(const FisherModel& model, const Eigen::VectorXd& x, std::size_t n, std::uint64_t seed) {
    std::vector<Accumulator> acc(static_cast<std::size_t>(model.dim));
    for (std::size_t j = 0; j < n; ++j) {
        auto rng = make_rng(seed, j);
        const Eigen::VectorXd s = model.score(x, model.sample(x, rng));
        for (int i = 0; i < model.dim; ++i) acc[static_cast<std::size_t>(i)].add(s[i]);
    }
    std::vector<MeanSe> out;
    for (const auto& a : acc) out.push_back(a.result());
    return out;
}

PrecisionResult precision_at(const FisherModel& model, const Eigen::VectorXd& x, InfoMethod method, std::size_t n,
                             std::uint64_t seed) {
    const Eigen::MatrixXd j = fisher_information(model, x, method, n, seed);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double cutoff = std::max(ev.maxCoeff(), 0.0) * 1e-12 + 1e-300;
    PrecisionResult out;
    Eigen::VectorXd inv(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] > cutoff) {
            inv[i] = 1.0 / ev[i];
        } else {
            inv[i] = 0.0; // Moore-Penrose on the null space
            out.pseudo_inverse = true;
        }
    }
    out.A = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    return out;
}

PrecisionField precision_field(const FisherModel& model, InfoMethod method, std::size_t n, std::uint64_t seed) {
    PrecisionField field;
    field.at = [model, method, n, seed](const Eigen::VectorXd& x) { return precision_at(model, x, method, n, seed); };
    return field;
}

CramerRaoReport cramer_rao_check(const FisherModel& model, const Eigen::VectorXd& x, const Estimator& T, int n_obs,
                                 const McConfig& mc) {
    const auto run_estimator = [&](const Eigen::VectorXd& param, std::uint64_t seed_shift, Eigen::MatrixXd& out_samples) {
        auto cfg = mc;
        cfg.seed = derive_seed(mc.seed, seed_shift);
        Eigen::VectorXd first;
        std::vector<Eigen::VectorXd> rows;
        rows.reserve(cfg.n_samples);
        for (std::size_t r = 0; r < cfg.n_samples; ++r) {
            auto rng = make_rng(cfg.seed, r);
            Eigen::MatrixXd obs(n_obs, model.obs_dim);
            for (int i = 0; i < n_obs; ++i) obs.row(i) = model.sample(param, rng).transpose();
            Eigen::VectorXd t;
            try {
                t = T(obs);
            } catch (const std::exception& e) {
                throw NumericalFailure(std::string("estimator failed on a sample: ") + e.what());
            }
            rows.push_back(t);
        }
        out_samples.resize(static_cast<Eigen::Index>(rows.size()), rows[0].size());
        for (std::size_t r = 0; r < rows.size(); ++r) out_samples.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    };

    Eigen::MatrixXd samples;
    run_estimator(x, 0, samples);
    const Eigen::Index R = samples.rows();
    const Eigen::Index m = samples.cols();
    const Eigen::RowVectorXd mean = samples.colwise().mean();
    const Eigen::MatrixXd centered = samples.rowwise() - mean;
    CramerRaoReport report;
    report.covariance = centered.transpose() * centered / static_cast<double>(R - 1);

    // dE_x T by central differences, h adapted to the MC noise of the mean
    const double se_scale = std::sqrt(report.covariance.diagonal().maxCoeff() / static_cast<double>(R));
    report.grad_mean.resize(m, model.dim);
    Eigen::VectorXd h_used(model.dim);
    for (int i = 0; i < model.dim; ++i) {
        const double h = std::max(1e-2, 3.0 * se_scale);
        h_used[i] = h;
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        // common random numbers across the +h/-h runs cancel most of the MC noise
        Eigen::MatrixXd sp, sm;
        run_estimator(xp, 1000 + static_cast<std::uint64_t>(i), sp);
        run_estimator(xm, 1000 + static_cast<std::uint64_t>(i), sm);
        report.grad_mean.col(i) = (sp.colwise().mean() - sm.colwise().mean()).transpose() / (2.0 * h);
    }

    const Eigen::MatrixXd j = fisher_information(model, x, model.analytic_info ? InfoMethod::Analytic : InfoMethod::ScoreMc,
                                                 100000, derive_seed(mc.seed, 77));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(static_cast<double>(n_obs) * j);
    Eigen::VectorXd inv(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < inv.size(); ++i)
        inv[i] = es.eigenvalues()[i] > 1e-12 ? 1.0 / es.eigenvalues()[i] : 0.0;
    const Eigen::MatrixXd jinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    report.bound = report.grad_mean * jinv * report.grad_mean.transpose();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gap(report.covariance - report.bound);
    report.min_eigenvalue_gap = gap.eigenvalues().minCoeff();

    // combined standard error: covariance entries scale as |Cov| sqrt(2/(R-1));
    // the finite-difference gradient contributes through the bound linearly
    const double se_cov = report.covariance.norm() * std::sqrt(2.0 / static_cast<double>(R - 1));
    const double grad_se = se_scale * std::sqrt(2.0) / (2.0 * h_used.minCoeff());
    const double se_bound = 2.0 * report.grad_mean.norm() * jinv.norm() * grad_se + 1e-15;
    report.tolerance = 3.0 * (se_cov + se_bound);
    report.pass = report.min_eigenvalue_gap >= -report.tolerance;
    return report;
}

ReparamReport reparametrize_consistency(const FisherModel& model, const DifferentiableMap& psi, const Eigen::VectorXd& x,
                                        std::size_t n_mc, std::uint64_t seed) {
    if (psi.d_in != model.dim || psi.d_out != model.dim)
        throw DimensionMismatch("reparametrize_consistency: psi must be square over the parameter space");
    const Eigen::MatrixXd dpsi = psi.jacobian(x);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(dpsi);
    if (!lu.isInvertible()) throw SingularJacobian("reparametrize_consistency: singular Jacobian of psi at x");

    ReparamReport report;
    const PrecisionResult base = precision_at(model, x, model.analytic_info ? InfoMethod::Analytic : InfoMethod::ScoreMc,
                                              n_mc, derive_seed(seed, 1));
    report.chain = dpsi * base.A * dpsi.transpose();

    // re-derived: score of the psi-parametrized model via the chain rule
    FisherModel reparam = model;
    reparam.name = model.name + "+psi";
    const DifferentiableMap psi_inv = inverse_map(psi);
    reparam.sample = [model, psi_inv](const Eigen::VectorXd& y, std::mt19937_64& rng) {
        return model.sample(psi_inv.eval(y), rng);
    };
    reparam.score = [model, psi_inv](const Eigen::VectorXd& y, const Eigen::VectorXd& obs) {
        const Eigen::VectorXd xx = psi_inv.eval(y);
        return (psi_inv.jacobian(y).transpose() * model.score(xx, obs)).eval();
    };
    reparam.analytic_info = nullptr;
    const Eigen::VectorXd y = psi.eval(x);
    const PrecisionResult rd = precision_at(reparam, y, InfoMethod::ScoreMc, n_mc, derive_seed(seed, 2));
    report.rederived = rd.A;
    report.rederived_se = rd.A.norm() * std::sqrt(2.0 / static_cast<double>(n_mc)) * 3.0;

    // image-structure route: transport the precision field through psi
    const PrecisionField field = precision_field(model, model.analytic_info ? InfoMethod::Analytic : InfoMethod::ScoreMc,
                                                 std::max<std::size_t>(n_mc / 10, 2000), derive_seed(seed, 3));
    const double width = 0.4;
    structures::StructureSpec spec;
    spec.kind = "precision-neighborhood";
    spec.dim = model.dim;
    const Eigen::VectorXd center = x;
    spec.sampler = [center, width](std::uint64_t s, std::uint64_t index) {
        auto rng = make_rng(s, index);
        std::uniform_real_distribution<double> unif(-width / 2.0, width / 2.0);
        Eigen::VectorXd p(center.size());
        for (Eigen::Index i = 0; i < center.size(); ++i) p[i] = center[i] + unif(rng);
        return structures::Sample::finite(p);
    };
    spec.dense = [field, d = model.dim](const structures::Sample& w, std::span<const std::size_t> coords) {
        std::vector<std::size_t> full(static_cast<std::size_t>(d));
        for (std::size_t i = 0; i < full.size(); ++i) full[i] = i;
        const Eigen::MatrixXd a = field.at(w.gather(full)).A;
        Eigen::MatrixXd sub(static_cast<Eigen::Index>(coords.size()), static_cast<Eigen::Index>(coords.size()));
        for (std::size_t r = 0; r < coords.size(); ++r)
            for (std::size_t c = 0; c < coords.size(); ++c)
                sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    a(static_cast<Eigen::Index>(coords[r]), static_cast<Eigen::Index>(coords[c]));
        return sub;
    };
    spec.quad = [dense = spec.dense](const structures::Sample& w, std::span<const std::size_t> coords,
                                     const Eigen::VectorXd& gf, const Eigen::VectorXd& gg) {
        return gf.dot(dense(w, coords) * gg);
    };
    const structures::ErrorStructure neighborhood{std::move(spec)};

    std::vector<structures::Functional> comps;
    for (int k = 0; k < model.dim; ++k) {
        DifferentiableMap mk;
        mk.d_in = model.dim;
        mk.d_out = 1;
        mk.eval = [psi, k](const Eigen::VectorXd& p) { return Eigen::VectorXd::Constant(1, psi.eval(p)[k]).eval(); };
        mk.jacobian = [psi, k](const Eigen::VectorXd& p) { return psi.jacobian(p).row(k).eval(); };
        std::vector<std::size_t> coords(static_cast<std::size_t>(model.dim));
        for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = i;
        comps.push_back(structures::make_functional(std::move(coords), std::move(mk)));
    }
    structures::EstimatorConfig ecfg;
    ecfg.n_train = 4096;
    ecfg.train_seed = derive_seed(seed, 4);
    structures::ConditionalFieldEstimator estimator(neighborhood, comps, ecfg);
    const auto q = estimator.query(y);
    report.image = q.field;
    report.image_se = 3.0 * (q.se.norm() + 1e-12) + 0.02 * report.chain.norm();

    report.max_gap_chain_rederived = (report.chain - report.rederived).cwiseAbs().maxCoeff();
    report.max_gap_chain_image = (report.chain - report.image).cwiseAbs().maxCoeff();
    report.pass = report.max_gap_chain_rederived <= report.rederived_se + 1e-8 &&
                  report.max_gap_chain_image <= report.image_se + 1e-8;
    return report;
}

} // namespace gammacalc::fisher
