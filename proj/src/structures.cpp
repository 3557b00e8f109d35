#include <algorithm>
#include <cmath>
#include <numbers>

#include "gammacalc/structures/structure.hpp"

namespace gammacalc::structures {

// --- Sample ------------------------------------------------------------------

Sample Sample::finite(Eigen::VectorXd coords) {
    Sample s;
    s.finite_ = true;
    s.coords_ = std::move(coords);
    return s;
}

Sample Sample::lazy(std::function<double(std::size_t)> gen) {
    Sample s;
    s.finite_ = false;
    s.gen_ = std::move(gen);
    return s;
}

double Sample::coord(std::size_t i) const {
    if (finite_) {
        if (i >= static_cast<std::size_t>(coords_.size())) throw DimensionMismatch("sample coordinate out of range");
        return coords_[static_cast<Eigen::Index>(i)];
    }
    return gen_(i);
}

Eigen::VectorXd Sample::gather(std::span<const std::size_t> coords) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(coords.size()));
    for (std::size_t k = 0; k < coords.size(); ++k) out[static_cast<Eigen::Index>(k)] = coord(coords[k]);
    return out;
}

std::size_t Sample::dim() const {
    if (!finite_) throw DimensionMismatch("countable sample has no finite dimension");
    return static_cast<std::size_t>(coords_.size());
}

// --- Functional ----------------------------------------------------------------

double Functional::operator()(const Sample& w) const { return map.eval(w.gather(coords))[0]; }

Eigen::VectorXd Functional::gradient_at(const Sample& w) const {
    return map.jacobian(w.gather(coords)).row(0).transpose();
}

Functional constant_functional(double c) {
    Functional f;
    f.coords = {};
    f.map = constant_map(0, Eigen::VectorXd::Constant(1, c));
    return f;
}

Functional coordinate_functional(std::size_t i) {
    Functional f;
    f.coords = {i};
    f.map = identity_map(1);
    return f;
}

Functional make_functional(std::vector<std::size_t> coords, DifferentiableMap map) {
    if (map.d_out != 1) throw DimensionMismatch("functional map must be scalar-valued");
    if (static_cast<int>(coords.size()) != map.d_in)
        throw DimensionMismatch("functional: coordinate list does not match map arity");
    for (std::size_t k = 1; k < coords.size(); ++k)
        if (coords[k] <= coords[k - 1]) throw InputError("functional coordinates must be strictly increasing");
    Functional f;
    f.coords = std::move(coords);
    f.map = std::move(map);
    return f;
}

Functional functional_from_expression(const expr::ExprAst& ast, std::vector<std::size_t> coords) {
    if (coords.empty()) {
        coords.resize(static_cast<std::size_t>(ast.n_inputs()));
        for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = i;
    }
    Functional f = make_functional(std::move(coords), map_from_expression(ast));
    // abs/min/max are Lipschitz primitives: compositions stay in the domain of
    // the complete calculus, with gradients defined off the (null) kink sets
    f.smooth = true;
    return f;
}

Functional linear_combination(std::span<const std::pair<double, Functional>> terms) {
    std::vector<std::size_t> all;
    for (const auto& [c, f] : terms) all.insert(all.end(), f.coords.begin(), f.coords.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    // index of each term's coordinates inside the union
    struct Term {
        double coef;
        Functional f;
        std::vector<Eigen::Index> slots;
    };
    auto terms_copy = std::make_shared<std::vector<Term>>();
    for (const auto& [c, f] : terms) {
        Term t{c, f, {}};
        for (std::size_t ci : f.coords) {
            const auto it = std::lower_bound(all.begin(), all.end(), ci);
            t.slots.push_back(static_cast<Eigen::Index>(it - all.begin()));
        }
        terms_copy->push_back(std::move(t));
    }

    const int d = static_cast<int>(all.size());
    DifferentiableMap m;
    m.d_in = d;
    m.d_out = 1;
    m.eval = [terms_copy](const Eigen::VectorXd& x) {
        double v = 0.0;
        for (const auto& t : *terms_copy) {
            Eigen::VectorXd sub(static_cast<Eigen::Index>(t.slots.size()));
            for (std::size_t k = 0; k < t.slots.size(); ++k) sub[static_cast<Eigen::Index>(k)] = x[t.slots[k]];
            v += t.coef * t.f.map.eval(sub)[0];
        }
        return Eigen::VectorXd::Constant(1, v).eval();
    };
    m.jacobian = [terms_copy, d](const Eigen::VectorXd& x) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(1, d);
        for (const auto& t : *terms_copy) {
            Eigen::VectorXd sub(static_cast<Eigen::Index>(t.slots.size()));
            for (std::size_t k = 0; k < t.slots.size(); ++k) sub[static_cast<Eigen::Index>(k)] = x[t.slots[k]];
            const Eigen::MatrixXd Jf = t.f.map.jacobian(sub);
            for (std::size_t k = 0; k < t.slots.size(); ++k) J(0, t.slots[k]) += t.coef * Jf(0, static_cast<Eigen::Index>(k));
        }
        return J;
    };
    Functional out;
    out.coords = std::move(all);
    out.map = std::move(m);
    for (const auto& [c, f] : terms) out.smooth = out.smooth && f.smooth;
    return out;
}

Functional subtract(const Functional& a, const Functional& b) {
    const std::pair<double, Functional> terms[] = {{1.0, a}, {-1.0, b}};
    return linear_combination(terms);
}

// --- ErrorStructure -------------------------------------------------------------

ErrorStructure::ErrorStructure(StructureSpec spec) : spec_(std::make_shared<const StructureSpec>(std::move(spec))) {}

Sample ErrorStructure::sample(std::uint64_t seed, std::uint64_t index) const { return spec_->sampler(seed, index); }

int ErrorStructure::dimension() const { return spec_->dim; }

const std::string& ErrorStructure::kind() const { return spec_->kind; }

void ErrorStructure::check_functional(const Functional& f) const {
    if (f.infinite_dependence)
        throw UnsupportedFunctional("functional depends on infinitely many coordinates without a declared truncation");
    if (spec_->dim >= 0) {
        for (std::size_t c : f.coords)
            if (c >= static_cast<std::size_t>(spec_->dim))
                throw DimensionMismatch("functional touches coordinate " + std::to_string(c) + " outside the structure");
    }
}

double ErrorStructure::gamma(const Functional& f, const Sample& w) const {
    check_functional(f);
    const Eigen::VectorXd g = f.gradient_at(w);
    return spec_->quad(w, f.coords, g, g);
}

double ErrorStructure::gamma(const Functional& f, const Functional& g, const Sample& w) const {
    check_functional(f);
    check_functional(g);
    std::vector<std::size_t> all;
    all.reserve(f.coords.size() + g.coords.size());
    all.insert(all.end(), f.coords.begin(), f.coords.end());
    all.insert(all.end(), g.coords.begin(), g.coords.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    const auto embed = [&all](const Functional& fn, const Sample& w0) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(all.size()));
        const Eigen::VectorXd gf = fn.gradient_at(w0);
        for (std::size_t k = 0; k < fn.coords.size(); ++k) {
            const auto it = std::lower_bound(all.begin(), all.end(), fn.coords[k]);
            out[static_cast<Eigen::Index>(it - all.begin())] = gf[static_cast<Eigen::Index>(k)];
        }
        return out;
    };
    return spec_->quad(w, all, embed(f, w), embed(g, w));
}

bool ErrorStructure::has_gradient() const { return static_cast<bool>(spec_->dense) || static_cast<bool>(spec_->diag); }

Eigen::VectorXd ErrorStructure::gradient(const Functional& f, const Sample& w) const {
    check_functional(f);
    const Eigen::VectorXd g = f.gradient_at(w);
    if (spec_->diag) {
        Eigen::VectorXd out(g.size());
        for (std::size_t k = 0; k < f.coords.size(); ++k) {
            const double a = spec_->diag(w, f.coords[k]);
            out[static_cast<Eigen::Index>(k)] = std::sqrt(std::max(a, 0.0)) * g[static_cast<Eigen::Index>(k)];
        }
        return out;
    }
    if (!spec_->dense) throw UnsupportedFunctional("structure does not expose a Hilbert gradient");
    const Eigen::MatrixXd a = spec_->dense(w, f.coords);
    return psd_sqrt(a) * g;
}

Eigen::MatrixXd ErrorStructure::field_matrix(const Sample& w, std::span<const std::size_t> coords) const {
    if (spec_->dense) return spec_->dense(w, coords);
    if (spec_->diag) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(coords.size()), static_cast<Eigen::Index>(coords.size()));
        for (std::size_t k = 0; k < coords.size(); ++k) a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = spec_->diag(w, coords[k]);
        return a;
    }
    throw UnsupportedFunctional("structure does not expose a dense field");
}

// --- atomic structures -----------------------------------------------------------

ErrorStructure ou_1d() {
    StructureSpec spec;
    spec.kind = "ou1d";
    spec.dim = 1;
    spec.sampler = [](std::uint64_t seed, std::uint64_t index) {
        auto rng = make_fast_rng(seed, index);
        std::normal_distribution<double> normal;
        return Sample::finite(Eigen::VectorXd::Constant(1, normal(rng)));
    };
    spec.quad = [](const Sample&, std::span<const std::size_t>, const Eigen::VectorXd& gf, const Eigen::VectorXd& gg) {
        return gf.dot(gg);
    };
    spec.diag = [](const Sample&, std::size_t) { return 1.0; };
    return ErrorStructure(std::move(spec));
}

double Box::volume() const {
    double v = 1.0;
    for (const auto& [lo, hi] : sides) v *= (hi - lo);
    return v;
}

ErrorStructure lebesgue_field(Box domain, std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> a) {
    const int d = domain.dim();
    if (d == 0) throw InputError("lebesgue_field: empty domain");
    for (const auto& [lo, hi] : domain.sides)
        if (!(lo < hi)) throw InputError("lebesgue_field: degenerate box side");
    if (std::abs(domain.volume() - 1.0) > 1e-9)
        throw InputError("lebesgue_field: domain volume must be normalized to 1");

    auto field = [a, d](const Eigen::VectorXd& x) {
        Eigen::MatrixXd m = a(x);
        if (m.rows() != d || m.cols() != d) throw DimensionMismatch("lebesgue_field: coefficient field has wrong shape");
        if (max_asymmetry(m) > default_tolerances().symmetry)
            throw NotPositiveSemidefinite("lebesgue_field: coefficients not symmetric at a sampled point");
        if (!is_psd(m)) throw NotPositiveSemidefinite("lebesgue_field: coefficients not PSD at a sampled point");
        return m;
    };

    StructureSpec spec;
    spec.kind = "lebesgue";
    spec.dim = d;
    spec.sampler = [domain, d](std::uint64_t seed, std::uint64_t index) {
        auto rng = make_fast_rng(seed, index);
        std::uniform_real_distribution<double> unif;
        Eigen::VectorXd x(d);
        for (int i = 0; i < d; ++i) {
            const auto& [lo, hi] = domain.sides[static_cast<std::size_t>(i)];
            x[i] = lo + (hi - lo) * unif(rng);
        }
        return Sample::finite(x);
    };
    spec.dense = [field, d](const Sample& w, std::span<const std::size_t> coords) {
        std::vector<std::size_t> full(static_cast<std::size_t>(d));
        for (std::size_t i = 0; i < full.size(); ++i) full[i] = i;
        const Eigen::MatrixXd m = field(w.gather(full));
        Eigen::MatrixXd sub(static_cast<Eigen::Index>(coords.size()), static_cast<Eigen::Index>(coords.size()));
        for (std::size_t r = 0; r < coords.size(); ++r)
            for (std::size_t c = 0; c < coords.size(); ++c)
                sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    m(static_cast<Eigen::Index>(coords[r]), static_cast<Eigen::Index>(coords[c]));
        return sub;
    };
    spec.quad = [dense = spec.dense](const Sample& w, std::span<const std::size_t> coords, const Eigen::VectorXd& gf,
                                     const Eigen::VectorXd& gg) { return gf.dot(dense(w, coords) * gg); };
    return ErrorStructure(std::move(spec));
}

// --- products ---------------------------------------------------------------------

ErrorStructure product_structure(std::vector<ErrorStructure> factors) {
    if (factors.empty()) throw InputError("product_structure: no factors");
    std::vector<int> offsets;
    int total = 0;
    for (const auto& f : factors) {
        if (f.dimension() < 0) throw InputError("product_structure: countable factors go through product_structure_countable");
        offsets.push_back(total);
        total += f.dimension();
    }
    auto shared = std::make_shared<std::vector<ErrorStructure>>(std::move(factors));
    auto offs = std::make_shared<std::vector<int>>(std::move(offsets));

    StructureSpec spec;
    spec.kind = "product";
    spec.dim = total;
    spec.sampler = [shared, offs, total](std::uint64_t seed, std::uint64_t index) {
        Eigen::VectorXd x(total);
        for (std::size_t k = 0; k < shared->size(); ++k) {
            const Sample sub = (*shared)[k].sample(derive_seed(seed, 0x5eed0000ULL + k), index);
            const int d = (*shared)[k].dimension();
            for (int i = 0; i < d; ++i) x[(*offs)[k] + i] = sub.coord(static_cast<std::size_t>(i));
        }
        return Sample::finite(x);
    };
    spec.quad = [shared, offs](const Sample& w, std::span<const std::size_t> coords, const Eigen::VectorXd& gf,
                               const Eigen::VectorXd& gg) {
        double total_quad = 0.0;
        // per factor: gather the touched coordinates belonging to its block
        for (std::size_t k = 0; k < shared->size(); ++k) {
            const int lo = (*offs)[k];
            const int hi = lo + (*shared)[k].dimension();
            std::vector<std::size_t> local;
            Eigen::VectorXd sub_gf(static_cast<Eigen::Index>(coords.size()));
            Eigen::VectorXd sub_gg(static_cast<Eigen::Index>(coords.size()));
            Eigen::Index n = 0;
            for (std::size_t c = 0; c < coords.size(); ++c) {
                const int ci = static_cast<int>(coords[c]);
                if (ci >= lo && ci < hi) {
                    local.push_back(static_cast<std::size_t>(ci - lo));
                    sub_gf[n] = gf[static_cast<Eigen::Index>(c)];
                    sub_gg[n] = gg[static_cast<Eigen::Index>(c)];
                    ++n;
                }
            }
            if (n == 0) continue;
            // the factor's field sees the factor's own point
            const int d = (*shared)[k].dimension();
            Eigen::VectorXd pt(d);
            for (int i = 0; i < d; ++i) pt[i] = w.coord(static_cast<std::size_t>(lo + i));
            const Sample sub = Sample::finite(pt);
            total_quad += sub_gf.head(n).dot((*shared)[k].field_matrix(sub, local) * sub_gg.head(n));
        }
        return total_quad;
    };
    spec.dense = [shared, offs](const Sample& w, std::span<const std::size_t> coords) {
        const Eigen::Index m = static_cast<Eigen::Index>(coords.size());
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
        for (std::size_t k = 0; k < shared->size(); ++k) {
            const int lo = (*offs)[k];
            const int hi = lo + (*shared)[k].dimension();
            std::vector<std::size_t> local;
            std::vector<Eigen::Index> rows;
            for (std::size_t c = 0; c < coords.size(); ++c) {
                const int ci = static_cast<int>(coords[c]);
                if (ci >= lo && ci < hi) {
                    local.push_back(static_cast<std::size_t>(ci - lo));
                    rows.push_back(static_cast<Eigen::Index>(c));
                }
            }
            if (local.empty()) continue;
            const int d = (*shared)[k].dimension();
            Eigen::VectorXd pt(d);
            for (int i = 0; i < d; ++i) pt[i] = w.coord(static_cast<std::size_t>(lo + i));
            const Eigen::MatrixXd block = (*shared)[k].field_matrix(Sample::finite(pt), local);
            for (std::size_t r = 0; r < rows.size(); ++r)
                for (std::size_t c = 0; c < rows.size(); ++c)
                    out(rows[r], rows[c]) = block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
        return out;
    };
    return ErrorStructure(std::move(spec));
}

ErrorStructure product_structure_countable(ErrorStructure factor) {
    if (factor.dimension() != 1) throw InputError("product_structure_countable: factor must be one-dimensional");
    auto f = std::make_shared<ErrorStructure>(std::move(factor));

    StructureSpec spec;
    spec.kind = "product_countable";
    spec.dim = -1;
    spec.sampler = [f](std::uint64_t seed, std::uint64_t index) {
        return Sample::lazy([f, seed, index](std::size_t i) {
            return f->sample(derive_seed(seed, i), index).coord(0);
        });
    };
    spec.diag = [f](const Sample& w, std::size_t i) {
        const Sample sub = Sample::finite(Eigen::VectorXd::Constant(1, w.coord(i)));
        const std::size_t zero = 0;
        return f->field_matrix(sub, {&zero, 1})(0, 0);
    };
    spec.quad = [diag = spec.diag](const Sample& w, std::span<const std::size_t> coords, const Eigen::VectorXd& gf,
                                   const Eigen::VectorXd& gg) {
        double total = 0.0;
        for (std::size_t k = 0; k < coords.size(); ++k)
            total += gf[static_cast<Eigen::Index>(k)] * gg[static_cast<Eigen::Index>(k)] * diag(w, coords[k]);
        return total;
    };
    return ErrorStructure(std::move(spec));
}

// --- image ------------------------------------------------------------------------

ConditionalFieldEstimator::ConditionalFieldEstimator(const ErrorStructure& base, std::vector<Functional> components,
                                                     EstimatorConfig cfg)
    : dim_(static_cast<int>(components.size())), cfg_(cfg) {
    if (components.empty()) throw InputError("image_structure: no components");
    for (const auto& c : components) {
        if (!c.smooth) throw DomainError("image_structure: component lacks a smoothness certificate for the domain");
    }
    const std::size_t n = cfg.n_train;
    points_.resize(static_cast<Eigen::Index>(n), dim_);
    values_.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Sample w = base.sample(cfg.train_seed, j);
        Eigen::MatrixXd v(dim_, dim_);
        for (int a = 0; a < dim_; ++a) {
            points_(static_cast<Eigen::Index>(j), a) = components[static_cast<std::size_t>(a)](w);
            for (int b = a; b < dim_; ++b) {
                const double gab = base.gamma(components[static_cast<std::size_t>(a)], components[static_cast<std::size_t>(b)], w);
                v(a, b) = gab;
                v(b, a) = gab;
            }
        }
        values_.push_back(std::move(v));
    }
    // Silverman's rule per dimension
    bandwidth_.resize(dim_);
    const double nn = static_cast<double>(n);
    const double exponent = 1.0 / (static_cast<double>(dim_) + 4.0);
    for (int a = 0; a < dim_; ++a) {
        const double mean = points_.col(a).mean();
        const double var = (points_.col(a).array() - mean).square().sum() / (nn - 1.0);
        const double sigma = std::sqrt(std::max(var, 1e-300));
        bandwidth_[a] = cfg.bandwidth_scale * sigma * std::pow(4.0 / ((static_cast<double>(dim_) + 2.0) * nn), exponent);
    }
}

ConditionalFieldEstimator::Query ConditionalFieldEstimator::query(const Eigen::VectorXd& x) const {
    if (static_cast<int>(x.size()) != dim_) throw DimensionMismatch("field query has wrong dimension");
    if (cfg_.prefer_binning_1d && dim_ == 1) return query_binned(x[0]);
    const Eigen::Index n = points_.rows();

    Eigen::VectorXd h = bandwidth_;
    for (int attempt = 0; attempt <= cfg_.max_widenings; ++attempt) {
        Eigen::VectorXd logw(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            double q = 0.0;
            for (int a = 0; a < dim_; ++a) {
                const double z = (points_(j, a) - x[a]) / h[a];
                q += z * z;
            }
            logw[j] = -0.5 * q;
        }
        const double m = logw.maxCoeff();
        Eigen::VectorXd w = (logw.array() - m).exp();
        const double sw = w.sum();
        const double sw2 = w.squaredNorm();
        const double n_eff = sw * sw / std::max(sw2, 1e-300);
        if (n_eff >= cfg_.min_effective || attempt == cfg_.max_widenings) {
            if (n_eff < cfg_.min_effective) {
                if (dim_ == 1) return query_binned(x[0]);
                throw NumericalFailure("image field query: conditioning neighborhood stayed empty after bandwidth widening");
            }
            Query out;
            out.n_effective = n_eff;
            Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(dim_, dim_);
            for (Eigen::Index j = 0; j < n; ++j) mean += w[j] * values_[static_cast<std::size_t>(j)];
            mean /= sw;
            Eigen::MatrixXd var = Eigen::MatrixXd::Zero(dim_, dim_);
            for (Eigen::Index j = 0; j < n; ++j)
                var += w[j] * (values_[static_cast<std::size_t>(j)] - mean).array().square().matrix();
            var /= sw;
            out.se = (var / std::max(n_eff, 1.0)).cwiseSqrt();
            // project onto the PSD cone (estimation noise can tip tiny eigenvalues)
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es((mean + mean.transpose()) / 2.0);
            out.field = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() * es.eigenvectors().transpose();
            return out;
        }
        h *= 2.0;
    }
    throw NumericalFailure("image field query failed");
}

ConditionalFieldEstimator::Query ConditionalFieldEstimator::query_binned(double x) const {
    const Eigen::Index n = points_.rows();
    const double lo = points_.col(0).minCoeff();
    const double hi = points_.col(0).maxCoeff();
    const int n_bins = std::max(1, cfg_.n_bins);
    const double width = (hi - lo) / n_bins;
    if (!(width > 0.0)) throw NumericalFailure("image field binning: degenerate training support");
    const auto bin_of = [&](double v) {
        return std::clamp(static_cast<int>((v - lo) / width), 0, n_bins - 1);
    };
    const int target = bin_of(x);
    // walk outward from the target bin until enough samples are collected
    for (int radius = 0; radius <= n_bins; ++radius) {
        double count = 0.0;
        Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(1, 1);
        Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(1, 1);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::abs(bin_of(points_(j, 0)) - target) > radius) continue;
            count += 1.0;
            const Eigen::MatrixXd d = values_[static_cast<std::size_t>(j)] - mean;
            mean += d / count;
            m2 += d.cwiseProduct(values_[static_cast<std::size_t>(j)] - mean);
        }
        if (count >= cfg_.min_effective || (radius == n_bins && count > 0.0)) {
            Query out;
            out.n_effective = count;
            out.field = mean.cwiseMax(0.0);
            out.se = count > 1.0 ? (m2 / (count * (count - 1.0))).cwiseSqrt().eval() : Eigen::MatrixXd::Zero(1, 1).eval();
            return out;
        }
    }
    throw NumericalFailure("image field binning: no samples near the query");
}

ErrorStructure image_structure(const ErrorStructure& base, std::vector<Functional> components, EstimatorConfig cfg) {
    const int d = static_cast<int>(components.size());
    auto estimator = std::make_shared<ConditionalFieldEstimator>(base, components, cfg);
    auto comps = std::make_shared<std::vector<Functional>>(std::move(components));
    auto base_copy = std::make_shared<ErrorStructure>(base);

    StructureSpec spec;
    spec.kind = "image";
    spec.dim = d;
    spec.sampler = [base_copy, comps, d](std::uint64_t seed, std::uint64_t index) {
        const Sample w = base_copy->sample(seed, index);
        Eigen::VectorXd x(d);
        for (int a = 0; a < d; ++a) x[a] = (*comps)[static_cast<std::size_t>(a)](w);
        return Sample::finite(x);
    };
    spec.dense = [estimator, d](const Sample& w, std::span<const std::size_t> coords) {
        std::vector<std::size_t> full(static_cast<std::size_t>(d));
        for (std::size_t i = 0; i < full.size(); ++i) full[i] = i;
        const Eigen::MatrixXd m = estimator->query(w.gather(full)).field;
        Eigen::MatrixXd sub(static_cast<Eigen::Index>(coords.size()), static_cast<Eigen::Index>(coords.size()));
        for (std::size_t r = 0; r < coords.size(); ++r)
            for (std::size_t c = 0; c < coords.size(); ++c)
                sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    m(static_cast<Eigen::Index>(coords[r]), static_cast<Eigen::Index>(coords[c]));
        return sub;
    };
    spec.quad = [dense = spec.dense](const Sample& w, std::span<const std::size_t> coords, const Eigen::VectorXd& gf,
                                     const Eigen::VectorXd& gg) { return gf.dot(dense(w, coords) * gg); };
    return ErrorStructure(std::move(spec));
}

} // namespace gammacalc::structures
