#include <cmath>

#include "gammacalc/wiener/wiener.hpp"

namespace gammacalc::wiener {

namespace {

double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// trapezoid weights on the node grid restricted to [0, L]; L is snapped to the
// last full node with a partial cell appended when needed
double trapezoid_to(const WienerDiscretization& disc, const std::function<double(int)>& f_node, double L) {
    if (L < 0.0 || L > 1.0) throw InputError("string length L must lie in (0, 1]");
    const double h = disc.dt();
    const int full = static_cast<int>(std::floor(L / h + 1e-12));
    double acc = 0.0;
    for (int i = 0; i < full; ++i) acc += 0.5 * h * (f_node(i) + f_node(i + 1));
    const double rest = L - full * h;
    if (rest > 1e-12 && full < disc.n_steps()) {
        const double frac = rest / h;
        const double f_right = (1.0 - frac) * f_node(full) + frac * f_node(full + 1);
        acc += 0.5 * rest * (f_node(full) + f_right);
    }
    return acc;
}

} // namespace

struct PathFunctional::Impl {
    enum class Kind { Integral, Composite, String, Custom } tag = Kind::Custom;
    std::function<double(double, const BrownianPath&)> eval;

    // Integral: Haar coefficients and cell values of f
    Eigen::VectorXd coeffs;
    std::vector<double> f_cells;
    double norm_sq = 0.0;

    // Composite
    ScalarMap phi_map;
    std::vector<Eigen::VectorXd> comp_coeffs;
    std::vector<std::vector<double>> comp_cells;
    Eigen::MatrixXd comp_gram; // <f_a, f_b>

    // String
    double L = 1.0;
};

namespace {

// node view of a piecewise-constant cell function (cell averages at interior nodes)
Eigen::VectorXd cells_to_nodes(std::span<const double> cells) {
    const int n = static_cast<int>(cells.size());
    Eigen::VectorXd out(n + 1);
    out[0] = cells[0];
    for (int i = 1; i < n; ++i) out[i] = 0.5 * (cells[static_cast<std::size_t>(i - 1)] + cells[static_cast<std::size_t>(i)]);
    out[n] = cells[static_cast<std::size_t>(n - 1)];
    return out;
}

} // namespace

PathFunctional PathFunctional::integral(const WienerDiscretization& disc, std::span<const double> f_cells) {
    auto impl = std::make_shared<Impl>();
    impl->tag = Impl::Kind::Integral;
    impl->coeffs = disc.haar_coefficients(f_cells);
    impl->f_cells.assign(f_cells.begin(), f_cells.end());
    impl->norm_sq = impl->coeffs.squaredNorm(); // Parseval on the truncated family
    impl->eval = [coeffs = impl->coeffs](double, const BrownianPath& path) { return coeffs.dot(path.coords); };
    PathFunctional f;
    f.impl = impl;
    f.kind_ = GradientKind::Analytic;
    return f;
}

PathFunctional PathFunctional::composite(const WienerDiscretization& disc, ScalarMap phi,
                                         std::vector<std::vector<double>> f_cells) {
    auto impl = std::make_shared<Impl>();
    impl->tag = Impl::Kind::Composite;
    impl->phi_map = std::move(phi);
    const int d = static_cast<int>(f_cells.size());
    impl->comp_gram.resize(d, d);
    for (int a = 0; a < d; ++a) impl->comp_coeffs.push_back(disc.haar_coefficients(f_cells[static_cast<std::size_t>(a)]));
    impl->comp_cells = std::move(f_cells);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) impl->comp_gram(a, b) = impl->comp_coeffs[static_cast<std::size_t>(a)].dot(impl->comp_coeffs[static_cast<std::size_t>(b)]);
    impl->eval = [coeffs = impl->comp_coeffs, map = impl->phi_map](double, const BrownianPath& path) {
        Eigen::VectorXd args(static_cast<Eigen::Index>(coeffs.size()));
        for (std::size_t a = 0; a < coeffs.size(); ++a) args[static_cast<Eigen::Index>(a)] = coeffs[a].dot(path.coords);
        return map.eval(args);
    };
    PathFunctional f;
    f.impl = impl;
    f.kind_ = GradientKind::Analytic;
    return f;
}

PathFunctional PathFunctional::string(double L) {
    auto impl = std::make_shared<Impl>();
    impl->tag = Impl::Kind::String;
    impl->L = L;
    PathFunctional f;
    f.impl = impl;
    f.kind_ = GradientKind::Analytic;
    return f;
}

PathFunctional PathFunctional::custom(std::function<double(double, const BrownianPath&)> eval) {
    auto impl = std::make_shared<Impl>();
    impl->tag = Impl::Kind::Custom;
    impl->eval = std::move(eval);
    PathFunctional f;
    f.impl = impl;
    f.kind_ = GradientKind::FiniteDifference;
    return f;
}

double PathFunctional::operator()(double phi, const BrownianPath& path) const {
    if (impl->tag == Impl::Kind::String) {
        // needs the discretization only through the path's grid; reconstruct dt
        const int n_steps = static_cast<int>(path.values.size()) - 1;
        const double h = 1.0 / n_steps;
        const double L = impl->L;
        const int full = static_cast<int>(std::floor(L / h + 1e-12));
        double acc = 0.0;
        const auto f = [&](int i) { return std::abs(std::cos(phi + path.values[i])); };
        for (int i = 0; i < full; ++i) acc += 0.5 * h * (f(i) + f(i + 1));
        const double rest = L - full * h;
        if (rest > 1e-12 && full < n_steps) {
            const double frac = rest / h;
            const double b_right = (1.0 - frac) * path.values[full] + frac * path.values[full + 1];
            acc += 0.5 * rest * (f(full) + std::abs(std::cos(phi + b_right)));
        }
        return acc;
    }
    return impl->eval(phi, path);
}

PathGradient PathFunctional::gradient(const WienerDiscretization& disc, double phi, const BrownianPath& path) const {
    PathGradient g;
    switch (impl->tag) {
        case Impl::Kind::Integral:
            g.d_nodes = cells_to_nodes(impl->f_cells); // DF = f
            return g;
        case Impl::Kind::Composite: {
            Eigen::VectorXd args(static_cast<Eigen::Index>(impl->comp_coeffs.size()));
            for (std::size_t a = 0; a < impl->comp_coeffs.size(); ++a) args[static_cast<Eigen::Index>(a)] = impl->comp_coeffs[a].dot(path.coords);
            const Eigen::VectorXd gphi = impl->phi_map.gradient(args);
            std::vector<double> cells(static_cast<std::size_t>(disc.n_steps()), 0.0);
            for (std::size_t a = 0; a < impl->comp_cells.size(); ++a)
                for (std::size_t i = 0; i < cells.size(); ++i) cells[i] += gphi[static_cast<Eigen::Index>(a)] * impl->comp_cells[a][i];
            g.d_nodes = cells_to_nodes(cells); // DF = sum phi_a' f_a
            return g;
        }
        case Impl::Kind::String:
            return grad_string_A(disc, phi, path, impl->L);
        case Impl::Kind::Custom: {
            // central differences along each basis direction, h scaled to the path
            const double h = 1e-4 * std::max(1.0, path.coords.norm() / std::sqrt(static_cast<double>(path.coords.size())));
            Eigen::VectorXd coeffs(disc.n_basis());
            for (int n = 0; n < disc.n_basis(); ++n) {
                Eigen::VectorXd cp = path.coords, cm = path.coords;
                cp[n] += h;
                cm[n] -= h;
                const double fp = impl->eval(phi, disc.path_from_coords(cp));
                const double fm = impl->eval(phi, disc.path_from_coords(cm));
                coeffs[n] = (fp - fm) / (2.0 * h);
            }
            const BrownianPath synth = disc.path_from_coords(coeffs);
            g.d_nodes.resize(disc.n_steps() + 1);
            const double dt = disc.dt();
            for (int i = 0; i < disc.n_steps(); ++i) g.d_nodes[i] = (synth.values[i + 1] - synth.values[i]) / dt;
            g.d_nodes[disc.n_steps()] = g.d_nodes[disc.n_steps() - 1];
            return g;
        }
    }
    throw UnsupportedFunctional("gradient unavailable for this functional");
}

double gamma_ou(const WienerDiscretization& disc, const PathFunctional& F, const BrownianPath& path, double phi) {
    switch (F.impl->tag) {
        case PathFunctional::Impl::Kind::Integral:
            return F.impl->norm_sq;
        case PathFunctional::Impl::Kind::Composite: {
            Eigen::VectorXd args(static_cast<Eigen::Index>(F.impl->comp_coeffs.size()));
            for (std::size_t a = 0; a < F.impl->comp_coeffs.size(); ++a) args[static_cast<Eigen::Index>(a)] = F.impl->comp_coeffs[a].dot(path.coords);
            const Eigen::VectorXd g = F.impl->phi_map.gradient(args);
            return g.dot(F.impl->comp_gram * g);
        }
        case PathFunctional::Impl::Kind::String:
        case PathFunctional::Impl::Kind::Custom: {
            const PathGradient g = F.gradient(disc, phi, path);
            const auto f_node = [&](int i) { return g.d_nodes[i] * g.d_nodes[i]; };
            return trapezoid_to(disc, f_node, 1.0);
        }
    }
    throw UnsupportedFunctional("gamma_ou: gradient unavailable");
}

double string_A(const WienerDiscretization& disc, double phi, const BrownianPath& path, double L) {
    if (!(L > 0.0 && L <= 1.0)) throw InputError("string length L must lie in (0, 1]");
    (void)disc;
    return PathFunctional::string(L)(phi, path);
}

PathGradient grad_string_A(const WienerDiscretization& disc, double phi, const BrownianPath& path, double L) {
    if (!(L > 0.0 && L <= 1.0)) throw InputError("string length L must lie in (0, 1]");
    const int n = disc.n_steps();
    const double h = disc.dt();
    // integrand  -sign[cos(phi+B_s)] sin(phi+B_s)  on the nodes
    Eigen::VectorXd q(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double c = std::cos(phi + path.values[i]);
        q[i] = -sign0(c) * std::sin(phi + path.values[i]);
    }
    // suffix trapezoid integrals int_{t_i}^{L} q
    const int full = static_cast<int>(std::floor(L / h + 1e-12));
    Eigen::VectorXd suffix = Eigen::VectorXd::Zero(n + 1);
    double tail = 0.0;
    const double rest = L - full * h;
    if (rest > 1e-12 && full < n) {
        const double frac = rest / h;
        const double b_right = (1.0 - frac) * path.values[full] + frac * path.values[full + 1];
        const double c = std::cos(phi + b_right);
        const double q_right = -sign0(c) * std::sin(phi + b_right);
        tail = 0.5 * rest * (q[full] + q_right);
    }
    suffix[full] = tail;
    for (int i = full - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + 0.5 * h * (q[i] + q[i + 1]);

    PathGradient g;
    g.d_nodes = suffix; // zero beyond L by construction
    g.d_phi = suffix[0];
    return g;
}

double gamma_one_integral(const WienerDiscretization& disc, std::span<const double> f_nodes) {
    return gamma_one_pair(disc, f_nodes, f_nodes);
}

double gamma_one_pair(const WienerDiscretization& disc, std::span<const double> f_nodes, std::span<const double> g_nodes) {
    const int n = disc.n_steps();
    if (static_cast<int>(f_nodes.size()) != n + 1 || static_cast<int>(g_nodes.size()) != n + 1)
        throw DimensionMismatch("gamma_one expects node values");
    const double h = disc.dt();
    double full = 0.0, full_f = 0.0;
    for (int i = 0; i < n; ++i) {
        const double df = (f_nodes[static_cast<std::size_t>(i + 1)] - f_nodes[static_cast<std::size_t>(i)]) / h;
        const double dg = (g_nodes[static_cast<std::size_t>(i + 1)] - g_nodes[static_cast<std::size_t>(i)]) / h;
        full += df * dg * h;
        full_f += df * df * h;
    }
    // H^1 check: the coarse-grid energy of f must not collapse relative to the
    // fine grid (rough functions concentrate derivative mass under refinement)
    double coarse_f = 0.0;
    for (int i = 0; i + 2 <= n; i += 2) {
        const double df = (f_nodes[static_cast<std::size_t>(i + 2)] - f_nodes[static_cast<std::size_t>(i)]) / (2.0 * h);
        coarse_f += df * df * 2.0 * h;
    }
    if (full_f > 1.5 * coarse_f + 1e-12)
        throw UnsupportedFunctional("gamma_one: grid derivative energy diverges under refinement (f not in H^1)");
    return full;
}

Eigen::VectorXd v_process(const WienerDiscretization& disc, const BrownianPath& path) {
    // V_s = int_0^1 (u ^ s) dB_u = int_0^s (B_1 - B_r) dr
    const int n = disc.n_steps();
    const double h = disc.dt();
    const double b1 = path.values[n];
    Eigen::VectorXd v(n + 1);
    v[0] = 0.0;
    for (int i = 0; i < n; ++i) v[i + 1] = v[i] + 0.5 * h * ((b1 - path.values[i]) + (b1 - path.values[i + 1]));
    return v;
}

double gamma_one_string(const WienerDiscretization& disc, double phi, const BrownianPath& path, double L) {
    if (!(L > 0.0 && L <= 1.0)) throw InputError("string length L must lie in (0, 1]");
    const Eigen::VectorXd v = v_process(disc, path);
    const double h = disc.dt();
    const int m = static_cast<int>(std::floor(L / h + 1e-12)); // nodes 0..m cover [0, L]
    Eigen::VectorXd sc(m + 1), w(m + 1);
    for (int i = 0; i <= m; ++i) {
        const double c = std::cos(phi + v[i]);
        sc[i] = sign0(c) * std::sin(phi + v[i]);
        w[i] = (i == 0 || i == m) ? 0.5 * h : h;
    }
    double acc = 0.0;
    for (int i = 0; i <= m; ++i) {
        const double ti = disc.node(i);
        for (int j = 0; j <= m; ++j) {
            const double tj = disc.node(j);
            acc += w[i] * w[j] * sc[i] * sc[j] * std::min(ti, tj);
        }
    }
    return acc;
}

} // namespace gammacalc::wiener
