#include <cmath>
#include <numbers>
#include <sstream>

#include "gammacalc/structures/hamza.hpp"

namespace gammacalc::structures {

double Measure1D::DensityGrid::total_mass() const {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum * cell_width();
}

double Measure1D::total_mass() const {
    double sum = density.total_mass();
    for (const auto& [x, w] : atoms) {
        (void)x;
        sum += w;
    }
    return sum;
}

Measure1D gaussian_density_measure(int n_cells, double half_width) {
    Measure1D mu;
    mu.density.lo = -half_width;
    mu.density.hi = half_width;
    mu.density.values.resize(static_cast<std::size_t>(n_cells));
    const double h = (2.0 * half_width) / n_cells;
    double mass = 0.0;
    for (int i = 0; i < n_cells; ++i) {
        const double x = -half_width + (i + 0.5) * h;
        mu.density.values[static_cast<std::size_t>(i)] = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        mass += mu.density.values[static_cast<std::size_t>(i)] * h;
    }
    for (auto& v : mu.density.values) v /= mass; // renormalize the truncation
    return mu;
}

HamzaResult hamza_closable_1d(const Measure1D& mu, const std::function<double(double)>& a, HamzaConfig cfg) {
    const double mass = mu.total_mass();
    if (std::abs(mass - 1.0) > cfg.mass_tol) {
        std::ostringstream msg;
        msg << "measure mass " << mass << " is not normalized to 1 (tolerance " << cfg.mass_tol << ")";
        throw InputError(msg.str());
    }
    for (const auto& [x, w] : mu.atoms) {
        (void)x;
        if (w < 0.0) throw InputError("negative atom weight");
    }
    for (double v : mu.density.values)
        if (v < 0.0) throw InputError("negative density value");

    HamzaResult result;
    for (const auto& atom : mu.atoms) {
        if (atom.second > 0.0 && a(atom.first) > 0.0) result.offending_atoms.push_back(atom);
    }
    result.closable = result.offending_atoms.empty();

    std::ostringstream diag;
    if (result.closable) {
        diag << "closable: no atom of the measure sits inside {a > 0}";
    } else {
        diag << "not closable: " << result.offending_atoms.size() << " atom(s) inside {a > 0}:";
        for (const auto& [x, w] : result.offending_atoms) diag << " (" << x << ", weight " << w << ")";
    }
    // grid view of {a > 0} over the support hull, for the report
    double lo = mu.density.empty() ? 0.0 : mu.density.lo;
    double hi = mu.density.empty() ? 0.0 : mu.density.hi;
    for (const auto& [x, w] : mu.atoms) {
        (void)w;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (hi > lo && cfg.grid_cells > 0) {
        const double h = (hi - lo) / cfg.grid_cells;
        int positive = 0;
        for (int i = 0; i < cfg.grid_cells; ++i) {
            if (a(lo + (i + 0.5) * h) > 0.0) ++positive;
        }
        diag << "; {a > 0} covers " << positive << "/" << cfg.grid_cells << " grid cells on [" << lo << ", " << hi << "]";
    }
    result.diagnostic = diag.str();
    return result;
}

} // namespace gammacalc::structures
