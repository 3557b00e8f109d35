#pragma once
#include <functional>
#include <vector>

#include "gammacalc/errors.hpp"

namespace gammacalc::structures {

// A probability measure on R given as exact atoms plus a piecewise-constant
// density on a uniform grid.
struct Measure1D {
    std::vector<std::pair<double, double>> atoms; // (position, weight)
    struct DensityGrid {
        double lo = 0.0;
        double hi = 0.0;
        std::vector<double> values; // density on equal-width cells
        bool empty() const { return values.empty(); }
        double cell_width() const { return values.empty() ? 0.0 : (hi - lo) / static_cast<double>(values.size()); }
        double total_mass() const;
    } density;

    double total_mass() const;
};

Measure1D gaussian_density_measure(int n_cells = 1 << 14, double half_width = 8.0);

struct HamzaConfig {
    int grid_cells = 1 << 14; // resolution used to report the {a > 0} region
    double mass_tol = 1e-9;
};

struct HamzaResult {
    bool closable = true;
    std::vector<std::pair<double, double>> offending_atoms; // atoms sitting where a > 0
    std::string diagnostic;
};

// One-dimensional closability test for the form f -> integral f'^2 a dmu:
// closable iff the part of mu where a > 0 is absolutely continuous, i.e. no
// atom of mu sits inside {a > 0}. Atoms are exact inputs; the density part is
// absolutely continuous by construction.
HamzaResult hamza_closable_1d(const Measure1D& mu, const std::function<double(double)>& a, HamzaConfig cfg = {});

} // namespace gammacalc::structures
