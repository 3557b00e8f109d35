#include <algorithm>
#include <cmath>
#include <numbers>

#include "gammacalc/wiener/wiener.hpp"

namespace gammacalc::wiener {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// index n >= 1 decomposes as n = 2^level + pos
void haar_index(int n, int& level, int& pos) {
    level = 0;
    int first = 1;
    while (first * 2 <= n) {
        first *= 2;
        ++level;
    }
    pos = n - first;
}

} // namespace

WienerDiscretization::WienerDiscretization(int n_steps, int n_basis, std::uint64_t master_seed)
    : n_steps_(n_steps), n_basis_(n_basis), seed_(master_seed) {
    if (!power_of_two(n_steps)) throw InputError("n_steps must be a power of two");
    if (!power_of_two(n_basis)) throw InputError("n_basis must be a power of two");
    if (n_basis > n_steps) throw InputError("n_basis must not exceed n_steps");
    levels_ = 0;
    while ((1 << levels_) < n_basis) ++levels_;
}

double WienerDiscretization::haar_on_cell(int n, int cell) const {
    if (n == 0) return 1.0;
    int level = 0, pos = 0;
    haar_index(n, level, pos);
    const int cells_per_support = n_steps_ >> level; // support covers this many cells
    const int start = pos * cells_per_support;
    if (cell < start || cell >= start + cells_per_support) return 0.0;
    const double amp = std::pow(2.0, level / 2.0);
    return (cell - start) < cells_per_support / 2 ? amp : -amp;
}

double WienerDiscretization::cumulative_integral(int n, double t) const {
    t = std::clamp(t, 0.0, 1.0);
    if (n == 0) return t;
    int level = 0, pos = 0;
    haar_index(n, level, pos);
    const double scale = std::pow(2.0, static_cast<double>(level));
    const double s = t * scale - pos; // position inside the support in support units
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double amp = std::pow(2.0, -level / 2.0);
    return amp * (s <= 0.5 ? s : 1.0 - s);
}

Eigen::VectorXd WienerDiscretization::haar_coefficients(std::span<const double> f_cells) const {
    if (static_cast<int>(f_cells.size()) != n_steps_) throw DimensionMismatch("haar_coefficients expects one value per cell");
    // prefix sums make every coefficient an O(1) lookup
    std::vector<double> prefix(static_cast<std::size_t>(n_steps_) + 1, 0.0);
    for (int i = 0; i < n_steps_; ++i) prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] + f_cells[static_cast<std::size_t>(i)];
    const double h = dt();
    Eigen::VectorXd coeffs(n_basis_);
    coeffs[0] = prefix[static_cast<std::size_t>(n_steps_)] * h;
    for (int n = 1; n < n_basis_; ++n) {
        int level = 0, pos = 0;
        haar_index(n, level, pos);
        const int cells = n_steps_ >> level;
        const int start = pos * cells;
        const double first = prefix[static_cast<std::size_t>(start + cells / 2)] - prefix[static_cast<std::size_t>(start)];
        const double second = prefix[static_cast<std::size_t>(start + cells)] - prefix[static_cast<std::size_t>(start + cells / 2)];
        coeffs[n] = std::pow(2.0, level / 2.0) * (first - second) * h;
    }
    return coeffs;
}

double WienerDiscretization::cell_inner(std::span<const double> a, std::span<const double> b) const {
    if (a.size() != b.size() || static_cast<int>(a.size()) != n_steps_)
        throw DimensionMismatch("cell_inner expects one value per cell");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * dt();
}

Eigen::MatrixXd WienerDiscretization::gram() const {
    Eigen::MatrixXd g(n_basis_, n_basis_);
    for (int m = 0; m < n_basis_; ++m)
        for (int n = m; n < n_basis_; ++n) {
            double s = 0.0;
            for (int c = 0; c < n_steps_; ++c) s += haar_on_cell(m, c) * haar_on_cell(n, c);
            g(m, n) = g(n, m) = s * dt();
        }
    return g;
}

BrownianPath WienerDiscretization::path_from_coords(Eigen::VectorXd coords) const {
    if (static_cast<int>(coords.size()) != n_basis_) throw DimensionMismatch("coordinate vector length != n_basis");
    BrownianPath path;
    path.values.resize(n_steps_ + 1);
    path.values[0] = 0.0;
    std::vector<double> amp(static_cast<std::size_t>(levels_));
    for (int level = 0; level < levels_; ++level) amp[static_cast<std::size_t>(level)] = std::pow(2.0, -level / 2.0);
    for (int i = 1; i <= n_steps_; ++i) {
        const double t = node(i);
        double b = coords[0] * t;
        for (int level = 0; level < levels_; ++level) {
            const double scale = static_cast<double>(1 << level);
            int pos = static_cast<int>(t * scale);
            if (pos >= (1 << level)) pos = (1 << level) - 1;
            const double s = t * scale - pos;
            if (s > 0.0 && s < 1.0) {
                const double lam = amp[static_cast<std::size_t>(level)] * (s <= 0.5 ? s : 1.0 - s);
                b += coords[(1 << level) + pos] * lam;
            }
        }
        path.values[i] = b;
    }
    path.coords = std::move(coords);
    return path;
}

BrownianPath WienerDiscretization::sample_path(std::uint64_t seed, std::uint64_t index) const {
    auto rng = make_fast_rng(seed, index);
    std::normal_distribution<double> normal;
    Eigen::VectorXd coords(n_basis_);
    for (int n = 0; n < n_basis_; ++n) coords[n] = normal(rng);
    return path_from_coords(std::move(coords));
}

BrownianPath WienerDiscretization::sample_path(std::uint64_t index) const { return sample_path(seed_, index); }

Eigen::VectorXd WienerDiscretization::nodes_of(const std::function<double(double)>& f) const {
    Eigen::VectorXd v(n_steps_ + 1);
    for (int i = 0; i <= n_steps_; ++i) v[i] = f(node(i));
    return v;
}

Eigen::VectorXd WienerDiscretization::cells_of(const std::function<double(double)>& f) const {
    Eigen::VectorXd v(n_steps_);
    for (int i = 0; i < n_steps_; ++i) v[i] = f((i + 0.5) * dt());
    return v;
}

double wiener_integral(const WienerDiscretization& disc, std::span<const double> f_cells, const BrownianPath& path) {
    const Eigen::VectorXd a = disc.haar_coefficients(f_cells);
    return a.dot(path.coords);
}

// --- cosine basis / second quantization ---------------------------------------

CosineBasis::CosineBasis(int n_steps, int n_basis) : n_steps_(n_steps), n_basis_(n_basis) {
    if (n_steps < 1 || n_basis < 1) throw InputError("CosineBasis: sizes must be positive");
    cumint_.resize(n_steps + 1, n_basis);
    const double pi = std::numbers::pi;
    for (int i = 0; i <= n_steps; ++i) {
        const double t = static_cast<double>(i) / n_steps;
        cumint_(i, 0) = t;
        for (int k = 1; k < n_basis; ++k) cumint_(i, k) = std::sqrt(2.0) * std::sin(k * pi * t) / (k * pi);
    }
}

Eigen::VectorXd CosineBasis::sample_coords(std::uint64_t seed, std::uint64_t index) const {
    auto rng = make_fast_rng(seed, index);
    std::normal_distribution<double> normal;
    Eigen::VectorXd x(n_basis_);
    for (int k = 0; k < n_basis_; ++k) x[k] = normal(rng);
    return x;
}

Eigen::VectorXd CosineBasis::synthesize(const Eigen::VectorXd& coords) const {
    if (static_cast<int>(coords.size()) != n_basis_) throw DimensionMismatch("cosine coords length != n_basis");
    return cumint_ * coords;
}

double CosineBasis::eigenvalue(int k, double t) const {
    const double pi = std::numbers::pi;
    return std::exp(-static_cast<double>(k) * k * pi * pi * t);
}

MeanSe second_quantized_semigroup(const CosineBasis& basis, const std::function<double(const Eigen::VectorXd&)>& F,
                                  const Eigen::VectorXd& coords, double t, const McConfig& mc) {
    if (t < 0.0) throw InputError("second_quantized_semigroup: t must be nonnegative");
    const int nb = basis.n_basis();
    Eigen::VectorXd decay(nb), resample(nb);
    for (int k = 0; k < nb; ++k) {
        const double e = basis.eigenvalue(k, t);
        decay[k] = e;
        const double e2 = basis.eigenvalue(k, 2.0 * t);
        resample[k] = std::sqrt(std::max(0.0, 1.0 - e2));
    }
    if (t == 0.0) {
        const double v = F(basis.synthesize(coords));
        return {v, 0.0, 0.0, 1};
    }
    return mc_mean(mc, [&](std::size_t, std::mt19937_64& rng) {
        std::normal_distribution<double> normal;
        Eigen::VectorXd mixed(nb);
        for (int k = 0; k < nb; ++k) mixed[k] = decay[k] * coords[k] + resample[k] * normal(rng);
        return F(basis.synthesize(mixed));
    });
}

} // namespace gammacalc::wiener
