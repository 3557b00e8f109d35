#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "gammacalc/trials/trials.hpp"

namespace gammacalc::trials {

namespace {

// spectrum f(theta_j) of the symmetrized kernel over M grid points
std::vector<double> kernel_spectrum(const std::function<double(int)>& a, int n_lags, int m_points) {
    std::vector<std::complex<double>> row(static_cast<std::size_t>(m_points), 0.0);
    row[0] = a(0);
    for (int k = 1; k < n_lags; ++k) {
        row[static_cast<std::size_t>(k)] += a(k);
        row[static_cast<std::size_t>(m_points - k)] += a(k);
    }
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> freq;
    fft.fwd(freq, row);
    std::vector<double> spec(freq.size());
    for (std::size_t i = 0; i < freq.size(); ++i) spec[i] = freq[i].real();
    return spec;
}

// exact Toeplitz matvec y = T v with T_{mn} = a(m - n), via circulant embedding
Eigen::VectorXd toeplitz_matvec(const std::function<double(int)>& a, const Eigen::VectorXd& v) {
    const int n = static_cast<int>(v.size());
    int m = 1;
    while (m < 2 * n) m *= 2;
    std::vector<std::complex<double>> col(static_cast<std::size_t>(m), 0.0);
    for (int k = 0; k < n; ++k) col[static_cast<std::size_t>(k)] = a(k);
    for (int k = 1; k < n; ++k) col[static_cast<std::size_t>(m - k)] = a(k);
    std::vector<std::complex<double>> vec(static_cast<std::size_t>(m), 0.0);
    for (int k = 0; k < n; ++k) vec[static_cast<std::size_t>(k)] = v[k];
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> fc, fv;
    fft.fwd(fc, col);
    fft.fwd(fv, vec);
    for (std::size_t i = 0; i < fc.size(); ++i) fc[i] *= fv[i];
    std::vector<std::complex<double>> conv;
    fft.inv(conv, fc);
    Eigen::VectorXd y(n);
    for (int k = 0; k < n; ++k) y[k] = conv[static_cast<std::size_t>(k)].real();
    return y;
}

} // namespace

void validate_correlation(const CorrelationSpec& corr, int N) {
    if (std::holds_alternative<AllOnesCorrelation>(corr)) return;
    if (const auto* cm = std::get_if<ConstantMatrixCorrelation>(&corr)) {
        if (cm->a.rows() < N || cm->a.cols() < N)
            throw DimensionMismatch("correlation matrix smaller than the run size");
        const Eigen::MatrixXd section = cm->a.topLeftCorner(N, N);
        if (max_asymmetry(section) > 1e-12) throw NotPositiveSemidefinite("correlation matrix not symmetric");
        if (!is_psd(section)) throw NotPositiveSemidefinite("correlation matrix section is not PSD");
        return;
    }
    const auto& kern = std::get<StationaryKernelCorrelation>(corr);
    int m = 1;
    while (m < std::max(4096, 2 * N)) m *= 2;
    const std::vector<double> spec = kernel_spectrum(kern.a, N, m);
    double min_s = spec[0], max_s = spec[0];
    for (double s : spec) {
        min_s = std::min(min_s, s);
        max_s = std::max(max_s, s);
    }
    if (min_s < -1e-9 * std::max(1.0, max_s)) {
        std::ostringstream msg;
        msg << "stationary kernel fails the Bochner spectrum check: min spectral value " << min_s;
        throw NotPositiveSemidefinite(msg.str());
    }
}

double example_a_mean_gamma(const TrialSystemA& sys, int N, std::uint64_t seed, std::uint64_t index, std::uint64_t shift) {
    if (N < 1) throw InputError("example_a_mean_gamma: N must be >= 1");
    validate_correlation(sys.correlation, N);
    Eigen::VectorXd dpsi(N);
    for (int i = 0; i < N; ++i) {
        auto rng = make_fast_rng(derive_seed(seed, shift + static_cast<std::uint64_t>(i)), index);
        std::uniform_real_distribution<double> unif;
        const double u = unif(rng);
        dpsi[i] = sys.psi.jacobian(Eigen::VectorXd::Constant(1, u))(0, 0) / N;
    }
    if (std::holds_alternative<AllOnesCorrelation>(sys.correlation)) {
        const double s = dpsi.sum();
        return s * s;
    }
    if (const auto* cm = std::get_if<ConstantMatrixCorrelation>(&sys.correlation)) {
        return dpsi.dot(cm->a.topLeftCorner(N, N) * dpsi);
    }
    const auto& kern = std::get<StationaryKernelCorrelation>(sys.correlation);
    if (N <= 512) {
        double acc = 0.0;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) acc += dpsi[i] * dpsi[j] * kern.a(std::abs(i - j));
        return acc;
    }
    return dpsi.dot(toeplitz_matvec(kern.a, dpsi));
}

// --- Example B -----------------------------------------------------------------

Distribution1D standard_normal_dist() {
    Distribution1D d;
    d.name = "normal";
    d.sample = [](SplitMix64& rng) {
        std::normal_distribution<double> normal;
        return normal(rng);
    };
    d.pdf = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); };
    return d;
}

Distribution1D uniform01_dist() {
    Distribution1D d;
    d.name = "uniform";
    d.sample = [](SplitMix64& rng) {
        std::uniform_real_distribution<double> unif;
        return unif(rng);
    };
    d.pdf = [](double x) { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; };
    return d;
}

double example_b_mean_gamma(const TrialSystemB& sys, const DifferentiableMap& h, int N, std::uint64_t seed,
                            std::uint64_t index, std::uint64_t shift) {
    if (N < 1) throw InputError("example_b_mean_gamma: N must be >= 1");
    double corr = 0.0, uncorr = 0.0;
    for (int i = 0; i < N; ++i) {
        auto rng = make_fast_rng(derive_seed(seed, shift + static_cast<std::uint64_t>(i)), index);
        const double x = sys.rho.sample(rng);
        const double dh = h.jacobian(Eigen::VectorXd::Constant(1, x))(0, 0);
        corr += dh * sys.f(x);
        uncorr += dh * dh * sys.g(x);
    }
    corr /= N;
    return corr * corr + uncorr / (static_cast<double>(N) * N);
}

MeanSe limit_b_integral(const TrialSystemB& sys, const DifferentiableMap& h, std::size_t n, std::uint64_t seed) {
    McConfig cfg;
    cfg.seed = seed;
    cfg.n_samples = n;
    Accumulator acc;
    for (std::size_t j = 0; j < cfg.n_samples; ++j) {
        auto rng = make_fast_rng(cfg.seed, j);
        const double x = sys.rho.sample(rng);
        acc.add(h.jacobian(Eigen::VectorXd::Constant(1, x))(0, 0) * sys.f(x));
    }
    return acc.result();
}

structures::ErrorStructure b_structure(const TrialSystemB& sys) {
    auto f = sys.f;
    auto g = sys.g;
    auto rho = sys.rho;
    structures::StructureSpec spec;
    spec.kind = "trials_b";
    spec.dim = -1;
    spec.sampler = [rho](std::uint64_t seed, std::uint64_t index) {
        return structures::Sample::lazy([rho, seed, index](std::size_t i) {
            auto rng = make_fast_rng(derive_seed(seed, i), index);
            return rho.sample(rng);
        });
    };
    spec.quad = [f, g](const structures::Sample& w, std::span<const std::size_t> coords, const Eigen::VectorXd& gf,
                       const Eigen::VectorXd& gg) {
        double sf = 0.0, sg = 0.0, diag = 0.0;
        for (std::size_t k = 0; k < coords.size(); ++k) {
            const double x = w.coord(coords[k]);
            const double fx = f(x);
            sf += gf[static_cast<Eigen::Index>(k)] * fx;
            sg += gg[static_cast<Eigen::Index>(k)] * fx;
            diag += gf[static_cast<Eigen::Index>(k)] * gg[static_cast<Eigen::Index>(k)] * g(x);
        }
        return sf * sg + diag;
    };
    spec.dense = [f, g](const structures::Sample& w, std::span<const std::size_t> coords) {
        const Eigen::Index k = static_cast<Eigen::Index>(coords.size());
        Eigen::VectorXd fv(k);
        Eigen::VectorXd gv(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            const double x = w.coord(coords[static_cast<std::size_t>(i)]);
            fv[i] = f(x);
            gv[i] = g(x);
        }
        return (fv * fv.transpose() + Eigen::MatrixXd(gv.asDiagonal())).eval();
    };
    return structures::ErrorStructure(std::move(spec));
}

structures::Functional b_mean_functional(const DifferentiableMap& h, int N) {
    std::vector<std::size_t> coords(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) coords[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
    DifferentiableMap mean;
    mean.d_in = N;
    mean.d_out = 1;
    mean.eval = [h, N](const Eigen::VectorXd& x) {
        double s = 0.0;
        for (int i = 0; i < N; ++i) s += h.eval(x.segment(i, 1))[0];
        return Eigen::VectorXd::Constant(1, s / N).eval();
    };
    mean.jacobian = [h, N](const Eigen::VectorXd& x) {
        Eigen::MatrixXd J(1, N);
        for (int i = 0; i < N; ++i) J(0, i) = h.jacobian(x.segment(i, 1))(0, 0) / N;
        return J;
    };
    return structures::make_functional(std::move(coords), std::move(mean));
}

WitnessResult nonclosability_witness(const TrialSystemB& sys, const DifferentiableMap& h, double tol, long long n_max,
                                     std::uint64_t seed) {
    WitnessResult result;
    const MeanSe integral = limit_b_integral(sys, h, 100000, seed);
    result.limit = integral.mean * integral.mean;
    if (std::abs(integral.mean) <= 3.0 * integral.se) {
        result.possible = false;
        std::ostringstream msg;
        msg << "witness impossible: int h' f drho = " << integral.mean << " +- " << integral.se
            << " is zero within MC resolution, the pre-structure closes onto the product case";
        result.message = msg.str();
        return result;
    }

    // sd of h(X) for the iid scaling law |u_M - u_N|_{L2} = sd * sqrt(1/N - 1/M)
    McConfig cfg;
    cfg.seed = derive_seed(seed, 1);
    cfg.n_samples = 100000;
    Accumulator acc;
    for (std::size_t j = 0; j < cfg.n_samples; ++j) {
        auto rng = make_fast_rng(cfg.seed, j);
        acc.add(h.eval(Eigen::VectorXd::Constant(1, sys.rho.sample(rng)))[0]);
    }
    const double sd = std::sqrt(acc.variance());

    // choose N with |u_{2N} - u_N| = sd / sqrt(2N) < tol
    const long long needed = static_cast<long long>(std::ceil(sd * sd / (2.0 * tol * tol))) + 1;
    if (2 * needed > n_max) {
        result.possible = false;
        std::ostringstream msg;
        msg << "witness needs N about " << needed << " but n_max = " << n_max;
        result.message = msg.str();
        return result;
    }
    result.N = static_cast<int>(needed);
    result.M = static_cast<int>(2 * needed);
    result.l2_distance = sd * std::sqrt(1.0 / result.N - 1.0 / result.M);
    result.gamma_at_N = example_b_mean_gamma(sys, h, result.N, derive_seed(seed, 2), 0);

    std::ostringstream msg;
    if (result.l2_distance < tol && result.gamma_at_N >= 0.9 * result.limit) {
        msg << "witness found: |u_M - u_N| = " << result.l2_distance << " < " << tol << " while Gamma[u_N] = "
            << result.gamma_at_N << " >= 0.9 * " << result.limit;
    } else {
        result.possible = false;
        msg << "witness not confirmed: |u_M - u_N| = " << result.l2_distance << ", Gamma[u_N] = " << result.gamma_at_N;
    }
    result.message = msg.str();

    // package the same sequence for the closure machinery at tractable sizes
    const auto S = b_structure(sys);
    const auto seq = [&h](int n) { return b_mean_functional(h, n); };
    structures::ClosureConfig ccfg;
    ccfg.n_mc = 300;
    ccfg.seed = derive_seed(seed, 3);
    ccfg.n0 = 1000;
    ccfg.n_rungs = 4;
    ccfg.gamma_tol = 0.01;
    const double mean_h = acc.mean();
    result.closure = structures::closure_limit(S, seq, 8000, 0.05, structures::constant_functional(mean_h), ccfg);
    return result;
}

// --- Example C -----------------------------------------------------------------

TrialSystemC make_variant_c(VariantC variant, double L, int n_steps) {
    TrialSystemC sys;
    sys.L = L;
    sys.n_steps = n_steps;
    sys.n_basis = n_steps;
    const double pi = std::numbers::pi;
    if (variant == VariantC::Indicator) {
        // the indicator window [0, pi/2]; with g = 1 this is also b sqrt(g)
        auto ind = [pi](double phi) { return (phi >= 0.0 && phi <= pi / 2.0) ? 1.0 : 0.0; };
        sys.a_weight = ind;
        sys.f_ang = ind;
        sys.g_ang = [](double) { return 1.0; };
    } else {
        auto lin = [](double phi) { return phi; };
        sys.a_weight = lin;
        sys.f_ang = lin;
        sys.g_ang = [](double) { return 1.0; };
    }
    return sys;
}

namespace {

struct TrialDraw {
    double phi;
    wiener::PathGradient grad;
};

TrialDraw draw_trial(const TrialSystemC& sys, const wiener::WienerDiscretization& disc, std::uint64_t seed,
                     std::uint64_t index) {
    auto rng = make_fast_rng(seed, index);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * std::numbers::pi);
    TrialDraw d;
    d.phi = unif(rng);
    const wiener::BrownianPath path = disc.sample_path(derive_seed(seed, 0x0b5e55ULL), index);
    d.grad = wiener::grad_string_A(disc, d.phi, path, sys.L);
    return d;
}

double node_norm_sq(const wiener::WienerDiscretization& disc, const Eigen::VectorXd& nodes) {
    const int n = disc.n_steps();
    const double h = disc.dt();
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 0.5 * h : h;
        acc += w * nodes[i] * nodes[i];
    }
    return acc;
}

} // namespace

CEstimate example_c_mean_gamma(const TrialSystemC& sys, int N, const McConfig& mc, std::uint64_t shift) {
    if (N < 1) throw InputError("example_c_mean_gamma: N must be >= 1");
    const wiener::WienerDiscretization disc(sys.n_steps, sys.n_basis, 0);
    const int nodes = sys.n_steps + 1;

    Accumulator raw_acc, limit_acc, uncorr_acc;
    for (std::size_t r = 0; r < mc.n_samples; ++r) {
        Eigen::VectorXd w_sum = Eigen::VectorXd::Zero(nodes);
        double c_ang = 0.0, sum_y2 = 0.0, uncorr = 0.0;
        const std::uint64_t rseed = derive_seed(mc.seed, r);
        for (int i = 0; i < N; ++i) {
            const TrialDraw d = draw_trial(sys, disc, rseed, shift + static_cast<std::uint64_t>(i));
            const double a = sys.a_weight(d.phi);
            const double fang = sys.f_ang(d.phi);
            const double gang = sys.g_ang(d.phi);
            const double d2 = node_norm_sq(disc, d.grad.d_nodes);
            w_sum += a * d.grad.d_nodes;
            c_ang += fang * d.grad.d_phi;
            sum_y2 += a * a * d2 + fang * fang * d.grad.d_phi * d.grad.d_phi;
            uncorr += d2 + gang * d.grad.d_phi * d.grad.d_phi;
        }
        const Eigen::VectorXd y_bar = w_sum / N;
        const double y_bar_sq = node_norm_sq(disc, y_bar) + (c_ang / N) * (c_ang / N);
        raw_acc.add(y_bar_sq + uncorr / (static_cast<double>(N) * N));
        uncorr_acc.add(uncorr / (static_cast<double>(N) * N));
        if (N > 1) {
            const double s2 = (sum_y2 - N * y_bar_sq) / (N - 1.0); // within-replica spread of Y_i
            limit_acc.add(y_bar_sq - s2 / N);                      // unbiased for |E Y|^2
        } else {
            limit_acc.add(y_bar_sq);
        }
    }
    CEstimate est;
    est.gamma_raw = raw_acc.result();
    est.gamma_limit = limit_acc.result();
    est.uncorrelated = uncorr_acc.result();
    est.N = N;
    return est;
}

MeanSe limit_c_mc(const TrialSystemC& sys, std::size_t n_trials, std::uint64_t seed, int batch) {
    McConfig mc;
    mc.seed = seed;
    mc.n_samples = (n_trials + static_cast<std::size_t>(batch) - 1) / static_cast<std::size_t>(batch);
    return example_c_mean_gamma(sys, batch, mc).gamma_limit;
}

} // namespace gammacalc::trials
