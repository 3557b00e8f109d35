// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Pass the gamma-calc binary path as argv[1] (used by the
// determinism checks of criterion 10).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gammacalc/expr/interval.hpp"
#include "gammacalc/fisher/fisher.hpp"
#include "gammacalc/generator.hpp"
#include "gammacalc/propagate.hpp"
#include "gammacalc/structures/hamza.hpp"
#include "gammacalc/structures/structure.hpp"
#include "gammacalc/trials/trials.hpp"
#include "gammacalc/wiener/wiener.hpp"
#include "support/mc_oracle.hpp"
#include "support/stats.hpp"

using namespace gammacalc;

namespace {

constexpr double kPi = std::numbers::pi;
std::string g_cli;

struct Failure {
    std::ostringstream msg;
    bool failed = false;
};

#define REQUIRE_OR_FAIL(cond, text)                                                                                    \
    do {                                                                                                               \
        if (!(cond)) {                                                                                                 \
            fail.failed = true;                                                                                        \
            fail.msg << "  [" << text << "] ";                                                                         \
        }                                                                                                              \
    } while (0)

DifferentiableMap expr_map(const std::vector<std::string>& exprs, const std::vector<std::string>& vars) {
    std::vector<expr::ExprAst> asts;
    for (const auto& e : exprs) asts.push_back(expr::parse(e, vars));
    return map_from_expressions(asts);
}

Eigen::VectorXd vec2(double a, double b) { return (Eigen::VectorXd(2) << a, b).finished(); }

// --- criterion 1: coherence round-trip ----------------------------------------

std::string criterion_1() {
    Failure fail;
    std::mt19937_64 rng(20260811);
    std::normal_distribution<double> normal;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::MatrixXd A(2, 2);
        do {
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) A(r, c) = normal(rng);
        } while (std::abs(A.determinant()) < 0.05);
        Eigen::MatrixXd g(2, 2);
        g << 1.0, 0.3, 0.3, 0.7 + 0.001 * trial;
        const ErroredVector x = make_errored(vec2(normal(rng), normal(rng)), g, vec2(0.1, -0.2));
        const auto u = linear_map(A);
        const ErroredVector back = gauss_propagate(inverse_map(u), gauss_propagate(u, x));
        worst = std::max(worst, (back.variance - x.variance).cwiseAbs().maxCoeff());
    }
    const auto diffeo1 = expr_map({"x^3+x", "y+sin(x)"}, {"x", "y"});
    const auto diffeo2 = expr_map({"atan(x)", "y+x^3"}, {"x", "y"});
    for (const auto& u : {diffeo1, diffeo2}) {
        const ErroredVector x = make_errored(vec2(0.6, -0.4), (Eigen::MatrixXd(2, 2) << 0.4, 0.1, 0.1, 0.3).finished(),
                                             vec2(0.05, 0.0));
        const ErroredVector back = gauss_propagate(inverse_map(u), gauss_propagate(u, x));
        worst = std::max(worst, (back.variance - x.variance).cwiseAbs().maxCoeff());
    }
    REQUIRE_OR_FAIL(worst < 1e-10, "variance round-trip max deviation " << worst << " >= 1e-10");

    // the naive formula strictly inflates the 45-degree rotation pair
    const double c = std::sqrt(0.5);
    const auto rot = linear_map((Eigen::MatrixXd(2, 2) << c, -c, c, c).finished());
    const Eigen::VectorXd sig0 = vec2(1.0, 0.0);
    const Eigen::VectorXd after = naive_propagate(inverse_map(rot), naive_propagate(rot, sig0));
    REQUIRE_OR_FAIL(after[0] >= sig0[0] - 1e-12 && after[1] > sig0[1] + 1e-6,
                    "naive round-trip failed to strictly inflate: " << after.transpose());
    return fail.failed ? fail.msg.str() : "";
}

// --- criterion 2: small-noise oracle -------------------------------------------

std::string criterion_2() {
    Failure fail;
    Eigen::MatrixXd correlated(2, 2);
    correlated << 0.02, 0.01, 0.01, 0.03;
    struct Fixture {
        std::string expr;
        Eigen::VectorXd value;
        Eigen::MatrixXd variance;
        Eigen::VectorXd bias;
    };
    const Fixture fixtures[] = {
        {"v1*v2", vec2(2.0, 3.0), (Eigen::MatrixXd(2, 2) << 0.01, 0.0, 0.0, 0.04).finished(), vec2(0.0, 0.0)},
        {"sin(v1)+v1*v2^2", vec2(0.7, -0.4), correlated, vec2(0.5, -0.2)},
        {"exp(v1*v2)", vec2(0.5, 0.8), correlated, vec2(0.0, 1.0)},
        {"v1/(1+v2*v2)", vec2(1.2, 0.3), correlated, vec2(-0.3, 0.4)},
        {"atan(v1)+sqrt(4+v2)", vec2(0.4, 1.1), correlated, vec2(0.2, 0.2)},
    };
    const double eps = 1e-3;
    const std::size_t n = 1000000;
    int k = 0;
    for (const auto& fx : fixtures) {
        const auto F = expr_map({fx.expr}, {"v1", "v2"});
        const ErroredVector out = gauss_propagate(F, make_errored(fx.value, fx.variance, fx.bias));
        const auto oracle = testsupport::small_noise_oracle(
            [&](const Eigen::VectorXd& p) { return F.eval(p)[0]; }, fx.value, fx.variance, fx.bias, eps, n,
            77000 + static_cast<std::uint64_t>(k++));
        REQUIRE_OR_FAIL(std::abs(out.variance(0, 0) - oracle.variance) <= 3.0 * oracle.variance_se,
                        fx.expr << ": variance " << out.variance(0, 0) << " vs MC " << oracle.variance << " +- "
                                << oracle.variance_se);
        REQUIRE_OR_FAIL(std::abs(out.bias[0] - oracle.mean_shift) <= 3.0 * oracle.mean_shift_se,
                        fx.expr << ": bias " << out.bias[0] << " vs MC " << oracle.mean_shift << " +- "
                                << oracle.mean_shift_se);
    }
    return fail.failed ? fail.msg.str() : "";
}

// --- criterion 3: Ito isometry / OU structure ----------------------------------

std::string criterion_3() {
    Failure fail;
    const int n_steps = 1024;
    const wiener::WienerDiscretization disc(n_steps, n_steps, 3001);
    const Eigen::VectorXd cells = disc.cells_of([](double s) { return s; });
    const std::vector<double> cv(cells.begin(), cells.end());
    const wiener::PathFunctional F = wiener::PathFunctional::integral(disc, cv);

    const double engine = wiener::gamma_ou(disc, F, disc.path_from_coords(Eigen::VectorXd::Zero(n_steps)));
    REQUIRE_OR_FAIL(std::abs(engine - 1.0 / 3.0) <= 1e-6, "engine gamma " << engine << " differs from 1/3");
    const double quad = disc.cell_inner(cv, cv);
    REQUIRE_OR_FAIL(std::abs(engine - quad) <= 1e-15, "engine gamma vs grid quadrature mismatch");

    const int n_paths = 100000;
    Accumulator acc;
    for (int p = 0; p < n_paths; ++p) {
        const double v = F(0.0, disc.sample_path(static_cast<std::uint64_t>(p)));
        acc.add(v * v);
    }
    const double se = std::sqrt(2.0 / n_paths) / 3.0;
    REQUIRE_OR_FAIL(std::abs(acc.mean() - 1.0 / 3.0) <= 3.0 * se,
                    "MC variance " << acc.mean() << " vs 1/3 +- " << se);
    return fail.failed ? fail.msg.str() : "";
}

// --- criterion 4: Buffon string --------------------------------------------------

std::string criterion_4() {
    Failure fail;
    const wiener::WienerDiscretization disc(256, 256, 4001);
    const int n_samples = 100000;
    for (const double L : {0.5, 1.0}) {
        Accumulator acc;
        for (int j = 0; j < n_samples; ++j) {
            auto rng = make_fast_rng(888, static_cast<std::uint64_t>(j));
            std::uniform_real_distribution<double> unif(0.0, 2.0 * kPi);
            const double phi = unif(rng);
            acc.add(wiener::string_A(disc, phi, disc.sample_path(static_cast<std::uint64_t>(j)), L));
        }
        REQUIRE_OR_FAIL(std::abs(acc.mean() - 2.0 * L / kPi) <= 3.0 * acc.se(),
                        "L=" << L << ": mean " << acc.mean() << " vs " << 2.0 * L / kPi << " +- " << acc.se());
    }
    return fail.failed ? fail.msg.str() : "";
}

// --- criterion 5: Example A decay -----------------------------------------------

std::string criterion_5() {
    Failure fail;
    trials::TrialSystemA sys;
    sys.psi = expr_map({"sin(3.14159265358979323846*x)"}, {"x"});
    const trials::CorrelationSpec kernels[] = {
        trials::CorrelationSpec{trials::AllOnesCorrelation{}},
        trials::CorrelationSpec{trials::StationaryKernelCorrelation{[](int k) { return std::pow(0.5, std::abs(k)); }}},
    };
    int ki = 0;
    for (const auto& corr : kernels) {
        sys.correlation = corr;
        double previous = 1e300;
        for (int N : {100, 1000, 10000}) {
            Accumulator acc;
            for (int rep = 0; rep < 200; ++rep)
                acc.add(trials::example_a_mean_gamma(sys, N, 5000 + static_cast<std::uint64_t>(ki), static_cast<std::uint64_t>(rep)));
            REQUIRE_OR_FAIL(acc.mean() < previous, "kernel " << ki << ": mean at N=" << N << " did not decrease");
            previous = acc.mean();
            if (N == 10000)
                REQUIRE_OR_FAIL(acc.mean() < 1e-2, "kernel " << ki << ": mean " << acc.mean() << " >= 1e-2 at N=1e4");
        }
        ++ki;
    }
    return fail.failed ? fail.msg.str() : "";
}

// --- criterion 6: Example B permanence -------------------------------------------

std::string criterion_6() {
    Failure fail;
    trials::TrialSystemB sys;
    sys.rho = trials::standard_normal_dist();
    sys.f = [](double x) { return std::cos(x); };
    sys.g = [](double) { return 1.0; };
    const auto h = expr_map({"sin(x)"}, {"x"});
    const double limit = std::pow((1.0 + std::exp(-2.0)) / 2.0, 2);

    Accumulator acc;
    for (int rep = 0; rep < 200; ++rep) acc.add(trials::example_b_mean_gamma(sys, h, 10000, 6001, static_cast<std::uint64_t>(rep)));
    // the O(1/N) mean bias of Gamma[u_N] is far below the 3 se band at N=1e4
    REQUIRE_OR_FAIL(std::abs(acc.mean() - limit) <= 3.0 * acc.se() + 1.0 / 10000.0,
                    "Gamma[u_N] " << acc.mean() << " vs limit " << limit << " +- " << acc.se());

    const auto witness = trials::nonclosability_witness(sys, h, 1e-3, 10000000, 6002);
    REQUIRE_OR_FAIL(witness.possible, "witness not produced: " << witness.message);
    REQUIRE_OR_FAIL(witness.l2_distance < 1e-3, "witness l2 distance " << witness.l2_distance);
    REQUIRE_OR_FAIL(witness.gamma_at_N > 0.9 * witness.limit,
                    "witness gamma " << witness.gamma_at_N << " below 0.9 * " << witness.limit);
    REQUIRE_OR_FAIL(witness.closure.non_closable(), "closure diagnosis: " << witness.closure.message);
    return fail.failed ? fail.msg.str() : "";
}

// --- criterion 7: Example C reproduction ------------------------------------------

std::string criterion_7() {
    Failure fail;
    for (const auto variant : {trials::VariantC::Indicator, trials::VariantC::PhiWeighted}) {
        const int vi = variant == trials::VariantC::Indicator ? 1 : 2;
        const trials::TrialSystemC sys = trials::make_variant_c(variant, 1.0, 256);
        McConfig mc;
        mc.seed = 7000 + static_cast<std::uint64_t>(vi);
        mc.n_samples = 1000;
        const trials::CEstimate est = trials::example_c_mean_gamma(sys, 200, mc);
        const trials::LimitCResult lim = trials::limit_c_quadrature(variant, 1.0, est.gamma_limit.mean);
        REQUIRE_OR_FAIL(std::abs(est.gamma_limit.mean - lim.value) <= 3.0 * est.gamma_limit.se + 2e-4,
                        "variant " << vi << ": MC " << est.gamma_limit.mean << " +- " << est.gamma_limit.se
                                   << " vs quadrature (" << lim.selected << ") " << lim.value);
        REQUIRE_OR_FAIL(std::abs(lim.atom - lim.phi_gradient_term * lim.phi_gradient_term) <= 1e-10,
                        "variant " << vi << ": atom " << lim.atom << " vs phi-gradient term squared");
    }
    // structural identity on the sampled side: the angle derivative is the
    // t = 0 value of the Wiener gradient, trial by trial
    const wiener::WienerDiscretization disc(256, 256, 7);
    for (int j = 0; j < 200; ++j) {
        auto rng = make_fast_rng(7100, static_cast<std::uint64_t>(j));
        std::uniform_real_distribution<double> unif(0.0, 2.0 * kPi);
        const auto g = wiener::grad_string_A(disc, unif(rng), disc.sample_path(static_cast<std::uint64_t>(j)), 1.0);
        REQUIRE_OR_FAIL(std::abs(g.d_phi - g.d_nodes[0]) <= 1e-10, "sampled gradient identity violated");
        if (fail.failed) break;
    }
    return fail.failed ? fail.msg.str() : "";
}

// --- criterion 8: Fisher loop -------------------------------------------------------

std::string criterion_8() {
    Failure fail;
    const auto model = fisher::make_gaussian_location(2.0);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, 1.0);
    const Eigen::MatrixXd j = fisher::fisher_information(model, x0, fisher::InfoMethod::Analytic);
    REQUIRE_OR_FAIL(std::abs(j(0, 0) - 0.25) <= 1e-12, "J " << j(0, 0) << " != 1/4");
    const auto p = fisher::precision_at(model, x0, fisher::InfoMethod::Analytic);
    REQUIRE_OR_FAIL(std::abs(p.A(0, 0) - 4.0) <= 1e-12, "A " << p.A(0, 0) << " != 4");

    McConfig mc;
    mc.seed = 8001;
    mc.n_samples = 4000;
    const fisher::Estimator mean_est = [](const Eigen::MatrixXd& obs) {
        return Eigen::VectorXd::Constant(1, obs.col(0).mean()).eval();
    };
    const auto cr = fisher::cramer_rao_check(model, Eigen::VectorXd::Zero(1), mean_est, 100, mc);
    REQUIRE_OR_FAIL(cr.pass, "sample-mean Cramer-Rao check failed: gap " << cr.min_eigenvalue_gap << " tol " << cr.tolerance);
    REQUIRE_OR_FAIL(std::abs(cr.covariance(0, 0) - 0.04) < 0.01, "sample-mean covariance " << cr.covariance(0, 0));

    const auto psi = expr_map({"x^3+x"}, {"x"});
    const auto rep = fisher::reparametrize_consistency(model, psi, x0, 200000, 8002);
    REQUIRE_OR_FAIL(std::abs(rep.chain(0, 0) - 64.0) <= 1e-10, "chain value " << rep.chain(0, 0) << " != 64");
    REQUIRE_OR_FAIL(rep.pass, "triple agreement failed: rederived " << rep.rederived(0, 0) << " (+- " << rep.rederived_se
                                                                    << "), image " << rep.image(0, 0) << " (+- "
                                                                    << rep.image_se << ")");
    return fail.failed ? fail.msg.str() : "";
}

// --- criterion 9: Hamza checker -------------------------------------------------------

std::string criterion_9() {
    Failure fail;
    const auto a_one = [](double) { return 1.0; };
    REQUIRE_OR_FAIL(structures::hamza_closable_1d(structures::gaussian_density_measure(), a_one).closable,
                    "N(0,1) with a=1 must be closable");
    structures::Measure1D atom_mix;
    atom_mix.atoms = {{0.0, 0.5}};
    atom_mix.density.lo = 0.0;
    atom_mix.density.hi = 1.0;
    atom_mix.density.values.assign(1 << 14, 0.5);
    REQUIRE_OR_FAIL(!structures::hamza_closable_1d(atom_mix, a_one).closable,
                    "atom at 0 with a=1 must not be closable");
    REQUIRE_OR_FAIL(structures::hamza_closable_1d(atom_mix, [](double x) { return x > 0.5 ? 1.0 : 0.0; }).closable,
                    "atom outside {a>0} must be closable");
    return fail.failed ? fail.msg.str() : "";
}

// --- criterion 10: property batch -----------------------------------------------------

std::string criterion_10() {
    Failure fail;
    std::mt19937_64 rng(1010);
    std::normal_distribution<double> normal;

    // Gamma positivity / bilinearity / symmetry
    {
        Eigen::MatrixXd g(2, 2);
        g << 1.1, 0.4, 0.4, 0.8;
        const ErroredVector x = make_errored(vec2(0.2, -0.5), g);
        const auto F = expr_map({"sin(v1)*v2"}, {"v1", "v2"});
        const auto G = expr_map({"v1+exp(v2/3)"}, {"v1", "v2"});
        const auto H = expr_map({"v1*v1-v2"}, {"v1", "v2"});
        REQUIRE_OR_FAIL(gamma_bilinear(F, F, x) >= 0.0, "gamma positivity");
        REQUIRE_OR_FAIL(std::abs(gamma_bilinear(F, G, x) - gamma_bilinear(G, F, x)) < 1e-14, "gamma symmetry");
        for (int trial = 0; trial < 20; ++trial) {
            const double a = normal(rng), b = normal(rng);
            DifferentiableMap combo;
            combo.d_in = 2;
            combo.d_out = 1;
            combo.eval = [&F, &H, a, b](const Eigen::VectorXd& p) { return (a * F.eval(p) + b * H.eval(p)).eval(); };
            combo.jacobian = [&F, &H, a, b](const Eigen::VectorXd& p) {
                return (a * F.jacobian(p) + b * H.jacobian(p)).eval();
            };
            const double lhs = gamma_bilinear(combo, G, x);
            const double rhs = a * gamma_bilinear(F, G, x) + b * gamma_bilinear(H, G, x);
            REQUIRE_OR_FAIL(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)), "gamma bilinearity");
        }
    }

    // axiom 4: constants carry no error, on every structure kind
    {
        using namespace structures;
        const auto zoo = {
            ou_1d(),
            lebesgue_field({{{0.0, 1.0}}}, [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(1, 1); }),
            product_structure_countable(ou_1d()),
        };
        for (const auto& S : zoo)
            for (int j = 0; j < 50; ++j)
                REQUIRE_OR_FAIL(S.gamma(constant_functional(4.2), S.sample(2, static_cast<std::uint64_t>(j))) == 0.0,
                                "axiom 4 violated");
    }

    // contraction bound soundness
    {
        const auto sinm = expr_map({"sin(v1)"}, {"v1"});
        for (double point = -3.0; point <= 3.0; point += 0.1) {
            const ErroredVector x = make_errored(Eigen::VectorXd::Constant(1, point), Eigen::MatrixXd::Constant(1, 1, 0.8));
            const double gs[] = {0.8};
            REQUIRE_OR_FAIL(contraction_bound(gs) >= gamma_bilinear(sinm, sinm, x) - 1e-12, "contraction bound");
        }
        // d = 2, F 1-Lipschitz in l1: |sin| + |cos| combination via min/max
        const auto F2 = expr_map({"min(v1,v2)+max(v1,-v2)"}, {"v1", "v2"});
        Eigen::MatrixXd g(2, 2);
        g << 0.5, 0.1, 0.1, 0.9;
        for (int trial = 0; trial < 200; ++trial) {
            const ErroredVector x = make_errored(vec2(normal(rng), normal(rng)), g);
            double gamma_f2 = 0.0;
            try {
                gamma_f2 = gamma_bilinear(F2, F2, x);
            } catch (const DomainError&) {
                continue; // tie point
            }
            const double gs[] = {g(0, 0), g(1, 1)};
            REQUIRE_OR_FAIL(contraction_bound(gs) >= gamma_f2 - 1e-12, "contraction bound d=2");
        }
    }

    // parser fuzz: parse or positioned error, never a crash
    {
        std::mt19937_64 fuzz_rng(4242);
        std::uniform_int_distribution<int> len_dist(0, 60);
        std::uniform_int_distribution<int> byte_dist(0, 255);
        const std::vector<std::string> names{"x", "y"};
        for (int trial = 0; trial < 10000; ++trial) {
            std::string text;
            const int len = len_dist(fuzz_rng);
            for (int i = 0; i < len; ++i) text.push_back(static_cast<char>(byte_dist(fuzz_rng)));
            try {
                const auto ast = expr::parse(text, names);
                (void)expr::to_string(ast);
            } catch (const expr::ParseError& e) {
                REQUIRE_OR_FAIL(e.offset <= text.size(), "fuzz error offset out of range");
            }
        }
    }

    // autodiff against finite differences, < 1e-6 relative
    {
        const std::vector<std::string> ns{"x", "y"};
        const char* corpus[] = {"x*y", "sin(x)+x*y^2", "exp(x*y)", "atan(x)/(1+y^2)", "x^3-2*x*y+y^2",
                                "cos(x*y)+pow(1+x*x,2)", "log(3+x)+sqrt(4+y)", "1/(2+sin(x))"};
        std::mt19937_64 pts(555);
        std::uniform_real_distribution<double> unif(-1.5, 1.5);
        for (const char* text : corpus) {
            const auto ast = expr::parse(text, ns);
            for (int trial = 0; trial < 100; ++trial) {
                const Eigen::VectorXd x = vec2(unif(pts), unif(pts));
                const auto d = expr::differentiate(ast, x);
                const auto f = [&](const Eigen::VectorXd& p) { return expr::evaluate(ast, p); };
                const Eigen::VectorXd g = testsupport::fd_gradient(f, x, 1e-5);
                const Eigen::MatrixXd h = testsupport::fd_hessian(f, x, 1e-4);
                REQUIRE_OR_FAIL((d.gradient - g).norm() <= 1e-6 * std::max(1.0, g.norm()),
                                "autodiff gradient vs FD: " << text);
                REQUIRE_OR_FAIL((d.hessian - h).norm() <= 1e-6 * std::max(1.0, h.norm()),
                                "autodiff hessian vs FD: " << text);
                if (fail.failed) break;
            }
            if (fail.failed) break;
        }
    }

    // determinism: identical RunConfig -> byte-identical CLI output
    if (!g_cli.empty()) {
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() / "gamma_calc_acceptance";
        fs::create_directories(dir);
        const auto slurp = [](const fs::path& p) {
            std::ifstream in(p, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        };
        const fs::path a = dir / "det_a.csv", b = dir / "det_b.csv";
        const std::string base = g_cli + " --seed 31415 --out ";
        const std::string args = " demo-b --N 500 --replicas 40";
        REQUIRE_OR_FAIL(std::system((base + a.string() + args).c_str()) == 0, "CLI run 1 failed");
        REQUIRE_OR_FAIL(std::system((base + b.string() + args).c_str()) == 0, "CLI run 2 failed");
        REQUIRE_OR_FAIL(!slurp(a).empty() && slurp(a) == slurp(b), "CLI outputs not byte-identical");
    } else {
        REQUIRE_OR_FAIL(false, "gamma-calc path not supplied for the determinism check");
    }

    return fail.failed ? fail.msg.str() : "";
}

struct Criterion {
    int id;
    const char* name;
    std::function<std::string()> run;
    double budget_seconds;
};

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli = argv[1];
    const std::vector<Criterion> criteria = {
        {1, "coherence round-trip, naive incoherence witness", criterion_1, 1.0},
        {2, "small-noise Monte Carlo oracle (5 fixtures, 1e6 samples)", criterion_2, 30.0},
        {3, "Ito isometry / OU structure at n_steps=1024", criterion_3, 20.0},
        {4, "string length statistic: E A = 2L/pi", criterion_4, 60.0},
        {5, "example A: vanishing mean error for both kernels", criterion_5, 60.0},
        {6, "example B: error permanency and non-closability witness", criterion_6, 60.0},
        {7, "example C: asymptotic error vs quadrature, both specs", criterion_7, 600.0},
        {8, "Fisher loop: information, Cramer-Rao, reparametrization", criterion_8, 60.0},
        {9, "Hamza closability fixtures", criterion_9, 1.0},
        {10, "property batch: gamma laws, contraction, fuzz, autodiff, determinism", criterion_10, 300.0},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        try {
            detail = c.run();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (detail.empty() && elapsed > c.budget_seconds) {
            std::ostringstream over;
            over << "runtime " << elapsed << "s exceeded budget " << c.budget_seconds << "s";
            detail = over.str();
        }
        if (detail.empty()) {
            std::printf("PASS criterion %2d (%6.2fs): %s\n", c.id, elapsed, c.name);
        } else {
            std::printf("FAIL criterion %2d (%6.2fs): %s -- %s\n", c.id, elapsed, c.name, detail.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
