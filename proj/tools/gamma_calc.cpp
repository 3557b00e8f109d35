// gamma-calc: batch front-end for the error-calculus library. Every stochastic
// subcommand takes an explicit seed and writes its outputs atomically, so a
// fixed configuration reproduces byte-identical files.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gammacalc/expr/ast.hpp"
#include "gammacalc/fisher/fisher.hpp"
#include "gammacalc/json_io.hpp"
#include "gammacalc/propagate.hpp"
#include "gammacalc/structures/json.hpp"
#include "gammacalc/trials/trials.hpp"
#include "gammacalc/wiener/wiener.hpp"

using namespace gammacalc;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Output {
    std::string path; // empty -> stdout
    void write(const std::string& content) const {
        if (path.empty()) {
            std::cout << content;
            return;
        }
        const std::string tmp = path + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw InputError("cannot open output file '" + tmp + "'");
            out << content;
        }
        std::filesystem::rename(tmp, path);
    }
};

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read input file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> default_names(int d) {
    std::vector<std::string> names;
    for (int i = 1; i <= d; ++i) names.push_back("v" + std::to_string(i));
    return names;
}

// deterministic quadrature of int h'(x) f(x) rho(x) dx for the demo-b theory column
double theory_b(const trials::TrialSystemB& sys, const DifferentiableMap& h) {
    const double lo = sys.rho.name == "uniform" ? 0.0 : -10.0;
    const double hi = sys.rho.name == "uniform" ? 1.0 : 10.0;
    const int n = 1 << 14;
    const double step = (hi - lo) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + i * step;
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        acc += w * step * h.jacobian(Eigen::VectorXd::Constant(1, x))(0, 0) * sys.f(x) * sys.rho.pdf(x);
    }
    return acc * acc;
}

int cmd_propagate(const std::vector<std::string>& exprs, const std::string& input, std::string names_csv,
                  const std::string& format, const Output& out) {
    const ErroredVector in = errored_from_json_text(read_input(input));
    std::vector<std::string> names;
    if (!names_csv.empty()) {
        std::stringstream ss(names_csv);
        std::string item;
        while (std::getline(ss, item, ',')) names.push_back(item);
    } else {
        names = default_names(in.dim());
    }
    if (static_cast<int>(names.size()) != in.dim()) throw InputError("--names does not match the input dimension");

    std::vector<expr::ExprAst> asts;
    for (const auto& e : exprs) asts.push_back(expr::parse(e, names));
    const DifferentiableMap F = map_from_expressions(asts);
    const ErroredVector result = gauss_propagate(F, in);

    Eigen::VectorXd sig_in(in.dim());
    for (int i = 0; i < in.dim(); ++i) sig_in[i] = std::sqrt(in.variance(i, i));
    const Eigen::VectorXd naive = naive_propagate(F, sig_in, in.value);

    if (format == "json") {
        json j = errored_to_json(result);
        json cmp;
        for (int k = 0; k < F.d_out; ++k) {
            cmp.push_back({{"expr", exprs[static_cast<std::size_t>(k)]},
                           {"gauss_sigma", std::sqrt(result.variance(k, k))},
                           {"naive_sigma", naive[k]}});
        }
        j["comparison"] = cmp;
        out.write(j.dump(2) + "\n");
    } else {
        std::ostringstream csv;
        csv << "expr,value,variance,bias,gauss_sigma,naive_sigma\n";
        for (int k = 0; k < F.d_out; ++k) {
            csv << exprs[static_cast<std::size_t>(k)] << ',' << fmt12(result.value[k]) << ','
                << fmt12(result.variance(k, k)) << ',' << fmt12(result.bias[k]) << ','
                << fmt12(std::sqrt(result.variance(k, k))) << ',' << fmt12(naive[k]) << '\n';
        }
        out.write(csv.str());
    }
    return kExitOk;
}

int cmd_demo_a(std::uint64_t seed, const std::vector<int>& ns, int replicas, const std::string& kernel, double ratio,
               const Output& out) {
    trials::TrialSystemA sys;
    sys.psi = map_from_expression(expr::parse("sin(3.14159265358979323846*x)", std::vector<std::string>{"x"}));
    if (kernel == "ones") {
        sys.correlation = trials::AllOnesCorrelation{};
    } else if (kernel == "geometric") {
        sys.correlation = trials::StationaryKernelCorrelation{[ratio](int k) { return std::pow(ratio, std::abs(k)); }};
    } else {
        throw InputError("unknown kernel '" + kernel + "' (expected ones or geometric)");
    }
    std::ostringstream csv;
    csv << "# gamma-calc demo-a seed=" << seed << " replicas=" << replicas << " kernel=" << kernel << "\n";
    csv << "N,gamma_mean,gamma_se,theory_limit\n";
    for (int n : ns) {
        Accumulator acc;
        for (int rep = 0; rep < replicas; ++rep)
            acc.add(trials::example_a_mean_gamma(sys, n, seed, static_cast<std::uint64_t>(rep)));
        csv << n << ',' << fmt12(acc.mean()) << ',' << fmt12(acc.se()) << ",0\n";
    }
    out.write(csv.str());
    return kExitOk;
}

int cmd_demo_b(std::uint64_t seed, const std::vector<int>& ns, int replicas, const std::string& h_text,
               const std::string& f_text, const std::string& g_text, const std::string& rho_name, const Output& out) {
    trials::TrialSystemB sys;
    if (rho_name == "normal") sys.rho = trials::standard_normal_dist();
    else if (rho_name == "uniform") sys.rho = trials::uniform01_dist();
    else throw InputError("unknown rho '" + rho_name + "' (expected normal or uniform)");

    const std::vector<std::string> var{"x"};
    const auto f_ast = expr::parse(f_text, var);
    const auto g_ast = expr::parse(g_text, var);
    sys.f = [f_ast](double x) { return expr::evaluate(f_ast, Eigen::VectorXd::Constant(1, x)); };
    sys.g = [g_ast](double x) { return expr::evaluate(g_ast, Eigen::VectorXd::Constant(1, x)); };
    const DifferentiableMap h = map_from_expression(expr::parse(h_text, var));

    const double theory = theory_b(sys, h);
    std::ostringstream csv;
    csv << "# gamma-calc demo-b seed=" << seed << " replicas=" << replicas << " h=" << h_text << " f=" << f_text
        << " g=" << g_text << " rho=" << rho_name << "\n";
    csv << "N,gamma_mean,gamma_se,theory_limit\n";
    for (int n : ns) {
        Accumulator acc;
        for (int rep = 0; rep < replicas; ++rep)
            acc.add(trials::example_b_mean_gamma(sys, h, n, seed, static_cast<std::uint64_t>(rep)));
        csv << n << ',' << fmt12(acc.mean()) << ',' << fmt12(acc.se()) << ',' << fmt12(theory) << '\n';
    }
    out.write(csv.str());
    return kExitOk;
}

int cmd_demo_c(std::uint64_t seed, const std::vector<int>& ns, int replicas, int variant, double L, int steps,
               const Output& out) {
    if (variant != 1 && variant != 2) throw InputError("--variant must be 1 or 2");
    const auto v = variant == 1 ? trials::VariantC::Indicator : trials::VariantC::PhiWeighted;
    const trials::TrialSystemC sys = trials::make_variant_c(v, L, steps);

    std::ostringstream csv;
    std::vector<std::string> rows;
    double last_limit_estimate = 0.0;
    for (int n : ns) {
        McConfig mc;
        mc.seed = seed;
        mc.n_samples = static_cast<std::size_t>(replicas);
        const trials::CEstimate est = trials::example_c_mean_gamma(sys, n, mc);
        last_limit_estimate = est.gamma_limit.mean;
        std::ostringstream row;
        row << n << ',' << fmt12(est.gamma_limit.mean) << ',' << fmt12(est.gamma_limit.se);
        rows.push_back(row.str());
    }
    const trials::LimitCResult lim = trials::limit_c_quadrature(v, L, last_limit_estimate);
    csv << "# gamma-calc demo-c seed=" << seed << " replicas=" << replicas << " variant=" << variant << " L=" << L
        << " steps=" << steps << "\n";
    csv << "# gamma_mean is the per-replica unbiased estimate of the N->infinity limit\n";
    csv << "# integrand reading: " << lim.selected << "\n";
    csv << "N,gamma_mean,gamma_se,theory_limit\n";
    for (const auto& row : rows) csv << row << ',' << fmt12(lim.value) << '\n';
    out.write(csv.str());
    return kExitOk;
}

int cmd_wiener_check(std::uint64_t seed, const std::string& f_text, int n_paths, int steps, const Output& out) {
    const wiener::WienerDiscretization disc(steps, steps, seed);
    const std::vector<std::string> var{"s"};
    const auto ast = expr::parse(f_text, var);
    const Eigen::VectorXd cells = disc.cells_of([&](double s) { return expr::evaluate(ast, Eigen::VectorXd::Constant(1, s)); });
    const std::vector<double> cv(cells.begin(), cells.end());
    const wiener::PathFunctional F = wiener::PathFunctional::integral(disc, cv);
    const double engine = wiener::gamma_ou(disc, F, disc.path_from_coords(Eigen::VectorXd::Zero(disc.n_basis())));

    Accumulator acc;
    for (int p = 0; p < n_paths; ++p) {
        const double v = F(0.0, disc.sample_path(seed, static_cast<std::uint64_t>(p)));
        acc.add(v * v);
    }
    const double mc_se = std::sqrt(2.0 / n_paths) * engine;
    std::ostringstream csv;
    csv << "# gamma-calc wiener-check seed=" << seed << " paths=" << n_paths << " steps=" << steps << " f=" << f_text
        << "\n";
    csv << "f,gamma_engine,mc_variance,mc_se,n_paths\n";
    csv << f_text << ',' << fmt12(engine) << ',' << fmt12(acc.mean()) << ',' << fmt12(mc_se) << ',' << n_paths << '\n';
    out.write(csv.str());
    return kExitOk;
}

int cmd_fisher(const std::string& model_name, double sigma, double x, const std::string& method, std::size_t n,
               std::uint64_t seed, const Output& out) {
    const fisher::FisherModel model = fisher::model_by_name(model_name, sigma);
    const auto info_method = method == "mc" ? fisher::InfoMethod::ScoreMc : fisher::InfoMethod::Analytic;
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, x);
    const Eigen::MatrixXd j = fisher::fisher_information(model, x0, info_method, n, seed);
    const fisher::PrecisionResult p = fisher::precision_at(model, x0, info_method, n, seed);
    json output;
    output["model"] = model_name;
    output["x"] = x;
    output["method"] = method;
    output["seed"] = seed;
    output["J"] = j(0, 0);
    output["A"] = p.A(0, 0);
    output["pseudo_inverse"] = p.pseudo_inverse;
    out.write(output.dump(2) + "\n");
    return kExitOk;
}

int cmd_closability(const std::string& measure_path, const std::string& a_text, const Output& out) {
    const json spec = json::parse(read_input(measure_path), nullptr, false);
    if (spec.is_discarded()) throw InputError("measure file is not valid JSON");
    const structures::Measure1D mu = structures::measure_from_json(spec);
    const auto ast = expr::parse(a_text, std::vector<std::string>{"x"});
    const auto result = structures::hamza_closable_1d(
        mu, [&](double x) { return expr::evaluate(ast, Eigen::VectorXd::Constant(1, x)); });
    json output;
    output["closable"] = result.closable;
    output["diagnostic"] = result.diagnostic;
    json atoms = json::array();
    for (const auto& [pos, w] : result.offending_atoms) atoms.push_back({{"x", pos}, {"weight", w}});
    output["offending_atoms"] = atoms;
    out.write(output.dump(2) + "\n");
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"error calculus toolkit: propagation, error structures, repeated trials, Fisher precision"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string out_path;
    std::string format = "csv";
    double tol_sym = -1.0, tol_psd = -1.0;
    app.add_option("--seed", seed, "master seed for stochastic subcommands");
    app.add_option("--out", out_path, "output file (default stdout); written atomically");
    app.add_option("--format", format, "csv|json where applicable")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--tol-sym", tol_sym, "override: max variance asymmetry");
    app.add_option("--tol-psd", tol_psd, "override: relative PSD eigenvalue floor");

    auto* propagate = app.add_subcommand("propagate", "propagate an errored vector through expressions");
    std::vector<std::string> exprs;
    std::string input = "-", names_csv;
    propagate->add_option("--expr", exprs, "output expression (repeatable)")->required();
    propagate->add_option("--in", input, "errored-vector JSON file, or - for stdin");
    propagate->add_option("--names", names_csv, "comma-separated input names (default v1,v2,...)");

    auto* demo_a = app.add_subcommand("demo-a", "repeated trials with correlated errors: vanishing mean error");
    std::vector<int> ns_a{100, 1000, 10000};
    int replicas_a = 200;
    std::string kernel = "ones";
    double ratio = 0.5;
    demo_a->add_option("--N", ns_a, "trial counts");
    demo_a->add_option("--replicas", replicas_a, "MC replicas per N");
    demo_a->add_option("--kernel", kernel, "ones|geometric");
    demo_a->add_option("--ratio", ratio, "geometric kernel ratio");

    auto* demo_b = app.add_subcommand("demo-b", "repeated trials with (f, g) errors: error permanency");
    std::vector<int> ns_b{100, 1000, 10000};
    int replicas_b = 200;
    std::string h_text = "sin(x)", f_text = "cos(x)", g_text = "1+0*x", rho_name = "normal";
    demo_b->add_option("--N", ns_b, "trial counts");
    demo_b->add_option("--replicas", replicas_b, "MC replicas per N");
    demo_b->add_option("--observable", h_text, "observable h");
    demo_b->add_option("--f", f_text, "correlated multiplier f");
    demo_b->add_option("--g", g_text, "uncorrelated weight g");
    demo_b->add_option("--rho", rho_name, "normal|uniform");

    auto* demo_c = app.add_subcommand("demo-c", "repeated string throws: asymptotic error vs quadrature");
    std::vector<int> ns_c{200};
    int replicas_c = 1000, variant = 1, steps_c = 256;
    double L = 1.0;
    demo_c->add_option("--N", ns_c, "trial counts");
    demo_c->add_option("--replicas", replicas_c, "MC replicas per N");
    demo_c->add_option("--variant", variant, "1 (indicator window) or 2 (phi-weighted)");
    demo_c->add_option("--L", L, "string length in (0, 1]");
    demo_c->add_option("--steps", steps_c, "time grid size (power of two)");

    auto* wiener_check = app.add_subcommand("wiener-check", "Gamma_OU of a Wiener integral vs MC variance");
    std::string f_check = "s";
    int n_paths = 100000, steps_w = 1024;
    wiener_check->add_option("--f", f_check, "integrand expression in s");
    wiener_check->add_option("--paths", n_paths, "MC paths");
    wiener_check->add_option("--steps", steps_w, "time grid size (power of two)");

    auto* fisher_cmd = app.add_subcommand("fisher", "Fisher information and the precision field");
    std::string model_name = "gaussian-location", method = "analytic";
    double sigma = 2.0, x0 = 0.0;
    std::size_t n_score = 100000;
    fisher_cmd->add_option("--model", model_name, "gaussian-location|bernoulli|exponential|flat");
    fisher_cmd->add_option("--sigma", sigma, "scale for gaussian-location");
    fisher_cmd->add_option("--x", x0, "evaluation point");
    fisher_cmd->add_option("--method", method, "analytic|mc")->check(CLI::IsMember({"analytic", "mc"}));
    fisher_cmd->add_option("--n", n_score, "score-MC sample size");

    auto* closability = app.add_subcommand("closability", "Hamza test for a 1-d measure and coefficient");
    std::string measure_path, a_text = "1+0*x";
    closability->add_option("--measure", measure_path, "measure JSON file")->required();
    closability->add_option("--a", a_text, "coefficient expression in x");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    if (tol_sym > 0.0) default_tolerances().symmetry = tol_sym;
    if (tol_psd > 0.0) default_tolerances().psd_floor_rel = tol_psd;
    const Output out{out_path};

    try {
        if (propagate->parsed()) return cmd_propagate(exprs, input, names_csv, format, out);
        if (demo_a->parsed()) return cmd_demo_a(seed, ns_a, replicas_a, kernel, ratio, out);
        if (demo_b->parsed()) return cmd_demo_b(seed, ns_b, replicas_b, h_text, f_text, g_text, rho_name, out);
        if (demo_c->parsed()) return cmd_demo_c(seed, ns_c, replicas_c, variant, L, steps_c, out);
        if (wiener_check->parsed()) return cmd_wiener_check(seed, f_check, n_paths, steps_w, out);
        if (fisher_cmd->parsed()) return cmd_fisher(model_name, sigma, x0, method, n_score, seed, out);
        if (closability->parsed()) return cmd_closability(measure_path, a_text, out);
    } catch (const expr::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const DimensionMismatch& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NotPositiveSemidefinite& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitInput;
}
