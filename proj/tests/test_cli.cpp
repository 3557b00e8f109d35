#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string g_cli;
int g_counter = 0;

struct RunResult {
    int exit_code = -1;
    std::string output;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run(const std::string& args, const std::string& stdin_text = "") {
    const std::string dir = std::filesystem::temp_directory_path() / "gamma_calc_cli_test";
    std::filesystem::create_directories(dir);
    const std::string out = dir + "/out" + std::to_string(g_counter++) + ".txt";
    std::string cmd = g_cli + " " + args + " > " + out + " 2>&1";
    if (!stdin_text.empty()) {
        const std::string in = dir + "/in" + std::to_string(g_counter++) + ".json";
        std::ofstream f(in, std::ios::binary);
        f << stdin_text;
        f.close();
        cmd += " < " + in;
    }
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.output = slurp(out);
    return r;
}

const char* kFixture = R"({"value":[2,3],"variance":[[0.01,0],[0,0.04]],"bias":[0,0]})";

} // namespace

TEST_CASE("propagate: the product fixture gives variance 0.25 and a naive comparison") {
    const RunResult r = run("propagate --expr v1*v2 --in -", kFixture);
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("0.25") != std::string::npos);
    CHECK(r.output.find("naive_sigma") != std::string::npos);
}

TEST_CASE("propagate: identity expressions echo the input") {
    const RunResult r = run("--format json propagate --expr v1 --expr v2 --in -", kFixture);
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("\"value\"") != std::string::npos);
    CHECK(r.output.find("2.0") != std::string::npos);
    CHECK(r.output.find("0.01") != std::string::npos);
    CHECK(r.output.find("0.04") != std::string::npos);
}

TEST_CASE("propagate: malformed JSON exits 2 and leaves no partial output") {
    const std::string dir = std::filesystem::temp_directory_path() / "gamma_calc_cli_test";
    std::filesystem::create_directories(dir);
    const std::string target = dir + "/should_not_exist.csv";
    std::filesystem::remove(target);
    const RunResult r = run("--out " + target + " propagate --expr v1 --in -", "this is not json");
    CHECK(r.exit_code == 2);
    CHECK_FALSE(std::filesystem::exists(target));
}

TEST_CASE("propagate: unknown identifier exits 2 with a positioned message") {
    const RunResult r = run("propagate --expr v3 --in -", kFixture);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("byte") != std::string::npos);
}

TEST_CASE("determinism: identical configs produce byte-identical files") {
    const std::string dir = std::filesystem::temp_directory_path() / "gamma_calc_cli_test";
    std::filesystem::create_directories(dir);
    const std::string a = dir + "/det_a.csv";
    const std::string b = dir + "/det_b.csv";
    REQUIRE(run("--seed 99 --out " + a + " demo-b --N 200 --replicas 30").exit_code == 0);
    REQUIRE(run("--seed 99 --out " + b + " demo-b --N 200 --replicas 30").exit_code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(!slurp(a).empty());

    const std::string c = dir + "/det_c.csv";
    REQUIRE(run("--seed 100 --out " + c + " demo-b --N 200 --replicas 30").exit_code == 0);
    CHECK(slurp(a) != slurp(c));
}

TEST_CASE("demo-b header carries the seed and theory limit is the gaussian integral") {
    const RunResult r = run("--seed 5 demo-b --N 100 --replicas 20");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("seed=5") != std::string::npos);
    CHECK(r.output.find("0.32224") != std::string::npos); // ((1+e^-2)/2)^2 = 0.322246...
}

TEST_CASE("demo-a: last row mean decays toward zero") {
    const RunResult r = run("--seed 4 demo-a --N 100 10000 --replicas 60");
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.output);
    std::string line, last;
    double first_mean = -1.0;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'N') continue;
        if (first_mean < 0.0) {
            std::sscanf(line.c_str(), "%*d,%lf", &first_mean);
        }
        last = line;
    }
    double n = 0, mean = -1;
    std::sscanf(last.c_str(), "%lf,%lf", &n, &mean);
    CHECK(n == 10000);
    CHECK(mean < 1e-2);
    CHECK(mean < first_mean);
}

TEST_CASE("fisher subcommand prints J = 0.25 and A = 4 for sigma = 2") {
    const RunResult r = run("fisher --model gaussian-location --sigma 2");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("\"J\": 0.25") != std::string::npos);
    CHECK(r.output.find("\"A\": 4.0") != std::string::npos);
}

TEST_CASE("wiener-check reports the engine value 1/3 next to the MC estimate") {
    const RunResult r = run("--seed 7 wiener-check --paths 5000 --steps 256");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("0.333332") != std::string::npos);
}

TEST_CASE("closability subcommand classifies the fixtures") {
    const std::string dir = std::filesystem::temp_directory_path() / "gamma_calc_cli_test";
    std::filesystem::create_directories(dir);
    const std::string atoms = dir + "/atoms.json";
    {
        std::ofstream f(atoms);
        f << R"({"atoms":[[0.0,0.5]],"density_grid":{"lo":0,"hi":1,"values":[0.5,0.5]}})";
    }
    const RunResult not_closable = run("closability --measure " + atoms + " --a 1+0*x");
    REQUIRE(not_closable.exit_code == 0);
    CHECK(not_closable.output.find("\"closable\": false") != std::string::npos);

    const RunResult closable = run("closability --measure " + atoms + " --a 'max(0,x-0.5)'");
    REQUIRE(closable.exit_code == 0);
    CHECK(closable.output.find("\"closable\": true") != std::string::npos);

    const RunResult bad = run("closability --measure /nonexistent.json --a 1+0*x");
    CHECK(bad.exit_code == 2);
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli <path-to-gamma-calc>\n");
        return 1;
    }
    g_cli = argv[1];
    doctest::Context context;
    context.applyCommandLine(1, argv);
    return context.run();
}
