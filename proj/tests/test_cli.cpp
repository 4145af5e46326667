#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rsmdp/model_io.hpp"
#include "rsmdp/oracles.hpp"
#include "rsmdp/trace_io.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string output;  // stdout and stderr combined
};

// Runs the CLI with output captured to a file; popen would also work but
// gives no portable exit code split across shells.
RunResult run_cli(const std::string& args, const fs::path& dir) {
    static int counter = 0;
    fs::path log = dir / ("cli_out_" + std::to_string(counter++) + ".log");
    std::string cmd = std::string(RSMDP_CLI_BIN) + " " + args + " > " + log.string() +
                      " 2>&1";
    int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WEXITSTATUS(status);
    std::ifstream in(log);
    std::ostringstream buf;
    buf << in.rdbuf();
    result.output = buf.str();
    return result;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path fresh_dir(const char* name) {
    fs::path dir = fs::temp_directory_path() / "rsmdp_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("generate writes a model that parses back") {
    fs::path dir = fresh_dir("generate");
    fs::path model = dir / "model.json";
    RunResult r = run_cli("generate --seed 7 --n-states 3 --n-actions 2 --out " +
                              model.string(),
                          dir);
    CHECK(r.exit_code == 0);
    rsmdp::MdpModel m = rsmdp::load_model(model);
    CHECK(m.n_states == 3);
    CHECK(m.n_actions == 2);
    CHECK(fs::exists(dir / "model.json.manifest.json"));
}

TEST_CASE("generate rejects zero states with a usage error") {
    fs::path dir = fresh_dir("generate_bad");
    RunResult r = run_cli("generate --seed 1 --n-states 0 --n-actions 2 --out " +
                              (dir / "m.json").string(),
                          dir);
    CHECK(r.exit_code == 2);
}

TEST_CASE("generate is deterministic across invocations") {
    fs::path dir = fresh_dir("generate_det");
    fs::path a = dir / "a.json";
    fs::path b = dir / "b.json";
    CHECK(run_cli("generate --seed 9 --n-states 4 --n-actions 3 --out " + a.string(),
                  dir)
              .exit_code == 0);
    CHECK(run_cli("generate --seed 9 --n-states 4 --n-actions 3 --out " + b.string(),
                  dir)
              .exit_code == 0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("solve prints the optimum of a one-state model") {
    fs::path dir = fresh_dir("solve_one");
    fs::path model = dir / "m.json";
    REQUIRE(run_cli("generate --seed 3 --n-states 1 --n-actions 3 --out " +
                        model.string(),
                    dir)
                .exit_code == 0);
    RunResult r = run_cli("solve --model " + model.string() + " --alpha 2 --trace-out " +
                              (dir / "trace.csv").string(),
                          dir);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("policy ") != std::string::npos);
    CHECK(r.output.find("lambda_star ") != std::string::npos);
    CHECK(r.output.find("converged true") != std::string::npos);

    rsmdp::MdpModel m = rsmdp::load_model(model);
    double best = std::min({m.c(0, 0), m.c(0, 1), m.c(0, 2)});
    std::istringstream lines(r.output);
    std::string key;
    double lambda_star = 1e300;
    while (lines >> key)
        if (key == "lambda_star") lines >> lambda_star;
    CHECK(std::abs(lambda_star - 2.0 * best) <= 1e-10);
}

TEST_CASE("solve rejects a model with a broken row") {
    fs::path dir = fresh_dir("solve_bad");
    fs::path model = dir / "bad.json";
    std::ofstream(model) << R"({
        "n_states": 2, "n_actions": 1,
        "transition": [[[0.5, 0.4]], [[0.0, 1.0]]],
        "cost": [[0.1], [0.2]]
    })";
    RunResult r = run_cli("solve --model " + model.string() + " --alpha 1", dir);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("row sum") != std::string::npos);
}

TEST_CASE("solve writes the trace CSV with the documented header") {
    fs::path dir = fresh_dir("solve_trace");
    fs::path model = dir / "m.json";
    fs::path trace = dir / "trace.csv";
    REQUIRE(run_cli("generate --seed 4 --n-states 3 --n-actions 2 --out " +
                        model.string(),
                    dir)
                .exit_code == 0);
    REQUIRE(run_cli("solve --model " + model.string() + " --alpha 1 --trace-out " +
                        trace.string(),
                    dir)
                .exit_code == 0);
    std::string csv = slurp(trace);
    CHECK(csv.rfind("iter,u,l,u_minus_l,policy,lambda_tilde_policy,min_value_entry\n",
                    0) == 0);
}

TEST_CASE("solve matches brute force on a seeded model") {
    fs::path dir = fresh_dir("solve_vs_brute");
    fs::path model = dir / "m.json";
    REQUIRE(run_cli("generate --seed 11 --n-states 4 --n-actions 2 --out " +
                        model.string(),
                    dir)
                .exit_code == 0);
    RunResult solve = run_cli("solve --model " + model.string() + " --alpha 1 " +
                                  "--trace-out " + (dir / "t.csv").string(),
                              dir);
    REQUIRE(solve.exit_code == 0);
    std::string policy;
    {
        std::istringstream lines(solve.output);
        std::string key;
        while (lines >> key)
            if (key == "policy") {
                lines >> policy;
                break;
            }
    }

    RunResult brute = run_cli("brute --model " + model.string() + " --alpha 1 " +
                                  "--manifest " + (dir / "brute.manifest.json").string(),
                              dir);
    REQUIRE(brute.exit_code == 0);
    std::istringstream lines(brute.output);
    std::string line;
    std::string optimal_line;
    while (std::getline(lines, line))
        if (line.rfind("optimal_policies", 0) == 0) optimal_line = line;
    REQUIRE_FALSE(optimal_line.empty());
    CHECK(optimal_line.find(policy) != std::string::npos);
}

TEST_CASE("brute lists every policy of a tiny model") {
    fs::path dir = fresh_dir("brute_tiny");
    fs::path model = dir / "m.json";
    REQUIRE(run_cli("generate --seed 5 --n-states 1 --n-actions 2 --out " +
                        model.string(),
                    dir)
                .exit_code == 0);
    RunResult r = run_cli("brute --model " + model.string() + " --alpha 1 --manifest " +
                              (dir / "b.manifest.json").string(),
                          dir);
    CHECK(r.exit_code == 0);
    // Two policy lines plus the optimal summary lines.
    rsmdp::MdpModel m = rsmdp::load_model(model);
    int cheaper = m.c(0, 0) <= m.c(0, 1) ? 0 : 1;
    std::istringstream lines(r.output);
    std::string line;
    std::string optimal_line;
    int policy_lines = 0;
    while (std::getline(lines, line)) {
        if (line.rfind("optimal_policies", 0) == 0) optimal_line = line;
        else if (!line.empty() && (line[0] == '0' || line[0] == '1'))
            ++policy_lines;
    }
    CHECK(policy_lines == 2);
    CHECK(optimal_line == "optimal_policies " + std::to_string(cheaper));
}

TEST_CASE("brute reports the size cap with exit 4") {
    fs::path dir = fresh_dir("brute_cap");
    fs::path model = dir / "m.json";
    REQUIRE(run_cli("generate --seed 6 --n-states 21 --n-actions 2 --out " +
                        model.string(),
                    dir)
                .exit_code == 0);
    RunResult r = run_cli("brute --model " + model.string() + " --alpha 0.1", dir);
    CHECK(r.exit_code == 4);
}

TEST_CASE("eval rejects a malformed policy spec") {
    fs::path dir = fresh_dir("eval_bad");
    fs::path model = dir / "m.json";
    REQUIRE(run_cli("generate --seed 8 --n-states 3 --n-actions 2 --out " +
                        model.string(),
                    dir)
                .exit_code == 0);
    CHECK(run_cli("eval --model " + model.string() + " --alpha 1 --policy 0-x-1", dir)
              .exit_code == 2);
    CHECK(run_cli("eval --model " + model.string() + " --alpha 1 --policy 0-1", dir)
              .exit_code == 2);
}

TEST_CASE("eval of a constant-cost model returns the constant for any policy") {
    fs::path dir = fresh_dir("eval_const");
    fs::path model = dir / "m.json";
    rsmdp::MdpModel m = rsmdp::generate_random(10, 3, 2, 0.0, 1.0);
    for (double& c : m.cost) c = 0.35;
    rsmdp::save_model(m, model);
    RunResult r = run_cli("eval --model " + model.string() +
                              " --alpha 1 --kappa 0.5 --policy 1-0-1 --manifest " +
                              (dir / "e.manifest.json").string(),
                          dir);
    CHECK(r.exit_code == 0);
    std::istringstream lines(r.output);
    std::string key;
    double lambda = 1e300;
    while (lines >> key)
        if (key == "lambda") lines >> lambda;
    CHECK(std::abs(lambda - 0.35) <= 1e-9);
}

TEST_CASE("eval agrees with the finite-horizon growth rate") {
    fs::path dir = fresh_dir("eval_mgf");
    fs::path model_path = dir / "m.json";
    REQUIRE(run_cli("generate --seed 14 --n-states 4 --n-actions 2 --out " +
                        model_path.string(),
                    dir)
                .exit_code == 0);
    RunResult r = run_cli("eval --model " + model_path.string() +
                              " --alpha 1 --kappa 0.5 --policy 0-1-0-1 --manifest " +
                              (dir / "e.manifest.json").string(),
                          dir);
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.output);
    std::string key;
    double lambda = 1e300;
    while (lines >> key)
        if (key == "lambda") lines >> lambda;

    rsmdp::MdpModel model = rsmdp::load_model(model_path);
    rsmdp::DeterministicPolicy policy = rsmdp::policy_from_string("0-1-0-1");
    double horizon_rate = rsmdp::finite_horizon_log_mgf(model, policy, 1.0, 2000, 0);
    CHECK(std::abs(lambda - horizon_rate) <= 1e-3);
}

TEST_CASE("approx mode writes the extended trace and reduces at zero error") {
    fs::path dir = fresh_dir("solve_approx");
    fs::path model = dir / "m.json";
    fs::path trace = dir / "trace.csv";
    REQUIRE(run_cli("generate --seed 15 --n-states 3 --n-actions 2 --out " +
                        model.string(),
                    dir)
                .exit_code == 0);
    RunResult r = run_cli("solve --model " + model.string() +
                              " --alpha 1 --mode approx --epsilon 1 --delta1 1 " +
                              "--delta2 1 --seed 5 --trace-out " + trace.string(),
                          dir);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("converged true") != std::string::npos);
    std::string csv = slurp(trace);
    CHECK(csv.rfind("iter,u,l,u_minus_l,policy,lambda_tilde_policy,min_value_entry,"
                    "epsilon_ratio_max,eval_ratio_min,eval_ratio_max\n",
                    0) == 0);
}

TEST_CASE("rerun reproduces generate and solve outputs byte for byte") {
    fs::path dir = fresh_dir("rerun");
    fs::path model = dir / "m.json";
    fs::path trace = dir / "t.csv";
    REQUIRE(run_cli("generate --seed 12 --n-states 4 --n-actions 2 --out " +
                        model.string(),
                    dir)
                .exit_code == 0);
    REQUIRE(run_cli("solve --model " + model.string() + " --alpha 1 --trace-out " +
                        trace.string(),
                    dir)
                .exit_code == 0);
    std::string model_bytes = slurp(model);
    std::string trace_bytes = slurp(trace);

    fs::remove(model);
    REQUIRE(run_cli("rerun " + (model.string() + ".manifest.json"), dir).exit_code == 0);
    CHECK(slurp(model) == model_bytes);

    fs::remove(trace);
    REQUIRE(run_cli("rerun " + (trace.string() + ".manifest.json"), dir).exit_code == 0);
    CHECK(slurp(trace) == trace_bytes);
}
