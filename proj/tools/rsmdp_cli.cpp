// Command-line surface for the risk-sensitive MDP solver: model
// generation, solving (exact and approximate), brute-force cross-checks,
// policy evaluation, and manifest-driven re-runs.
//
// Exit codes: 0 success, 2 input error, 3 non-convergence, 4 size cap.

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rsmdp/approx_mpi.hpp"
#include "rsmdp/errors.hpp"
#include "rsmdp/model.hpp"
#include "rsmdp/model_io.hpp"
#include "rsmdp/mpi.hpp"
#include "rsmdp/oracles.hpp"
#include "rsmdp/trace_io.hpp"
#include "rsmdp/transform.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";

using nlohmann::json;

std::string timestamp_utc() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string(buf);
}

void write_manifest(const std::string& command, const std::string& model_path,
                    const json& params, const json& config, std::uint64_t seed,
                    const json& outputs, const std::string& path) {
    json manifest;
    manifest["command"] = command;
    manifest["model_path"] = model_path;
    manifest["params"] = params;
    manifest["config"] = config;
    manifest["seed"] = seed;
    manifest["tool_version"] = kToolVersion;
    manifest["timestamp"] = timestamp_utc();
    manifest["outputs"] = outputs;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << manifest.dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing " + path);
}

struct GenerateArgs {
    std::uint64_t seed = 0;
    int n_states = 0;
    int n_actions = 0;
    double cost_lo = 0.0;
    double cost_hi = 1.0;
    std::string out;
    std::string manifest;
};

struct SolveArgs {
    std::string model_path;
    double alpha = 1.0;
    double kappa = 0.5;
    int m = 5;
    double tol = 1e-10;
    int max_outer = 10000;
    std::string trace_out = "trace.csv";
    std::string mode = "exact";
    double epsilon = 1.0;
    double delta1 = 1.0;
    double delta2 = 1.0;
    std::uint64_t seed = 0;
    int n_window = 1;
    bool diagnostics = false;
    std::string manifest;
};

struct BruteArgs {
    std::string model_path;
    double alpha = 1.0;
    double kappa = 0.5;
    std::string manifest;
};

struct EvalArgs {
    std::string model_path;
    double alpha = 1.0;
    double kappa = 0.5;
    std::string policy;
    std::string manifest;
};

int run_generate(const GenerateArgs& a) {
    if (a.n_states < 1 || a.n_actions < 1)
        throw std::invalid_argument("n-states and n-actions must be positive");
    rsmdp::MdpModel model =
        rsmdp::generate_random(a.seed, a.n_states, a.n_actions, a.cost_lo, a.cost_hi);
    rsmdp::save_model(model, a.out);

    std::string manifest = a.manifest.empty() ? a.out + ".manifest.json" : a.manifest;
    json config_snapshot = {{"n_states", a.n_states},
                            {"n_actions", a.n_actions},
                            {"cost_lo", a.cost_lo},
                            {"cost_hi", a.cost_hi},
                            {"out", a.out},
                            {"manifest", manifest}};
    write_manifest("generate", a.out, json::object(), config_snapshot, a.seed,
                   {{"model", a.out}}, manifest);
    std::cout << "model written to " << a.out << "\n";
    return 0;
}

int run_solve(const SolveArgs& a) {
    rsmdp::MdpModel model = rsmdp::load_model(a.model_path);
    rsmdp::require_valid(model);
    rsmdp::RiskParams params{a.alpha, a.kappa};

    rsmdp::MpiConfig config;
    const int m = a.m;
    config.m_schedule = [m](int) { return m; };
    config.m_cap = m;
    config.tol = a.tol;
    config.max_outer = a.max_outer;
    config.diagnostics = a.diagnostics;

    rsmdp::MpiTrace trace;
    if (a.mode == "exact") {
        trace = rsmdp::run_mpi(rsmdp::transform(model, params), config,
                               rsmdp::PositiveValueVector::uniform(model.n_states));
    } else if (a.mode == "approx") {
        rsmdp::ApproxConfig approx;
        approx.epsilon = a.epsilon;
        approx.delta1 = a.delta1;
        approx.delta2 = a.delta2;
        approx.rng_seed = a.seed;
        approx.n_window = a.n_window;
        trace = rsmdp::run_approx_mpi(rsmdp::transform(model, params), config, approx,
                                      rsmdp::PositiveValueVector::uniform(model.n_states));
    } else {
        throw std::invalid_argument("mode must be exact or approx");
    }

    rsmdp::write_trace_csv(trace, a.trace_out);
    std::string manifest = a.manifest.empty() ? a.trace_out + ".manifest.json" : a.manifest;
    json config_snapshot = {{"m", a.m},
                            {"tol", a.tol},
                            {"max_outer", a.max_outer},
                            {"trace_out", a.trace_out},
                            {"mode", a.mode},
                            {"epsilon", a.epsilon},
                            {"delta1", a.delta1},
                            {"delta2", a.delta2},
                            {"n_window", a.n_window},
                            {"diagnostics", a.diagnostics},
                            {"manifest", manifest}};
    write_manifest("solve", a.model_path, {{"alpha", a.alpha}, {"kappa", a.kappa}},
                   config_snapshot, a.seed, {{"trace", a.trace_out}}, manifest);

    const auto& last = trace.records.back();
    double half_width = 0.5 * (last.upper - last.lower);
    std::cout << "policy " << rsmdp::policy_to_string(trace.final_policy) << "\n"
              << "lambda_tilde_star " << rsmdp::format_double(trace.final_lambda_tilde)
              << "\n"
              << "enclosure_half_width " << rsmdp::format_double(half_width) << "\n"
              << "lambda_star "
              << rsmdp::format_double(rsmdp::invert_cost(trace.final_lambda_tilde, a.kappa))
              << "\n"
              << "iterations " << trace.records.size() << "\n"
              << "converged " << (trace.converged ? "true" : "false") << "\n"
              << "trace written to " << a.trace_out << "\n";
    return trace.converged ? 0 : 3;
}

int run_brute(const BruteArgs& a) {
    rsmdp::MdpModel model = rsmdp::load_model(a.model_path);
    rsmdp::require_valid(model);
    rsmdp::TransformedMdp tmdp = rsmdp::transform(model, {a.alpha, a.kappa});
    rsmdp::BruteForceResult result = rsmdp::brute_force_optimal(tmdp);

    std::string manifest = a.manifest.empty() ? "brute.manifest.json" : a.manifest;
    write_manifest("brute", a.model_path, {{"alpha", a.alpha}, {"kappa", a.kappa}},
                   {{"manifest", manifest}}, 0, json::object(), manifest);

    for (const auto& [policy, lambda] : result.per_policy)
        std::cout << rsmdp::policy_to_string(policy) << " "
                  << rsmdp::format_double(lambda) << "\n";
    std::cout << "optimal_lambda_tilde "
              << rsmdp::format_double(result.optimal_lambda_tilde) << "\n"
              << "optimal_policies";
    for (const auto& policy : result.optimal_policies)
        std::cout << " " << rsmdp::policy_to_string(policy);
    std::cout << "\n";
    return 0;
}

int run_eval(const EvalArgs& a) {
    rsmdp::MdpModel model = rsmdp::load_model(a.model_path);
    rsmdp::require_valid(model);
    rsmdp::DeterministicPolicy policy = rsmdp::policy_from_string(a.policy);
    rsmdp::require_valid_policy(model, policy);
    rsmdp::TransformedMdp tmdp = rsmdp::transform(model, {a.alpha, a.kappa});
    rsmdp::PolicyEvaluation eval = rsmdp::evaluate_policy(tmdp, policy);

    std::string manifest = a.manifest.empty() ? "eval.manifest.json" : a.manifest;
    write_manifest("eval", a.model_path, {{"alpha", a.alpha}, {"kappa", a.kappa}},
                   {{"policy", a.policy}, {"manifest", manifest}}, 0, json::object(),
                   manifest);

    std::cout << "lambda_tilde " << rsmdp::format_double(eval.lambda_tilde) << "\n"
              << "lambda "
              << rsmdp::format_double(rsmdp::invert_cost(eval.lambda_tilde, a.kappa))
              << "\n"
              << "value";
    for (double x : eval.value.entries) std::cout << " " << rsmdp::format_double(x);
    std::cout << "\n"
              << "residual " << rsmdp::format_double(eval.residual) << "\n"
              << "iterations " << eval.iterations << "\n";
    return 0;
}

int run_rerun(const std::string& manifest_path) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + manifest_path);
    json manifest = json::parse(in);
    const std::string command = manifest.at("command").get<std::string>();
    const json& params = manifest.at("params");
    const json& config = manifest.at("config");

    if (command == "generate") {
        GenerateArgs a;
        a.seed = manifest.at("seed").get<std::uint64_t>();
        a.n_states = config.at("n_states").get<int>();
        a.n_actions = config.at("n_actions").get<int>();
        a.cost_lo = config.at("cost_lo").get<double>();
        a.cost_hi = config.at("cost_hi").get<double>();
        a.out = config.at("out").get<std::string>();
        a.manifest = config.at("manifest").get<std::string>();
        return run_generate(a);
    }
    if (command == "solve") {
        SolveArgs a;
        a.model_path = manifest.at("model_path").get<std::string>();
        a.alpha = params.at("alpha").get<double>();
        a.kappa = params.at("kappa").get<double>();
        a.m = config.at("m").get<int>();
        a.tol = config.at("tol").get<double>();
        a.max_outer = config.at("max_outer").get<int>();
        a.trace_out = config.at("trace_out").get<std::string>();
        a.mode = config.at("mode").get<std::string>();
        a.epsilon = config.at("epsilon").get<double>();
        a.delta1 = config.at("delta1").get<double>();
        a.delta2 = config.at("delta2").get<double>();
        a.seed = manifest.at("seed").get<std::uint64_t>();
        a.n_window = config.at("n_window").get<int>();
        a.diagnostics = config.at("diagnostics").get<bool>();
        a.manifest = config.at("manifest").get<std::string>();
        return run_solve(a);
    }
    if (command == "brute") {
        BruteArgs a;
        a.model_path = manifest.at("model_path").get<std::string>();
        a.alpha = params.at("alpha").get<double>();
        a.kappa = params.at("kappa").get<double>();
        a.manifest = config.at("manifest").get<std::string>();
        return run_brute(a);
    }
    if (command == "eval") {
        EvalArgs a;
        a.model_path = manifest.at("model_path").get<std::string>();
        a.alpha = params.at("alpha").get<double>();
        a.kappa = params.at("kappa").get<double>();
        a.policy = config.at("policy").get<std::string>();
        a.manifest = config.at("manifest").get<std::string>();
        return run_eval(a);
    }
    throw std::invalid_argument("unknown command in manifest: " + command);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Risk-sensitive MDP solver (exponential cost, modified policy iteration)"};
    app.require_subcommand(1);

    GenerateArgs gen;
    CLI::App* cmd_generate =
        app.add_subcommand("generate", "Write a seeded random model to a JSON file");
    cmd_generate->add_option("--seed", gen.seed, "RNG seed");
    cmd_generate->add_option("--n-states", gen.n_states, "number of states")->required();
    cmd_generate->add_option("--n-actions", gen.n_actions, "number of actions")->required();
    cmd_generate->add_option("--cost-lo", gen.cost_lo, "cost lower bound");
    cmd_generate->add_option("--cost-hi", gen.cost_hi, "cost upper bound");
    cmd_generate->add_option("--out", gen.out, "output model path")->required();
    cmd_generate->add_option("--manifest", gen.manifest, "manifest path");

    SolveArgs sol;
    CLI::App* cmd_solve =
        app.add_subcommand("solve", "Solve a model with modified policy iteration");
    cmd_solve->add_option("--model", sol.model_path, "model JSON path")->required();
    cmd_solve->add_option("--alpha", sol.alpha, "risk factor")->required();
    cmd_solve->add_option("--kappa", sol.kappa, "transformation constant in (0,1)");
    cmd_solve->add_option("--m", sol.m, "evaluation depth per iteration");
    cmd_solve->add_option("--tol", sol.tol, "stop when u - l <= tol");
    cmd_solve->add_option("--max-outer", sol.max_outer, "outer iteration cap");
    cmd_solve->add_option("--trace-out", sol.trace_out, "CSV trace path");
    cmd_solve->add_option("--mode", sol.mode, "exact or approx")
        ->check(CLI::IsMember({"exact", "approx"}));
    cmd_solve->add_option("--epsilon", sol.epsilon, "improvement slack (approx)");
    cmd_solve->add_option("--delta1", sol.delta1, "evaluation ratio floor (approx)");
    cmd_solve->add_option("--delta2", sol.delta2, "evaluation ratio ceiling (approx)");
    cmd_solve->add_option("--seed", sol.seed, "perturbation seed (approx)");
    cmd_solve->add_option("--n-window", sol.n_window, "bound window length (approx)");
    cmd_solve->add_flag("--diagnostics", sol.diagnostics,
                        "evaluate each iteration's policy (slow)");
    cmd_solve->add_option("--manifest", sol.manifest, "manifest path");

    BruteArgs bru;
    CLI::App* cmd_brute =
        app.add_subcommand("brute", "Evaluate every deterministic policy");
    cmd_brute->add_option("--model", bru.model_path, "model JSON path")->required();
    cmd_brute->add_option("--alpha", bru.alpha, "risk factor")->required();
    cmd_brute->add_option("--kappa", bru.kappa, "transformation constant in (0,1)");
    cmd_brute->add_option("--manifest", bru.manifest, "manifest path");

    EvalArgs eva;
    CLI::App* cmd_eval = app.add_subcommand("eval", "Evaluate one fixed policy");
    cmd_eval->add_option("--model", eva.model_path, "model JSON path")->required();
    cmd_eval->add_option("--alpha", eva.alpha, "risk factor")->required();
    cmd_eval->add_option("--kappa", eva.kappa, "transformation constant in (0,1)");
    cmd_eval->add_option("--policy", eva.policy, "dash-joined action indices")->required();
    cmd_eval->add_option("--manifest", eva.manifest, "manifest path");

    std::string rerun_manifest;
    CLI::App* cmd_rerun =
        app.add_subcommand("rerun", "Re-execute a command from its manifest");
    cmd_rerun->add_option("manifest", rerun_manifest, "manifest JSON path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_generate->parsed()) return run_generate(gen);
        if (cmd_solve->parsed()) return run_solve(sol);
        if (cmd_brute->parsed()) return run_brute(bru);
        if (cmd_eval->parsed()) return run_eval(eva);
        if (cmd_rerun->parsed()) return run_rerun(rerun_manifest);
    } catch (const rsmdp::SizeCapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const rsmdp::NonConvergenceError& e) {
        std::cerr << "error: " << e.what() << " (residual " << e.residual() << ")\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
