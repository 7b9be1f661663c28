#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "nepfw/experiment.hpp"
#include "nepfw/verification.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kAssertion = 1;
constexpr int kUsage = 2;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> max_iters;
    std::optional<int> replications;
    std::optional<int> threads;
};

int report(const std::vector<nepfw::CheckResult>& checks) {
    bool ok = true;
    std::size_t cases = 0;
    for (const auto& c : checks) {
        std::cout << (c.passed() ? "ok    " : "FAIL  ") << c.name << ": " << c.cases << " cases, " << c.failures
                  << " failures";
        if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
        std::cout << '\n';
        ok = ok && c.passed();
        cases += c.cases;
    }
    std::cout << checks.size() << " checks, " << cases << " cases: " << (ok ? "all passed" : "FAILED") << '\n';
    return ok ? kOk : kAssertion;
}

int cmd_run(const std::string& path, const Overrides& o) {
    nepfw::ExperimentConfig cfg = nepfw::load_config(path);
    if (o.seed) cfg.seed = *o.seed;
    if (o.out) cfg.output = *o.out;
    if (o.replications) cfg.replications = *o.replications;
    if (o.threads) cfg.threads = *o.threads;
    if (o.max_iters) {
        for (auto& s : cfg.solvers) s.config.max_iters = *o.max_iters;
    }
    const nepfw::ExperimentResult result = nepfw::run_experiment(cfg);
    for (const auto& note : result.notes) std::cerr << "note: " << note << '\n';
    std::cout << "wrote " << result.rows.size() << " rows to " << result.csv_path << " (summary "
              << result.summary_path << ")\n";
    if (!result.certified) {
        std::cerr << "certification failed\n";
        return kAssertion;
    }
    return kOk;
}

struct GenOptions {
    std::string kind = "flow";
    int layers = 5;
    int width = 4;
    double density = 0.5;
    std::size_t m = 175;
    std::size_t d = 200;
    std::size_t face_dim = 5;
    std::size_t paths = 3;
    std::uint64_t seed = 0;
    std::string out = "instance";
};

int cmd_gen(const GenOptions& g) {
    if (g.kind == "hypercube") {
        const nepfw::Instance inst = nepfw::make_hypercube_instance(g.m, g.d, g.face_dim, g.seed);
        nepfw::write_instance(g.out, inst, "hypercube_ls", g.seed);
        std::cout << "wrote " << g.out << ".{A.csv,b.csv,json}\n";
        return kOk;
    }
    if (g.kind != "flow") throw nepfw::InvalidArgument("unknown kind " + g.kind);
    const nepfw::DagInstance dag = nepfw::DagInstance::layered(g.layers, g.width, g.density, g.seed);
    const std::string dag_path = g.out + ".dag";
    {
        std::ofstream file(dag_path);
        if (!file) throw nepfw::Error("cannot write " + dag_path);
        dag.write(file);
    }
    if (!(nepfw::DagInstance::parse_file(dag_path) == dag)) {
        std::cerr << "edge list did not round-trip through the parser\n";
        return kAssertion;
    }
    const nepfw::FlowPolytope set(dag);
    const nepfw::Instance inst = nepfw::make_flow_instance(set, g.seed, g.paths);
    nepfw::write_instance(g.out, inst, "flow_synthetic", g.seed);
    std::cout << "wrote " << dag_path << " (" << dag.edge_count() << " edges) and " << g.out
              << ".{A.csv,b.csv,json}\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frank-Wolfe experiments with a nearest extreme point oracle"};
    app.require_subcommand(1);

    Overrides o;
    std::string config_path;
    auto* run = app.add_subcommand("run", "Run an experiment config and write CSV output");
    run->add_option("config", config_path, "YAML config file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", o.seed, "Override the base seed");
    run->add_option("--out", o.out, "Override the output CSV path");
    run->add_option("--max-iters", o.max_iters, "Override every solver's iteration count");
    run->add_option("--replications", o.replications, "Override the replication count")->check(CLI::PositiveNumber);
    run->add_option("--threads", o.threads, "Worker threads across runs")->check(CLI::PositiveNumber);

    GenOptions g;
    auto* gen = app.add_subcommand("gen-instance", "Generate a synthetic instance");
    gen->add_option("--kind", g.kind, "flow or hypercube")->check(CLI::IsMember({"flow", "hypercube"}));
    gen->add_option("--layers", g.layers)->check(CLI::PositiveNumber);
    gen->add_option("--width", g.width)->check(CLI::PositiveNumber);
    gen->add_option("--density", g.density)->check(CLI::Range(0.0, 1.0));
    gen->add_option("--m", g.m);
    gen->add_option("--d", g.d);
    gen->add_option("--face-dim", g.face_dim);
    gen->add_option("--paths", g.paths);
    gen->add_option("--seed", g.seed);
    gen->add_option("--out", g.out, "Output path prefix");

    std::uint64_t check_seed = 1;
    int check_reps = 10;
    auto* verify = app.add_subcommand("verify", "Oracle brute-force and lemma checks");
    verify->add_option("--seed", check_seed);
    auto* envelope = app.add_subcommand("envelope", "Rate-envelope checks");
    envelope->add_option("--seed", check_seed);
    envelope->add_option("--replications", check_reps)->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*run) return cmd_run(config_path, o);
        if (*gen) return cmd_gen(g);
        if (*verify) return report(nepfw::verify_suite(check_seed));
        if (*envelope) return report(nepfw::envelope_suite(check_seed, check_reps));
    } catch (const nepfw::ParseError& e) {
        std::cerr << config_path << ':' << e.line() << ": " << e.what() << '\n';
        return kUsage;
    } catch (const nepfw::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kAssertion;
    }
    return kUsage;
}
