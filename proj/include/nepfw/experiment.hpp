#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nepfw/solvers.hpp"

namespace nepfw {

enum class InstanceKind { hypercube_ls, flow_synthetic, adversarial };

struct InstanceSpec {
    InstanceKind kind = InstanceKind::hypercube_ls;
    // hypercube_ls
    std::size_t m = 175;
    std::size_t d = 200;
    std::size_t face_dim = 5;
    // flow_synthetic: either a DAG file or generator parameters
    std::string dag_file;
    int layers = 5;
    int width = 4;
    double density = 0.5;
    std::size_t paths = 3;
    std::size_t rows = 0;
    // adversarial uses d and m
};

struct SolverSpec {
    /// Label written to the algorithm column.
    std::string name;
    SolverConfig config;
};

struct ExperimentConfig {
    std::string name = "experiment";
    InstanceSpec instance;
    std::vector<SolverSpec> solvers;
    int replications = 1;
    std::uint64_t seed = 0;
    /// Run CSV path; the summary goes next to it with a .summary.csv suffix.
    std::string output = "results.csv";
    int threads = 1;
    std::optional<double> wall_clock_budget_s;
};

/// Parses the YAML config format. Errors carry the offending line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// One CSV row: a RunRecord tagged with its run.
struct CsvRow {
    int run_id = 0;
    int replication = 0;
    std::string algorithm;
    RunRecord record;
    std::string status = "ok";
};

struct ExperimentResult {
    std::vector<CsvRow> rows;
    std::vector<std::string> notes;
    /// False when an adversarial certification failed.
    bool certified = true;
    std::string csv_path;
    std::string summary_path;
};

inline constexpr const char* kCsvHeader =
    "run_id,replication,algorithm,t,wall_ms,f_value,gap,dual_gap,rho_t,oracle_calls_cum,"
    "grad_samples_cum,atoms_in_decomp,status";

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows);
/// Per (algorithm, t) means across replications; runs that stopped early
/// carry their last row forward.
void write_summary(std::ostream& out, const std::vector<CsvRow>& rows);

/// Per-replication stream seed derived from (seed, replication, salt).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t replication, std::uint64_t salt);

/// Runs every (replication, solver) pair. Writes the CSV, summary and JSON
/// notes when write_files is set.
ExperimentResult run_experiment(const ExperimentConfig& config, bool write_files = true);

}  // namespace nepfw
