#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "nepfw/experiment.hpp"

using namespace nepfw;

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::vector<std::vector<std::string>> read_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) rows.push_back(split(line));
    return rows;
}

std::size_t error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

const char* kSmall = R"(name: small
seed: 5
replications: 2
max_iters: 15
output: out.csv
instance:
  kind: hypercube_ls
  m: 12
  d: 8
  face_dim: 2
solvers:
  - name: fw
    variant: fw
  - name: nep_fc
    variant: nep_fc_opt2
    rho:
      kind: geometric
      q: 0.5
)";

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "nepfw_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(Config, ParsesAFullConfig) {
    const ExperimentConfig cfg = parse_config(kSmall);
    EXPECT_EQ(cfg.name, "small");
    EXPECT_EQ(cfg.seed, 5u);
    EXPECT_EQ(cfg.replications, 2);
    EXPECT_EQ(cfg.instance.d, 8u);
    ASSERT_EQ(cfg.solvers.size(), 2u);
    EXPECT_EQ(cfg.solvers[0].config.variant, Variant::fw);
    EXPECT_EQ(cfg.solvers[0].config.max_iters, 15);
    EXPECT_EQ(cfg.solvers[1].config.rho.kind, RhoKind::geometric);
    EXPECT_EQ(cfg.solvers[1].config.rho.q, 0.5);
}

TEST(Config, ErrorsCarryTheOffendingLine) {
    EXPECT_EQ(error_line("name: x\ninstance:\n  kind: hypercube_ls\n  colour: red\nsolvers:\n  - variant: fw\n"), 4u);
    EXPECT_EQ(error_line("instance:\n  kind: hypercube_ls\nsolvers:\n  - variant: pfw\n"), 4u);
    EXPECT_EQ(error_line("instance:\n  kind: hypercube_ls\nsolvers:\n  - variant: fc\n    rho:\n      kind: geometric\n"),
              4u);
    EXPECT_EQ(error_line("instance:\n  kind: hypercube_ls\nsolvers: [\n  - variant: fw\n"), 4u);
    EXPECT_EQ(error_line("instance:\n  kind: hypercube_ls\n"), 1u);
    EXPECT_EQ(error_line("instance:\n  kind: torus\nsolvers:\n  - variant: fw\n"), 2u);
    EXPECT_EQ(error_line("instance:\n  kind: hypercube_ls\nsolvers:\n  - variant: fw\n  - variant: fw\n"), 5u);
    EXPECT_EQ(error_line("instance:\n  kind: hypercube_ls\nsolvers:\n  - variant: nep_fc_opt2\n    rho:\n      kind: grid_search\n"),
              6u);
    EXPECT_NO_THROW(parse_config("instance:\n  kind: adversarial\n"));
}

TEST(Csv, RoundTripsDoublesAndEmptyCells) {
    CsvRow a;
    a.run_id = 3;
    a.replication = 1;
    a.algorithm = "nep_fw";
    a.record.t = 7;
    a.record.wall_ms = 0.1;
    a.record.f_value = 1.0 / 3.0;
    a.record.gap = std::nextafter(2.0, 3.0);
    a.record.dual_gap = 1e-300;
    a.record.oracle_calls_cum = 6;
    a.record.grad_samples_cum = 7;
    CsvRow b = a;
    b.record.gap.reset();
    b.record.rho_t = 0.7071067811865476;
    b.status = "truncated";
    std::ostringstream os;
    write_csv(os, {a, b});
    const auto rows = read_rows(os.str());
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0], split(kCsvHeader));
    ASSERT_EQ(rows[1].size(), 13u);
    ASSERT_EQ(rows[2].size(), 13u);
    EXPECT_EQ(std::stod(rows[1][5]), 1.0 / 3.0);
    EXPECT_EQ(std::stod(rows[1][6]), std::nextafter(2.0, 3.0));
    EXPECT_EQ(std::stod(rows[1][7]), 1e-300);
    EXPECT_EQ(rows[1][8], "");
    EXPECT_EQ(rows[2][6], "");
    EXPECT_EQ(std::stod(rows[2][8]), 0.7071067811865476);
    EXPECT_EQ(rows[2][12], "truncated");
}

TEST(Csv, SummaryCarriesShortRunsForward) {
    std::vector<CsvRow> rows;
    for (int t = 1; t <= 3; ++t) {
        CsvRow r;
        r.run_id = 0;
        r.algorithm = "x";
        r.record.t = t;
        r.record.f_value = t;
        r.record.gap = t;
        r.record.dual_gap = 0.0;
        rows.push_back(r);
    }
    CsvRow s;
    s.run_id = 1;
    s.algorithm = "x";
    s.record.f_value = 10.0;
    s.record.gap = 10.0;
    rows.push_back(s);
    std::ostringstream os;
    write_summary(os, rows);
    const auto out = read_rows(os.str());
    ASSERT_EQ(out.size(), 4u);
    EXPECT_EQ(out[0][0], "algorithm");
    EXPECT_EQ(out[3][1], "3");
    EXPECT_EQ(out[3][2], "2");
    EXPECT_EQ(std::stod(out[3][3]), 6.5);
    EXPECT_EQ(std::stod(out[1][4]), 5.5);
}

TEST(Seeds, DerivedStreamsAreDistinctAndStable) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t rep = 0; rep < 50; ++rep) {
        for (std::uint64_t salt = 1; salt < 8; ++salt) EXPECT_TRUE(seen.insert(derive_seed(2021, rep, salt)).second);
    }
    EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
    EXPECT_NE(derive_seed(1, 2, 3), derive_seed(2, 2, 3));
}

TEST(Experiment, RepeatRunsAgreeOutsideTiming) {
    ExperimentConfig cfg = parse_config(kSmall);
    cfg.threads = 3;
    const ExperimentResult a = run_experiment(cfg, false);
    cfg.threads = 1;
    const ExperimentResult b = run_experiment(cfg, false);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    EXPECT_EQ(a.rows.size(), 2u * 2u * 16u);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].algorithm, b.rows[i].algorithm);
        EXPECT_EQ(a.rows[i].record.f_value, b.rows[i].record.f_value);
        EXPECT_EQ(a.rows[i].record.rho_t, b.rows[i].record.rho_t);
        EXPECT_EQ(a.rows[i].status, "ok");
    }
}

TEST(Experiment, WritesCsvSummaryAndMetadata) {
    ExperimentConfig cfg = parse_config(kSmall);
    cfg.output = (scratch("exp") / "run.csv").string();
    const ExperimentResult r = run_experiment(cfg, true);
    EXPECT_TRUE(std::filesystem::exists(r.csv_path));
    EXPECT_TRUE(std::filesystem::exists(r.summary_path));
    EXPECT_TRUE(std::filesystem::exists(scratch("exp") / "run.meta.json"));
    std::ifstream in(r.csv_path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, kCsvHeader);
}

TEST(Experiment, DeadlineMarksRunsAsOverBudget) {
    ExperimentConfig cfg = parse_config(kSmall);
    cfg.wall_clock_budget_s = 0.0;
    const ExperimentResult r = run_experiment(cfg, false);
    for (const auto& row : r.rows) EXPECT_EQ(row.status, "budget_exceeded");
}

TEST(Experiment, AdversarialRunIsCertified) {
    const ExperimentResult r = run_experiment(parse_config("instance:\n  kind: adversarial\n  d: 50\n  m: 3\n"), false);
    EXPECT_TRUE(r.certified);
    std::set<std::string> statuses;
    for (const auto& row : r.rows) statuses.insert(row.status);
    EXPECT_TRUE(statuses.count("lower_bound_holds"));
    EXPECT_TRUE(statuses.count("below_quarter"));
    EXPECT_FALSE(statuses.count("lower_bound_violated"));
}
