#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "dlab/error.hpp"
#include "dlab/harness.hpp"
#include "dlab/state_io.hpp"

using namespace dlab;
using namespace dlab::harness;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ExperimentConfig ghz_sweep() {
  ExperimentConfig c;
  c.command = "uncertainty-sweep";
  c.fixture = "ghz";
  c.trials = 3;
  c.seed = 2024;
  c.deltas = {};
  return c;
}

}  // namespace

TEST(Harness, GhzSweepOneRowEquality) {
  auto c = ghz_sweep();
  c.trials = 1;
  const auto doc = run_experiment(c);
  ASSERT_EQ(doc.records.size(), 1u);
  EXPECT_NEAR(doc.records[0].values["slack"].get<double>(), 0.0, 1e-9);
  EXPECT_TRUE(doc.records[0].pass);
  EXPECT_EQ(doc.aggregates.violations, 0u);
}

TEST(Harness, DeterministicAcrossRunsAndThreadCounts) {
  ExperimentConfig c;
  c.command = "duality-verify";
  c.selector = "theorem1";
  c.trials = 12;
  c.seed = 99;
  c.threads = 1;
  const auto one = serialize_report(run_experiment(c), Format::Csv);
  EXPECT_EQ(one, serialize_report(run_experiment(c), Format::Csv));
  c.threads = 3;
  EXPECT_EQ(one, serialize_report(run_experiment(c), Format::Csv));
  c.seed = 100;
  EXPECT_NE(one, serialize_report(run_experiment(c), Format::Csv));
}

TEST(Harness, TrialSeedsAreDerived) {
  auto c = ghz_sweep();
  const auto doc = run_experiment(c);
  for (std::size_t t = 0; t < doc.records.size(); ++t) {
    EXPECT_EQ(doc.records[t].trial, t);
    EXPECT_EQ(doc.records[t].seed, qcore::derive_seed(c.seed, t));
  }
}

TEST(Harness, Theorem1SweepNoViolations) {
  ExperimentConfig c;
  c.command = "duality-verify";
  c.selector = "theorem1";
  c.trials = 100;
  const auto doc = run_experiment(c);
  EXPECT_EQ(doc.aggregates.violations, 0u);
  ASSERT_TRUE(doc.aggregates.min_slack.has_value());
  EXPECT_GE(*doc.aggregates.min_slack, 0.0);
}

TEST(Harness, EmptyReportIsHeaderOnly) {
  ReportDocument doc;
  doc.columns = {"length", "p_secure", "bound_value"};
  EXPECT_EQ(serialize_report(doc, Format::Csv), "trial,seed,length,p_secure,bound_value\n");
}

TEST(Harness, PaCsvColumns) {
  ExperimentConfig c;
  c.command = "pa-run";
  c.trials = 2;
  c.length = 1;
  const auto rows = parse_csv(serialize_report(run_experiment(c), Format::Csv));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"trial", "seed", "length", "p_secure", "bound_value"}));
  c.command = "csi-run";
  const auto csi = parse_csv(serialize_report(run_experiment(c), Format::Csv));
  EXPECT_EQ(csi[0], (std::vector<std::string>{"trial", "seed", "length", "p_guess", "bound_value"}));
}

TEST(Harness, JsonRoundTrip) {
  ExperimentConfig c;
  c.command = "duality-verify";
  c.selector = "pa-to-csi";
  c.trials = 4;
  const auto doc = run_experiment(c);
  const std::string text = serialize_report(doc, Format::Json);
  const auto back = report_from_json(nlohmann::json::parse(text));
  EXPECT_EQ(serialize_report(back, Format::Json), text);
  EXPECT_EQ(serialize_report(back, Format::Csv), serialize_report(doc, Format::Csv));
  EXPECT_EQ(back.aggregates.violations, doc.aggregates.violations);
}

TEST(Harness, TimingsOnlyWhenRequested) {
  auto c = ghz_sweep();
  const auto doc = run_experiment(c);
  EXPECT_EQ(serialize_report(doc, Format::Csv).find("duration"), std::string::npos);
  EXPECT_NE(serialize_report(doc, Format::Csv, true).find("duration"), std::string::npos);
}

TEST(Harness, ConfigJsonAndValidation) {
  const auto j = nlohmann::json::parse(R"({"command": "binlin", "selector": "rank", "trials": 3,
                                           "matrix": "110;011", "format": "json"})");
  const auto c = config_from_json(j);
  EXPECT_EQ(c.command, "binlin");
  EXPECT_EQ(c.format, Format::Json);
  const auto doc = run_experiment(c);
  EXPECT_EQ(doc.records[0].values["rank"].get<int>(), 2);
  EXPECT_EQ(config_from_json(config_to_json(c)).trials, 3u);

  auto bad = c;
  bad.trials = 0;
  EXPECT_THROW(run_experiment(bad), Error);
  bad = c;
  bad.command = "nope";
  EXPECT_THROW(run_experiment(bad), Error);
  bad = c;
  bad.a_dims = {16};
  bad.b_dims = {16};
  bad.r_dims = {2};
  EXPECT_THROW(run_experiment(bad), Error);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"trials": "x"})")), Error);
}

TEST(Harness, BinlinOperations) {
  ExperimentConfig c;
  c.command = "binlin";
  c.matrix = "110;011";
  c.selector = "paired";
  EXPECT_EQ(run_experiment(c).records[0].values["output"].get<std::string>(), "111");
  c.selector = "complete";
  EXPECT_EQ(run_experiment(c).records[0].values["output"].get<std::string>(), "110;011;001");
  c.matrix = "100;110;111";
  c.selector = "dual";
  EXPECT_EQ(run_experiment(c).records[0].values["output"].get<std::string>(), "110;011;001");
}

TEST(Harness, EntropyFromStateFile) {
  const std::string path = "harness_state_test.json";
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  io::write_json_file(path, io::to_json(PureStateVector(v, {2, 2})));
  ExperimentConfig c;
  c.command = "entropy";
  c.state_path = path;
  const auto doc = run_experiment(c);
  EXPECT_NEAR(doc.records[0].values["h"].get<double>(), -1.0, 1e-9);
  EXPECT_NEAR(doc.records[0].values["h_min"].get<double>(), -1.0, 1e-7);
  EXPECT_NEAR(doc.records[0].values["h_max"].get<double>(), -1.0, 1e-7);
  std::remove(path.c_str());
}

// Golden file from the first certified run; tolerances per column live in the
// sidecar JSON.
TEST(Harness, GhzGoldenFile) {
  auto c = ghz_sweep();
  c.deltas = {0.01, 0.1};
  const auto got = parse_csv(serialize_report(run_experiment(c), Format::Csv));
  const auto want = parse_csv(slurp(std::string(DLAB_GOLDEN_DIR) + "/ghz_uncertainty.csv"));
  const auto tol = nlohmann::json::parse(slurp(std::string(DLAB_GOLDEN_DIR) + "/ghz_uncertainty.tol.json"));
  ASSERT_EQ(got.size(), want.size());
  ASSERT_EQ(got[0], want[0]);
  for (std::size_t r = 1; r < got.size(); ++r) {
    ASSERT_EQ(got[r].size(), want[r].size());
    for (std::size_t k = 0; k < got[r].size(); ++k) {
      const std::string& col = want[0][k];
      if (tol.contains(col))
        EXPECT_NEAR(std::stod(got[r][k]), std::stod(want[r][k]), tol[col].get<double>()) << col << " row " << r;
      else
        EXPECT_EQ(got[r][k], want[r][k]) << col << " row " << r;
    }
  }
}
