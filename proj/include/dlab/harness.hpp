#pragma once

// Experiment configuration, trial dispatch and report serialisation for the
// duality-lab command line tool.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dlab/qcore.hpp"

namespace dlab::harness {

inline constexpr const char* kToolVersion = "1.0.0";

enum class Format { Csv, Json };

struct ExperimentConfig {
  std::string command;   // entropy | pa-run | csi-run | duality-verify | uncertainty-sweep | binlin
  std::string selector;  // duality-verify: theorem1, theorem2a, ... ; binlin: rank, dual, complete, paired
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0 = hardware concurrency

  Dims a_dims{2};
  Dims b_dims{2};
  Dims r_dims{2};
  std::size_t d = 2;  // uncertainty-sweep: dimension of A
  std::size_t n = 3;  // protocol register size in qubits
  std::optional<std::size_t> length;

  double eps1 = 0.05;
  double eps2 = 0.05;
  std::vector<double> deltas;
  double angle = 0.39269908169872414;  // default source: |0> versus cos a|0> + sin a|1>

  std::string state_path;
  std::string fixture = "random";  // uncertainty-sweep: random | ghz | phase
  std::string matrix;              // binlin input, rows separated by ';'

  std::string out_path;
  Format format = Format::Csv;
  bool timings = false;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  nlohmann::ordered_json values;  // column name -> number, string or bool
  std::optional<double> slack;
  bool pass = true;
  double duration = 0.0;  // seconds
};

struct Aggregates {
  std::optional<double> min_slack;
  std::size_t violations = 0;
  std::vector<std::pair<std::string, double>> means;  // numeric columns only
};

struct ReportDocument {
  nlohmann::json config;
  std::string version = kToolVersion;
  std::vector<std::string> columns;  // value columns, in order
  bool verdict = false;              // records carry slack and pass
  std::vector<TrialRecord> records;
  Aggregates aggregates;
};

Aggregates aggregate(const std::vector<std::string>& columns, const std::vector<TrialRecord>& records);

ReportDocument run_experiment(const ExperimentConfig& cfg);

std::string serialize_report(const ReportDocument& doc, Format format, bool timings = false);
ReportDocument report_from_json(const nlohmann::json& j);

/// `copies` i.i.d. copies of the uniform binary source {|0>, cos a|0> + sin a|1>}.
CqState iid_qubit_source(std::size_t copies, double angle);

}  // namespace dlab::harness
