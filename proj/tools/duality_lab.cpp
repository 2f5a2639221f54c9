#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dlab/error.hpp"
#include "dlab/harness.hpp"
#include "dlab/state_io.hpp"

namespace {

using dlab::harness::ExperimentConfig;

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      dlab::fail(dlab::ErrorCode::InvalidArgument, "bad number '" + item + "'");
    }
  }
  return out;
}

dlab::Dims parse_dims(const std::string& s) {
  dlab::Dims d;
  for (double x : parse_list(s)) d.push_back(static_cast<std::size_t>(x));
  return d;
}

int log_level() {
  const char* v = std::getenv("DLAB_LOG");
  return v ? std::atoi(v) : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"duality-lab: numerical checks of privacy amplification and compression duality"};
  std::string command, config_path, out, format, state, deltas, fixture, selector, matrix, a_dims, b_dims, r_dims;
  std::uint64_t seed = 0;
  std::size_t trials = 1, length = 0, d = 2, n = 3, threads = 0;
  double eps1 = 0.0, eps2 = 0.0, angle = 0.0;
  bool timings = false;

  app.add_option("command", command, "entropy | pa-run | csi-run | duality-verify | uncertainty-sweep | binlin");
  auto* o_config = app.add_option("--config", config_path, "JSON config file");
  auto* o_seed = app.add_option("--seed", seed, "base seed");
  auto* o_trials = app.add_option("--trials", trials, "number of trials");
  auto* o_out = app.add_option("--out", out, "output path (stdout when absent)");
  auto* o_format = app.add_option("--format", format, "csv | json");
  auto* o_state = app.add_option("--state", state, "state file");
  auto* o_length = app.add_option("--length", length, "key or compression length");
  auto* o_eps1 = app.add_option("--eps1", eps1, "smoothing parameter");
  auto* o_eps2 = app.add_option("--eps2", eps2, "hashing parameter");
  auto* o_check = app.add_option("--check,--op", selector, "duality-verify check or binlin operation");
  auto* o_d = app.add_option("--d", d, "dimension of A for uncertainty-sweep");
  auto* o_n = app.add_option("--n", n, "register size in qubits");
  auto* o_deltas = app.add_option("--deltas", deltas, "comma separated smoothing list");
  auto* o_fixture = app.add_option("--fixture", fixture, "random | ghz | phase");
  auto* o_matrix = app.add_option("--matrix", matrix, "binary matrix rows, e.g. 110;011");
  auto* o_a = app.add_option("--a-dims", a_dims, "comma separated dims of A");
  auto* o_b = app.add_option("--b-dims", b_dims, "comma separated dims of B");
  auto* o_r = app.add_option("--r-dims", r_dims, "comma separated dims of R");
  auto* o_angle = app.add_option("--angle", angle, "angle of the default binary source");
  auto* o_threads = app.add_option("--threads", threads, "worker threads, 0 for all cores");
  app.add_flag("--timings", timings, "include per-trial durations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  }

  try {
    ExperimentConfig cfg;
    if (*o_config) cfg = dlab::harness::config_from_json(dlab::io::read_json_file(config_path));
    if (!command.empty()) cfg.command = command;
    if (*o_seed) cfg.seed = seed;
    if (*o_trials) cfg.trials = trials;
    if (*o_out) cfg.out_path = out;
    if (*o_format) {
      dlab::require(format == "csv" || format == "json", dlab::ErrorCode::InvalidArgument,
                    "unknown format '" + format + "'");
      cfg.format = format == "csv" ? dlab::harness::Format::Csv : dlab::harness::Format::Json;
    }
    if (*o_state) cfg.state_path = state;
    if (*o_length) cfg.length = length;
    if (*o_eps1) cfg.eps1 = eps1;
    if (*o_eps2) cfg.eps2 = eps2;
    if (*o_check) cfg.selector = selector;
    if (*o_d) cfg.d = d;
    if (*o_n) cfg.n = n;
    if (*o_deltas) cfg.deltas = parse_list(deltas);
    if (*o_fixture) cfg.fixture = fixture;
    if (*o_matrix) cfg.matrix = matrix;
    if (*o_a) cfg.a_dims = parse_dims(a_dims);
    if (*o_b) cfg.b_dims = parse_dims(b_dims);
    if (*o_r) cfg.r_dims = parse_dims(r_dims);
    if (*o_angle) cfg.angle = angle;
    if (*o_threads) cfg.threads = threads;
    if (timings) cfg.timings = true;

    const auto doc = dlab::harness::run_experiment(cfg);
    const std::string text = dlab::harness::serialize_report(doc, cfg.format, cfg.timings);
    if (cfg.out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(cfg.out_path, std::ios::binary);
      dlab::require(static_cast<bool>(f), dlab::ErrorCode::Io, "cannot open " + cfg.out_path);
      f << text;
      dlab::require(static_cast<bool>(f), dlab::ErrorCode::Io, "write failed: " + cfg.out_path);
    }
    if (log_level() > 0)
      std::cerr << "records=" << doc.records.size() << " violations=" << doc.aggregates.violations << "\n";
    return doc.aggregates.violations == 0 ? 0 : 1;
  } catch (const dlab::Error& e) {
    std::cerr << "error: " << dlab::to_string(e.code()) << ": " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 4;
  }
}
