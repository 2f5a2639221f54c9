#include "dlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "dlab/binlin.hpp"
#include "dlab/config.hpp"
#include "dlab/duality.hpp"
#include "dlab/entropy.hpp"
#include "dlab/error.hpp"
#include "dlab/protocols.hpp"
#include "dlab/state_io.hpp"

namespace dlab::harness {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::vector<std::string> kCommands = {"entropy", "pa-run", "csi-run", "duality-verify",
                                            "uncertainty-sweep", "binlin"};
const std::vector<std::string> kChecks = {"theorem1", "theorem2a", "theorem2b", "csi-to-pa",
                                          "pa-to-csi", "minmax-duality", "td-fidelity"};
const std::vector<std::string> kBinlinOps = {"rank", "dual", "complete", "paired"};

bool one_of(const std::string& s, const std::vector<std::string>& options) {
  return std::find(options.begin(), options.end(), s) != options.end();
}

std::string format_name(Format f) { return f == Format::Csv ? "csv" : "json"; }

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  fail(ErrorCode::InvalidArgument, "unknown format '" + s + "'");
}

// Uniform draw in [0, 1) from a trial seed.
double unit_draw(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

Dims concat_dims(const Dims& a, const Dims& b) {
  Dims out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Subsystems range(std::size_t first, std::size_t count) {
  Subsystems s;
  for (std::size_t k = 0; k < count; ++k) s.push_back(first + k);
  return s;
}

std::size_t bits_of(std::size_t alphabet) {
  std::size_t n = 0;
  while ((std::size_t{1} << (n + 1)) <= alphabet) ++n;
  return n;
}

BinaryMatrix parse_bits(const std::string& text) {
  std::vector<std::string> rows;
  std::string cur;
  for (char c : text) {
    if (c == ';' || c == ',' || c == ' ' || c == '\n') {
      if (!cur.empty()) rows.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) rows.push_back(cur);
  require(!rows.empty(), ErrorCode::InvalidArgument, "binlin: empty matrix");
  return BinaryMatrix::from_rows(rows);
}

std::string bits_text(const BinaryMatrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (i) out += ';';
    out += m.row(i).to_string();
  }
  return out;
}

void set_verdict(TrialRecord& rec, double slack) {
  rec.values["slack"] = slack;
  rec.slack = slack;
  rec.pass = slack >= -numeric_config().bound_slack;
}

// psi = sum_z 2^{-n/2} |z>^A |phi_z>^{BR}, phi_z a perturbation of
// |z mod d_B>^B |chi_z>^R with Haar chi_z. Z^A is mostly, not fully,
// recoverable from B; the leftover ambiguity is what compression resolves.
TripartiteState correlated_state(std::size_t n, std::size_t db, std::size_t dr, double noise,
                                          std::uint64_t seed) {
  const std::size_t da = std::size_t{1} << n;
  const auto dp = static_cast<Eigen::Index>(db * dr);
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(da) * dp);
  for (std::size_t z = 0; z < da; ++z) {
    const ComplexVector chi = qcore::haar_state({dr}, qcore::derive_seed(seed, 2 * z)).amplitudes();
    ComplexVector phi = ComplexVector::Zero(dp);
    phi.segment(static_cast<Eigen::Index>((z % db) * dr), static_cast<Eigen::Index>(dr)) = chi;
    phi += noise * qcore::haar_state({db, dr}, qcore::derive_seed(seed, 2 * z + 1)).amplitudes();
    phi.normalize();
    v.segment(static_cast<Eigen::Index>(z) * dp, dp) = phi / std::sqrt(static_cast<double>(da));
  }
  Dims dims(n, 2);
  dims.push_back(db);
  dims.push_back(dr);
  return TripartiteState(PureStateVector(v, dims), range(0, n), {n}, {n + 1});
}

CqState load_cq(const ExperimentConfig& cfg) {
  if (cfg.state_path.empty()) return iid_qubit_source(cfg.n, cfg.angle);
  return io::cq_state_from_json(io::read_json_file(cfg.state_path));
}

struct Plan {
  std::vector<std::string> columns;
  bool verdict = false;
  std::function<std::vector<TrialRecord>(std::size_t, std::uint64_t)> run;
};

TrialRecord make_record(std::size_t trial, std::uint64_t seed) {
  TrialRecord r;
  r.trial = trial;
  r.seed = seed;
  r.values = ordered_json::object();
  return r;
}

Plan plan_entropy(const ExperimentConfig& cfg) {
  Plan p;
  p.columns = {"h", "h_min", "h_max", "h_min_smooth", "h_max_smooth", "eps1"};
  const double eps = cfg.eps1;
  if (!cfg.state_path.empty()) {
    const json j = io::read_json_file(cfg.state_path);
    if (j.contains("probs")) {
      const CqState cq = io::cq_state_from_json(j);
      p.run = [cq, eps](std::size_t t, std::uint64_t s) {
        TrialRecord r = make_record(t, s);
        r.values["h"] = entropy::cond_entropy(cq);
        r.values["h_min"] = entropy::min_entropy(cq);
        r.values["h_max"] = entropy::max_entropy(cq);
        r.values["h_min_smooth"] = entropy::smooth_min_entropy(cq, SmoothingBall(eps));
        r.values["h_max_smooth"] = entropy::smooth_max_entropy(cq, SmoothingBall(eps));
        r.values["eps1"] = eps;
        return std::vector<TrialRecord>{r};
      };
      return p;
    }
    const DensityOperator rho = io::holds_vector(j) ? DensityOperator::from_pure(io::pure_state_from_json(j))
                                                    : io::density_from_json(j);
    require(rho.dims().size() >= 2, ErrorCode::InvalidArgument, "entropy: need at least two subsystems");
    const Subsystems side{rho.dims().size() - 1};
    p.run = [rho, side, eps](std::size_t t, std::uint64_t s) {
      TrialRecord r = make_record(t, s);
      r.values["h"] = entropy::cond_entropy(rho, side);
      r.values["h_min"] = entropy::min_entropy(rho, side);
      r.values["h_max"] = entropy::max_entropy(rho, side);
      r.values["h_min_smooth"] = entropy::smooth_min_entropy(rho, side, SmoothingBall(eps));
      r.values["h_max_smooth"] = entropy::smooth_max_entropy(rho, side, SmoothingBall(eps));
      r.values["eps1"] = eps;
      return std::vector<TrialRecord>{r};
    };
    return p;
  }
  const Dims dims = concat_dims(cfg.a_dims, cfg.b_dims);
  const Subsystems side = range(cfg.a_dims.size(), cfg.b_dims.size());
  p.run = [dims, side, eps](std::size_t t, std::uint64_t s) {
    const DensityOperator rho = qcore::random_density(dims, total_dim(dims), s);
    TrialRecord r = make_record(t, s);
    r.values["h"] = entropy::cond_entropy(rho, side);
    r.values["h_min"] = entropy::min_entropy(rho, side);
    r.values["h_max"] = entropy::max_entropy(rho, side);
    r.values["h_min_smooth"] = entropy::smooth_min_entropy(rho, side, SmoothingBall(eps));
    r.values["h_max_smooth"] = entropy::smooth_max_entropy(rho, side, SmoothingBall(eps));
    r.values["eps1"] = eps;
    return std::vector<TrialRecord>{r};
  };
  return p;
}

Plan plan_pa(const ExperimentConfig& cfg) {
  Plan p;
  p.columns = {"length", "p_secure", "bound_value"};
  const CqState cq = load_cq(cfg);
  const std::size_t n = bits_of(cq.alphabet());
  require(cq.alphabet() == (std::size_t{1} << n), ErrorCode::InvalidArgument, "pa-run: alphabet must be 2^n");
  const std::size_t len = cfg.length ? *cfg.length : protocols::pa_length_bound(cq, cfg.eps1, cfg.eps2).length;
  require(len <= n, ErrorCode::InvalidArgument, "pa-run: length exceeds the register size");
  const double bound = cfg.eps1 + cfg.eps2;
  p.run = [cq, n, len, bound](std::size_t t, std::uint64_t s) {
    const BinaryMatrix g = binlin::sample_full_rank(len, n, s);
    TrialRecord r = make_record(t, s);
    r.values["length"] = len;
    r.values["p_secure"] = protocols::p_secure(protocols::coarse_grain(cq, g));
    r.values["bound_value"] = bound;
    return std::vector<TrialRecord>{r};
  };
  return p;
}

Plan plan_csi(const ExperimentConfig& cfg) {
  Plan p;
  p.columns = {"length", "p_guess", "bound_value"};
  const CqState cq = load_cq(cfg);
  const std::size_t n = bits_of(cq.alphabet());
  require(cq.alphabet() == (std::size_t{1} << n), ErrorCode::InvalidArgument, "csi-run: alphabet must be 2^n");
  const std::size_t len = cfg.length ? *cfg.length : protocols::csi_length_bound(cq, cfg.eps1, cfg.eps2).length;
  require(len <= n, ErrorCode::InvalidArgument, "csi-run: length exceeds the register size");
  const double bound = 1.0 - (cfg.eps1 + cfg.eps2);
  p.run = [cq, n, len, bound](std::size_t t, std::uint64_t s) {
    const BinaryMatrix f = binlin::sample_full_rank(len, n, s);
    TrialRecord r = make_record(t, s);
    r.values["length"] = len;
    r.values["p_guess"] = protocols::run_csi(cq, f).second.achieved;
    r.values["bound_value"] = bound;
    return std::vector<TrialRecord>{r};
  };
  return p;
}

void fill_report(TrialRecord& r, const DualityReport& rep) {
  r.values["epsilon"] = rep.epsilon;
  r.values["bound"] = rep.bound;
  r.values["achieved"] = rep.achieved;
  set_verdict(r, rep.slack);
}

Plan plan_duality(const ExperimentConfig& cfg) {
  Plan p;
  p.verdict = true;
  const std::string sel = cfg.selector;
  const Dims a = cfg.a_dims, b = cfg.b_dims, rd = cfg.r_dims;
  const std::size_t n = cfg.n;
  if (sel == "minmax-duality") {
    p.columns = {"h_max_a_b", "h_min_a_c", "sum", "slack"};
    p.run = [a, b, rd](std::size_t t, std::uint64_t s) {
      const auto st = duality::random_tripartite(a, b, rd, s);
      const std::size_t na = a.size(), nb = b.size(), nr = rd.size();
      const Subsystems ab = range(0, na + nb);
      Subsystems ac = range(0, na);
      for (std::size_t k = 0; k < nr; ++k) ac.push_back(na + nb + k);
      const DensityOperator rho_ab = qcore::partial_trace(st.psi(), ab);
      const DensityOperator rho_ac = qcore::partial_trace(st.psi(), ac);
      const double hmax = entropy::max_entropy(rho_ab, range(na, nb));
      const double hmin = entropy::min_entropy(rho_ac, range(na, nr));
      TrialRecord r = make_record(t, s);
      r.values["h_max_a_b"] = hmax;
      r.values["h_min_a_c"] = hmin;
      r.values["sum"] = hmax + hmin;
      set_verdict(r, 1e-6 - std::abs(hmax + hmin));
      return std::vector<TrialRecord>{r};
    };
    return p;
  }
  if (sel == "td-fidelity") {
    p.columns = {"fidelity", "trace_distance", "lower", "upper", "slack"};
    p.run = [a](std::size_t t, std::uint64_t s) {
      const std::size_t d = total_dim(a);
      const DensityOperator rho = qcore::random_density(a, d, qcore::derive_seed(s, 0));
      const DensityOperator sigma = qcore::random_density(a, d, qcore::derive_seed(s, 1));
      const double f = qcore::fidelity(rho, sigma);
      const double dist = qcore::trace_distance(rho, sigma);
      const double lo = 1.0 - f, hi = std::sqrt(std::max(0.0, 1.0 - f * f));
      TrialRecord r = make_record(t, s);
      r.values["fidelity"] = f;
      r.values["trace_distance"] = dist;
      r.values["lower"] = lo;
      r.values["upper"] = hi;
      set_verdict(r, std::min(dist - lo, hi - dist));
      return std::vector<TrialRecord>{r};
    };
    return p;
  }
  p.columns = {"epsilon", "bound", "achieved", "slack"};
  if (sel == "theorem1") {
    p.run = [a, b, rd](std::size_t t, std::uint64_t s) {
      TrialRecord r = make_record(t, s);
      fill_report(r, duality::verify_theorem1(duality::random_tripartite(a, b, rd, s)));
      return std::vector<TrialRecord>{r};
    };
  } else if (sel == "theorem2a" || sel == "theorem2b") {
    const bool case_a = sel == "theorem2a";
    p.run = [a, b, rd, case_a](std::size_t t, std::uint64_t s) {
      const double spread = 0.5 * unit_draw(qcore::derive_seed(s, 1000));
      TrialRecord r = make_record(t, s);
      if (case_a)
        fill_report(r, duality::recover_measurement_case_a(duality::random_case_a_state(a, b, rd, s, spread)));
      else
        fill_report(r, duality::recover_measurement_case_b(duality::random_case_b_state(a, b, rd, s, spread)));
      return std::vector<TrialRecord>{r};
    };
  } else if (sel == "csi-to-pa") {
    p.columns = {"epsilon", "bound", "achieved", "slack", "key_length", "compressed_length"};
    const std::size_t len = cfg.length.value_or(n > 0 ? n - 1 : 0);
    require(len <= n, ErrorCode::InvalidArgument, "csi-to-pa: length exceeds n");
    const std::size_t db = total_dim(b), dr = total_dim(rd);
    p.run = [n, len, db, dr](std::size_t t, std::uint64_t s) {
      const double noise = 0.3 * unit_draw(qcore::derive_seed(s, 1000));
      const auto st = correlated_state(n, db, dr, noise, s);
      const BinaryMatrix f = binlin::sample_full_rank(len, n, qcore::derive_seed(s, 1001));
      const DualityReport rep = duality::csi_to_pa(f, st);
      TrialRecord r = make_record(t, s);
      fill_report(r, rep);
      r.values["key_length"] = rep.key_length;
      r.values["compressed_length"] = rep.compressed_length;
      return std::vector<TrialRecord>{r};
    };
  } else if (sel == "pa-to-csi") {
    p.columns = {"case", "epsilon", "bound", "achieved", "slack", "key_length", "compressed_length"};
    const std::optional<std::size_t> fixed = cfg.length;
    p.run = [n, b, rd, fixed](std::size_t t, std::uint64_t s) {
      require(n >= 1, ErrorCode::InvalidArgument, "pa-to-csi: n must be positive");
      const bool case_a = t % 2 == 0;
      const std::size_t len = fixed ? *fixed : 1 + t / 2 % std::max<std::size_t>(1, n - 1);
      require(len <= n, ErrorCode::InvalidArgument, "pa-to-csi: length exceeds n");
      const double spread = 0.5 * unit_draw(qcore::derive_seed(s, 1000));
      const Dims ad(n, 2);
      const auto st = case_a ? duality::random_case_a_state(ad, {}, rd, s, spread)
                             : duality::random_case_b_state(ad, b, {}, s, spread);
      const BinaryMatrix g = binlin::sample_full_rank(len, n, qcore::derive_seed(s, 1001));
      const DualityReport rep = duality::pa_to_csi(g, st, case_a ? DualityCase::A : DualityCase::B);
      TrialRecord r = make_record(t, s);
      r.values["case"] = case_a ? "a" : "b";
      fill_report(r, rep);
      r.values["key_length"] = rep.key_length;
      r.values["compressed_length"] = rep.compressed_length;
      return std::vector<TrialRecord>{r};
    };
  }
  return p;
}

Plan plan_uncertainty(const ExperimentConfig& cfg) {
  Plan p;
  p.verdict = true;
  p.columns = {"d", "delta", "h_x_r", "h_z_b", "bound", "slack", "vacuous"};
  const std::string fixture = cfg.fixture;
  const std::size_t d = cfg.d;
  const Dims b = cfg.b_dims, rd = cfg.r_dims;
  const std::vector<double> deltas = cfg.deltas;
  p.run = [fixture, d, b, rd, deltas](std::size_t t, std::uint64_t s) {
    const TripartiteState st = fixture == "ghz"     ? duality::ghz_fixture()
                                        : fixture == "phase" ? duality::phase_fixture()
                                                             : duality::random_tripartite(Dims{d}, b, rd, s);
    std::vector<TrialRecord> out;
    auto emit = [&](double delta, const UncertaintyResult& u) {
      TrialRecord r = make_record(t, s);
      r.values["d"] = st.dim_a();
      r.values["delta"] = delta;
      r.values["h_x_r"] = u.h_x_r;
      r.values["h_z_b"] = u.h_z_b;
      r.values["bound"] = u.bound;
      set_verdict(r, u.slack);
      r.values["vacuous"] = u.vacuous;
      out.push_back(std::move(r));
    };
    if (deltas.empty()) emit(0.0, duality::check_uncertainty(st));
    for (double delta : deltas) emit(delta, duality::check_smooth_uncertainty(st, delta));
    return out;
  };
  return p;
}

Plan plan_binlin(const ExperimentConfig& cfg) {
  Plan p;
  p.columns = {"op", "input", "rank", "output"};
  const std::string op = cfg.selector;
  const std::optional<BinaryMatrix> given =
      cfg.matrix.empty() ? std::nullopt : std::optional<BinaryMatrix>(parse_bits(cfg.matrix));
  const std::size_t rows = cfg.length.value_or(cfg.n > 0 ? cfg.n - 1 : 0), cols = cfg.n;
  p.run = [op, given, rows, cols](std::size_t t, std::uint64_t s) {
    const BinaryMatrix m = given ? *given
                           : op == "rank" ? binlin::sample_uniform(rows, cols, s)
                                          : binlin::sample_full_rank(rows, cols, s);
    TrialRecord r = make_record(t, s);
    r.values["op"] = op;
    r.values["input"] = bits_text(m);
    r.values["rank"] = binlin::rank_f2(m);
    std::string out;
    if (op == "dual") {
      out = bits_text(binlin::dual_basis(m));
    } else if (op == "complete") {
      out = bits_text(binlin::stack(m, binlin::complete_basis(m)));
    } else if (op == "paired") {
      out = bits_text(duality::paired_extractor(m));
    }
    r.values["output"] = out;
    return std::vector<TrialRecord>{r};
  };
  return p;
}

Plan make_plan(const ExperimentConfig& cfg) {
  if (cfg.command == "entropy") return plan_entropy(cfg);
  if (cfg.command == "pa-run") return plan_pa(cfg);
  if (cfg.command == "csi-run") return plan_csi(cfg);
  if (cfg.command == "duality-verify") return plan_duality(cfg);
  if (cfg.command == "uncertainty-sweep") return plan_uncertainty(cfg);
  return plan_binlin(cfg);
}

std::string csv_field(const ordered_json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v.get<double>());
    return buf;
  }
  return "";
}

}  // namespace

void ExperimentConfig::validate() const {
  require(one_of(command, kCommands), ErrorCode::InvalidArgument, "unknown command '" + command + "'");
  require(trials >= 1, ErrorCode::InvalidArgument, "trials must be at least 1");
  if (command == "duality-verify")
    require(one_of(selector, kChecks), ErrorCode::InvalidArgument, "unknown check '" + selector + "'");
  if (command == "binlin")
    require(one_of(selector, kBinlinOps), ErrorCode::InvalidArgument, "unknown binlin op '" + selector + "'");
  if (command == "uncertainty-sweep")
    require(fixture == "random" || fixture == "ghz" || fixture == "phase", ErrorCode::InvalidArgument,
            "unknown fixture '" + fixture + "'");
  for (const Dims* dims : {&a_dims, &b_dims, &r_dims})
    for (auto x : *dims) require(x >= 1, ErrorCode::InvalidArgument, "dimensions must be positive");
  require(!a_dims.empty(), ErrorCode::InvalidArgument, "a_dims must not be empty");
  const std::size_t total = total_dim(a_dims) * total_dim(b_dims) * total_dim(r_dims);
  require(total <= numeric_config().max_dim, ErrorCode::InvalidArgument, "state exceeds the dimension envelope");
  require(d >= 2 && d * total_dim(b_dims) * total_dim(r_dims) <= numeric_config().max_dim,
          ErrorCode::InvalidArgument, "d outside the dimension envelope");
  require(n <= 8, ErrorCode::InvalidArgument, "n must be at most 8");
  require(eps1 >= 0.0 && eps1 < 1.0 && eps2 > 0.0 && eps2 < 1.0, ErrorCode::InvalidArgument,
          "need 0 <= eps1 < 1 and 0 < eps2 < 1");
  for (double dl : deltas) require(dl > 0.0 && dl < 1.0, ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("command")) c.command = j["command"].get<std::string>();
    if (j.contains("selector")) c.selector = j["selector"].get<std::string>();
    if (j.contains("trials")) c.trials = j["trials"].get<std::size_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) c.threads = j["threads"].get<std::size_t>();
    if (j.contains("a_dims")) c.a_dims = j["a_dims"].get<Dims>();
    if (j.contains("b_dims")) c.b_dims = j["b_dims"].get<Dims>();
    if (j.contains("r_dims")) c.r_dims = j["r_dims"].get<Dims>();
    if (j.contains("d")) c.d = j["d"].get<std::size_t>();
    if (j.contains("n")) c.n = j["n"].get<std::size_t>();
    if (j.contains("length") && !j["length"].is_null()) c.length = j["length"].get<std::size_t>();
    if (j.contains("eps1")) c.eps1 = j["eps1"].get<double>();
    if (j.contains("eps2")) c.eps2 = j["eps2"].get<double>();
    if (j.contains("deltas")) c.deltas = j["deltas"].get<std::vector<double>>();
    if (j.contains("angle")) c.angle = j["angle"].get<double>();
    if (j.contains("state")) c.state_path = j["state"].get<std::string>();
    if (j.contains("fixture")) c.fixture = j["fixture"].get<std::string>();
    if (j.contains("matrix")) c.matrix = j["matrix"].get<std::string>();
    if (j.contains("out")) c.out_path = j["out"].get<std::string>();
    if (j.contains("format")) c.format = parse_format(j["format"].get<std::string>());
    if (j.contains("timings")) c.timings = j["timings"].get<bool>();
  } catch (const json::exception& e) {
    fail(ErrorCode::Io, std::string("config: ") + e.what());
  }
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["command"] = c.command;
  j["selector"] = c.selector;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["a_dims"] = c.a_dims;
  j["b_dims"] = c.b_dims;
  j["r_dims"] = c.r_dims;
  j["d"] = c.d;
  j["n"] = c.n;
  j["length"] = c.length ? json(*c.length) : json(nullptr);
  j["eps1"] = c.eps1;
  j["eps2"] = c.eps2;
  j["deltas"] = c.deltas;
  j["angle"] = c.angle;
  j["state"] = c.state_path;
  j["fixture"] = c.fixture;
  j["matrix"] = c.matrix;
  j["format"] = format_name(c.format);
  return j;
}

Aggregates aggregate(const std::vector<std::string>& columns, const std::vector<TrialRecord>& records) {
  Aggregates a;
  for (const auto& r : records) {
    if (!r.pass) ++a.violations;
    if (r.slack) a.min_slack = a.min_slack ? std::min(*a.min_slack, *r.slack) : *r.slack;
  }
  for (const auto& col : columns) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : records) {
      const auto it = r.values.find(col);
      if (it != r.values.end() && it->is_number()) {
        sum += it->get<double>();
        ++count;
      }
    }
    if (count > 0 && count == records.size()) a.means.emplace_back(col, sum / static_cast<double>(count));
  }
  return a;
}

ReportDocument run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Plan plan = make_plan(cfg);
  const std::size_t trials = cfg.trials;
  std::vector<std::vector<TrialRecord>> results(trials);
  std::vector<std::exception_ptr> errors(trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < trials; t = next++) {
      const std::uint64_t seed = qcore::derive_seed(cfg.seed, t);
      const auto start = std::chrono::steady_clock::now();
      try {
        results[t] = plan.run(t, seed);
      } catch (...) {
        errors[t] = std::current_exception();
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      for (auto& r : results[t]) r.duration = secs;
    }
  };
  std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, trials);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  ReportDocument doc;
  doc.config = config_to_json(cfg);
  doc.columns = plan.columns;
  doc.verdict = plan.verdict;
  for (auto& group : results)
    for (auto& r : group) doc.records.push_back(std::move(r));
  for (auto& r : doc.records)
    for (const auto& [k, v] : r.values.items())
      if (v.is_number_float())
        require(std::isfinite(v.get<double>()), ErrorCode::SolverFailure, "non-finite value in column " + k);
  doc.aggregates = aggregate(doc.columns, doc.records);
  return doc;
}

std::string serialize_report(const ReportDocument& doc, Format format, bool timings) {
  const bool verdict = doc.verdict;
  if (format == Format::Csv) {
    std::ostringstream os;
    os << "trial,seed";
    for (const auto& c : doc.columns) os << ',' << c;
    if (verdict) os << ",pass";
    if (timings) os << ",duration";
    os << '\n';
    for (const auto& r : doc.records) {
      os << r.trial << ',' << r.seed;
      for (const auto& c : doc.columns) {
        os << ',';
        const auto it = r.values.find(c);
        if (it != r.values.end()) os << csv_field(*it);
      }
      if (verdict) os << ',' << (r.pass ? "true" : "false");
      if (timings) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", r.duration);
        os << ',' << buf;
      }
      os << '\n';
    }
    return os.str();
  }
  ordered_json j;
  j["tool"] = "duality-lab";
  j["version"] = doc.version;
  j["config"] = doc.config;
  j["columns"] = doc.columns;
  j["verdict"] = doc.verdict;
  ordered_json recs = ordered_json::array();
  for (const auto& r : doc.records) {
    ordered_json o;
    o["trial"] = r.trial;
    o["seed"] = r.seed;
    o["values"] = r.values;
    if (r.slack) o["slack"] = *r.slack;
    o["pass"] = r.pass;
    if (timings) o["duration"] = r.duration;
    recs.push_back(std::move(o));
  }
  j["records"] = std::move(recs);
  ordered_json agg;
  agg["min_slack"] = doc.aggregates.min_slack ? ordered_json(*doc.aggregates.min_slack) : ordered_json(nullptr);
  agg["violations"] = doc.aggregates.violations;
  ordered_json means = ordered_json::object();
  for (const auto& [k, v] : doc.aggregates.means) means[k] = v;
  agg["means"] = std::move(means);
  j["aggregates"] = std::move(agg);
  return j.dump(2) + "\n";
}

ReportDocument report_from_json(const json& j) {
  ReportDocument doc;
  try {
    doc.version = j.at("version").get<std::string>();
    doc.config = j.at("config");
    doc.columns = j.at("columns").get<std::vector<std::string>>();
    doc.verdict = j.value("verdict", false);
    for (const auto& o : j.at("records")) {
      TrialRecord r;
      r.trial = o.at("trial").get<std::size_t>();
      r.seed = o.at("seed").get<std::uint64_t>();
      r.values = ordered_json::object();
      // Preserve column order rather than the parser's key order.
      for (const auto& c : doc.columns)
        if (o.at("values").contains(c)) r.values[c] = o.at("values").at(c);
      if (o.contains("slack")) r.slack = o.at("slack").get<double>();
      r.pass = o.at("pass").get<bool>();
      if (o.contains("duration")) r.duration = o.at("duration").get<double>();
      doc.records.push_back(std::move(r));
    }
    const auto& agg = j.at("aggregates");
    if (!agg.at("min_slack").is_null()) doc.aggregates.min_slack = agg.at("min_slack").get<double>();
    doc.aggregates.violations = agg.at("violations").get<std::size_t>();
    for (const auto& c : doc.columns)
      if (agg.at("means").contains(c)) doc.aggregates.means.emplace_back(c, agg.at("means").at(c).get<double>());
  } catch (const json::exception& e) {
    fail(ErrorCode::Io, std::string("report: ") + e.what());
  }
  return doc;
}

CqState iid_qubit_source(std::size_t copies, double angle) {
  require(copies >= 1 && copies <= 6, ErrorCode::InvalidArgument, "iid source: 1 to 6 copies");
  ComplexVector v0(2), v1(2);
  v0 << 1.0, 0.0;
  v1 << std::cos(angle), std::sin(angle);
  const std::size_t total = std::size_t{1} << copies;
  std::vector<double> probs(total, 1.0 / static_cast<double>(total));
  std::vector<DensityOperator> conds;
  for (std::size_t z = 0; z < total; ++z) {
    ComplexVector v = ComplexVector::Ones(1);
    for (std::size_t k = 0; k < copies; ++k) v = qcore::kron(v, (z >> (copies - 1 - k)) & 1U ? v1 : v0);
    conds.push_back(DensityOperator::from_pure(PureStateVector(v, Dims(copies, 2))));
  }
  return CqState(std::move(probs), std::move(conds));
}

}  // namespace dlab::harness
