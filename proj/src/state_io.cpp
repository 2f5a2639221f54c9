#include "dlab/state_io.hpp"

#include <fstream>
#include <sstream>

#include "dlab/error.hpp"

namespace dlab::io {

namespace {

using nlohmann::json;

json matrix_part(const ComplexMatrix& m, bool imag) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(imag ? m(i, j).imag() : m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

json with_dims(const Dims& dims, const ComplexMatrix& m) {
  return json{{"dims", dims}, {"re", matrix_part(m, false)}, {"im", matrix_part(m, true)}};
}

ComplexMatrix parse_matrix(const json& j) {
  try {
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    require(re.is_array() && im.is_array() && re.size() == im.size() && !re.empty(),
            ErrorCode::Io, "state file: malformed re/im arrays");
    const auto rows = static_cast<Eigen::Index>(re.size());
    const auto cols = static_cast<Eigen::Index>(re.at(0).size());
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto& rr = re.at(static_cast<std::size_t>(i));
      const auto& ir = im.at(static_cast<std::size_t>(i));
      require(static_cast<Eigen::Index>(rr.size()) == cols && static_cast<Eigen::Index>(ir.size()) == cols,
              ErrorCode::Io, "state file: ragged rows");
      for (Eigen::Index k = 0; k < cols; ++k)
        m(i, k) = Complex(rr.at(static_cast<std::size_t>(k)).get<double>(),
                          ir.at(static_cast<std::size_t>(k)).get<double>());
    }
    return m;
  } catch (const json::exception& e) {
    fail(ErrorCode::Io, std::string("state file: ") + e.what());
  }
}

Dims parse_dims(const json& j) {
  try {
    return j.at("dims").get<Dims>();
  } catch (const json::exception& e) {
    fail(ErrorCode::Io, std::string("state file: ") + e.what());
  }
}

}  // namespace

json to_json(const PureStateVector& psi) {
  return with_dims(psi.dims(), psi.amplitudes().transpose());
}

json to_json(const DensityOperator& rho) { return with_dims(rho.dims(), rho.matrix()); }

json to_json(const CqState& cq) {
  json conds = json::array();
  for (const auto& c : cq.conditionals()) conds.push_back(to_json(c));
  return json{{"probs", cq.probs()}, {"conditionals", std::move(conds)}};
}

bool holds_vector(const json& j) {
  return j.contains("re") && j.at("re").is_array() && j.at("re").size() == 1 &&
         total_dim(parse_dims(j)) > 1;
}

PureStateVector pure_state_from_json(const json& j) {
  const ComplexMatrix m = parse_matrix(j);
  require(m.rows() == 1, ErrorCode::Io, "state file: a vector must be a single row");
  return PureStateVector(m.row(0).transpose(), parse_dims(j));
}

DensityOperator density_from_json(const json& j) {
  return DensityOperator(parse_matrix(j), parse_dims(j));
}

CqState cq_state_from_json(const json& j) {
  try {
    auto probs = j.at("probs").get<std::vector<double>>();
    std::vector<DensityOperator> conds;
    for (const auto& c : j.at("conditionals")) {
      if (holds_vector(c))
        conds.push_back(DensityOperator::from_pure(pure_state_from_json(c)));
      else
        conds.push_back(density_from_json(c));
    }
    return CqState(std::move(probs), std::move(conds));
  } catch (const json::exception& e) {
    fail(ErrorCode::Io, std::string("cq state file: ") + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::Io, path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::Io, "cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace dlab::io
