#pragma once

// JSON state files: {"dims": [...], "re": [[...]], "im": [[...]]}, row-major.
// Vectors are single-row matrices. Doubles are written in shortest
// round-trip form, so a save/load cycle is bit exact.

#include <string>

#include <json.hpp>

#include "dlab/qcore.hpp"

namespace dlab::io {

nlohmann::json to_json(const PureStateVector& psi);
nlohmann::json to_json(const DensityOperator& rho);
nlohmann::json to_json(const CqState& cq);

PureStateVector pure_state_from_json(const nlohmann::json& j);
DensityOperator density_from_json(const nlohmann::json& j);
CqState cq_state_from_json(const nlohmann::json& j);

/// True when the "re" payload has a single row and the dims describe more
/// than one amplitude, i.e. the file holds a state vector.
bool holds_vector(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace dlab::io
