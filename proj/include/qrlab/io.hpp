#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qrlab/collimation.hpp"
#include "qrlab/heyting.hpp"
#include "qrlab/qr_number.hpp"

namespace qrlab::io {

using json = nlohmann::json;

/// Parses a JSON file; syntax errors become ValidationError with line/column.
json load_json_file(const std::filesystem::path& path);

/// Operator document: {"dim": n, "re": [[...]], "im": [[...]]} ("im" optional),
/// or a builtin name: sx, sy, sz, id<n>, ladder_q:<n>, ladder_p:<n>.
HermitianOperator operator_from_json(const json& j, const std::string& where);
HermitianOperator builtin_operator(const std::string& name);

/// State document: {"dim", "re", "im"} density matrix, or one of
/// {"pure": {"re": [...], "im": [...]}}, {"basis": k, "dim": n},
/// {"maximally_mixed": n}, {"bloch": [x, y, z]},
/// {"coherent": {"dim": n, "q": q0, "p": p0}}, {"singlet": true}.
DensityState state_from_json(const json& j, const std::string& where,
                             const std::filesystem::path& base = {});

/// {"balls": [{"center": <state or path>, "radius": r}, ...]}.
Condition condition_from_json(const json& j, const std::string& where,
                              const std::filesystem::path& base = {});

/// Expression tree: {"op": "linear", "operator": ..., "condition": ...},
/// {"op": "const", "value": v, "condition": ...}, {"op": "add"|"sub"|"mul", "args": [x, y]},
/// {"op": "scale", "factor": f, "arg": x}, {"op": "apply", "fn": name, "coefficients": [...], "arg": x}.
QrNumber qr_from_json(const json& j, const std::string& where, const std::filesystem::path& base = {});

/// {"balls": [...], "order": "auto"} or {"size": n, "order": [[i, j], ...]} (i <= j pairs).
struct PosetInput {
  std::shared_ptr<const Poset> poset;
  std::optional<BasisPoset> basis;
};
PosetInput poset_from_json(const json& j, const std::string& where, const std::filesystem::path& base = {});

json to_json(const ComplexMatrix& m);
json to_json(const DensityState& rho);
json to_json(const Condition& w);
json to_json(const Interval& i);
json to_json(const RangeInterval& r);
json to_json(const CollimationReport& r);
json to_json(const TruthValue& t);
std::string rigor_name(Rigor r);

}  // namespace qrlab::io
