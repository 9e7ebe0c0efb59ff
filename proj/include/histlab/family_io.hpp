#pragma once

// JSON family documents. Complex numbers are [re, im] pairs, matrices are
// row-major nested arrays:
//
//   {
//     "dimension": 2,
//     "initial_state": {"vector": [[1, 0], [0, 0]]},      or {"density_matrix": [...]}
//     "picture": "heisenberg",                            or "schrodinger"
//     "event_sets": [{"time": 1, "basis": [[[..], [..]], ...]},
//                    {"projectors": [[[[..], ..], ..], ...]}],
//     "interval_unitaries": [...],                        optional
//     "eps": 1e-9                                         optional
//   }

#include <cstdint>
#include <filesystem>
#include <optional>
#include <variant>
#include <vector>

#include "histlab/errors.hpp"
#include "histlab/histories.hpp"
#include "json.hpp"

namespace histlab {

/// Malformed or invalid family document; the message names the offending location.
class DocumentError : public Error {
 public:
  using Error::Error;
};

struct EventSetDocument {
  std::optional<std::int64_t> time;
  /// Basis vectors or projector matrices, as written.
  std::variant<std::vector<CVector>, std::vector<CMatrix>> events;
};

struct FamilyDocument {
  std::size_t dimension = 0;
  std::variant<CVector, CMatrix> initial_state;
  Picture picture = Picture::heisenberg;
  std::vector<EventSetDocument> event_sets;
  std::optional<std::vector<CMatrix>> interval_unitaries;
  std::optional<double> eps;
};

/// Structural parse only; throws DocumentError with a JSON-path-like location.
FamilyDocument parse_family_document(const nlohmann::json& j);
FamilyDocument read_family_document(const std::filesystem::path& path);

nlohmann::json to_json(const FamilyDocument& doc);

/// Tolerance precedence: `eps_override`, then the document's eps, then 1e-9.
Tolerance document_tolerance(const FamilyDocument& doc, std::optional<double> eps_override = std::nullopt);

/// Validates the document as a history family. Validation failures are
/// rethrown as DocumentError naming the event set (1-based) at fault.
HistoryFamily to_family(const FamilyDocument& doc, std::optional<double> eps_override = std::nullopt);

/// Basis-form document for a fine-grained family with a pure initial state;
/// projector form otherwise.
FamilyDocument to_document(const HistoryFamily& f);

nlohmann::json complex_to_json(CNum z);
nlohmann::json vector_to_json(const CVector& v);
nlohmann::json matrix_to_json(const CMatrix& m);

}  // namespace histlab
