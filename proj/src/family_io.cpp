#include "histlab/family_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace histlab {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw DocumentError(where + ": " + what);
}

CNum parse_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    fail(where, "expected a complex number [re, im]");
  }
  const CNum z{j[0].get<double>(), j[1].get<double>()};
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail(where, "non-finite number");
  return z;
}

CVector parse_vector(const json& j, std::size_t dim, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of complex numbers");
  if (j.size() != dim) fail(where, "expected " + std::to_string(dim) + " entries, got " + std::to_string(j.size()));
  CVector v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = parse_complex(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

CMatrix parse_matrix(const json& j, std::size_t dim, const std::string& where) {
  if (!j.is_array()) fail(where, "expected a matrix (array of rows)");
  if (j.size() != dim) fail(where, "expected " + std::to_string(dim) + " rows, got " + std::to_string(j.size()));
  CMatrix m(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    const CVector row = parse_vector(j[r], dim, where + "[" + std::to_string(r) + "]");
    for (std::size_t c = 0; c < dim; ++c) m(r, c) = row[c];
  }
  return m;
}

std::vector<CMatrix> parse_matrix_list(const json& j, std::size_t dim, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of matrices");
  std::vector<CMatrix> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(parse_matrix(j[k], dim, where + "[" + std::to_string(k) + "]"));
  return out;
}

const json& require(const json& j, const char* key) {
  if (!j.contains(key)) fail("document", std::string("missing field \"") + key + "\"");
  return j.at(key);
}

}  // namespace

FamilyDocument parse_family_document(const json& j) {
  if (!j.is_object()) fail("document", "expected a JSON object");
  FamilyDocument doc;

  const json& dim = require(j, "dimension");
  if (!dim.is_number_unsigned() || dim.get<std::size_t>() == 0) fail("dimension", "expected a positive integer");
  doc.dimension = dim.get<std::size_t>();

  const json& init = require(j, "initial_state");
  if (!init.is_object()) fail("initial_state", "expected an object with \"vector\" or \"density_matrix\"");
  if (init.contains("vector") == init.contains("density_matrix")) {
    fail("initial_state", "give exactly one of \"vector\" or \"density_matrix\"");
  }
  if (init.contains("vector")) {
    doc.initial_state = parse_vector(init.at("vector"), doc.dimension, "initial_state.vector");
  } else {
    doc.initial_state = parse_matrix(init.at("density_matrix"), doc.dimension, "initial_state.density_matrix");
  }

  if (j.contains("picture")) {
    const json& p = j.at("picture");
    if (p == "heisenberg") {
      doc.picture = Picture::heisenberg;
    } else if (p == "schrodinger") {
      doc.picture = Picture::schrodinger;
    } else {
      fail("picture", "expected \"heisenberg\" or \"schrodinger\"");
    }
  }

  const json& sets = require(j, "event_sets");
  if (!sets.is_array()) fail("event_sets", "expected an array");
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const std::string where = "event_sets[" + std::to_string(k) + "]";
    const json& s = sets[k];
    if (!s.is_object()) fail(where, "expected an object with \"basis\" or \"projectors\"");
    if (s.contains("basis") == s.contains("projectors")) fail(where, "give exactly one of \"basis\" or \"projectors\"");
    EventSetDocument es;
    if (s.contains("time")) {
      if (!s.at("time").is_number_integer()) fail(where + ".time", "expected an integer");
      es.time = s.at("time").get<std::int64_t>();
    }
    if (s.contains("basis")) {
      const json& b = s.at("basis");
      if (!b.is_array()) fail(where + ".basis", "expected an array of vectors");
      std::vector<CVector> vs;
      for (std::size_t i = 0; i < b.size(); ++i) {
        vs.push_back(parse_vector(b[i], doc.dimension, where + ".basis[" + std::to_string(i) + "]"));
      }
      es.events = std::move(vs);
    } else {
      es.events = parse_matrix_list(s.at("projectors"), doc.dimension, where + ".projectors");
    }
    doc.event_sets.push_back(std::move(es));
  }

  if (j.contains("interval_unitaries")) {
    doc.interval_unitaries = parse_matrix_list(j.at("interval_unitaries"), doc.dimension, "interval_unitaries");
  }
  if (j.contains("eps")) {
    if (!j.at("eps").is_number()) fail("eps", "expected a number");
    doc.eps = j.at("eps").get<double>();
  }
  return doc;
}

FamilyDocument read_family_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DocumentError(path.string() + ": cannot open file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DocumentError(path.string() + ": " + e.what());
  }
  return parse_family_document(j);
}

json complex_to_json(CNum z) { return json::array({z.real(), z.imag()}); }

json vector_to_json(const CVector& v) {
  json out = json::array();
  for (const CNum z : v) out.push_back(complex_to_json(z));
  return out;
}

json matrix_to_json(const CMatrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

json to_json(const FamilyDocument& doc) {
  json j;
  j["dimension"] = doc.dimension;
  if (const auto* v = std::get_if<CVector>(&doc.initial_state)) {
    j["initial_state"] = {{"vector", vector_to_json(*v)}};
  } else {
    j["initial_state"] = {{"density_matrix", matrix_to_json(std::get<CMatrix>(doc.initial_state))}};
  }
  j["picture"] = doc.picture == Picture::heisenberg ? "heisenberg" : "schrodinger";
  json sets = json::array();
  for (const auto& es : doc.event_sets) {
    json s = json::object();
    if (es.time) s["time"] = *es.time;
    if (const auto* basis = std::get_if<std::vector<CVector>>(&es.events)) {
      json b = json::array();
      for (const auto& v : *basis) b.push_back(vector_to_json(v));
      s["basis"] = std::move(b);
    } else {
      json p = json::array();
      for (const auto& m : std::get<std::vector<CMatrix>>(es.events)) p.push_back(matrix_to_json(m));
      s["projectors"] = std::move(p);
    }
    sets.push_back(std::move(s));
  }
  j["event_sets"] = std::move(sets);
  if (doc.interval_unitaries) {
    json u = json::array();
    for (const auto& m : *doc.interval_unitaries) u.push_back(matrix_to_json(m));
    j["interval_unitaries"] = std::move(u);
  }
  if (doc.eps) j["eps"] = *doc.eps;
  return j;
}

Tolerance document_tolerance(const FamilyDocument& doc, std::optional<double> eps_override) {
  try {
    if (eps_override) return Tolerance(*eps_override);
    if (doc.eps) return Tolerance(*doc.eps);
  } catch (const DomainError& e) {
    throw DocumentError(std::string("eps: ") + e.what());
  }
  return Tolerance{};
}

HistoryFamily to_family(const FamilyDocument& doc, std::optional<double> eps_override) {
  const Tolerance tol = document_tolerance(doc, eps_override);
  try {
    InitialState init = std::holds_alternative<CVector>(doc.initial_state)
                            ? InitialState::pure(std::get<CVector>(doc.initial_state), tol)
                            : InitialState::mixed(std::get<CMatrix>(doc.initial_state), tol);
    std::vector<TimedEventSet> sets;
    for (std::size_t k = 0; k < doc.event_sets.size(); ++k) {
      const auto& es = doc.event_sets[k];
      const std::string label = "set " + std::to_string(k + 1);
      const std::int64_t time = es.time.value_or(static_cast<std::int64_t>(k + 1));
      if (const auto* basis = std::get_if<std::vector<CVector>>(&es.events)) {
        sets.push_back({time, EventSet::from_basis(*basis, tol, label)});
      } else {
        sets.push_back({time, EventSet::from_projectors(std::get<std::vector<CMatrix>>(es.events), tol, label)});
      }
    }
    return HistoryFamily(std::move(init), std::move(sets), doc.picture, doc.interval_unitaries.value_or(std::vector<CMatrix>{}),
                         tol);
  } catch (const DocumentError&) {
    throw;
  } catch (const Error& e) {
    throw DocumentError(e.what());
  }
}

FamilyDocument to_document(const HistoryFamily& f) {
  FamilyDocument doc;
  doc.dimension = f.dim();
  if (f.initial().is_pure()) {
    doc.initial_state = f.initial().vector();
  } else {
    doc.initial_state = f.initial().density();
  }
  doc.picture = f.picture();
  for (const auto& s : f.event_sets()) {
    EventSetDocument es;
    es.time = s.time;
    if (s.events.is_fine()) {
      es.events = s.events.basis();
    } else {
      es.events = s.events.projectors();
    }
    doc.event_sets.push_back(std::move(es));
  }
  if (!f.interval_unitaries().empty()) doc.interval_unitaries = f.interval_unitaries();
  if (f.tolerance().eps != Tolerance{}.eps) doc.eps = f.tolerance().eps;
  return doc;
}

}  // namespace histlab
