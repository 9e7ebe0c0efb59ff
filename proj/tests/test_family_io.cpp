#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <string>

#include "histlab/errors.hpp"
#include "histlab/family_io.hpp"
#include "histlab/theorems.hpp"

using namespace histlab;
using nlohmann::json;

namespace {

const std::filesystem::path kData = HISTLAB_DATA_DIR;

json load_json(const std::string& name) {
  std::ifstream in(kData / name);
  return json::parse(in);
}

std::string parse_error(const json& j) {
  try {
    parse_family_document(j);
  } catch (const DocumentError& e) {
    return e.what();
  }
  return "";
}

json xy() { return load_json("xy_qubit.json"); }

}  // namespace

TEST_CASE("shipped files round-trip") {
  for (const auto& entry : std::filesystem::directory_iterator(kData)) {
    CAPTURE(entry.path().string());
    const json raw = load_json(entry.path().filename().string());
    const FamilyDocument doc = parse_family_document(raw);
    const json back = to_json(doc);
    if (raw.contains("picture")) {
      CHECK(back == raw);
    } else {
      json with_picture = raw;
      with_picture["picture"] = "heisenberg";
      CHECK(back == with_picture);
    }
    CHECK(to_json(parse_family_document(back)) == back);
  }
}

TEST_CASE("x then y document") {
  const FamilyDocument doc = read_family_document(kData / "xy_qubit.json");
  CHECK(doc.dimension == 2);
  CHECK(doc.event_sets.size() == 2);
  CHECK(*doc.event_sets[1].time == 2);
  const HistoryFamily f = to_family(doc);
  CHECK(f.all_fine());
  CHECK(decoherence_level(f) == DecoherenceLevel::weak);
}

TEST_CASE("located parse errors") {
  json j = xy();
  j["event_sets"][1]["basis"][0][1] = "oops";
  CHECK(parse_error(j) == "event_sets[1].basis[0][1]: expected a complex number [re, im]");

  j = xy();
  j.erase("dimension");
  CHECK(parse_error(j) == "document: missing field \"dimension\"");

  j = xy();
  j["initial_state"]["vector"].push_back(json::array({0, 0}));
  CHECK(parse_error(j) == "initial_state.vector: expected 2 entries, got 3");

  j = xy();
  j["picture"] = "interaction";
  CHECK(parse_error(j).rfind("picture:", 0) == 0);

  j = xy();
  j["event_sets"][0]["projectors"] = json::array();
  CHECK(parse_error(j) == "event_sets[0]: give exactly one of \"basis\" or \"projectors\"");

  j = xy();
  j["event_sets"][0]["time"] = 1.5;
  CHECK(parse_error(j) == "event_sets[0].time: expected an integer");

  CHECK(parse_error(json::array()) == "document: expected a JSON object");
  CHECK_THROWS_AS(read_family_document(kData / "does_not_exist.json"), DocumentError);
}

TEST_CASE("validation errors name the event set") {
  try {
    to_family(read_family_document(kData / "incomplete.json"));
    FAIL("expected a DocumentError");
  } catch (const DocumentError& e) {
    CHECK(std::string(e.what()).rfind("resolution of identity violated at set 1", 0) == 0);
  }
  json j = xy();
  j["event_sets"][1]["time"] = 1;
  CHECK_THROWS_AS(to_family(parse_family_document(j)), DocumentError);
}

TEST_CASE("tolerance precedence") {
  FamilyDocument doc = read_family_document(kData / "xy_qubit.json");
  CHECK(document_tolerance(doc).eps == 1e-9);
  doc.eps = 1e-6;
  CHECK(document_tolerance(doc).eps == 1e-6);
  CHECK(document_tolerance(doc, 1e-3).eps == 1e-3);
  CHECK(to_family(doc, 1e-4).tolerance().eps == 1e-4);
  CHECK_THROWS_AS(document_tolerance(doc, 2.0), DocumentError);
}

TEST_CASE("family to document and back") {
  const HistoryFamily w = generate_maximal_family(4, 3).family;
  const FamilyDocument doc = to_document(w);
  CHECK_FALSE(doc.eps);
  const HistoryFamily back = to_family(doc);
  REQUIRE(back.num_sets() == w.num_sets());
  for (std::size_t k = 0; k < w.num_sets(); ++k) {
    for (std::size_t a = 0; a < w.event_set(k).size(); ++a) {
      CHECK(max_abs_diff(back.event_set(k).projector(a), w.event_set(k).projector(a)) < 1e-15);
    }
  }
  const FamilyDocument mixed = to_document(to_family(read_family_document(kData / "mixed_qubit.json")));
  CHECK(std::holds_alternative<CMatrix>(mixed.initial_state));
  const FamilyDocument coarse = to_document(to_family(read_family_document(kData / "coarse.json")));
  CHECK(std::holds_alternative<std::vector<CMatrix>>(coarse.event_sets[0].events));
}
