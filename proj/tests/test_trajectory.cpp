#include "doctest.h"

#include <cmath>
#include <regex>

#include "histlab/errors.hpp"
#include "histlab/trajectory.hpp"
#include "support/dot_grammar.hpp"
#include "support/generators.hpp"

using namespace histlab;
namespace ht = histlab::testing;

namespace {

const CNum I{0.0, 1.0};
const double R = 1.0 / std::sqrt(2.0);

HistoryFamily x_then_y() {
  return ht::pure_family(CVector{1, 0}, {{CVector{R, R}, CVector{R, -R}}, {CVector{R, I * R}, CVector{R, -I * R}}});
}

HistoryFamily congruent_chain() {
  const double s = 1.0 / std::sqrt(3.0);
  return ht::pure_family(CVector{s, s, s}, {{CVector{1, 0, 0}, CVector{0, 1, 0}, CVector{0, 0, 1}},
                                            {CVector{0, I, 0}, CVector{0, 0, 1}, CVector{-1, 0, 0}},
                                            {CVector{0, 0, 1}, CVector{1, 0, 0}, CVector{0, -I, 0}}});
}

}  // namespace

TEST_CASE("x then y graph shape") {
  const TrajectoryGraph g = build_graph(x_then_y());
  CHECK(g.num_columns() == 3);
  CHECK(g.column_size(0) == 1);
  CHECK(g.column_size(1) == 2);
  CHECK(g.column_size(2) == 2);
  CHECK(g.edges().size() == 6);
  CHECK(std::abs(g.amplitude(kInitialNode, {1, 0}) - R) < 1e-12);
  CHECK(std::abs(g.amplitude({1, 0}, {2, 0}) - CNum(0.5, -0.5)) < 1e-12);
  CHECK(std::abs(g.amplitude({1, 1}, {2, 0}) - CNum(0.5, 0.5)) < 1e-12);
  CHECK_FALSE(g.has_edge(kInitialNode, {2, 0}));
  CHECK(g.out_edges({1, 0}).size() == 2);

  const ConnectivityLabel labels = connectivity(g);
  CHECK(labels.classify({1, 0}) == ConnectivityClass::singly);
  CHECK(labels.classify({2, 0}) == ConnectivityClass::doubly);
  CHECK(labels.doubly_in_column(2) == 2);
  CHECK(labels.singly_in_column(1) == 2);

  const auto paths = enumerate_paths(g, kInitialNode, {2, 1});
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].nodes[1] == NodeId{1, 0});
  // the two paths into either final event sit a quarter turn apart
  const CNum rel = paths[0].amplitude * std::conj(paths[1].amplitude);
  CHECK(std::abs(rel.real()) < 1e-12);
  CHECK(std::abs(std::abs(rel) - 0.25) < 1e-12);

  CHECK_FALSE(noninterference_check(g).holds);
  CHECK(weak_graph_check(g, {}).holds);
  CHECK(g.decoherence_level() == DecoherenceLevel::weak);
}

TEST_CASE("dot output for x then y") {
  const TrajectoryGraph g = build_graph(x_then_y());
  const std::string dot = to_dot(g, connectivity(g));
  const ht::DotGraph parsed = ht::parse_dot(dot);
  CHECK(parsed.name == "trajectory");
  CHECK(parsed.settings.at("rankdir") == "LR");
  CHECK(parsed.nodes.size() == 5);
  CHECK(parsed.edges.size() == 6);
  REQUIRE(parsed.subgraphs.size() == 3);
  for (const auto& sg : parsed.subgraphs) CHECK(sg.settings.at("rank") == "same");
  CHECK(parsed.subgraphs[2].nodes == std::vector<std::string>{"c2_e0", "c2_e1"});
  CHECK(parsed.nodes.at("init").at("label") == "psi");
  CHECK(parsed.nodes.at("c2_e1").at("fillcolor") == "gold");
  const std::regex amp(R"(-?\d\.\d{4}[+-]\d\.\d{4}i)");
  for (const auto& e : parsed.edges) {
    CHECK(std::regex_match(e.attrs.at("label"), amp));
    CHECK(e.attrs.at("label").find("-0.0000") == std::string::npos);
  }
  CHECK(parsed.edges[2].attrs.at("label") == "0.5000-0.5000i");
}

TEST_CASE("congruent chain") {
  const TrajectoryGraph g = build_graph(congruent_chain());
  const ConnectivityLabel labels = connectivity(g);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto paths = enumerate_paths(g, kInitialNode, {3, i});
    REQUIRE(paths.size() == 1);
    const auto inner_paths = enumerate_paths(g, {1, 0}, {3, i});
    for (const auto& p : inner_paths) CHECK(std::abs(std::abs(p.amplitude) - 1.0) < 1e-12);
  }
  CHECK(g.edges().size() == 3 + 3 + 3);
  CHECK(noninterference_check(g).holds);
  CHECK(g.decoherence_level() == DecoherenceLevel::medium);
  CHECK(to_dot(g, labels).find("lightblue") != std::string::npos);
}

TEST_CASE("unsupported inputs") {
  const EventSet coarse = EventSet::from_projectors(
      {CMatrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 0}}, CMatrix{{0, 0, 0}, {0, 0, 0}, {0, 0, 1}}});
  CHECK_THROWS_AS(build_graph(HistoryFamily(InitialState::pure(CVector{1, 0, 0}), {{1, coarse}})),
                  UnsupportedInputError);
  const HistoryFamily f = x_then_y();
  CHECK_THROWS_AS(build_graph(HistoryFamily(InitialState::mixed(CMatrix{{0.5, 0}, {0, 0.5}}), f.event_sets())),
                  UnsupportedInputError);
}

TEST_CASE("Schrodinger families build the Heisenberg graph") {
  const CMatrix h{{R, R}, {R, -R}};
  const EventSet z = EventSet::from_basis({CVector{1, 0}, CVector{0, 1}});
  const HistoryFamily s(InitialState::pure(CVector{1, 0}), {{1, z}, {2, z}}, Picture::schrodinger, {h, h});
  const TrajectoryGraph g = build_graph(s);
  CHECK(g.edges().size() == 6);
  CHECK(std::abs(g.amplitude({1, 1}, {2, 0}) - R) < 1e-12);
  CHECK(g.decoherence_level() == DecoherenceLevel::none);
  CHECK_FALSE(weak_graph_check(g, {}).holds);
}

TEST_CASE("property: path counts, path sums and enumeration agree") {
  ht::Rng rng(17);
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t dim = 2 + trial % 3;
    const HistoryFamily f = trial % 2 ? ht::random_pure_fine_family(dim, 1 + trial % 3, rng)
                                      : ht::constructive_weak_family(dim, 4, rng).family;
    const TrajectoryGraph g = build_graph(f);
    const auto counts = path_counts_from(g, kInitialNode);
    for (std::size_t c = 1; c < g.num_columns(); ++c) {
      for (std::size_t i = 0; i < g.column_size(c); ++i) {
        const auto paths = enumerate_paths(g, kInitialNode, {c, i});
        CHECK(paths.size() == counts[c][i]);
        if (trial % 2) {
          // no edge is dropped for generic bases, so the paths resum to <e|psi>
          CNum sum = 0.0;
          for (const auto& p : paths) sum += p.amplitude;
          CHECK(std::abs(sum - inner(g.vector({c, i}), g.vector(kInitialNode))) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("property: graph conditions track the decoherence level") {
  ht::Rng rng(23);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t dim = 2 + trial % 4;
    const std::size_t cols = 2 + trial % 3;
    const HistoryFamily f = trial % 3 == 0 ? ht::random_pure_fine_family(dim, cols, rng)
                                           : ht::constructive_weak_family(dim, cols, rng, trial % 3 == 1).family;
    const TrajectoryGraph g = build_graph(f);
    const DecoherenceLevel level = decoherence_level(f);
    CHECK(weak_graph_check(g, {}).holds == (level != DecoherenceLevel::none));
    CHECK(noninterference_check(g, PairScope::from_initial).holds == (level == DecoherenceLevel::medium));
    if (trial % 3 != 0) CHECK(unconnected_span_residual(g, connectivity(g)) < 1e-9);
  }
}
