#include "doctest.h"

#include <cmath>
#include <string>

#include "histlab/errors.hpp"
#include "histlab/histories.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace histlab;
namespace ht = histlab::testing;

namespace {

const CNum I{0.0, 1.0};
const double R = 1.0 / std::sqrt(2.0);

std::vector<CVector> x_basis() { return {CVector{R, R}, CVector{R, -R}}; }
std::vector<CVector> y_basis() { return {CVector{R, I * R}, CVector{R, -I * R}}; }
std::vector<CVector> z_basis() { return {CVector{1, 0}, CVector{0, 1}}; }

HistoryFamily qubit_family(const std::vector<std::vector<CVector>>& bases) {
  return ht::pure_family(CVector{1, 0}, bases);
}

HistoryFamily as_density(const HistoryFamily& f) {
  const CVector& psi = f.initial().vector();
  return HistoryFamily(InitialState::mixed(CMatrix::outer(psi, psi)), f.event_sets());
}

}  // namespace

TEST_CASE("x then y: probabilities and off-diagonal entries") {
  const HistoryFamily f = qubit_family({x_basis(), y_basis()});
  const DecoherenceReport r = decoherence_functional(f);
  REQUIRE(r.size() == 4);
  for (double p : r.probabilities) CHECK(std::abs(p - 0.25) < 1e-12);

  const auto a = r.position({{0, 0}});
  const auto b = r.position({{1, 0}});
  REQUIRE(a);
  REQUIRE(b);
  CHECK(std::abs(r.d(*a, *b) - CNum(0.0, -0.25)) < 1e-12);
  CHECK(std::abs(r.d(*r.position({{0, 1}}), *r.position({{1, 1}})) - CNum(0.0, 0.25)) < 1e-12);
  // different final events
  CHECK(r.d(*a, *r.position({{1, 1}})) == CNum{0.0, 0.0});

  const DecoherenceReport weak = classify(f, ClassificationMode::weak);
  CHECK(*weak.classification == DecoherenceLevel::weak);
  CHECK(weak.violations.empty());
  CHECK(passes(weak, ClassificationMode::weak));
  const DecoherenceReport medium = classify(f, ClassificationMode::medium);
  CHECK_FALSE(passes(medium, ClassificationMode::medium));
  CHECK(medium.violations.size() == 2);
  CHECK(decoherence_level(f) == DecoherenceLevel::weak);
}

TEST_CASE("x then z is not weakly decohering") {
  const HistoryFamily f = qubit_family({x_basis(), z_basis()});
  const DecoherenceReport r = classify(f, ClassificationMode::weak);
  CHECK(*r.classification == DecoherenceLevel::none);
  const auto a = r.position({{0, 0}});
  const auto b = r.position({{1, 0}});
  CHECK(std::abs(r.d(*a, *b) - 0.25) < 1e-12);
  CHECK(r.violations.size() == 2);
}

TEST_CASE("repeated basis is medium") {
  const HistoryFamily f = qubit_family({x_basis(), x_basis(), x_basis()});
  CHECK(*classify(f, ClassificationMode::medium).classification == DecoherenceLevel::medium);
}

TEST_CASE("chain operator puts the latest projector leftmost") {
  const HistoryFamily f = qubit_family({x_basis(), y_basis()});
  const CMatrix px = f.event_set(0).projector(0);
  const CMatrix py = f.event_set(1).projector(0);
  const CMatrix c = chain_operator(f, {{0, 0}});
  CHECK(max_abs_diff(c, py * px) < 1e-15);
  CHECK(max_abs_diff(c, px * py) > 0.1);
  CHECK(std::abs(history_probability(f, {{0, 0}}) - 0.25) < 1e-12);
  CHECK_THROWS_AS(chain_operator(f, {{0}}), IndexError);
  CHECK_THROWS_AS(chain_operator(f, {{0, 2}}), IndexError);
}

TEST_CASE("Schrodinger picture with Hadamard steps") {
  const CMatrix h{{R, R}, {R, -R}};
  const std::vector<TimedEventSet> sets{{1, EventSet::from_basis(z_basis())}, {2, EventSet::from_basis(z_basis())}};
  const HistoryFamily s(InitialState::pure(CVector{1, 0}), sets, Picture::schrodinger, {h, h});
  const HistoryFamily heis = to_heisenberg(s);
  CHECK(heis.picture() == Picture::heisenberg);
  // V1 = H turns the z events into x events; V2 = H H = I leaves z.
  const HistoryFamily xz = qubit_family({x_basis(), z_basis()});
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t a = 0; a < 2; ++a) {
      CHECK(max_abs_diff(heis.event_set(k).projector(a), xz.event_set(k).projector(a)) < 1e-12);
    }
  }
  const DecoherenceReport r1 = decoherence_functional(s);
  const DecoherenceReport r2 = decoherence_functional(xz);
  for (std::size_t i = 0; i < r1.d_matrix.size(); ++i) CHECK(std::abs(r1.d_matrix[i] - r2.d_matrix[i]) < 1e-12);

  const HistoryFamily missing(InitialState::pure(CVector{1, 0}), sets, Picture::schrodinger);
  CHECK_THROWS_AS(to_heisenberg(missing), ConfigurationError);
  CHECK_THROWS_AS(HistoryFamily(InitialState::pure(CVector{1, 0}), sets, Picture::schrodinger, {h}), ValidationError);
  CHECK_THROWS_AS(
      HistoryFamily(InitialState::pure(CVector{1, 0}), sets, Picture::schrodinger, {h, CMatrix{{1, 1}, {0, 1}}}),
      ValidationError);
}

TEST_CASE("event set validation") {
  try {
    EventSet::from_basis({CVector{1, 0}}, {}, "set 1");
    FAIL("expected a ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("resolution of identity violated at set 1") == 0);
  }
  try {
    EventSet::from_projectors({CMatrix{{1, 0}, {0, 0}}, CMatrix{{0.5, 0.5}, {0.5, 0.5}}, CMatrix{{0, 0}, {0, 0.5}}},
                              {}, "set 2");
    FAIL("expected a ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("set 2") != std::string::npos);
  }
  CHECK_THROWS_AS(EventSet::from_projectors({CMatrix{{1, 0}, {0, 1}}, CMatrix{{0, 1}, {0, 0}}}), ValidationError);

  const EventSet coarse = EventSet::from_projectors(
      {CMatrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 0}}, CMatrix{{0, 0, 0}, {0, 0, 0}, {0, 0, 1}}});
  CHECK_FALSE(coarse.is_fine());
  CHECK(coarse.basis().empty());
  const EventSet fine = EventSet::from_projectors({CMatrix{{1, 0}, {0, 0}}, CMatrix{{0, 0}, {0, 1}}});
  CHECK(fine.is_fine());
  CHECK_FALSE(fine.given_as_basis());
  CHECK(EventSet::from_basis({CVector{2, 0}, CVector{0, 3}}).given_as_basis());
}

TEST_CASE("family validation") {
  const EventSet z = EventSet::from_basis(z_basis());
  CHECK_THROWS_AS(HistoryFamily(InitialState::pure(CVector{1, 0}), {{2, z}, {2, z}}), ValidationError);
  CHECK_THROWS_AS(HistoryFamily(InitialState::pure(CVector{1, 0}), {}), ValidationError);
  CHECK_THROWS_AS(HistoryFamily(InitialState::pure(CVector{1, 0, 0}), {{1, z}}), ShapeError);
  CHECK_THROWS_AS(InitialState::pure(CVector{1, 1}), ValidationError);
  CHECK_THROWS_AS(InitialState::mixed(CMatrix{{1, 0}, {0, 1}}), ValidationError);
  CHECK_THROWS_AS(InitialState::mixed(CMatrix{{1.5, 0}, {0, -0.5}}), ValidationError);
  CHECK_THROWS_AS(InitialState::mixed(CMatrix{{0.5, I}, {I, 0.5}}), ValidationError);
}

TEST_CASE("enumeration limits and support fallback") {
  std::vector<std::vector<CVector>> bases;
  for (int k = 0; k < 15; ++k) bases.push_back(k % 2 ? y_basis() : x_basis());
  const HistoryFamily f = qubit_family(bases);
  CHECK(f.history_count() == 32768);
  CHECK_THROWS_AS(enumerate_histories(f), ResourceError);
  CHECK_THROWS_AS(decoherence_functional(f, Enumeration::full), ResourceError);
  // every history survives the support pruning here, so it overflows too
  CHECK_THROWS_AS(classify(f, ClassificationMode::weak), ResourceError);

  std::vector<std::vector<CVector>> repeats(15, x_basis());
  const HistoryFamily g = qubit_family(repeats);
  const DecoherenceReport r = classify(g, ClassificationMode::medium);
  CHECK(r.enumeration == Enumeration::support);
  CHECK(r.size() == 2);
  CHECK(*r.classification == DecoherenceLevel::medium);
}

TEST_CASE("congruent pairs") {
  const EventSet x = EventSet::from_basis(x_basis());
  const EventSet permuted = EventSet::from_basis({CVector{I * R, -I * R}, CVector{R, R}});
  CHECK(is_congruent_pair(x, permuted));
  CHECK_FALSE(is_congruent_pair(x, EventSet::from_basis(y_basis())));
  const EventSet coarse = EventSet::from_projectors({CMatrix::identity(2)});
  CHECK_THROWS_AS(is_congruent_pair(x, coarse), UnsupportedInputError);
}

TEST_CASE("insertion renumbers times") {
  const HistoryFamily f = qubit_family({x_basis(), y_basis()});
  const HistoryFamily g = with_inserted_set(f, 1, EventSet::from_basis(z_basis()));
  REQUIRE(g.num_sets() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(g.event_sets()[k].time == static_cast<std::int64_t>(k + 1));
  CHECK(*classify(g, ClassificationMode::weak).classification == DecoherenceLevel::none);
  CHECK(with_appended_set(f, EventSet::from_basis(z_basis())).num_sets() == 3);
}

TEST_CASE("property: chain operators agree with the path-sum oracle") {
  ht::Rng rng(2024);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t dim = 2 + trial % 4;
    const std::size_t cols = 1 + trial % 3;
    const HistoryFamily f = ht::random_pure_fine_family(dim, cols, rng);
    const DecoherenceReport r = decoherence_functional(f);
    double worst = 0.0;
    for (std::size_t a = 0; a < r.size(); ++a) {
      for (std::size_t b = 0; b < r.size(); ++b) {
        worst = std::max(worst, std::abs(r.d(a, b) - ht::path_sum_d(f, r.histories[a], r.histories[b])));
      }
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("property: conservation, hermiticity, mixed and pure routes agree") {
  ht::Rng rng(7);
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t dim = 2 + trial % 3;
    const HistoryFamily f = ht::random_pure_fine_family(dim, 1 + trial % 3, rng);
    const DecoherenceReport pure = decoherence_functional(f);
    const DecoherenceReport mixed = decoherence_functional(as_density(f));
    REQUIRE(pure.size() == mixed.size());
    double total = 0.0;
    for (std::size_t a = 0; a < pure.size(); ++a) {
      total += pure.probabilities[a];
      for (std::size_t b = 0; b < pure.size(); ++b) {
        CHECK(std::abs(pure.d(a, b) - std::conj(pure.d(b, a))) <= 1e-12);
        CHECK(std::abs(pure.d(a, b) - mixed.d(a, b)) <= 1e-12);
      }
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);

    // genuinely mixed states conserve probability too
    const CMatrix rho = ht::random_density(dim, rng);
    const HistoryFamily m(InitialState::mixed(rho), f.event_sets());
    const DecoherenceReport rm = decoherence_functional(m);
    double tm = 0.0;
    for (double p : rm.probabilities) tm += p;
    CHECK(std::abs(tm - 1.0) <= 1e-12);
  }
}

TEST_CASE("property: support enumeration and the fast level agree with the full report") {
  ht::Rng rng(99);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t dim = 2 + trial % 4;
    const std::size_t cols = 2 + trial % 3;
    const HistoryFamily f = trial % 2 ? ht::random_pure_fine_family(dim, cols, rng)
                                      : ht::constructive_weak_family(dim, cols, rng).family;
    const auto full = *classify(f, ClassificationMode::weak, Enumeration::full).classification;
    CHECK(*classify(f, ClassificationMode::weak, Enumeration::support).classification == full);
    CHECK(decoherence_level(f, Enumeration::full) == full);
    CHECK(decoherence_level(f, Enumeration::support) == full);
  }
}

TEST_CASE("property: congruent insertion preserves the classification") {
  ht::Rng rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t dim = 2 + trial % 3;
    const HistoryFamily f = trial % 3 ? ht::constructive_weak_family(dim, 3, rng).family
                                      : ht::random_pure_fine_family(dim, 2, rng);
    const DecoherenceLevel before = decoherence_level(f);
    for (std::size_t pos = 0; pos < f.num_sets(); ++pos) {
      const HistoryFamily g = with_inserted_set(f, pos + 1, f.event_set(pos));
      CHECK(decoherence_level(g) == before);
    }
  }
}

TEST_CASE("property: generated weak families decohere weakly") {
  ht::Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto gen = ht::constructive_weak_family(2 + trial % 4, 2 + trial % 4, rng, trial % 4 != 0);
    const DecoherenceLevel level = decoherence_level(gen.family);
    CHECK(level != DecoherenceLevel::none);
    if (gen.medium) CHECK(level == DecoherenceLevel::medium);
  }
}
