#pragma once

// History families, chain operators and the decoherence functional.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "histlab/numerics.hpp"

namespace histlab {

/// Families with more histories than this are refused (or, for classify,
/// enumerated over their nonzero-probability support only).
inline constexpr std::size_t kMaxHistories = 20'000;

/// Above this many histories classify() and decoherence_level() default to the
/// nonzero-probability support; the dense report would otherwise run to gigabytes.
inline constexpr std::size_t kAutoFullHistories = 2048;

class InitialState {
 public:
  /// Throws ValidationError unless ||psi|| = 1 within eps.
  static InitialState pure(CVector psi, Tolerance tol = {});
  /// Throws ValidationError unless rho is Hermitian, PSD and of unit trace.
  static InitialState mixed(CMatrix rho, Tolerance tol = {});

  std::size_t dim() const { return density_.rows(); }
  bool is_pure() const { return vector_.has_value(); }
  /// Only valid when is_pure().
  const CVector& vector() const;
  const CMatrix& density() const { return density_; }

 private:
  InitialState() = default;
  std::optional<CVector> vector_;
  CMatrix density_;
};

enum class Granularity { fine, coarse };

/// A complete set of orthogonal projectors at one time.
class EventSet {
 public:
  /// Validates completeness and orthogonality. `label` only shapes error text.
  static EventSet from_projectors(std::vector<CMatrix> projectors, Tolerance tol = {},
                                  const std::string& label = "event set");
  /// One rank-1 projector per basis vector; vectors are normalized first.
  static EventSet from_basis(const std::vector<CVector>& basis, Tolerance tol = {},
                             const std::string& label = "event set");

  std::size_t dim() const { return projectors_.front().rows(); }
  std::size_t size() const { return projectors_.size(); }
  const std::vector<CMatrix>& projectors() const { return projectors_; }
  const CMatrix& projector(std::size_t i) const { return projectors_.at(i); }
  Granularity granularity() const { return granularity_; }
  bool is_fine() const { return granularity_ == Granularity::fine; }
  /// Unit vectors spanning each projector. Empty for coarse-grained sets.
  const std::vector<CVector>& basis() const { return basis_; }
  /// True when the set was built from basis vectors rather than projectors.
  bool given_as_basis() const { return given_as_basis_; }

  /// V^dagger P V for every projector (and V^dagger v for basis vectors).
  EventSet conjugated_by(const CMatrix& v) const;

 private:
  EventSet() = default;
  std::vector<CMatrix> projectors_;
  std::vector<CVector> basis_;
  Granularity granularity_ = Granularity::coarse;
  bool given_as_basis_ = false;
};

enum class Picture { heisenberg, schrodinger };

struct TimedEventSet {
  std::int64_t time = 0;
  EventSet events;
};

class HistoryFamily {
 public:
  /// Times must be strictly increasing; in the Schrodinger picture one unitary
  /// per event set is required, U_k evolving from t_{k-1} (t_0 = preparation)
  /// to t_k.
  HistoryFamily(InitialState initial, std::vector<TimedEventSet> event_sets,
                Picture picture = Picture::heisenberg, std::vector<CMatrix> interval_unitaries = {},
                Tolerance tol = {});

  const InitialState& initial() const { return initial_; }
  const std::vector<TimedEventSet>& event_sets() const { return event_sets_; }
  const EventSet& event_set(std::size_t k) const { return event_sets_.at(k).events; }
  std::size_t num_sets() const { return event_sets_.size(); }
  std::size_t dim() const { return initial_.dim(); }
  Picture picture() const { return picture_; }
  const std::vector<CMatrix>& interval_unitaries() const { return interval_unitaries_; }
  Tolerance tolerance() const { return tol_; }

  bool all_fine() const;
  /// Size of the full Cartesian product of event choices, saturating.
  std::size_t history_count() const;

 private:
  InitialState initial_;
  std::vector<TimedEventSet> event_sets_;
  Picture picture_;
  std::vector<CMatrix> interval_unitaries_;
  Tolerance tol_;
};

/// One event choice per event set.
struct HistoryIndex {
  std::vector<std::size_t> alpha;

  friend bool operator==(const HistoryIndex&, const HistoryIndex&) = default;
  friend auto operator<=>(const HistoryIndex&, const HistoryIndex&) = default;
};

std::string to_string(const HistoryIndex& idx);

enum class DecoherenceLevel { none, weak, medium };
enum class ClassificationMode { weak, medium };

std::string to_string(DecoherenceLevel level);
std::string to_string(ClassificationMode mode);

struct Violation {
  HistoryIndex alpha;
  HistoryIndex beta;
  CNum value;
};

enum class Enumeration {
  /// Every element of the Cartesian product.
  full,
  /// Only histories whose prefix probability stays above eps^2.
  support,
};

struct DecoherenceReport {
  std::vector<HistoryIndex> histories;
  /// d_matrix[a * n + b] = D(histories[a], histories[b]).
  std::vector<CNum> d_matrix;
  std::vector<double> probabilities;
  Enumeration enumeration = Enumeration::full;
  std::optional<DecoherenceLevel> classification;
  std::vector<Violation> violations;

  std::size_t size() const { return histories.size(); }
  CNum d(std::size_t a, std::size_t b) const { return d_matrix[a * histories.size() + b]; }
  /// Position of idx in `histories`, if present.
  std::optional<std::size_t> position(const HistoryIndex& idx) const;
};

/// Throws ConfigurationError when interval unitaries are missing.
HistoryFamily to_heisenberg(const HistoryFamily& f);

/// C_alpha = P_{alpha_n}(t_n) ... P_{alpha_1}(t_1), latest leftmost.
CMatrix chain_operator(const HistoryFamily& f, const HistoryIndex& idx);

/// Tr(C rho C^dagger), clamped to [0, 1].
double history_probability(const HistoryFamily& f, const HistoryIndex& idx);

/// All histories in lexicographic order. Throws ResourceError above kMaxHistories.
std::vector<HistoryIndex> enumerate_histories(const HistoryFamily& f);

DecoherenceReport decoherence_functional(const HistoryFamily& f, Enumeration how = Enumeration::full);

/// Weak: |Re D| <= eps off the diagonal. Medium: |D| <= eps off the diagonal.
/// `violations` holds every failing unordered pair for the requested mode;
/// `classification` is the strongest level satisfied. Uses the full product
/// up to kAutoFullHistories, the nonzero-probability support beyond, unless
/// `how` forces one. Dropping histories of probability <= eps^2 cannot
/// change the verdict: their |D| with anything is at most eps.
DecoherenceReport classify(const HistoryFamily& f, ClassificationMode mode,
                           std::optional<Enumeration> how = std::nullopt);

bool passes(const DecoherenceReport& report, ClassificationMode mode);

/// Same verdict as classify(f, ...).classification without building the
/// report; stops at the first pair that breaks weak decoherence.
DecoherenceLevel decoherence_level(const HistoryFamily& f, std::optional<Enumeration> how = std::nullopt);

/// Fine-grained sets whose overlap matrix is a phased permutation.
/// Throws UnsupportedInputError for coarse-grained input.
bool is_congruent_pair(const EventSet& e1, const EventSet& e2, Tolerance tol = {});

/// Copy of f with `candidate` inserted before event set `position` (0 <= position <= num_sets).
/// Time labels are renumbered 1..n+1.
HistoryFamily with_inserted_set(const HistoryFamily& f, std::size_t position, const EventSet& candidate);
/// Copy of f with `next` appended after the last event set.
HistoryFamily with_appended_set(const HistoryFamily& f, const EventSet& next);

}  // namespace histlab
