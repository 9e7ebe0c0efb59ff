#pragma once

// Executable checks of the structural results on fine-grained decohering
// histories, the spin-1/2 geometric condition, and the generator of
// families with the largest possible number of noncongruent transitions.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "histlab/histories.hpp"
#include "histlab/numerics.hpp"
#include "histlab/trajectory.hpp"

namespace histlab {

/// Outcome of a theorem check. `violation` on a verified input means the
/// implementation is wrong somewhere; it is never expected.
enum class Verdict { pass, precondition_failed, violation };

std::string to_string(Verdict v);

// --- path counts and phases ------------------------------------------------

struct PairPathVerdict {
  NodeId from;
  NodeId to;
  std::uint64_t path_count = 0;
  /// cos of the phase gap between the two paths, when there are two.
  std::optional<double> cos_phase_gap;
  bool pass = true;
};

struct Theorem1Report {
  Verdict verdict = Verdict::pass;
  DecoherenceLevel level = DecoherenceLevel::none;
  /// Every (connected source, later node) pair joined by at least one path.
  std::vector<PairPathVerdict> pairs;
  std::string detail;
};

/// Weak families: at most two paths per pair, and two paths at a phase gap of
/// pi/2 (|cos| <= sqrt(eps)). Medium families: at most one path per pair.
Theorem1Report check_theorem1(const TrajectoryGraph& g, Tolerance tol = {});

// --- recurrence --------------------------------------------------------------

/// A connected event at `event`, absent from column `absent_column`, that
/// reappears as `twin`.
struct Recurrence {
  NodeId event;
  std::size_t absent_column = 0;
  NodeId twin;
};

std::vector<Recurrence> detect_recurrence(const TrajectoryGraph& g, Tolerance tol = {});

// --- spin-1/2 ----------------------------------------------------------------

using Vec3 = std::array<double, 3>;

Vec3 cross(const Vec3& a, const Vec3& b);
double dot(const Vec3& a, const Vec3& b);

/// Initial polarization, first and second measurement axes.
struct TwoLevelSetup {
  Vec3 initial;
  Vec3 middle;
  Vec3 final;
};

/// (i x n) . (n x f)
double two_level_value(const TwoLevelSetup& s);

/// |(i x n) . (n x f)| <= eps. Throws DegenerateInputError on non-unit vectors.
bool two_level_condition(const TwoLevelSetup& s, Tolerance tol = {});

/// (I + sign * d . sigma) / 2
CMatrix spin_projector(const Vec3& direction, int sign);

/// Pure state polarized along `initial`, then {+-middle}, then {+-final}.
HistoryFamily two_level_family(const TwoLevelSetup& s, Tolerance tol = {});

// --- transitions -------------------------------------------------------------

enum class TransitionKind {
  congruent_identical,
  connected_increase,
  doubly_increase,
  both,
  /// None of the four allowed cases.
  none,
};

std::string to_string(TransitionKind k);

struct TransitionClass {
  TransitionKind kind = TransitionKind::none;
  long delta_connected = 0;
  long delta_doubly = 0;
  /// kind == none on a weakly decohering graph.
  bool alarm = false;
};

/// Transition into `column` from `column - 1` (1 <= column < num_columns).
TransitionClass classify_transition(const TrajectoryGraph& g, std::size_t column, Tolerance tol = {});

/// Transitions whose connected events change, less the first one (the one
/// that brings the family to its first time with more than one connected
/// event). This is the count bounded by max_noncongruent_bound.
std::size_t noncongruent_transition_count(const TrajectoryGraph& g, Tolerance tol = {});

/// Number of transitions whose connected events change, first one included.
std::size_t changing_transition_count(const TrajectoryGraph& g, Tolerance tol = {});

struct InsertionReport {
  Verdict verdict = Verdict::pass;
  /// Inserting the candidate keeps the family weakly decohering.
  bool admissible = false;
  /// The candidate holds every connected event of the set before or after the
  /// insertion point.
  bool predicted = false;
  std::string detail;
};

/// Inserts `candidate` between event sets position-1 and position
/// (1 <= position < num_sets) and compares the recomputed decoherence with the
/// congruence prediction. Throws ShapeError on a dimension mismatch.
InsertionReport insertion_admissible(const HistoryFamily& f, std::size_t position, const EventSet& candidate,
                                     Tolerance tol = {});

/// n + floor(n/2) - 2. Throws DomainError for n < 2.
std::size_t max_noncongruent_bound(std::size_t n);

struct WitnessFamily {
  HistoryFamily family;
  std::size_t n = 0;
  /// One entry per graph column 1..m.
  std::vector<TransitionClass> transitions;
  std::size_t noncongruent_count = 0;
};

/// Weakly decohering family in dimension n with exactly
/// max_noncongruent_bound(n) noncongruent transitions after t1. A nonzero seed
/// rotates the whole construction by a random unitary frame. Throws
/// DomainError outside 2 <= n <= 8 and InternalError if self-verification fails.
WitnessFamily generate_maximal_family(std::size_t n, std::uint64_t seed = 0);

// --- block structure ---------------------------------------------------------

/// Node indices of one block: rows in `column`, cols in `column - 1`.
struct Block {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
};

struct BlockStructure {
  Verdict verdict = Verdict::pass;
  std::vector<Block> blocks;
  /// Largest transition amplitude touching a connected event outside every block.
  double off_block_mass = 0.0;
  std::string detail;

  std::size_t count_of_size(std::size_t k) const;
};

/// Throws PreconditionError when the connected count changes across the
/// transition or the family does not decohere weakly.
BlockStructure extract_blocks(const TrajectoryGraph& g, std::size_t column, Tolerance tol = {});

// --- discrete transition sets ------------------------------------------------

/// The 24 single-qubit Clifford unitaries, global phase fixed.
std::vector<CMatrix> single_qubit_cliffords();

/// Transition matrices for extension searches: the 24 Cliffords in dimension 2;
/// in higher dimensions each Clifford embedded on every pair of basis indices
/// (plus Clifford tensor products in dimension 4).
std::vector<CMatrix> discrete_transition_set(std::size_t dim);

/// Event set whose overlaps with `from` form `transition`: <next_b|from_a> = T(b, a).
EventSet next_event_set(const EventSet& from, const CMatrix& transition, Tolerance tol = {});

/// First transition in `candidates` that appends a noncongruent event set while
/// keeping the family weakly decohering.
std::optional<std::size_t> find_admissible_extension(const HistoryFamily& f, std::span<const CMatrix> candidates,
                                                     Tolerance tol = {});

}  // namespace histlab
