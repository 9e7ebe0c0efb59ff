#include "histlab/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "histlab/errors.hpp"

namespace histlab {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::precondition_failed: return "precondition-not-met";
    case Verdict::violation: return "VIOLATION";
  }
  return "?";
}

std::string to_string(TransitionKind k) {
  switch (k) {
    case TransitionKind::congruent_identical: return "congruent-identical";
    case TransitionKind::connected_increase: return "connected-increase";
    case TransitionKind::doubly_increase: return "doubly-increase";
    case TransitionKind::both: return "both";
    case TransitionKind::none: return "none";
  }
  return "?";
}

namespace {

bool same_event(const CVector& a, const CVector& b, Tolerance tol) {
  return std::abs(std::abs(inner(a, b)) - 1.0) <= tol.eps;
}

std::string describe(NodeId a, NodeId b) { return node_name(a) + " -> " + node_name(b); }

// Every connected event of graph column `column` appears in `candidate`.
bool holds_connected_events(const EventSet& candidate, const TrajectoryGraph& g, const ConnectivityLabel& labels,
                            std::size_t column, Tolerance tol) {
  for (std::size_t i = 0; i < g.column_size(column); ++i) {
    if (!labels.connected({column, i})) continue;
    const CVector& v = g.vector({column, i});
    const bool found = std::any_of(candidate.basis().begin(), candidate.basis().end(),
                                   [&](const CVector& w) { return same_event(v, w, tol); });
    if (!found) return false;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------

Theorem1Report check_theorem1(const TrajectoryGraph& g, Tolerance tol) {
  Theorem1Report report;
  report.level = g.decoherence_level();
  if (report.level == DecoherenceLevel::none) {
    report.verdict = Verdict::precondition_failed;
    report.detail = "family is not weakly decohering";
    return report;
  }
  const bool medium = report.level == DecoherenceLevel::medium;
  const std::uint64_t max_paths = medium ? 1 : 2;
  const double cos_limit = std::sqrt(tol.eps);
  const ConnectivityLabel labels = connectivity(g);

  for (std::size_t c = 0; c + 1 < g.num_columns(); ++c) {
    for (std::size_t a = 0; a < g.column_size(c); ++a) {
      const NodeId src{c, a};
      if (!labels.connected(src)) continue;
      const auto counts = path_counts_from(g, src);
      for (std::size_t d = c + 1; d < g.num_columns(); ++d) {
        for (std::size_t b = 0; b < g.column_size(d); ++b) {
          const NodeId dst{d, b};
          PairPathVerdict pv{src, dst, counts[d][b], std::nullopt, true};
          if (pv.path_count == 0) continue;
          if (pv.path_count > max_paths) {
            pv.pass = false;
          } else if (pv.path_count == 2) {
            const auto paths = enumerate_paths(g, src, dst);
            const CNum a1 = paths.at(0).amplitude;
            const CNum a2 = paths.at(1).amplitude;
            pv.cos_phase_gap = (a1 * std::conj(a2)).real() / (std::abs(a1) * std::abs(a2));
            pv.pass = std::abs(*pv.cos_phase_gap) <= cos_limit;
          }
          if (!pv.pass && report.verdict == Verdict::pass) {
            report.verdict = Verdict::violation;
            std::ostringstream os;
            os << "counterexample: " << describe(src, dst) << " has " << pv.path_count << " paths";
            if (pv.cos_phase_gap) os << " with cos(phase gap) = " << *pv.cos_phase_gap;
            os << " in a " << to_string(report.level) << "ly decohering family";
            report.detail = os.str();
          }
          report.pairs.push_back(pv);
        }
      }
    }
  }
  return report;
}

std::vector<Recurrence> detect_recurrence(const TrajectoryGraph& g, Tolerance tol) {
  std::vector<Recurrence> out;
  const ConnectivityLabel labels = connectivity(g);
  for (std::size_t j = 0; j < g.num_columns(); ++j) {
    for (std::size_t a = 0; a < g.column_size(j); ++a) {
      const NodeId event{j, a};
      if (!labels.connected(event)) continue;
      const CVector& v = g.vector(event);
      std::vector<bool> present(g.num_columns(), false);
      for (std::size_t c = j + 1; c < g.num_columns(); ++c) {
        for (std::size_t b = 0; b < g.column_size(c); ++b) {
          if (same_event(g.vector({c, b}), v, tol)) present[c] = true;
        }
      }
      for (std::size_t l = j + 2; l < g.num_columns(); ++l) {
        if (!present[l]) continue;
        for (std::size_t b = 0; b < g.column_size(l); ++b) {
          if (!same_event(g.vector({l, b}), v, tol)) continue;
          for (std::size_t k = j + 1; k < l; ++k) {
            if (!present[k]) out.push_back({event, k, {l, b}});
          }
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

namespace {

void require_unit(const Vec3& v, const char* name, Tolerance tol) {
  if (std::abs(std::sqrt(dot(v, v)) - 1.0) > tol.eps) {
    throw DegenerateInputError(std::string("two-level setup: ") + name + " is not a unit vector");
  }
}

void require_unit(const TwoLevelSetup& s, Tolerance tol) {
  require_unit(s.initial, "initial direction", tol);
  require_unit(s.middle, "middle direction", tol);
  require_unit(s.final, "final direction", tol);
}

}  // namespace

double two_level_value(const TwoLevelSetup& s) {
  return dot(cross(s.initial, s.middle), cross(s.middle, s.final));
}

bool two_level_condition(const TwoLevelSetup& s, Tolerance tol) {
  require_unit(s, tol);
  return std::abs(two_level_value(s)) <= tol.eps;
}

CMatrix spin_projector(const Vec3& d, int sign) {
  const double s = sign >= 0 ? 0.5 : -0.5;
  const CNum i{0.0, 1.0};
  // (I + s' d.sigma)/2 with sigma_x, sigma_y, sigma_z in the standard basis.
  return CMatrix{{0.5 + s * d[2], s * (d[0] - i * d[1])}, {s * (d[0] + i * d[1]), 0.5 - s * d[2]}};
}

HistoryFamily two_level_family(const TwoLevelSetup& s, Tolerance tol) {
  require_unit(s, tol);
  const CVector psi = vector_from_rank1_projector(spin_projector(s.initial, +1));
  auto measurement = [&](const Vec3& axis, const std::string& label) {
    return EventSet::from_projectors({spin_projector(axis, +1), spin_projector(axis, -1)}, tol, label);
  };
  std::vector<TimedEventSet> sets;
  sets.push_back({1, measurement(s.middle, "set 1")});
  sets.push_back({2, measurement(s.final, "set 2")});
  return HistoryFamily(InitialState::pure(psi, tol), std::move(sets), Picture::heisenberg, {}, tol);
}

// ---------------------------------------------------------------------------

TransitionClass classify_transition(const TrajectoryGraph& g, std::size_t column, Tolerance tol) {
  if (column == 0 || column >= g.num_columns()) throw IndexError("transition column out of range");
  const ConnectivityLabel labels = connectivity(g);
  TransitionClass tc;
  tc.delta_connected = static_cast<long>(labels.connected_in_column(column)) -
                       static_cast<long>(labels.connected_in_column(column - 1));
  tc.delta_doubly =
      static_cast<long>(labels.doubly_in_column(column)) - static_cast<long>(labels.doubly_in_column(column - 1));

  const bool grows = tc.delta_connected >= 1;
  const bool doubles = tc.delta_doubly >= 2;
  if (grows && doubles) {
    tc.kind = TransitionKind::both;
  } else if (grows) {
    tc.kind = TransitionKind::connected_increase;
  } else if (doubles) {
    tc.kind = TransitionKind::doubly_increase;
  } else {
    bool identical = tc.delta_connected == 0;
    for (std::size_t b = 0; identical && b < g.column_size(column); ++b) {
      if (!labels.connected({column, b})) continue;
      bool matched = false;
      for (std::size_t a = 0; a < g.column_size(column - 1) && !matched; ++a) {
        matched = labels.connected({column - 1, a}) && same_event(g.vector({column, b}), g.vector({column - 1, a}), tol);
      }
      identical = matched;
    }
    tc.kind = identical ? TransitionKind::congruent_identical : TransitionKind::none;
  }
  tc.alarm = tc.kind == TransitionKind::none && g.decoherence_level() != DecoherenceLevel::none;
  return tc;
}

std::size_t changing_transition_count(const TrajectoryGraph& g, Tolerance tol) {
  std::size_t count = 0;
  for (std::size_t c = 1; c < g.num_columns(); ++c) {
    if (classify_transition(g, c, tol).kind != TransitionKind::congruent_identical) ++count;
  }
  return count;
}

std::size_t noncongruent_transition_count(const TrajectoryGraph& g, Tolerance tol) {
  const std::size_t n = changing_transition_count(g, tol);
  return n == 0 ? 0 : n - 1;
}

InsertionReport insertion_admissible(const HistoryFamily& family, std::size_t position, const EventSet& candidate,
                                     Tolerance tol) {
  if (candidate.dim() != family.dim()) throw ShapeError("candidate event set has the wrong dimension");
  InsertionReport report;
  const HistoryFamily f = to_heisenberg(family);
  if (position == 0 || position >= f.num_sets()) {
    report.verdict = Verdict::precondition_failed;
    report.detail = "insertion point must lie strictly between two event sets";
    return report;
  }
  if (!f.initial().is_pure() || !f.all_fine()) {
    report.verdict = Verdict::precondition_failed;
    report.detail = "needs a pure initial state and fine-grained events";
    return report;
  }
  const TrajectoryGraph g = build_graph(f, tol);
  if (g.decoherence_level() == DecoherenceLevel::none) {
    report.verdict = Verdict::precondition_failed;
    report.detail = "family is not weakly decohering";
    return report;
  }
  const TransitionClass tc = classify_transition(g, position + 1, tol);
  const bool one_step =
      (tc.delta_connected == 1 && tc.delta_doubly != 2) || (tc.delta_connected == 0 && tc.delta_doubly == 2);
  if (!one_step) {
    report.verdict = Verdict::precondition_failed;
    report.detail = "transition is not a single step of change (delta connected " +
                    std::to_string(tc.delta_connected) + ", delta doubly " + std::to_string(tc.delta_doubly) + ")";
    return report;
  }

  report.admissible =
      decoherence_level(with_inserted_set(f, position, candidate), Enumeration::support) != DecoherenceLevel::none;
  // Identical in the sense of the connected events; unconnected events carry
  // no amplitude and may be rearranged freely.
  const ConnectivityLabel labels = connectivity(g);
  report.predicted = candidate.is_fine() && (holds_connected_events(candidate, g, labels, position, tol) ||
                                             holds_connected_events(candidate, g, labels, position + 1, tol));
  if (report.admissible != report.predicted) {
    report.verdict = Verdict::violation;
    report.detail = report.admissible ? "a noncongruent insertion kept the family decohering"
                                      : "a congruent insertion destroyed decoherence";
  }
  return report;
}

std::size_t max_noncongruent_bound(std::size_t n) {
  if (n < 2) throw DomainError("max_noncongruent_bound needs n >= 2");
  return n + n / 2 - 2;
}

// ---------------------------------------------------------------------------

namespace {

CMatrix haar_unitary(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<CVector> cols;
  while (cols.size() < n) {
    CVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = CNum{gauss(rng), gauss(rng)};
    for (const CVector& u : cols) {
      const CNum c = inner(u, v);
      for (std::size_t i = 0; i < n; ++i) v[i] -= c * u[i];
    }
    if (v.norm() > 1e-6) cols.push_back(v.normalized());
  }
  return CMatrix::from_columns(cols);
}

// Rotates nodes (p, q) of `basis` so that <new_r|old_s> = m(r, s) on that pair.
void apply_pair_transition(std::vector<CVector>& basis, std::size_t p, std::size_t q, const CMatrix& m) {
  const CVector a = basis[p];
  const CVector b = basis[q];
  CVector np(a.dim()), nq(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    np[i] = std::conj(m(0, 0)) * a[i] + std::conj(m(0, 1)) * b[i];
    nq[i] = std::conj(m(1, 0)) * a[i] + std::conj(m(1, 1)) * b[i];
  }
  basis[p] = np;
  basis[q] = nq;
}

}  // namespace

WitnessFamily generate_maximal_family(std::size_t n, std::uint64_t seed) {
  if (n < 2 || n > 8) throw DomainError("witness dimension must lie in [2, 8]");
  const Tolerance tol;
  const double r = 1.0 / std::sqrt(2.0);
  const CNum i{0.0, 1.0};
  const CMatrix branch{{r, r}, {r, -r}};
  // Overlaps whose cross products are purely imaginary for real incoming amplitudes.
  const CMatrix interference{{(1.0 - i) / 2.0, (1.0 + i) / 2.0}, {(1.0 + i) / 2.0, (1.0 - i) / 2.0}};

  std::vector<CVector> basis;
  for (std::size_t k = 0; k < n; ++k) basis.push_back(CVector::basis(n, k));
  CVector psi(n);
  psi[0] = r;
  psi[1] = r;

  std::vector<std::vector<CVector>> columns{basis};
  for (std::size_t k = 0; k + 2 < n; ++k) {
    apply_pair_transition(basis, k + 1, k + 2, branch);
    columns.push_back(basis);
  }
  for (std::size_t p = 0; p + 1 < n; p += 2) {
    apply_pair_transition(basis, p, p + 1, interference);
    columns.push_back(basis);
  }

  if (seed != 0) {
    const CMatrix frame = haar_unitary(n, seed);
    psi = mat_vec(frame, psi);
    for (auto& col : columns) {
      for (auto& v : col) v = mat_vec(frame, v);
    }
  }

  std::vector<TimedEventSet> sets;
  for (std::size_t k = 0; k < columns.size(); ++k) {
    sets.push_back({static_cast<std::int64_t>(k + 1), EventSet::from_basis(columns[k], tol, "set " + std::to_string(k + 1))});
  }
  WitnessFamily w{HistoryFamily(InitialState::pure(psi.normalized(), tol), std::move(sets)), n, {}, 0};

  const TrajectoryGraph g = build_graph(w.family, tol);
  if (g.decoherence_level() == DecoherenceLevel::none) {
    throw InternalError("witness family for n=" + std::to_string(n) + " failed weak decoherence");
  }
  for (std::size_t c = 1; c < g.num_columns(); ++c) {
    w.transitions.push_back(classify_transition(g, c, tol));
    if (w.transitions.back().kind == TransitionKind::none) {
      throw InternalError("witness transition " + std::to_string(c) + " fits none of the allowed cases");
    }
  }
  w.noncongruent_count = noncongruent_transition_count(g, tol);
  if (w.noncongruent_count != max_noncongruent_bound(n)) {
    throw InternalError("witness for n=" + std::to_string(n) + " has " + std::to_string(w.noncongruent_count) +
                        " noncongruent transitions, expected " + std::to_string(max_noncongruent_bound(n)));
  }
  const ConnectivityLabel labels = connectivity(g);
  if (labels.connected_in_column(g.num_columns() - 1) != n) {
    throw InternalError("witness does not end with n connected events");
  }
  return w;
}

// ---------------------------------------------------------------------------

std::size_t BlockStructure::count_of_size(std::size_t k) const {
  return static_cast<std::size_t>(std::count_if(
      blocks.begin(), blocks.end(), [k](const Block& b) { return b.rows.size() == k && b.cols.size() == k; }));
}

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

BlockStructure extract_blocks(const TrajectoryGraph& g, std::size_t column, Tolerance tol) {
  if (column == 0 || column >= g.num_columns()) throw IndexError("transition column out of range");
  const ConnectivityLabel labels = connectivity(g);
  std::vector<std::size_t> sources;
  std::vector<std::size_t> targets;
  for (std::size_t a = 0; a < g.column_size(column - 1); ++a) {
    if (labels.connected({column - 1, a})) sources.push_back(a);
  }
  for (std::size_t b = 0; b < g.column_size(column); ++b) {
    if (labels.connected({column, b})) targets.push_back(b);
  }
  if (sources.size() != targets.size()) {
    throw PreconditionError("connected count changes across transition " + std::to_string(column) + " (" +
                            std::to_string(sources.size()) + " -> " + std::to_string(targets.size()) + ")");
  }
  if (g.decoherence_level() == DecoherenceLevel::none) {
    throw PreconditionError("family is not weakly decohering");
  }

  const CMatrix& t = g.transition(column);
  // Union-find over sources (0..k-1) and targets (k..2k-1) joined by support.
  const std::size_t k = sources.size();
  DisjointSets sets(2 * k);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      if (std::abs(t(targets[r], sources[c])) > tol.eps) sets.unite(c, k + r);
    }
  }

  BlockStructure out;
  std::vector<std::size_t> block_of_root(2 * k, SIZE_MAX);
  for (std::size_t x = 0; x < 2 * k; ++x) {
    const std::size_t root = sets.find(x);
    if (block_of_root[root] == SIZE_MAX) {
      block_of_root[root] = out.blocks.size();
      out.blocks.emplace_back();
    }
    Block& b = out.blocks[block_of_root[root]];
    if (x < k) {
      b.cols.push_back(sources[x]);
    } else {
      b.rows.push_back(targets[x - k]);
    }
  }
  std::vector<std::size_t> row_block(g.column_size(column), SIZE_MAX);
  std::vector<std::size_t> col_block(g.column_size(column - 1), SIZE_MAX);
  for (std::size_t bi = 0; bi < out.blocks.size(); ++bi) {
    for (std::size_t r : out.blocks[bi].rows) row_block[r] = bi;
    for (std::size_t c : out.blocks[bi].cols) col_block[c] = bi;
  }

  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.cols(); ++c) {
      const bool touches_connected = row_block[r] != SIZE_MAX || col_block[c] != SIZE_MAX;
      if (touches_connected && row_block[r] != col_block[c]) {
        out.off_block_mass = std::max(out.off_block_mass, std::abs(t(r, c)));
      }
    }
  }

  std::ostringstream problems;
  for (const Block& b : out.blocks) {
    const std::size_t rows = b.rows.size();
    const std::size_t cols = b.cols.size();
    if (rows != cols || rows == 0 || rows > 2) {
      problems << "block " << rows << "x" << cols << " at rows";
      for (auto r : b.rows) problems << ' ' << r;
      problems << "; ";
      continue;
    }
    CMatrix sub(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) sub(r, c) = t(b.rows[r], b.cols[c]);
    }
    if (!is_unitary(sub, tol)) problems << "non-unitary " << rows << "x" << cols << " block; ";
  }
  if (out.off_block_mass > tol.eps) problems << "off-block mass " << out.off_block_mass << "; ";
  if (!problems.str().empty()) {
    out.verdict = Verdict::violation;
    out.detail = "counterexample at transition " + std::to_string(column) + ": " + problems.str();
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<CMatrix> single_qubit_cliffords() {
  const double r = 1.0 / std::sqrt(2.0);
  const CNum i{0.0, 1.0};
  const CMatrix h{{r, r}, {r, -r}};
  const CMatrix s{{1.0, 0.0}, {0.0, i}};
  auto canonical = [](CMatrix m) {
    for (const CNum z : m.entries()) {
      if (std::abs(z) > 1e-9) return m * (std::abs(z) / z);
    }
    return m;
  };
  std::vector<CMatrix> group{CMatrix::identity(2)};
  for (std::size_t head = 0; head < group.size(); ++head) {
    for (const CMatrix* gen : {&h, &s}) {
      const CMatrix next = canonical(*gen * group[head]);
      const bool seen = std::any_of(group.begin(), group.end(),
                                    [&](const CMatrix& m) { return max_abs_diff(m, next) < 1e-9; });
      if (!seen) group.push_back(next);
    }
  }
  return group;
}

std::vector<CMatrix> discrete_transition_set(std::size_t dim) {
  const auto cliffords = single_qubit_cliffords();
  if (dim == 2) return cliffords;
  std::vector<CMatrix> out;
  for (std::size_t p = 0; p < dim; ++p) {
    for (std::size_t q = p + 1; q < dim; ++q) {
      for (const CMatrix& c : cliffords) {
        CMatrix m = CMatrix::identity(dim);
        m(p, p) = c(0, 0);
        m(p, q) = c(0, 1);
        m(q, p) = c(1, 0);
        m(q, q) = c(1, 1);
        out.push_back(m);
      }
    }
  }
  if (dim == 4) {
    for (const CMatrix& a : cliffords) {
      for (const CMatrix& b : cliffords) {
        CMatrix m(4, 4);
        for (std::size_t r = 0; r < 4; ++r) {
          for (std::size_t c = 0; c < 4; ++c) m(r, c) = a(r / 2, c / 2) * b(r % 2, c % 2);
        }
        out.push_back(m);
      }
    }
  }
  return out;
}

EventSet next_event_set(const EventSet& from, const CMatrix& transition, Tolerance tol) {
  if (!from.is_fine()) throw UnsupportedInputError("next_event_set needs a fine-grained event set");
  const std::size_t n = from.size();
  if (transition.rows() != n || transition.cols() != n) throw ShapeError("transition matrix has the wrong shape");
  std::vector<CVector> next;
  for (std::size_t b = 0; b < n; ++b) {
    CVector v(from.dim());
    for (std::size_t a = 0; a < n; ++a) {
      const CNum w = std::conj(transition(b, a));
      for (std::size_t i = 0; i < v.dim(); ++i) v[i] += w * from.basis()[a][i];
    }
    next.push_back(v);
  }
  return EventSet::from_basis(next, tol, "candidate set");
}

std::optional<std::size_t> find_admissible_extension(const HistoryFamily& family, std::span<const CMatrix> candidates,
                                                     Tolerance tol) {
  const HistoryFamily f = to_heisenberg(family);
  if (f.num_sets() == 0) throw PreconditionError("extension search needs at least one event set");
  const EventSet& last = f.event_set(f.num_sets() - 1);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const HistoryFamily extended = with_appended_set(f, next_event_set(last, candidates[k], tol));
    if (decoherence_level(extended, Enumeration::support) == DecoherenceLevel::none) continue;
    const TrajectoryGraph g = build_graph(extended, tol);
    if (classify_transition(g, g.num_columns() - 1, tol).kind != TransitionKind::congruent_identical) return k;
  }
  return std::nullopt;
}

}  // namespace histlab
