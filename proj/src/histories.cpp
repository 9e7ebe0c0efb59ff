#include "histlab/histories.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "histlab/errors.hpp"

namespace histlab {

// ---------------------------------------------------------------------------
// InitialState

InitialState InitialState::pure(CVector psi, Tolerance tol) {
  if (psi.dim() == 0) throw ValidationError("initial state: empty vector");
  if (std::abs(psi.norm() - 1.0) > tol.eps) {
    std::ostringstream os;
    os << "initial state: vector norm " << psi.norm() << " is not 1";
    throw ValidationError(os.str());
  }
  InitialState s;
  s.density_ = CMatrix::outer(psi, psi);
  s.vector_ = std::move(psi);
  return s;
}

InitialState InitialState::mixed(CMatrix rho, Tolerance tol) {
  if (!rho.is_square() || rho.rows() == 0) throw ValidationError("initial state: density matrix must be square");
  if (!is_hermitian(rho, tol)) throw ValidationError("initial state: density matrix is not Hermitian");
  const CNum tr = trace(rho);
  if (std::abs(tr - 1.0) > tol.eps) {
    std::ostringstream os;
    os << "initial state: density matrix trace " << tr.real() << " is not 1";
    throw ValidationError(os.str());
  }
  if (!is_positive_semidefinite(rho, tol)) {
    throw ValidationError("initial state: density matrix is not positive semidefinite");
  }
  InitialState s;
  s.density_ = std::move(rho);
  return s;
}

const CVector& InitialState::vector() const {
  if (!vector_) throw UnsupportedInputError("initial state is mixed, not pure");
  return *vector_;
}

// ---------------------------------------------------------------------------
// EventSet

EventSet EventSet::from_projectors(std::vector<CMatrix> projectors, Tolerance tol, const std::string& label) {
  if (projectors.empty()) throw ValidationError("resolution of identity violated at " + label + ": no events");
  const std::size_t n = projectors.front().rows();
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    const auto& p = projectors[i];
    if (!p.is_square() || p.rows() != n || n == 0) {
      throw ShapeError(label + ": projector " + std::to_string(i) + " has the wrong shape");
    }
    if (!is_hermitian(p, tol)) {
      throw ValidationError(label + ": projector " + std::to_string(i) + " is not Hermitian");
    }
    if (max_abs(p) <= tol.eps) throw ValidationError(label + ": projector " + std::to_string(i) + " is zero");
  }

  CMatrix sum(n, n);
  for (const auto& p : projectors) sum += p;
  if (max_abs_diff(sum, CMatrix::identity(n)) > tol.eps) {
    throw ValidationError("resolution of identity violated at " + label);
  }
  for (std::size_t a = 0; a < projectors.size(); ++a) {
    for (std::size_t b = 0; b < projectors.size(); ++b) {
      const CMatrix prod = projectors[a] * projectors[b];
      const CMatrix expected = a == b ? projectors[b] : CMatrix::zeros(n, n);
      if (max_abs_diff(prod, expected) > tol.eps) {
        throw ValidationError("orthogonality violated at " + label + " (projectors " + std::to_string(a) + ", " +
                              std::to_string(b) + ")");
      }
    }
  }

  EventSet e;
  e.granularity_ = std::all_of(projectors.begin(), projectors.end(),
                               [&](const CMatrix& p) { return std::abs(trace(p) - 1.0) <= tol.eps; })
                       ? Granularity::fine
                       : Granularity::coarse;
  if (e.granularity_ == Granularity::fine) {
    for (const auto& p : projectors) e.basis_.push_back(vector_from_rank1_projector(p));
  }
  e.projectors_ = std::move(projectors);
  return e;
}

EventSet EventSet::from_basis(const std::vector<CVector>& basis, Tolerance tol, const std::string& label) {
  if (basis.empty()) throw ValidationError("resolution of identity violated at " + label + ": no events");
  std::vector<CMatrix> projectors;
  std::vector<CVector> unit;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].dim() != basis.front().dim()) {
      throw ShapeError(label + ": basis vector " + std::to_string(i) + " has the wrong dimension");
    }
    if (!(basis[i].norm() > tol.eps)) {
      throw ValidationError(label + ": basis vector " + std::to_string(i) + " is zero");
    }
    projectors.push_back(projector_from_vector(basis[i], tol));
    unit.push_back(basis[i].normalized());
  }
  EventSet e = from_projectors(std::move(projectors), tol, label);
  e.basis_ = std::move(unit);
  e.given_as_basis_ = true;
  return e;
}

EventSet EventSet::conjugated_by(const CMatrix& v) const {
  const CMatrix vd = adjoint(v);
  EventSet out(*this);
  for (auto& p : out.projectors_) p = vd * p * v;
  for (auto& b : out.basis_) b = mat_vec(vd, b);
  return out;
}

// ---------------------------------------------------------------------------
// HistoryFamily

HistoryFamily::HistoryFamily(InitialState initial, std::vector<TimedEventSet> event_sets, Picture picture,
                             std::vector<CMatrix> interval_unitaries, Tolerance tol)
    : initial_(std::move(initial)),
      event_sets_(std::move(event_sets)),
      picture_(picture),
      interval_unitaries_(std::move(interval_unitaries)),
      tol_(tol) {
  if (event_sets_.empty()) throw ValidationError("a history family needs at least one event set");
  for (std::size_t k = 0; k < event_sets_.size(); ++k) {
    if (event_sets_[k].events.dim() != dim()) {
      throw ShapeError("event set " + std::to_string(k + 1) + " has dimension " +
                       std::to_string(event_sets_[k].events.dim()) + ", initial state has " + std::to_string(dim()));
    }
    if (k > 0 && event_sets_[k].time <= event_sets_[k - 1].time) {
      throw ValidationError("event set times must be strictly increasing (set " + std::to_string(k + 1) + ")");
    }
  }
  if (!interval_unitaries_.empty()) {
    if (interval_unitaries_.size() != event_sets_.size()) {
      throw ValidationError("expected " + std::to_string(event_sets_.size()) + " interval unitaries, got " +
                            std::to_string(interval_unitaries_.size()));
    }
    for (std::size_t k = 0; k < interval_unitaries_.size(); ++k) {
      const auto& u = interval_unitaries_[k];
      if (!u.is_square() || u.rows() != dim()) {
        throw ShapeError("interval unitary " + std::to_string(k + 1) + " has the wrong shape");
      }
      if (!is_unitary(u, tol_)) throw ValidationError("interval unitary " + std::to_string(k + 1) + " is not unitary");
    }
  }
}

bool HistoryFamily::all_fine() const {
  return std::all_of(event_sets_.begin(), event_sets_.end(), [](const auto& s) { return s.events.is_fine(); });
}

std::size_t HistoryFamily::history_count() const {
  std::size_t n = 1;
  for (const auto& s : event_sets_) {
    if (n > std::numeric_limits<std::size_t>::max() / s.events.size()) return std::numeric_limits<std::size_t>::max();
    n *= s.events.size();
  }
  return n;
}

// ---------------------------------------------------------------------------

std::string to_string(const HistoryIndex& idx) {
  std::string s = "(";
  for (std::size_t i = 0; i < idx.alpha.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(idx.alpha[i]);
  }
  return s + ")";
}

std::string to_string(DecoherenceLevel level) {
  switch (level) {
    case DecoherenceLevel::none: return "none";
    case DecoherenceLevel::weak: return "weak";
    case DecoherenceLevel::medium: return "medium";
  }
  return "?";
}

std::string to_string(ClassificationMode mode) { return mode == ClassificationMode::weak ? "weak" : "medium"; }

std::optional<std::size_t> DecoherenceReport::position(const HistoryIndex& idx) const {
  const auto it = std::lower_bound(histories.begin(), histories.end(), idx);
  if (it == histories.end() || *it != idx) return std::nullopt;
  return static_cast<std::size_t>(it - histories.begin());
}

HistoryFamily to_heisenberg(const HistoryFamily& f) {
  if (f.picture() == Picture::heisenberg) return f;
  if (f.interval_unitaries().size() != f.num_sets()) {
    throw ConfigurationError("Schrodinger-picture family needs one interval unitary per event set");
  }
  std::vector<TimedEventSet> sets;
  CMatrix v = CMatrix::identity(f.dim());
  for (std::size_t k = 0; k < f.num_sets(); ++k) {
    v = f.interval_unitaries()[k] * v;
    sets.push_back({f.event_sets()[k].time, f.event_set(k).conjugated_by(v)});
  }
  return HistoryFamily(f.initial(), std::move(sets), Picture::heisenberg, {}, f.tolerance());
}

namespace {

void check_index(const HistoryFamily& f, const HistoryIndex& idx) {
  if (idx.alpha.size() != f.num_sets()) {
    throw IndexError("history index " + to_string(idx) + " has " + std::to_string(idx.alpha.size()) +
                     " entries, family has " + std::to_string(f.num_sets()) + " event sets");
  }
  for (std::size_t k = 0; k < idx.alpha.size(); ++k) {
    if (idx.alpha[k] >= f.event_set(k).size()) {
      throw IndexError("history index " + to_string(idx) + " out of range at event set " + std::to_string(k + 1));
    }
  }
}

// Depth-first walk over event choices in lexicographic order. `State` is the
// running product applied to the initial state; `extend` appends one event,
// `keep` decides whether a prefix is explored further.
template <class State, class Extend, class Keep, class Visit>
void walk_histories(const HistoryFamily& f, const State& root, Extend extend, Keep keep, Visit visit) {
  HistoryIndex idx;
  idx.alpha.resize(f.num_sets());
  std::function<void(std::size_t, const State&)> rec = [&](std::size_t depth, const State& s) {
    if (depth == f.num_sets()) {
      visit(idx, s);
      return;
    }
    const auto& set = f.event_set(depth);
    for (std::size_t a = 0; a < set.size(); ++a) {
      idx.alpha[depth] = a;
      State next = extend(set, a, s);
      if (keep(next)) rec(depth + 1, next);
    }
  };
  rec(0, root);
}

// P_a v, through the basis vector when the event is rank 1.
CVector project(const EventSet& set, std::size_t a, const CVector& v) {
  if (!set.is_fine()) return mat_vec(set.projector(a), v);
  const CVector& e = set.basis()[a];
  const CNum c = inner(e, v);
  CVector out(e.dim());
  for (std::size_t i = 0; i < e.dim(); ++i) out[i] = c * e[i];
  return out;
}

// Histories ending on different events of the last set have D = 0 exactly:
// their chains meet in a product of orthogonal projectors.
bool same_final(const HistoryIndex& a, const HistoryIndex& b) { return a.alpha.back() == b.alpha.back(); }

void check_capacity(std::size_t n) {
  if (n > kMaxHistories) {
    throw ResourceError("family has " + std::to_string(n) + " histories; the limit is " +
                        std::to_string(kMaxHistories));
  }
}

}  // namespace

CMatrix chain_operator(const HistoryFamily& family, const HistoryIndex& idx) {
  check_index(family, idx);
  const HistoryFamily f = to_heisenberg(family);
  CMatrix c = CMatrix::identity(f.dim());
  for (std::size_t k = 0; k < f.num_sets(); ++k) c = f.event_set(k).projector(idx.alpha[k]) * c;
  return c;
}

double history_probability(const HistoryFamily& f, const HistoryIndex& idx) {
  const CMatrix c = chain_operator(f, idx);
  const double p = trace(c * f.initial().density() * adjoint(c)).real();
  return std::clamp(p, 0.0, 1.0);
}

std::vector<HistoryIndex> enumerate_histories(const HistoryFamily& f) {
  check_capacity(f.history_count());
  std::vector<HistoryIndex> out;
  out.reserve(f.history_count());
  walk_histories(
      f, 0, [](const EventSet&, std::size_t, int) { return 0; }, [](int) { return true; },
      [&](const HistoryIndex& idx, int) { out.push_back(idx); });
  return out;
}

DecoherenceReport decoherence_functional(const HistoryFamily& family, Enumeration how) {
  const HistoryFamily f = to_heisenberg(family);
  const double eps = f.tolerance().eps;
  if (how == Enumeration::full) check_capacity(f.history_count());

  DecoherenceReport report;
  report.enumeration = how;

  if (f.initial().is_pure()) {
    // D(a, b) = <C_b psi | C_a psi>
    std::vector<CVector> branches;
    walk_histories(
        f, f.initial().vector(), project,
        [&](const CVector& v) { return how == Enumeration::full || v.norm() > eps; },
        [&](const HistoryIndex& idx, const CVector& v) {
          if (report.histories.size() == kMaxHistories) check_capacity(kMaxHistories + 1);
          report.histories.push_back(idx);
          branches.push_back(v);
        });
    const std::size_t n = branches.size();
    report.d_matrix.resize(n * n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (same_final(report.histories[a], report.histories[b])) {
          report.d_matrix[a * n + b] = inner(branches[b], branches[a]);
        }
      }
    }
  } else {
    // D(a, b) = Tr((C_a rho) C_b^dagger)
    const CMatrix& rho = f.initial().density();
    std::vector<CMatrix> chains;
    std::vector<CMatrix> weighted;
    const double floor = eps * eps;
    walk_histories(
        f, CMatrix::identity(f.dim()), [](const EventSet& set, std::size_t a, const CMatrix& c) { return set.projector(a) * c; },
        [&](const CMatrix& c) {
          return how == Enumeration::full || trace(c * rho * adjoint(c)).real() > floor;
        },
        [&](const HistoryIndex& idx, const CMatrix& c) {
          if (report.histories.size() == kMaxHistories) check_capacity(kMaxHistories + 1);
          report.histories.push_back(idx);
          weighted.push_back(c * rho);
          chains.push_back(c);
        });
    const std::size_t n = chains.size();
    report.d_matrix.resize(n * n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (same_final(report.histories[a], report.histories[b])) {
          report.d_matrix[a * n + b] = trace_of_product_with_adjoint(weighted[a], chains[b]);
        }
      }
    }
  }

  const std::size_t n = report.histories.size();
  report.probabilities.resize(n);
  for (std::size_t a = 0; a < n; ++a) report.probabilities[a] = std::clamp(report.d(a, a).real(), 0.0, 1.0);
  return report;
}

DecoherenceReport classify(const HistoryFamily& f, ClassificationMode mode, std::optional<Enumeration> how) {
  if (!how) how = f.history_count() <= kAutoFullHistories ? Enumeration::full : Enumeration::support;
  DecoherenceReport report = decoherence_functional(f, *how);
  const double eps = f.tolerance().eps;
  bool weak = true;
  bool medium = true;
  const std::size_t n = report.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const CNum d = report.d(a, b);
      const bool weak_ok = std::abs(d.real()) <= eps;
      const bool medium_ok = std::abs(d) <= eps;
      weak = weak && weak_ok;
      medium = medium && medium_ok;
      const bool ok = mode == ClassificationMode::weak ? weak_ok : medium_ok;
      if (!ok) report.violations.push_back({report.histories[a], report.histories[b], d});
    }
  }
  report.classification = medium ? DecoherenceLevel::medium : weak ? DecoherenceLevel::weak : DecoherenceLevel::none;
  return report;
}

DecoherenceLevel decoherence_level(const HistoryFamily& family, std::optional<Enumeration> how) {
  const HistoryFamily f = to_heisenberg(family);
  if (!how) how = f.history_count() <= kAutoFullHistories ? Enumeration::full : Enumeration::support;
  if (*how == Enumeration::full) check_capacity(f.history_count());
  const double eps = f.tolerance().eps;
  const std::size_t finals = f.event_set(f.num_sets() - 1).size();
  bool medium = true;
  // Returns false on the first pair that breaks weak decoherence.
  auto scan = [&](const auto& groups, auto d_of) {
    for (const auto& g : groups) {
      for (std::size_t a = 0; a < g.size(); ++a) {
        for (std::size_t b = a + 1; b < g.size(); ++b) {
          const CNum d = d_of(g[a], g[b]);
          if (std::abs(d.real()) > eps) return false;
          if (std::abs(d) > eps) medium = false;
        }
      }
    }
    return true;
  };
  std::size_t count = 0;
  auto count_one = [&] {
    if (++count > kMaxHistories) check_capacity(count);
  };
  bool weak = false;
  if (f.initial().is_pure()) {
    std::vector<std::vector<CVector>> groups(finals);
    walk_histories(
        f, f.initial().vector(), project,
        [&](const CVector& v) { return *how == Enumeration::full || v.norm() > eps; },
        [&](const HistoryIndex& idx, const CVector& v) {
          count_one();
          groups[idx.alpha.back()].push_back(v);
        });
    weak = scan(groups, [](const CVector& a, const CVector& b) { return inner(b, a); });
  } else {
    const CMatrix& rho = f.initial().density();
    const double floor = eps * eps;
    std::vector<std::vector<std::pair<CMatrix, CMatrix>>> groups(finals);
    walk_histories(
        f, CMatrix::identity(f.dim()), [](const EventSet& set, std::size_t a, const CMatrix& c) { return set.projector(a) * c; },
        [&](const CMatrix& c) { return *how == Enumeration::full || trace(c * rho * adjoint(c)).real() > floor; },
        [&](const HistoryIndex& idx, const CMatrix& c) {
          count_one();
          groups[idx.alpha.back()].emplace_back(c * rho, c);
        });
    weak = scan(groups, [](const auto& a, const auto& b) { return trace_of_product_with_adjoint(a.first, b.second); });
  }
  if (!weak) return DecoherenceLevel::none;
  return medium ? DecoherenceLevel::medium : DecoherenceLevel::weak;
}

bool passes(const DecoherenceReport& report, ClassificationMode mode) {
  if (!report.classification) return false;
  const DecoherenceLevel level = *report.classification;
  return mode == ClassificationMode::weak ? level != DecoherenceLevel::none : level == DecoherenceLevel::medium;
}

bool is_congruent_pair(const EventSet& e1, const EventSet& e2, Tolerance tol) {
  if (!e1.is_fine() || !e2.is_fine()) {
    throw UnsupportedInputError("congruence is only defined for fine-grained event sets");
  }
  if (e1.dim() != e2.dim() || e1.size() != e2.size()) throw ShapeError("congruence check: dimension mismatch");
  const std::size_t n = e1.size();
  std::vector<int> row_hits(n, 0);
  std::vector<int> col_hits(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const double m = std::abs(inner(e2.basis()[b], e1.basis()[a]));
      if (std::abs(m - 1.0) <= tol.eps) {
        ++row_hits[a];
        ++col_hits[b];
      } else if (m > tol.eps) {
        return false;
      }
    }
  }
  return std::all_of(row_hits.begin(), row_hits.end(), [](int h) { return h == 1; }) &&
         std::all_of(col_hits.begin(), col_hits.end(), [](int h) { return h == 1; });
}

HistoryFamily with_inserted_set(const HistoryFamily& family, std::size_t position, const EventSet& candidate) {
  const HistoryFamily f = to_heisenberg(family);
  if (position > f.num_sets()) throw IndexError("insertion position out of range");
  if (candidate.dim() != f.dim()) throw ShapeError("inserted event set has the wrong dimension");
  std::vector<TimedEventSet> sets;
  std::int64_t t = 1;
  for (std::size_t k = 0; k <= f.num_sets(); ++k) {
    if (k == position) sets.push_back({t++, candidate});
    if (k < f.num_sets()) sets.push_back({t++, f.event_set(k)});
  }
  return HistoryFamily(f.initial(), std::move(sets), Picture::heisenberg, {}, f.tolerance());
}

HistoryFamily with_appended_set(const HistoryFamily& f, const EventSet& next) {
  return with_inserted_set(f, f.num_sets(), next);
}

}  // namespace histlab
