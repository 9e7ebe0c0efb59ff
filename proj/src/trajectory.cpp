#include "histlab/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <tuple>

#include "histlab/errors.hpp"

namespace histlab {

namespace {

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

}  // namespace

std::string node_name(NodeId n) {
  if (n.column == 0) return "init";
  return "c" + std::to_string(n.column) + "_e" + std::to_string(n.index);
}

TrajectoryGraph TrajectoryGraph::build(const HistoryFamily& family, Tolerance tol) {
  if (!family.initial().is_pure()) {
    throw UnsupportedInputError("trajectory graphs need a pure initial state");
  }
  for (std::size_t k = 0; k < family.num_sets(); ++k) {
    if (!family.event_set(k).is_fine()) {
      throw UnsupportedInputError("trajectory graphs need fine-grained events; set " + std::to_string(k + 1) +
                                  " is coarse-grained");
    }
  }

  TrajectoryGraph g;
  g.family_ = std::make_shared<const HistoryFamily>(to_heisenberg(family));
  g.level_cache_ = std::make_shared<LevelCache>();
  const HistoryFamily& f = *g.family_;
  g.dim_ = f.dim();
  g.tol_ = tol;
  g.vectors_.push_back({f.initial().vector()});
  for (std::size_t k = 0; k < f.num_sets(); ++k) g.vectors_.push_back(f.event_set(k).basis());

  g.transitions_.emplace_back();
  for (std::size_t c = 1; c < g.vectors_.size(); ++c) {
    const auto& prev = g.vectors_[c - 1];
    const auto& next = g.vectors_[c];
    CMatrix t(next.size(), prev.size());
    for (std::size_t b = 0; b < next.size(); ++b) {
      for (std::size_t a = 0; a < prev.size(); ++a) {
        t(b, a) = inner(next[b], prev[a]);
        if (std::abs(t(b, a)) > tol.eps) g.edges_.push_back({{c - 1, a}, {c, b}, t(b, a)});
      }
    }
    g.transitions_.push_back(std::move(t));
  }
  std::sort(g.edges_.begin(), g.edges_.end(), [](const Edge& x, const Edge& y) {
    return std::tie(x.from, x.to) < std::tie(y.from, y.to);
  });
  return g;
}

DecoherenceLevel TrajectoryGraph::decoherence_level() const {
  std::call_once(level_cache_->once, [this] {
    level_cache_->level = histlab::decoherence_level(*family_, Enumeration::support);
  });
  return level_cache_->level;
}

bool TrajectoryGraph::has_edge(NodeId from, NodeId to) const {
  if (to.column != from.column + 1 || to.column >= num_columns()) return false;
  return std::abs(transitions_[to.column](to.index, from.index)) > tol_.eps;
}

CNum TrajectoryGraph::amplitude(NodeId from, NodeId to) const {
  return has_edge(from, to) ? transitions_[to.column](to.index, from.index) : CNum{};
}

std::vector<Edge> TrajectoryGraph::out_edges(NodeId n) const {
  std::vector<Edge> out;
  if (n.column + 1 >= num_columns()) return out;
  for (std::size_t b = 0; b < column_size(n.column + 1); ++b) {
    const NodeId to{n.column + 1, b};
    if (has_edge(n, to)) out.push_back({n, to, amplitude(n, to)});
  }
  return out;
}

std::vector<std::vector<std::uint64_t>> path_counts_from(const TrajectoryGraph& g, NodeId source) {
  std::vector<std::vector<std::uint64_t>> counts(g.num_columns());
  for (std::size_t c = 0; c < g.num_columns(); ++c) counts[c].assign(g.column_size(c), 0);
  counts.at(source.column).at(source.index) = 1;
  for (std::size_t c = source.column + 1; c < g.num_columns(); ++c) {
    for (std::size_t b = 0; b < g.column_size(c); ++b) {
      std::uint64_t total = 0;
      for (std::size_t a = 0; a < g.column_size(c - 1); ++a) {
        if (counts[c - 1][a] && g.has_edge({c - 1, a}, {c, b})) total = saturating_add(total, counts[c - 1][a]);
      }
      counts[c][b] = total;
    }
  }
  return counts;
}

std::vector<Path> enumerate_paths(const TrajectoryGraph& g, NodeId from, NodeId to) {
  std::vector<Path> out;
  if (from.column >= to.column || to.column >= g.num_columns()) return out;

  // Nodes in the column range that can still reach `to`.
  std::vector<std::vector<bool>> reaches(g.num_columns());
  reaches[to.column].assign(g.column_size(to.column), false);
  reaches[to.column][to.index] = true;
  for (std::size_t c = to.column; c-- > from.column;) {
    reaches[c].assign(g.column_size(c), false);
    for (std::size_t a = 0; a < g.column_size(c); ++a) {
      for (std::size_t b = 0; b < g.column_size(c + 1); ++b) {
        if (reaches[c + 1][b] && g.has_edge({c, a}, {c + 1, b})) {
          reaches[c][a] = true;
          break;
        }
      }
    }
  }
  if (!reaches[from.column][from.index]) return out;

  Path current{{from}, CNum{1.0}};
  std::function<void(NodeId)> dfs = [&](NodeId n) {
    if (n == to) {
      out.push_back(current);
      return;
    }
    for (const Edge& e : g.out_edges(n)) {
      if (!reaches[e.to.column][e.to.index]) continue;
      const CNum saved = current.amplitude;
      current.nodes.push_back(e.to);
      current.amplitude *= e.amplitude;
      dfs(e.to);
      current.nodes.pop_back();
      current.amplitude = saved;
    }
  };
  dfs(from);
  return out;
}

std::string to_string(ConnectivityClass c) {
  switch (c) {
    case ConnectivityClass::unconnected: return "unconnected";
    case ConnectivityClass::singly: return "singly";
    case ConnectivityClass::doubly: return "doubly";
    case ConnectivityClass::over_connected: return "over-connected";
  }
  return "?";
}

ConnectivityClass ConnectivityLabel::classify(NodeId n) const {
  switch (count(n)) {
    case 0: return ConnectivityClass::unconnected;
    case 1: return ConnectivityClass::singly;
    case 2: return ConnectivityClass::doubly;
    default: return ConnectivityClass::over_connected;
  }
}

std::size_t ConnectivityLabel::connected_in_column(std::size_t column) const {
  const auto& col = counts.at(column);
  return static_cast<std::size_t>(std::count_if(col.begin(), col.end(), [](auto c) { return c > 0; }));
}

std::size_t ConnectivityLabel::doubly_in_column(std::size_t column) const {
  const auto& col = counts.at(column);
  return static_cast<std::size_t>(std::count(col.begin(), col.end(), 2u));
}

std::size_t ConnectivityLabel::singly_in_column(std::size_t column) const {
  const auto& col = counts.at(column);
  return static_cast<std::size_t>(std::count(col.begin(), col.end(), 1u));
}

ConnectivityLabel connectivity(const TrajectoryGraph& g) { return {path_counts_from(g, kInitialNode)}; }

namespace {

std::vector<NodeId> sources_in_scope(const TrajectoryGraph& g, PairScope scope) {
  std::vector<NodeId> sources;
  if (scope == PairScope::from_initial) return {kInitialNode};
  const ConnectivityLabel labels = connectivity(g);
  for (std::size_t c = 0; c + 1 < g.num_columns(); ++c) {
    for (std::size_t a = 0; a < g.column_size(c); ++a) {
      const NodeId n{c, a};
      if (scope == PairScope::all || labels.connected(n)) sources.push_back(n);
    }
  }
  return sources;
}

}  // namespace

NoninterferenceResult noninterference_check(const TrajectoryGraph& g, PairScope scope) {
  NoninterferenceResult result;
  for (const NodeId src : sources_in_scope(g, scope)) {
    const auto counts = path_counts_from(g, src);
    for (std::size_t c = src.column + 1; c < g.num_columns(); ++c) {
      for (std::size_t b = 0; b < g.column_size(c); ++b) {
        if (counts[c][b] > 1) {
          result.holds = false;
          result.first_violation = {src, {c, b}};
          result.path_count = counts[c][b];
          return result;
        }
      }
    }
  }
  return result;
}

WeakGraphResult weak_graph_check(const TrajectoryGraph& g, Tolerance tol) {
  WeakGraphResult result;
  for (const NodeId src : sources_in_scope(g, PairScope::connected_sources)) {
    const auto counts = path_counts_from(g, src);
    for (std::size_t c = src.column + 1; c < g.num_columns(); ++c) {
      for (std::size_t b = 0; b < g.column_size(c); ++b) {
        const NodeId dst{c, b};
        if (counts[c][b] > 2) {
          result.violations.push_back({src, dst, counts[c][b], std::nullopt});
        } else if (counts[c][b] == 2) {
          const auto paths = enumerate_paths(g, src, dst);
          const CNum a1 = paths.at(0).amplitude;
          const CNum a2 = paths.at(1).amplitude;
          const double scale = std::abs(a1) * std::abs(a2);
          const double cross = (a1 * std::conj(a2)).real();
          if (std::abs(cross) > tol.eps * scale) {
            result.violations.push_back({src, dst, 2, cross / scale});
          }
        }
      }
    }
  }
  result.holds = result.violations.empty();
  return result;
}

namespace {

std::string format_amplitude(CNum z) {
  auto round4 = [](double x) {
    const double r = std::round(x * 1e4) / 1e4;
    return r == 0.0 ? 0.0 : r;  // no "-0.0000"
  };
  const double re = round4(z.real());
  const double im = round4(z.imag());
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f%c%.4fi", re, im < 0 ? '-' : '+', std::abs(im));
  return buf;
}

const char* fill_colour(ConnectivityClass c) {
  switch (c) {
    case ConnectivityClass::unconnected: return "white";
    case ConnectivityClass::singly: return "lightblue";
    case ConnectivityClass::doubly: return "gold";
    case ConnectivityClass::over_connected: return "red";
  }
  return "white";
}

}  // namespace

std::string to_dot(const TrajectoryGraph& g, const ConnectivityLabel& labels) {
  std::ostringstream os;
  os << "digraph trajectory {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=circle, style=filled, fontsize=10];\n";
  os << "  edge [fontsize=8];\n";
  for (std::size_t c = 0; c < g.num_columns(); ++c) {
    os << "  subgraph column_" << c << " {\n";
    os << "    rank=same;\n";
    for (std::size_t i = 0; i < g.column_size(c); ++i) {
      const NodeId n{c, i};
      const ConnectivityClass cls = labels.classify(n);
      os << "    " << node_name(n) << " [label=\"" << (c == 0 ? std::string("psi") : std::to_string(c) + ":" +
                                                                                       std::to_string(i))
         << "\", fillcolor=" << fill_colour(cls) << ", tooltip=\"" << to_string(cls) << " ("
         << labels.count(n) << " paths)\"];\n";
    }
    os << "  }\n";
  }
  for (const Edge& e : g.edges()) {
    os << "  " << node_name(e.from) << " -> " << node_name(e.to) << " [label=\"" << format_amplitude(e.amplitude)
       << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

double unconnected_span_residual(const TrajectoryGraph& g, const ConnectivityLabel& labels) {
  double worst = 0.0;
  for (std::size_t c = 1; c < g.num_columns(); ++c) {
    std::vector<const CVector*> previous;
    for (std::size_t a = 0; a < g.column_size(c - 1); ++a) {
      if (!labels.connected({c - 1, a})) previous.push_back(&g.vector({c - 1, a}));
    }
    for (std::size_t b = 0; b < g.column_size(c); ++b) {
      if (labels.connected({c, b})) continue;
      const CVector& v = g.vector({c, b});
      double residual = 0.0;
      if (c == 1) {
        residual = std::abs(inner(g.vector(kInitialNode), v));
      } else {
        CVector r = v;
        for (const CVector* u : previous) {
          const CNum coef = inner(*u, v);
          for (std::size_t i = 0; i < r.dim(); ++i) r[i] -= coef * (*u)[i];
        }
        residual = r.norm();
      }
      worst = std::max(worst, residual);
    }
  }
  return worst;
}

}  // namespace histlab
