#pragma once

// Trajectory graphs: one column per time, one node per fine-grained event,
// an edge wherever the transition amplitude between adjacent events exceeds
// the tolerance. Column 0 holds the pure initial state alone.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "histlab/histories.hpp"
#include "histlab/numerics.hpp"

namespace histlab {

struct NodeId {
  std::size_t column = 0;
  std::size_t index = 0;

  friend bool operator==(const NodeId&, const NodeId&) = default;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

inline constexpr NodeId kInitialNode{0, 0};

/// "init" or "c{column}_e{index}".
std::string node_name(NodeId n);

struct Edge {
  NodeId from;
  NodeId to;
  CNum amplitude;
};

struct Path {
  std::vector<NodeId> nodes;
  CNum amplitude;
};

class TrajectoryGraph {
 public:
  /// Pure initial state and fine-grained event sets only; Schrodinger-picture
  /// families are converted first. Throws UnsupportedInputError otherwise.
  static TrajectoryGraph build(const HistoryFamily& f, Tolerance tol);

  std::size_t num_columns() const { return vectors_.size(); }
  std::size_t column_size(std::size_t column) const { return vectors_.at(column).size(); }
  std::size_t dim() const { return dim_; }
  Tolerance tolerance() const { return tol_; }

  /// Heisenberg-picture unit vector of a node.
  const CVector& vector(NodeId n) const { return vectors_.at(n.column).at(n.index); }
  /// Raw amplitudes into `column` from `column - 1`: entry (b, a) = <b|a>.
  /// Entries at or below eps are kept here but have no edge.
  const CMatrix& transition(std::size_t column) const { return transitions_.at(column); }
  /// <to|from> for adjacent columns when the edge exists, zero otherwise.
  CNum amplitude(NodeId from, NodeId to) const;
  bool has_edge(NodeId from, NodeId to) const;

  const std::vector<Edge>& edges() const { return edges_; }
  /// Outgoing edges of a node, ordered by target index.
  std::vector<Edge> out_edges(NodeId n) const;

  /// The Heisenberg-picture family the graph was built from.
  const HistoryFamily& family() const { return *family_; }
  /// Decoherence level of that family; computed on first use.
  DecoherenceLevel decoherence_level() const;

 private:
  TrajectoryGraph() = default;
  std::size_t dim_ = 0;
  Tolerance tol_;
  std::vector<std::vector<CVector>> vectors_;
  std::vector<CMatrix> transitions_;  // transitions_[0] is unused
  std::vector<Edge> edges_;
  std::shared_ptr<const HistoryFamily> family_;
  struct LevelCache {
    std::once_flag once;
    DecoherenceLevel level = DecoherenceLevel::none;
  };
  std::shared_ptr<LevelCache> level_cache_;
};

inline TrajectoryGraph build_graph(const HistoryFamily& f, Tolerance tol = {}) {
  return TrajectoryGraph::build(f, tol);
}

/// All nonzero-amplitude paths between two nodes, lexicographic by node index.
std::vector<Path> enumerate_paths(const TrajectoryGraph& g, NodeId from, NodeId to);

/// Number of distinct paths from `source` to every node (zero before its column).
std::vector<std::vector<std::uint64_t>> path_counts_from(const TrajectoryGraph& g, NodeId source);

enum class ConnectivityClass { unconnected, singly, doubly, over_connected };

std::string to_string(ConnectivityClass c);

/// Path counts from the initial node.
struct ConnectivityLabel {
  std::vector<std::vector<std::uint64_t>> counts;

  std::uint64_t count(NodeId n) const { return counts.at(n.column).at(n.index); }
  ConnectivityClass classify(NodeId n) const;
  bool connected(NodeId n) const { return count(n) > 0; }
  std::size_t connected_in_column(std::size_t column) const;
  std::size_t doubly_in_column(std::size_t column) const;
  std::size_t singly_in_column(std::size_t column) const;
};

ConnectivityLabel connectivity(const TrajectoryGraph& g);

enum class PairScope {
  /// Every ordered pair of nodes in increasing columns.
  all,
  /// Pairs whose source is the initial node.
  from_initial,
  /// Pairs whose source is connected to the initial node (including it).
  connected_sources,
};

struct NoninterferenceResult {
  bool holds = true;
  std::optional<std::pair<NodeId, NodeId>> first_violation;
  std::uint64_t path_count = 0;
};

/// At most one path between any two nodes in scope.
NoninterferenceResult noninterference_check(const TrajectoryGraph& g, PairScope scope = PairScope::all);

struct GraphPairViolation {
  NodeId from;
  NodeId to;
  std::uint64_t path_count = 0;
  /// Re(amp1 conj(amp2)) / (|amp1| |amp2|) for two-path pairs.
  std::optional<double> cos_phase_gap;
};

struct WeakGraphResult {
  bool holds = true;
  std::vector<GraphPairViolation> violations;
};

/// Over pairs with a connected source: at most two paths, and two paths only
/// with |Re(a1 conj a2)| <= eps |a1| |a2|.
WeakGraphResult weak_graph_check(const TrajectoryGraph& g, Tolerance tol);

/// DOT digraph, one rank=same subgraph per column; edge labels "a+bi" at four
/// decimals; fill colour encodes the connectivity class.
std::string to_dot(const TrajectoryGraph& g, const ConnectivityLabel& labels);

/// Largest component of an unconnected event outside the span of the
/// unconnected events one column earlier. Column 0's unconnected span is
/// the orthogonal complement of the initial state.
double unconnected_span_residual(const TrajectoryGraph& g, const ConnectivityLabel& labels);

}  // namespace histlab
