#pragma once

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace latent {

using NodeIndex = std::int32_t;

/// Thrown by the text parsers; carries the 1-based line number of the offending line.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Interns opaque string ids to dense indices in first-appearance order.
class NodeIds {
public:
  NodeIndex intern(std::string_view id);
  NodeIndex find(std::string_view id) const;  // -1 when absent
  const std::string& operator[](NodeIndex i) const { return ids_[static_cast<std::size_t>(i)]; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  NodeIndex size() const noexcept { return static_cast<NodeIndex>(ids_.size()); }

  bool operator==(const NodeIds& other) const { return ids_ == other.ids_; }

private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, NodeIndex> index_;
};

struct Edge {
  NodeIndex src = 0;
  NodeIndex dst = 0;
  int weight = 1;

  bool operator==(const Edge&) const = default;
};

/// Directed (or undirected, stored once) integer-weighted graph without self-loops.
class Graph {
public:
  Graph() = default;
  explicit Graph(bool directed) : directed_(directed) {}

  NodeIndex add_node(std::string_view id) { return ids_.intern(id); }

  /// Adds an edge record. Equal duplicates are ignored, conflicting weights and
  /// self-loops throw std::invalid_argument. For undirected graphs (a,b) and
  /// (b,a) are the same record.
  void add_edge(NodeIndex src, NodeIndex dst, int weight = 1);

  bool directed() const noexcept { return directed_; }
  NodeIndex n_nodes() const noexcept { return ids_.size(); }
  const NodeIds& node_ids() const noexcept { return ids_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t n_edges() const noexcept { return edges_.size(); }

  /// Weight of the ordered pair, 0 when no record exists. Undirected graphs answer symmetrically.
  int weight(NodeIndex src, NodeIndex dst) const;
  int max_weight() const;

  bool operator==(const Graph& other) const {
    return directed_ == other.directed_ && ids_ == other.ids_ && edges_ == other.edges_;
  }

private:
  static std::uint64_t key(NodeIndex a, NodeIndex b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }

  bool directed_ = true;
  NodeIds ids_;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, std::size_t> lookup_;
};

/// One action (e.g. a post) by `author`, taken up by each node in `adopters`.
struct Action {
  NodeIndex author = 0;
  std::string action_id;
  std::vector<NodeIndex> adopters;  // ascending

  bool operator==(const Action&) const = default;
};

class CumulativeGraph {
public:
  NodeIndex add_node(std::string_view id) { return ids_.intern(id); }

  /// Returns the action index, creating the action on first sight.
  std::size_t add_action(NodeIndex author, std::string_view action_id);
  void add_adoption(std::size_t action, NodeIndex adopter);

  NodeIndex n_nodes() const noexcept { return ids_.size(); }
  const NodeIds& node_ids() const noexcept { return ids_; }
  const std::vector<Action>& actions() const noexcept { return actions_; }
  std::size_t n_actions() const noexcept { return actions_.size(); }
  /// m_j: number of actions authored by `node`.
  std::size_t actions_by(NodeIndex node) const;

  bool operator==(const CumulativeGraph& other) const {
    return ids_ == other.ids_ && actions_ == other.actions_;
  }

private:
  NodeIds ids_;
  std::vector<Action> actions_;
  std::unordered_map<std::string, std::size_t> action_lookup_;
};

/// Ordinal-weighted graph: recorded weights are levels 1..K-1, absent pairs are level 0.
struct WeightedGraph {
  Graph graph;
  int levels = 3;

  bool operator==(const WeightedGraph&) const = default;
};

/// Throws std::invalid_argument if a recorded weight falls outside [1, levels-1].
void validate_levels(const WeightedGraph& wg);

using Network = std::variant<Graph, CumulativeGraph, WeightedGraph>;

NodeIndex network_size(const Network& network);
const NodeIds& network_ids(const Network& network);

struct Degree {
  std::size_t out_degree = 0;
  std::size_t in_degree = 0;
  bool operator==(const Degree&) const = default;
};

/// Counts edge records, not weights. Undirected graphs report the incident count for both.
Degree degree(const Graph& graph, NodeIndex node);

// Text formats. Each line is tab separated; blank lines and '#' comments are ignored.
// Edge list:   src [dst [weight]]   (a single column declares an isolated node)
// Cumulative:  author [action_id [adopter]]   (two columns declare an action with no adopters)
Graph parse_edge_list(std::istream& in, bool directed);
Graph parse_edge_list(std::string_view text, bool directed);
CumulativeGraph parse_cumulative(std::istream& in);
CumulativeGraph parse_cumulative(std::string_view text);

std::string serialize_edge_list(const Graph& graph);
std::string serialize_cumulative(const CumulativeGraph& graph);

}  // namespace latent
