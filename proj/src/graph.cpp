#include "latent/graph.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace latent {

NodeIndex NodeIds::intern(std::string_view id) {
  auto it = index_.find(std::string(id));
  if (it != index_.end()) return it->second;
  const auto idx = static_cast<NodeIndex>(ids_.size());
  ids_.emplace_back(id);
  index_.emplace(ids_.back(), idx);
  return idx;
}

NodeIndex NodeIds::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? -1 : it->second;
}

void Graph::add_edge(NodeIndex src, NodeIndex dst, int weight) {
  if (src == dst) throw std::invalid_argument("self-loop on node '" + ids_[src] + "'");
  if (weight < 0) throw std::invalid_argument("negative weight");
  if (src < 0 || dst < 0 || src >= n_nodes() || dst >= n_nodes())
    throw std::out_of_range("edge endpoint out of range");
  const auto k = directed_ ? key(src, dst) : key(std::min(src, dst), std::max(src, dst));
  if (auto it = lookup_.find(k); it != lookup_.end()) {
    if (edges_[it->second].weight != weight)
      throw std::invalid_argument("conflicting weights for edge '" + ids_[src] + "' -> '" +
                                  ids_[dst] + "'");
    return;
  }
  lookup_.emplace(k, edges_.size());
  edges_.push_back({src, dst, weight});
}

int Graph::weight(NodeIndex src, NodeIndex dst) const {
  const auto k = directed_ ? key(src, dst) : key(std::min(src, dst), std::max(src, dst));
  auto it = lookup_.find(k);
  return it == lookup_.end() ? 0 : edges_[it->second].weight;
}

int Graph::max_weight() const {
  int w = 0;
  for (const auto& e : edges_) w = std::max(w, e.weight);
  return w;
}

std::size_t CumulativeGraph::add_action(NodeIndex author, std::string_view action_id) {
  std::string key = ids_[author];
  key.push_back('\t');
  key.append(action_id);
  if (auto it = action_lookup_.find(key); it != action_lookup_.end()) return it->second;
  action_lookup_.emplace(std::move(key), actions_.size());
  actions_.push_back({author, std::string(action_id), {}});
  return actions_.size() - 1;
}

void CumulativeGraph::add_adoption(std::size_t action, NodeIndex adopter) {
  auto& a = actions_.at(action);
  if (a.author == adopter)
    throw std::invalid_argument("node '" + ids_[adopter] + "' adopts its own action");
  auto pos = std::lower_bound(a.adopters.begin(), a.adopters.end(), adopter);
  if (pos != a.adopters.end() && *pos == adopter)
    throw std::invalid_argument("repeated adoption of action '" + a.action_id + "' by '" +
                                ids_[adopter] + "'");
  a.adopters.insert(pos, adopter);
}

std::size_t CumulativeGraph::actions_by(NodeIndex node) const {
  return static_cast<std::size_t>(std::count_if(
      actions_.begin(), actions_.end(), [&](const Action& a) { return a.author == node; }));
}

void validate_levels(const WeightedGraph& wg) {
  if (wg.levels < 2) throw std::invalid_argument("level count must be at least 2");
  for (const auto& e : wg.graph.edges()) {
    if (e.weight < 1 || e.weight > wg.levels - 1)
      throw std::invalid_argument("weight " + std::to_string(e.weight) + " on edge '" +
                                  wg.graph.node_ids()[e.src] + "' -> '" +
                                  wg.graph.node_ids()[e.dst] + "' outside [1, " +
                                  std::to_string(wg.levels - 1) + "]");
  }
}

NodeIndex network_size(const Network& network) {
  return std::visit(
      [](const auto& g) -> NodeIndex {
        if constexpr (std::is_same_v<std::decay_t<decltype(g)>, WeightedGraph>)
          return g.graph.n_nodes();
        else
          return g.n_nodes();
      },
      network);
}

const NodeIds& network_ids(const Network& network) {
  return std::visit(
      [](const auto& g) -> const NodeIds& {
        if constexpr (std::is_same_v<std::decay_t<decltype(g)>, WeightedGraph>)
          return g.graph.node_ids();
        else
          return g.node_ids();
      },
      network);
}

Degree degree(const Graph& graph, NodeIndex node) {
  if (node < 0 || node >= graph.n_nodes()) throw std::out_of_range("node index out of range");
  Degree d;
  for (const auto& e : graph.edges()) {
    if (e.src == node) ++d.out_degree;
    if (e.dst == node) ++d.in_degree;
  }
  if (!graph.directed()) {
    d.out_degree += d.in_degree;
    d.in_degree = d.out_degree;
  }
  return d;
}

namespace {

// Splits a line on tabs after stripping a trailing '\r'. Returns false for blank/comment lines.
bool split_fields(std::string_view line, std::vector<std::string_view>& fields) {
  fields.clear();
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto first = line.find_first_not_of(" \t");
  if (first == std::string_view::npos || line[first] == '#') return false;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  for (auto f : fields)
    if (f.empty()) return true;  // caller rejects
  return true;
}

int parse_weight(std::string_view text, std::size_t line) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError(line, "weight '" + std::string(text) + "' is not an integer");
  if (value < 0) throw ParseError(line, "negative weight " + std::string(text));
  return value;
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    ++number;
    if (!split_fields(line, fields)) continue;
    for (auto f : fields)
      if (f.empty()) throw ParseError(number, "empty field");
    fn(number, fields);
  }
}

}  // namespace

Graph parse_edge_list(std::istream& in, bool directed) {
  Graph g(directed);
  for_each_line(in, [&](std::size_t line, const std::vector<std::string_view>& f) {
    if (f.size() > 3) throw ParseError(line, "expected at most 3 columns");
    if (f.size() == 1) {
      g.add_node(f[0]);
      return;
    }
    if (f[0] == f[1]) throw ParseError(line, "self-loop on '" + std::string(f[0]) + "'");
    const int w = f.size() == 3 ? parse_weight(f[2], line) : 1;
    const auto src = g.add_node(f[0]);
    const auto dst = g.add_node(f[1]);
    try {
      g.add_edge(src, dst, w);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line, e.what());
    }
  });
  return g;
}

Graph parse_edge_list(std::string_view text, bool directed) {
  std::istringstream in{std::string(text)};
  return parse_edge_list(in, directed);
}

CumulativeGraph parse_cumulative(std::istream& in) {
  CumulativeGraph g;
  for_each_line(in, [&](std::size_t line, const std::vector<std::string_view>& f) {
    if (f.size() > 3) throw ParseError(line, "expected at most 3 columns");
    const auto author = g.add_node(f[0]);
    if (f.size() == 1) return;
    if (f.size() == 3 && f[0] == f[2])
      throw ParseError(line, "self-adoption by '" + std::string(f[0]) + "'");
    const auto action = g.add_action(author, f[1]);
    if (f.size() == 2) return;
    const auto adopter = g.add_node(f[2]);
    try {
      g.add_adoption(action, adopter);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line, e.what());
    }
  });
  return g;
}

CumulativeGraph parse_cumulative(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_cumulative(in);
}

std::string serialize_edge_list(const Graph& graph) {
  std::ostringstream out;
  const auto& ids = graph.node_ids();
  for (NodeIndex i = 0; i < ids.size(); ++i) out << ids[i] << '\n';
  for (const auto& e : graph.edges()) {
    out << ids[e.src] << '\t' << ids[e.dst];
    if (e.weight != 1) out << '\t' << e.weight;
    out << '\n';
  }
  return out.str();
}

std::string serialize_cumulative(const CumulativeGraph& graph) {
  std::ostringstream out;
  const auto& ids = graph.node_ids();
  for (NodeIndex i = 0; i < ids.size(); ++i) out << ids[i] << '\n';
  for (const auto& a : graph.actions()) {
    if (a.adopters.empty()) {
      out << ids[a.author] << '\t' << a.action_id << '\n';
      continue;
    }
    for (auto adopter : a.adopters)
      out << ids[a.author] << '\t' << a.action_id << '\t' << ids[adopter] << '\n';
  }
  return out.str();
}

}  // namespace latent
