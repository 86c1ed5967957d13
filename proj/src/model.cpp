#include "latent/model.hpp"

namespace latent {

std::string to_string(Family family) {
  switch (family) {
    case Family::unweighted: return "unweighted";
    case Family::cumulative: return "cumulative";
    case Family::weighted: return "weighted";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  if (name == "unweighted") return Family::unweighted;
  if (name == "cumulative") return Family::cumulative;
  if (name == "weighted") return Family::weighted;
  throw std::invalid_argument("unknown model family '" + name + "'");
}

namespace {

Eigen::ArrayXXd ordered_pair_mask(Index n, bool undirected) {
  Eigen::ArrayXXd mask = Eigen::ArrayXXd::Ones(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      if (i == j || (undirected && i > j)) mask(i, j) = 0.0;
  return mask;
}

// Restricts the mask to rater -> rated pairs and switches off unused parameters.
void apply_bipartite_roles(Problem& p, const Graph& g) {
  if (p.undirected) throw std::invalid_argument("rater/item mode requires a directed graph");
  Eigen::ArrayXd rater = Eigen::ArrayXd::Zero(p.n);
  Eigen::ArrayXd rated = Eigen::ArrayXd::Zero(p.n);
  for (const auto& e : g.edges()) {
    rater(e.src) = 1.0;
    rated(e.dst) = 1.0;
  }
  p.pair_mask *= (rater.matrix() * rated.matrix().transpose()).array();
  p.alpha_active = rater;
  p.beta_active = rated;
}

Problem base_problem(const Graph& g, Family family) {
  Problem p;
  p.family = family;
  p.undirected = !g.directed();
  p.n = g.n_nodes();
  p.pair_mask = ordered_pair_mask(p.n, p.undirected);
  p.alpha_active = Eigen::ArrayXd::Ones(p.n);
  p.beta_active = p.undirected ? Eigen::ArrayXd::Zero(p.n) : Eigen::ArrayXd::Ones(p.n);
  return p;
}

}  // namespace

Problem make_problem(const Graph& graph) {
  Problem p = base_problem(graph, Family::unweighted);
  p.adjacency = Eigen::ArrayXXd::Zero(p.n, p.n);
  for (const auto& e : graph.edges()) {
    p.adjacency(e.src, e.dst) = 1.0;
    if (p.undirected) p.adjacency(e.dst, e.src) = 1.0;
  }
  return p;
}

Problem make_problem(const WeightedGraph& wg) {
  validate_levels(wg);
  if (wg.levels > 255) throw std::invalid_argument("at most 255 levels are supported");
  Problem p = base_problem(wg.graph, Family::weighted);
  p.levels = wg.levels;
  p.level = Eigen::ArrayXXi::Zero(p.n, p.n);
  for (const auto& e : wg.graph.edges()) {
    p.level(e.src, e.dst) = e.weight;
    if (p.undirected) p.level(e.dst, e.src) = e.weight;
  }
  return p;
}

Problem make_problem(const CumulativeGraph& graph) {
  Problem p;
  p.family = Family::cumulative;
  p.n = graph.n_nodes();
  const auto n_actions = static_cast<Index>(graph.n_actions());
  p.pair_mask = ordered_pair_mask(p.n, false);
  p.adoption = Eigen::ArrayXXd::Zero(p.n, n_actions);
  p.action_author.reserve(graph.n_actions());
  for (Index k = 0; k < n_actions; ++k) {
    const auto& action = graph.actions()[static_cast<std::size_t>(k)];
    p.action_author.push_back(action.author);
    for (auto i : action.adopters) p.adoption(i, k) = 1.0;
  }
  p.alpha_active = Eigen::ArrayXd::Ones(p.n);
  p.beta_active = Eigen::ArrayXd::Ones(n_actions);
  return p;
}

Problem make_problem(const Network& network, const ModelConfig& model) {
  Problem p;
  switch (model.family) {
    case Family::unweighted: {
      const auto* g = std::get_if<Graph>(&network);
      if (g == nullptr) throw std::invalid_argument("unweighted model needs an edge-list graph");
      p = make_problem(*g);
      if (model.bipartite) apply_bipartite_roles(p, *g);
      break;
    }
    case Family::weighted: {
      const auto* wg = std::get_if<WeightedGraph>(&network);
      if (wg == nullptr) throw std::invalid_argument("weighted model needs a weighted graph");
      if (wg->levels != model.levels)
        throw std::invalid_argument("graph level count differs from model level count");
      p = make_problem(*wg);
      if (model.bipartite) apply_bipartite_roles(p, wg->graph);
      break;
    }
    case Family::cumulative: {
      const auto* cg = std::get_if<CumulativeGraph>(&network);
      if (cg == nullptr) throw std::invalid_argument("cumulative model needs a cumulative graph");
      if (model.undirected) throw std::invalid_argument("cumulative networks are directed");
      if (model.bipartite) throw std::invalid_argument("rater/item mode is not defined for cumulative networks");
      p = make_problem(*cg);
      break;
    }
  }
  if (model.family != Family::cumulative && p.undirected != model.undirected)
    throw std::invalid_argument("graph directedness does not match the model configuration");
  return p;
}

}  // namespace latent
