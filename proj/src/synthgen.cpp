#include "latent/synthgen.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace latent {

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }

std::string node_name(Index i) { return "n" + std::to_string(i); }

}  // namespace

void validate(const SbmSpec& s) {
  if (s.block_sizes[0] < 1 || s.block_sizes[1] < 1)
    throw std::invalid_argument("block sizes must be positive");
  if (!(s.p_out > 0.0 && s.p_out <= s.p_in && s.p_in < 1.0))
    throw std::invalid_argument("need 0 < p_out <= p_in < 1");
  if (s.dim < 1) throw std::invalid_argument("dim must be at least 1");
}

void validate(const GaussianClusterSpec& s) {
  if (!(s.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!(s.separation >= 0.0)) throw std::invalid_argument("separation must be non-negative");
  if (s.n_clusters < 1 || s.n_nodes < 0) throw std::invalid_argument("invalid cluster counts");
  if (s.dim < 1) throw std::invalid_argument("dim must be at least 1");
}

double expected_sbm_distance(double p_out) {
  if (!(p_out > 0.0 && p_out <= 0.5))
    throw std::invalid_argument("p_out must lie in (0, 0.5] for zero activity and popularity");
  return std::sqrt(std::log((1.0 - p_out) / p_out));
}

double sbm_distance(double p_in, double p_out) {
  if (!(p_out > 0.0 && p_out <= p_in && p_in < 1.0))
    throw std::invalid_argument("need 0 < p_out <= p_in < 1");
  return std::sqrt(std::max(0.0, logit(p_in) - logit(p_out)));
}

LatentSample sample_latent(const SbmSpec& spec) {
  validate(spec);
  const Index n = spec.block_sizes[0] + spec.block_sizes[1];
  LatentSample out;
  out.state = LatentStated(n, spec.dim, n, 0);
  const double offset = 0.5 * logit(spec.p_in);
  out.state.alpha.setConstant(offset);
  out.state.beta.setConstant(offset);
  const double d = spec.p_in == 0.5 ? expected_sbm_distance(spec.p_out)
                                    : sbm_distance(spec.p_in, spec.p_out);
  out.labels.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const int block = i < spec.block_sizes[0] ? 0 : 1;
    out.labels[static_cast<std::size_t>(i)] = block;
    if (block == 1) out.state.positions(i, 0) = d;
  }
  return out;
}

LatentSample sample_latent(const GaussianClusterSpec& spec) {
  validate(spec);
  const Index n = spec.n_nodes;
  LatentSample out;
  out.state = LatentStated(n, spec.dim, n, 0);
  out.labels.resize(static_cast<std::size_t>(n));
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, spec.sigma);
  const double mid = 0.5 * (spec.n_clusters - 1);
  for (Index i = 0; i < n; ++i) {
    const int cluster = static_cast<int>(i * spec.n_clusters / std::max<Index>(n, 1));
    out.labels[static_cast<std::size_t>(i)] = cluster;
    for (Index d = 0; d < spec.dim; ++d) out.state.positions(i, d) = normal(rng);
    out.state.positions(i, 0) += (cluster - mid) * spec.separation;
  }
  return out;
}

LatentStated generating_state(const LatentStated& latent, const ModelConfig& model,
                              const SamplingExtras& extras) {
  LatentStated s = latent;
  switch (model.family) {
    case Family::unweighted:
      s.cuts.resize(0);
      break;
    case Family::cumulative: {
      if (extras.actions_per_author < 0) throw std::invalid_argument("negative action count");
      const Index m = extras.actions_per_author;
      s.beta = Eigen::VectorXd::Constant(latent.size() * m, extras.action_beta);
      s.cuts.resize(0);
      break;
    }
    case Family::weighted: {
      if (extras.cuts.size() != model.levels - 1)
        throw std::invalid_argument("weighted sampling needs K-1 cut points");
      for (Index k = 1; k < extras.cuts.size(); ++k)
        if (!(extras.cuts(k) < extras.cuts(k - 1)))
          throw std::invalid_argument("cut points must be strictly decreasing");
      s.cuts = extras.cuts;
      break;
    }
  }
  return s;
}

Network sample_network(const LatentStated& state, const ModelConfig& model,
                       const SamplingExtras& extras, std::uint64_t seed) {
  if (model.bipartite) throw std::invalid_argument("sampling rater/item networks is not supported");
  const Index n = state.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  auto d2 = [&](Index i, Index j) { return (state.positions.row(i) - state.positions.row(j)).squaredNorm(); };

  switch (model.family) {
    case Family::unweighted:
    case Family::weighted: {
      const bool weighted = model.family == Family::weighted;
      if (weighted && state.cuts.size() != model.levels - 1)
        throw std::invalid_argument("state must carry K-1 cut points");
      if (state.beta.size() != n) throw std::invalid_argument("state must carry one beta per node");
      Graph g(!model.undirected);
      for (Index i = 0; i < n; ++i) g.add_node(node_name(i));
      for (Index i = 0; i < n; ++i) {
        for (Index j = model.undirected ? i + 1 : 0; j < n; ++j) {
          if (i == j) continue;
          const double beta_j = model.undirected ? state.alpha(j) : state.beta(j);
          const double s = state.alpha(i) + beta_j - d2(i, j);
          const double u = uniform(rng);
          int level = 0;
          if (!weighted) {
            level = u < sigmoid(s) ? 1 : 0;
          } else {
            while (level < state.cuts.size() && u < sigmoid(state.cuts(level) + s)) ++level;
          }
          if (level > 0) g.add_edge(static_cast<NodeIndex>(i), static_cast<NodeIndex>(j), level);
        }
      }
      if (!weighted) return g;
      return WeightedGraph{std::move(g), model.levels};
    }
    case Family::cumulative: {
      const Index m = extras.actions_per_author;
      if (state.beta.size() != n * m)
        throw std::invalid_argument("state must carry one beta per generated action");
      CumulativeGraph g;
      for (Index i = 0; i < n; ++i) g.add_node(node_name(i));
      for (Index j = 0; j < n; ++j) {
        for (Index k = 0; k < m; ++k) {
          const auto action = g.add_action(static_cast<NodeIndex>(j), "a" + std::to_string(k));
          const double beta_jk = state.beta(j * m + k);
          for (Index i = 0; i < n; ++i) {
            if (i == j) continue;
            if (uniform(rng) < sigmoid(state.alpha(i) + beta_jk - d2(i, j)))
              g.add_adoption(action, static_cast<NodeIndex>(i));
          }
        }
      }
      return g;
    }
  }
  throw std::logic_error("unreachable");
}

double ground_truth_loglik(const Network& network, const LatentStated& state,
                           const ModelConfig& model) {
  return loglik(make_problem(network, model), state);
}

}  // namespace latent
