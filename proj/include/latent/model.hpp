#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "latent/graph.hpp"
#include "latent/logistic.hpp"

namespace latent {

using Eigen::Index;

enum class Family { unweighted, cumulative, weighted };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

struct PriorConfig {
  bool enabled = true;
  double sigma_alpha = 10.0;
  double sigma_beta = 10.0;
  double sigma_pos = 10.0;
};

struct ModelConfig {
  Family family = Family::unweighted;
  int levels = 2;  // K, weighted family only
  bool undirected = false;
  /// Rater/item data: only pairs (rater -> rated) enter the likelihood; raters carry
  /// alpha only, rated nodes beta only. Roles are read from the edge records.
  bool bipartite = false;
  PriorConfig prior;
};

/// Node positions (one row per node) plus activity, popularity and cut-point parameters.
/// `beta` holds one entry per node, or one per action for cumulative networks.
template <typename Scalar>
struct LatentState {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix positions;
  Vector alpha;
  Vector beta;
  Vector cuts;

  LatentState() = default;
  LatentState(Index n, Index dim, Index n_beta, Index n_cuts)
      : positions(Matrix::Zero(n, dim)),
        alpha(Vector::Zero(n)),
        beta(Vector::Zero(n_beta)),
        cuts(Vector::Zero(n_cuts)) {}

  Index size() const { return positions.rows(); }
  Index dim() const { return positions.cols(); }

  template <typename Other>
  LatentState<Other> cast() const {
    LatentState<Other> out;
    out.positions = positions.template cast<Other>();
    out.alpha = alpha.template cast<Other>();
    out.beta = beta.template cast<Other>();
    out.cuts = cuts.template cast<Other>();
    return out;
  }

  bool all_finite() const {
    return positions.allFinite() && alpha.allFinite() && beta.allFinite() && cuts.allFinite();
  }

  bool operator==(const LatentState& o) const {
    return positions == o.positions && alpha == o.alpha && beta == o.beta && cuts == o.cuts;
  }
};

using LatentStated = LatentState<double>;

/// Dense view of an observed network paired with a model family. Built once and reused by
/// the likelihood and force kernels. Memory is O(n^2).
struct Problem {
  Family family = Family::unweighted;
  bool undirected = false;
  int levels = 2;
  Index n = 0;
  Eigen::ArrayXXd pair_mask;  // 1 where the ordered pair (i, j) enters the likelihood
  Eigen::ArrayXXd adjacency;  // a_ij (unweighted)
  Eigen::ArrayXXi level;      // a_ij in 0..K-1 (weighted)
  Eigen::ArrayXXd adoption;   // n x n_actions indicator (cumulative)
  std::vector<NodeIndex> action_author;
  Eigen::ArrayXd alpha_active;  // 0 for parameters excluded by the rater/item split
  Eigen::ArrayXd beta_active;

  Index n_beta() const {
    return family == Family::cumulative ? static_cast<Index>(action_author.size()) : n;
  }
  Index n_cuts() const { return family == Family::weighted ? levels - 1 : 0; }
};

Problem make_problem(const Network& network, const ModelConfig& model);
Problem make_problem(const Graph& graph);
Problem make_problem(const CumulativeGraph& graph);
Problem make_problem(const WeightedGraph& graph);

/// Throws std::invalid_argument when the state does not fit the problem or cuts are not
/// strictly decreasing.
template <typename Scalar>
void check_state(const Problem& problem, const LatentState<Scalar>& state) {
  if (state.size() != problem.n || state.alpha.size() != problem.n)
    throw std::invalid_argument("state has " + std::to_string(state.size()) +
                                " nodes, network has " + std::to_string(problem.n));
  if (state.beta.size() != problem.n_beta())
    throw std::invalid_argument("state has " + std::to_string(state.beta.size()) +
                                " beta entries, expected " + std::to_string(problem.n_beta()));
  if (state.cuts.size() != problem.n_cuts())
    throw std::invalid_argument("state has " + std::to_string(state.cuts.size()) +
                                " cut points, expected " + std::to_string(problem.n_cuts()));
  for (Index k = 1; k < state.cuts.size(); ++k)
    if (!(state.cuts(k) < state.cuts(k - 1)))
      throw std::invalid_argument("cut points must be strictly decreasing");
}

/// Squared Euclidean distances between all rows of `positions`.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> squared_distances(
    const Eigen::MatrixBase<Derived>& positions) {
  using Scalar = typename Derived::Scalar;
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Index n = positions.rows();
  Array d2 = Array::Zero(n, n);
  Array diff(n, n);
  for (Index d = 0; d < positions.cols(); ++d) {
    const auto c = positions.col(d).array();
    diff.setZero();
    diff.colwise() += c;
    diff.rowwise() -= c.transpose();
    d2 += diff.square();
  }
  return d2;
}

/// Pairwise linear predictor s_ij = alpha_i + beta_j - d_ij^2 (beta_j := alpha_j when undirected).
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> pair_logits(
    const Problem& problem, const LatentState<Scalar>& state) {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Array s = -squared_distances(state.positions);
  s.colwise() += state.alpha.array();
  if (problem.undirected)
    s.rowwise() += state.alpha.array().transpose();
  else
    s.rowwise() += state.beta.array().transpose();
  return s;
}

template <typename Derived>
auto softplus_array(const Eigen::ArrayBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return x.max(Scalar(0)) + (-x.abs()).exp().log1p();
}

template <typename Derived>
auto sigmoid_array(const Eigen::ArrayBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return Scalar(1) / (Scalar(1) + (-x).exp());
}

/// p(a_ij = 1) = logit^-1(alpha_i + beta_j - d_ij^2).
template <typename Scalar>
Scalar tie_probability(Scalar alpha_i, Scalar beta_j, Scalar d2) {
  return sigmoid(alpha_i + beta_j - d2);
}

// Ordered logit. Levels are 0..K-1 and cuts holds c_1..c_{K-1}, strictly decreasing, with
// P(a >= 0) = 1 and P(a >= K) = 0. P(a >= k) = logit^-1(c_k + s), s = alpha + beta - d^2.

/// log P(a = k | s), evaluated without forming the probability difference.
template <typename Scalar, typename CutVector>
Scalar log_level_probability(const CutVector& cuts, Scalar s, int k) {
  const Index top = cuts.size();
  if (top == 0) return Scalar(0);
  if (k == 0) return log_sigmoid<Scalar>(-(Scalar(cuts(0)) + s));
  if (k == top) return log_sigmoid<Scalar>(Scalar(cuts(top - 1)) + s);
  const Scalar u = Scalar(cuts(k - 1)) + s;
  const Scalar v = Scalar(cuts(k)) + s;
  using std::log;
  using std::max;
  // The gap factor 1 - exp(v - u) is floored at 1e-300, matching the force kernel.
  return log_sigmoid(u) + log_sigmoid(-v) + max(log1mexp(u - v), Scalar(log(Scalar(1e-300))));
}

template <typename Scalar, typename CutVector>
Scalar level_probability(int levels, const CutVector& cuts, Scalar alpha_i, Scalar beta_j,
                         Scalar d2, int k) {
  if (k < 0 || k >= levels) throw std::out_of_range("level out of range");
  if (cuts.size() != levels - 1) throw std::invalid_argument("expected K-1 cut points");
  for (Index c = 1; c < cuts.size(); ++c)
    if (!(cuts(c) < cuts(c - 1))) throw std::invalid_argument("cut points must be strictly decreasing");
  using std::exp;
  return exp(log_level_probability(cuts, alpha_i + beta_j - d2, k));
}

/// Log-likelihood of the observed network at `state` (no prior).
template <typename Scalar>
Scalar loglik(const Problem& problem, const LatentState<Scalar>& state) {
  check_state(problem, state);
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Index n = problem.n;
  if (n == 0) return Scalar(0);

  switch (problem.family) {
    case Family::unweighted: {
      const Array s = pair_logits(problem, state);
      const Array a = problem.adjacency.template cast<Scalar>();
      const Array mask = problem.pair_mask.template cast<Scalar>();
      return (mask * (a * s - softplus_array(s))).sum();
    }
    case Family::weighted: {
      const Array s = pair_logits(problem, state);
      Scalar total(0);
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
          if (problem.pair_mask(i, j) != 0.0)
            total += log_level_probability(state.cuts, s(i, j), problem.level(i, j));
      return total;
    }
    case Family::cumulative: {
      const Array d2 = squared_distances(state.positions);
      using Column = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
      Scalar total(0);
      for (std::size_t k = 0; k < problem.action_author.size(); ++k) {
        const Index j = problem.action_author[k];
        const Index kk = static_cast<Index>(k);
        Column s = state.alpha.array() + state.beta(kk) - d2.col(j);
        Column terms = problem.adoption.col(kk).template cast<Scalar>() * s - softplus_array(s);
        terms(j) = Scalar(0);
        total += terms.sum();
      }
      return total;
    }
  }
  return Scalar(0);
}

template <typename Scalar>
Scalar loglik_unweighted(const Graph& graph, const LatentState<Scalar>& state) {
  return loglik(make_problem(graph), state);
}

template <typename Scalar>
Scalar loglik_cumulative(const CumulativeGraph& graph, const LatentState<Scalar>& state) {
  return loglik(make_problem(graph), state);
}

template <typename Scalar>
Scalar loglik_weighted(const WeightedGraph& graph, const LatentState<Scalar>& state) {
  return loglik(make_problem(graph), state);
}

/// Gaussian log-density of the parameters up to additive constants (zero means).
template <typename Scalar>
Scalar log_prior(const LatentState<Scalar>& state, const PriorConfig& prior) {
  if (!prior.enabled) return Scalar(0);
  const Scalar sa = Scalar(prior.sigma_alpha), sb = Scalar(prior.sigma_beta),
               sp = Scalar(prior.sigma_pos);
  return -state.alpha.squaredNorm() / (Scalar(2) * sa * sa) -
         state.beta.squaredNorm() / (Scalar(2) * sb * sb) -
         state.positions.squaredNorm() / (Scalar(2) * sp * sp);
}

template <typename Scalar>
Scalar log_posterior(const Problem& problem, const LatentState<Scalar>& state,
                     const PriorConfig& prior) {
  return loglik(problem, state) + log_prior(state, prior);
}

}  // namespace latent
