#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "latent/model.hpp"

namespace latent {

/// Gradient of the log-posterior with respect to every state coordinate. Laid out exactly
/// like the LatentState it was computed for.
template <typename Scalar>
struct ForceField {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix positions;
  Vector alpha;
  Vector beta;
  Vector cuts;
  /// Ordered-logit pairs whose level probability hit the 1e-300 floor.
  std::size_t clamped_pairs = 0;

  static ForceField zeros_like(const LatentState<Scalar>& s) {
    ForceField f;
    f.positions = Matrix::Zero(s.positions.rows(), s.positions.cols());
    f.alpha = Vector::Zero(s.alpha.size());
    f.beta = Vector::Zero(s.beta.size());
    f.cuts = Vector::Zero(s.cuts.size());
    return f;
  }

  bool all_finite() const {
    return positions.allFinite() && alpha.allFinite() && beta.allFinite() && cuts.allFinite();
  }
};

using ForceFieldd = ForceField<double>;

/// d log P(a = k) / d s and the derivatives with respect to the two cut points bounding level
/// k (lower = c_k, upper = c_{k+1}; zero where the bound is infinite).
template <typename Scalar>
struct LevelGradient {
  Scalar ds{0};
  Scalar d_lower{0};
  Scalar d_upper{0};
  bool clamped = false;
};

inline constexpr double kMinLevelProbability = 1e-300;

template <typename Scalar, typename CutVector>
LevelGradient<Scalar> level_gradient(const CutVector& cuts, Scalar s, int k) {
  using std::exp;
  LevelGradient<Scalar> g;
  const Index top = cuts.size();
  if (top == 0) return g;
  if (k == 0) {
    g.d_upper = -sigmoid(Scalar(cuts(0)) + s);
  } else if (k == top) {
    g.d_lower = sigmoid(-(Scalar(cuts(top - 1)) + s));
  } else {
    const Scalar u = Scalar(cuts(k - 1)) + s;
    const Scalar v = Scalar(cuts(k)) + s;
    static const Scalar floor = std::log(Scalar(kMinLevelProbability));
    Scalar log_gap = log1mexp(u - v);
    if (log_gap < floor) {
      log_gap = floor;
      g.clamped = true;
    }
    g.d_lower = exp(log_sigmoid(-u) - log_sigmoid(-v) - log_gap);
    g.d_upper = -exp(log_sigmoid(v) - log_sigmoid(u) - log_gap);
  }
  g.ds = g.d_lower + g.d_upper;
  return g;
}

namespace detail {

// level_gradient with the cut-only factors hoisted out of the pair loop. For an interior
// level u - v is a cut difference, so one exp(s) per pair is enough; extreme values take the
// log-space path.
template <typename Scalar>
class LevelGradientTable {
public:
  template <typename CutVector>
  explicit LevelGradientTable(const CutVector& cuts) : cuts_(cuts.template cast<Scalar>()) {
    using std::abs;
    using std::exp;
    const Index top = cuts_.size();
    exp_cut_.resize(top);
    for (Index k = 0; k < top; ++k) exp_cut_(k) = exp(cuts_(k));
    inv_gap_.setZero(top + 1);
    ratio_.setZero(top + 1);
    clamped_.assign(static_cast<std::size_t>(top + 1), false);
    fast_.assign(static_cast<std::size_t>(top + 1), false);
    const Scalar floor = std::log(Scalar(kMinLevelProbability));
    for (Index k = 1; k < top; ++k) {
      Scalar log_gap = log1mexp(cuts_(k - 1) - cuts_(k));
      if (log_gap < floor) {
        log_gap = floor;
        clamped_[static_cast<std::size_t>(k)] = true;
      }
      inv_gap_(k) = exp(-log_gap);
      ratio_(k) = exp(cuts_(k) - cuts_(k - 1));
      fast_[static_cast<std::size_t>(k)] = abs(cuts_(k - 1)) < kLimit && abs(cuts_(k)) < kLimit;
    }
  }

  LevelGradient<Scalar> operator()(Scalar s, int k) const {
    using std::abs;
    const Index top = cuts_.size();
    const auto kk = static_cast<std::size_t>(k);
    if (k <= 0 || k >= top || !fast_[kk] || !(abs(s) < kLimit)) return level_gradient(cuts_, s, k);
    const Scalar e = std::exp(s);
    const Scalar eu = exp_cut_(k - 1) * e;
    const Scalar ev = exp_cut_(k) * e;
    LevelGradient<Scalar> g;
    g.d_lower = (1 + ev) / (1 + eu) * inv_gap_(k);
    g.d_upper = -ratio_(k) * (1 + eu) / (1 + ev) * inv_gap_(k);
    g.ds = g.d_lower + g.d_upper;
    g.clamped = clamped_[kk];
    return g;
  }

private:
  static constexpr double kLimit = 300.0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> cuts_, exp_cut_, inv_gap_, ratio_;
  std::vector<bool> clamped_, fast_;
};

// Turns per-ordered-pair coefficients g_ij = d log P_ij / d s_ij into node forces.
template <typename Scalar>
void accumulate_pair_forces(const Problem& problem, const LatentState<Scalar>& state,
                            const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& g,
                            ForceField<Scalar>& f) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Vector row = g.rowwise().sum().matrix();
  const Vector col = g.colwise().sum().transpose().matrix();
  if (problem.undirected) {
    f.alpha += row + col;
  } else {
    f.alpha += row;
    if (problem.family != Family::cumulative) f.beta += col;
  }
  // ds_ij/dx_i = -2 (x_i - x_j); node i collects its role as source and as target.
  const Matrix coupling = (g + g.transpose()).matrix();
  const Vector weight = coupling.rowwise().sum();
  f.positions += Scalar(-2) * (weight.asDiagonal() * state.positions - coupling * state.positions);
}

template <typename Scalar>
void add_prior_forces(const LatentState<Scalar>& state, const PriorConfig& prior,
                      ForceField<Scalar>& f) {
  if (!prior.enabled) return;
  f.alpha -= state.alpha / Scalar(prior.sigma_alpha * prior.sigma_alpha);
  f.beta -= state.beta / Scalar(prior.sigma_beta * prior.sigma_beta);
  f.positions -= state.positions / Scalar(prior.sigma_pos * prior.sigma_pos);
}

}  // namespace detail

/// Analytic gradient of loglik(problem, state) + log_prior(state, prior).
template <typename Scalar>
ForceField<Scalar> forces(const Problem& problem, const LatentState<Scalar>& state,
                          const PriorConfig& prior) {
  check_state(problem, state);
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Column = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  auto f = ForceField<Scalar>::zeros_like(state);
  const Index n = problem.n;
  if (n == 0) return f;

  switch (problem.family) {
    case Family::unweighted: {
      const Array s = pair_logits(problem, state);
      const Array g = problem.pair_mask.template cast<Scalar>() *
                      (problem.adjacency.template cast<Scalar>() - sigmoid_array(s));
      detail::accumulate_pair_forces(problem, state, g, f);
      break;
    }
    case Family::weighted: {
      const Array s = pair_logits(problem, state);
      Array g = Array::Zero(n, n);
      const detail::LevelGradientTable<Scalar> table(state.cuts);
      for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
          if (problem.pair_mask(i, j) == 0.0) continue;
          const int k = problem.level(i, j);
          const auto lg = table(s(i, j), k);
          g(i, j) = lg.ds;
          if (k >= 1) f.cuts(k - 1) += lg.d_lower;
          if (k < problem.levels - 1) f.cuts(k) += lg.d_upper;
          if (lg.clamped) ++f.clamped_pairs;
        }
      }
      detail::accumulate_pair_forces(problem, state, g, f);
      break;
    }
    case Family::cumulative: {
      const Array d2 = squared_distances(state.positions);
      // r(i, j) = sum over actions k of author j of (a_ij^k - p_ij^k)
      Array r = Array::Zero(n, n);
      for (std::size_t k = 0; k < problem.action_author.size(); ++k) {
        const Index j = problem.action_author[k];
        const Index kk = static_cast<Index>(k);
        const Column s = state.alpha.array() + state.beta(kk) - d2.col(j);
        Column resid = problem.adoption.col(kk).template cast<Scalar>() - sigmoid_array(s);
        resid(j) = Scalar(0);
        f.beta(kk) += resid.sum();
        r.col(j) += resid;
      }
      detail::accumulate_pair_forces(problem, state, r, f);
      break;
    }
  }
  f.alpha.array() *= problem.alpha_active.template cast<Scalar>();
  f.beta.array() *= problem.beta_active.template cast<Scalar>();
  detail::add_prior_forces(state, prior, f);
  return f;
}

template <typename Scalar>
ForceField<Scalar> forces_unweighted(const Graph& graph, const LatentState<Scalar>& state,
                                     const PriorConfig& prior) {
  return forces(make_problem(graph), state, prior);
}

template <typename Scalar>
ForceField<Scalar> forces_cumulative(const CumulativeGraph& graph,
                                     const LatentState<Scalar>& state, const PriorConfig& prior) {
  return forces(make_problem(graph), state, prior);
}

template <typename Scalar>
ForceField<Scalar> forces_weighted(const WeightedGraph& graph, const LatentState<Scalar>& state,
                                   const PriorConfig& prior) {
  return forces(make_problem(graph), state, prior);
}

/// Three-level closed forms written case by case in terms of
/// C1 = -c1 - s and C2 = -c2 - s. Directed graphs only, no prior. Kept as a cross-check of
/// the general-K path; not numerically guarded.
template <typename Scalar>
ForceField<Scalar> forces_weighted_k3_reference(const Problem& problem,
                                                const LatentState<Scalar>& state) {
  check_state(problem, state);
  if (problem.family != Family::weighted || problem.levels != 3 || problem.undirected)
    throw std::invalid_argument("three-level reference needs a directed K=3 weighted problem");
  using std::exp;
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  auto f = ForceField<Scalar>::zeros_like(state);
  const Index n = problem.n;
  const Array s = pair_logits(problem, state);
  Array g = Array::Zero(n, n);
  const Scalar one(1);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (problem.pair_mask(i, j) == 0.0) continue;
      const Scalar c1 = -state.cuts(0) - s(i, j);
      const Scalar c2 = -state.cuts(1) - s(i, j);
      const Scalar e1 = exp(c1), e2 = exp(c2);
      switch (problem.level(i, j)) {
        case 0:
          g(i, j) = -one / (one + e1);
          f.cuts(0) += g(i, j);
          break;
        case 1: {
          const Scalar den = one / (one + e1) - one / (one + e2);
          const Scalar t1 = e1 / ((one + e1) * (one + e1));
          const Scalar t2 = e2 / ((one + e2) * (one + e2));
          g(i, j) = (t1 - t2) / den;
          f.cuts(0) += t1 / den;
          f.cuts(1) += -t2 / den;
          break;
        }
        default:
          g(i, j) = one / (one + exp(-c2));
          f.cuts(1) += g(i, j);
          break;
      }
    }
  }
  detail::accumulate_pair_forces(problem, state, g, f);
  f.alpha.array() *= problem.alpha_active.template cast<Scalar>();
  f.beta.array() *= problem.beta_active.template cast<Scalar>();
  return f;
}

/// Central differences of `objective` in every state coordinate. Test and diagnostics only.
template <typename Scalar>
ForceField<Scalar> finite_difference_gradient(
    const std::function<Scalar(const LatentState<Scalar>&)>& objective,
    const LatentState<Scalar>& state, Scalar step) {
  if (!(step > Scalar(0))) throw std::invalid_argument("finite-difference step must be positive");
  auto f = ForceField<Scalar>::zeros_like(state);
  LatentState<Scalar> probe = state;
  auto central = [&](Scalar& coordinate) {
    const Scalar saved = coordinate;
    coordinate = saved + step;
    const Scalar up = objective(probe);
    coordinate = saved - step;
    const Scalar down = objective(probe);
    coordinate = saved;
    using std::isfinite;
    if (!isfinite(up) || !isfinite(down))
      throw std::domain_error("objective is not finite near the probed state");
    return (up - down) / (Scalar(2) * step);
  };
  for (Index c = 0; c < probe.positions.cols(); ++c)
    for (Index r = 0; r < probe.positions.rows(); ++r)
      f.positions(r, c) = central(probe.positions(r, c));
  for (Index i = 0; i < probe.alpha.size(); ++i) f.alpha(i) = central(probe.alpha(i));
  for (Index i = 0; i < probe.beta.size(); ++i) f.beta(i) = central(probe.beta(i));
  for (Index i = 0; i < probe.cuts.size(); ++i) f.cuts(i) = central(probe.cuts(i));
  return f;
}

/// Observed minus expected out/in degree under the tie model, summed pair by pair.
template <typename Scalar>
std::pair<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>
degree_residuals(const Graph& graph, const LatentState<Scalar>& state) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Index n = graph.n_nodes();
  if (state.size() != n) throw std::invalid_argument("state does not match graph");
  Vector out = Vector::Zero(n), in = Vector::Zero(n);
  for (const auto& e : graph.edges()) {
    out(e.src) += Scalar(1);
    in(e.dst) += Scalar(1);
  }
  if (!graph.directed()) {
    out += in;
    in = out;
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const Scalar d2 = (state.positions.row(i) - state.positions.row(j)).squaredNorm();
      const Scalar beta_j = graph.directed() ? state.beta(j) : state.alpha(j);
      const Scalar p = tie_probability(state.alpha(i), beta_j, d2);
      out(i) -= p;
      if (graph.directed()) in(j) -= p;
    }
  }
  if (!graph.directed()) in = out;
  return {out, in};
}

}  // namespace latent
