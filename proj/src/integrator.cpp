#include "latent/integrator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

namespace latent {

void validate(const IntegratorConfig& c) {
  if (!(c.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(c.damping > 0.0 && c.damping < 1.0)) throw std::invalid_argument("damping must lie in (0, 1)");
  if (!(c.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (!(c.param_mass > 0.0)) throw std::invalid_argument("param_mass must be positive");
  if (c.restarts < 1) throw std::invalid_argument("restarts must be at least 1");
  if (c.max_iters < 0) throw std::invalid_argument("max_iters must be non-negative");
  if (c.dim < 1) throw std::invalid_argument("dim must be at least 1");
}

double terms_per_node(const Problem& problem) {
  if (problem.n == 0) return 0.0;
  double terms = problem.pair_mask.sum();
  if (problem.family == Family::cumulative)
    terms = static_cast<double>(problem.action_author.size()) * static_cast<double>(problem.n - 1);
  return 2.0 * terms / static_cast<double>(problem.n);
}

IntegratorConfig stiffness_scaled(const Problem& problem, IntegratorConfig config) {
  const double t = terms_per_node(problem);
  if (t > 400.0) config.dt = std::min(config.dt, 0.05 * std::sqrt(400.0 / t));
  if (problem.family == Family::weighted) config.param_mass = std::max(config.param_mass, t / 40.0);
  return config;
}

LatentStated init_state(const Problem& problem, const IntegratorConfig& config) {
  LatentStated s(problem.n, config.dim, problem.n_beta(), problem.n_cuts());
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index i = 0; i < s.positions.rows(); ++i)
    for (Index d = 0; d < s.positions.cols(); ++d) s.positions(i, d) = normal(rng);
  const Index m = s.cuts.size();
  if (m == 1) {
    s.cuts(0) = 0.0;
  } else if (m > 1) {
    s.cuts = Eigen::VectorXd::LinSpaced(m, 1.0, -1.0);
  }
  return s;
}

namespace {

bool strictly_decreasing(const Eigen::VectorXd& cuts) {
  for (Index k = 1; k < cuts.size(); ++k)
    if (!(cuts(k) < cuts(k - 1))) return false;
  return true;
}

template <typename X, typename V, typename F>
double drift(X& x, const V& v, const F& f, double dt, double mass) {
  if (x.size() == 0) return 0.0;
  const auto delta = (v * dt + f * (0.5 * dt * dt / mass)).eval();
  x += delta;
  return delta.cwiseAbs().maxCoeff();
}

template <typename V, typename F>
void kick(V& v, const F& f_old, const F& f_new, double dt, double mass, double damping) {
  v = damping * (v + (f_old + f_new) * (0.5 * dt / mass));
}

double max_abs(const ForceFieldd& f) {
  double m = 0.0;
  if (f.positions.size()) m = std::max(m, f.positions.cwiseAbs().maxCoeff());
  if (f.alpha.size()) m = std::max(m, f.alpha.cwiseAbs().maxCoeff());
  if (f.beta.size()) m = std::max(m, f.beta.cwiseAbs().maxCoeff());
  if (f.cuts.size()) m = std::max(m, f.cuts.cwiseAbs().maxCoeff());
  return m;
}

}  // namespace

double step(LatentStated& state, LatentStated& velocity, ForceFieldd& force,
            const ForceFunction& evaluate, const IntegratorConfig& config) {
  const double dt = config.dt;
  const double pm = config.param_mass;
  double change = 0.0;
  change = std::max(change, drift(state.positions, velocity.positions, force.positions, dt, 1.0));
  change = std::max(change, drift(state.alpha, velocity.alpha, force.alpha, dt, pm));
  change = std::max(change, drift(state.beta, velocity.beta, force.beta, dt, pm));

  if (state.cuts.size() > 0) {
    // A cut step that would reorder the cut points is halved until the order holds,
    // and the cut velocity is reset.
    Eigen::VectorXd delta = velocity.cuts * dt + force.cuts * (0.5 * dt * dt / pm);
    bool shortened = false;
    for (int k = 0; k < 60 && !strictly_decreasing(state.cuts + delta); ++k) {
      delta *= 0.5;
      shortened = true;
    }
    if (strictly_decreasing(state.cuts + delta)) {
      state.cuts += delta;
      change = std::max(change, delta.cwiseAbs().maxCoeff());
    }
    if (shortened) velocity.cuts.setZero();
  }

  if (!state.all_finite())
    throw DivergenceError("non-finite state after integration step; try a smaller dt");
  ForceFieldd next = evaluate(state);
  if (!next.all_finite())
    throw DivergenceError("non-finite force after integration step; try a smaller dt");

  const double damping = config.damping;
  kick(velocity.positions, force.positions, next.positions, dt, 1.0, damping);
  kick(velocity.alpha, force.alpha, next.alpha, dt, pm, damping);
  kick(velocity.beta, force.beta, next.beta, dt, pm, damping);
  kick(velocity.cuts, force.cuts, next.cuts, dt, pm, damping);
  force = std::move(next);
  return change;
}

LayoutResult run_layout(const Problem& problem, const ModelConfig& model,
                        const IntegratorConfig& config) {
  validate(config);
  LayoutResult result;
  result.seed = config.seed;
  LatentStated state = init_state(problem, config);
  LatentStated velocity(problem.n, config.dim, problem.n_beta(), problem.n_cuts());
  result.initial_loglik = loglik(problem, state);

  const ForceFunction evaluate = [&](const LatentStated& s) {
    return forces(problem, s, model.prior);
  };
  ForceFieldd force = evaluate(state);
  for (int it = 0; it < config.max_iters; ++it) {
    const double change = step(state, velocity, force, evaluate, config);
    result.iterations = it + 1;
    if (change < config.tol && max_abs(force) < 10.0 * config.tol) {
      result.converged = true;
      break;
    }
  }

  if (!model.prior.enabled && state.size() > 0) {
    const Eigen::RowVectorXd centroid = state.positions.colwise().mean();
    state.positions.rowwise() -= centroid;
  }
  if (!model.prior.enabled) {
    const double a = state.alpha.size() ? state.alpha.cwiseAbs().maxCoeff() : 0.0;
    const double b = state.beta.size() ? state.beta.cwiseAbs().maxCoeff() : 0.0;
    if (std::max(a, b) > 50.0) {
      std::ostringstream msg;
      msg << "seed " << config.seed << ": |alpha|/|beta| reached " << std::max(a, b)
          << "; parameters may be diverging (e.g. a node tied to all others), consider "
             "enabling the prior";
      result.warnings.push_back(msg.str());
    }
  }
  if (force.clamped_pairs > 0)
    result.warnings.push_back(std::to_string(force.clamped_pairs) +
                              " pairs hit the level-probability floor");

  result.loglik = loglik(problem, state);
  result.log_posterior = result.loglik + log_prior(state, model.prior);
  result.state = std::move(state);
  return result;
}

LayoutResult run_layout(const Network& network, const ModelConfig& model,
                        const IntegratorConfig& config) {
  return run_layout(make_problem(network, model), model, config);
}

namespace {

int resolve_threads(const IntegratorConfig& config) {
  if (config.deterministic) return 1;
  if (config.threads > 0) return config.threads;
  if (const char* env = std::getenv("LATENT_LAYOUT_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 1;
}

}  // namespace

RestartSummary run_restarts(const Problem& problem, const ModelConfig& model,
                            const IntegratorConfig& config) {
  validate(config);
  const auto count = static_cast<std::size_t>(config.restarts);
  std::vector<std::optional<LayoutResult>> results(count);
  std::vector<std::exception_ptr> errors(count);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < count; r = next++) {
      IntegratorConfig c = config;
      c.seed = config.seed + r;
      try {
        results[r] = run_layout(problem, model, c);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(resolve_threads(config), static_cast<int>(count));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  RestartSummary summary;
  std::exception_ptr first_error;
  for (std::size_t r = 0; r < count; ++r) {
    if (results[r]) {
      summary.all.push_back(std::move(*results[r]));
      continue;
    }
    if (!first_error) first_error = errors[r];
    RestartFailure failure{config.seed + r, "unknown error"};
    try {
      std::rethrow_exception(errors[r]);
    } catch (const std::exception& e) {
      failure.message = e.what();
    } catch (...) {
    }
    summary.failures.push_back(std::move(failure));
  }
  if (summary.all.empty()) std::rethrow_exception(first_error);

  for (std::size_t i = 1; i < summary.all.size(); ++i)
    if (summary.all[i].loglik > summary.all[summary.best_index].loglik) summary.best_index = i;
  summary.best = summary.all[summary.best_index];
  return summary;
}

RestartSummary run_restarts(const Network& network, const ModelConfig& model,
                            const IntegratorConfig& config) {
  return run_restarts(make_problem(network, model), model, config);
}

}  // namespace latent
