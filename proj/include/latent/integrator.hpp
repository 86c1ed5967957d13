#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "latent/forces.hpp"
#include "latent/model.hpp"

namespace latent {

struct IntegratorConfig {
  double dt = 0.05;
  double damping = 0.9;  // velocity retained per step
  int max_iters = 5000;
  /// Converged once the largest coordinate change in a step is below tol and the largest
  /// force component is below 10 * tol.
  double tol = 1e-4;
  double param_mass = 1.0;
  std::uint64_t seed = 1;
  int restarts = 5;
  int dim = 2;
  bool deterministic = false;
  int threads = 0;  // restarts run concurrently; 0 reads LATENT_LAYOUT_THREADS, default 1
};

void validate(const IntegratorConfig& config);

/// Average number of likelihood terms a node takes part in.
double terms_per_node(const Problem& problem);

/// Copy of `config` with dt shrunk and param_mass raised to suit the problem size. Curvature
/// per coordinate grows with terms_per_node(), and the cut points collect every pair, so
/// dt = 0.05 is stable up to about 200 fully observed nodes and needs scaling beyond.
IntegratorConfig stiffness_scaled(const Problem& problem, IntegratorConfig config);

/// The simulation produced a non-finite state or force.
class DivergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct LayoutResult {
  LatentStated state;
  double loglik = 0.0;         // plain log-likelihood
  double log_posterior = 0.0;  // loglik + log_prior
  double initial_loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

/// Standard-normal positions, zero alpha/beta, cuts evenly spaced from +1 down to -1.
LatentStated init_state(const Problem& problem, const IntegratorConfig& config);

using ForceFunction = std::function<ForceFieldd(const LatentStated&)>;

/// One damped velocity Verlet step. `force` holds F(state) on entry and F(new state) on exit,
/// so each step costs one force evaluation. Returns the largest absolute coordinate change.
double step(LatentStated& state, LatentStated& velocity, ForceFieldd& force,
            const ForceFunction& evaluate, const IntegratorConfig& config);

LayoutResult run_layout(const Problem& problem, const ModelConfig& model,
                        const IntegratorConfig& config);
LayoutResult run_layout(const Network& network, const ModelConfig& model,
                        const IntegratorConfig& config);

struct RestartFailure {
  std::uint64_t seed = 0;
  std::string message;
};

struct RestartSummary {
  LayoutResult best;
  std::size_t best_index = 0;  // into `all`
  std::vector<LayoutResult> all;  // successful runs in seed order
  std::vector<RestartFailure> failures;
};

/// Runs seeds seed, seed+1, ... and keeps the run with the highest plain log-likelihood
/// (ties go to the lower seed). Throws only when every restart fails.
RestartSummary run_restarts(const Problem& problem, const ModelConfig& model,
                            const IntegratorConfig& config);
RestartSummary run_restarts(const Network& network, const ModelConfig& model,
                            const IntegratorConfig& config);

}  // namespace latent
