#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "latent/graph.hpp"
#include "latent/model.hpp"

namespace latent {

struct SbmSpec {
  std::array<int, 2> block_sizes{100, 100};
  double p_in = 0.5;
  double p_out = 0.2;
  int dim = 2;
  std::uint64_t seed = 1;
};

struct GaussianClusterSpec {
  int n_clusters = 2;
  double sigma = 1.0 / 12.0;
  double separation = 5.0 / 6.0;
  int n_nodes = 100;
  int dim = 2;
  std::uint64_t seed = 1;
};

void validate(const SbmSpec& spec);
void validate(const GaussianClusterSpec& spec);

/// Distance d with logit^-1(-d^2) = p_out, i.e. the block separation reproducing p_out
/// when alpha = beta = 0 and p_in = 1/2.
double expected_sbm_distance(double p_out);

/// General two-block case: alpha_i = beta_j = logit(p_in)/2 and d^2 = logit(p_in) - logit(p_out).
double sbm_distance(double p_in, double p_out);

struct LatentSample {
  LatentStated state;      // one beta per node, no cuts
  std::vector<int> labels;  // block / cluster per node
};

LatentSample sample_latent(const SbmSpec& spec);
LatentSample sample_latent(const GaussianClusterSpec& spec);

struct SamplingExtras {
  int actions_per_author = 3;  // cumulative
  double action_beta = 0.0;    // cumulative: beta_jk of every generated action
  Eigen::VectorXd cuts;        // weighted: K-1 strictly decreasing cut points
};

/// Reshapes a per-node latent sample for the given family: per-action beta (author-major,
/// `actions_per_author` per node) for cumulative, cut points for weighted.
LatentStated generating_state(const LatentStated& latent, const ModelConfig& model,
                              const SamplingExtras& extras);

/// Draws every ordered pair (or per-action tie, or level) independently under the model.
/// `state` must already be shaped by generating_state(). Node ids are "n0", "n1", ...
Network sample_network(const LatentStated& state, const ModelConfig& model,
                       const SamplingExtras& extras, std::uint64_t seed);

/// Log-likelihood of a sampled network at its generating configuration.
double ground_truth_loglik(const Network& network, const LatentStated& state,
                           const ModelConfig& model);

}  // namespace latent
