#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latent/graph.hpp"
#include "latent/model.hpp"

namespace latent {

/// Euclidean distances between all rows of `positions`.
Eigen::MatrixXd distance_matrix(const Eigen::MatrixXd& positions);

/// Distance between the mean positions of the two label groups.
double center_of_mass_distance(const LatentStated& state, const std::vector<int>& labels);

struct MantelResult {
  double r = 0.0;  // Pearson correlation of the condensed upper triangles
  double z = 0.0;  // (r - mean(r_perm)) / sd(r_perm), sample standard deviation
  double p_value = 1.0;  // (1 + #{r_perm >= r}) / (1 + permutations)
  int permutations = 0;
  std::uint64_t seed = 0;
};

/// Permutation test of association between two symmetric, zero-diagonal distance matrices.
/// Rows and columns of `b` are permuted jointly.
MantelResult mantel_test(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int permutations,
                         std::uint64_t seed);

struct RecoveryReport {
  double distance_ground = 0.0;  // center-of-mass distance in the generating state
  double distance_inferred = 0.0;
  std::optional<double> distance_expected;  // analytic value when known (SBM)
  double loglik_ground = 0.0;
  double loglik_inferred = 0.0;
  double loglik_gap = 0.0;  // inferred - ground
  double mantel_r = 0.0;
  double mantel_z = 0.0;
  double max_alpha_residual = 0.0;  // max |d LL / d alpha_i|, prior off
  double max_beta_residual = 0.0;

  /// One `key=value` per line, fixed key order.
  std::string to_key_value() const;
  std::string to_json() const;
};

struct RecoveryOptions {
  std::optional<double> expected_distance;
  int permutations = 999;
  std::uint64_t seed = 1;
};

RecoveryReport recovery_report(const LatentStated& ground, const LatentStated& inferred,
                               const std::vector<int>& labels, const Network& network,
                               const ModelConfig& model, const RecoveryOptions& options = {});

}  // namespace latent
