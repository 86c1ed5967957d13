#include "latent/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "latent/forces.hpp"

namespace latent {

Eigen::MatrixXd distance_matrix(const Eigen::MatrixXd& positions) {
  return squared_distances(positions).sqrt().matrix();
}

double center_of_mass_distance(const LatentStated& state, const std::vector<int>& labels) {
  if (labels.size() != static_cast<std::size_t>(state.size()))
    throw std::invalid_argument("one label per node required");
  const std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() != 2) throw std::invalid_argument("exactly two label groups required");
  const int first = *distinct.begin();
  Eigen::RowVectorXd sum[2] = {Eigen::RowVectorXd::Zero(state.dim()),
                               Eigen::RowVectorXd::Zero(state.dim())};
  double count[2] = {0.0, 0.0};
  for (Index i = 0; i < state.size(); ++i) {
    const int g = labels[static_cast<std::size_t>(i)] == first ? 0 : 1;
    sum[g] += state.positions.row(i);
    count[g] += 1.0;
  }
  return (sum[0] / count[0] - sum[1] / count[1]).norm();
}

namespace {

Eigen::VectorXd condensed(const Eigen::MatrixXd& m) {
  const Index n = m.rows();
  Eigen::VectorXd out(n * (n - 1) / 2);
  Index k = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) out(k++) = m(i, j);
  return out;
}

void check_distance_matrix(const Eigen::MatrixXd& m, const char* name) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(name) + " is not square");
  for (Index i = 0; i < m.rows(); ++i) {
    if (m(i, i) != 0.0) throw std::invalid_argument(std::string(name) + " has a non-zero diagonal");
    for (Index j = i + 1; j < m.rows(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > 1e-12 * std::max(1.0, std::abs(m(i, j))))
        throw std::invalid_argument(std::string(name) + " is not symmetric");
  }
}

}  // namespace

MantelResult mantel_test(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int permutations,
                         std::uint64_t seed) {
  check_distance_matrix(a, "first matrix");
  check_distance_matrix(b, "second matrix");
  const Index n = a.rows();
  if (b.rows() != n) throw std::invalid_argument("distance matrices differ in size");
  if (n < 3) throw std::invalid_argument("Mantel test needs at least 3 objects");
  if (permutations < 1) throw std::invalid_argument("permutation count must be positive");

  // Standardize x once; then r = <x_std, y_centered> / ||y_centered|| for any arrangement of y.
  Eigen::VectorXd x = condensed(a);
  x.array() -= x.mean();
  const double x_norm = x.norm();
  Eigen::VectorXd y = condensed(b);
  const double y_mean = y.mean();
  const double y_norm = (y.array() - y_mean).matrix().norm();
  if (x_norm == 0.0 || y_norm == 0.0)
    throw std::invalid_argument("a distance matrix has zero variance");
  x /= x_norm;
  // Permutation preserves the multiset of entries, so mean and norm of y are invariant.
  auto correlation = [&](const std::vector<Index>& perm) {
    double acc = 0.0;
    Index k = 0;
    for (Index i = 0; i < n; ++i) {
      const Index pi = perm[static_cast<std::size_t>(i)];
      for (Index j = i + 1; j < n; ++j) acc += x(k++) * (b(pi, perm[static_cast<std::size_t>(j)]) - y_mean);
    }
    return acc / y_norm;
  };

  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index(0));
  MantelResult result;
  result.permutations = permutations;
  result.seed = seed;
  result.r = std::clamp(correlation(perm), -1.0, 1.0);

  std::mt19937_64 rng(seed);
  std::vector<double> null(static_cast<std::size_t>(permutations));
  int extreme = 0;
  for (auto& value : null) {
    std::shuffle(perm.begin(), perm.end(), rng);
    value = correlation(perm);
    if (value >= result.r) ++extreme;
  }
  const double mean = std::accumulate(null.begin(), null.end(), 0.0) / permutations;
  double ss = 0.0;
  for (double v : null) ss += (v - mean) * (v - mean);
  const double sd = permutations > 1 ? std::sqrt(ss / (permutations - 1)) : 0.0;
  result.z = sd > 0.0 ? (result.r - mean) / sd : 0.0;
  result.p_value = (1.0 + extreme) / (1.0 + permutations);
  return result;
}

namespace {

void put(std::ostringstream& out, const char* key, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  out << key << '=' << buf << '\n';
}

}  // namespace

std::string RecoveryReport::to_key_value() const {
  std::ostringstream out;
  put(out, "distance_ground", distance_ground);
  put(out, "distance_inferred", distance_inferred);
  if (distance_expected) put(out, "distance_expected", *distance_expected);
  put(out, "loglik_ground", loglik_ground);
  put(out, "loglik_inferred", loglik_inferred);
  put(out, "loglik_gap", loglik_gap);
  put(out, "mantel_r", mantel_r);
  put(out, "mantel_z", mantel_z);
  put(out, "max_alpha_residual", max_alpha_residual);
  put(out, "max_beta_residual", max_beta_residual);
  return out.str();
}

std::string RecoveryReport::to_json() const {
  nlohmann::ordered_json j;
  j["distance_ground"] = distance_ground;
  j["distance_inferred"] = distance_inferred;
  j["distance_expected"] = distance_expected ? nlohmann::ordered_json(*distance_expected) : nullptr;
  j["loglik_ground"] = loglik_ground;
  j["loglik_inferred"] = loglik_inferred;
  j["loglik_gap"] = loglik_gap;
  j["mantel_r"] = mantel_r;
  j["mantel_z"] = mantel_z;
  j["max_alpha_residual"] = max_alpha_residual;
  j["max_beta_residual"] = max_beta_residual;
  return j.dump(2);
}

RecoveryReport recovery_report(const LatentStated& ground, const LatentStated& inferred,
                               const std::vector<int>& labels, const Network& network,
                               const ModelConfig& model, const RecoveryOptions& options) {
  const Problem problem = make_problem(network, model);
  RecoveryReport r;
  r.distance_ground = center_of_mass_distance(ground, labels);
  r.distance_inferred = center_of_mass_distance(inferred, labels);
  r.distance_expected = options.expected_distance;
  r.loglik_ground = loglik(problem, ground);
  r.loglik_inferred = loglik(problem, inferred);
  r.loglik_gap = r.loglik_inferred - r.loglik_ground;

  const Eigen::MatrixXd dg = distance_matrix(ground.positions);
  const Eigen::MatrixXd di = distance_matrix(inferred.positions);
  const bool degenerate = (dg.array() == 0.0).all() || (di.array() == 0.0).all();
  if (ground.size() >= 3 && !degenerate) {
    const auto m = mantel_test(dg, di, options.permutations, options.seed);
    r.mantel_r = m.r;
    r.mantel_z = m.z;
  }

  PriorConfig off;
  off.enabled = false;
  const auto f = forces(problem, inferred, off);
  r.max_alpha_residual = f.alpha.size() ? f.alpha.cwiseAbs().maxCoeff() : 0.0;
  r.max_beta_residual = f.beta.size() ? f.beta.cwiseAbs().maxCoeff() : 0.0;
  return r;
}

}  // namespace latent
