#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "latent/model.hpp"
#include "oracles.hpp"

using namespace latent;
using doctest::Approx;

namespace {

LatentStated zeros(Index n, Index n_beta, Index n_cuts = 0) { return LatentStated(n, 2, n_beta, n_cuts); }

Graph two_nodes(bool edge_ab, bool edge_ba) {
  Graph g(true);
  g.add_node("a");
  g.add_node("b");
  if (edge_ab) g.add_edge(0, 1);
  if (edge_ba) g.add_edge(1, 0);
  return g;
}

// Random rotation (QR of a Gaussian matrix, so possibly a reflection) plus a translation.
void rigid_motion(std::mt19937_64& rng, LatentStated& s) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(s.dim(), s.dim());
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();
  Eigen::RowVectorXd shift(s.dim());
  for (Index d = 0; d < s.dim(); ++d) shift(d) = 3.0 * normal(rng);
  s.positions = (s.positions * q).rowwise() + shift;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("tie probability") {
  CHECK(tie_probability(0.0, 0.0, 0.0) == Approx(0.5));
  CHECK(tie_probability(0.0, 0.0, 1.0) == Approx(1.0 / (1.0 + std::numbers::e)));
  CHECK(tie_probability(0.0, 0.0, 1.0) == Approx(0.268941).epsilon(1e-6));
  const double saturated = tie_probability(100.0, 0.0, 0.0);
  CHECK(std::isfinite(saturated));
  CHECK(saturated == Approx(1.0));
  CHECK(tie_probability(-800.0, 0.0, 0.0) >= 0.0);
}

TEST_CASE("unweighted log-likelihood examples") {
  CHECK(loglik_unweighted(two_nodes(true, false), zeros(2, 2)) == Approx(-1.386294).epsilon(1e-6));
  CHECK(loglik_unweighted(two_nodes(false, false), zeros(2, 2)) == Approx(2 * std::log(0.5)));
}

TEST_CASE("unweighted log-likelihood matches the pairwise oracle") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const bool directed = trial % 2 == 0;
    const Graph g = oracle::random_graph(rng, 6, 0.4, directed);
    const auto s = oracle::random_state(rng, 6, 1 + trial % 3, 6, 0);
    CHECK(loglik_unweighted(g, s) == Approx(oracle::loglik_unweighted(g, s)).epsilon(1e-12));
  }
}

TEST_CASE("cumulative log-likelihood examples") {
  // j authors one action adopted by i
  CumulativeGraph g;
  const auto j = g.add_node("j");
  const auto i = g.add_node("i");
  g.add_adoption(g.add_action(j, "t1"), i);
  CHECK(loglik_cumulative(g, zeros(2, 1)) == Approx(-0.693147).epsilon(1e-6));
  g.add_adoption(g.add_action(j, "t2"), i);
  CHECK(loglik_cumulative(g, zeros(2, 2)) == Approx(-1.386294).epsilon(1e-6));
}

TEST_CASE("cumulative log-likelihood is the sum over per-action stars") {
  std::mt19937_64 rng(22);
  int checked = 0;
  while (checked < 30) {
    const auto g = oracle::random_cumulative(rng, 5, 2, 0.5);
    if (g.n_actions() != 4) continue;
    ++checked;
    const auto s = oracle::random_state(rng, 5, 2, 4, 0);
    double expected = 0.0;
    for (std::size_t k = 0; k < g.n_actions(); ++k) {
      // Star around the author with beta_jk in place of beta_j; only edges into the author count.
      const auto& a = g.actions()[k];
      Graph star(true);
      for (int v = 0; v < 5; ++v) star.add_node(oracle::name(v));
      for (auto adopter : a.adopters) star.add_edge(adopter, a.author);
      for (Index v = 0; v < 5; ++v) {
        if (v == a.author) continue;
        const double p = oracle::sigmoid(s.alpha(v) + s.beta(static_cast<Index>(k)) -
                                         oracle::d2(s, v, a.author));
        expected += star.weight(static_cast<int>(v), a.author) ? std::log(p) : std::log1p(-p);
      }
    }
    CHECK(loglik_cumulative(g, s) == Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("level probabilities, three levels") {
  const Eigen::Vector2d cuts(1.0, -1.0);
  CHECK(level_probability(3, cuts, 0.0, 0.0, 0.0, 0) == Approx(0.268941).epsilon(1e-6));
  CHECK(level_probability(3, cuts, 0.0, 0.0, 0.0, 1) == Approx(0.462117).epsilon(1e-6));
  CHECK(level_probability(3, cuts, 0.0, 0.0, 0.0, 2) == Approx(0.268941).epsilon(1e-6));
  double total = 0.0;
  for (int k = 0; k < 3; ++k) total += level_probability(3, cuts, 0.0, 0.0, 0.0, k);
  CHECK(std::abs(total - 1.0) < 1e-12);
  CHECK(level_probability(3, cuts, 0.0, 0.0, 1e6, 0) == Approx(1.0));
}

TEST_CASE("level probability preconditions") {
  CHECK_THROWS_AS(level_probability(3, Eigen::Vector2d(-1.0, 1.0), 0.0, 0.0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(level_probability(3, Eigen::Vector2d(1.0, 1.0), 0.0, 0.0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(level_probability(3, Eigen::Vector2d(1.0, -1.0), 0.0, 0.0, 0.0, 3), std::out_of_range);
  CHECK_THROWS_AS(level_probability(3, Eigen::Vector2d(1.0, -1.0), 0.0, 0.0, 0.0, -1), std::out_of_range);
}

TEST_CASE("level probabilities sum to one") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const int K = 2 + trial % 6;
    const auto s = oracle::random_state(rng, 1, 1, 1, K - 1);
    const double a = normal(rng), b = normal(rng), d2 = std::abs(normal(rng));
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
      const double p = level_probability(K, s.cuts, a, b, d2, k);
      CHECK(p > 0.0);
      total += p;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("weighted log-likelihood examples") {
  WeightedGraph wg{parse_edge_list("a\tb\t1\nb\ta\t1\n", true), 3};
  auto s = zeros(2, 2, 2);
  s.cuts << 1.0, -1.0;
  // 2 ln(sigma(1) - sigma(-1)) = 2 ln(0.4621172) = -1.5438737
  const double p1 = oracle::sigmoid(1.0) - oracle::sigmoid(-1.0);
  CHECK(loglik_weighted(wg, s) == Approx(2.0 * std::log(p1)).epsilon(1e-12));
  CHECK(loglik_weighted(wg, s) == Approx(-1.5438737).epsilon(1e-7));

  // Far apart, no records: every pair sits at level 0 with probability near 1.
  WeightedGraph empty{Graph(true), 3};
  for (int v = 0; v < 4; ++v) empty.graph.add_node(oracle::name(v));
  auto far = zeros(4, 4, 2);
  far.cuts << 1.0, -1.0;
  for (Index v = 0; v < 4; ++v) far.positions(v, 0) = 100.0 * static_cast<double>(v);
  CHECK(std::abs(loglik_weighted(empty, far)) < 1e-12);
}

TEST_CASE("weighted log-likelihood matches the pairwise oracle") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 40; ++trial) {
    const int K = trial % 2 == 0 ? 3 : 5;
    const bool directed = trial % 4 < 2;
    const WeightedGraph wg{oracle::random_graph(rng, 5, 0.5, directed, K - 1), K};
    const auto s = oracle::random_state(rng, 5, 2, 5, K - 1);
    CHECK(loglik_weighted(wg, s) == Approx(oracle::loglik_weighted(wg.graph, s.cuts, s)).epsilon(1e-11));
  }
}

TEST_CASE("log prior") {
  PriorConfig prior;
  CHECK(log_prior(zeros(3, 3), prior) == 0.0);
  auto s = zeros(3, 3);
  s.alpha(1) = 2.0;
  prior.sigma_alpha = 1.0;
  CHECK(log_prior(s, prior) == Approx(-2.0));
  prior.enabled = false;
  CHECK(log_prior(s, prior) == 0.0);

  std::mt19937_64 rng(25);
  PriorConfig p2{true, 0.7, 2.5, 1.3};
  for (int trial = 0; trial < 20; ++trial) {
    const auto r = oracle::random_state(rng, 7, 3, 7, 0);
    CHECK(log_prior(r, p2) == Approx(oracle::log_prior(r, p2)).epsilon(1e-12));
  }
}

TEST_CASE("rigid motions leave the likelihood unchanged") {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 30; ++trial) {
    const Index dim = 1 + trial % 3;
    const Graph g = oracle::random_graph(rng, 8, 0.3, trial % 2 == 0);
    auto s = oracle::random_state(rng, 8, dim, 8, 0);
    const double before = loglik_unweighted(g, s);
    rigid_motion(rng, s);
    CHECK(std::abs(loglik_unweighted(g, s) - before) < 1e-9);

    const WeightedGraph wg{oracle::random_graph(rng, 8, 0.5, true, 2), 3};
    auto w = oracle::random_state(rng, 8, dim, 8, 2);
    const double wbefore = loglik_weighted(wg, w);
    rigid_motion(rng, w);
    CHECK(std::abs(loglik_weighted(wg, w) - wbefore) < 1e-9);

    const auto cg = oracle::random_cumulative(rng, 8, 2, 0.3);
    auto c = oracle::random_state(rng, 8, dim, static_cast<Index>(cg.n_actions()), 0);
    const double cbefore = loglik_cumulative(cg, c);
    rigid_motion(rng, c);
    CHECK(std::abs(loglik_cumulative(cg, c) - cbefore) < 1e-9);
  }
}

TEST_CASE("alpha/beta gauge shift leaves the likelihood unchanged") {
  std::mt19937_64 rng(27);
  std::uniform_real_distribution<double> shift(-3.0, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Graph g = oracle::random_graph(rng, 9, 0.3, true);
    auto s = oracle::random_state(rng, 9, 2, 9, 0);
    const double before = loglik_unweighted(g, s);
    const double t = shift(rng);
    s.alpha.array() += t;
    s.beta.array() -= t;
    CHECK(std::abs(loglik_unweighted(g, s) - before) < 1e-9);
  }
}

TEST_CASE("monotone in distance") {
  double prev = tie_probability(0.3, -0.2, 0.0);
  for (int k = 1; k <= 50; ++k) {
    const double p = tie_probability(0.3, -0.2, 0.2 * k);
    CHECK(p < prev);
    prev = p;
  }
  // An existing edge contributes less as its endpoints move apart.
  const Graph g = two_nodes(true, false);
  auto s = zeros(2, 2);
  double prev_ll = 0.0;
  for (int k = 0; k <= 20; ++k) {
    s.positions(1, 0) = 0.25 * k;
    const double edge_term = std::log(tie_probability(0.0, 0.0, s.positions(1, 0) * s.positions(1, 0)));
    if (k > 0) CHECK(edge_term < prev_ll);
    prev_ll = edge_term;
  }
}

TEST_CASE("undirected likelihood counts each pair once") {
  std::mt19937_64 rng(28);
  const Graph g = oracle::random_graph(rng, 6, 0.5, false);
  auto s = oracle::random_state(rng, 6, 2, 6, 0);
  const Problem p = make_problem(g);
  // beta is ignored for undirected graphs
  const double before = loglik(p, s);
  s.beta.setRandom();
  CHECK(loglik(p, s) == before);
  CHECK(before == Approx(oracle::loglik_unweighted(g, s)).epsilon(1e-12));
}

TEST_CASE("rater/item mode restricts pairs and parameters") {
  // raters r1, r2 score items i1, i2
  const Graph g = parse_edge_list("r1\ti1\nr2\ti1\nr2\ti2\n", true);
  ModelConfig model;
  model.bipartite = true;
  const Problem p = make_problem(Network{g}, model);
  CHECK(p.pair_mask.sum() == 4.0);
  CHECK(p.alpha_active.sum() == 2.0);
  CHECK(p.beta_active.sum() == 2.0);

  std::mt19937_64 rng(29);
  const auto s = oracle::random_state(rng, 4, 2, 4, 0);
  double expected = 0.0;
  const auto& ids = g.node_ids();
  for (const char* r : {"r1", "r2"}) {
    for (const char* it : {"i1", "i2"}) {
      const auto a = ids.find(r), b = ids.find(it);
      const double pr = oracle::sigmoid(s.alpha(a) + s.beta(b) - oracle::d2(s, a, b));
      expected += g.weight(a, b) ? std::log(pr) : std::log1p(-pr);
    }
  }
  CHECK(loglik(p, s) == Approx(expected).epsilon(1e-12));

  model.undirected = true;
  CHECK_THROWS_AS(make_problem(Network{parse_edge_list("a\tb\n", false)}, model), std::invalid_argument);
}

TEST_CASE("state checks") {
  const Problem p = make_problem(two_nodes(true, true));
  CHECK_THROWS_AS(loglik(p, zeros(3, 3)), std::invalid_argument);
  CHECK_THROWS_AS(loglik(p, zeros(2, 1)), std::invalid_argument);
  const WeightedGraph wg{parse_edge_list("a\tb\t1\n", true), 3};
  auto s = zeros(2, 2, 2);
  s.cuts << -1.0, 1.0;
  CHECK_THROWS_AS(loglik_weighted(wg, s), std::invalid_argument);
  ModelConfig m;
  m.family = Family::weighted;
  m.levels = 4;
  CHECK_THROWS_AS(make_problem(Network{wg}, m), std::invalid_argument);
}

TEST_CASE("long double evaluation agrees with double") {
  std::mt19937_64 rng(30);
  const Graph g = oracle::random_graph(rng, 7, 0.4, true);
  const auto s = oracle::random_state(rng, 7, 2, 7, 0);
  const Problem p = make_problem(g);
  CHECK(static_cast<double>(loglik(p, s.cast<long double>())) == Approx(loglik(p, s)).epsilon(1e-13));
}

}  // TEST_SUITE
