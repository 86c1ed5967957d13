#include <filesystem>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "doctest.h"
#include "latent/integrator.hpp"
#include "latent/layout_file.hpp"
#include "latent/svg.hpp"
#include "latent/synthgen.hpp"
#include "oracles.hpp"

using namespace latent;

namespace {

std::vector<std::pair<double, double>> circles(const std::string& svg) {
  static const std::regex re("<circle cx=\"([^\"]+)\" cy=\"([^\"]+)\"");
  std::vector<std::pair<double, double>> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
    out.emplace_back(std::stod((*it)[1]), std::stod((*it)[2]));
  return out;
}

std::set<std::string> fills(const std::string& svg) {
  static const std::regex re("<circle [^>]*fill=\"([^\"]+)\"");
  std::set<std::string> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
    out.insert((*it)[1]);
  return out;
}

LayoutFile two_node_layout(double x0, double y0, double x1, double y1) {
  LayoutFile f;
  f.node_ids = {"a", "b"};
  f.state = LatentStated(2, 2, 2, 0);
  f.state.positions << x0, y0, x1, y1;
  return f;
}

LayoutFile random_layout(std::mt19937_64& rng, Family family) {
  ModelConfig model;
  model.family = family;
  model.levels = 4;
  Network net;
  Index n_beta = 8, n_cuts = 0;
  if (family == Family::cumulative) {
    auto g = oracle::random_cumulative(rng, 8, 3, 0.4);
    n_beta = static_cast<Index>(g.n_actions());
    net = std::move(g);
  } else if (family == Family::weighted) {
    net = WeightedGraph{oracle::random_graph(rng, 8, 0.4, true, 3), 4};
    n_cuts = 3;
  } else {
    net = oracle::random_graph(rng, 8, 0.4, true);
  }
  LayoutResult r;
  r.state = oracle::random_state(rng, 8, 2, n_beta, n_cuts);
  r.seed = rng();
  r.iterations = 123;
  r.converged = true;
  r.loglik = loglik(make_problem(net, model), r.state);
  r.log_posterior = r.loglik - 0.1234567890123;
  return make_layout_file(r, net, model);
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("layout files round trip exactly") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 15; ++trial) {
    const Family family = static_cast<Family>(trial % 3);
    const LayoutFile f = random_layout(rng, family);
    const LayoutFile back = layout_from_json(to_json(f));
    CHECK(back == f);
    CHECK(to_json(back) == to_json(f));
  }
}

TEST_CASE("layout files survive the disk") {
  std::mt19937_64 rng(13);
  const LayoutFile f = random_layout(rng, Family::weighted);
  const auto dir = std::filesystem::temp_directory_path() / "latent_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "layout.json";
  write_layout_file(path, f);
  CHECK(read_layout_file(path) == f);
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed layout documents") {
  CHECK_THROWS(layout_from_json("not json"));
  CHECK_THROWS(layout_from_json("{}"));
  CHECK_THROWS(read_layout_file("/nonexistent/layout.json"));
}

TEST_CASE("binding a layout to a network") {
  const Graph g = parse_edge_list("a\tb\nb\tc\n", true);
  LayoutFile f;
  f.node_ids = {"c", "a", "b"};
  f.state = LatentStated(3, 2, 3, 0);
  f.state.positions << 3, 0, 1, 0, 2, 0;
  f.state.alpha << 30, 10, 20;
  const LatentStated s = bind_state(f, g);
  CHECK(s.positions(0, 0) == 1);
  CHECK(s.positions(2, 0) == 3);
  CHECK(s.alpha(1) == 20);

  f.node_ids = {"c", "a", "x"};
  CHECK_THROWS_AS(bind_state(f, g), std::invalid_argument);
  f.node_ids = {"a", "b"};
  CHECK_THROWS_AS(bind_state(f, g), std::invalid_argument);
}

TEST_CASE("recorded loglik is reproduced from the file") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 6; ++trial) {
    ModelConfig model;
    model.family = static_cast<Family>(trial % 3);
    model.levels = 3;
    Network net;
    if (model.family == Family::cumulative) net = oracle::random_cumulative(rng, 10, 2, 0.3);
    else if (model.family == Family::weighted) net = WeightedGraph{oracle::random_graph(rng, 10, 0.3, true, 2), 3};
    else net = oracle::random_graph(rng, 10, 0.3, true);
    IntegratorConfig c;
    c.seed = trial;
    c.max_iters = 300;
    const auto r = run_layout(net, model, c);
    const LayoutFile back = layout_from_json(to_json(make_layout_file(r, net, model)));
    const double ll = loglik(make_problem(net, back.model), bind_state(back, net));
    CHECK(std::abs(ll - back.loglik) <= 1e-9 * std::max(1.0, std::abs(ll)));
  }
}

TEST_CASE("SVG: coincident nodes share a point") {
  const auto doc = render_svg(two_node_layout(0.5, 0.5, 0.5, 0.5), nullptr, {});
  const auto c = circles(doc.text);
  REQUIRE(c.size() == 2);
  CHECK(c[0] == c[1]);
}

TEST_CASE("SVG: a unit segment spans the viewport minus margins") {
  const auto doc = render_svg(two_node_layout(0, 0, 1, 0), nullptr, {});
  const auto c = circles(doc.text);
  REQUIRE(c.size() == 2);
  CHECK(c[1].first - c[0].first == doctest::Approx(900.0));
  CHECK(c[0].second == c[1].second);
  // y grows upwards.
  const auto up = circles(render_svg(two_node_layout(0, 0, 0, 1), nullptr, {}).text);
  CHECK(up[1].second < up[0].second);
}

TEST_CASE("SVG: edges and weights") {
  const Network g = WeightedGraph{parse_edge_list("a\tb\t2\nb\ta\t1\n", true), 3};
  const auto doc = render_svg(two_node_layout(0, 0, 1, 1), &g, {});
  CHECK(doc.text.find("stroke-opacity=\"0.600\"") != std::string::npos);
  CHECK(doc.text.find("stroke-opacity=\"0.300\"") != std::string::npos);
  // Unweighted ties are drawn at full edge opacity.
  const Network plain = parse_edge_list("a\tb\n", true);
  CHECK(render_svg(two_node_layout(0, 0, 1, 1), &plain, {}).text.find("stroke-opacity=\"0.600\"") != std::string::npos);
}

TEST_CASE("SVG: colours per label") {
  ModelConfig model;
  model.prior.enabled = false;
  SbmSpec spec;
  spec.block_sizes = {10, 12};
  const auto latent = sample_latent(spec);
  const Network net = sample_network(latent.state, model, {}, 1);
  LayoutResult r;
  r.state = latent.state;
  const LayoutFile f = make_layout_file(r, net, model);
  std::ostringstream csv;
  csv << "id,label\n";
  for (std::size_t i = 0; i < f.node_ids.size(); ++i) csv << f.node_ids[i] << ",block" << latent.labels[i] << "\n";
  csv << "ghost,block0\n";
  std::istringstream in(csv.str());
  SvgOptions options;
  options.labels = read_metadata_csv(in);
  const auto doc = render_svg(f, &net, options);
  CHECK(fills(doc.text).size() == 2);
  REQUIRE(doc.warnings.size() == 1);
  CHECK(doc.warnings[0].find("ghost") != std::string::npos);
  CHECK(render_svg(f, &net, options).text == doc.text);
}

TEST_CASE("SVG needs two dimensions") {
  LayoutFile f;
  f.node_ids = {"a"};
  f.state = LatentStated(1, 3, 1, 0);
  CHECK_THROWS_AS(render_svg(f, nullptr, {}), std::invalid_argument);
}

TEST_CASE("metadata CSV") {
  std::istringstream ok("a,x\nb,y\n");
  const auto m = read_metadata_csv(ok);
  CHECK(m.size() == 2);
  CHECK(m.at("b") == "y");
  std::istringstream bad("a x\n");
  CHECK_THROWS_AS(read_metadata_csv(bad), ParseError);
}

}  // TEST_SUITE
