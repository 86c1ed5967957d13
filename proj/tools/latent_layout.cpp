#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "latent/forces.hpp"
#include "latent/graph.hpp"
#include "latent/integrator.hpp"
#include "latent/layout_file.hpp"
#include "latent/model.hpp"
#include "latent/svg.hpp"
#include "latent/synthgen.hpp"
#include "latent/validation.hpp"

using namespace latent;

namespace {

// Exit code 1 for bad input, 2 when every restart diverged.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

Network read_network(const std::string& path, const ModelConfig& model) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  switch (model.family) {
    case Family::cumulative:
      return parse_cumulative(in);
    case Family::weighted: {
      WeightedGraph wg{parse_edge_list(in, !model.undirected), model.levels};
      validate_levels(wg);
      return wg;
    }
    case Family::unweighted:
      break;
  }
  return parse_edge_list(in, !model.undirected);
}

std::string serialize(const Network& network) {
  if (const auto* cg = std::get_if<CumulativeGraph>(&network)) return serialize_cumulative(*cg);
  if (const auto* wg = std::get_if<WeightedGraph>(&network)) return serialize_edge_list(wg->graph);
  return serialize_edge_list(std::get<Graph>(network));
}

std::unordered_map<std::string, std::string> read_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  return read_metadata_csv(in);
}

void write_svg(const std::string& path, const LayoutFile& layout, const Network* network,
               const std::string& meta) {
  SvgOptions options;
  if (!meta.empty()) options.labels = read_labels(meta);
  const auto doc = render_svg(layout, network, options);
  for (const auto& w : doc.warnings) std::cerr << "warning: " << w << "\n";
  write_file_atomic(path, doc.text);
}

Eigen::VectorXd default_cuts(int levels) {
  if (levels < 2) throw UsageError("--levels must be at least 2");
  if (levels == 2) return Eigen::VectorXd::Zero(1);
  return Eigen::VectorXd::LinSpaced(levels - 1, 1.0, -1.0);
}

// Truth files are LayoutFiles of the generating state with the prior switched off.
LayoutFile truth_file(const LatentStated& state, const Network& network, const ModelConfig& model,
                      std::uint64_t seed) {
  LayoutResult r;
  r.state = state;
  r.seed = seed;
  r.loglik = ground_truth_loglik(network, state, model);
  r.log_posterior = r.loglik;
  return make_layout_file(r, network, model);
}

void write_labels(const std::string& path, const Network& network, const std::vector<int>& labels) {
  std::ostringstream out;
  out << "id,label\n";
  const auto& ids = network_ids(network);
  for (NodeIndex i = 0; i < ids.size(); ++i)
    out << ids[i] << ",c" << labels[static_cast<std::size_t>(i)] << "\n";
  write_file_atomic(path, out.str());
}

// ---- layout ----

struct ModelFlags {
  std::string model = "unweighted";
  bool undirected = false;
  bool bipartite = false;
  int levels = 3;
  std::string prior = "on";
  double sigma_alpha = 10.0, sigma_beta = 10.0, sigma_pos = 10.0;

  ModelConfig config() const {
    ModelConfig m;
    m.family = family_from_string(model);
    m.undirected = undirected;
    m.bipartite = bipartite;
    m.levels = m.family == Family::weighted ? levels : 2;
    if (prior != "on" && prior != "off") throw UsageError("--prior must be 'on' or 'off'");
    m.prior.enabled = prior == "on";
    m.prior.sigma_alpha = sigma_alpha;
    m.prior.sigma_beta = sigma_beta;
    m.prior.sigma_pos = sigma_pos;
    if (!(sigma_alpha > 0 && sigma_beta > 0 && sigma_pos > 0))
      throw UsageError("prior sigmas must be positive");
    return m;
  }
};

struct IntegratorFlags {
  std::string dt = "0.05";
  double damping = 0.9;
  int max_iters = 5000;
  double tol = 1e-4;
  double param_mass = 1.0;
  std::uint64_t seed = 1;
  int restarts = 5;
  int dim = 2;
  bool deterministic = false;

  IntegratorConfig config(const Problem& problem) const {
    IntegratorConfig c;
    c.damping = damping;
    c.max_iters = max_iters;
    c.tol = tol;
    c.param_mass = param_mass;
    c.seed = seed;
    c.restarts = restarts;
    c.dim = dim;
    c.deterministic = deterministic;
    if (dt == "auto") {
      c = stiffness_scaled(problem, c);
    } else {
      try {
        std::size_t used = 0;
        c.dt = std::stod(dt, &used);
        if (used != dt.size()) throw std::invalid_argument(dt);
      } catch (const std::exception&) {
        throw UsageError("--dt must be a number or 'auto'");
      }
    }
    validate(c);
    return c;
  }
};

void add_model_flags(CLI::App* cmd, ModelFlags& f, bool with_prior) {
  cmd->add_option("--model", f.model, "unweighted | cumulative | weighted")
      ->check(CLI::IsMember({"unweighted", "cumulative", "weighted"}));
  cmd->add_flag("--undirected", f.undirected, "symmetric ties");
  cmd->add_flag("--bipartite", f.bipartite, "rater -> item data; only those pairs are modelled");
  cmd->add_option("--levels", f.levels, "level count K for the weighted model");
  if (!with_prior) return;
  cmd->add_option("--prior", f.prior, "Gaussian prior on parameters and positions (on|off)");
  cmd->add_option("--prior-sigma-alpha", f.sigma_alpha);
  cmd->add_option("--prior-sigma-beta", f.sigma_beta);
  cmd->add_option("--prior-sigma-pos", f.sigma_pos);
}

void add_integrator_flags(CLI::App* cmd, IntegratorFlags& f) {
  cmd->add_option("--dt", f.dt, "time step, or 'auto' to scale with the network size");
  cmd->add_option("--damping", f.damping);
  cmd->add_option("--max-iters", f.max_iters);
  cmd->add_option("--tol", f.tol);
  cmd->add_option("--param-mass", f.param_mass, "inertia of alpha, beta and cut coordinates");
  cmd->add_option("--seed", f.seed);
  cmd->add_option("--restarts", f.restarts);
  cmd->add_option("--dim", f.dim);
  cmd->add_flag("--deterministic", f.deterministic, "run restarts on one thread");
}

struct LayoutArgs {
  std::string input, out, svg, meta;
  ModelFlags model;
  IntegratorFlags integrator;
};

int run_layout_command(const LayoutArgs& args) {
  const ModelConfig model = args.model.config();
  const Network network = read_network(args.input, model);
  const Problem problem = make_problem(network, model);
  const IntegratorConfig config = args.integrator.config(problem);

  RestartSummary summary;
  try {
    summary = run_restarts(problem, model, config);
  } catch (const DivergenceError& e) {
    std::cerr << "error: every restart diverged (" << e.what() << ")\n";
    if (args.integrator.dt != "auto") {
      IntegratorConfig fallback = config;
      fallback.dt = IntegratorConfig{}.dt;
      std::cerr << "hint: --dt auto would use dt = " << stiffness_scaled(problem, fallback).dt << "\n";
    }
    return 2;
  }

  std::cout << "restart\tseed\tloglik\tlog_posterior\titerations\tconverged\n";
  std::size_t k = 0;
  for (std::size_t r = 0; r < static_cast<std::size_t>(config.restarts); ++r) {
    const std::uint64_t seed = config.seed + r;
    if (k < summary.all.size() && summary.all[k].seed == seed) {
      const auto& run = summary.all[k];
      std::cout << r << "\t" << seed << "\t" << fixed(run.loglik) << "\t" << fixed(run.log_posterior)
                << "\t" << run.iterations << "\t" << (run.converged ? "yes" : "no")
                << (k == summary.best_index ? "\t*best" : "") << "\n";
      for (const auto& w : run.warnings) std::cerr << "warning: " << w << "\n";
      ++k;
    } else {
      for (const auto& f : summary.failures)
        if (f.seed == seed) std::cout << r << "\t" << seed << "\tfailed: " << f.message << "\n";
    }
  }

  const LayoutFile file = make_layout_file(summary.best, network, model);
  write_layout_file(args.out, file);
  if (!args.svg.empty()) write_svg(args.svg, file, &network, args.meta);
  return 0;
}

// ---- generate ----

struct SbmArgs {
  int n1 = 100, n2 = 100;
  double p_in = 0.5, p_out = 0.2;
  std::uint64_t seed = 1;
  std::string graph, truth, labels;
};

int run_generate_sbm(const SbmArgs& a) {
  SbmSpec spec;
  spec.block_sizes = {a.n1, a.n2};
  spec.p_in = a.p_in;
  spec.p_out = a.p_out;
  spec.seed = a.seed;
  const auto latent = sample_latent(spec);
  ModelConfig model;
  model.prior.enabled = false;
  const Network network = sample_network(latent.state, model, {}, a.seed);
  write_file_atomic(a.graph, serialize(network));
  write_layout_file(a.truth, truth_file(latent.state, network, model, a.seed));
  if (!a.labels.empty()) write_labels(a.labels, network, latent.labels);
  std::cout << "expected_distance=" << num(sbm_distance(a.p_in, a.p_out)) << "\n";
  return 0;
}

struct GaussianArgs {
  int n = 100, clusters = 2, dim = 2, actions = 3, levels = 3;
  double sigma = 1.0 / 12.0, sep = 5.0 / 6.0;
  std::string model = "unweighted";
  bool undirected = false;
  std::uint64_t seed = 1;
  std::string graph, truth, labels;
};

int run_generate_gaussian(const GaussianArgs& a) {
  GaussianClusterSpec spec;
  spec.n_nodes = a.n;
  spec.n_clusters = a.clusters;
  spec.sigma = a.sigma;
  spec.separation = a.sep;
  spec.dim = a.dim;
  spec.seed = a.seed;
  const auto latent = sample_latent(spec);
  ModelConfig model;
  model.family = family_from_string(a.model);
  model.undirected = a.undirected;
  model.prior.enabled = false;
  SamplingExtras extras;
  extras.actions_per_author = a.actions;
  if (model.family == Family::weighted) {
    model.levels = a.levels;
    extras.cuts = default_cuts(a.levels);
  }
  const LatentStated state = generating_state(latent.state, model, extras);
  const Network network = sample_network(state, model, extras, a.seed);
  write_file_atomic(a.graph, serialize(network));
  write_layout_file(a.truth, truth_file(state, network, model, a.seed));
  if (!a.labels.empty()) write_labels(a.labels, network, latent.labels);
  return 0;
}

// ---- validate ----

struct SweepArgs {
  std::vector<double> pouts{0.1, 0.2, 0.3, 0.4};
  int runs = 5, n1 = 100, n2 = 100, permutations = 99;
  double p_in = 0.5;
  std::string report;
  IntegratorFlags integrator;  // its seed is the base seed of the sweep
};

int run_sbm_sweep(const SweepArgs& a) {
  ModelConfig model;
  model.prior.enabled = false;
  std::ostringstream report;
  std::cout << "p_out\trun\texpected\tinferred\trel_error\tloglik_gap\tmantel_r\n";
  for (double p_out : a.pouts) {
    SbmSpec spec;
    spec.block_sizes = {a.n1, a.n2};
    spec.p_in = a.p_in;
    spec.p_out = p_out;
    const auto latent = sample_latent(spec);
    const double expected = sbm_distance(a.p_in, p_out);
    for (int run = 0; run < a.runs; ++run) {
      const std::uint64_t seed = a.integrator.seed + static_cast<std::uint64_t>(run);
      const Network network = sample_network(latent.state, model, {}, seed);
      const Problem problem = make_problem(network, model);
      IntegratorFlags flags = a.integrator;
      flags.seed = seed;
      const auto summary = run_restarts(problem, model, flags.config(problem));
      RecoveryOptions options;
      options.expected_distance = expected;
      options.permutations = a.permutations;
      options.seed = seed;
      const auto rep = recovery_report(latent.state, summary.best.state, latent.labels, network,
                                       model, options);
      const double rel = expected > 0 ? std::abs(rep.distance_inferred - expected) / expected
                                      : rep.distance_inferred;
      std::cout << fixed(p_out) << "\t" << run << "\t" << fixed(expected) << "\t"
                << fixed(rep.distance_inferred) << "\t" << fixed(rel) << "\t"
                << fixed(rep.loglik_gap, 3) << "\t" << fixed(rep.mantel_r, 4) << "\n";
      if (!a.report.empty()) {
        auto j = nlohmann::ordered_json::parse(rep.to_json());
        j["p_out"] = p_out;
        j["run"] = run;
        j["seed"] = seed;
        report << j.dump() << "\n";
      }
    }
  }
  if (!a.report.empty()) write_file_atomic(a.report, report.str());
  return 0;
}

struct MantelArgs {
  std::string truth, layout;
  int permutations = 999;
  std::uint64_t seed = 1;
};

int run_mantel(const MantelArgs& a) {
  const LayoutFile truth = read_layout_file(a.truth);
  const LayoutFile layout = read_layout_file(a.layout);
  if (truth.node_ids.size() != layout.node_ids.size())
    throw UsageError("truth has " + std::to_string(truth.node_ids.size()) + " nodes, layout has " +
                     std::to_string(layout.node_ids.size()));
  std::unordered_map<std::string, Index> row;
  for (std::size_t i = 0; i < layout.node_ids.size(); ++i)
    row[layout.node_ids[i]] = static_cast<Index>(i);
  Eigen::MatrixXd aligned(layout.state.size(), layout.state.dim());
  for (std::size_t i = 0; i < truth.node_ids.size(); ++i) {
    auto it = row.find(truth.node_ids[i]);
    if (it == row.end()) throw UsageError("node '" + truth.node_ids[i] + "' is missing from the layout");
    aligned.row(static_cast<Index>(i)) = layout.state.positions.row(it->second);
  }
  const auto m = mantel_test(distance_matrix(truth.state.positions), distance_matrix(aligned),
                             a.permutations, a.seed);
  std::cout << "r=" << num(m.r) << "\nz=" << num(m.z) << "\np_value=" << num(m.p_value)
            << "\npermutations=" << m.permutations << "\nseed=" << m.seed << "\n";
  return 0;
}

// ---- loglik / render ----

ModelConfig model_of(const LayoutFile& layout) { return layout.model; }

int run_loglik(const std::string& input, const std::string& layout_path) {
  const LayoutFile layout = read_layout_file(layout_path);
  const ModelConfig model = model_of(layout);
  const Network network = read_network(input, model);
  const LatentStated state = bind_state(layout, network);
  const Problem problem = make_problem(network, model);
  const double ll = loglik(problem, state);
  std::cout << "loglik=" << num(ll) << "\nlog_posterior=" << num(ll + log_prior(state, model.prior))
            << "\n";
  return 0;
}

int run_render(const std::string& layout_path, const std::string& input, const std::string& out,
               const std::string& meta) {
  const LayoutFile layout = read_layout_file(layout_path);
  std::optional<Network> network;
  if (!input.empty()) {
    network = read_network(input, model_of(layout));
    bind_state(layout, *network);  // id check
  }
  write_svg(out, layout, network ? &*network : nullptr, meta);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent space layouts of directed, cumulative and ordinal networks"};
  app.require_subcommand(1);

  LayoutArgs layout;
  auto* cmd_layout = app.add_subcommand("layout", "fit a layout to a network file");
  cmd_layout->add_option("--input", layout.input, "edge list or cumulative TSV")->required();
  cmd_layout->add_option("--out", layout.out, "layout JSON")->required();
  cmd_layout->add_option("--svg", layout.svg, "also render the best layout");
  cmd_layout->add_option("--meta", layout.meta, "id,label CSV used to colour the SVG");
  add_model_flags(cmd_layout, layout.model, true);
  add_integrator_flags(cmd_layout, layout.integrator);

  auto* cmd_generate = app.add_subcommand("generate", "sample a synthetic network");
  cmd_generate->require_subcommand(1);
  SbmArgs sbm;
  auto* cmd_sbm = cmd_generate->add_subcommand("sbm", "two-block model");
  cmd_sbm->add_option("--n1", sbm.n1);
  cmd_sbm->add_option("--n2", sbm.n2);
  cmd_sbm->add_option("--pin", sbm.p_in);
  cmd_sbm->add_option("--pout", sbm.p_out);
  cmd_sbm->add_option("--seed", sbm.seed);
  cmd_sbm->add_option("--graph", sbm.graph, "network output")->required();
  cmd_sbm->add_option("--truth", sbm.truth, "generating state as a layout file")->required();
  cmd_sbm->add_option("--labels", sbm.labels, "block labels as id,label CSV");
  GaussianArgs gauss;
  auto* cmd_gauss = cmd_generate->add_subcommand("gaussian", "Gaussian clusters");
  cmd_gauss->add_option("--n", gauss.n);
  cmd_gauss->add_option("--clusters", gauss.clusters);
  cmd_gauss->add_option("--sigma", gauss.sigma);
  cmd_gauss->add_option("--sep", gauss.sep);
  cmd_gauss->add_option("--dim", gauss.dim);
  cmd_gauss->add_option("--model", gauss.model)
      ->check(CLI::IsMember({"unweighted", "cumulative", "weighted"}));
  cmd_gauss->add_flag("--undirected", gauss.undirected);
  cmd_gauss->add_option("--actions", gauss.actions, "actions per author (cumulative)");
  cmd_gauss->add_option("--levels", gauss.levels, "level count (weighted)");
  cmd_gauss->add_option("--seed", gauss.seed);
  cmd_gauss->add_option("--graph", gauss.graph, "network output")->required();
  cmd_gauss->add_option("--truth", gauss.truth, "generating state as a layout file")->required();
  cmd_gauss->add_option("--labels", gauss.labels, "cluster labels as id,label CSV");

  auto* cmd_validate = app.add_subcommand("validate", "recovery experiments");
  cmd_validate->require_subcommand(1);
  SweepArgs sweep;
  sweep.integrator.restarts = 1;
  auto* cmd_sweep = cmd_validate->add_subcommand("sbm-sweep", "distance recovery over p_out");
  cmd_sweep->add_option("--pouts", sweep.pouts)->delimiter(',');
  cmd_sweep->add_option("--runs", sweep.runs);
  cmd_sweep->add_option("--n1", sweep.n1);
  cmd_sweep->add_option("--n2", sweep.n2);
  cmd_sweep->add_option("--pin", sweep.p_in);
  cmd_sweep->add_option("--permutations", sweep.permutations);
  cmd_sweep->add_option("--report", sweep.report, "one JSON record per run");
  add_integrator_flags(cmd_sweep, sweep.integrator);
  MantelArgs mantel;
  auto* cmd_mantel = cmd_validate->add_subcommand("mantel", "compare two layouts' distances");
  cmd_mantel->add_option("--truth", mantel.truth)->required();
  cmd_mantel->add_option("--layout", mantel.layout)->required();
  cmd_mantel->add_option("--permutations", mantel.permutations);
  cmd_mantel->add_option("--seed", mantel.seed);

  std::string ll_input, ll_layout;
  auto* cmd_loglik = app.add_subcommand("loglik", "evaluate a layout on a network");
  cmd_loglik->add_option("--input", ll_input)->required();
  cmd_loglik->add_option("--layout", ll_layout)->required();

  std::string r_layout, r_input, r_out, r_meta;
  auto* cmd_render = app.add_subcommand("render", "draw a 2-D layout as SVG");
  cmd_render->add_option("--layout", r_layout)->required();
  cmd_render->add_option("--input", r_input, "network for edges");
  cmd_render->add_option("--out", r_out)->required();
  cmd_render->add_option("--meta", r_meta, "id,label CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*cmd_layout) return run_layout_command(layout);
    if (*cmd_sbm) return run_generate_sbm(sbm);
    if (*cmd_gauss) return run_generate_gaussian(gauss);
    if (*cmd_sweep) return run_sbm_sweep(sweep);
    if (*cmd_mantel) return run_mantel(mantel);
    if (*cmd_loglik) return run_loglik(ll_input, ll_layout);
    if (*cmd_render) return run_render(r_layout, r_input, r_out, r_meta);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
