#include "latent/layout_file.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace latent {

using json = nlohmann::ordered_json;

bool LayoutFile::operator==(const LayoutFile& o) const {
  return model.family == o.model.family && model.levels == o.model.levels &&
         model.undirected == o.model.undirected && model.bipartite == o.model.bipartite &&
         model.prior.enabled == o.model.prior.enabled &&
         model.prior.sigma_alpha == o.model.prior.sigma_alpha &&
         model.prior.sigma_beta == o.model.prior.sigma_beta &&
         model.prior.sigma_pos == o.model.prior.sigma_pos && seed == o.seed &&
         iterations == o.iterations && converged == o.converged && loglik == o.loglik &&
         log_posterior == o.log_posterior && node_ids == o.node_ids && actions == o.actions &&
         state == o.state;
}

LayoutFile make_layout_file(const LayoutResult& result, const Network& network,
                            const ModelConfig& model) {
  LayoutFile f;
  f.model = model;
  f.seed = result.seed;
  f.iterations = result.iterations;
  f.converged = result.converged;
  f.loglik = result.loglik;
  f.log_posterior = result.log_posterior;
  f.node_ids = network_ids(network).ids();
  if (const auto* cg = std::get_if<CumulativeGraph>(&network)) {
    for (const auto& a : cg->actions())
      f.actions.push_back({cg->node_ids()[a.author], a.action_id});
  }
  f.state = result.state;
  return f;
}

std::string to_json(const LayoutFile& layout) {
  const auto& s = layout.state;
  const bool cumulative = layout.model.family == Family::cumulative;
  json j;
  j["format"] = "latent-layout/1";
  j["model"] = to_string(layout.model.family);
  j["undirected"] = layout.model.undirected;
  j["bipartite"] = layout.model.bipartite;
  j["levels"] = layout.model.levels;
  j["dim"] = s.dim();
  j["seed"] = layout.seed;
  j["iterations"] = layout.iterations;
  j["converged"] = layout.converged;
  j["loglik"] = layout.loglik;
  j["log_posterior"] = layout.log_posterior;
  j["prior"] = {{"enabled", layout.model.prior.enabled},
                {"sigma_alpha", layout.model.prior.sigma_alpha},
                {"sigma_beta", layout.model.prior.sigma_beta},
                {"sigma_pos", layout.model.prior.sigma_pos}};
  j["cuts"] = std::vector<double>(s.cuts.data(), s.cuts.data() + s.cuts.size());
  json nodes = json::array();
  for (Index i = 0; i < s.size(); ++i) {
    json node;
    node["id"] = layout.node_ids.at(static_cast<std::size_t>(i));
    std::vector<double> x(static_cast<std::size_t>(s.dim()));
    for (Index d = 0; d < s.dim(); ++d) x[static_cast<std::size_t>(d)] = s.positions(i, d);
    node["x"] = x;
    node["alpha"] = s.alpha(i);
    if (!cumulative) node["beta"] = s.beta(i);
    nodes.push_back(std::move(node));
  }
  j["nodes"] = std::move(nodes);
  if (cumulative) {
    json actions = json::array();
    for (std::size_t k = 0; k < layout.actions.size(); ++k)
      actions.push_back({{"author_id", layout.actions[k].author_id},
                         {"action_id", layout.actions[k].action_id},
                         {"beta", s.beta(static_cast<Index>(k))}});
    j["actions"] = std::move(actions);
  }
  return j.dump(2) + "\n";
}

LayoutFile layout_from_json(const std::string& text) {
  LayoutFile f;
  try {
    const json j = json::parse(text);
    if (j.at("format") != "latent-layout/1") throw std::invalid_argument("unknown layout format");
    f.model.family = family_from_string(j.at("model").get<std::string>());
    f.model.undirected = j.at("undirected").get<bool>();
    f.model.bipartite = j.value("bipartite", false);
    f.model.levels = j.at("levels").get<int>();
    const auto& prior = j.at("prior");
    f.model.prior.enabled = prior.at("enabled").get<bool>();
    f.model.prior.sigma_alpha = prior.at("sigma_alpha").get<double>();
    f.model.prior.sigma_beta = prior.at("sigma_beta").get<double>();
    f.model.prior.sigma_pos = prior.at("sigma_pos").get<double>();
    f.seed = j.at("seed").get<std::uint64_t>();
    f.iterations = j.at("iterations").get<int>();
    f.converged = j.at("converged").get<bool>();
    f.loglik = j.at("loglik").get<double>();
    f.log_posterior = j.at("log_posterior").get<double>();

    const auto dim = j.at("dim").get<Index>();
    const auto& nodes = j.at("nodes");
    const auto n = static_cast<Index>(nodes.size());
    const bool cumulative = f.model.family == Family::cumulative;
    const auto& actions = cumulative ? j.at("actions") : json::array();
    const auto cuts = j.at("cuts").get<std::vector<double>>();
    f.state = LatentStated(n, dim, cumulative ? static_cast<Index>(actions.size()) : n,
                           static_cast<Index>(cuts.size()));
    for (std::size_t k = 0; k < cuts.size(); ++k) f.state.cuts(static_cast<Index>(k)) = cuts[k];
    for (Index i = 0; i < n; ++i) {
      const auto& node = nodes[static_cast<std::size_t>(i)];
      f.node_ids.push_back(node.at("id").get<std::string>());
      const auto x = node.at("x").get<std::vector<double>>();
      if (static_cast<Index>(x.size()) != dim)
        throw std::invalid_argument("node '" + f.node_ids.back() + "' has wrong dimension");
      for (Index d = 0; d < dim; ++d) f.state.positions(i, d) = x[static_cast<std::size_t>(d)];
      f.state.alpha(i) = node.at("alpha").get<double>();
      if (!cumulative) f.state.beta(i) = node.at("beta").get<double>();
    }
    for (std::size_t k = 0; k < actions.size(); ++k) {
      const auto& a = actions[k];
      f.actions.push_back({a.at("author_id").get<std::string>(), a.at("action_id").get<std::string>()});
      f.state.beta(static_cast<Index>(k)) = a.at("beta").get<double>();
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed layout file: ") + e.what());
  }
  std::unordered_map<std::string, int> seen;
  for (const auto& id : f.node_ids)
    if (seen[id]++) throw std::invalid_argument("duplicate node id '" + id + "' in layout file");
  return f;
}

LayoutFile read_layout_file(const std::filesystem::path& path) {
  return layout_from_json(read_file(path));
}

void write_layout_file(const std::filesystem::path& path, const LayoutFile& layout) {
  write_file_atomic(path, to_json(layout));
}

LatentStated bind_state(const LayoutFile& layout, const Network& network) {
  const auto& ids = network_ids(network);
  const Index n = ids.size();
  if (static_cast<Index>(layout.node_ids.size()) != n)
    throw std::invalid_argument("layout has " + std::to_string(layout.node_ids.size()) +
                                " nodes, network has " + std::to_string(n));
  const auto& src = layout.state;
  LatentStated out(n, src.dim(), 0, src.cuts.size());
  out.cuts = src.cuts;
  const bool cumulative = std::holds_alternative<CumulativeGraph>(network);
  if (!cumulative) out.beta.resize(n);
  for (Index row = 0; row < n; ++row) {
    const auto& id = layout.node_ids[static_cast<std::size_t>(row)];
    const NodeIndex i = ids.find(id);
    if (i < 0) throw std::invalid_argument("layout node '" + id + "' is not in the network");
    out.positions.row(i) = src.positions.row(row);
    out.alpha(i) = src.alpha(row);
    if (!cumulative) out.beta(i) = src.beta(row);
  }
  if (cumulative) {
    const auto& cg = std::get<CumulativeGraph>(network);
    if (layout.actions.size() != cg.n_actions())
      throw std::invalid_argument("layout has " + std::to_string(layout.actions.size()) +
                                  " actions, network has " + std::to_string(cg.n_actions()));
    std::unordered_map<std::string, Index> index;
    for (std::size_t k = 0; k < cg.n_actions(); ++k) {
      const auto& a = cg.actions()[k];
      index[cg.node_ids()[a.author] + '\t' + a.action_id] = static_cast<Index>(k);
    }
    out.beta = Eigen::VectorXd::Zero(static_cast<Index>(cg.n_actions()));
    for (std::size_t k = 0; k < layout.actions.size(); ++k) {
      const auto& key = layout.actions[k];
      auto it = index.find(key.author_id + '\t' + key.action_id);
      if (it == index.end())
        throw std::invalid_argument("layout action '" + key.author_id + "/" + key.action_id +
                                    "' is not in the network");
      out.beta(it->second) = src.beta(static_cast<Index>(k));
    }
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace latent
