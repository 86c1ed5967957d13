#include "latent/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace latent {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr const char* kDefaultFill = "#1f77b4";
constexpr const char* kUnlabeledFill = "#bbbbbb";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct WeightedEdge {
  NodeIndex src, dst;
  double weight;
};

std::vector<WeightedEdge> collect_edges(const Network& network) {
  std::vector<WeightedEdge> out;
  if (const auto* g = std::get_if<Graph>(&network)) {
    for (const auto& e : g->edges()) out.push_back({e.src, e.dst, 1.0});
  } else if (const auto* wg = std::get_if<WeightedGraph>(&network)) {
    for (const auto& e : wg->graph.edges()) out.push_back({e.src, e.dst, double(e.weight)});
  } else {
    const auto& cg = std::get<CumulativeGraph>(network);
    std::map<std::pair<NodeIndex, NodeIndex>, double> counts;
    for (const auto& a : cg.actions())
      for (auto i : a.adopters) counts[{i, a.author}] += 1.0;
    for (const auto& [key, w] : counts) out.push_back({key.first, key.second, w});
  }
  return out;
}

}  // namespace

std::unordered_map<std::string, std::string> read_metadata_csv(std::istream& in) {
  std::unordered_map<std::string, std::string> labels;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError(number, "expected 'id,label'");
    const auto id = trim(line.substr(0, comma));
    const auto label = trim(line.substr(comma + 1));
    if (number == 1 && id == "id" && label == "label") continue;
    labels[id] = label;
  }
  return labels;
}

SvgDocument render_svg(const LayoutFile& layout, const Network* network, const SvgOptions& options) {
  const auto& pos = layout.state.positions;
  if (pos.cols() != 2)
    throw std::invalid_argument("SVG export needs a 2-D layout (got dim " +
                                std::to_string(pos.cols()) + "); project to two dimensions first");
  SvgDocument doc;
  const Index n = pos.rows();
  const double w = options.width, h = options.height;
  const double avail_w = w * (1.0 - 2.0 * options.margin_fraction);
  const double avail_h = h * (1.0 - 2.0 * options.margin_fraction);

  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  if (n > 0) {
    min_x = pos.col(0).minCoeff();
    max_x = pos.col(0).maxCoeff();
    min_y = pos.col(1).minCoeff();
    max_y = pos.col(1).maxCoeff();
  }
  const double range_x = max_x - min_x, range_y = max_y - min_y;
  double scale = 0.0;
  if (range_x > 0) scale = avail_w / range_x;
  if (range_y > 0) scale = scale > 0 ? std::min(scale, avail_h / range_y) : avail_h / range_y;
  if (scale == 0.0) scale = 1.0;
  const double mid_x = 0.5 * (min_x + max_x), mid_y = 0.5 * (min_y + max_y);
  auto to_view = [&](Index i) {
    return std::pair{0.5 * w + (pos(i, 0) - mid_x) * scale, 0.5 * h - (pos(i, 1) - mid_y) * scale};
  };

  // Colours follow the first appearance of each label in node order.
  std::vector<std::string> fill(static_cast<std::size_t>(n), kDefaultFill);
  if (!options.labels.empty()) {
    std::unordered_set<std::string> known(layout.node_ids.begin(), layout.node_ids.end());
    std::vector<std::string> unknown;
    for (const auto& [id, label] : options.labels)
      if (!known.count(id)) unknown.push_back(id);
    std::sort(unknown.begin(), unknown.end());
    for (const auto& id : unknown) doc.warnings.push_back("metadata id '" + id + "' is not in the layout");
    std::map<std::string, std::size_t> colour_of;
    for (Index i = 0; i < n; ++i) {
      auto it = options.labels.find(layout.node_ids[static_cast<std::size_t>(i)]);
      if (it == options.labels.end()) {
        fill[static_cast<std::size_t>(i)] = kUnlabeledFill;
        continue;
      }
      auto [slot, inserted] = colour_of.emplace(it->second, colour_of.size());
      fill[static_cast<std::size_t>(i)] = kPalette[slot->second % std::size(kPalette)];
    }
  }

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(w)
      << "\" height=\"" << fmt(h) << "\" viewBox=\"0 0 " << fmt(w) << ' ' << fmt(h) << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (network != nullptr && options.draw_edges) {
    std::unordered_map<std::string, Index> row_of;
    for (Index i = 0; i < n; ++i) row_of[layout.node_ids[static_cast<std::size_t>(i)]] = i;
    const auto& ids = network_ids(*network);
    const auto edges = collect_edges(*network);
    double max_w = 0.0;
    for (const auto& e : edges) max_w = std::max(max_w, e.weight);
    out << "<g stroke=\"#555555\" stroke-width=\"0.5\">\n";
    for (const auto& e : edges) {
      auto a = row_of.find(ids[e.src]);
      auto b = row_of.find(ids[e.dst]);
      if (a == row_of.end() || b == row_of.end()) continue;
      const auto [x1, y1] = to_view(a->second);
      const auto [x2, y2] = to_view(b->second);
      out << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
          << "\" y2=\"" << fmt(y2) << "\" stroke-opacity=\"" << fmt(0.6 * e.weight / max_w)
          << "\"/>\n";
    }
    out << "</g>\n";
  }

  out << "<g stroke=\"black\" stroke-width=\"0.3\">\n";
  for (Index i = 0; i < n; ++i) {
    const auto [x, y] = to_view(i);
    out << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"" << fmt(options.node_radius)
        << "\" fill=\"" << fill[static_cast<std::size_t>(i)] << "\"><title>"
        << xml_escape(layout.node_ids[static_cast<std::size_t>(i)]) << "</title></circle>\n";
  }
  out << "</g>\n</svg>\n";
  doc.text = out.str();
  return doc;
}

}  // namespace latent
