#pragma once

#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

#include "latent/graph.hpp"
#include "latent/layout_file.hpp"

namespace latent {

struct SvgOptions {
  double width = 1000.0;
  double height = 1000.0;
  double margin_fraction = 0.05;
  double node_radius = 4.0;
  bool draw_edges = true;
  /// id -> label; nodes are coloured per distinct label (first-appearance order).
  std::unordered_map<std::string, std::string> labels;
};

struct SvgDocument {
  std::string text;
  std::vector<std::string> warnings;
};

/// Reads a metadata CSV with `id,label` rows (an optional `id,label` header is skipped).
std::unordered_map<std::string, std::string> read_metadata_csv(std::istream& in);

/// Scatter plot of a 2-D layout. Positions are fitted to the viewport with a uniform
/// scale (y up). `network` supplies the edges and may be null.
SvgDocument render_svg(const LayoutFile& layout, const Network* network, const SvgOptions& options);

}  // namespace latent
