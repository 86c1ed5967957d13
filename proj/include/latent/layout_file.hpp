#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "latent/graph.hpp"
#include "latent/integrator.hpp"
#include "latent/model.hpp"

namespace latent {

struct ActionKey {
  std::string author_id;
  std::string action_id;
  bool operator==(const ActionKey&) const = default;
};

/// Serialized layout: model settings, run metadata and the state keyed by node id.
struct LayoutFile {
  ModelConfig model;
  std::uint64_t seed = 0;
  int iterations = 0;
  bool converged = false;
  double loglik = 0.0;
  double log_posterior = 0.0;
  std::vector<std::string> node_ids;  // row order of state.positions
  std::vector<ActionKey> actions;     // cumulative: entry order of state.beta
  LatentStated state;

  bool operator==(const LayoutFile& other) const;
};

LayoutFile make_layout_file(const LayoutResult& result, const Network& network,
                            const ModelConfig& model);

std::string to_json(const LayoutFile& layout);
LayoutFile layout_from_json(const std::string& text);

LayoutFile read_layout_file(const std::filesystem::path& path);
void write_layout_file(const std::filesystem::path& path, const LayoutFile& layout);

/// Reorders the layout's state to the network's index order. Throws std::invalid_argument
/// unless the node id sets (and action keys) match exactly.
LatentStated bind_state(const LayoutFile& layout, const Network& network);

/// Writes via a temporary file in the same directory followed by a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace latent
