#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "treeload/model.hpp"
#include "treeload/rng.hpp"

namespace treeload {

// Rooted tree in birth order. parent[i] is the target of node i's edge for
// i >= 1; parent[0] is unused and kept at 0.
struct Tree {
  std::vector<std::uint32_t> parent;

  std::size_t order() const { return parent.size(); }
  std::size_t edges() const { return parent.empty() ? 0 : parent.size() - 1; }

  // MalformedTreeError unless parent[i] < i for every i >= 1.
  void validate() const;
};

// Draws the target for the node arriving when `existing` nodes are present;
// parent[1..existing-1] must describe the current tree.
std::uint32_t sample_target(double alpha, std::span<const std::uint32_t> parent,
                            std::uint32_t existing, Philox4x64& rng);

// Tree with `size` non-root nodes (size edges).
Tree grow(const ModelParams& params, std::uint64_t size, RngSpec rng);

void write_parents_csv(std::ostream& os, const Tree& tree);

}  // namespace treeload
