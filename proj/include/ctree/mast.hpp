#pragma once

#include <cstddef>
#include <vector>

#include "ctree/label.hpp"
#include "ctree/tree.hpp"

namespace ctree {

/// Rooted binary view of a Tree. Nodes are stored in post-order, so the root
/// is the last node and children precede parents.
class RootedTree {
 public:
  struct Node {
    int left = -1;
    int right = -1;
    Label label;  // leaves only
    bool is_leaf() const { return left < 0; }
  };

  RootedTree() = default;
  explicit RootedTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<Node>& nodes() const { return nodes_; }
  bool empty() const { return nodes_.empty(); }
  int root() const { return static_cast<int>(nodes_.size()) - 1; }
  std::size_t leaf_count() const;
  std::vector<Label> leaves() const;

 private:
  std::vector<Node> nodes_;
};

/// Roots `t` at the neighbor of leaf `leaf` and drops `leaf`. The result has
/// |leaves(t)| - 1 leaves.
RootedTree root_at_leaf(const Tree& t, const Label& leaf);

struct MastResult {
  std::size_t size = 0;
  std::vector<Label> witness;  // sorted
};

/// Maximum rooted agreement subtree by the pairwise dynamic program.
MastResult rooted_mast(const RootedTree& a, const RootedTree& b);

inline constexpr std::size_t kMaxMastLeaves = 512;

/// Maximum agreement (common) subtree of two unrooted trees, with witness.
MastResult mast(const Tree& a, const Tree& b);

inline constexpr std::size_t kMaxBruteForceLeaves = 14;

/// Subset scan in decreasing size; the oracle for mast().
MastResult brute_force_mast(const Tree& a, const Tree& b);

/// Labels present in both trees, sorted.
std::vector<Label> shared_leaves(const Tree& a, const Tree& b);

/// True iff the induced subtrees of `a` and `b` on `subset` coincide.
bool is_common_subtree(const Tree& a, const Tree& b, const std::vector<Label>& subset);

}  // namespace ctree
