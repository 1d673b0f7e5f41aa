#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ctree/label.hpp"
#include "ctree/rng.hpp"
#include "ctree/tree.hpp"

namespace ctree {

/// Two trees on the same leaf-set: the originals A plus two novel labels.
struct ConstructionItem {
  std::vector<Label> originals;  // sorted
  std::pair<Label, Label> special_pair;
  Tree tree_left;
  Tree tree_right;
  int depth = 0;
  /// Position in the split hierarchy, a string over {1,2,3}; empty for the
  /// Stage-0 item. Item alpha labels its new terminal t_{alpha 3} and its
  /// branchpoints b_{alpha 1}, b_{alpha 2}, b_{alpha 3}.
  std::string path;
  int id = 0;
  int parent_id = -1;

  /// Throws std::invalid_argument if the trees' leaf-sets differ from
  /// originals + special_pair or the special labels are not novel.
  void validate() const;
};

struct ItemRecord {
  int item_id = 0;
  int parent_id = -1;
  int depth = 0;
  int m_before = 0;
  bool stopped = false;
  std::array<int, 3> kept{};         // |A_i|, split items only
  std::array<int, 3> left_sizes{};   // |B_i|
  std::array<int, 3> right_sizes{};  // |B'_i|
  std::optional<Label> picked;
};

struct ConstructionOutput {
  std::vector<Label> picked;  // sorted
  Tree subtree;
  std::vector<ItemRecord> item_trace;
  /// Sizes of the leaf-set holding the tracked leaf: n, then one entry per
  /// stage, ending at 0 or below the cutoff. Empty if nothing is tracked.
  std::vector<int> trajectory;
};

/// Relabels two uniform leaves per tree as t_1, t_2 (independently in each
/// tree) and restricts both trees to the surviving shared originals.
/// Needs the same leaf-set of n >= 5 original labels.
ConstructionItem stage0(const Tree& left, const Tree& right, Rng& rng);

struct SplitResult {
  std::vector<ConstructionItem> children;  // nonempty A_i, in branch order
  ItemRecord record;
};

/// One split: a uniform original becomes the new terminal in each tree, both
/// trees are cut at the branchpoint of (pair.first, pair.second, terminal),
/// and branch i keeps the originals found in branch i of both trees.
SplitResult split_item(const ConstructionItem& item, Rng& rng);

/// Full recursion with cutoff K >= 2. Items with |A| < K stop and contribute
/// their minimum original label. The output is checked to be a common
/// subtree before returning. Inputs with n <= 4 fall back to a maximum
/// agreement subtree.
ConstructionOutput run_construction(const Tree& left, const Tree& right, int cutoff, Rng& rng,
                                    std::optional<Label> tracked = std::nullopt);

std::vector<int> track_leaf_sizes(const Tree& left, const Tree& right, int cutoff, const Label& leaf,
                                  Rng& rng);

/// CSV: item_id,parent_id,depth,m_before,b1,b2,b3,stopped,picked_label.
/// b fields are blank for stopped items, picked_label is blank otherwise.
void write_trace_csv(std::ostream& out, const ConstructionOutput& output);

}  // namespace ctree
