#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctree/label.hpp"
#include "ctree/rng.hpp"

namespace ctree {

using VertexId = std::int32_t;
inline constexpr VertexId kNoVertex = -1;

/// Unrooted leaf-labeled binary tree. Internal vertices have degree 3 and
/// leaves carry distinct labels. Degenerate sizes are first-class: a
/// default-constructed Tree is the Empty tree, one leaf is a lone vertex,
/// two leaves are a single edge.
///
/// Values are immutable once built; every operation returns a new tree.
class Tree {
 public:
  class Builder {
   public:
    VertexId add_leaf(Label label);
    VertexId add_internal();
    void connect(VertexId u, VertexId v);
    /// Validates the degree, edge-count, connectivity and label-uniqueness
    /// invariants. Throws std::invalid_argument on violation.
    Tree build() &&;

   private:
    friend class Tree;
    std::vector<std::array<VertexId, 3>> nbr_;
    std::vector<std::uint8_t> degree_;
    std::vector<std::optional<Label>> labels_;
    std::size_t edges_ = 0;
  };

  Tree() = default;

  bool empty() const { return degree_.empty(); }
  std::size_t leaf_count() const { return leaf_index_.size(); }
  std::size_t vertex_count() const { return degree_.size(); }
  std::size_t edge_count() const { return empty() ? 0 : degree_.size() - 1; }

  int degree(VertexId v) const { return degree_[static_cast<std::size_t>(v)]; }
  std::span<const VertexId> neighbors(VertexId v) const {
    return {nbr_[static_cast<std::size_t>(v)].data(), static_cast<std::size_t>(degree(v))};
  }
  bool is_leaf(VertexId v) const { return is_leaf_[static_cast<std::size_t>(v)] != 0; }
  /// Label of a leaf vertex.
  const Label& label(VertexId v) const { return labels_[static_cast<std::size_t>(v)]; }

  /// Leaf labels in ascending order.
  std::vector<Label> leaves() const;
  std::optional<VertexId> find_leaf(const Label& label) const;
  bool has_leaf(const Label& label) const { return find_leaf(label).has_value(); }
  /// Throws std::invalid_argument if absent.
  VertexId leaf_vertex(const Label& label) const;
  /// (label, vertex) pairs sorted by label.
  const std::vector<std::pair<Label, VertexId>>& leaf_index() const { return leaf_index_; }

  std::vector<VertexId> internal_vertices() const;
  std::vector<std::pair<VertexId, VertexId>> edges() const;

  /// Copy with leaf `from` renamed to `to`.
  Tree relabeled(const Label& from, const Label& to) const;

 private:
  std::vector<std::array<VertexId, 3>> nbr_;
  std::vector<std::uint8_t> degree_;
  std::vector<std::uint8_t> is_leaf_;
  std::vector<Label> labels_;
  std::vector<std::pair<Label, VertexId>> leaf_index_;
};

/// Labels 1..n as Original labels.
std::vector<Label> original_labels(std::size_t n);

/// Uniform random tree on `labels` by sequential edge attachment in ascending
/// label order.
Tree random_tree(std::span<const Label> labels, Rng& rng);

inline constexpr std::size_t kMaxEnumerationLeaves = 9;

/// Every distinct tree on `labels` (1 <= |labels| <= 9), in attachment order.
/// Throws GuardError above the guard.
std::vector<Tree> enumerate_trees(std::span<const Label> labels);

/// Spanning subtree of `subset` with degree-2 vertices suppressed.
/// Throws std::invalid_argument if `subset` is not contained in the leaves.
Tree induced_subtree(const Tree& t, std::span<const Label> subset);

/// Canonical Newick text: rooted at the neighbor of the smallest leaf,
/// children ordered by smallest descendant label. Equal iff same tree.
std::string canonical_form(const Tree& t);
bool trees_equal(const Tree& a, const Tree& b);

/// Vertices in the preorder of the canonical serialization.
std::vector<VertexId> canonical_vertex_order(const Tree& t);

/// Median vertex of three distinct leaves.
VertexId branchpoint_of_three(const Tree& t, const Label& a, const Label& b, const Label& c);

/// Cuts `t` at internal vertex `v`. Branch i is the component containing
/// anchors[i], with a new leaf new_labels[i] where `v` used to be.
std::array<Tree, 3> split_at_branchpoint(const Tree& t, VertexId v,
                                         const std::array<Label, 3>& new_labels,
                                         const std::array<Label, 3>& anchors);

/// Inverse of split_at_branchpoint: fuses the three `join_labels` leaves into
/// one internal vertex.
Tree join_at_leaves(const std::array<Tree, 3>& branches, const std::array<Label, 3>& join_labels);

/// Leaf counts of the three components of t - v, in neighbor order.
std::array<std::size_t, 3> branch_sizes(const Tree& t, VertexId v);

/// Internal vertex minimizing the largest branch (so every branch has at most
/// n/2 leaves); ties go to the earliest vertex in canonical order.
VertexId centroid(const Tree& t);

}  // namespace ctree
