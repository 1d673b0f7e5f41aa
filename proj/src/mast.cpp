#include "ctree/mast.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>

#include "ctree/errors.hpp"

namespace ctree {

std::size_t RootedTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

std::vector<Label> RootedTree::leaves() const {
  std::vector<Label> out;
  for (const auto& n : nodes_) {
    if (n.is_leaf()) out.push_back(n.label);
  }
  std::sort(out.begin(), out.end());
  return out;
}

RootedTree root_at_leaf(const Tree& t, const Label& leaf) {
  const VertexId anchor = t.leaf_vertex(leaf);
  std::vector<RootedTree::Node> nodes;
  if (t.leaf_count() < 2) return RootedTree{};
  nodes.reserve(t.vertex_count() - 1);

  // Iterative post-order from the anchor's neighbor, parent = anchor.
  struct Frame {
    VertexId v;
    VertexId parent;
    int next = 0;
    int kids[2] = {-1, -1};
    int n_kids = 0;
  };
  std::vector<Frame> stack{{t.neighbors(anchor)[0], anchor}};
  int last = -1;
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (last >= 0) {
      f.kids[f.n_kids++] = last;
      last = -1;
    }
    if (t.is_leaf(f.v)) {
      RootedTree::Node n;
      n.label = t.label(f.v);
      nodes.push_back(std::move(n));
      last = static_cast<int>(nodes.size()) - 1;
      stack.pop_back();
      continue;
    }
    const auto nbrs = t.neighbors(f.v);
    while (f.next < 3 && nbrs[f.next] == f.parent) ++f.next;
    if (f.next < 3) {
      const VertexId child = nbrs[f.next++];
      stack.push_back({child, f.v});
      continue;
    }
    RootedTree::Node n;
    n.left = f.kids[0];
    n.right = f.kids[1];
    nodes.push_back(std::move(n));
    last = static_cast<int>(nodes.size()) - 1;
    stack.pop_back();
  }
  return RootedTree(std::move(nodes));
}

namespace {

enum Choice : std::uint8_t {
  kLeafPair,
  kPairStraight,  // M(u1,v1) + M(u2,v2)
  kPairCrossed,   // M(u1,v2) + M(u2,v1)
  kDropV_U1,      // M(u1, v)
  kDropV_U2,      // M(u2, v)
  kDropU_V1,      // M(u, v1)
  kDropU_V2,      // M(u, v2)
};

}  // namespace

MastResult rooted_mast(const RootedTree& a, const RootedTree& b) {
  if (a.empty() || b.empty()) return {};
  const auto& na = a.nodes();
  const auto& nb = b.nodes();
  const std::size_t cols = nb.size();
  std::vector<std::int32_t> value(na.size() * cols, 0);
  std::vector<std::uint8_t> choice(na.size() * cols, kLeafPair);
  auto at = [cols](int u, int v) { return static_cast<std::size_t>(u) * cols + static_cast<std::size_t>(v); };

  for (std::size_t u = 0; u < na.size(); ++u) {
    const auto& x = na[u];
    for (std::size_t v = 0; v < nb.size(); ++v) {
      const auto& y = nb[v];
      std::int32_t best = 0;
      std::uint8_t pick = kLeafPair;
      auto offer = [&](std::int32_t val, Choice c) {
        if (val > best) {
          best = val;
          pick = c;
        }
      };
      if (x.is_leaf() && y.is_leaf()) {
        best = x.label == y.label ? 1 : 0;
      } else {
        const int iu = static_cast<int>(u);
        const int iv = static_cast<int>(v);
        if (!x.is_leaf() && !y.is_leaf()) {
          offer(value[at(x.left, y.left)] + value[at(x.right, y.right)], kPairStraight);
          offer(value[at(x.left, y.right)] + value[at(x.right, y.left)], kPairCrossed);
        }
        if (!x.is_leaf()) {
          offer(value[at(x.left, iv)], kDropV_U1);
          offer(value[at(x.right, iv)], kDropV_U2);
        }
        if (!y.is_leaf()) {
          offer(value[at(iu, y.left)], kDropU_V1);
          offer(value[at(iu, y.right)], kDropU_V2);
        }
      }
      value[at(static_cast<int>(u), static_cast<int>(v))] = best;
      choice[at(static_cast<int>(u), static_cast<int>(v))] = pick;
    }
  }

  MastResult r;
  r.size = static_cast<std::size_t>(value[at(a.root(), b.root())]);
  std::vector<std::pair<int, int>> stack{{a.root(), b.root()}};
  while (!stack.empty()) {
    auto [u, v] = stack.back();
    stack.pop_back();
    if (value[at(u, v)] == 0) continue;
    const auto& x = na[static_cast<std::size_t>(u)];
    const auto& y = nb[static_cast<std::size_t>(v)];
    switch (choice[at(u, v)]) {
      case kLeafPair:
        r.witness.push_back(x.label);
        break;
      case kPairStraight:
        stack.emplace_back(x.left, y.left);
        stack.emplace_back(x.right, y.right);
        break;
      case kPairCrossed:
        stack.emplace_back(x.left, y.right);
        stack.emplace_back(x.right, y.left);
        break;
      case kDropV_U1:
        stack.emplace_back(x.left, v);
        break;
      case kDropV_U2:
        stack.emplace_back(x.right, v);
        break;
      case kDropU_V1:
        stack.emplace_back(u, y.left);
        break;
      case kDropU_V2:
        stack.emplace_back(u, y.right);
        break;
    }
  }
  std::sort(r.witness.begin(), r.witness.end());
  return r;
}

std::vector<Label> shared_leaves(const Tree& a, const Tree& b) {
  std::vector<Label> out;
  for (const auto& [label, v] : a.leaf_index()) {
    if (b.has_leaf(label)) out.push_back(label);
  }
  return out;
}

bool is_common_subtree(const Tree& a, const Tree& b, const std::vector<Label>& subset) {
  return trees_equal(induced_subtree(a, subset), induced_subtree(b, subset));
}

MastResult mast(const Tree& a, const Tree& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mast needs nonempty trees");
  std::vector<Label> remaining = shared_leaves(a, b);
  if (remaining.size() > kMaxMastLeaves) {
    throw GuardError("mast is limited to " + std::to_string(kMaxMastLeaves) + " shared leaves");
  }
  if (remaining.size() <= 3) return {remaining.size(), remaining};

  // Every agreement set contains some leaf; rooting both trees at that leaf
  // turns the unrooted question into a rooted one. Sets containing earlier
  // leaves are already covered, so those leaves are dropped as we go.
  Tree ta = induced_subtree(a, remaining);
  Tree tb = induced_subtree(b, remaining);
  MastResult best;
  while (remaining.size() > best.size) {
    const Label root = remaining.front();
    MastResult r = rooted_mast(root_at_leaf(ta, root), root_at_leaf(tb, root));
    if (r.size + 1 > best.size) {
      r.witness.insert(std::lower_bound(r.witness.begin(), r.witness.end(), root), root);
      r.size += 1;
      best = std::move(r);
    }
    remaining.erase(remaining.begin());
    ta = induced_subtree(ta, remaining);
    tb = induced_subtree(tb, remaining);
  }
  if (!is_common_subtree(a, b, best.witness)) throw std::logic_error("mast produced an invalid witness");
  return best;
}

MastResult brute_force_mast(const Tree& a, const Tree& b) {
  const std::vector<Label> shared = shared_leaves(a, b);
  const std::size_t k = shared.size();
  if (k > kMaxBruteForceLeaves) {
    throw GuardError("brute_force_mast is limited to " + std::to_string(kMaxBruteForceLeaves) +
                     " shared leaves");
  }
  for (std::size_t size = k; size > 0; --size) {
    // Lexicographic combinations of `size` indices out of k.
    std::vector<std::size_t> pick(size);
    for (std::size_t i = 0; i < size; ++i) pick[i] = i;
    for (;;) {
      std::vector<Label> subset;
      subset.reserve(size);
      for (std::size_t i : pick) subset.push_back(shared[i]);
      if (is_common_subtree(a, b, subset)) return {size, subset};
      std::size_t i = size;
      while (i > 0 && pick[i - 1] == k - size + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return {};
}

}  // namespace ctree
