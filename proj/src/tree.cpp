#include "ctree/tree.hpp"

#include <algorithm>
#include <stdexcept>

#include "ctree/errors.hpp"

namespace ctree {

namespace {

std::size_t idx(VertexId v) { return static_cast<std::size_t>(v); }

// Rooted traversal of a tree: preorder and parent pointers.
struct Rooting {
  std::vector<VertexId> order;
  std::vector<VertexId> parent;
};

Rooting root_at(const Tree& t, VertexId root) {
  Rooting r;
  r.parent.assign(t.vertex_count(), kNoVertex);
  r.order.reserve(t.vertex_count());
  std::vector<VertexId> stack{root};
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    r.order.push_back(v);
    for (VertexId w : t.neighbors(v)) {
      if (w != r.parent[idx(v)]) {
        r.parent[idx(w)] = v;
        stack.push_back(w);
      }
    }
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Builder

VertexId Tree::Builder::add_leaf(Label label) {
  nbr_.push_back({kNoVertex, kNoVertex, kNoVertex});
  degree_.push_back(0);
  labels_.emplace_back(std::move(label));
  return static_cast<VertexId>(nbr_.size() - 1);
}

VertexId Tree::Builder::add_internal() {
  nbr_.push_back({kNoVertex, kNoVertex, kNoVertex});
  degree_.push_back(0);
  labels_.emplace_back(std::nullopt);
  return static_cast<VertexId>(nbr_.size() - 1);
}

void Tree::Builder::connect(VertexId u, VertexId v) {
  if (u == v || u < 0 || v < 0 || idx(u) >= nbr_.size() || idx(v) >= nbr_.size()) {
    throw std::invalid_argument("bad edge endpoints");
  }
  for (VertexId w : {u, v}) {
    if (degree_[idx(w)] >= 3) throw std::invalid_argument("vertex degree exceeds 3");
  }
  nbr_[idx(u)][degree_[idx(u)]++] = v;
  nbr_[idx(v)][degree_[idx(v)]++] = u;
  ++edges_;
}

Tree Tree::Builder::build() && {
  Tree t;
  const std::size_t n_vertices = nbr_.size();
  if (n_vertices == 0) return t;
  if (edges_ != n_vertices - 1) throw std::invalid_argument("edge count must be vertices - 1");

  t.is_leaf_.assign(n_vertices, 0);
  t.labels_.resize(n_vertices);
  for (std::size_t v = 0; v < n_vertices; ++v) {
    if (labels_[v]) {
      const int expected = n_vertices == 1 ? 0 : 1;
      if (degree_[v] != expected) throw std::invalid_argument("leaf vertex with wrong degree");
      t.is_leaf_[v] = 1;
      t.labels_[v] = std::move(*labels_[v]);
      t.leaf_index_.emplace_back(t.labels_[v], static_cast<VertexId>(v));
    } else if (degree_[v] != 3) {
      throw std::invalid_argument("internal vertex must have degree 3");
    }
  }
  std::sort(t.leaf_index_.begin(), t.leaf_index_.end());
  for (std::size_t i = 1; i < t.leaf_index_.size(); ++i) {
    if (t.leaf_index_[i - 1].first == t.leaf_index_[i].first) {
      throw std::invalid_argument("duplicate leaf label " + t.leaf_index_[i].first.to_string());
    }
  }
  t.nbr_ = std::move(nbr_);
  t.degree_ = std::move(degree_);

  // n - 1 edges plus connectivity means acyclic.
  if (root_at(t, 0).order.size() != n_vertices) throw std::invalid_argument("tree is disconnected");
  return t;
}

// ---------------------------------------------------------------------------
// Tree

std::vector<Label> Tree::leaves() const {
  std::vector<Label> out;
  out.reserve(leaf_index_.size());
  for (const auto& [label, v] : leaf_index_) out.push_back(label);
  return out;
}

std::optional<VertexId> Tree::find_leaf(const Label& label) const {
  auto it = std::lower_bound(leaf_index_.begin(), leaf_index_.end(), label,
                             [](const auto& entry, const Label& l) { return entry.first < l; });
  if (it == leaf_index_.end() || it->first != label) return std::nullopt;
  return it->second;
}

VertexId Tree::leaf_vertex(const Label& label) const {
  auto v = find_leaf(label);
  if (!v) throw std::invalid_argument("label " + label.to_string() + " is not a leaf");
  return *v;
}

std::vector<VertexId> Tree::internal_vertices() const {
  std::vector<VertexId> out;
  for (std::size_t v = 0; v < degree_.size(); ++v) {
    if (!is_leaf_[v]) out.push_back(static_cast<VertexId>(v));
  }
  return out;
}

std::vector<std::pair<VertexId, VertexId>> Tree::edges() const {
  std::vector<std::pair<VertexId, VertexId>> out;
  out.reserve(edge_count());
  for (std::size_t v = 0; v < degree_.size(); ++v) {
    for (VertexId w : neighbors(static_cast<VertexId>(v))) {
      if (static_cast<VertexId>(v) < w) out.emplace_back(static_cast<VertexId>(v), w);
    }
  }
  return out;
}

Tree Tree::relabeled(const Label& from, const Label& to) const {
  const VertexId v = leaf_vertex(from);
  if (from == to) return *this;
  if (has_leaf(to)) throw std::invalid_argument("label " + to.to_string() + " already present");
  Tree t = *this;
  t.labels_[idx(v)] = to;
  auto it = std::find_if(t.leaf_index_.begin(), t.leaf_index_.end(),
                         [&](const auto& e) { return e.second == v; });
  t.leaf_index_.erase(it);
  auto pos = std::lower_bound(t.leaf_index_.begin(), t.leaf_index_.end(), to,
                              [](const auto& entry, const Label& l) { return entry.first < l; });
  t.leaf_index_.insert(pos, {to, v});
  return t;
}

// ---------------------------------------------------------------------------
// Generation and enumeration

std::vector<Label> original_labels(std::size_t n) {
  std::vector<Label> out;
  out.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) out.push_back(Label::original(static_cast<std::uint32_t>(i)));
  return out;
}

namespace {

// Edge-list form used while growing trees by attachment. Vertex k < n_leaves
// is the k-th leaf; the rest are internal.
struct GrowingTree {
  std::size_t n_leaves = 0;
  std::size_t n_internal = 0;
  std::vector<std::pair<VertexId, VertexId>> edges;
};

GrowingTree start_tree(std::size_t n, std::size_t reserve_leaves) {
  // Leaves occupy ids [0, reserve_leaves); internals follow.
  GrowingTree g;
  const auto internal0 = static_cast<VertexId>(reserve_leaves);
  g.n_leaves = std::min<std::size_t>(n, 3);
  if (n == 2) g.edges.emplace_back(0, 1);
  if (n >= 3) {
    g.n_internal = 1;
    for (VertexId leaf = 0; leaf < 3; ++leaf) g.edges.emplace_back(internal0, leaf);
  }
  return g;
}

void attach(GrowingTree& g, std::size_t edge, std::size_t reserve_leaves) {
  const auto w = static_cast<VertexId>(reserve_leaves + g.n_internal++);
  const auto x = static_cast<VertexId>(g.n_leaves++);
  auto [u, v] = g.edges[edge];
  g.edges[edge] = {u, w};
  g.edges.emplace_back(w, v);
  g.edges.emplace_back(w, x);
}

Tree materialize(const GrowingTree& g, std::span<const Label> sorted_labels) {
  Tree::Builder b;
  const std::size_t n = sorted_labels.size();
  for (std::size_t i = 0; i < n; ++i) b.add_leaf(sorted_labels[i]);
  for (std::size_t i = 0; i < g.n_internal; ++i) b.add_internal();
  for (auto [u, v] : g.edges) b.connect(u, v);
  return std::move(b).build();
}

std::vector<Label> sorted_unique(std::span<const Label> labels) {
  std::vector<Label> out(labels.begin(), labels.end());
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw std::invalid_argument("labels must be distinct");
  }
  return out;
}

}  // namespace

Tree random_tree(std::span<const Label> labels, Rng& rng) {
  if (labels.empty()) throw std::invalid_argument("random_tree needs at least one label");
  const auto sorted = sorted_unique(labels);
  const std::size_t n = sorted.size();
  GrowingTree g = start_tree(n, n);
  g.edges.reserve(n >= 2 ? 2 * n - 3 : 0);
  while (g.n_leaves < n) {
    std::uniform_int_distribution<std::size_t> pick(0, g.edges.size() - 1);
    attach(g, pick(rng), n);
  }
  return materialize(g, sorted);
}

std::vector<Tree> enumerate_trees(std::span<const Label> labels) {
  if (labels.empty()) throw std::invalid_argument("enumerate_trees needs at least one label");
  if (labels.size() > kMaxEnumerationLeaves) {
    throw GuardError("enumerate_trees is limited to " + std::to_string(kMaxEnumerationLeaves) +
                     " leaves");
  }
  const auto sorted = sorted_unique(labels);
  const std::size_t n = sorted.size();
  std::vector<GrowingTree> level{start_tree(n, n)};
  while (level.front().n_leaves < n) {
    std::vector<GrowingTree> next;
    next.reserve(level.size() * level.front().edges.size());
    for (const auto& g : level) {
      for (std::size_t e = 0; e < g.edges.size(); ++e) {
        GrowingTree h = g;
        attach(h, e, n);
        next.push_back(std::move(h));
      }
    }
    level = std::move(next);
  }
  std::vector<Tree> out;
  out.reserve(level.size());
  for (const auto& g : level) out.push_back(materialize(g, sorted));
  return out;
}

// ---------------------------------------------------------------------------
// Induced subtrees

Tree induced_subtree(const Tree& t, std::span<const Label> subset) {
  std::vector<std::uint8_t> marked(t.vertex_count(), 0);
  std::vector<VertexId> members;
  members.reserve(subset.size());
  for (const Label& l : subset) {
    auto v = t.find_leaf(l);
    if (!v) throw std::invalid_argument("induced_subtree: " + l.to_string() + " is not a leaf");
    if (!marked[idx(*v)]) {
      marked[idx(*v)] = 1;
      members.push_back(*v);
    }
  }

  Tree::Builder b;
  if (members.empty()) return Tree{};
  if (members.size() == 1) {
    b.add_leaf(t.label(members[0]));
    return std::move(b).build();
  }
  if (members.size() == 2) {
    b.connect(b.add_leaf(t.label(members[0])), b.add_leaf(t.label(members[1])));
    return std::move(b).build();
  }

  const VertexId root = members[0];
  const Rooting r = root_at(t, root);
  // image[v]: vertex of the new tree standing for the marked part below v.
  std::vector<VertexId> image(t.vertex_count(), kNoVertex);
  for (auto it = r.order.rbegin(); it != r.order.rend(); ++it) {
    const VertexId v = *it;
    if (v == root) continue;
    if (t.is_leaf(v)) {
      if (marked[idx(v)]) image[idx(v)] = b.add_leaf(t.label(v));
      continue;
    }
    VertexId kept[2];
    int n_kept = 0;
    for (VertexId w : t.neighbors(v)) {
      if (w != r.parent[idx(v)] && image[idx(w)] != kNoVertex) kept[n_kept++] = image[idx(w)];
    }
    if (n_kept == 1) {
      image[idx(v)] = kept[0];
    } else if (n_kept == 2) {
      const VertexId u = b.add_internal();
      b.connect(u, kept[0]);
      b.connect(u, kept[1]);
      image[idx(v)] = u;
    }
  }
  const VertexId below = image[idx(t.neighbors(root)[0])];
  b.connect(b.add_leaf(t.label(root)), below);
  return std::move(b).build();
}

// ---------------------------------------------------------------------------
// Canonical form

namespace {

struct CanonicalRooting {
  VertexId root = kNoVertex;
  std::vector<VertexId> parent;
  std::vector<const Label*> min_label;
};

CanonicalRooting canonical_rooting(const Tree& t) {
  CanonicalRooting c;
  const VertexId smallest = t.leaf_index().front().second;
  c.root = t.neighbors(smallest)[0];
  Rooting r = root_at(t, c.root);
  c.parent = std::move(r.parent);
  c.min_label.assign(t.vertex_count(), nullptr);
  for (auto it = r.order.rbegin(); it != r.order.rend(); ++it) {
    const VertexId v = *it;
    if (t.is_leaf(v)) {
      c.min_label[idx(v)] = &t.label(v);
      continue;
    }
    const Label* best = nullptr;
    for (VertexId w : t.neighbors(v)) {
      if (w == c.parent[idx(v)]) continue;
      if (best == nullptr || *c.min_label[idx(w)] < *best) best = c.min_label[idx(w)];
    }
    c.min_label[idx(v)] = best;
  }
  return c;
}

std::vector<VertexId> ordered_children(const Tree& t, const CanonicalRooting& c, VertexId v) {
  std::vector<VertexId> kids;
  for (VertexId w : t.neighbors(v)) {
    if (w != c.parent[idx(v)]) kids.push_back(w);
  }
  std::sort(kids.begin(), kids.end(), [&](VertexId a, VertexId b) {
    return *c.min_label[idx(a)] < *c.min_label[idx(b)];
  });
  return kids;
}

void write_subtree(const Tree& t, const CanonicalRooting& c, VertexId v, std::string& out) {
  if (t.is_leaf(v)) {
    out += t.label(v).to_string();
    return;
  }
  out += '(';
  bool first = true;
  for (VertexId w : ordered_children(t, c, v)) {
    if (!first) out += ',';
    first = false;
    write_subtree(t, c, w, out);
  }
  out += ')';
}

}  // namespace

std::string canonical_form(const Tree& t) {
  std::string out;
  const auto leaves = t.leaf_index();
  if (leaves.empty()) {
    out = ";";
  } else if (leaves.size() == 1) {
    out = leaves[0].first.to_string() + ";";
  } else if (leaves.size() == 2) {
    out = "(" + leaves[0].first.to_string() + "," + leaves[1].first.to_string() + ");";
  } else {
    const CanonicalRooting c = canonical_rooting(t);
    write_subtree(t, c, c.root, out);
    out += ';';
  }
  return out;
}

bool trees_equal(const Tree& a, const Tree& b) {
  if (a.leaf_count() != b.leaf_count()) return false;
  return canonical_form(a) == canonical_form(b);
}

std::vector<VertexId> canonical_vertex_order(const Tree& t) {
  std::vector<VertexId> order;
  if (t.leaf_count() < 3) {
    for (std::size_t v = 0; v < t.vertex_count(); ++v) order.push_back(static_cast<VertexId>(v));
    return order;
  }
  const CanonicalRooting c = canonical_rooting(t);
  std::vector<VertexId> stack{c.root};
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    order.push_back(v);
    if (t.is_leaf(v)) continue;
    auto kids = ordered_children(t, c, v);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return order;
}

// ---------------------------------------------------------------------------
// Branchpoints, splitting, centroids

VertexId branchpoint_of_three(const Tree& t, const Label& a, const Label& b, const Label& c) {
  if (a == b || b == c || a == c) throw std::invalid_argument("branchpoint_of_three: labels must be distinct");
  const VertexId va = t.leaf_vertex(a);
  const VertexId vb = t.leaf_vertex(b);
  const VertexId vc = t.leaf_vertex(c);
  const Rooting r = root_at(t, va);
  std::vector<std::uint8_t> on_path(t.vertex_count(), 0);
  for (VertexId v = vb; v != kNoVertex; v = r.parent[idx(v)]) on_path[idx(v)] = 1;
  VertexId v = vc;
  while (!on_path[idx(v)]) v = r.parent[idx(v)];
  return v;
}

std::array<Tree, 3> split_at_branchpoint(const Tree& t, VertexId v,
                                         const std::array<Label, 3>& new_labels,
                                         const std::array<Label, 3>& anchors) {
  if (v < 0 || idx(v) >= t.vertex_count() || t.is_leaf(v)) {
    throw std::invalid_argument("split_at_branchpoint: vertex is not internal");
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (new_labels[i] == new_labels[j]) throw std::invalid_argument("split labels must be distinct");
    }
    if (t.has_leaf(new_labels[i])) {
      throw std::invalid_argument("split label " + new_labels[i].to_string() + " already in tree");
    }
  }

  // component[w] = index of the neighbor of v whose side contains w
  std::vector<int> component(t.vertex_count(), -1);
  std::array<std::vector<VertexId>, 3> members;
  const auto nbrs = t.neighbors(v);
  for (int j = 0; j < 3; ++j) {
    std::vector<VertexId> stack{nbrs[j]};
    component[idx(nbrs[j])] = j;
    while (!stack.empty()) {
      VertexId x = stack.back();
      stack.pop_back();
      members[j].push_back(x);
      for (VertexId y : t.neighbors(x)) {
        if (y != v && component[idx(y)] == -1) {
          component[idx(y)] = j;
          stack.push_back(y);
        }
      }
    }
  }

  std::array<int, 3> side{};
  for (int i = 0; i < 3; ++i) side[i] = component[idx(t.leaf_vertex(anchors[i]))];
  if (side[0] == side[1] || side[1] == side[2] || side[0] == side[2]) {
    throw std::invalid_argument("split_at_branchpoint: anchors are not in distinct branches");
  }

  std::array<Tree, 3> out;
  std::vector<VertexId> image(t.vertex_count(), kNoVertex);
  for (int i = 0; i < 3; ++i) {
    Tree::Builder b;
    const auto& comp = members[side[i]];
    for (VertexId x : comp) image[idx(x)] = t.is_leaf(x) ? b.add_leaf(t.label(x)) : b.add_internal();
    const VertexId stub = b.add_leaf(new_labels[i]);
    for (VertexId x : comp) {
      for (VertexId y : t.neighbors(x)) {
        if (y == v) {
          b.connect(image[idx(x)], stub);
        } else if (x < y) {
          b.connect(image[idx(x)], image[idx(y)]);
        }
      }
    }
    out[i] = std::move(b).build();
  }
  return out;
}

Tree join_at_leaves(const std::array<Tree, 3>& branches, const std::array<Label, 3>& join_labels) {
  Tree::Builder b;
  const VertexId center = b.add_internal();
  for (int i = 0; i < 3; ++i) {
    const Tree& br = branches[i];
    const VertexId stub = br.leaf_vertex(join_labels[i]);
    if (br.leaf_count() < 2) throw std::invalid_argument("join_at_leaves: branch has no body");
    std::vector<VertexId> image(br.vertex_count(), kNoVertex);
    for (std::size_t x = 0; x < br.vertex_count(); ++x) {
      const auto vx = static_cast<VertexId>(x);
      if (vx == stub) continue;
      image[x] = br.is_leaf(vx) ? b.add_leaf(br.label(vx)) : b.add_internal();
    }
    for (auto [x, y] : br.edges()) {
      if (x == stub) {
        b.connect(center, image[idx(y)]);
      } else if (y == stub) {
        b.connect(center, image[idx(x)]);
      } else {
        b.connect(image[idx(x)], image[idx(y)]);
      }
    }
  }
  return std::move(b).build();
}

namespace {

// Leaf counts below each vertex when rooted at the first leaf.
struct SubtreeCounts {
  Rooting rooting;
  std::vector<std::size_t> below;
};

SubtreeCounts subtree_counts(const Tree& t) {
  SubtreeCounts s;
  s.rooting = root_at(t, t.leaf_index().front().second);
  s.below.assign(t.vertex_count(), 0);
  for (auto it = s.rooting.order.rbegin(); it != s.rooting.order.rend(); ++it) {
    const VertexId v = *it;
    if (t.is_leaf(v)) s.below[idx(v)] += 1;
    const VertexId p = s.rooting.parent[idx(v)];
    if (p != kNoVertex) s.below[idx(p)] += s.below[idx(v)];
  }
  return s;
}

std::array<std::size_t, 3> sizes_at(const Tree& t, const SubtreeCounts& s, VertexId v) {
  std::array<std::size_t, 3> out{};
  const auto nbrs = t.neighbors(v);
  for (int j = 0; j < 3; ++j) {
    const VertexId w = nbrs[j];
    out[j] = w == s.rooting.parent[idx(v)] ? t.leaf_count() - s.below[idx(v)] : s.below[idx(w)];
  }
  return out;
}

}  // namespace

std::array<std::size_t, 3> branch_sizes(const Tree& t, VertexId v) {
  if (v < 0 || idx(v) >= t.vertex_count() || t.is_leaf(v)) {
    throw std::invalid_argument("branch_sizes: vertex is not internal");
  }
  return sizes_at(t, subtree_counts(t), v);
}

VertexId centroid(const Tree& t) {
  if (t.leaf_count() < 3) throw std::invalid_argument("centroid needs at least 3 leaves");
  const SubtreeCounts s = subtree_counts(t);
  VertexId best = kNoVertex;
  std::size_t best_max = t.leaf_count() + 1;
  for (VertexId v : canonical_vertex_order(t)) {
    if (t.is_leaf(v)) continue;
    const auto sizes = sizes_at(t, s, v);
    const std::size_t m = *std::max_element(sizes.begin(), sizes.end());
    if (m < best_max) {
      best_max = m;
      best = v;
    }
  }
  return best;
}

}  // namespace ctree
