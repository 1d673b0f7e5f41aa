#include "ctree/construction.hpp"

#include <algorithm>
#include <deque>
#include <iterator>
#include <stdexcept>

#include "ctree/mast.hpp"

namespace ctree {

namespace {

std::vector<Label> originals_of(const Tree& t) {
  std::vector<Label> out;
  for (const auto& [label, v] : t.leaf_index()) {
    if (!label.is_original()) break;  // originals sort first
    out.push_back(label);
  }
  return out;
}

std::vector<Label> intersect(const std::vector<Label>& a, const std::vector<Label>& b) {
  std::vector<Label> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Label> with_pair(std::vector<Label> originals, const Label& x, const Label& y) {
  originals.push_back(x);
  originals.push_back(y);
  return originals;
}

std::size_t uniform_index(std::size_t n, Rng& rng) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

bool contains(const std::vector<Label>& sorted, const Label& l) {
  return std::binary_search(sorted.begin(), sorted.end(), l);
}

void check_same_originals(const Tree& left, const Tree& right) {
  const auto a = left.leaves();
  if (a != right.leaves()) throw std::invalid_argument("construction needs trees on the same leaf-set");
  for (const auto& l : a) {
    if (!l.is_original()) throw std::invalid_argument("construction inputs must carry original labels only");
  }
}

}  // namespace

void ConstructionItem::validate() const {
  if (special_pair.first.is_original() || special_pair.second.is_original()) {
    throw std::invalid_argument("special labels must be novel");
  }
  std::vector<Label> expected = with_pair(originals, special_pair.first, special_pair.second);
  std::sort(expected.begin(), expected.end());
  if (tree_left.leaves() != expected || tree_right.leaves() != expected) {
    throw std::invalid_argument("item trees do not carry originals + special pair");
  }
}

ConstructionItem stage0(const Tree& left, const Tree& right, Rng& rng) {
  check_same_originals(left, right);
  const std::size_t n = left.leaf_count();
  if (n < 5) throw std::invalid_argument("stage0 needs n >= 5");
  const Label t1 = Label::terminal("1");
  const Label t2 = Label::terminal("2");

  auto relabel_two = [&](const Tree& t) {
    const auto leaves = t.leaves();
    const std::size_t i = uniform_index(n, rng);
    std::size_t j = uniform_index(n - 1, rng);
    if (j >= i) ++j;
    return t.relabeled(leaves[i], t1).relabeled(leaves[j], t2);
  };
  const Tree l = relabel_two(left);
  const Tree r = relabel_two(right);

  ConstructionItem item;
  item.originals = intersect(originals_of(l), originals_of(r));
  item.special_pair = {t1, t2};
  const auto keep = with_pair(item.originals, t1, t2);
  item.tree_left = induced_subtree(l, keep);
  item.tree_right = induced_subtree(r, keep);
  return item;
}

SplitResult split_item(const ConstructionItem& item, Rng& rng) {
  const std::size_t m = item.originals.size();
  if (m == 0) throw std::invalid_argument("split_item needs a nonempty leaf-set");
  const Label terminal = Label::terminal(item.path + "3");
  const std::array<Label, 3> joints{Label::branchpoint(item.path + "1"), Label::branchpoint(item.path + "2"),
                                    Label::branchpoint(item.path + "3")};
  const std::array<Label, 3> anchors{item.special_pair.first, item.special_pair.second, terminal};

  auto cut = [&](const Tree& t) {
    const Tree relabeled = t.relabeled(item.originals[uniform_index(m, rng)], terminal);
    const VertexId v = branchpoint_of_three(relabeled, anchors[0], anchors[1], anchors[2]);
    return split_at_branchpoint(relabeled, v, joints, anchors);
  };
  const auto left = cut(item.tree_left);
  const auto right = cut(item.tree_right);

  SplitResult result;
  ItemRecord& rec = result.record;
  rec.item_id = item.id;
  rec.parent_id = item.parent_id;
  rec.depth = item.depth;
  rec.m_before = static_cast<int>(m);
  for (int i = 0; i < 3; ++i) {
    const auto b_left = originals_of(left[i]);
    const auto b_right = originals_of(right[i]);
    rec.left_sizes[i] = static_cast<int>(b_left.size());
    rec.right_sizes[i] = static_cast<int>(b_right.size());
    auto kept = intersect(b_left, b_right);
    rec.kept[i] = static_cast<int>(kept.size());
    if (kept.empty()) continue;

    ConstructionItem child;
    child.originals = std::move(kept);
    child.special_pair = {anchors[i], joints[i]};
    const auto keep = with_pair(child.originals, anchors[i], joints[i]);
    child.tree_left = induced_subtree(left[i], keep);
    child.tree_right = induced_subtree(right[i], keep);
    child.depth = item.depth + 1;
    child.path = item.path + static_cast<char>('1' + i);
    child.parent_id = item.id;
    result.children.push_back(std::move(child));
  }
  return result;
}

ConstructionOutput run_construction(const Tree& left, const Tree& right, int cutoff, Rng& rng,
                                    std::optional<Label> tracked) {
  if (cutoff < 2) throw std::invalid_argument("run_construction needs K >= 2");
  check_same_originals(left, right);
  const std::size_t n = left.leaf_count();
  if (tracked && !left.has_leaf(*tracked)) throw std::invalid_argument("tracked leaf is not in the trees");

  ConstructionOutput out;
  if (n <= 4) {
    out.picked = mast(left, right).witness;
  } else {
    if (tracked) out.trajectory.push_back(static_cast<int>(n));
    std::deque<ConstructionItem> work;
    work.push_back(stage0(left, right, rng));
    if (tracked) {
      const auto& a = work.front().originals;
      out.trajectory.push_back(contains(a, *tracked) ? static_cast<int>(a.size()) : 0);
    }
    int next_id = 1;
    while (!work.empty()) {
      ConstructionItem item = std::move(work.front());
      work.pop_front();
      const bool holds_tracked = tracked && contains(item.originals, *tracked);
      if (static_cast<int>(item.originals.size()) < cutoff) {
        ItemRecord rec;
        rec.item_id = item.id;
        rec.parent_id = item.parent_id;
        rec.depth = item.depth;
        rec.m_before = static_cast<int>(item.originals.size());
        rec.stopped = true;
        rec.picked = item.originals.front();
        out.picked.push_back(item.originals.front());
        out.item_trace.push_back(std::move(rec));
        continue;
      }
      SplitResult split = split_item(item, rng);
      if (holds_tracked) {
        int next = 0;
        for (const auto& c : split.children) {
          if (contains(c.originals, *tracked)) next = static_cast<int>(c.originals.size());
        }
        out.trajectory.push_back(next);
      }
      for (auto& c : split.children) {
        c.id = next_id++;
        work.push_back(std::move(c));
      }
      out.item_trace.push_back(std::move(split.record));
    }
    std::sort(out.picked.begin(), out.picked.end());
    if (std::adjacent_find(out.picked.begin(), out.picked.end()) != out.picked.end()) {
      throw std::logic_error("construction picked the same leaf twice");
    }
  }

  out.subtree = induced_subtree(left, out.picked);
  if (!trees_equal(out.subtree, induced_subtree(right, out.picked))) {
    throw std::logic_error("construction output is not a common subtree");
  }
  return out;
}

std::vector<int> track_leaf_sizes(const Tree& left, const Tree& right, int cutoff, const Label& leaf,
                                  Rng& rng) {
  return run_construction(left, right, cutoff, rng, leaf).trajectory;
}

void write_trace_csv(std::ostream& out, const ConstructionOutput& output) {
  out << "item_id,parent_id,depth,m_before,b1,b2,b3,stopped,picked_label\n";
  for (const auto& r : output.item_trace) {
    out << r.item_id << ',' << r.parent_id << ',' << r.depth << ',' << r.m_before << ',';
    if (r.stopped) {
      out << ",,,1," << r.picked->to_string() << '\n';
    } else {
      out << r.kept[0] << ',' << r.kept[1] << ',' << r.kept[2] << ",0,\n";
    }
  }
}

}  // namespace ctree
