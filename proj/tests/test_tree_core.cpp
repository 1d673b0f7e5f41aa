#include <doctest.h>
#include <sstream>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ctree/combinatorics.hpp"
#include "ctree/errors.hpp"
#include "ctree/newick.hpp"
#include "ctree/stats.hpp"
#include "ctree/tree.hpp"
#include "test_util.hpp"

using namespace ctree;
using test::L;
using test::nwk;

TEST_CASE("labels parse, print and order") {
  CHECK(Label::parse("17") == L(17));
  CHECK(Label::parse("t_12") == Label::terminal("12"));
  CHECK(Label::parse("b_3").to_string() == "b_3");
  CHECK(L(1000) < Label::terminal("1"));
  CHECK(Label::terminal("3") < Label::branchpoint("1"));
  CHECK(Label::terminal("12") < Label::terminal("2"));
  CHECK(L(2) < L(10));
  CHECK_THROWS_AS(Label::parse("0"), std::invalid_argument);
  CHECK_THROWS_AS(Label::parse("t_4"), std::invalid_argument);
  CHECK_THROWS_AS(Label::parse("b_"), std::invalid_argument);
  CHECK_THROWS_AS(Label::parse("x"), std::invalid_argument);
}

TEST_CASE("count_trees") {
  CHECK(count_trees(1) == 1);
  CHECK(count_trees(2) == 1);
  CHECK(count_trees(3) == 1);
  CHECK(count_trees(4) == 3);
  CHECK(count_trees(6) == 105);
  CHECK(count_trees(9) == 135135);
  CHECK(count_trees(20).str() == "221643095476699771875");
}

TEST_CASE("count_trees_asymptotic") {
  CHECK(count_trees_asymptotic(3) == doctest::Approx(std::pow(2.0, 1.5) * std::exp(-3.0) * 3).epsilon(1e-14));
  auto ratio = [](int n) {
    const double log_c = std::lgamma(2.0 * n - 4) - (n - 3) * std::log(2.0) - std::lgamma(n - 2.0);
    return std::exp(log_c - log_count_trees_asymptotic(n));
  };
  // Exact ratios (high-precision evaluation): 1.2332438572 at n=10,
  // 1.0404738449 at n=50, 1.0199050303 at n=100, 1.0098714683 at n=200.
  CHECK(ratio(10) == doctest::Approx(1.2332438572).epsilon(1e-9));
  CHECK(ratio(50) == doctest::Approx(1.0404738449).epsilon(1e-9));
  CHECK(ratio(100) == doctest::Approx(1.0199050303).epsilon(1e-9));
  CHECK(ratio(200) == doctest::Approx(1.0098714683).epsilon(1e-9));
  double prev = ratio(10);
  for (int n = 20; n <= 2000; n *= 2) {
    const double r = ratio(n);
    CHECK(r < prev);
    CHECK(n * (r - 1) == doctest::Approx(2.0).epsilon(0.2));
    prev = r;
  }
}

TEST_CASE("tree shapes and degenerate sizes") {
  CHECK(Tree{}.empty());
  const Tree one = nwk("1;");
  CHECK(one.leaf_count() == 1);
  CHECK(one.vertex_count() == 1);
  CHECK(one.edge_count() == 0);
  const Tree two = nwk("(1,2);");
  CHECK(two.leaf_count() == 2);
  CHECK(two.edge_count() == 1);
  CHECK(nwk(";").empty());
  const Tree t = nwk("(1,2,(3,4));");
  CHECK(test::structurally_valid(t));
  CHECK(t.internal_vertices().size() == 2);
}

TEST_CASE("builder rejects malformed graphs") {
  Tree::Builder b;
  const auto c = b.add_internal();
  b.connect(c, b.add_leaf(L(1)));
  b.connect(c, b.add_leaf(L(2)));
  CHECK_THROWS_AS(std::move(b).build(), std::invalid_argument);

  Tree::Builder dup;
  const auto d = dup.add_internal();
  dup.connect(d, dup.add_leaf(L(1)));
  dup.connect(d, dup.add_leaf(L(1)));
  dup.connect(d, dup.add_leaf(L(2)));
  CHECK_THROWS_AS(std::move(dup).build(), std::invalid_argument);
}

TEST_CASE("enumerate_trees matches count_trees") {
  for (std::size_t n = 1; n <= 7; ++n) {
    const auto trees = enumerate_trees(original_labels(n));
    CHECK(trees.size() == count_trees(static_cast<int>(n)).convert_to<std::size_t>());
    std::set<std::string> forms;
    for (const auto& t : trees) {
      CHECK(test::structurally_valid(t));
      forms.insert(canonical_form(t));
    }
    CHECK(forms.size() == trees.size());
  }
  CHECK_THROWS_AS(enumerate_trees(original_labels(10)), GuardError);
}

TEST_CASE("random_tree is uniform over topologies") {
  for (std::size_t n : {5u, 6u}) {
    const auto labels = original_labels(n);
    const auto all = enumerate_trees(labels);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < all.size(); ++i) index[canonical_form(all[i])] = i;
    std::vector<double> counts(all.size(), 0.0);
    Rng rng(2024 + n);
    const int draws = n == 5 ? 15000 : 52500;
    for (int i = 0; i < draws; ++i) {
      const Tree t = random_tree(labels, rng);
      CHECK(test::structurally_valid(t));
      counts[index.at(canonical_form(t))] += 1;
    }
    const std::vector<double> p(all.size(), 1.0 / static_cast<double>(all.size()));
    CHECK(chi_square_test(counts, p).p_value > 0.001);
  }
  Rng rng(1);
  CHECK(trees_equal(random_tree(original_labels(3), rng), nwk("(1,2,3);")));
  CHECK(random_tree(original_labels(2), rng).edge_count() == 1);
}

TEST_CASE("random_tree is reproducible") {
  Rng a(99);
  Rng b(99);
  const auto labels = original_labels(40);
  CHECK(canonical_form(random_tree(labels, a)) == canonical_form(random_tree(labels, b)));
}

TEST_CASE("induced_subtree") {
  Rng rng(5);
  const auto labels = original_labels(12);
  const Tree t = random_tree(labels, rng);
  CHECK(trees_equal(induced_subtree(t, labels), t));
  CHECK(induced_subtree(t, std::vector<Label>{}).empty());
  CHECK(trees_equal(induced_subtree(t, test::labels({2, 7, 11})), nwk("(2,7,11);")));
  CHECK(induced_subtree(t, test::labels({4})).leaf_count() == 1);
  CHECK(induced_subtree(t, test::labels({4, 9})).edge_count() == 1);
  CHECK_THROWS_AS(induced_subtree(t, test::labels({13})), std::invalid_argument);

  const Tree caterpillar = nwk("(1,2,(3,(4,(5,6))));");
  CHECK(trees_equal(induced_subtree(caterpillar, test::labels({1, 3, 5, 6})), nwk("(1,3,(5,6));")));

  // Consistency: restricting in two steps equals restricting once.
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Label> big = labels;
    std::shuffle(big.begin(), big.end(), rng);
    big.resize(8);
    std::vector<Label> small(big.begin(), big.begin() + 5);
    const Tree once = induced_subtree(t, small);
    CHECK(trees_equal(induced_subtree(induced_subtree(t, big), small), once));
    CHECK(test::structurally_valid(induced_subtree(t, big)));
  }
}

TEST_CASE("canonical_form") {
  const Tree a = nwk("(1,2,(3,(4,5)));");
  const Tree b = nwk("((5,4),3,(2,1));");
  const Tree c = nwk("(((4,5),3),1,2);");
  CHECK(canonical_form(a) == canonical_form(a));
  CHECK(canonical_form(a) == canonical_form(b));
  CHECK(canonical_form(a) == canonical_form(c));
  CHECK(canonical_form(a) == "(1,2,(3,(4,5)));");
  CHECK_FALSE(trees_equal(nwk("(1,2,(3,4));"), nwk("(1,3,(2,4));")));
  CHECK_FALSE(trees_equal(nwk("(1,2,3);"), nwk("(1,2,4);")));
  const auto four = enumerate_trees(original_labels(4));
  std::set<std::string> forms;
  for (const auto& t : four) forms.insert(canonical_form(t));
  CHECK(forms == std::set<std::string>{"(1,2,(3,4));", "(1,(2,4),3);", "(1,(2,3),4);"});
  CHECK(canonical_form(nwk("(t_1,b_2,(3,1));")) == "(1,3,(t_1,b_2));");
}

TEST_CASE("newick round trip and errors") {
  for (const auto& t : enumerate_trees(original_labels(6))) {
    CHECK(trees_equal(parse_newick(to_newick(t)), t));
  }
  const Tree t = nwk("(1,2,(3,4));");
  const auto v = branchpoint_of_three(t, L(3), L(4), L(1));
  const auto nb = t.neighbors(v);
  CHECK(std::count_if(nb.begin(), nb.end(), [&](VertexId w) { return t.is_leaf(w); }) == 2);

  CHECK_THROWS_AS(parse_newick("(1,2,(3,4);"), ParseError);
  CHECK_THROWS_AS(parse_newick("(1,2,(3,4))"), ParseError);
  CHECK_THROWS_AS(parse_newick("(1,2,(3,3));"), ParseError);
  CHECK_THROWS_AS(parse_newick("(1:0.5,2,3);"), ParseError);
  CHECK_THROWS_AS(parse_newick("(1,2,(3,4)x);"), ParseError);
  CHECK_THROWS_AS(parse_newick("(1,2,(3,4,5));"), ParseError);
  CHECK_THROWS_AS(parse_newick("(1,2,3,4);"), ParseError);
  try {
    parse_newick("(1,2,(3,4)) ;x");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() > 0);
  }

  std::istringstream in("# comment\n(1,2,3);\n\n(1,(2,3),4);\n");
  const auto trees = read_newick_lines(in);
  REQUIRE(trees.size() == 2);
  std::ostringstream out;
  write_newick_lines(out, trees);
  CHECK(out.str() == "(1,2,3);\n(1,(2,3),4);\n");
  CHECK_THROWS_AS(read_newick_file("/nonexistent/trees.nwk"), std::ios_base::failure);
}

TEST_CASE("branchpoint_of_three") {
  const Tree star = nwk("(1,2,3);");
  const auto center = star.internal_vertices().front();
  CHECK(branchpoint_of_three(star, L(1), L(2), L(3)) == center);
  const Tree t = nwk("((1,2),(3,4));");
  const auto v = branchpoint_of_three(t, L(1), L(2), L(3));
  CHECK(t.neighbors(v).size() == 3);
  CHECK(std::count(t.neighbors(v).begin(), t.neighbors(v).end(), t.leaf_vertex(L(1))) == 1);
  CHECK(std::count(t.neighbors(v).begin(), t.neighbors(v).end(), t.leaf_vertex(L(2))) == 1);
  Rng rng(8);
  const Tree r = random_tree(original_labels(15), rng);
  const auto m = branchpoint_of_three(r, L(3), L(8), L(14));
  CHECK(branchpoint_of_three(r, L(8), L(14), L(3)) == m);
  CHECK(branchpoint_of_three(r, L(14), L(3), L(8)) == m);
}

TEST_CASE("split and rejoin") {
  const std::array<Label, 3> joints{Label::branchpoint("1"), Label::branchpoint("2"), Label::branchpoint("3")};
  const Tree star = nwk("(1,2,3);");
  const auto parts = split_at_branchpoint(star, star.internal_vertices().front(), joints, {L(1), L(2), L(3)});
  for (const auto& p : parts) CHECK(p.edge_count() == 1);

  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(trial % 20);
    const Tree t = random_tree(original_labels(n), rng);
    const std::array<Label, 3> anchors{L(1), L(2), L(3)};
    const auto v = branchpoint_of_three(t, anchors[0], anchors[1], anchors[2]);
    const auto branches = split_at_branchpoint(t, v, joints, anchors);
    std::size_t originals = 0;
    for (int i = 0; i < 3; ++i) {
      CHECK(branches[i].has_leaf(anchors[i]));
      CHECK(branches[i].has_leaf(joints[i]));
      originals += branches[i].leaf_count() - 2;  // minus anchor and joint
    }
    CHECK(originals == n - 3);
    CHECK(trees_equal(join_at_leaves(branches, joints), t));
  }
  CHECK_THROWS_AS(split_at_branchpoint(star, star.leaf_vertex(L(1)), joints, {L(1), L(2), L(3)}),
                  std::invalid_argument);
}

TEST_CASE("centroid") {
  const Tree star = nwk("(1,2,3);");
  const auto c = centroid(star);
  auto s = branch_sizes(star, c);
  std::sort(s.begin(), s.end());
  CHECK(s == std::array<std::size_t, 3>{1, 1, 1});

  const Tree quartet = nwk("(1,2,(3,4));");
  const auto q = centroid(quartet);
  CHECK(q == centroid(quartet));
  s = branch_sizes(quartet, q);
  std::sort(s.begin(), s.end());
  CHECK(s == std::array<std::size_t, 3>{1, 1, 2});
  // Tie goes to the first internal vertex in canonical order: the one next to leaf 1.
  CHECK(std::count(quartet.neighbors(q).begin(), quartet.neighbors(q).end(), quartet.leaf_vertex(L(1))) == 1);

  const Tree cat = nwk("(1,2,(3,(4,(5,6))));");
  const auto m = centroid(cat);
  s = branch_sizes(cat, m);
  CHECK(*std::max_element(s.begin(), s.end()) <= 3);

  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(trial);
    const Tree t = random_tree(original_labels(n), rng);
    const auto sizes = branch_sizes(t, centroid(t));
    CHECK(sizes[0] + sizes[1] + sizes[2] == n);
    CHECK(2 * *std::max_element(sizes.begin(), sizes.end()) <= n);
  }
}

TEST_CASE("branch_size_pmf") {
  CHECK(branch_size_pmf(1, 0, 0, 0) == 1);
  CHECK(branch_size_pmf(2, 1, 0, 0) == Rational(1, 3));
  CHECK(branch_size_pmf(2, 0, 0, 1) == Rational(1, 3));
  // Frozen from an independent enumeration of trees and relabel choices.
  CHECK(branch_size_pmf(3, 2, 0, 0) == Rational(1, 5));
  CHECK(branch_size_pmf(3, 1, 1, 0) == Rational(2, 15));
  CHECK(branch_size_pmf(4, 3, 0, 0) == Rational(1, 7));
  CHECK(branch_size_pmf(4, 1, 2, 0) == Rational(3, 35));
  CHECK(branch_size_pmf(4, 1, 1, 1) == Rational(2, 35));
  CHECK_THROWS_AS(branch_size_pmf(4, 1, 1, 0), std::invalid_argument);
  for (int m = 1; m <= 12; ++m) {
    Rational total = 0;
    for (const auto& s : branch_size_support(m)) total += branch_size_pmf(m, s[0], s[1], s[2]);
    CHECK(total == 1);
  }
  CHECK(branch_size_support(4).size() == 10);
}

TEST_CASE("hypergeometric_pmf") {
  CHECK(hypergeometric_pmf(1, 1, 2, 1) == Rational(1, 2));
  CHECK(hypergeometric_pmf(1, 1, 2, 0) == Rational(1, 2));
  CHECK(hypergeometric_pmf(2, 3, 6, 4) == 0);
  CHECK(hypergeometric_pmf(5, 5, 6, 3) == 0);  // below the support
  CHECK(hypergeometric_mean(2, 3, 6) == doctest::Approx(1.0));
  CHECK(hypergeometric_variance(2, 3, 6) == doctest::Approx(2.0 * 3 * 4 * 3 / (36.0 * 5)));
  for (int m = 0; m <= 30; ++m) {
    for (int a = 0; a <= m; a += 3) {
      for (int b = 0; b <= m; b += 2) {
        Rational total = 0;
        Rational mean = 0;
        for (int j = 0; j <= m; ++j) {
          const Rational p = hypergeometric_pmf(a, b, m, j);
          total += p;
          mean += p * j;
        }
        CHECK(total == 1);
        if (m > 0) CHECK(mean == Rational(a * b, m));
      }
    }
  }
}
