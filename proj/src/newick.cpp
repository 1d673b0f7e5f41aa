#include "ctree/newick.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include "ctree/errors.hpp"

namespace ctree {

namespace {

class NewickParser {
 public:
  explicit NewickParser(std::string_view text) : text_(text) {}

  Tree parse() {
    skip_space();
    if (peek() == ';') {
      ++pos_;
      expect_end();
      return Tree{};
    }
    if (peek() != '(') {
      const VertexId leaf = parse_leaf();
      (void)leaf;
      expect_terminator();
      return finish();
    }
    ++pos_;
    std::vector<VertexId> top = parse_children();
    expect_terminator();
    if (top.size() == 3) {
      const VertexId root = builder_.add_internal();
      for (VertexId c : top) builder_.connect(root, c);
    } else if (top.size() == 2) {
      builder_.connect(top[0], top[1]);
    } else {
      throw ParseError("top-level group must have 2 or 3 children", pos_);
    }
    return finish();
  }

 private:
  // Parses the children of a group whose '(' has been consumed, through ')'.
  std::vector<VertexId> parse_children() {
    std::vector<VertexId> kids;
    for (;;) {
      kids.push_back(parse_subtree());
      skip_space();
      const char c = peek();
      ++pos_;
      if (c == ',') continue;
      if (c == ')') break;
      throw ParseError("expected ',' or ')'", pos_ - 1);
    }
    skip_space();
    if (peek() == ':') throw ParseError("edge lengths are not supported", pos_);
    if (is_name_char(peek())) throw ParseError("internal node names are not supported", pos_);
    return kids;
  }

  VertexId parse_subtree() {
    skip_space();
    if (peek() != '(') return parse_leaf();
    const std::size_t open = pos_++;
    std::vector<VertexId> kids = parse_children();
    if (kids.size() != 2) throw ParseError("internal group must have exactly 2 children", open);
    const VertexId v = builder_.add_internal();
    builder_.connect(v, kids[0]);
    builder_.connect(v, kids[1]);
    return v;
  }

  VertexId parse_leaf() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    if (start == pos_) throw ParseError("expected leaf name", start);
    try {
      Label l = Label::parse(text_.substr(start, pos_ - start));
      if (!seen_.insert(l).second) throw ParseError("duplicate leaf " + l.to_string(), start);
      skip_space();
      if (peek() == ':') throw ParseError("edge lengths are not supported", pos_);
      return builder_.add_leaf(std::move(l));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), start);
    }
  }

  Tree finish() {
    try {
      return std::move(builder_).build();
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), pos_);
    }
  }

  void expect_terminator() {
    skip_space();
    if (peek() != ';') throw ParseError("expected ';'", pos_);
    ++pos_;
    expect_end();
  }

  void expect_end() {
    skip_space();
    if (pos_ != text_.size()) throw ParseError("trailing characters", pos_);
  }

  static bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Tree::Builder builder_;
  std::unordered_set<Label> seen_;
};

}  // namespace

Tree parse_newick(std::string_view text) { return NewickParser(text).parse(); }

std::string to_newick(const Tree& t) { return canonical_form(t); }

std::vector<Tree> read_newick_lines(std::istream& in) {
  std::vector<Tree> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back(parse_newick(line));
  }
  return out;
}

std::vector<Tree> read_newick_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  return read_newick_lines(in);
}

void write_newick_lines(std::ostream& out, const std::vector<Tree>& trees) {
  for (const Tree& t : trees) out << to_newick(t) << '\n';
}

}  // namespace ctree
