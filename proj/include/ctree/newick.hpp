#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ctree/tree.hpp"

namespace ctree {

/// Parses one tree. Leaf names are decimal ids or t_<index>/b_<index>.
/// The top-level group may have three children (unrooted form) or two
/// (rooted form; the root is suppressed). Edge lengths and internal names
/// are rejected. Throws ParseError.
Tree parse_newick(std::string_view text);

/// Canonical Newick, terminated by ';' (no newline).
std::string to_newick(const Tree& t);

/// One tree per non-blank line; lines starting with '#' are comments.
std::vector<Tree> read_newick_lines(std::istream& in);
std::vector<Tree> read_newick_file(const std::string& path);
void write_newick_lines(std::ostream& out, const std::vector<Tree>& trees);

}  // namespace ctree
