#include "ctree/label.hpp"

#include <charconv>
#include <stdexcept>

namespace ctree {

namespace {

void check_index(const std::string& index) {
  if (index.empty()) throw std::invalid_argument("novel label index must be non-empty");
  for (char c : index) {
    if (c < '1' || c > '3') {
      throw std::invalid_argument("novel label index must use digits 1-3: '" + index + "'");
    }
  }
}

}  // namespace

Label Label::original(std::uint32_t id) {
  if (id == 0) throw std::invalid_argument("original label ids are positive");
  Label l;
  l.kind_ = LabelKind::kOriginal;
  l.id_ = id;
  return l;
}

Label Label::terminal(std::string index) {
  check_index(index);
  Label l;
  l.kind_ = LabelKind::kTerminal;
  l.index_ = std::move(index);
  return l;
}

Label Label::branchpoint(std::string index) {
  check_index(index);
  Label l;
  l.kind_ = LabelKind::kBranchpoint;
  l.index_ = std::move(index);
  return l;
}

Label Label::parse(std::string_view text) {
  if (text.size() > 2 && text[1] == '_' && (text[0] == 't' || text[0] == 'b')) {
    std::string index(text.substr(2));
    return text[0] == 't' ? terminal(std::move(index)) : branchpoint(std::move(index));
  }
  std::uint32_t id = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), id);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("bad leaf label '" + std::string(text) + "'");
  }
  return original(id);
}

std::string Label::to_string() const {
  switch (kind_) {
    case LabelKind::kOriginal:
      return std::to_string(id_);
    case LabelKind::kTerminal:
      return "t_" + index_;
    case LabelKind::kBranchpoint:
      return "b_" + index_;
  }
  return {};
}

std::ostream& operator<<(std::ostream& os, const Label& label) { return os << label.to_string(); }

}  // namespace ctree
