#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace ctree {

// Ordering of kinds is significant: Original < Terminal < Branchpoint.
enum class LabelKind : std::uint8_t { kOriginal = 0, kTerminal = 1, kBranchpoint = 2 };

/// A leaf label: either an original positive integer id, or a novel
/// terminal/branchpoint label carrying an index string over {1,2,3}.
class Label {
 public:
  Label() = default;

  static Label original(std::uint32_t id);
  static Label terminal(std::string index);
  static Label branchpoint(std::string index);

  /// Parses "17", "t_12" or "b_3". Throws std::invalid_argument.
  static Label parse(std::string_view text);

  LabelKind kind() const { return kind_; }
  bool is_original() const { return kind_ == LabelKind::kOriginal; }
  std::uint32_t id() const { return id_; }
  const std::string& index() const { return index_; }

  std::string to_string() const;

  // Member order gives kind, then id (originals), then index (novel labels).
  auto operator<=>(const Label&) const = default;
  bool operator==(const Label&) const = default;

 private:
  LabelKind kind_ = LabelKind::kOriginal;
  std::uint32_t id_ = 0;
  std::string index_;
};

std::ostream& operator<<(std::ostream& os, const Label& label);

}  // namespace ctree

template <>
struct std::hash<ctree::Label> {
  std::size_t operator()(const ctree::Label& l) const noexcept {
    std::size_t h = std::hash<std::string>{}(l.index());
    return h ^ (static_cast<std::size_t>(l.id()) * 0x9E3779B97F4A7C15ULL) ^
           (static_cast<std::size_t>(l.kind()) << 1);
  }
};
