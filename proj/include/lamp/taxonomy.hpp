#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lamp/errors.hpp"

namespace lamp {

// Keyword hierarchy for semantic locations. A single tree rooted at
// "any place", at most 4 levels deep (root counts as level 1).
class SemanticTaxonomy {
 public:
  static constexpr std::string_view kRootKeyword = "any place";
  static constexpr std::string_view kRootParent = "ROOT";
  static constexpr int kMaxDepth = 4;

  SemanticTaxonomy();  // root-only taxonomy

  // Throws LampError(parse_error) when the pairs do not form a valid tree.
  // Keywords are normalized (lowercase, collapsed whitespace) on load.
  static SemanticTaxonomy from_pairs(std::span<const std::pair<std::string, std::string>> pairs);

  bool contains(std::string_view keyword) const;
  // nullptr for the root and for unknown keywords.
  const std::string* parent_of(std::string_view keyword) const;
  // keyword itself first, root last. Empty for unknown keywords.
  std::vector<std::string> chain_to_root(std::string_view keyword) const;
  // 1 for the root. 0 for unknown keywords.
  int depth_of(std::string_view keyword) const;

  std::size_t size() const { return parent_.size(); }
  const std::unordered_map<std::string, std::string>& nodes() const { return parent_; }
  std::vector<std::pair<std::string, std::string>> to_pairs() const;

 private:
  // keyword -> parent keyword; root maps to "".
  std::unordered_map<std::string, std::string> parent_;
};

}  // namespace lamp
