#include "lamp/taxonomy.hpp"

#include "lamp/geo.hpp"

namespace lamp {

SemanticTaxonomy::SemanticTaxonomy() { parent_.emplace(std::string(kRootKeyword), ""); }

SemanticTaxonomy SemanticTaxonomy::from_pairs(
    std::span<const std::pair<std::string, std::string>> pairs) {
  SemanticTaxonomy t;
  t.parent_.clear();
  bool saw_root = false;
  for (const auto& [raw_kw, raw_parent] : pairs) {
    std::string kw = normalize_component(raw_kw);
    if (kw.empty()) throw LampError(Errc::parse_error, "empty keyword in taxonomy");
    std::string parent;
    if (raw_parent == kRootParent) {
      if (kw != kRootKeyword) {
        throw LampError(Errc::parse_error, "taxonomy root must be \"any place\", got \"" + kw + "\"");
      }
      if (saw_root) throw LampError(Errc::parse_error, "duplicate taxonomy root");
      saw_root = true;
    } else {
      parent = normalize_component(raw_parent);
      if (parent.empty()) throw LampError(Errc::parse_error, "empty parent for keyword \"" + kw + "\"");
    }
    if (!t.parent_.emplace(std::move(kw), std::move(parent)).second) {
      throw LampError(Errc::parse_error, "duplicate taxonomy keyword \"" + normalize_component(raw_kw) + "\"");
    }
  }
  if (!saw_root) throw LampError(Errc::parse_error, "taxonomy has no root row");

  // Every node must reach the root in at most kMaxDepth hops with no cycles.
  for (const auto& [kw, parent] : t.parent_) {
    (void)parent;
    int depth = t.depth_of(kw);
    if (depth == 0) throw LampError(Errc::parse_error, "keyword \"" + kw + "\" does not reach the root");
    if (depth > kMaxDepth) {
      throw LampError(Errc::parse_error, "keyword \"" + kw + "\" exceeds the 4-level depth bound");
    }
  }
  return t;
}

bool SemanticTaxonomy::contains(std::string_view keyword) const {
  return parent_.find(std::string(keyword)) != parent_.end();
}

const std::string* SemanticTaxonomy::parent_of(std::string_view keyword) const {
  auto it = parent_.find(std::string(keyword));
  if (it == parent_.end() || it->second.empty()) return nullptr;
  return &it->second;
}

std::vector<std::string> SemanticTaxonomy::chain_to_root(std::string_view keyword) const {
  std::vector<std::string> chain;
  auto it = parent_.find(std::string(keyword));
  if (it == parent_.end()) return chain;
  chain.push_back(it->first);
  while (!it->second.empty()) {
    auto next = parent_.find(it->second);
    if (next == parent_.end() || chain.size() > static_cast<std::size_t>(kMaxDepth)) break;
    chain.push_back(next->first);
    it = next;
  }
  return chain;
}

int SemanticTaxonomy::depth_of(std::string_view keyword) const {
  auto it = parent_.find(std::string(keyword));
  if (it == parent_.end()) return 0;
  int depth = 1;
  while (!it->second.empty()) {
    auto next = parent_.find(it->second);
    if (next == parent_.end()) return 0;  // dangling parent
    ++depth;
    if (depth > kMaxDepth + 1) return depth;  // cycle guard; caller rejects
    it = next;
  }
  return depth;
}

std::vector<std::pair<std::string, std::string>> SemanticTaxonomy::to_pairs() const {
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(parent_.size());
  for (const auto& [kw, parent] : parent_) {
    pairs.emplace_back(kw, parent.empty() ? std::string(kRootParent) : parent);
  }
  return pairs;
}

}  // namespace lamp
