#include "lamp/dlp_tree.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

namespace lamp {

Errc validate_photo_location(const PhotoLocation& loc) {
  if (!loc.address && !loc.point && loc.keywords.empty()) return Errc::malformed_address;
  if (loc.address) {
    if (Errc e = loc.address->validate(); e != Errc::ok) return e;
  }
  if (loc.point && !loc.point->valid()) return Errc::malformed_address;
  if (!loc.timestamp.valid()) return Errc::invalid_interval;
  return Errc::ok;
}

SemanticProbe SemanticProbe::of(const SemanticTaxonomy& taxonomy,
                                std::span<const std::string> keywords, bool strict) {
  SemanticProbe probe;
  for (const auto& kw : keywords) {
    if (!taxonomy.contains(kw)) {
      if (strict) throw LampError(Errc::unknown_keyword, "photo keyword \"" + kw + "\"");
      continue;
    }
    for (auto& a : taxonomy.chain_to_root(kw)) probe.ancestors.insert(std::move(a));
  }
  return probe;
}

Region InternalEntry::region() const {
  AddressPrefix prefix;
  if (lo.nation == hi.nation) {
    prefix.nation = lo.nation;
    if (lo.state == hi.state) {
      prefix.state = lo.state;
      if (lo.city == hi.city) prefix.city = lo.city;
    }
  }
  return Region{prefix};
}

namespace {

bool leaf_order(const ExactLeafEntry& a, const ExactLeafEntry& b) {
  if (auto c = a.key <=> b.key; c != 0) return c < 0;
  return a.pid < b.pid;
}

std::int32_t date_key(const Date& d) { return d.year * 10000 + d.month * 100 + d.day; }

constexpr std::int32_t kSecMin = 0;
constexpr std::int32_t kSecMax = 24 * 60 * 60 - 1;

DlpTree::SemanticNode::DatedEntry pack_dated(PolicyId pid, const TimeInterval& interval) {
  DlpTree::SemanticNode::DatedEntry e{};
  e.pid = pid;
  e.date_lo = interval.dates ? date_key(interval.dates->start)
                             : std::numeric_limits<std::int32_t>::min();
  e.date_hi = interval.dates ? date_key(interval.dates->end)
                             : std::numeric_limits<std::int32_t>::max();
  e.sec_lo = interval.window ? interval.window->start.seconds_of_day() : kSecMin;
  e.sec_hi = interval.window ? interval.window->end.seconds_of_day() : kSecMax;
  return e;
}

// First leaf entry with entry.key >= key.
std::vector<ExactLeafEntry>::const_iterator key_lower_bound(const std::vector<ExactLeafEntry>& v,
                                                            const AddressKey& key) {
  return std::lower_bound(v.begin(), v.end(), key,
                          [](const ExactLeafEntry& e, const AddressKey& k) { return e.key < k; });
}

}  // namespace

DlpTree::DlpTree(SemanticTaxonomy taxonomy, int fanout, LookupConfig cfg)
    : taxonomy_(std::move(taxonomy)), fanout_(fanout), config_(cfg) {
  if (fanout_ < 2) throw LampError(Errc::infeasible_spec, "fanout bound must be at least 2");
  for (const auto& [kw, parent] : taxonomy_.nodes()) {
    semantic_.emplace(kw, SemanticNode{kw, parent, {}});
  }
}

DlpTree::NodeSummary DlpTree::summarize(const ExactNode& node) {
  NodeSummary s;
  if (node.is_leaf) {
    s.lo = node.entries.front().key;
    s.hi = node.entries.back().key;
    for (const auto& e : node.entries) {
      if (!e.point) continue;
      if (s.box) {
        s.box->expand(*e.point);
      } else {
        s.box = BoundingBox::around(*e.point);
      }
    }
  } else {
    s.lo = node.children.front().lo;
    s.hi = node.children.back().hi;
    for (const auto& c : node.children) {
      if (!c.box) continue;
      if (s.box) {
        s.box->merge(*c.box);
      } else {
        s.box = *c.box;
      }
    }
  }
  return s;
}

std::optional<InternalEntry> DlpTree::insert_rec(ExactNode& node, const ExactLeafEntry& e) {
  const std::size_t cap = static_cast<std::size_t>(fanout_);
  if (node.is_leaf) {
    auto pos = std::upper_bound(node.entries.begin(), node.entries.end(), e, leaf_order);
    const bool appended = pos == node.entries.end();
    node.entries.insert(pos, e);
    if (node.entries.size() <= cap) return std::nullopt;

    // Append-heavy loads (sorted inserts) split off just the tail so left
    // nodes stay dense; otherwise split in the middle.
    const std::size_t split_at = appended ? node.entries.size() - 1 : node.entries.size() / 2;
    auto right = std::make_unique<ExactNode>();
    right->is_leaf = true;
    right->entries.assign(std::make_move_iterator(node.entries.begin() + split_at),
                          std::make_move_iterator(node.entries.end()));
    node.entries.erase(node.entries.begin() + split_at, node.entries.end());
    NodeSummary s = summarize(*right);
    return InternalEntry{std::move(s.lo), std::move(s.hi), s.box, std::move(right)};
  }

  // Last child whose range starts at or before the key.
  auto it = std::upper_bound(node.children.begin(), node.children.end(), e.key,
                             [](const AddressKey& k, const InternalEntry& c) { return k < c.lo; });
  std::size_t idx = it == node.children.begin() ? 0 : static_cast<std::size_t>(it - node.children.begin() - 1);

  InternalEntry& target = node.children[idx];
  if (e.key < target.lo) target.lo = e.key;
  if (target.hi < e.key) target.hi = e.key;
  if (e.point) {
    if (target.box) {
      target.box->expand(*e.point);
    } else {
      target.box = BoundingBox::around(*e.point);
    }
  }

  auto split = insert_rec(*target.child, e);
  if (!split) return std::nullopt;

  // The left child lost its tail; recompute its summary exactly.
  NodeSummary left = summarize(*node.children[idx].child);
  node.children[idx].lo = std::move(left.lo);
  node.children[idx].hi = std::move(left.hi);
  node.children[idx].box = left.box;
  node.children.insert(node.children.begin() + idx + 1, std::move(*split));
  if (node.children.size() <= cap) return std::nullopt;

  const bool appended = idx + 2 == node.children.size();
  const std::size_t split_at = appended ? node.children.size() - 1 : node.children.size() / 2;
  auto right = std::make_unique<ExactNode>();
  right->is_leaf = false;
  right->children.assign(std::make_move_iterator(node.children.begin() + split_at),
                         std::make_move_iterator(node.children.end()));
  node.children.erase(node.children.begin() + split_at, node.children.end());
  NodeSummary s = summarize(*right);
  return InternalEntry{std::move(s.lo), std::move(s.hi), s.box, std::move(right)};
}

void DlpTree::insert(const LampiPolicy& p) {
  if (locators_.count(p.pid)) {
    throw LampError(Errc::duplicate_policy_id, "pid " + std::to_string(p.pid));
  }
  if (p.is_exact()) {
    const ExactAddress& addr = p.address();
    ExactLeafEntry entry{AddressKey::of(addr), addr.point, p.interval, p.pid};
    if (!exact_root_) {
      exact_root_ = std::make_unique<ExactNode>();
      exact_root_->is_leaf = true;
      exact_root_->entries.push_back(entry);
      height_ = 1;
    } else {
      auto split = insert_rec(*exact_root_, entry);
      if (split) {
        NodeSummary left = summarize(*exact_root_);
        auto new_root = std::make_unique<ExactNode>();
        new_root->is_leaf = false;
        new_root->children.push_back(
            InternalEntry{std::move(left.lo), std::move(left.hi), left.box, std::move(exact_root_)});
        new_root->children.push_back(std::move(*split));
        exact_root_ = std::move(new_root);
        ++height_;
      }
    }
    locators_.emplace(p.pid, Locator{LocationType::Exact, AddressKey::of(addr), {}});
    ++exact_count_;
  } else {
    const std::string& kw = p.keyword().keyword;
    auto it = semantic_.find(kw);
    if (it == semantic_.end()) throw LampError(Errc::unknown_keyword, "policy keyword \"" + kw + "\"");
    if (p.interval.anytime) {
      it->second.anytime_pids.push_back(p.pid);
    } else {
      it->second.dated.push_back(pack_dated(p.pid, p.interval));
    }
    locators_.emplace(p.pid, Locator{LocationType::Semantic, {}, kw});
  }
}

bool DlpTree::remove_rec(ExactNode& node, const AddressKey& key, PolicyId pid) {
  if (node.is_leaf) {
    for (auto it = key_lower_bound(node.entries, key);
         it != node.entries.end() && it->key == key; ++it) {
      if (it->pid == pid) {
        node.entries.erase(it);
        return true;
      }
    }
    return false;
  }
  for (auto& c : node.children) {
    if (key < c.lo || c.hi < key) continue;
    if (remove_rec(*c.child, key, pid)) return true;
  }
  return false;
}

void DlpTree::remove(PolicyId pid) {
  auto it = locators_.find(pid);
  if (it == locators_.end()) throw LampError(Errc::unknown_policy_id, "pid " + std::to_string(pid));
  if (it->second.typ == LocationType::Exact) {
    bool removed = exact_root_ && remove_rec(*exact_root_, it->second.key, pid);
    assert(removed);
    (void)removed;
    --exact_count_;
  } else {
    auto& node = semantic_.at(it->second.keyword);
    std::erase(node.anytime_pids, pid);
    std::erase_if(node.dated, [pid](const auto& entry) { return entry.pid == pid; });
  }
  locators_.erase(it);
}

void DlpTree::collect_by_key(const ExactNode& node, const ExactAddress& q, const Timestamp& t,
                             std::vector<PolicyId>& out) const {
  if (node.is_leaf) {
    AddressKey key = AddressKey::of(q);
    for (auto it = key_lower_bound(node.entries, key); it != node.entries.end() && it->key == key;
         ++it) {
      if (address_fields_equal(it->key.street, it->key.city, it->key.state, it->key.nation, q) &&
          interval_contains(it->gamma, t)) {
        out.push_back(it->pid);
      }
    }
    return;
  }
  AddressKey key = AddressKey::of(q);
  for (const auto& c : node.children) {
    if (key < c.lo || c.hi < key) continue;
    collect_by_key(*c.child, q, t, out);
  }
}

void DlpTree::collect_by_point(const ExactNode& node, const GeoPoint& p, const Timestamp& t,
                               std::vector<PolicyId>& out) const {
  if (node.is_leaf) {
    for (const auto& e : node.entries) {
      if (e.point && point_within_epsilon(*e.point, p, config_.point_epsilon) &&
          interval_contains(e.gamma, t)) {
        out.push_back(e.pid);
      }
    }
    return;
  }
  for (const auto& c : node.children) {
    if (c.box && c.box->contains(p, config_.point_epsilon)) collect_by_point(*c.child, p, t, out);
  }
}

std::vector<PolicyId> DlpTree::lookup_exact(const std::optional<ExactAddress>& address,
                                            const std::optional<GeoPoint>& point,
                                            const Timestamp& t) const {
  // Duplicate-free by construction: every pid appears in exactly one leaf
  // entry. Order is traversal order, not pid order.
  std::vector<PolicyId> out;
  if (!exact_root_) return out;
  if (address) {
    collect_by_key(*exact_root_, *address, t, out);
  } else if (point) {
    collect_by_point(*exact_root_, *point, t, out);
  }
  return out;
}

std::vector<PolicyId> DlpTree::lookup_semantic(std::string_view keyword, const Timestamp& t) const {
  auto it = semantic_.find(std::string(keyword));
  if (it == semantic_.end()) {
    throw LampError(Errc::unknown_keyword, "keyword \"" + std::string(keyword) + "\"");
  }
  const std::int32_t dk = date_key(t.date);
  const std::int32_t sec = t.time.seconds_of_day();
  std::vector<PolicyId> out;
  // Bottom-up: this node, then each ancestor up to "any place". Nodes on
  // one chain are distinct, so no pid repeats.
  const SemanticNode* node = &it->second;
  while (true) {
    out.insert(out.end(), node->anytime_pids.begin(), node->anytime_pids.end());
    for (const auto& e : node->dated) {
      if (e.contains(dk, sec)) out.push_back(e.pid);
    }
    if (node->parent.empty()) break;
    node = &semantic_.at(node->parent);
  }
  return out;
}

std::vector<PolicyId> DlpTree::lookup(const PhotoLocation& loc) const {
  std::vector<PolicyId> out;
  if (exact_root_) {
    if (loc.address) {
      collect_by_key(*exact_root_, *loc.address, loc.timestamp, out);
    } else if (loc.point) {
      collect_by_point(*exact_root_, *loc.point, loc.timestamp, out);
    }
  }

  // Chains of different photo keywords share ancestors; scan the distinct
  // nodes once each so the result carries no duplicates. A pid cannot
  // appear on both sides (typ exclusivity), so the union needs no dedup.
  std::vector<const SemanticNode*> nodes;
  nodes.reserve(loc.keywords.size() * SemanticTaxonomy::kMaxDepth + 1);
  for (const auto& kw : loc.keywords) {
    auto it = semantic_.find(kw);
    if (it == semantic_.end()) {
      if (config_.strict_keywords) {
        throw LampError(Errc::unknown_keyword, "photo keyword \"" + kw + "\"");
      }
      continue;
    }
    const SemanticNode* node = &it->second;
    while (true) {
      if (std::find(nodes.begin(), nodes.end(), node) == nodes.end()) nodes.push_back(node);
      if (node->parent.empty()) break;
      node = &semantic_.at(node->parent);
    }
  }
  const std::int32_t dk = date_key(loc.timestamp.date);
  const std::int32_t sec = loc.timestamp.time.seconds_of_day();
  for (const SemanticNode* node : nodes) {
    out.insert(out.end(), node->anytime_pids.begin(), node->anytime_pids.end());
    for (const auto& e : node->dated) {
      if (e.contains(dk, sec)) out.push_back(e.pid);
    }
  }
  return out;
}

std::vector<std::pair<PolicyId, TimeInterval>> DlpTree::SemanticNode::policies() const {
  std::vector<std::pair<PolicyId, TimeInterval>> out;
  out.reserve(policy_count());
  for (PolicyId pid : anytime_pids) out.emplace_back(pid, TimeInterval::any());
  for (const auto& e : dated) {
    TimeInterval interval;
    if (e.date_lo != std::numeric_limits<std::int32_t>::min() ||
        e.date_hi != std::numeric_limits<std::int32_t>::max()) {
      const auto unpack = [](std::int32_t key) {
        return Date{key / 10000, key / 100 % 100, key % 100};
      };
      interval.dates = DateRange{unpack(e.date_lo), unpack(e.date_hi)};
    }
    if (e.sec_lo != kSecMin || e.sec_hi != kSecMax) {
      const auto unpack = [](std::int32_t sec) {
        return TimeOfDay{sec / 3600, sec / 60 % 60, sec % 60};
      };
      interval.window = ClockWindow{unpack(e.sec_lo), unpack(e.sec_hi)};
    }
    out.emplace_back(e.pid, interval);
  }
  return out;
}

const DlpTree::SemanticNode* DlpTree::semantic_node(std::string_view keyword) const {
  auto it = semantic_.find(std::string(keyword));
  return it == semantic_.end() ? nullptr : &it->second;
}

void DlpTree::visit_exact(const std::function<void(int, const ExactNode&)>& fn) const {
  if (!exact_root_) return;
  std::function<void(int, const ExactNode&)> walk = [&](int depth, const ExactNode& node) {
    fn(depth, node);
    if (node.is_leaf) return;
    for (const auto& c : node.children) walk(depth + 1, *c.child);
  };
  walk(1, *exact_root_);
}

std::vector<PolicyId> naive_scan(std::span<const LampiPolicy> policies,
                                 const SemanticTaxonomy& taxonomy, const PhotoLocation& loc,
                                 const LookupConfig& cfg) {
  SemanticProbe probe = SemanticProbe::of(taxonomy, loc.keywords, /*strict=*/false);
  std::vector<PolicyId> out;
  for (const auto& p : policies) {
    if (p.is_exact()) {
      const ExactAddress& a = p.address();
      bool hit = false;
      if (loc.address) {
        hit = address_fields_equal(a.street, a.city, a.state, a.nation, *loc.address);
      } else if (loc.point && a.point) {
        hit = point_within_epsilon(*a.point, *loc.point, cfg.point_epsilon);
      }
      if (hit && interval_contains(p.interval, loc.timestamp)) out.push_back(p.pid);
    } else {
      if (probe.matches(p.keyword().keyword) && interval_contains(p.interval, loc.timestamp)) {
        out.push_back(p.pid);
      }
    }
  }
  // Every policy is evaluated once, so the result is already a set.
  return out;
}

}  // namespace lamp
