#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lamp/policy.hpp"

namespace lamp {

// Upload-time location record: pre-extracted photo metadata.
struct PhotoLocation {
  std::optional<ExactAddress> address;
  std::optional<GeoPoint> point;
  std::vector<std::string> keywords;  // normalized
  Timestamp timestamp;
};

Errc validate_photo_location(const PhotoLocation& loc);

struct LookupConfig {
  double point_epsilon = 0.0005;  // degrees per axis, roughly 50 m
  bool strict_keywords = false;   // unknown photo keywords: error vs skip
};

// --- shared location predicates -------------------------------------------
// The tree lookups and naive_scan use exactly these, so benchmark
// comparisons isolate indexing rather than predicate cost.

inline bool address_fields_equal(const std::string& street, const std::string& city,
                                 const std::string& state, const std::string& nation,
                                 const ExactAddress& q) {
  return street == q.street && city == q.city && state == q.state && nation == q.nation;
}

inline bool point_within_epsilon(const GeoPoint& stored, const GeoPoint& q, double eps) {
  return std::abs(stored.lat - q.lat) <= eps && std::abs(stored.lon - q.lon) <= eps;
}

// Union of chain_to_root over the photo's keywords; a semantic policy
// matches iff its keyword is in this set.
struct SemanticProbe {
  std::unordered_set<std::string> ancestors;

  // Throws LampError(UnknownKeyword) for unrecognized keywords in strict
  // mode; skips them otherwise.
  static SemanticProbe of(const SemanticTaxonomy& taxonomy, std::span<const std::string> keywords,
                          bool strict);
  bool matches(const std::string& policy_keyword) const {
    return !ancestors.empty() && ancestors.count(policy_keyword) != 0;
  }
};

// --- exact side (hierarchical address index) -------------------------------

struct ExactLeafEntry {
  AddressKey key;
  std::optional<GeoPoint> point;
  TimeInterval gamma;
  PolicyId pid = 0;
};

class ExactNode;

struct InternalEntry {
  AddressKey lo;  // key range covering everything reachable through child
  AddressKey hi;
  std::optional<BoundingBox> box;  // bbox of descendant points, when any exist
  std::unique_ptr<ExactNode> child;

  // Prefix view of the key range: the administrative prefix shared by lo
  // and hi (possibly empty at the top of large trees).
  Region region() const;
};

class ExactNode {
 public:
  bool is_leaf = true;
  std::vector<ExactLeafEntry> entries;    // leaf nodes
  std::vector<InternalEntry> children;    // internal nodes

  std::size_t entry_count() const { return is_leaf ? entries.size() : children.size(); }
};

// --- the DLP tree ----------------------------------------------------------

// Dual index over LAMPi policies: exact addresses in a fanout-bounded
// hierarchy searched top-down, semantic keywords in the taxonomy searched
// bottom-up (leaf to root). Lookups are pure; concurrent readers are safe
// as long as writers are excluded (the engine holds a reader-writer lock).
class DlpTree {
 public:
  static constexpr int kDefaultFanout = 100;

  explicit DlpTree(SemanticTaxonomy taxonomy, int fanout = kDefaultFanout, LookupConfig cfg = {});

  void insert(const LampiPolicy& p);  // throws DuplicatePolicyId, UnknownKeyword
  void remove(PolicyId pid);          // throws UnknownPolicyId

  // All lookups return sets: duplicate-free by construction, in traversal
  // order rather than pid order.
  std::vector<PolicyId> lookup_exact(const std::optional<ExactAddress>& address,
                                     const std::optional<GeoPoint>& point, const Timestamp& t) const;
  // Time-filtered union over the keyword's node and all its ancestors.
  std::vector<PolicyId> lookup_semantic(std::string_view keyword, const Timestamp& t) const;
  // Exact-side and semantic-side union for a photo location.
  std::vector<PolicyId> lookup(const PhotoLocation& loc) const;

  std::size_t size() const { return locators_.size(); }
  std::size_t exact_size() const { return exact_count_; }
  int fanout() const { return fanout_; }
  int height() const { return height_; }  // exact side; 0 when empty
  bool contains(PolicyId pid) const { return locators_.count(pid) != 0; }
  const SemanticTaxonomy& taxonomy() const { return taxonomy_; }
  const LookupConfig& config() const { return config_; }

  // One node per keyword: the policy list Xi with each policy's time
  // interval, plus the parent pointer for the bottom-up walk. Interval
  // bounds are packed into integer keys so probe-time filtering stays a
  // handful of compares; anytime policies sit in their own list and are
  // appended wholesale.
  struct SemanticNode {
    struct DatedEntry {
      PolicyId pid;
      std::int32_t date_lo;  // yyyymmdd; open bounds widen to int32 limits
      std::int32_t date_hi;
      std::int32_t sec_lo;  // seconds of day; sec_lo > sec_hi wraps midnight
      std::int32_t sec_hi;

      bool contains(std::int32_t date_key, std::int32_t sec) const {
        if (date_key < date_lo || date_hi < date_key) return false;
        return sec_lo <= sec_hi ? sec_lo <= sec && sec <= sec_hi : sec >= sec_lo || sec <= sec_hi;
      }
    };

    std::string keyword;
    std::string parent;  // empty for root
    std::vector<PolicyId> anytime_pids;
    std::vector<DatedEntry> dated;

    std::size_t policy_count() const { return anytime_pids.size() + dated.size(); }
    // The Xi list as (pid, interval) pairs, reconstructed from the packed
    // form; for inspection and tests.
    std::vector<std::pair<PolicyId, TimeInterval>> policies() const;
  };
  const SemanticNode* semantic_node(std::string_view keyword) const;

  // Depth-first traversal of the exact side (root depth = 1), for
  // structural checks.
  void visit_exact(const std::function<void(int depth, const ExactNode&)>& fn) const;

 private:
  struct Locator {
    LocationType typ;
    AddressKey key;       // exact policies
    std::string keyword;  // semantic policies
  };

  struct NodeSummary {
    AddressKey lo;
    AddressKey hi;
    std::optional<BoundingBox> box;
  };

  std::optional<InternalEntry> insert_rec(ExactNode& node, const ExactLeafEntry& e);
  static NodeSummary summarize(const ExactNode& node);
  void collect_by_key(const ExactNode& node, const ExactAddress& q, const Timestamp& t,
                      std::vector<PolicyId>& out) const;
  void collect_by_point(const ExactNode& node, const GeoPoint& p, const Timestamp& t,
                        std::vector<PolicyId>& out) const;
  bool remove_rec(ExactNode& node, const AddressKey& key, PolicyId pid);

  SemanticTaxonomy taxonomy_;
  int fanout_;
  LookupConfig config_;
  std::unique_ptr<ExactNode> exact_root_;
  int height_ = 0;
  std::size_t exact_count_ = 0;
  std::unordered_map<std::string, SemanticNode> semantic_;
  std::unordered_map<PolicyId, Locator> locators_;
};

// Reference semantics for lookup: evaluates every policy's location
// predicate and interval against the photo location. The correctness
// oracle and benchmark baseline.
std::vector<PolicyId> naive_scan(std::span<const LampiPolicy> policies,
                                 const SemanticTaxonomy& taxonomy, const PhotoLocation& loc,
                                 const LookupConfig& cfg = {});

}  // namespace lamp
