#pragma once

#include <memory>
#include <mutex>
#include <shared_mutex>

#include "lamp/store.hpp"

namespace lamp {

// One engine backs both the CLI and the HTTP service. Checks run as
// concurrent readers; policy/enrollment writes take the writer lock, and a
// partially updated tree is never visible to readers.
class Engine {
 public:
  explicit Engine(EngineConfig cfg);

  // Validates, logs, and indexes. Throws LampError (DuplicatePolicyId,
  // UnknownKeyword, ...).
  void add_policy(const LampiPolicy& p);
  void remove_policy(PolicyId pid);  // throws UnknownPolicyId
  std::vector<LampiPolicy> list_policies(const std::optional<UserId>& owner = std::nullopt) const;
  std::optional<LampiPolicy> find_policy(PolicyId pid) const;

  void enroll(const FaceRecord& record);
  std::size_t enrolled_count() const;

  CheckOutcome check(const PhotoManifest& m) const;
  EnforcementReport enforce(const PhotoManifest& m, Redactor& redactor);

  // Replaces the taxonomy; rejects taxonomies that would orphan an
  // existing semantic policy's keyword. Persists to the data directory.
  void load_taxonomy(const SemanticTaxonomy& taxonomy);

  const EngineConfig& config() const { return config_; }
  const SemanticTaxonomy& taxonomy() const { return tree_->taxonomy(); }
  std::size_t policy_count() const;

 private:
  void rebuild_tree_locked();

  EngineConfig config_;
  mutable std::shared_mutex mu_;
  std::unique_ptr<PolicyStore> store_;
  std::unique_ptr<DlpTree> tree_;
  FaceRecordStore faces_;
  std::unique_ptr<ThreadPool> pool_;

  // apply() calls are serialized per photo_id.
  std::mutex redact_registry_mu_;
  std::unordered_map<std::string, std::unique_ptr<std::mutex>> redact_locks_;
};

}  // namespace lamp
