#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lamp/dlp_tree.hpp"
#include "lamp/face.hpp"

namespace lamp {

// Upload-time record: photo location metadata plus detected face vectors.
struct PhotoManifest {
  std::string photo_id;
  UserId uploader;
  PhotoLocation location;
  std::vector<std::pair<int, FaceVector>> faces;
};

// Face indexes must be unique and contiguous from 0.
Errc validate_manifest(const PhotoManifest& m);

enum class RedactionAction { ReplaceFace };

struct RedactionDecision {
  int face_index = 0;
  UserId protected_user;
  PolicyId triggering_policy = 0;
  RedactionAction action = RedactionAction::ReplaceFace;
  double distance = 0.0;

  bool operator==(const RedactionDecision&) const = default;
};

// Where a real platform plugs in its image pipeline. Implementations must
// be idempotent per (photo_id, decision list).
class Redactor {
 public:
  virtual ~Redactor() = default;
  virtual void apply(std::string_view photo_id, std::span<const RedactionDecision> decisions) = 0;
};

// Default redactor: records what would have been replaced.
class RecordingRedactor final : public Redactor {
 public:
  void apply(std::string_view photo_id, std::span<const RedactionDecision> decisions) override {
    applied_[std::string(photo_id)] = std::vector<RedactionDecision>(decisions.begin(), decisions.end());
  }
  const std::unordered_map<std::string, std::vector<RedactionDecision>>& applied() const {
    return applied_;
  }

 private:
  std::unordered_map<std::string, std::vector<RedactionDecision>> applied_;
};

using PolicyMap = std::unordered_map<PolicyId, LampiPolicy>;

struct CheckOutcome {
  std::vector<RedactionDecision> decisions;  // sorted by (face_index, user)
  std::vector<std::string> diagnostics;      // per-policy skips, warnings
  double retrieval_ms = 0.0;
  double matching_ms = 0.0;
  std::uint64_t comparisons = 0;
};

// The end-to-end check: retrieve policies for the photo's location, match
// the owners' enrolled vectors against the photo's faces, emit one decision
// per (face, protected user) annotated with the strictest triggering
// policy. The uploader's own faces get no special treatment.
CheckOutcome check_photo(const PhotoManifest& m, const DlpTree& tree, const FaceRecordStore& records,
                         const PolicyMap& policies, const TolerancePair& tolerances,
                         ThreadPool* pool = nullptr);

struct EnforcementReport {
  CheckOutcome check;
  double redaction_ms = 0.0;
  bool redactor_ok = true;
  std::string redactor_error;  // set when the redactor failed
};

// check_photo + redactor invocation. A redactor failure is reported, not
// thrown; the decision list stays intact.
EnforcementReport enforce(const PhotoManifest& m, Redactor& redactor, const DlpTree& tree,
                          const FaceRecordStore& records, const PolicyMap& policies,
                          const TolerancePair& tolerances, ThreadPool* pool = nullptr);

}  // namespace lamp
