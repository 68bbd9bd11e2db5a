#pragma once

#include <Eigen/Core>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lamp/policy.hpp"
#include "lamp/thread_pool.hpp"

namespace lamp {

inline constexpr int kFaceDims = 128;

// 128-dimension facial feature vector.
using FaceVector = Eigen::Matrix<double, kFaceDims, 1>;

// Throws LampError(DimensionMismatch) unless values has exactly 128 finite
// components.
FaceVector face_vector_from(std::span<const double> values);

inline double face_distance(const FaceVector& a, const FaceVector& b) { return (a - b).norm(); }

struct Tolerance {
  double max_distance = 0.0;
};

// Two faces match when their distance is strictly below the tolerance.
inline bool faces_match(const FaceVector& source, const FaceVector& dest, Tolerance tol) {
  return face_distance(source, dest) < tol.max_distance;
}

// Sensitiveness-derived match tolerances. High must stay above Low so
// high-sensitiveness policies match strictly more faces.
struct TolerancePair {
  double low = 0.6;
  double high = 0.9;

  Errc validate() const {
    return (low > 0.0 && high > low) ? Errc::ok : Errc::infeasible_spec;
  }
};

inline Tolerance tolerance_for(Sensitiveness xi, const TolerancePair& pair = {}) {
  return Tolerance{xi == Sensitiveness::High ? pair.high : pair.low};
}

struct FaceRecord {
  UserId user;
  FaceVector vector;
};

// One enrolled vector per user; re-enrolling replaces the stored vector.
class FaceRecordStore {
 public:
  void upsert(FaceRecord record) { records_[record.user] = std::move(record.vector); }
  const FaceVector* find(const UserId& user) const {
    auto it = records_.find(user);
    return it == records_.end() ? nullptr : &it->second;
  }
  std::size_t size() const { return records_.size(); }
  const std::unordered_map<UserId, FaceVector>& all() const { return records_; }

 private:
  std::unordered_map<UserId, FaceVector> records_;
};

// Boundary for real detection/encoding backends. Implementations must be
// deterministic: the same token always yields the same vector.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual FaceVector encode(std::string_view token) const = 0;
  virtual std::vector<std::pair<int, FaceVector>> detect(std::string_view photo_token) const = 0;
};

// Hash-seeded pseudo-random unit vectors; lets tests construct identities
// and controlled near-identities without an image pipeline.
class SeededEmbedder final : public EmbeddingProvider {
 public:
  FaceVector encode(std::string_view token) const override;
  // Faces for token "name#k" are encode("name/0") .. encode("name/k-1");
  // a bare token yields one face.
  std::vector<std::pair<int, FaceVector>> detect(std::string_view photo_token) const override;

  // A vector at exactly the given Euclidean distance from base (up to fp
  // rounding), displaced along a salt-derived unit direction.
  static FaceVector at_distance(const FaceVector& base, double distance, std::uint64_t salt);
};

struct MatchCandidate {
  FaceRecord record;
  Sensitiveness xi;
};

struct FaceMatch {
  int face_index = 0;
  UserId user;
  double distance = 0.0;

  bool operator==(const FaceMatch&) const = default;
};

struct MatchReport {
  std::vector<FaceMatch> matches;  // sorted by (face_index, user)
  std::uint64_t comparisons = 0;   // always |faces| * |candidates|
};

// Evaluates every (photo face, candidate) pair; pool == nullptr runs
// sequentially. Parallel and sequential runs produce identical output.
MatchReport match_candidates(std::span<const std::pair<int, FaceVector>> photo_faces,
                             std::span<const MatchCandidate> candidates,
                             const TolerancePair& tolerances, ThreadPool* pool = nullptr);

}  // namespace lamp
