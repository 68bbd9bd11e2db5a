#include "lamp/face.hpp"

#include <algorithm>
#include <cmath>

#include "lamp/rng.hpp"

namespace lamp {

FaceVector face_vector_from(std::span<const double> values) {
  if (values.size() != static_cast<std::size_t>(kFaceDims)) {
    throw LampError(Errc::dimension_mismatch,
                    "face vector has " + std::to_string(values.size()) + " components, expected 128");
  }
  FaceVector v;
  for (int i = 0; i < kFaceDims; ++i) {
    if (!std::isfinite(values[static_cast<std::size_t>(i)])) {
      throw LampError(Errc::dimension_mismatch,
                      "face vector component " + std::to_string(i) + " is not finite");
    }
    v[i] = values[static_cast<std::size_t>(i)];
  }
  return v;
}

FaceVector SeededEmbedder::encode(std::string_view token) const {
  Rng rng(splitmix64(fnv1a64(token)));
  FaceVector v;
  for (int i = 0; i < kFaceDims; ++i) v[i] = rng.gaussian();
  double n = v.norm();
  if (n == 0.0) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / n;
}

std::vector<std::pair<int, FaceVector>> SeededEmbedder::detect(std::string_view photo_token) const {
  std::string base(photo_token);
  int count = 1;
  if (auto pos = base.rfind('#'); pos != std::string::npos) {
    int parsed = 0;
    bool numeric = pos + 1 < base.size();
    for (std::size_t i = pos + 1; i < base.size(); ++i) {
      if (base[i] < '0' || base[i] > '9') {
        numeric = false;
        break;
      }
      parsed = parsed * 10 + (base[i] - '0');
    }
    if (numeric) {
      count = parsed;
      base.resize(pos);
    }
  }
  std::vector<std::pair<int, FaceVector>> faces;
  faces.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    faces.emplace_back(i, encode(base + "/" + std::to_string(i)));
  }
  return faces;
}

FaceVector SeededEmbedder::at_distance(const FaceVector& base, double distance, std::uint64_t salt) {
  Rng rng(splitmix64(salt ^ 0x5ca1ab1edeadbeefULL));
  FaceVector dir;
  for (int i = 0; i < kFaceDims; ++i) dir[i] = rng.gaussian();
  dir /= dir.norm();
  return base + distance * dir;
}

MatchReport match_candidates(std::span<const std::pair<int, FaceVector>> photo_faces,
                             std::span<const MatchCandidate> candidates,
                             const TolerancePair& tolerances, ThreadPool* pool) {
  MatchReport report;
  const std::size_t n_faces = photo_faces.size();
  const std::size_t n_cands = candidates.size();
  const std::size_t pairs = n_faces * n_cands;
  report.comparisons = pairs;
  if (pairs == 0) return report;

  auto scan_range = [&](std::size_t begin, std::size_t end, std::vector<FaceMatch>& out) {
    for (std::size_t flat = begin; flat < end; ++flat) {
      const auto& [index, face] = photo_faces[flat / n_cands];
      const MatchCandidate& cand = candidates[flat % n_cands];
      const double d = face_distance(face, cand.record.vector);
      if (d < tolerance_for(cand.xi, tolerances).max_distance) {
        out.push_back(FaceMatch{index, cand.record.user, d});
      }
    }
  };

  if (pool == nullptr || pool->size() <= 1) {
    scan_range(0, pairs, report.matches);
  } else {
    const std::size_t chunks = std::min<std::size_t>(pool->size() * 4, pairs);
    std::vector<std::vector<FaceMatch>> partial(chunks);
    const std::size_t step = (pairs + chunks - 1) / chunks;
    pool->run_jobs(chunks, [&](std::size_t c) {
      const std::size_t begin = c * step;
      const std::size_t end = std::min(pairs, begin + step);
      if (begin < end) scan_range(begin, end, partial[c]);
    });
    for (auto& part : partial) {
      report.matches.insert(report.matches.end(), part.begin(), part.end());
    }
  }

  std::sort(report.matches.begin(), report.matches.end(), [](const FaceMatch& a, const FaceMatch& b) {
    if (a.face_index != b.face_index) return a.face_index < b.face_index;
    if (a.user != b.user) return a.user < b.user;
    return a.distance < b.distance;
  });
  return report;
}

}  // namespace lamp
