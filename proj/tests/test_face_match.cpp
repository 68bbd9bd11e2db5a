#include <doctest.h>

#include <cmath>

#include "lamp/face.hpp"
#include "lamp/rng.hpp"
#include "support/reference.hpp"

using namespace lamp;

namespace {

FaceVector random_vector(Rng& rng, double scale = 1.0) {
  FaceVector v;
  for (int i = 0; i < kFaceDims; ++i) v[i] = rng.gaussian() * scale;
  return v;
}

}  // namespace

TEST_CASE("distance basics") {
  SeededEmbedder embedder;
  FaceVector a = embedder.encode("someone");
  CHECK(face_distance(a, a) == 0.0);

  FaceVector e1 = FaceVector::Zero(), e2 = FaceVector::Zero();
  e1[0] = 1.0;
  e2[1] = 1.0;
  CHECK(face_distance(e1, e2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("distance matches the scalar-loop reference on random pairs") {
  Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    FaceVector a = random_vector(rng, 2.0);
    FaceVector b = random_vector(rng, 2.0);
    const double got = face_distance(a, b);
    const double want = testref::ref_distance(a, b);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("distance is a metric") {
  Rng rng(37);
  for (int i = 0; i < 300; ++i) {
    FaceVector a = random_vector(rng);
    FaceVector b = random_vector(rng);
    FaceVector c = random_vector(rng);
    const double ab = face_distance(a, b);
    const double ba = face_distance(b, a);
    const double ac = face_distance(a, c);
    const double cb = face_distance(c, b);
    CHECK(ab >= 0.0);
    CHECK(ab == ba);
    CHECK(ab <= ac + cb + 1e-9);  // triangle inequality
  }
  FaceVector a = random_vector(rng);
  CHECK(face_distance(a, a) == 0.0);  // identity of indiscernibles
  FaceVector b = a;
  b[17] += 1e-8;
  CHECK(face_distance(a, b) > 0.0);
}

TEST_CASE("compare uses a strict inequality") {
  SeededEmbedder embedder;
  FaceVector base = embedder.encode("base");
  CHECK(faces_match(base, base, Tolerance{0.1}));

  FaceVector apart = SeededEmbedder::at_distance(base, 0.6, 1);
  const double d = face_distance(base, apart);
  CHECK(d == doctest::Approx(0.6).epsilon(1e-9));
  CHECK_FALSE(faces_match(base, apart, Tolerance{d}));  // equal distance: no match
  CHECK(faces_match(base, apart, Tolerance{std::nextafter(d, 1.0)}));

  FaceVector e1 = FaceVector::Zero(), e2 = FaceVector::Zero();
  e1[0] = 1.0;
  e2[1] = 1.0;
  CHECK_FALSE(faces_match(e1, e2, Tolerance{0.6}));  // sqrt(2) vs 0.6
}

TEST_CASE("tolerances: High matches strictly more than Low") {
  CHECK(tolerance_for(Sensitiveness::Low).max_distance == 0.6);
  CHECK(tolerance_for(Sensitiveness::High).max_distance == 0.9);
  CHECK(tolerance_for(Sensitiveness::High).max_distance >
        tolerance_for(Sensitiveness::Low).max_distance);

  // A half-identifiable face (distance 0.75) matches under High only.
  SeededEmbedder embedder;
  FaceVector enrolled = embedder.encode("half");
  FaceVector blurry = SeededEmbedder::at_distance(enrolled, 0.75, 2);
  CHECK(faces_match(blurry, enrolled, tolerance_for(Sensitiveness::High)));
  CHECK_FALSE(faces_match(blurry, enrolled, tolerance_for(Sensitiveness::Low)));

  CHECK(TolerancePair{0.6, 0.9}.validate() == Errc::ok);
  CHECK(TolerancePair{0.9, 0.6}.validate() == Errc::infeasible_spec);
  CHECK(TolerancePair{0.0, 0.9}.validate() == Errc::infeasible_spec);
}

TEST_CASE("face vector construction enforces 128 finite components") {
  std::vector<double> ok(kFaceDims, 0.5);
  CHECK_NOTHROW(face_vector_from(ok));
  std::vector<double> short_vec(100, 0.5);
  CHECK_THROWS_AS(face_vector_from(short_vec), LampError);
  std::vector<double> long_vec(kFaceDims + 1, 0.5);
  CHECK_THROWS_AS(face_vector_from(long_vec), LampError);
  std::vector<double> with_nan(kFaceDims, 0.5);
  with_nan[3] = std::nan("");
  CHECK_THROWS_AS(face_vector_from(with_nan), LampError);
}

TEST_CASE("seeded embedder is deterministic and unit length") {
  SeededEmbedder embedder;
  FaceVector a1 = embedder.encode("alice");
  FaceVector a2 = embedder.encode("alice");
  CHECK(a1 == a2);
  CHECK(a1.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(face_distance(a1, embedder.encode("bob")) > 0.5);  // distinct tokens repel

  auto faces = embedder.detect("group#4");
  REQUIRE(faces.size() == 4);
  CHECK(faces[0].first == 0);
  CHECK(faces[3].first == 3);
  CHECK(faces[0].second == embedder.encode("group/0"));

  FaceVector shifted = SeededEmbedder::at_distance(a1, 0.42, 99);
  CHECK(face_distance(a1, shifted) == doctest::Approx(0.42).epsilon(1e-9));
}

TEST_CASE("match_candidates evaluates the full cross product") {
  SeededEmbedder embedder;
  Rng rng(41);
  std::vector<std::pair<int, FaceVector>> faces;
  for (int i = 0; i < 18; ++i) faces.emplace_back(i, embedder.encode("face" + std::to_string(i)));
  std::vector<MatchCandidate> candidates;
  for (int i = 0; i < 50; ++i) {
    candidates.push_back(MatchCandidate{
        FaceRecord{"cand" + std::to_string(i), embedder.encode("cand" + std::to_string(i))},
        rng.chance(0.5) ? Sensitiveness::High : Sensitiveness::Low});
  }
  MatchReport report = match_candidates(faces, candidates, TolerancePair{});
  CHECK(report.comparisons == 18u * 50u);

  MatchReport empty = match_candidates(faces, {}, TolerancePair{});
  CHECK(empty.matches.empty());
  CHECK(empty.comparisons == 0);
}

TEST_CASE("random match instances equal the double-loop reference") {
  Rng rng(43);
  SeededEmbedder embedder;
  for (int round = 0; round < 30; ++round) {
    std::vector<std::pair<int, FaceVector>> faces;
    const int n_faces = 1 + static_cast<int>(rng.below(7));
    std::vector<MatchCandidate> candidates;
    const int n_cands = 1 + static_cast<int>(rng.below(40));
    for (int i = 0; i < n_cands; ++i) {
      candidates.push_back(MatchCandidate{
          FaceRecord{"u" + std::to_string(i), embedder.encode("u" + std::to_string(i))},
          rng.chance(0.5) ? Sensitiveness::High : Sensitiveness::Low});
    }
    for (int i = 0; i < n_faces; ++i) {
      if (rng.chance(0.5) && n_cands > 0) {
        const auto& target = candidates[rng.below(static_cast<std::uint64_t>(n_cands))];
        faces.emplace_back(i, SeededEmbedder::at_distance(target.record.vector,
                                                          rng.uniform(0.1, 1.1), rng.next_u64()));
      } else {
        faces.emplace_back(i, embedder.encode("s" + std::to_string(round * 100 + i)));
      }
    }
    MatchReport got = match_candidates(faces, candidates, TolerancePair{});
    auto want = testref::ref_match(faces, candidates, 0.6, 0.9);
    REQUIRE(got.matches.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      CHECK(got.matches[i].face_index == want[i].face_index);
      CHECK(got.matches[i].user == want[i].user);
      // Vectorized and scalar summation differ in the last bits.
      CHECK(got.matches[i].distance == doctest::Approx(want[i].distance).epsilon(1e-12));
    }
  }
}

TEST_CASE("parallel matching is byte-identical to sequential") {
  Rng rng(47);
  SeededEmbedder embedder;
  ThreadPool pool(4);
  for (int round = 0; round < 10; ++round) {
    std::vector<std::pair<int, FaceVector>> faces;
    for (int i = 0; i < 18; ++i) {
      faces.emplace_back(i, embedder.encode("pf" + std::to_string(round * 50 + i)));
    }
    std::vector<MatchCandidate> candidates;
    const int n_cands = 1 + static_cast<int>(rng.below(500));
    for (int i = 0; i < n_cands; ++i) {
      UserId user = "u" + std::to_string(i);
      FaceVector v = rng.chance(0.3)
                         ? SeededEmbedder::at_distance(faces[rng.below(18)].second,
                                                       rng.uniform(0.1, 1.0), rng.next_u64())
                         : embedder.encode(user);
      candidates.push_back(MatchCandidate{FaceRecord{user, v},
                                          rng.chance(0.5) ? Sensitiveness::High : Sensitiveness::Low});
    }
    MatchReport par = match_candidates(faces, candidates, TolerancePair{}, &pool);
    MatchReport seq = match_candidates(faces, candidates, TolerancePair{}, nullptr);
    CHECK(par.matches == seq.matches);
    CHECK(par.comparisons == seq.comparisons);
  }
}

TEST_CASE("monotonicity in tolerance") {
  Rng rng(53);
  SeededEmbedder embedder;
  std::vector<std::pair<int, FaceVector>> faces;
  for (int i = 0; i < 6; ++i) faces.emplace_back(i, random_vector(rng, 0.1));
  std::vector<MatchCandidate> low_cands, high_cands;
  for (int i = 0; i < 60; ++i) {
    FaceVector v = SeededEmbedder::at_distance(faces[static_cast<std::size_t>(i % 6)].second,
                                               rng.uniform(0.0, 1.3), rng.next_u64());
    low_cands.push_back(MatchCandidate{FaceRecord{"u" + std::to_string(i), v}, Sensitiveness::Low});
    high_cands.push_back(MatchCandidate{FaceRecord{"u" + std::to_string(i), v}, Sensitiveness::High});
  }
  auto low = match_candidates(faces, low_cands, TolerancePair{}).matches;
  auto high = match_candidates(faces, high_cands, TolerancePair{}).matches;

  // Every Low match appears under High as well.
  for (const auto& m : low) {
    CHECK(std::find(high.begin(), high.end(), m) != high.end());
  }
  CHECK(high.size() >= low.size());
}

TEST_CASE("face record store keeps one record per user") {
  SeededEmbedder embedder;
  FaceRecordStore store;
  store.upsert(FaceRecord{"alice", embedder.encode("alice-v1")});
  store.upsert(FaceRecord{"alice", embedder.encode("alice-v2")});
  CHECK(store.size() == 1);
  REQUIRE(store.find("alice") != nullptr);
  CHECK(*store.find("alice") == embedder.encode("alice-v2"));
  CHECK(store.find("bob") == nullptr);
}
