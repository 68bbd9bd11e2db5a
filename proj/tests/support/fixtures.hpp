// Shared test fixtures: a randomized small-world generator for property
// suites and the running example of the enforcement flow (a reporter's
// photo at a Paris university).
#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "lamp/enforcement.hpp"
#include "lamp/rng.hpp"

namespace lamp::testfix {

inline Timestamp ts(int y, int mo, int d, int h, int mi, int s = 0) {
  return Timestamp{Date{y, mo, d}, TimeOfDay{h, mi, s}};
}

struct WorldOptions {
  std::size_t n_policies = 40;
  std::size_t n_taxonomy_nodes = 12;
  std::size_t n_addresses = 10;
  std::size_t n_users = 8;
  double enroll_fraction = 0.7;
};

struct World {
  SemanticTaxonomy taxonomy;
  std::unordered_map<std::string, std::string> parent;  // raw map for reference walks
  std::vector<LampiPolicy> policies;
  FaceRecordStore records;
  std::vector<ExactAddress> addresses;
  std::vector<std::string> keywords;  // every taxonomy keyword, root included
  std::vector<UserId> users;
};

inline TimeInterval random_interval(Rng& rng) {
  const double r = rng.real01();
  if (r < 0.25) return TimeInterval::any();
  TimeInterval interval;
  if (r < 0.60 || r >= 0.85) {
    Date start{2019 + static_cast<int>(rng.below(2)), 1 + static_cast<int>(rng.below(12)),
               1 + static_cast<int>(rng.below(28))};
    Date end = start;
    end.day = start.day + static_cast<int>(rng.below(static_cast<std::uint64_t>(29 - start.day)));
    if (rng.chance(0.5)) {
      end.month = start.month + static_cast<int>(rng.below(static_cast<std::uint64_t>(13 - start.month)));
      if (end.month == start.month) end.day = std::max(end.day, start.day);
    }
    interval.dates = DateRange{start, end};
  }
  if (r >= 0.60) {
    TimeOfDay a{static_cast<int>(rng.below(24)), static_cast<int>(rng.below(60)), 0};
    TimeOfDay b{static_cast<int>(rng.below(24)), static_cast<int>(rng.below(60)), 0};
    interval.window = ClockWindow{a, b};
  }
  return interval;
}

inline Timestamp random_timestamp(Rng& rng) {
  return Timestamp{Date{2019 + static_cast<int>(rng.below(3)), 1 + static_cast<int>(rng.below(12)),
                        1 + static_cast<int>(rng.below(28))},
                   TimeOfDay{static_cast<int>(rng.below(24)), static_cast<int>(rng.below(60)),
                             static_cast<int>(rng.below(60))}};
}

inline World make_world(Rng& rng, const WorldOptions& opt = {}) {
  World w;

  // Random taxonomy within the 4-level bound.
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.emplace_back("any place", "ROOT");
  w.parent["any place"] = "";
  w.keywords.push_back("any place");
  std::vector<int> depth{1};
  for (std::size_t i = 1; i < opt.n_taxonomy_nodes; ++i) {
    std::size_t p;
    do {
      p = rng.below(w.keywords.size());
    } while (depth[p] >= 4);
    std::string kw = "kw" + std::to_string(i);
    pairs.emplace_back(kw, w.keywords[p]);
    w.parent[kw] = w.keywords[p];
    depth.push_back(depth[p] + 1);
    w.keywords.push_back(std::move(kw));
  }
  w.taxonomy = SemanticTaxonomy::from_pairs(pairs);

  // Address pool with deliberate structure: shared cities, optional
  // points, some point pairs inside the matching epsilon and some outside.
  const char* nations[] = {"us", "fr"};
  const char* states[] = {"il", "ny", "idf"};
  const char* cities[] = {"springfield", "brooklyn", "paris"};
  for (std::size_t i = 0; i < opt.n_addresses; ++i) {
    std::optional<GeoPoint> point;
    if (!rng.chance(0.25)) {
      const double base_lat = 40.0 + static_cast<double>(i / 3) * 0.01;
      const double base_lon = -75.0 + static_cast<double>(i % 3) * 0.01;
      const double jitter = rng.chance(0.5) ? 0.0003 : 0.002;  // inside vs outside epsilon
      point = GeoPoint{base_lat + (rng.chance(0.5) ? jitter : 0.0),
                       base_lon + (rng.chance(0.5) ? -jitter : 0.0)};
    }
    w.addresses.push_back(ExactAddress::of("street " + std::to_string(i % 6), cities[i % 3],
                                           states[i % 3], nations[i % 2], point));
  }

  for (std::size_t i = 0; i < opt.n_users; ++i) w.users.push_back("user" + std::to_string(i));

  SeededEmbedder embedder;
  for (const auto& user : w.users) {
    if (rng.chance(opt.enroll_fraction)) w.records.upsert(FaceRecord{user, embedder.encode(user)});
  }

  for (std::size_t i = 0; i < opt.n_policies; ++i) {
    const PolicyId pid = static_cast<PolicyId>(i + 1);
    UserId owner = w.users[rng.below(w.users.size())];
    const auto xi = rng.chance(0.5) ? Sensitiveness::High : Sensitiveness::Low;
    if (rng.chance(0.5)) {
      w.policies.push_back(LampiPolicy::exact(pid, owner, w.addresses[rng.below(w.addresses.size())],
                                              random_interval(rng), xi));
    } else {
      w.policies.push_back(LampiPolicy::semantic(
          pid, owner, SemanticKeyword{w.keywords[rng.below(w.keywords.size())]},
          random_interval(rng), xi));
    }
  }
  return w;
}

// Probes cover every lookup route: address, address+point, point-only,
// keyword-only, combinations, unknown keywords, and boundary timestamps.
inline PhotoLocation random_probe(Rng& rng, const World& w) {
  PhotoLocation loc;
  const double kind = rng.real01();
  if (kind < 0.55 && !w.addresses.empty()) {
    loc.address = w.addresses[rng.below(w.addresses.size())];
    if (rng.chance(0.4)) loc.point = loc.address->point;
  } else if (kind < 0.75 && !w.addresses.empty()) {
    const auto& addr = w.addresses[rng.below(w.addresses.size())];
    loc.point = addr.point ? *addr.point : GeoPoint{41.0, -74.0};
    if (rng.chance(0.4)) {
      loc.point->lat += rng.uniform(-0.001, 0.001);  // straddles epsilon
    }
  }
  if (kind >= 0.55 || rng.chance(0.5)) {
    const std::size_t n = 1 + rng.below(4);
    for (std::size_t i = 0; i < n; ++i) {
      loc.keywords.push_back(w.keywords[rng.below(w.keywords.size())]);
    }
    if (rng.chance(0.15)) loc.keywords.push_back("never-in-taxonomy");
  }
  if (!loc.address && !loc.point && loc.keywords.empty()) {
    loc.keywords.push_back(w.keywords[rng.below(w.keywords.size())]);
  }

  // Boundary timestamps: reuse a policy's own interval endpoints.
  const double when = rng.real01();
  if (when < 0.3 && !w.policies.empty()) {
    const auto& p = w.policies[rng.below(w.policies.size())];
    Timestamp t = random_timestamp(rng);
    if (p.interval.dates) t.date = rng.chance(0.5) ? p.interval.dates->start : p.interval.dates->end;
    if (p.interval.window) t.time = rng.chance(0.5) ? p.interval.window->start : p.interval.window->end;
    loc.timestamp = t;
  } else {
    loc.timestamp = random_timestamp(rng);
  }
  return loc;
}

inline PhotoManifest random_manifest(Rng& rng, const World& w, int max_faces) {
  PhotoManifest m;
  m.photo_id = "photo" + std::to_string(rng.below(100000));
  m.uploader = w.users[rng.below(w.users.size())];
  m.location = random_probe(rng, w);

  SeededEmbedder embedder;
  const int n_faces = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_faces + 1)));
  for (int i = 0; i < n_faces; ++i) {
    FaceVector v;
    if (rng.chance(0.6)) {
      const auto& user = w.users[rng.below(w.users.size())];
      // Across tolerance boundaries: matches under High only, both, or neither.
      const double distances[] = {0.1, 0.35, 0.55, 0.65, 0.75, 0.85, 0.95, 1.2};
      v = SeededEmbedder::at_distance(embedder.encode(user), distances[rng.below(8)],
                                      rng.next_u64());
    } else {
      v = embedder.encode(m.photo_id + "-stranger-" + std::to_string(i));
    }
    m.faces.emplace_back(i, v);
  }
  return m;
}

// The running example: Bob's business-trip policy and Alice's university
// policy, a reporter's photo at the university with Alice in the
// background and Bob absent.
struct ParisFixture {
  SemanticTaxonomy taxonomy;
  ExactAddress university;
  LampiPolicy bob;    // pid 1: date-bounded, Low
  LampiPolicy alice;  // pid 2: anytime, High
  FaceRecordStore records;
  PhotoManifest manifest;
  double alice_face_distance = 0.30;

  ParisFixture() {
    std::vector<std::pair<std::string, std::string>> pairs = {
        {"any place", "ROOT"}, {"education", "any place"}, {"university", "education"}};
    taxonomy = SemanticTaxonomy::from_pairs(pairs);

    university = ExactAddress::of("5 Rue Thomas Mann", "Paris", "Ile-de-France", "FR",
                                  GeoPoint{48.8292, 2.3817});
    bob = LampiPolicy::exact(1, "bob", university,
                             TimeInterval::between(Date{2019, 11, 15}, Date{2019, 12, 15}),
                             Sensitiveness::Low);
    alice = LampiPolicy::exact(2, "alice", university, TimeInterval::any(), Sensitiveness::High);

    SeededEmbedder embedder;
    records.upsert(FaceRecord{"alice", embedder.encode("alice")});
    records.upsert(FaceRecord{"bob", embedder.encode("bob")});

    manifest.photo_id = "campus-life-01";
    manifest.uploader = "reporter";
    manifest.location.address = university;
    manifest.location.point = university.point;
    manifest.location.keywords = {"university"};
    manifest.location.timestamp = ts(2019, 12, 1, 12, 0);
    manifest.faces.emplace_back(
        0, SeededEmbedder::at_distance(embedder.encode("alice"), alice_face_distance, 7));
    manifest.faces.emplace_back(1, embedder.encode("bystander-with-no-policies"));
  }
};

}  // namespace lamp::testfix
