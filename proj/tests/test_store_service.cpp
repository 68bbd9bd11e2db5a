#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "lamp/cli.hpp"
#include "lamp/engine.hpp"
#include "lamp/json_io.hpp"
#include "lamp/rng.hpp"
#include "lamp/service.hpp"
#include "support/fixtures.hpp"

// httplib last: it drags in <resolv.h>, whose _res macro corrupts Eigen.
#include <httplib.h>

using namespace lamp;
using testfix::ts;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("lamp-test-" + std::to_string(Rng(std::random_device{}()).next_u64()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::trunc);
  out << text;
}

std::string paris_taxonomy_json() {
  return R"([["any place","ROOT"],["education","any place"],["university","education"]])";
}

EngineConfig config_for(const fs::path& dir) {
  EngineConfig cfg;
  cfg.data_dir = dir;
  return cfg;
}

std::set<PolicyId> probe(Engine& engine, const PhotoManifest& m) {
  std::set<PolicyId> out;
  for (const auto& d : engine.check(m).decisions) out.insert(d.triggering_policy);
  return out;
}

}  // namespace

TEST_CASE("policy store: log replay reproduces the live map, torn tail tolerated") {
  TempDir dir;
  const fs::path log = dir.path / "policies.log";
  testfix::ParisFixture fx;
  {
    PolicyStore store(log);
    store.append_upsert(fx.bob);
    store.append_upsert(fx.alice);
    store.append_remove(fx.bob.pid);
    CHECK(store.policies().size() == 1);
  }
  {
    PolicyStore replayed(log);
    CHECK(replayed.policies().size() == 1);
    CHECK(replayed.contains(fx.alice.pid));
    CHECK_FALSE(replayed.contains(fx.bob.pid));
  }
  // Simulate a crash mid-append: the torn final line is ignored.
  {
    std::ofstream out(log, std::ios::app);
    out << "{\"op\":\"upsert\",\"policy\":{\"pid\":99,\"owner";
  }
  PolicyStore torn(log);
  CHECK(torn.policies().size() == 1);

  // Corruption before the end is a hard error.
  write_file(log, "{\"op\":\"upsert\",\"pol\ngarbage\n" + std::string("{\"op\":\"remove\",\"pid\":1}\n"));
  CHECK_THROWS_AS(PolicyStore{log}, LampError);
}

TEST_CASE("crash replay: every log prefix equals a freshly built store") {
  TempDir dir;
  const fs::path log = dir.path / "policies.log";
  Rng rng(71);
  testfix::World w = testfix::make_world(rng);

  // Build a log with interleaved upserts and removals.
  std::vector<std::string> lines;
  {
    PolicyStore store(log);
    std::vector<PolicyId> live;
    for (const auto& p : w.policies) {
      store.append_upsert(p);
      live.push_back(p.pid);
      if (live.size() > 3 && rng.chance(0.3)) {
        const std::size_t pick = rng.below(live.size());
        store.append_remove(live[pick]);
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(pick));
      }
    }
  }
  {
    std::ifstream in(log);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }

  for (std::size_t prefix : {std::size_t{0}, lines.size() / 3, lines.size() / 2, lines.size()}) {
    const fs::path partial = dir.path / ("prefix-" + std::to_string(prefix) + ".log");
    std::ofstream out(partial);
    for (std::size_t i = 0; i < prefix; ++i) out << lines[i] << "\n";
    out.close();

    PolicyStore replayed(partial);

    // Reference: apply the same logical operations to a plain map.
    PolicyMap expect;
    for (std::size_t i = 0; i < prefix; ++i) {
      if (lines[i].find("\"op\":\"upsert\"") != std::string::npos) {
        auto body = lines[i].substr(lines[i].find("\"policy\":") + 9);
        body.pop_back();  // trailing '}'
        LampiPolicy p = policy_from_json(body);
        expect[p.pid] = p;
      } else {
        const auto pos = lines[i].find("\"pid\":") + 6;
        expect.erase(std::stoull(lines[i].substr(pos)));
      }
    }
    REQUIRE(replayed.policies().size() == expect.size());
    for (const auto& [pid, p] : expect) {
      REQUIRE(replayed.contains(pid));
      CHECK(policy_to_json(replayed.policies().at(pid)) == policy_to_json(p));
    }

    // Lookups through a tree built from the replayed store match a tree
    // built directly from the expected policy set.
    DlpTree from_replay(w.taxonomy);
    for (const auto& [pid, p] : replayed.policies()) from_replay.insert(p);
    DlpTree fresh(w.taxonomy);
    for (const auto& [pid, p] : expect) fresh.insert(p);
    for (int i = 0; i < 15; ++i) {
      PhotoLocation loc = testfix::random_probe(rng, w);
      auto a = from_replay.lookup(loc);
      auto b = fresh.lookup(loc);
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      CHECK(a == b);
    }
  }
}

TEST_CASE("face log round trip is bit-faithful") {
  TempDir dir;
  const fs::path log = dir.path / "faces.jsonl";
  SeededEmbedder embedder;
  FaceRecord r1{"alice", embedder.encode("alice")};
  FaceRecord r2{"bob", embedder.encode("bob")};
  append_face_log(log, r1);
  append_face_log(log, r2);
  append_face_log(log, FaceRecord{"alice", embedder.encode("alice-2")});  // re-enroll wins

  FaceRecordStore store;
  load_face_log(log, store);
  CHECK(store.size() == 2);
  CHECK(*store.find("alice") == embedder.encode("alice-2"));  // exact doubles, no drift
  CHECK(*store.find("bob") == r2.vector);

  const std::string line = face_record_to_json(r1);
  FaceRecord parsed = face_record_from_json(line);
  CHECK(parsed.user == r1.user);
  CHECK(parsed.vector == r1.vector);
  CHECK(face_record_to_json(parsed) == line);
}

TEST_CASE("engine config validation and env override") {
  CHECK(config_from_json("{}").fanout == DlpTree::kDefaultFanout);
  CHECK_THROWS_AS(config_from_json(R"({"tolerance_low":0.9,"tolerance_high":0.6})"), LampError);
  CHECK_THROWS_AS(config_from_json(R"({"fanout":1})"), LampError);

  setenv("LAMP_DATA_DIR", "/tmp/lamp-env-override", 1);
  EngineConfig cfg = config_from_json(R"({"data_dir":"/somewhere/else"})");
  CHECK(cfg.data_dir == fs::path("/tmp/lamp-env-override"));
  unsetenv("LAMP_DATA_DIR");
}

TEST_CASE("engine: add, list, remove, enroll, check, reload") {
  TempDir dir;
  testfix::ParisFixture fx;
  write_file(dir.path / "taxonomy.json", paris_taxonomy_json());

  {
    Engine engine(config_for(dir.path));
    engine.add_policy(fx.bob);
    engine.add_policy(fx.alice);
    CHECK_THROWS_AS(engine.add_policy(fx.alice), LampError);  // duplicate
    CHECK_THROWS_AS(engine.remove_policy(777), LampError);    // unknown

    SeededEmbedder embedder;
    engine.enroll(FaceRecord{"alice", embedder.encode("alice")});
    engine.enroll(FaceRecord{"bob", embedder.encode("bob")});
    CHECK(engine.enrolled_count() == 2);

    CHECK(engine.list_policies().size() == 2);
    CHECK(engine.list_policies(UserId("bob")).size() == 1);
    CHECK(probe(engine, fx.manifest) == std::set<PolicyId>{fx.alice.pid});
  }

  // A fresh engine over the same data directory sees identical state.
  {
    Engine engine(config_for(dir.path));
    CHECK(engine.policy_count() == 2);
    CHECK(engine.enrolled_count() == 2);
    CHECK(probe(engine, fx.manifest) == std::set<PolicyId>{fx.alice.pid});
    engine.remove_policy(fx.alice.pid);
    CHECK(probe(engine, fx.manifest).empty());
  }
  {
    Engine engine(config_for(dir.path));
    CHECK(engine.policy_count() == 1);
    CHECK(probe(engine, fx.manifest).empty());
  }
}

TEST_CASE("engine rejects taxonomy replacements that orphan live policies") {
  TempDir dir;
  testfix::ParisFixture fx;
  write_file(dir.path / "taxonomy.json", paris_taxonomy_json());
  Engine engine(config_for(dir.path));
  engine.add_policy(LampiPolicy::semantic(5, "sam", SemanticKeyword::of("university"),
                                          TimeInterval::any(), Sensitiveness::Low));
  auto replacement = SemanticTaxonomy::from_pairs(
      std::vector<std::pair<std::string, std::string>>{{"any place", "ROOT"}, {"bar", "any place"}});
  CHECK_THROWS_AS(engine.load_taxonomy(replacement), LampError);
  CHECK(engine.taxonomy().contains("university"));  // unchanged
}

TEST_CASE("service endpoints") {
  TempDir dir;
  testfix::ParisFixture fx;
  write_file(dir.path / "taxonomy.json", paris_taxonomy_json());
  Engine engine(config_for(dir.path));
  Service service(engine);
  const int port = service.start("127.0.0.1", 0);
  httplib::Client client("127.0.0.1", port);

  auto health = client.Get("/healthz");
  REQUIRE(health);
  CHECK(health->status == 200);

  // Insert both policies.
  auto post1 = client.Post("/policies", policy_to_json(fx.bob), "application/json");
  REQUIRE(post1);
  CHECK(post1->status == 201);
  CHECK(post1->body == "{\"pid\":1}");
  auto post2 = client.Post("/policies", policy_to_json(fx.alice), "application/json");
  REQUIRE(post2);
  CHECK(post2->status == 201);

  // Duplicate pid conflicts.
  auto dup = client.Post("/policies", policy_to_json(fx.alice), "application/json");
  REQUIRE(dup);
  CHECK(dup->status == 409);
  CHECK(dup->body.find("DuplicatePolicyId") != std::string::npos);

  // Validation failure is a 400 with the machine-readable code.
  auto bad = client.Post("/policies",
                         R"({"pid":9,"owner":"u","typ":"E","loc":"pub","int":{"anytime":true},"xi":"Low"})",
                         "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  CHECK(bad->body.find("TypeLocationMismatch") != std::string::npos);

  // Owner-filtered listing.
  auto listed = client.Get("/policies?owner=bob");
  REQUIRE(listed);
  CHECK(listed->status == 200);
  CHECK(listed->body.find("\"pid\":1") != std::string::npos);
  CHECK(listed->body.find("\"pid\":2") == std::string::npos);

  // Enroll Alice and Bob, then check the university photo.
  SeededEmbedder embedder;
  for (const char* user : {"alice", "bob"}) {
    auto enrolled = client.Post("/enroll", face_record_to_json({user, embedder.encode(user)}),
                                "application/json");
    REQUIRE(enrolled);
    CHECK(enrolled->status == 201);
  }
  auto checked = client.Post("/check", manifest_to_json(fx.manifest), "application/json");
  REQUIRE(checked);
  CHECK(checked->status == 200);
  CHECK(checked->body.find("\"user\":\"alice\"") != std::string::npos);
  CHECK(checked->body.find("\"pid\":2") != std::string::npos);
  CHECK(checked->body.find("\"user\":\"bob\"") == std::string::npos);

  auto enforced = client.Post("/enforce", manifest_to_json(fx.manifest), "application/json");
  REQUIRE(enforced);
  CHECK(enforced->status == 200);
  CHECK(enforced->body.find("\"redactor_ok\":true") != std::string::npos);
  CHECK(enforced->body.find("\"redaction\"") != std::string::npos);

  // Unknown pid deletion is a 404; a real one succeeds and empties the check.
  auto missing = client.Delete("/policies/555");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(missing->body.find("UnknownPolicyId") != std::string::npos);
  auto removed = client.Delete("/policies/2");
  REQUIRE(removed);
  CHECK(removed->status == 200);
  auto rechecked = client.Post("/check", manifest_to_json(fx.manifest), "application/json");
  REQUIRE(rechecked);
  CHECK(rechecked->body.find("\"decisions\":[]") != std::string::npos);

  service.stop();
}

TEST_CASE("service and CLI share one engine semantics") {
  TempDir dir;
  testfix::ParisFixture fx;
  write_file(dir.path / "taxonomy.json", paris_taxonomy_json());
  write_file(dir.path / "policy.json", policy_to_json(fx.alice));
  SeededEmbedder embedder;
  write_file(dir.path / "faces.in.jsonl", face_record_to_json({"alice", embedder.encode("alice")}) +
                                              "\n" +
                                              face_record_to_json({"bob", embedder.encode("bob")}) +
                                              "\n");
  write_file(dir.path / "manifest.json", manifest_to_json(fx.manifest));

  auto cli = [&](std::vector<std::string> args, std::string* captured = nullptr) {
    std::ostringstream out, err;
    args.insert(args.begin(), {"--data-dir", dir.path.string()});
    const int code = cli::run(args, out, err);
    if (captured != nullptr) *captured = out.str() + err.str();
    return code;
  };

  CHECK(cli({"policy", "add", (dir.path / "policy.json").string()}) == 0);
  CHECK(cli({"enroll", (dir.path / "faces.in.jsonl").string()}) == 0);

  std::string check_output;
  CHECK(cli({"check", (dir.path / "manifest.json").string()}, &check_output) == 0);
  CHECK(check_output.find("\"user\":\"alice\"") != std::string::npos);
  CHECK(check_output.find("retrieval:") != std::string::npos);
  CHECK(check_output.find("matching:") != std::string::npos);

  // The same decision through the HTTP interface.
  Engine engine(config_for(dir.path));
  Service service(engine);
  const int port = service.start("127.0.0.1", 0);
  httplib::Client client("127.0.0.1", port);
  auto checked = client.Post("/check", manifest_to_json(fx.manifest), "application/json");
  REQUIRE(checked);
  CHECK(checked->body.find("\"user\":\"alice\"") != std::string::npos);
  service.stop();
}

TEST_CASE("CLI error paths and exit codes") {
  TempDir dir;
  write_file(dir.path / "taxonomy.json", paris_taxonomy_json());
  write_file(dir.path / "bad.json",
             R"({"pid":3,"owner":"u","typ":"E","loc":"pub","int":{"anytime":true},"xi":"Low"})");

  auto cli = [&](std::vector<std::string> args, std::string* captured = nullptr) {
    std::ostringstream out, err;
    args.insert(args.begin(), {"--data-dir", dir.path.string()});
    const int code = cli::run(args, out, err);
    if (captured != nullptr) *captured = out.str() + err.str();
    return code;
  };

  std::string output;
  CHECK(cli({"policy", "add", (dir.path / "bad.json").string()}, &output) == 1);
  CHECK(output.find("TypeLocationMismatch") != std::string::npos);

  CHECK(cli({"policy", "add", (dir.path / "does-not-exist.json").string()}, &output) == 2);
  CHECK(cli({"policy", "rm", "42"}, &output) == 1);  // unknown pid
  CHECK(output.find("UnknownPolicyId") != std::string::npos);

  // A manifest probing an empty store succeeds with no decisions.
  testfix::ParisFixture fx;
  write_file(dir.path / "manifest.json", manifest_to_json(fx.manifest));
  CHECK(cli({"check", (dir.path / "manifest.json").string()}, &output) == 0);
  CHECK(output.find("\"decisions\":[]") != std::string::npos);

  // Taxonomy load validates and persists.
  write_file(dir.path / "tax2.json",
             R"([["any place","ROOT"],["education","any place"],["university","education"],["bar","any place"]])");
  CHECK(cli({"taxonomy", "load", (dir.path / "tax2.json").string()}, &output) == 0);
  Engine engine(config_for(dir.path));
  CHECK(engine.taxonomy().contains("bar"));
}

TEST_CASE("taxonomy json parsing accepts pairs and objects") {
  auto pairs = taxonomy_pairs_from_json(R"([["any place","ROOT"],["bar","any place"]])");
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[1] == std::pair<std::string, std::string>{"bar", "any place"});

  auto objects = taxonomy_pairs_from_json(
      R"([{"keyword":"any place","parent":"ROOT"},{"keyword":"bar","parent":"any place"}])");
  CHECK(objects == pairs);

  CHECK_THROWS_AS(taxonomy_pairs_from_json("{}"), LampError);
  CHECK_THROWS_AS(taxonomy_pairs_from_json(R"([["only one"]])"), LampError);

  auto taxonomy = SemanticTaxonomy::from_pairs(pairs);
  auto dumped = taxonomy_to_json(taxonomy);
  auto reparsed = SemanticTaxonomy::from_pairs(taxonomy_pairs_from_json(dumped));
  CHECK(reparsed.size() == taxonomy.size());
  CHECK(reparsed.contains("bar"));
}
