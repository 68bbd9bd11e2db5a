#include "lamp/engine.hpp"

#include <algorithm>
#include <fstream>

#include "lamp/json_io.hpp"

namespace lamp {

namespace {

constexpr const char* kPolicyLog = "policies.log";
constexpr const char* kFaceLog = "faces.jsonl";
constexpr const char* kTaxonomyFile = "taxonomy.json";

SemanticTaxonomy taxonomy_from_dir(const std::filesystem::path& dir) {
  const auto path = dir / kTaxonomyFile;
  std::ifstream in(path);
  if (!in) return SemanticTaxonomy{};  // root-only until one is loaded
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return SemanticTaxonomy::from_pairs(taxonomy_pairs_from_json(text));
}

}  // namespace

Engine::Engine(EngineConfig cfg) : config_(std::move(cfg)) {
  if (Errc e = config_.validate(); e != Errc::ok) throw LampError(e, "invalid engine config");
  std::filesystem::create_directories(config_.data_dir);
  store_ = std::make_unique<PolicyStore>(config_.data_dir / kPolicyLog);
  tree_ = std::make_unique<DlpTree>(taxonomy_from_dir(config_.data_dir), config_.fanout,
                                    config_.lookup());
  rebuild_tree_locked();
  load_face_log(config_.data_dir / kFaceLog, faces_);
  const unsigned workers = config_.workers == 0 ? ThreadPool::default_workers() : config_.workers;
  pool_ = std::make_unique<ThreadPool>(workers);
}

void Engine::rebuild_tree_locked() {
  auto fresh = std::make_unique<DlpTree>(tree_->taxonomy(), config_.fanout, config_.lookup());
  // Insertion order does not affect lookup results; pid order keeps
  // rebuilds deterministic.
  std::vector<const LampiPolicy*> ordered;
  ordered.reserve(store_->policies().size());
  for (const auto& [pid, p] : store_->policies()) {
    (void)pid;
    ordered.push_back(&p);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const LampiPolicy* a, const LampiPolicy* b) { return a->pid < b->pid; });
  for (const LampiPolicy* p : ordered) fresh->insert(*p);
  tree_ = std::move(fresh);
}

void Engine::add_policy(const LampiPolicy& p) {
  std::unique_lock lock(mu_);
  if (Errc e = validate_policy(p, tree_->taxonomy()); e != Errc::ok) {
    throw LampError(e, "policy " + std::to_string(p.pid) + " failed validation");
  }
  if (store_->contains(p.pid)) {
    throw LampError(Errc::duplicate_policy_id, "pid " + std::to_string(p.pid));
  }
  store_->append_upsert(p);
  tree_->insert(p);
}

void Engine::remove_policy(PolicyId pid) {
  std::unique_lock lock(mu_);
  if (!store_->contains(pid)) throw LampError(Errc::unknown_policy_id, "pid " + std::to_string(pid));
  store_->append_remove(pid);
  tree_->remove(pid);
}

std::vector<LampiPolicy> Engine::list_policies(const std::optional<UserId>& owner) const {
  std::shared_lock lock(mu_);
  std::vector<LampiPolicy> out;
  for (const auto& [pid, p] : store_->policies()) {
    (void)pid;
    if (!owner || p.owner == *owner) out.push_back(p);
  }
  std::sort(out.begin(), out.end(),
            [](const LampiPolicy& a, const LampiPolicy& b) { return a.pid < b.pid; });
  return out;
}

std::optional<LampiPolicy> Engine::find_policy(PolicyId pid) const {
  std::shared_lock lock(mu_);
  auto it = store_->policies().find(pid);
  if (it == store_->policies().end()) return std::nullopt;
  return it->second;
}

void Engine::enroll(const FaceRecord& record) {
  std::unique_lock lock(mu_);
  append_face_log(config_.data_dir / kFaceLog, record);
  faces_.upsert(record);
}

std::size_t Engine::enrolled_count() const {
  std::shared_lock lock(mu_);
  return faces_.size();
}

CheckOutcome Engine::check(const PhotoManifest& m) const {
  std::shared_lock lock(mu_);
  if (Errc e = validate_manifest(m); e != Errc::ok) throw LampError(e, "invalid manifest");
  return check_photo(m, *tree_, faces_, store_->policies(), config_.tolerances(), pool_.get());
}

EnforcementReport Engine::enforce(const PhotoManifest& m, Redactor& redactor) {
  std::mutex* photo_lock;
  {
    std::lock_guard registry(redact_registry_mu_);
    auto& slot = redact_locks_[m.photo_id];
    if (!slot) slot = std::make_unique<std::mutex>();
    photo_lock = slot.get();
  }
  std::lock_guard serialize(*photo_lock);
  std::shared_lock lock(mu_);
  if (Errc e = validate_manifest(m); e != Errc::ok) throw LampError(e, "invalid manifest");
  return lamp::enforce(m, redactor, *tree_, faces_, store_->policies(), config_.tolerances(),
                       pool_.get());
}

void Engine::load_taxonomy(const SemanticTaxonomy& taxonomy) {
  std::unique_lock lock(mu_);
  for (const auto& [pid, p] : store_->policies()) {
    (void)pid;
    if (!p.is_exact() && !taxonomy.contains(p.keyword().keyword)) {
      throw LampError(Errc::unknown_keyword, "existing policy " + std::to_string(p.pid) +
                                                 " uses keyword \"" + p.keyword().keyword +
                                                 "\" missing from the new taxonomy");
    }
  }
  std::ofstream out(config_.data_dir / kTaxonomyFile, std::ios::trunc);
  if (!out) throw LampError(Errc::io_error, "cannot write taxonomy file");
  out << taxonomy_to_json(taxonomy) << "\n";
  out.flush();
  if (!out) throw LampError(Errc::io_error, "taxonomy write failed");

  tree_ = std::make_unique<DlpTree>(taxonomy, config_.fanout, config_.lookup());
  rebuild_tree_locked();
}

std::size_t Engine::policy_count() const {
  std::shared_lock lock(mu_);
  return store_->policies().size();
}

}  // namespace lamp
