#pragma once

#include <filesystem>
#include <optional>
#include <unordered_map>

#include "lamp/enforcement.hpp"

namespace lamp {

struct EngineConfig {
  int fanout = DlpTree::kDefaultFanout;
  double tolerance_low = 0.6;
  double tolerance_high = 0.9;
  double point_epsilon = 0.0005;
  bool strict_keywords = false;
  unsigned workers = 0;  // 0 = auto
  std::filesystem::path data_dir = ".";

  Errc validate() const;
  TolerancePair tolerances() const { return TolerancePair{tolerance_low, tolerance_high}; }
  LookupConfig lookup() const { return LookupConfig{point_epsilon, strict_keywords}; }
};

// Reads a JSON config file (all keys optional) and applies the
// LAMP_DATA_DIR environment override.
EngineConfig config_from_file(const std::filesystem::path& path);
EngineConfig config_from_json(std::string_view text);
std::string config_to_json(const EngineConfig& cfg);

// Append-only JSON-lines log of policy upserts and removals. Replaying the
// log reproduces the exact live-policy map; a torn final line (partial
// write before a crash) is tolerated and ignored.
class PolicyStore {
 public:
  explicit PolicyStore(std::filesystem::path log_path);

  const PolicyMap& policies() const { return live_; }
  bool contains(PolicyId pid) const { return live_.count(pid) != 0; }

  // Logs first, then applies. Duplicate pids are the caller's to reject.
  void append_upsert(const LampiPolicy& p);
  void append_remove(PolicyId pid);

  const std::filesystem::path& log_path() const { return path_; }

 private:
  void replay();

  std::filesystem::path path_;
  PolicyMap live_;
};

// Enrolled face vectors, one JSON line per enrollment; the last line per
// user wins on replay.
void load_face_log(const std::filesystem::path& path, FaceRecordStore& store);
void append_face_log(const std::filesystem::path& path, const FaceRecord& record);

}  // namespace lamp
