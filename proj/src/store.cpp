#include "lamp/store.hpp"

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "lamp/json_io.hpp"

namespace lamp {

using json = nlohmann::json;

Errc EngineConfig::validate() const {
  if (fanout < 2) return Errc::infeasible_spec;
  if (!(tolerance_low > 0.0) || !(tolerance_high > tolerance_low)) return Errc::infeasible_spec;
  if (!(point_epsilon >= 0.0)) return Errc::infeasible_spec;
  return Errc::ok;
}

EngineConfig config_from_json(std::string_view text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw LampError(Errc::parse_error, "config must be a JSON object");
  }
  EngineConfig cfg;
  if (j.contains("fanout")) cfg.fanout = j["fanout"].get<int>();
  if (j.contains("tolerance_low")) cfg.tolerance_low = j["tolerance_low"].get<double>();
  if (j.contains("tolerance_high")) cfg.tolerance_high = j["tolerance_high"].get<double>();
  if (j.contains("point_epsilon")) cfg.point_epsilon = j["point_epsilon"].get<double>();
  if (j.contains("strict_keywords")) cfg.strict_keywords = j["strict_keywords"].get<bool>();
  if (j.contains("workers")) cfg.workers = j["workers"].get<unsigned>();
  if (j.contains("data_dir")) cfg.data_dir = j["data_dir"].get<std::string>();
  if (const char* env = std::getenv("LAMP_DATA_DIR"); env != nullptr && *env != '\0') {
    cfg.data_dir = env;
  }
  if (Errc e = cfg.validate(); e != Errc::ok) {
    throw LampError(e, "invalid engine config");
  }
  return cfg;
}

EngineConfig config_from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LampError(Errc::io_error, "cannot read config file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return config_from_json(text);
}

std::string config_to_json(const EngineConfig& cfg) {
  nlohmann::ordered_json j;
  j["fanout"] = cfg.fanout;
  j["tolerance_low"] = cfg.tolerance_low;
  j["tolerance_high"] = cfg.tolerance_high;
  j["point_epsilon"] = cfg.point_epsilon;
  j["strict_keywords"] = cfg.strict_keywords;
  j["workers"] = cfg.workers;
  j["data_dir"] = cfg.data_dir.string();
  return j.dump();
}

PolicyStore::PolicyStore(std::filesystem::path log_path) : path_(std::move(log_path)) { replay(); }

void PolicyStore::replay() {
  std::ifstream in(path_);
  if (!in) return;  // no log yet
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object() || !j.contains("op")) {
      // A torn final line means the process died mid-append; anything
      // earlier is real corruption.
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw LampError(Errc::io_error,
                      "corrupt policy log " + path_.string() + " at line " + std::to_string(lineno));
    }
    const std::string op = j["op"].get<std::string>();
    if (op == "upsert") {
      LampiPolicy p = policy_from_json(j["policy"].dump());
      live_[p.pid] = std::move(p);
    } else if (op == "remove") {
      live_.erase(j["pid"].get<PolicyId>());
    } else {
      throw LampError(Errc::io_error, "unknown op \"" + op + "\" in policy log");
    }
  }
}

void PolicyStore::append_upsert(const LampiPolicy& p) {
  std::ofstream out(path_, std::ios::app);
  if (!out) throw LampError(Errc::io_error, "cannot append to " + path_.string());
  out << "{\"op\":\"upsert\",\"policy\":" << policy_to_json(p) << "}\n";
  out.flush();
  if (!out) throw LampError(Errc::io_error, "write failed on " + path_.string());
  live_[p.pid] = p;
}

void PolicyStore::append_remove(PolicyId pid) {
  std::ofstream out(path_, std::ios::app);
  if (!out) throw LampError(Errc::io_error, "cannot append to " + path_.string());
  out << "{\"op\":\"remove\",\"pid\":" << pid << "}\n";
  out.flush();
  if (!out) throw LampError(Errc::io_error, "write failed on " + path_.string());
  live_.erase(pid);
}

void load_face_log(const std::filesystem::path& path, FaceRecordStore& store) {
  std::ifstream in(path);
  if (!in) return;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      store.upsert(face_record_from_json(line));
    } catch (const LampError&) {
      if (in.peek() == std::char_traits<char>::eof()) break;  // torn final line
      throw LampError(Errc::io_error,
                      "corrupt face log " + path.string() + " at line " + std::to_string(lineno));
    }
  }
}

void append_face_log(const std::filesystem::path& path, const FaceRecord& record) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw LampError(Errc::io_error, "cannot append to " + path.string());
  out << face_record_to_json(record) << "\n";
  out.flush();
  if (!out) throw LampError(Errc::io_error, "write failed on " + path.string());
}

}  // namespace lamp
