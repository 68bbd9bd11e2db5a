#include "lamp/json_io.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

namespace lamp {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

json parse_or_throw(std::string_view text, const char* what) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw LampError(Errc::parse_error, std::string("invalid JSON for ") + what);
  return j;
}

std::string get_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw LampError(Errc::parse_error, std::string("missing or non-string \"") + key + "\"");
  }
  return it->get<std::string>();
}

TimeInterval interval_from(const json& j) {
  if (!j.is_object()) throw LampError(Errc::invalid_interval, "\"int\" must be an object");
  TimeInterval interval;
  if (auto it = j.find("anytime"); it != j.end()) {
    if (!it->is_boolean()) throw LampError(Errc::invalid_interval, "\"anytime\" must be a boolean");
    interval.anytime = it->get<bool>();
  }
  const bool has_ds = j.contains("date_start");
  const bool has_de = j.contains("date_end");
  if (has_ds != has_de) {
    throw LampError(Errc::invalid_interval, "date_start and date_end must come together");
  }
  if (has_ds) {
    auto start = parse_date(get_string(j, "date_start"));
    auto end = parse_date(get_string(j, "date_end"));
    if (!start || !end) throw LampError(Errc::invalid_interval, "unparseable date");
    interval.dates = DateRange{*start, *end};
  }
  const bool has_ts = j.contains("time_start");
  const bool has_te = j.contains("time_end");
  if (has_ts != has_te) {
    throw LampError(Errc::invalid_interval, "time_start and time_end must come together");
  }
  if (has_ts) {
    auto start = parse_time(get_string(j, "time_start"));
    auto end = parse_time(get_string(j, "time_end"));
    if (!start || !end) throw LampError(Errc::invalid_interval, "unparseable clock time");
    interval.window = ClockWindow{*start, *end};
  }
  if (Errc e = validate_interval(interval); e != Errc::ok) {
    throw LampError(e, "invalid time interval");
  }
  return interval;
}

ordered_json interval_to(const TimeInterval& interval) {
  ordered_json j = ordered_json::object();
  if (interval.anytime) {
    j["anytime"] = true;
    return j;
  }
  if (interval.dates) {
    j["date_start"] = format_date(interval.dates->start);
    j["date_end"] = format_date(interval.dates->end);
  }
  if (interval.window) {
    j["time_start"] = format_time(interval.window->start);
    j["time_end"] = format_time(interval.window->end);
  }
  return j;
}

std::optional<GeoPoint> point_from(const json& j) {
  const bool has_lat = j.contains("lat");
  const bool has_lon = j.contains("lon");
  if (has_lat != has_lon) throw LampError(Errc::malformed_address, "lat and lon must come together");
  if (!has_lat) return std::nullopt;
  if (!j["lat"].is_number() || !j["lon"].is_number()) {
    throw LampError(Errc::malformed_address, "lat/lon must be numbers");
  }
  GeoPoint p{j["lat"].get<double>(), j["lon"].get<double>()};
  if (!p.valid()) throw LampError(Errc::malformed_address, "lat/lon out of range");
  return p;
}

ExactAddress address_from(const json& j) {
  auto field = [&](const char* key) -> std::string {
    auto it = j.find(key);
    if (it == j.end()) return {};
    if (!it->is_string()) throw LampError(Errc::malformed_address, std::string("\"") + key + "\" must be a string");
    return it->get<std::string>();
  };
  ExactAddress a = ExactAddress::of(field("street"), field("city"), field("state"), field("nation"),
                                    point_from(j));
  if (Errc e = a.validate(); e != Errc::ok) throw LampError(e, "malformed address");
  return a;
}

ordered_json address_to(const ExactAddress& a) {
  ordered_json j = ordered_json::object();
  j["street"] = a.street;
  j["city"] = a.city;
  j["state"] = a.state;
  j["nation"] = a.nation;
  if (a.point) {
    j["lat"] = a.point->lat;
    j["lon"] = a.point->lon;
  }
  return j;
}

FaceVector vector_from(const json& j) {
  if (!j.is_array()) throw LampError(Errc::dimension_mismatch, "\"vector\" must be an array");
  std::vector<double> values;
  values.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw LampError(Errc::dimension_mismatch, "vector components must be numbers");
    values.push_back(v.get<double>());
  }
  return face_vector_from(values);
}

void append_vector(std::string& out, const FaceVector& v) {
  char buf[40];
  out.push_back('[');
  for (int i = 0; i < kFaceDims; ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
    out += buf;
    if (i + 1 < kFaceDims) out.push_back(',');
  }
  out.push_back(']');
}

ordered_json decision_to(const RedactionDecision& d) {
  ordered_json j = ordered_json::object();
  j["face_index"] = d.face_index;
  j["user"] = d.protected_user;
  j["pid"] = d.triggering_policy;
  j["action"] = "replace_face";
  j["distance"] = d.distance;
  return j;
}

}  // namespace

LampiPolicy policy_from_json(std::string_view text) {
  json j = parse_or_throw(text, "policy");
  if (!j.is_object()) throw LampError(Errc::parse_error, "policy must be a JSON object");

  LampiPolicy p;
  if (!j.contains("pid") || !j["pid"].is_number_unsigned()) {
    throw LampError(Errc::parse_error, "\"pid\" must be a non-negative integer");
  }
  p.pid = j["pid"].get<PolicyId>();
  p.owner = get_string(j, "owner");

  const std::string typ = get_string(j, "typ");
  if (typ != "E" && typ != "S") throw LampError(Errc::parse_error, "\"typ\" must be \"E\" or \"S\"");
  p.typ = typ == "E" ? LocationType::Exact : LocationType::Semantic;

  auto loc = j.find("loc");
  if (loc == j.end()) throw LampError(Errc::parse_error, "missing \"loc\"");
  if (p.typ == LocationType::Exact) {
    if (!loc->is_object()) {
      throw LampError(Errc::type_location_mismatch, "typ \"E\" requires an address object in \"loc\"");
    }
    p.loc = address_from(*loc);
  } else {
    if (!loc->is_string()) {
      throw LampError(Errc::type_location_mismatch, "typ \"S\" requires a keyword string in \"loc\"");
    }
    p.loc = SemanticKeyword::of(loc->get<std::string>());
  }

  auto interval = j.find("int");
  if (interval == j.end()) throw LampError(Errc::invalid_interval, "missing \"int\"");
  p.interval = interval_from(*interval);

  const std::string xi = get_string(j, "xi");
  if (xi != "High" && xi != "Low") throw LampError(Errc::parse_error, "\"xi\" must be \"High\" or \"Low\"");
  p.xi = xi == "High" ? Sensitiveness::High : Sensitiveness::Low;
  return p;
}

std::string policy_to_json(const LampiPolicy& p) {
  ordered_json j = ordered_json::object();
  j["pid"] = p.pid;
  j["owner"] = p.owner;
  j["typ"] = std::string(1, to_char(p.typ));
  if (p.is_exact()) {
    j["loc"] = address_to(p.address());
  } else {
    j["loc"] = p.keyword().keyword;
  }
  j["int"] = interval_to(p.interval);
  j["xi"] = std::string(to_string(p.xi));
  return j.dump();
}

std::string policies_to_json(std::span<const LampiPolicy> policies) {
  std::string out = "[";
  for (std::size_t i = 0; i < policies.size(); ++i) {
    if (i) out.push_back(',');
    out += policy_to_json(policies[i]);
  }
  out.push_back(']');
  return out;
}

FaceRecord face_record_from_json(std::string_view text) {
  json j = parse_or_throw(text, "face record");
  FaceRecord r;
  r.user = get_string(j, "user");
  auto vec = j.find("vector");
  if (vec == j.end()) throw LampError(Errc::dimension_mismatch, "missing \"vector\"");
  r.vector = vector_from(*vec);
  return r;
}

std::string face_record_to_json(const FaceRecord& r) {
  std::string out = "{\"user\":";
  out += json(r.user).dump();
  out += ",\"vector\":";
  append_vector(out, r.vector);
  out.push_back('}');
  return out;
}

PhotoManifest manifest_from_json(std::string_view text) {
  json j = parse_or_throw(text, "manifest");
  if (!j.is_object()) throw LampError(Errc::parse_error, "manifest must be a JSON object");
  PhotoManifest m;
  m.photo_id = get_string(j, "photo_id");
  m.uploader = get_string(j, "uploader");

  auto loc = j.find("location");
  if (loc == j.end() || !loc->is_object()) throw LampError(Errc::parse_error, "missing \"location\" object");
  if (loc->contains("nation")) {
    m.location.address = address_from(*loc);
  }
  m.location.point = point_from(*loc);
  if (auto kws = loc->find("keywords"); kws != loc->end()) {
    if (!kws->is_array()) throw LampError(Errc::parse_error, "\"keywords\" must be an array");
    for (const auto& kw : *kws) {
      if (!kw.is_string()) throw LampError(Errc::parse_error, "keywords must be strings");
      m.location.keywords.push_back(normalize_component(kw.get<std::string>()));
    }
  }
  auto ts = parse_timestamp(get_string(*loc, "timestamp"));
  if (!ts) throw LampError(Errc::parse_error, "unparseable \"timestamp\"");
  m.location.timestamp = *ts;

  if (auto faces = j.find("faces"); faces != j.end()) {
    if (!faces->is_array()) throw LampError(Errc::parse_error, "\"faces\" must be an array");
    for (const auto& f : *faces) {
      if (!f.is_object() || !f.contains("index") || !f["index"].is_number_integer()) {
        throw LampError(Errc::parse_error, "each face needs an integer \"index\"");
      }
      auto vec = f.find("vector");
      if (vec == f.end()) throw LampError(Errc::dimension_mismatch, "face missing \"vector\"");
      m.faces.emplace_back(f["index"].get<int>(), vector_from(*vec));
    }
  }
  if (Errc e = validate_manifest(m); e != Errc::ok) throw LampError(e, "invalid manifest");
  return m;
}

std::string manifest_to_json(const PhotoManifest& m) {
  ordered_json loc = ordered_json::object();
  if (m.location.address) {
    ordered_json addr = address_to(*m.location.address);
    for (auto& [key, value] : addr.items()) {
      if (key != "lat" && key != "lon") loc[key] = value;
    }
  }
  if (m.location.point) {
    loc["lat"] = m.location.point->lat;
    loc["lon"] = m.location.point->lon;
  }
  loc["keywords"] = m.location.keywords;
  loc["timestamp"] = format_timestamp(m.location.timestamp);

  std::string out = "{\"photo_id\":";
  out += json(m.photo_id).dump();
  out += ",\"uploader\":";
  out += json(m.uploader).dump();
  out += ",\"location\":";
  out += loc.dump();
  out += ",\"faces\":[";
  for (std::size_t i = 0; i < m.faces.size(); ++i) {
    if (i) out.push_back(',');
    out += "{\"index\":";
    out += std::to_string(m.faces[i].first);
    out += ",\"vector\":";
    append_vector(out, m.faces[i].second);
    out.push_back('}');
  }
  out += "]}";
  return out;
}

std::vector<std::pair<std::string, std::string>> taxonomy_pairs_from_json(std::string_view text) {
  json j = parse_or_throw(text, "taxonomy");
  if (!j.is_array()) throw LampError(Errc::parse_error, "taxonomy must be a JSON array");
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(j.size());
  for (const auto& row : j) {
    if (row.is_array() && row.size() == 2 && row[0].is_string() && row[1].is_string()) {
      pairs.emplace_back(row[0].get<std::string>(), row[1].get<std::string>());
    } else if (row.is_object() && row.contains("keyword") && row.contains("parent")) {
      pairs.emplace_back(get_string(row, "keyword"), get_string(row, "parent"));
    } else {
      throw LampError(Errc::parse_error, "taxonomy rows must be [keyword, parent] pairs");
    }
  }
  return pairs;
}

std::string taxonomy_to_json(const SemanticTaxonomy& taxonomy) {
  auto pairs = taxonomy.to_pairs();
  std::sort(pairs.begin(), pairs.end());
  json rows = json::array();
  for (const auto& [kw, parent] : pairs) rows.push_back(json::array({kw, parent}));
  return rows.dump();
}

std::string decisions_to_json(std::span<const RedactionDecision> decisions) {
  ordered_json rows = ordered_json::array();
  for (const auto& d : decisions) rows.push_back(decision_to(d));
  return rows.dump();
}

std::string check_outcome_to_json(std::string_view photo_id, const CheckOutcome& outcome) {
  ordered_json j = ordered_json::object();
  j["photo_id"] = std::string(photo_id);
  ordered_json rows = ordered_json::array();
  for (const auto& d : outcome.decisions) rows.push_back(decision_to(d));
  j["decisions"] = std::move(rows);
  j["diagnostics"] = outcome.diagnostics;
  j["timings_ms"] = {{"retrieval", outcome.retrieval_ms}, {"matching", outcome.matching_ms}};
  j["comparisons"] = outcome.comparisons;
  return j.dump();
}

std::string report_to_json(std::string_view photo_id, const EnforcementReport& report) {
  ordered_json j = ordered_json::object();
  j["photo_id"] = std::string(photo_id);
  ordered_json rows = ordered_json::array();
  for (const auto& d : report.check.decisions) rows.push_back(decision_to(d));
  j["decisions"] = std::move(rows);
  j["diagnostics"] = report.check.diagnostics;
  j["timings_ms"] = {{"retrieval", report.check.retrieval_ms},
                     {"matching", report.check.matching_ms},
                     {"redaction", report.redaction_ms}};
  j["comparisons"] = report.check.comparisons;
  j["redactor_ok"] = report.redactor_ok;
  if (!report.redactor_ok) j["redactor_error"] = report.redactor_error;
  return j.dump();
}

}  // namespace lamp
