#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lamp/enforcement.hpp"

namespace lamp {

// Wire formats. Parsers throw LampError with the most specific code they
// can determine (TypeLocationMismatch, InvalidInterval, MalformedAddress,
// DimensionMismatch); structurally broken JSON is ParseError.

LampiPolicy policy_from_json(std::string_view text);
std::string policy_to_json(const LampiPolicy& p);
std::string policies_to_json(std::span<const LampiPolicy> policies);

// {"user":..., "vector":[128 doubles]}; components serialized with 17
// significant digits so round trips are bit-faithful.
FaceRecord face_record_from_json(std::string_view text);
std::string face_record_to_json(const FaceRecord& r);

PhotoManifest manifest_from_json(std::string_view text);
std::string manifest_to_json(const PhotoManifest& m);

// JSON array of [keyword, parent] pairs; the root row has parent "ROOT".
// Arrays of {"keyword":..., "parent":...} objects are also accepted.
std::vector<std::pair<std::string, std::string>> taxonomy_pairs_from_json(std::string_view text);
std::string taxonomy_to_json(const SemanticTaxonomy& taxonomy);

std::string decisions_to_json(std::span<const RedactionDecision> decisions);
std::string check_outcome_to_json(std::string_view photo_id, const CheckOutcome& outcome);
std::string report_to_json(std::string_view photo_id, const EnforcementReport& report);

}  // namespace lamp
