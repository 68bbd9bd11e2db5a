#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "lamp/civil_time.hpp"
#include "lamp/geo.hpp"
#include "lamp/taxonomy.hpp"

namespace lamp {

using PolicyId = std::uint64_t;
using UserId = std::string;

enum class Sensitiveness { Low, High };

// 'E' exact address, 'S' semantic keyword.
enum class LocationType { Exact, Semantic };

constexpr char to_char(LocationType t) { return t == LocationType::Exact ? 'E' : 'S'; }
constexpr std::string_view to_string(Sensitiveness s) { return s == Sensitiveness::High ? "High" : "Low"; }

struct SemanticKeyword {
  std::string keyword;  // normalized

  static SemanticKeyword of(std::string_view raw) { return SemanticKeyword{normalize_component(raw)}; }
  bool operator==(const SemanticKeyword&) const = default;
};

// One user's declaration that a location is sensitive during a time interval.
struct LampiPolicy {
  PolicyId pid = 0;
  UserId owner;
  LocationType typ = LocationType::Exact;
  std::variant<ExactAddress, SemanticKeyword> loc;
  TimeInterval interval;
  Sensitiveness xi = Sensitiveness::Low;

  bool is_exact() const { return std::holds_alternative<ExactAddress>(loc); }
  const ExactAddress& address() const { return std::get<ExactAddress>(loc); }
  const SemanticKeyword& keyword() const { return std::get<SemanticKeyword>(loc); }

  static LampiPolicy exact(PolicyId pid, UserId owner, ExactAddress addr, TimeInterval interval,
                           Sensitiveness xi) {
    return LampiPolicy{pid, std::move(owner), LocationType::Exact, std::move(addr), interval, xi};
  }
  static LampiPolicy semantic(PolicyId pid, UserId owner, SemanticKeyword kw, TimeInterval interval,
                              Sensitiveness xi) {
    return LampiPolicy{pid, std::move(owner), LocationType::Semantic, std::move(kw), interval, xi};
  }
};

// Errc::ok iff all policy invariants hold and, for semantic policies, the
// keyword exists in the taxonomy.
Errc validate_policy(const LampiPolicy& p, const SemanticTaxonomy& taxonomy);

}  // namespace lamp
