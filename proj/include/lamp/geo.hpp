#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "lamp/errors.hpp"

namespace lamp {

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  bool valid() const;
};

struct BoundingBox {
  GeoPoint min;
  GeoPoint max;

  bool contains(const GeoPoint& p, double epsilon = 0.0) const;
  bool contains(const BoundingBox& other) const;
  void expand(const GeoPoint& p);
  void merge(const BoundingBox& other);
  static BoundingBox around(const GeoPoint& p) { return BoundingBox{p, p}; }
};

// Lowercase, trimmed, internal whitespace collapsed to single spaces.
std::string normalize_component(std::string_view raw);

// Exact street address. Coarser fields must be present when finer ones are:
// a street needs a city, a city needs a state, and nation is mandatory.
struct ExactAddress {
  std::string street;
  std::string city;
  std::string state;
  std::string nation;
  std::optional<GeoPoint> point;

  static ExactAddress of(std::string_view street, std::string_view city, std::string_view state,
                         std::string_view nation, std::optional<GeoPoint> point = std::nullopt);
  Errc validate() const;
  bool operator==(const ExactAddress& other) const {
    return street == other.street && city == other.city && state == other.state && nation == other.nation;
  }
};

// Composite lookup key; lexicographic order groups by nation, then state,
// then city, then street.
struct AddressKey {
  std::string nation;
  std::string state;
  std::string city;
  std::string street;

  auto operator<=>(const AddressKey&) const = default;
  static AddressKey of(const ExactAddress& a) { return AddressKey{a.nation, a.state, a.city, a.street}; }
};

// nation[, state[, city]]; empty fields widen the prefix.
struct AddressPrefix {
  std::string nation;
  std::string state;
  std::string city;

  bool contains(const AddressKey& key) const;
  bool contains(const AddressPrefix& other) const;
};

// A region is either an administrative address prefix or a lat/lon box.
// Containment is reflexive and transitive within each kind.
struct Region {
  std::variant<AddressPrefix, BoundingBox> bounds;

  bool is_prefix() const { return std::holds_alternative<AddressPrefix>(bounds); }
  bool contains(const GeoPoint& p) const;
  bool contains(const AddressKey& key) const;
  bool contains(const Region& other) const;
};

}  // namespace lamp
