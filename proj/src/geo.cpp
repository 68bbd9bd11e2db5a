#include "lamp/geo.hpp"

#include <cctype>
#include <cmath>

namespace lamp {

bool GeoPoint::valid() const {
  return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 && lon >= -180.0 &&
         lon <= 180.0;
}

bool BoundingBox::contains(const GeoPoint& p, double epsilon) const {
  return p.lat >= min.lat - epsilon && p.lat <= max.lat + epsilon && p.lon >= min.lon - epsilon &&
         p.lon <= max.lon + epsilon;
}

bool BoundingBox::contains(const BoundingBox& other) const {
  return contains(other.min) && contains(other.max);
}

void BoundingBox::expand(const GeoPoint& p) {
  if (p.lat < min.lat) min.lat = p.lat;
  if (p.lon < min.lon) min.lon = p.lon;
  if (p.lat > max.lat) max.lat = p.lat;
  if (p.lon > max.lon) max.lon = p.lon;
}

void BoundingBox::merge(const BoundingBox& other) {
  expand(other.min);
  expand(other.max);
}

std::string normalize_component(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (unsigned char c : raw) {
    if (std::isspace(c)) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

ExactAddress ExactAddress::of(std::string_view street, std::string_view city, std::string_view state,
                              std::string_view nation, std::optional<GeoPoint> point) {
  ExactAddress a;
  a.street = normalize_component(street);
  a.city = normalize_component(city);
  a.state = normalize_component(state);
  a.nation = normalize_component(nation);
  a.point = point;
  return a;
}

Errc ExactAddress::validate() const {
  if (nation.empty()) return Errc::malformed_address;
  // No finer field without its coarser one.
  if (!city.empty() && state.empty()) return Errc::malformed_address;
  if (!street.empty() && city.empty()) return Errc::malformed_address;
  if (point && !point->valid()) return Errc::malformed_address;
  return Errc::ok;
}

bool AddressPrefix::contains(const AddressKey& key) const {
  if (!nation.empty() && key.nation != nation) return false;
  if (!state.empty() && key.state != state) return false;
  if (!city.empty() && key.city != city) return false;
  return true;
}

bool AddressPrefix::contains(const AddressPrefix& other) const {
  if (!nation.empty() && other.nation != nation) return false;
  if (!state.empty() && other.state != state) return false;
  if (!city.empty() && other.city != city) return false;
  return true;
}

bool Region::contains(const GeoPoint& p) const {
  if (const auto* box = std::get_if<BoundingBox>(&bounds)) return box->contains(p);
  return false;
}

bool Region::contains(const AddressKey& key) const {
  if (const auto* prefix = std::get_if<AddressPrefix>(&bounds)) return prefix->contains(key);
  return false;
}

bool Region::contains(const Region& other) const {
  if (const auto* prefix = std::get_if<AddressPrefix>(&bounds)) {
    if (const auto* p2 = std::get_if<AddressPrefix>(&other.bounds)) return prefix->contains(*p2);
    return false;
  }
  const auto& box = std::get<BoundingBox>(bounds);
  if (const auto* b2 = std::get_if<BoundingBox>(&other.bounds)) return box.contains(*b2);
  return false;
}

}  // namespace lamp
