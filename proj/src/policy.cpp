#include "lamp/policy.hpp"

namespace lamp {

Errc validate_policy(const LampiPolicy& p, const SemanticTaxonomy& taxonomy) {
  const bool holds_exact = p.is_exact();
  if ((p.typ == LocationType::Exact) != holds_exact) return Errc::type_location_mismatch;

  if (holds_exact) {
    if (Errc e = p.address().validate(); e != Errc::ok) return e;
  } else {
    const auto& kw = p.keyword().keyword;
    if (kw.empty() || !taxonomy.contains(kw)) return Errc::unknown_keyword;
  }
  if (Errc e = validate_interval(p.interval); e != Errc::ok) return e;
  return Errc::ok;
}

}  // namespace lamp
