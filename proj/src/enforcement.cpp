#include "lamp/enforcement.hpp"

#include <algorithm>
#include <chrono>

namespace lamp {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

Errc validate_manifest(const PhotoManifest& m) {
  if (Errc e = validate_photo_location(m.location); e != Errc::ok) return e;
  std::vector<bool> seen(m.faces.size(), false);
  for (const auto& [index, vector] : m.faces) {
    (void)vector;
    if (index < 0 || static_cast<std::size_t>(index) >= m.faces.size() || seen[static_cast<std::size_t>(index)]) {
      return Errc::parse_error;  // indexes must be unique and contiguous from 0
    }
    seen[static_cast<std::size_t>(index)] = true;
  }
  return Errc::ok;
}

CheckOutcome check_photo(const PhotoManifest& m, const DlpTree& tree, const FaceRecordStore& records,
                         const PolicyMap& policies, const TolerancePair& tolerances,
                         ThreadPool* pool) {
  CheckOutcome outcome;

  auto t0 = Clock::now();
  const std::vector<PolicyId> retrieved = tree.lookup(m.location);
  outcome.retrieval_ms = ms_since(t0);

  auto t1 = Clock::now();

  // Group retrieved policies by owner; match each owner once under their
  // widest tolerance, then pin the strictest policy that actually triggers.
  struct OwnerPolicies {
    std::vector<const LampiPolicy*> policies;
  };
  std::unordered_map<UserId, OwnerPolicies> by_owner;
  for (PolicyId pid : retrieved) {
    auto it = policies.find(pid);
    if (it == policies.end()) {
      outcome.diagnostics.push_back("policy " + std::to_string(pid) + " missing from store; skipped");
      continue;
    }
    by_owner[it->second.owner].policies.push_back(&it->second);
  }

  std::vector<MatchCandidate> candidates;
  candidates.reserve(by_owner.size());
  for (auto& [owner, group] : by_owner) {
    const FaceVector* vector = records.find(owner);
    if (vector == nullptr) {
      outcome.diagnostics.push_back("owner \"" + owner + "\" has no enrolled face record; skipped");
      continue;
    }
    Sensitiveness widest = Sensitiveness::Low;
    for (const LampiPolicy* p : group.policies) {
      if (p->xi == Sensitiveness::High) widest = Sensitiveness::High;
    }
    candidates.push_back(MatchCandidate{FaceRecord{owner, *vector}, widest});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const MatchCandidate& a, const MatchCandidate& b) { return a.record.user < b.record.user; });

  MatchReport matches = match_candidates(m.faces, candidates, tolerances, pool);
  outcome.comparisons = matches.comparisons;

  for (const FaceMatch& match : matches.matches) {
    // Strictest (lowest-tolerance) policy among those this distance
    // actually satisfies; pid breaks ties deterministically.
    const LampiPolicy* triggering = nullptr;
    double best_tol = 0.0;
    for (const LampiPolicy* p : by_owner.at(match.user).policies) {
      const double tol = tolerance_for(p->xi, tolerances).max_distance;
      if (match.distance >= tol) continue;
      if (triggering == nullptr || tol < best_tol || (tol == best_tol && p->pid < triggering->pid)) {
        triggering = p;
        best_tol = tol;
      }
    }
    if (triggering == nullptr) continue;  // unreachable: match implies some policy triggers
    outcome.decisions.push_back(RedactionDecision{match.face_index, match.user, triggering->pid,
                                                  RedactionAction::ReplaceFace, match.distance});
  }
  std::sort(outcome.decisions.begin(), outcome.decisions.end(),
            [](const RedactionDecision& a, const RedactionDecision& b) {
              if (a.face_index != b.face_index) return a.face_index < b.face_index;
              return a.protected_user < b.protected_user;
            });
  outcome.matching_ms = ms_since(t1);
  return outcome;
}

EnforcementReport enforce(const PhotoManifest& m, Redactor& redactor, const DlpTree& tree,
                          const FaceRecordStore& records, const PolicyMap& policies,
                          const TolerancePair& tolerances, ThreadPool* pool) {
  EnforcementReport report;
  report.check = check_photo(m, tree, records, policies, tolerances, pool);

  auto t0 = std::chrono::steady_clock::now();
  try {
    redactor.apply(m.photo_id, report.check.decisions);
  } catch (const std::exception& e) {
    report.redactor_ok = false;
    report.redactor_error = e.what();
  }
  report.redaction_ms = ms_since(t0);
  return report;
}

}  // namespace lamp
