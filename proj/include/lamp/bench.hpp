#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lamp/enforcement.hpp"

namespace lamp::bench {

// Synthetic workload: policies over an N/S/C/A address grid plus a
// four-level keyword taxonomy; deterministic under seed.
struct WorkloadSpec {
  std::size_t n_users = 0;
  std::size_t n_locations = 0;
  int keywords_per_location_min = 1;
  int keywords_per_location_max = 5;
  std::size_t n_distinct_keywords = 0;  // total taxonomy nodes, root included
  std::size_t policies_per_location = 0;
  double exact_fraction = 0.5;  // split between exact and semantic policies
  std::uint64_t seed = 0;

  std::size_t n_probes = 110;
  enum class ProbeKind { point_and_keywords, point_only, keywords_only } probe_kind =
      ProbeKind::point_and_keywords;
  int faces_per_probe = 0;  // > 0 also enrolls every user

  Errc validate() const;
  std::size_t total_policies() const { return n_locations * policies_per_location; }
};

struct Workload {
  SemanticTaxonomy taxonomy;
  std::vector<LampiPolicy> policies;   // pid order 1..n
  std::vector<FaceRecord> records;     // enrolled vectors (faces_per_probe > 0)
  std::vector<PhotoManifest> probes;   // reference existing locations
};

// Throws LampError(InfeasibleSpec) for invalid specs or workloads that
// cannot fit in memory.
Workload generate_workload(const WorkloadSpec& spec);

// desk: full-scale sweeps divided down to run on a laptop in minutes.
// paper: the full-scale sweeps (tens of GB for the larger ones; refused
// with InfeasibleSpec when the host is too small).
enum class Preset { desk, paper };

struct ScenarioOptions {
  Preset preset = Preset::desk;
  std::uint64_t seed = 42;
  std::size_t probes = 100;  // measured probes per data point
  std::size_t warmup = 10;   // discarded
  std::optional<double> min_x;  // override the sweep bounds
  std::optional<double> max_x;
  unsigned workers = 0;      // parallel-matching pool size; 0 = auto
  std::ostream* csv = nullptr;
  std::ostream* progress = nullptr;
};

struct BenchResult {
  std::string scenario;
  double x = 0.0;
  double lamp_p50_ms = 0.0;
  double lamp_p95_ms = 0.0;
  double naive_p50_ms = 0.0;
  double speedup = 0.0;          // naive_p50 / lamp_p50
  std::uint64_t comparisons = 0; // face pairs (faces) or policies scanned (lookups)
};

const std::vector<std::string>& scenario_names();  // users locations keywords polloc faces

// Runs one of the five scenarios; every timed lamp lookup is re-verified
// against the naive scan on the same probe (parallel vs sequential for
// "faces"). CSV columns: scenario,x,lamp_p50_ms,lamp_p95_ms,naive_p50_ms,speedup.
std::vector<BenchResult> run_scenario(std::string_view name, const ScenarioOptions& opts);

// Measures lookup vs naive over a prebuilt workload; the building block of
// the lookup scenarios, exposed for small-scale tests.
BenchResult measure_lookup(const Workload& workload, std::string scenario, double x,
                           std::size_t probes, std::size_t warmup, int fanout = DlpTree::kDefaultFanout);

}  // namespace lamp::bench
