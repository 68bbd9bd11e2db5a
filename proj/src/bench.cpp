#include "lamp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <unistd.h>

#include "lamp/rng.hpp"

namespace lamp::bench {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, std::size_t value) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), pattern, value);
  return buf;
}

Date add_days(Date d, int days) {
  using namespace std::chrono;
  year_month_day ymd{year{d.year}, month{static_cast<unsigned>(d.month)},
                     day{static_cast<unsigned>(d.day)}};
  year_month_day shifted{sys_days{ymd} + std::chrono::days{days}};
  return Date{static_cast<int>(shifted.year()), static_cast<int>(unsigned(shifted.month())),
              static_cast<int>(unsigned(shifted.day()))};
}

TimeInterval random_interval(Rng& rng) {
  const double r = rng.real01();
  if (r < 0.30) return TimeInterval::any();
  TimeInterval interval;
  if (r < 0.65 || r >= 0.90) {
    Date start = add_days(Date{2019, 1, 1}, static_cast<int>(rng.below(900)));
    interval.dates = DateRange{start, add_days(start, static_cast<int>(rng.below(180)))};
  }
  if (r >= 0.65) {
    TimeOfDay a{static_cast<int>(rng.below(24)), static_cast<int>(rng.below(60)), 0};
    TimeOfDay b{static_cast<int>(rng.below(24)), static_cast<int>(rng.below(60)), 0};
    interval.window = ClockWindow{a, b};  // wraps when b < a
  }
  return interval;
}

Timestamp random_timestamp(Rng& rng) {
  return Timestamp{add_days(Date{2019, 1, 1}, static_cast<int>(rng.below(1096))),
                   TimeOfDay{static_cast<int>(rng.below(24)), static_cast<int>(rng.below(60)),
                             static_cast<int>(rng.below(60))}};
}

// Four-level tree: root, coarse categories, subcategories, leaf place
// types. Location keywords come from the leaves; policies may name any
// level (users specify sensitivity at mixed granularity).
struct TaxonomyLayout {
  SemanticTaxonomy taxonomy;
  std::vector<std::string> level2;
  std::vector<std::string> level3;
  std::vector<std::string> leaves;
};

TaxonomyLayout build_taxonomy(std::size_t total_nodes) {
  std::size_t remaining = total_nodes - 1;  // minus root
  std::size_t n2 = std::max<std::size_t>(1, total_nodes * 4 / 100);
  std::size_t n3 = std::max<std::size_t>(1, total_nodes * 20 / 100);
  if (n2 + n3 + 1 > remaining) {
    n2 = 1;
    n3 = remaining > 2 ? 1 : 0;
  }
  const std::size_t n4 = remaining - n2 - n3;

  TaxonomyLayout layout;
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(total_nodes);
  pairs.emplace_back(std::string(SemanticTaxonomy::kRootKeyword),
                     std::string(SemanticTaxonomy::kRootParent));
  for (std::size_t i = 0; i < n2; ++i) {
    layout.level2.push_back(fmt("cat%04zu", i));
    pairs.emplace_back(layout.level2.back(), std::string(SemanticTaxonomy::kRootKeyword));
  }
  for (std::size_t i = 0; i < n3; ++i) {
    layout.level3.push_back(fmt("sub%05zu", i));
    pairs.emplace_back(layout.level3.back(), layout.level2[i % n2]);
  }
  for (std::size_t i = 0; i < n4; ++i) {
    layout.leaves.push_back(fmt("place%06zu", i));
    pairs.emplace_back(layout.leaves.back(), layout.level3[i % std::max<std::size_t>(1, n3)]);
  }
  if (layout.leaves.empty()) {
    // Tiny taxonomies: treat the deepest populated level as the leaf pool.
    layout.leaves = !layout.level3.empty() ? layout.level3 : layout.level2;
  }
  layout.taxonomy = SemanticTaxonomy::from_pairs(pairs);
  return layout;
}

struct Location {
  ExactAddress address;
  std::vector<std::string> keywords;
};

// Deterministic N/S/C/A grid; index order equals lexicographic key order
// and row-major point order, so nearby addresses stay adjacent.
Location make_location(std::size_t idx, const TaxonomyLayout& layout, const WorkloadSpec& spec,
                       Rng& rng) {
  const std::size_t nation = idx / 1000;
  const std::size_t state = (idx / 200) % 5;
  const std::size_t city = (idx / 20) % 10;
  const std::size_t street = idx % 20;
  GeoPoint point{-80.0 + 0.001 * static_cast<double>(idx / 300),
                 -170.0 + 0.001 * static_cast<double>(idx % 300)};
  Location loc;
  loc.address = ExactAddress::of(fmt("street %02zu", street), fmt("city %02zu", city),
                                 fmt("state %02zu", state), fmt("n%04zu", nation), point);

  const int kw_span = spec.keywords_per_location_max - spec.keywords_per_location_min + 1;
  const int kw_count = spec.keywords_per_location_min + static_cast<int>(rng.below(kw_span));
  for (int k = 0; k < kw_count; ++k) {
    std::string kw = layout.leaves[rng.below(layout.leaves.size())];
    if (std::find(loc.keywords.begin(), loc.keywords.end(), kw) == loc.keywords.end()) {
      loc.keywords.push_back(std::move(kw));
    }
  }
  return loc;
}

// Mixed-granularity semantic target: mostly the place keyword itself,
// sometimes a coarser ancestor, rarely "any place".
std::string pick_semantic_keyword(const Location& loc, const SemanticTaxonomy& taxonomy, Rng& rng) {
  const std::string& kw = loc.keywords[rng.below(loc.keywords.size())];
  auto chain = taxonomy.chain_to_root(kw);
  const double r = rng.real01();
  std::size_t level = r < 0.75 ? 0 : r < 0.90 ? 1 : r < 0.98 ? 2 : 3;
  return chain[std::min(level, chain.size() - 1)];
}

std::uint64_t available_memory_bytes() {
  const long pages = sysconf(_SC_PHYS_PAGES);
  const long page_size = sysconf(_SC_PAGE_SIZE);
  if (pages <= 0 || page_size <= 0) return 8ULL << 30;
  return static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(page_size);
}

}  // namespace

Errc WorkloadSpec::validate() const {
  if (n_users == 0 || n_locations == 0) return Errc::infeasible_spec;
  if (policies_per_location > n_users) return Errc::infeasible_spec;
  if (keywords_per_location_min < 1 || keywords_per_location_max > 5 ||
      keywords_per_location_min > keywords_per_location_max) {
    return Errc::infeasible_spec;
  }
  if (n_distinct_keywords < 2) return Errc::infeasible_spec;
  if (exact_fraction < 0.0 || exact_fraction > 1.0) return Errc::infeasible_spec;
  return Errc::ok;
}

Workload generate_workload(const WorkloadSpec& spec) {
  if (Errc e = spec.validate(); e != Errc::ok) {
    throw LampError(e, "invalid workload spec");
  }
  // ~420 bytes per policy between the store and the index.
  const std::uint64_t estimate = static_cast<std::uint64_t>(spec.total_policies()) * 420;
  if (estimate > available_memory_bytes() * 7 / 10) {
    throw LampError(Errc::infeasible_spec,
                    "workload of " + std::to_string(spec.total_policies()) +
                        " policies needs ~" + std::to_string(estimate >> 20) +
                        " MiB; not enough memory on this host");
  }

  Rng rng(splitmix64(spec.seed ^ 0x1a2b3c4d5e6f7788ULL));
  TaxonomyLayout layout = build_taxonomy(spec.n_distinct_keywords);

  std::vector<Location> locations;
  locations.reserve(spec.n_locations);
  for (std::size_t i = 0; i < spec.n_locations; ++i) {
    locations.push_back(make_location(i, layout, spec, rng));
  }

  Workload w;
  w.taxonomy = layout.taxonomy;
  w.policies.reserve(spec.total_policies());

  // Owners per location: a random distinct prefix of the user pool.
  std::vector<std::uint32_t> user_pool(spec.n_users);
  for (std::size_t i = 0; i < spec.n_users; ++i) user_pool[i] = static_cast<std::uint32_t>(i);

  PolicyId next_pid = 1;
  const std::size_t ppl = spec.policies_per_location;
  const std::size_t exact_per_loc = static_cast<std::size_t>(
      static_cast<double>(ppl) * spec.exact_fraction + 0.5);
  for (const Location& loc : locations) {
    for (std::size_t k = 0; k < ppl; ++k) {
      const std::size_t swap_with = k + rng.below(spec.n_users - k);
      std::swap(user_pool[k], user_pool[swap_with]);
    }
    for (std::size_t k = 0; k < ppl; ++k) {
      UserId owner = fmt("u%07zu", user_pool[k]);
      const Sensitiveness xi = rng.chance(0.5) ? Sensitiveness::High : Sensitiveness::Low;
      const TimeInterval interval = random_interval(rng);
      if (k < exact_per_loc) {
        w.policies.push_back(LampiPolicy::exact(next_pid++, std::move(owner), loc.address,
                                                interval, xi));
      } else {
        w.policies.push_back(LampiPolicy::semantic(
            next_pid++, std::move(owner),
            SemanticKeyword{pick_semantic_keyword(loc, w.taxonomy, rng)}, interval, xi));
      }
    }
  }

  SeededEmbedder embedder;
  if (spec.faces_per_probe > 0) {
    w.records.reserve(spec.n_users);
    for (std::size_t i = 0; i < spec.n_users; ++i) {
      UserId user = fmt("u%07zu", i);
      w.records.push_back(FaceRecord{user, embedder.encode(user)});
    }
  }

  w.probes.reserve(spec.n_probes);
  for (std::size_t i = 0; i < spec.n_probes; ++i) {
    const Location& loc = locations[rng.below(locations.size())];
    PhotoManifest m;
    m.photo_id = fmt("probe-%05zu", i);
    m.uploader = "bench";
    if (spec.probe_kind != WorkloadSpec::ProbeKind::keywords_only) {
      m.location.point = loc.address.point;
    }
    if (spec.probe_kind != WorkloadSpec::ProbeKind::point_only) {
      m.location.keywords = loc.keywords;
    }
    m.location.timestamp = random_timestamp(rng);
    for (int f = 0; f < spec.faces_per_probe; ++f) {
      FaceVector v;
      if (!w.records.empty() && rng.chance(0.4)) {
        const FaceRecord& target = w.records[rng.below(w.records.size())];
        v = SeededEmbedder::at_distance(target.vector, rng.uniform(0.2, 1.1), rng.next_u64());
      } else {
        v = embedder.encode(m.photo_id + "/stranger" + std::to_string(f));
      }
      m.faces.emplace_back(f, v);
    }
    w.probes.push_back(std::move(m));
  }
  return w;
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"users", "locations", "keywords", "polloc",
                                                 "faces"};
  return names;
}

namespace {

double percentile(std::vector<double>& samples, double p) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const std::size_t idx = static_cast<std::size_t>(p * static_cast<double>(samples.size() - 1));
  return samples[idx];
}

std::vector<PolicyId> sorted(std::vector<PolicyId> v) {
  std::sort(v.begin(), v.end());
  return v;
}

void emit_csv_header(const ScenarioOptions& opts, std::string_view extra) {
  if (opts.csv == nullptr) return;
  if (!extra.empty()) *opts.csv << extra << "\n";
  *opts.csv << "scenario,x,lamp_p50_ms,lamp_p95_ms,naive_p50_ms,speedup\n";
}

void emit_csv_row(const ScenarioOptions& opts, const BenchResult& r) {
  if (opts.csv == nullptr) return;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%g,%.6f,%.6f,%.6f,%.1f\n", r.scenario.c_str(), r.x,
                r.lamp_p50_ms, r.lamp_p95_ms, r.naive_p50_ms, r.speedup);
  *opts.csv << buf;
}

void note(const ScenarioOptions& opts, const std::string& line) {
  if (opts.progress != nullptr) *opts.progress << line << "\n" << std::flush;
}

}  // namespace

BenchResult measure_lookup(const Workload& workload, std::string scenario, double x,
                           std::size_t probes, std::size_t warmup, int fanout) {
  DlpTree tree(workload.taxonomy, fanout);
  for (const auto& p : workload.policies) tree.insert(p);

  BenchResult result;
  result.scenario = std::move(scenario);
  result.x = x;
  result.comparisons = workload.policies.size();

  std::vector<double> lamp_samples, naive_samples;
  lamp_samples.reserve(probes);
  naive_samples.reserve(probes);

  const std::size_t total = warmup + probes;
  for (std::size_t i = 0; i < total; ++i) {
    const PhotoLocation& loc = workload.probes[i % workload.probes.size()].location;

    auto t0 = Clock::now();
    auto lamp_result = tree.lookup(loc);
    const double lamp_ms = ms_since(t0);

    auto t1 = Clock::now();
    auto naive_result = naive_scan(workload.policies, workload.taxonomy, loc, tree.config());
    const double naive_ms = ms_since(t1);

    // Correctness is re-verified on every timed probe.
    if (sorted(lamp_result) != sorted(naive_result)) {
      throw LampError(Errc::infeasible_spec,
                      "lookup/naive mismatch on probe " + std::to_string(i) + " of scenario " +
                          result.scenario);
    }
    if (i < warmup) continue;
    lamp_samples.push_back(lamp_ms);
    naive_samples.push_back(naive_ms);
  }

  result.lamp_p50_ms = percentile(lamp_samples, 0.50);
  result.lamp_p95_ms = percentile(lamp_samples, 0.95);
  result.naive_p50_ms = percentile(naive_samples, 0.50);
  result.speedup = result.lamp_p50_ms > 0.0 ? result.naive_p50_ms / result.lamp_p50_ms : 0.0;
  return result;
}

namespace {

std::vector<double> sweep_points(std::vector<double> defaults, const ScenarioOptions& opts) {
  if (!opts.min_x && !opts.max_x) return defaults;
  const double lo = opts.min_x.value_or(defaults.front());
  const double hi = opts.max_x.value_or(defaults.back());
  if (lo >= hi) return {lo};
  // Four geometric steps between the overridden bounds.
  std::vector<double> points;
  const int steps = 4;
  for (int i = 0; i <= steps; ++i) {
    points.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / steps));
  }
  for (double& p : points) p = std::round(p);
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

struct LookupScenarioParams {
  std::vector<double> points;
  WorkloadSpec base;
  enum class Vary { users, locations, keywords, polloc } vary;
};

LookupScenarioParams lookup_params(std::string_view name, Preset preset) {
  const std::size_t scale = preset == Preset::paper ? 10 : 1;  // x10 per axis = x100 policies
  LookupScenarioParams params;
  WorkloadSpec& base = params.base;
  base.keywords_per_location_min = 1;
  base.keywords_per_location_max = 5;

  if (name == "users") {
    params.vary = LookupScenarioParams::Vary::users;
    params.points = {1000, 2500, 5000, 10000};
    base.n_locations = 10000 * scale;
    base.policies_per_location = 100 * scale;
    base.n_distinct_keywords = 1000;
    base.probe_kind = WorkloadSpec::ProbeKind::point_and_keywords;
    for (double& p : params.points) p *= static_cast<double>(scale * scale);
  } else if (name == "locations") {
    params.vary = LookupScenarioParams::Vary::locations;
    params.points = {1000, 2000, 5000, 10000};
    base.n_users = 10000 * scale * scale;
    base.policies_per_location = 100 * scale;
    base.n_distinct_keywords = 1000;
    base.probe_kind = WorkloadSpec::ProbeKind::point_only;
    for (double& p : params.points) p *= static_cast<double>(scale);
  } else if (name == "keywords") {
    params.vary = LookupScenarioParams::Vary::keywords;
    params.points = {250, 500, 1000, 2500, 5000};  // same sweep at both presets
    base.n_users = 10000 * scale * scale;
    base.n_locations = 1000 * scale;
    base.policies_per_location = 100 * scale;
    base.keywords_per_location_min = 5;
    base.keywords_per_location_max = 5;
    base.probe_kind = WorkloadSpec::ProbeKind::keywords_only;
  } else if (name == "polloc") {
    params.vary = LookupScenarioParams::Vary::polloc;
    params.points = {1000, 2000, 5000, 10000};
    base.n_users = 10000 * scale * scale;
    base.n_distinct_keywords = 1000;
    base.probe_kind = WorkloadSpec::ProbeKind::point_only;
  } else {
    throw LampError(Errc::parse_error, "unknown scenario \"" + std::string(name) + "\"");
  }
  return params;
}

std::vector<BenchResult> run_lookup_scenario(std::string_view name, const ScenarioOptions& opts) {
  LookupScenarioParams params = lookup_params(name, opts.preset);
  params.points = sweep_points(params.points, opts);

  emit_csv_header(opts, "");
  std::vector<BenchResult> results;
  for (double x : params.points) {
    WorkloadSpec spec = params.base;
    spec.seed = splitmix64(opts.seed ^ static_cast<std::uint64_t>(x));
    spec.n_probes = opts.warmup + opts.probes;
    const auto n = static_cast<std::size_t>(x);
    switch (params.vary) {
      case LookupScenarioParams::Vary::users:
        spec.n_users = n;
        break;
      case LookupScenarioParams::Vary::locations:
        spec.n_locations = n;
        break;
      case LookupScenarioParams::Vary::keywords:
        spec.n_distinct_keywords = n;
        break;
      case LookupScenarioParams::Vary::polloc: {
        // Policies-per-location sweep at a fixed total (2M desk), so the
        // naive baseline's workload stays constant while retrieval grows.
        const std::size_t total = opts.preset == Preset::paper ? 200'000'000 : 2'000'000;
        spec.policies_per_location = n;
        spec.n_locations = total / n;
        break;
      }
    }
    note(opts, "[bench] " + std::string(name) + " x=" + std::to_string(n) + ": generating " +
                   std::to_string(spec.total_policies()) + " policies");
    Workload workload = generate_workload(spec);
    BenchResult r = measure_lookup(workload, std::string(name), x, opts.probes, opts.warmup);
    note(opts, "[bench]   lamp p50=" + std::to_string(r.lamp_p50_ms) + "ms naive p50=" +
                   std::to_string(r.naive_p50_ms) + "ms speedup=" + std::to_string(r.speedup));
    emit_csv_row(opts, r);
    results.push_back(std::move(r));
  }
  return results;
}

std::vector<BenchResult> run_faces_scenario(const ScenarioOptions& opts) {
  std::vector<double> points = sweep_points({100, 500, 1000, 2500, 5000}, opts);
  const unsigned workers = opts.workers == 0 ? ThreadPool::default_workers() : opts.workers;
  ThreadPool pool(workers);
  emit_csv_header(opts, "# pool_size=" + std::to_string(workers));

  constexpr int kFacesPerPhoto = 18;  // one crowded group photo per probe
  SeededEmbedder embedder;
  Rng rng(splitmix64(opts.seed ^ 0xface5ULL));

  std::vector<BenchResult> results;
  for (double x : points) {
    const std::size_t n_candidates = static_cast<std::size_t>(x);
    std::vector<MatchCandidate> candidates;
    candidates.reserve(n_candidates);
    for (std::size_t i = 0; i < n_candidates; ++i) {
      UserId user = fmt("cand%05zu", i);
      candidates.push_back(MatchCandidate{
          FaceRecord{user, embedder.encode(user)},
          rng.chance(0.5) ? Sensitiveness::High : Sensitiveness::Low});
    }

    std::vector<double> par_samples, seq_samples;
    std::uint64_t comparisons = 0;
    const std::size_t total = opts.warmup + opts.probes;
    for (std::size_t i = 0; i < total; ++i) {
      std::vector<std::pair<int, FaceVector>> faces;
      faces.reserve(kFacesPerPhoto);
      for (int f = 0; f < kFacesPerPhoto; ++f) {
        if (rng.chance(0.3)) {
          const auto& target = candidates[rng.below(candidates.size())];
          faces.emplace_back(f, SeededEmbedder::at_distance(target.record.vector,
                                                            rng.uniform(0.2, 1.2), rng.next_u64()));
        } else {
          faces.emplace_back(f, embedder.encode(fmt("stranger%06zu", i) + std::to_string(f)));
        }
      }

      auto t0 = Clock::now();
      MatchReport parallel = match_candidates(faces, candidates, TolerancePair{}, &pool);
      const double par_ms = ms_since(t0);

      auto t1 = Clock::now();
      MatchReport sequential = match_candidates(faces, candidates, TolerancePair{}, nullptr);
      const double seq_ms = ms_since(t1);

      if (parallel.matches != sequential.matches) {
        throw LampError(Errc::infeasible_spec, "parallel/sequential mismatch in faces scenario");
      }
      comparisons = parallel.comparisons;
      if (i < opts.warmup) continue;
      par_samples.push_back(par_ms);
      seq_samples.push_back(seq_ms);
    }

    BenchResult r;
    r.scenario = "faces";
    r.x = x;
    r.comparisons = comparisons;
    r.lamp_p50_ms = percentile(par_samples, 0.50);
    r.lamp_p95_ms = percentile(par_samples, 0.95);
    r.naive_p50_ms = percentile(seq_samples, 0.50);
    r.speedup = r.lamp_p50_ms > 0.0 ? r.naive_p50_ms / r.lamp_p50_ms : 0.0;
    note(opts, "[bench] faces x=" + std::to_string(n_candidates) + ": parallel p50=" +
                   std::to_string(r.lamp_p50_ms) + "ms sequential p50=" +
                   std::to_string(r.naive_p50_ms) + "ms (" + std::to_string(comparisons) +
                   " comparisons)");
    emit_csv_row(opts, r);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace

std::vector<BenchResult> run_scenario(std::string_view name, const ScenarioOptions& opts) {
  if (name == "faces") return run_faces_scenario(opts);
  return run_lookup_scenario(name, opts);
}

}  // namespace lamp::bench
