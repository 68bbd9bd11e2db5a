#include "lamp/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lamp/bench.hpp"
#include "lamp/engine.hpp"
#include "lamp/json_io.hpp"
#include "lamp/service.hpp"

namespace lamp::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LampError(Errc::io_error, "cannot read " + path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

EngineConfig resolve_config(const std::string& config_path, const std::string& data_dir) {
  EngineConfig cfg;
  if (!config_path.empty()) {
    cfg = config_from_file(config_path);
  } else if (const char* env = std::getenv("LAMP_DATA_DIR"); env != nullptr && *env != '\0') {
    cfg.data_dir = env;
  }
  if (!data_dir.empty()) cfg.data_dir = data_dir;
  return cfg;
}

// One object or an array of objects.
std::vector<LampiPolicy> policies_from_file(const std::string& path) {
  const std::string text = read_file(path);
  nlohmann::json j = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw LampError(Errc::parse_error, "invalid JSON in " + path);
  std::vector<LampiPolicy> out;
  if (j.is_array()) {
    for (const auto& row : j) out.push_back(policy_from_json(row.dump()));
  } else {
    out.push_back(policy_from_json(text));
  }
  return out;
}

// One object or JSON lines.
std::vector<FaceRecord> records_from_file(const std::string& path) {
  const std::string text = read_file(path);
  nlohmann::json whole = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
  std::vector<FaceRecord> out;
  if (!whole.is_discarded()) {
    if (whole.is_array()) {
      for (const auto& row : whole) out.push_back(face_record_from_json(row.dump()));
    } else {
      out.push_back(face_record_from_json(text));
    }
    return out;
  }
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    out.push_back(face_record_from_json(line));
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"LAMP policy engine: location-aware multi-party photo privacy"};
  app.require_subcommand(1);

  std::string config_path, data_dir;
  app.add_option("--config", config_path, "engine config JSON file");
  app.add_option("--data-dir", data_dir, "data directory (overrides config and LAMP_DATA_DIR)");

  // policy add | rm | list
  auto* policy = app.add_subcommand("policy", "manage LAMPi policies");
  policy->require_subcommand(1);
  std::string policy_file;
  auto* policy_add = policy->add_subcommand("add", "insert policies from a JSON file");
  policy_add->add_option("file", policy_file, "policy JSON (object or array)")->required();
  PolicyId rm_pid = 0;
  auto* policy_rm = policy->add_subcommand("rm", "remove a policy by pid");
  policy_rm->add_option("pid", rm_pid, "policy id")->required();
  std::string list_owner;
  auto* policy_list = policy->add_subcommand("list", "list stored policies");
  policy_list->add_option("--owner", list_owner, "filter by owner");

  std::string enroll_file;
  auto* enroll = app.add_subcommand("enroll", "enroll face records from a JSON/JSONL file");
  enroll->add_option("file", enroll_file, "face record file")->required();

  std::string manifest_file;
  auto* check = app.add_subcommand("check", "evaluate a photo manifest against stored policies");
  check->add_option("manifest", manifest_file, "photo manifest JSON")->required();

  std::string taxonomy_file;
  auto* taxonomy = app.add_subcommand("taxonomy", "manage the semantic taxonomy");
  taxonomy->require_subcommand(1);
  auto* taxonomy_load = taxonomy->add_subcommand("load", "load a taxonomy file");
  taxonomy_load->add_option("file", taxonomy_file, "JSON array of [keyword, parent] rows")
      ->required();

  std::string scenario, bench_out, preset_name = "desk";
  std::uint64_t bench_seed = 42;
  std::size_t bench_probes = 100;
  unsigned bench_workers = 0;
  std::optional<double> bench_min, bench_max;
  auto* bench_cmd = app.add_subcommand("bench", "run a benchmark scenario");
  bench_cmd->add_option("scenario", scenario, "users | locations | keywords | polloc | faces")
      ->required();
  bench_cmd->add_option("--preset", preset_name, "desk (default) or paper");
  bench_cmd->add_option("--seed", bench_seed, "workload seed");
  bench_cmd->add_option("--probes", bench_probes, "measured probes per data point");
  bench_cmd->add_option("--workers", bench_workers, "matching pool size (faces scenario)");
  bench_cmd->add_option("--min", bench_min, "sweep lower bound override");
  bench_cmd->add_option("--max", bench_max, "sweep upper bound override");
  bench_cmd->add_option("--out", bench_out, "CSV output file (default stdout)");

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "run the JSON-over-HTTP service");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "bind port");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    std::stringstream msg;
    const int code = app.exit(e, out, msg);
    err << msg.str();
    return code == 0 ? 0 : 1;
  }

  try {
    if (*policy_add) {
      Engine engine(resolve_config(config_path, data_dir));
      for (const LampiPolicy& p : policies_from_file(policy_file)) {
        engine.add_policy(p);
        out << "added pid=" << p.pid << "\n";
      }
      return 0;
    }
    if (*policy_rm) {
      Engine engine(resolve_config(config_path, data_dir));
      engine.remove_policy(rm_pid);
      out << "removed pid=" << rm_pid << "\n";
      return 0;
    }
    if (*policy_list) {
      Engine engine(resolve_config(config_path, data_dir));
      std::optional<UserId> owner;
      if (!list_owner.empty()) owner = list_owner;
      out << policies_to_json(engine.list_policies(owner)) << "\n";
      return 0;
    }
    if (*enroll) {
      Engine engine(resolve_config(config_path, data_dir));
      for (const FaceRecord& r : records_from_file(enroll_file)) {
        engine.enroll(r);
        out << "enrolled user=" << r.user << "\n";
      }
      return 0;
    }
    if (*check) {
      Engine engine(resolve_config(config_path, data_dir));
      PhotoManifest m = manifest_from_json(read_file(manifest_file));
      CheckOutcome outcome = engine.check(m);
      out << check_outcome_to_json(m.photo_id, outcome) << "\n";
      out << "retrieval: " << outcome.retrieval_ms << " ms\n";
      out << "matching:  " << outcome.matching_ms << " ms\n";
      return 0;
    }
    if (*taxonomy_load) {
      Engine engine(resolve_config(config_path, data_dir));
      auto pairs = taxonomy_pairs_from_json(read_file(taxonomy_file));
      engine.load_taxonomy(SemanticTaxonomy::from_pairs(pairs));
      out << "taxonomy loaded: " << pairs.size() << " keywords\n";
      return 0;
    }
    if (*bench_cmd) {
      if (preset_name != "desk" && preset_name != "paper") {
        throw LampError(Errc::parse_error, "--preset must be desk or paper");
      }
      bench::ScenarioOptions opts;
      opts.preset = preset_name == "paper" ? bench::Preset::paper : bench::Preset::desk;
      opts.seed = bench_seed;
      opts.probes = bench_probes;
      opts.workers = bench_workers;
      opts.min_x = bench_min;
      opts.max_x = bench_max;
      opts.progress = &err;
      std::ofstream csv_file;
      if (!bench_out.empty()) {
        csv_file.open(bench_out, std::ios::trunc);
        if (!csv_file) throw LampError(Errc::io_error, "cannot write " + bench_out);
        opts.csv = &csv_file;
      } else {
        opts.csv = &out;
      }
      bench::run_scenario(scenario, opts);
      return 0;
    }
    if (*serve) {
      Engine engine(resolve_config(config_path, data_dir));
      Service service(engine);
      err << "serving on " << host << ":" << port << "\n";
      service.run(host, port);
      return 0;
    }
  } catch (const LampError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace lamp::cli
