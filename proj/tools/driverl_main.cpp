// driverl: command line front end for the simulator, service and evaluation pipelines.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "driverl/dataset.hpp"
#include "driverl/error.hpp"
#include "driverl/eval.hpp"
#include "driverl/maps.hpp"
#include "driverl/policy.hpp"
#include "driverl/prompts.hpp"
#include "driverl/rag.hpp"
#include "driverl/transport.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace driverl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitPolicy = 3;

struct Common {
  std::uint64_t seed = 0;
  std::string map;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, const std::string& map_default, const std::string& out_default) {
  c.map = map_default;
  c.out = out_default;
  cmd->add_option("--seed", c.seed, "random seed")->capture_default_str();
  cmd->add_option("--map", c.map, "map id, alias or track CSV")->capture_default_str();
  cmd->add_option("--out", c.out, "output path ('-' for stdout)")->capture_default_str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path);
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Map id for the environment: built-in ids stay, CSV paths get registered.
std::string environment_map(Environment& env, const std::string& map) {
  if (!canonical_map_id(map).empty()) return canonical_map_id(map);
  env.register_track(map, resolve_map(map));
  return map;
}

ParamMap parse_params_arg(const std::string& arg) {
  if (arg.empty() || arg == "default") return {};
  std::string text = fs::exists(arg) ? read_file(arg) : arg;
  const auto j = nlohmann::json::parse(text, nullptr, false);
  ParamMap out;
  if (!j.is_discarded()) {
    if (!j.is_object()) throw ValidationError("--params JSON must be an object");
    for (const auto& [k, v] : j.items()) {
      if (!v.is_number()) throw InvalidParameterError("parameter '" + k + "' is not a number");
      out[k] = v.get<double>();
    }
    return out;
  }
  if (text.find("new_mpc_params") == std::string::npos) text = "new_mpc_params = " + text;
  const auto ex = extract_params(text);
  if (!ex.ok) throw ValidationError("cannot parse --params: " + ex.error);
  return ex.params;
}

volatile std::sig_atomic_t g_stop = 0;

int cmd_serve(const Common& c, const std::string& host, int port, const std::string& socket_path, int per_style) {
  ServiceConfig cfg;
  cfg.decision_per_style = per_style;
  cfg.dataset_seed = c.seed;
  auto env = std::make_shared<Environment>();
  cfg.mpc_map = environment_map(*env, c.map);
  RolloutService service(cfg, env);
  HttpServer http(service);
  const int bound = http.start(host, port);
  std::cerr << "driverl: HTTP on " << host << ":" << bound << "\n";
  SocketServer sock(service);
  if (!socket_path.empty()) {
    sock.start(socket_path);
    std::cerr << "driverl: socket at " << socket_path << "\n";
  }
  std::signal(SIGINT, [](int) { g_stop = 1; });
  std::signal(SIGTERM, [](int) { g_stop = 1; });
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  sock.stop();
  http.stop();
  return kExitOk;
}

int cmd_gen_dataset(const Common& c, int per_style) {
  const TrackGeometry track = resolve_map(c.map);
  const auto data = generate_dataset(track, default_styles(), per_style, c.seed);
  write_output(c.out, serialize_dataset(data));
  std::size_t positives = 0;
  for (const auto& d : data) positives += d.label;
  std::cerr << "driverl: " << data.size() / decision_questions().size() << " histories, " << data.size()
            << " pairs, " << positives << " positive\n";
  return kExitOk;
}

int cmd_eval_control(const Common& c, const std::string& policy_name, int runs, const std::string& table_out) {
  Environment env;
  const std::string map = environment_map(env, c.map);
  auto policy = make_mpc_policy(policy_name, env.track(map));
  const auto report = run_control_eval(env, *policy, map, runs);
  write_output(c.out, to_json(report));
  write_output(table_out, to_table(report));
  return kExitOk;
}

int cmd_eval_decision(const Common& c, const std::string& policy_name, const std::string& dataset_path,
                      int per_style, const std::string& table_out) {
  std::vector<DecisionInstance> data;
  if (!dataset_path.empty()) {
    std::ifstream f(dataset_path);
    if (!f) throw ValidationError("cannot read " + dataset_path);
    data = read_dataset(f);
  } else {
    data = generate_dataset(resolve_map(c.map), default_styles(), per_style, c.seed);
  }
  auto policy = make_decision_policy(policy_name);
  const auto report = run_decision_eval(data, *policy);
  write_output(c.out, to_json(report));
  write_output(table_out, to_table(report));
  return kExitOk;
}

int cmd_lap(const Common& c, const std::string& params_arg, const std::string& metrics_out) {
  Environment env;
  const std::string map = environment_map(env, c.map);
  const MpcParams params = validate_params(parse_params_arg(params_arg));
  const auto trace = env.lap(map, params);
  write_output(c.out, serialize_trace(*trace));

  nlohmann::ordered_json m;
  m["map_id"] = map;
  const ParamMap pm = to_map(params);
  for (const auto& d : param_schema()) m["params"][d.name] = pm.at(d.name);
  m["terminated_by"] = to_string(trace->terminated_by);
  m["lap_time"] = trace->lap_time;
  m["samples"] = trace->samples.size();
  m["trace_ref"] = trace_digest(*trace);
  if (!trace->fault.empty()) m["fault"] = trace->fault;
  for (const auto& b : train_behaviors()) {
    nlohmann::ordered_json e;
    e["e_llm"] = metric_rmse(*trace, b);
    e["e_mpc"] = env.baseline_metric(map, b);
    e["r_drive"] = trace->terminated_by == Termination::crash ? kDriveFloor : r_drive(e["e_mpc"], e["e_llm"]);
    m["metrics"][b.metric_id()] = e;
  }
  write_output(metrics_out, m.dump(2) + "\n");
  return kExitOk;
}

int cmd_raceline(const Common& c, double alat_max, double v_cap) {
  TrackGeometry track = resolve_map(c.map);
  track.raceline.reset();
  const TrackGeometry with = generate_raceline(track, alat_max, v_cap);
  std::ostringstream out;
  write_raceline_csv(with, out);
  write_output(c.out, out.str());
  return kExitOk;
}

int cmd_export_assets(const std::string& dir) {
  const fs::path root(dir);
  for (const auto& id : builtin_map_ids()) {
    const auto& t = builtin_map(id);
    std::ostringstream track, race;
    write_track_csv(t, track);
    write_raceline_csv(t, race);
    write_output((root / "maps" / (id + ".csv")).string(), track.str());
    write_output((root / "maps" / (id + "_raceline.csv")).string(), race.str());
  }
  write_output((root / "rag" / "mpc_memories.txt").string(), std::string(mpc_memories_text()));
  write_output((root / "rag" / "decision_hints.txt").string(), std::string(decision_hints_text()));
  write_output((root / "behaviors.json").string(), behavior_sets_json());
  write_output((root / "param_schema.json").string(), param_schema_json());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driverl: closed-loop environment for language-driven MPC adaptation"};
  app.require_subcommand(1);

  Common serve_c, gen_c, ctrl_c, dec_c, lap_c, race_c, assets_c;

  auto* serve = app.add_subcommand("serve", "start the rollout service (HTTP and optional unix socket)");
  add_common(serve, serve_c, kTrainMap, "");
  std::string host = "127.0.0.1", socket_path;
  int port = -1, serve_per_style = 25;
  serve->add_option("--host", host, "HTTP bind address")->capture_default_str();
  serve->add_option("--port", port, "HTTP port (default: DRIVERL_PORT or 8080)");
  serve->add_option("--socket", socket_path, "unix stream socket path");
  serve->add_option("--per-style", serve_per_style, "decision windows per driving style")->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("gen-dataset", "generate the decision corpus (JSONL)");
  add_common(gen, gen_c, kTrainMap, "decision_dataset.jsonl");
  int per_style = 25;
  gen->add_option("--per-style", per_style, "windows per driving style")->check(CLI::PositiveNumber)->capture_default_str();

  auto* ctrl = app.add_subcommand("eval-control", "control adaptation evaluation over the eval behaviour set");
  add_common(ctrl, ctrl_c, kEvalMap, "control_report.json");
  std::string ctrl_policy = "mock-default", ctrl_table = "-";
  int runs = 5;
  ctrl->add_option("--policy", ctrl_policy, "mock-default | mock-garbage | oracle | http://host:port/path")
      ->capture_default_str();
  ctrl->add_option("--runs", runs, "phrasings per behaviour (1-5)")->check(CLI::Range(1, 5))->capture_default_str();
  ctrl->add_option("--table", ctrl_table, "text table output")->capture_default_str();

  auto* dec = app.add_subcommand("eval-decision", "decision accuracy over the corpus");
  add_common(dec, dec_c, kTrainMap, "decision_report.json");
  std::string dec_policy = "oracle", dataset_path, dec_table = "-";
  int dec_per_style = 25;
  dec->add_option("--policy", dec_policy, "mock-yes | mock-no | oracle | http://host:port/path")->capture_default_str();
  dec->add_option("--dataset", dataset_path, "corpus file (generated from --seed when omitted)");
  dec->add_option("--per-style", dec_per_style, "windows per style when generating")->check(CLI::PositiveNumber);
  dec->add_option("--table", dec_table, "text table output")->capture_default_str();

  auto* lap = app.add_subcommand("lap", "simulate one lap and report the behaviour metrics");
  add_common(lap, lap_c, kTrainMap, "trace.jsonl");
  std::string params_arg = "default", metrics_out = "-";
  lap->add_option("--params", params_arg, "'default', a JSON object, a dict or a file")->capture_default_str();
  lap->add_option("--metrics", metrics_out, "metrics output")->capture_default_str();

  auto* race = app.add_subcommand("raceline", "generate a raceline CSV for a map");
  add_common(race, race_c, kTrainMap, "raceline.csv");
  double alat_max = 10.0, v_cap = 5.0;
  race->add_option("--alat-max", alat_max, "lateral acceleration limit [m/s^2]")->capture_default_str();
  race->add_option("--v-cap", v_cap, "speed cap [m/s]")->capture_default_str();

  auto* assets = app.add_subcommand("export-assets", "write maps, memories, hints and behaviour sets");
  add_common(assets, assets_c, kTrainMap, "data");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitValidation;
  }

  try {
    if (*serve) return cmd_serve(serve_c, host, port >= 0 ? port : port_from_env(8080), socket_path, serve_per_style);
    if (*gen) return cmd_gen_dataset(gen_c, per_style);
    if (*ctrl) return cmd_eval_control(ctrl_c, ctrl_policy, runs, ctrl_table);
    if (*dec) return cmd_eval_decision(dec_c, dec_policy, dataset_path, dec_per_style, dec_table);
    if (*lap) return cmd_lap(lap_c, params_arg, metrics_out);
    if (*race) return cmd_raceline(race_c, alat_max, v_cap);
    if (*assets) return cmd_export_assets(assets_c.out);
  } catch (const PolicyError& e) {
    std::cerr << "driverl: policy error: " << e.what() << "\n";
    return kExitPolicy;
  } catch (const ProtocolError& e) {
    std::cerr << "driverl: protocol error: " << e.what() << "\n";
    return kExitPolicy;
  } catch (const ValidationError& e) {
    std::cerr << "driverl: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << "driverl: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "driverl: error: " << e.what() << "\n";
    return 1;
  }
  return kExitValidation;
}
