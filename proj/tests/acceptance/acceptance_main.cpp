// Acceptance suite: one PASS/FAIL line per criterion.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "driverl/dataset.hpp"
#include "driverl/environment.hpp"
#include "driverl/eval.hpp"
#include "driverl/maps.hpp"
#include "driverl/policy.hpp"
#include "driverl/reward.hpp"
#include "driverl/service.hpp"
#include "driverl/transport.hpp"
#include "driverl/vehicle.hpp"
#include "json.hpp"

using namespace driverl;
using nlohmann::json;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void check(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int g_failed = 0;

void criterion(const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(dt < limit_s, fmt("runtime over the %.0f s limit", limit_s));
  if (!o.ok) ++g_failed;
  std::printf("%s %s [%.2f s] %s\n", o.ok ? "PASS" : "FAIL", name.c_str(), dt, o.detail.c_str());
  std::fflush(stdout);
}

const char* kSmoothResponse =
    "new_mpc_params = {'qv': 10, 'qn': 20, 'qalpha': 7, 'qac': 0.01, 'qddelta': 0.1, 'v_max': 2.0, 'v_min': 1.0}";
const char* kReverseResponse = "new_mpc_params = {v_max: -1, v_min: -2}";
const char* kNormalResponse =
    "new_mpc_params = {'qv': 10, 'qn': 20, 'qalpha': 7, 'qac': 0.01, 'qddelta': 0.1, 'alat_max': 10, "
    "'a_min': -5, 'a_max': 5, 'v_min': 1, 'v_max': 5, 'track_safety_margin': 0.45}.";

Outcome reward_algebra() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> mag(-3.0, 3.0);
  std::uniform_real_distribution<double> scale_exp(-6.0, 6.0);
  int out_of_range = 0, scale_breaks = 0, monotone_breaks = 0;
  for (int i = 0; i < 10000; ++i) {
    const double e_mpc = std::pow(10.0, mag(rng));
    const double e_llm = std::pow(10.0, mag(rng));
    const double r = r_drive(e_mpc, e_llm);
    if (!(r >= -4.0 && r <= 1.0)) ++out_of_range;
    const double k = std::pow(2.0, std::round(scale_exp(rng) * 3.0));
    if (std::abs(r_drive(k * e_mpc, k * e_llm) - r) > 1e-12) ++scale_breaks;
    const double worse = e_llm * (1.0 + std::abs(mag(rng)));
    if (r_drive(e_mpc, worse) > r) ++monotone_breaks;
  }
  o.check(out_of_range == 0, std::to_string(out_of_range) + " values outside [-4, 1]");
  o.check(scale_breaks == 0, std::to_string(scale_breaks) + " scale-invariance breaks");
  o.check(monotone_breaks == 0, std::to_string(monotone_breaks) + " monotonicity breaks");
  o.check(r_drive(2.0, 12.0) == -4.0, "(2, 12) is not exactly -4");
  if (o.ok) o.detail = "10000 pairs in range, scale invariant, monotone; r(2, 12) = -4";
  return o;
}

Outcome aggregation() {
  Outcome o;
  const std::array<double, 4> a = {5.0, 93.2, 97.8, 38.0};
  const std::array<double, 4> b = {39.9, 90.2, 91.2, 31.8};
  const double ra = aggregate_improvement(a), rb = aggregate_improvement(b);
  o.check(std::abs(ra - 58.5) <= 0.1, fmt("first row gives %.3f", ra));
  o.check(std::abs(rb - 63.3) <= 0.1, fmt("second row gives %.3f", rb));
  o.detail = fmt("%.3f", ra) + " and " + fmt("%.3f", rb) + (o.ok ? "" : "; " + o.detail);
  return o;
}

Outcome parser_fixtures() {
  Outcome o;
  const auto a = extract_params(kSmoothResponse);
  const auto b = extract_params(kReverseResponse);
  const auto c = extract_params(kNormalResponse);
  o.check(a.ok && a.params == ParamMap{{"qv", 10}, {"qn", 20}, {"qalpha", 7}, {"qac", 0.01}, {"qddelta", 0.1},
                                       {"v_max", 2.0}, {"v_min", 1.0}},
          "seven-key dict: " + a.error);
  o.check(b.ok && b.params == ParamMap{{"v_max", -1}, {"v_min", -2}}, "reversing dict: " + b.error);
  o.check(c.ok && c.params == to_map(default_params()) && c.params.size() == 11, "default dict: " + c.error);
  if (o.ok) o.detail = "3 responses, 0 extraction failures, exact maps";
  return o;
}

Outcome closed_loop_identity() {
  Outcome o;
  Environment env;
  std::string detail;
  for (const auto& b : train_behaviors()) {
    const auto s = env.score_mpc_completion(kNormalResponse, b, kTrainMap);
    const bool zero = s.reward.r_drive && *s.reward.r_drive == 0.0;
    o.check(zero, b.metric_id() + " r_drive = " + (s.reward.r_drive ? std::to_string(*s.reward.r_drive) : "none"));
    detail += b.metric_id() + "=" + (s.reward.r_drive ? fmt("%g", *s.reward.r_drive) : "none") + " ";
  }
  o.detail = detail + (o.ok ? "" : "| " + o.detail);
  return o;
}

Outcome oracle_adaptation() {
  Outcome o;
  Environment env;
  const auto& track = env.track(kTrainMap);
  const BehaviorSpec reverse = train_behaviors()[2];
  const auto rs = env.score_mpc_completion(kReverseResponse, reverse, kTrainMap);
  const auto lap = env.lap(kTrainMap, validate_params(extract_params(kReverseResponse).params));
  double mean_v = 0.0;
  for (const auto& smp : lap->samples) mean_v += smp.state.v;
  mean_v /= static_cast<double>(lap->samples.size());
  const double rr = rs.reward.r_drive.value_or(-4.0);
  o.check(mean_v < 0.0, fmt("reversing mean v = %.3f", mean_v));
  o.check(rr >= 0.5, fmt("reversing r_drive = %.3f", rr));

  const BehaviorSpec velocity = train_behaviors()[1];
  const auto vp = oracle_params(velocity, track);
  const auto vs = env.score_mpc_completion(format_mpc_completion(vp, "clamp the speed"), velocity, kTrainMap);
  const double rv = vs.reward.r_drive.value_or(-4.0);
  o.check(rv >= 0.5, fmt("velocity r_drive = %.3f", rv));
  std::string d = fmt("reverse: mean v %.3f, ", mean_v) + fmt("E_R %.3f", *rs.e_llm) + fmt(" vs %.3f, ", rs.e_mpc) +
                  fmt("r_drive %.3f; ", rr) + fmt("velocity [%.2f, ", vp.v_min) + fmt("%.2f]: ", vp.v_max) +
                  fmt("E_V %.3f", vs.e_llm.value_or(NAN)) + fmt(" vs %.3f, ", vs.e_mpc) + fmt("r_drive %.3f", rv);
  o.detail = d + (o.ok ? "" : " | " + o.detail);
  return o;
}

Outcome decision_pipeline() {
  Outcome o;
  const auto data = generate_dataset(builtin_map(kTrainMap), default_styles(), 25, 7);
  std::size_t histories = 0;
  for (const auto& i : data) histories = std::max<std::size_t>(histories, static_cast<std::size_t>(i.history_id) + 1);
  o.check(histories == 200, std::to_string(histories) + " histories");
  o.check(data.size() == 1600, std::to_string(data.size()) + " pairs");
  auto oracle = make_decision_policy("oracle");
  auto yes = make_decision_policy("mock-yes");
  const auto ro = run_decision_eval(data, *oracle);
  const auto ry = run_decision_eval(data, *yes);
  o.check(ro.accuracy == 100.0, fmt("oracle accuracy %.3f%%", ro.accuracy));
  o.check(std::abs(ry.accuracy - ry.positive_rate) <= 0.1,
          fmt("constant yes %.3f%%", ry.accuracy) + fmt(" vs base rate %.3f%%", ry.positive_rate));
  o.detail = std::to_string(histories) + " histories, " + std::to_string(data.size()) + " pairs, oracle " +
             fmt("%.2f%%, ", ro.accuracy) + fmt("yes %.2f%% ", ry.accuracy) +
             fmt("(base rate %.2f%%)", ry.positive_rate) + (o.ok ? "" : " | " + o.detail);
  return o;
}

Outcome numerics() {
  Outcome o;
  const auto& tour = builtin_map(kEvalMap);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double s = u01(rng) * tour.total_length();
    const double wl = tour.width_left_at(s), wr = tour.width_right_at(s);
    FrenetPose p{s, -0.95 * wr + u01(rng) * 0.95 * (wl + wr), (u01(rng) - 0.5) * 1.0};
    const auto c = frenet_to_cartesian(tour, p, false);
    const auto back = frenet_project(tour, c.position, c.heading, false);
    double ds = std::remainder(back.s - p.s, tour.total_length());
    worst = std::max(worst, std::hypot(ds, back.n - p.n));
  }
  o.check(worst < 1e-3, fmt("Frenet round trip error %.3g m", worst));

  const auto& circle = builtin_map(kTrainMap);
  double worst_k = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double k = circle.curvature(u01(rng) * circle.total_length());
    worst_k = std::max(worst_k, std::abs(k - 1.0 / 8.0) / (1.0 / 8.0));
  }
  o.check(worst_k < 0.01, fmt("circle curvature off by %.3g", worst_k));

  auto rollout = [&](double dt) {
    VehicleState x{0.0, -0.5, 0.05, 0.1, 2.0};
    const int n = static_cast<int>(std::lround(5.0 / dt));
    for (int i = 0; i < n; ++i) x = step_dynamics(x, {0.01, 0.2}, circle, dt);
    return x;
  };
  const VehicleState a = rollout(0.02), b = rollout(0.01);
  const double drift = std::max({std::abs(std::remainder(a.s - b.s, circle.total_length())), std::abs(a.n - b.n),
                                 std::abs(a.dphi - b.dphi), std::abs(a.delta - b.delta), std::abs(a.v - b.v)});
  o.check(drift < 1e-3, fmt("dt-halving drift %.3g", drift));
  o.detail = fmt("round trip max %.2e m, ", worst) + fmt("curvature rel. err %.2e, ", worst_k) +
             fmt("drift %.2e", drift) + (o.ok ? "" : " | " + o.detail);
  return o;
}

// Mock policy for the protocol cycle: a handful of fixed completions.
std::vector<std::string> mock_group(std::mt19937_64& rng, TaskFamily family) {
  const std::vector<std::string> mpc = {
      format_mpc_completion(default_params(), "defaults"), kReverseResponse, kNormalResponse,
      "<reasoning>no idea</reasoning>", "new_mpc_params = {'qv': -1}"};
  const std::vector<std::string> dec = {format_decision_completion(true, "yes"),
                                        format_decision_completion(false, "no"), "maybe"};
  const auto& pool = family == TaskFamily::mpc ? mpc : dec;
  std::vector<std::string> group(1 + rng() % 4);
  for (auto& g : group) g = pool[rng() % pool.size()];
  return group;
}

Outcome protocol() {
  Outcome o;
  ServiceConfig cfg;
  cfg.decision_per_style = 1;
  RolloutService service(cfg);
  SocketServer server(service);
  const auto path =
      (std::filesystem::temp_directory_path() / ("driverl_accept_" + std::to_string(::getpid()) + ".sock")).string();
  server.start(path);
  SocketClient client(path);
  std::mt19937_64 rng(5);
  int cycles = 0, dropped = 0, misordered = 0, length_mismatch = 0, replay_mismatch = 0, errors = 0;
  constexpr int kBatch = 20;
  for (int batch = 0; batch < 1000 / kBatch; ++batch) {
    std::vector<TaskFamily> fam(kBatch);
    std::string req;
    for (int i = 0; i < kBatch; ++i) {
      fam[i] = rng() % 4 == 0 ? TaskFamily::decision : TaskFamily::mpc;
      req += json{{"op", "task"}, {"family", to_string(fam[i])}, {"seed", rng() % 1000000}}.dump() + "\n";
    }
    client.send_raw(req);
    std::vector<std::string> ids;
    for (int i = 0; i < kBatch; ++i) {
      const auto j = json::parse(client.read_line(), nullptr, false);
      if (j.is_discarded() || !j.contains("task_id")) {
        ++dropped;
        ids.emplace_back();
        continue;
      }
      if (j["family"] != to_string(fam[i])) ++misordered;
      ids.push_back(j["task_id"]);
    }
    std::vector<std::vector<std::string>> groups;
    std::string scores;
    for (int i = 0; i < kBatch; ++i) {
      groups.push_back(mock_group(rng, fam[i]));
      scores += json{{"op", "score"}, {"task_id", ids[i]}, {"completions", groups[i]}}.dump() + "\n";
    }
    client.send_raw(scores);
    std::vector<std::string> first(kBatch);
    for (int i = 0; i < kBatch; ++i) {
      first[i] = client.read_line();
      const auto j = json::parse(first[i], nullptr, false);
      if (j.is_discarded() || !j.contains("rewards")) {
        ++errors;
        continue;
      }
      if (j["rewards"].size() != groups[i].size()) ++length_mismatch;
      if (fam[i] == TaskFamily::mpc && j["e_llm_per_completion"].size() != groups[i].size()) ++length_mismatch;
    }
    client.send_raw(scores);
    for (int i = 0; i < kBatch; ++i) {
      if (client.read_line() != first[i]) ++replay_mismatch;
    }
    cycles += kBatch;
  }
  server.stop();
  o.check(cycles == 1000, std::to_string(cycles) + " cycles");
  o.check(dropped == 0 && errors == 0, std::to_string(dropped) + " dropped, " + std::to_string(errors) + " errors");
  o.check(misordered == 0, std::to_string(misordered) + " out of order");
  o.check(length_mismatch == 0, std::to_string(length_mismatch) + " length mismatches");
  o.check(replay_mismatch == 0, std::to_string(replay_mismatch) + " replay mismatches");
  o.detail = std::to_string(cycles) + " cycles, " + std::to_string(service.task_count()) + " tasks, " +
             std::to_string(service.environment().laps_simulated()) + " laps simulated" +
             (o.ok ? "" : " | " + o.detail);
  return o;
}

}  // namespace

int main() {
  criterion("reward-algebra", 1.0, reward_algebra);
  criterion("aggregation", 1.0, aggregation);
  criterion("parser-fixtures", 1.0, parser_fixtures);
  criterion("closed-loop-identity", 120.0, closed_loop_identity);
  criterion("oracle-adaptation", 300.0, oracle_adaptation);
  criterion("decision-pipeline", 180.0, decision_pipeline);
  criterion("geometry-numerics", 10.0, numerics);
  criterion("protocol-conformance", 60.0, protocol);
  std::printf("%d of 8 criteria passed\n", 8 - g_failed);
  return g_failed == 0 ? 0 : 1;
}
