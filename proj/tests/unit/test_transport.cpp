#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <thread>

#include "driverl/error.hpp"
#include "driverl/policy.hpp"
#include "driverl/transport.hpp"
#include "json.hpp"

using namespace driverl;
using nlohmann::json;

namespace {

ServiceConfig small_config() {
  ServiceConfig c;
  c.decision_per_style = 1;
  return c;
}

std::string socket_path(const char* tag) {
  return (std::filesystem::temp_directory_path() / ("driverl_" + std::string(tag) + "_" +
                                                    std::to_string(::getpid()) + ".sock"))
      .string();
}

}  // namespace

TEST(Http, TaskScoreAndErrors) {
  RolloutService svc(small_config());
  HttpServer server(svc);
  const int port = server.start("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  const std::string base = "http://127.0.0.1:" + std::to_string(port);

  const auto t = http_post(base, "/task", R"({"family": "mpc", "seed": 1})");
  ASSERT_EQ(t.status, 200) << t.body;
  const std::string id = json::parse(t.body)["task_id"];
  const json req = {{"task_id", id}, {"completions", {"nothing useful"}}};
  const auto s1 = http_post(base, "/score", req.dump());
  const auto s2 = http_post(base, "/score", req.dump());
  EXPECT_EQ(s1.status, 200);
  EXPECT_EQ(s1.body, s2.body);

  EXPECT_EQ(http_post(base, "/score", R"({"task_id": "task-00000999", "completions": ["x"]})").status, 404);
  EXPECT_EQ(http_post(base, "/task", "not json").status, 400);
  const auto missing = http_post(base, "/nowhere", "{}");
  EXPECT_EQ(missing.status, 404);
  EXPECT_TRUE(json::parse(missing.body).contains("error"));
  server.stop();
  EXPECT_THROW(http_post(base, "/task", "{}", 2), PolicyError);
}

TEST(Http, PolicyRoundTrip) {
  RolloutService svc(small_config());
  HttpServer server(svc);
  const int port = server.start();
  // The service is not a policy endpoint, so the reply has no completion.
  auto policy = make_decision_policy("http://127.0.0.1:" + std::to_string(port) + "/task");
  EXPECT_THROW(policy->complete("hello"), PolicyError);
  server.stop();
}

TEST(Socket, OrderedResponsesOnOneConnection) {
  RolloutService svc(small_config());
  SocketServer server(svc);
  const auto path = socket_path("order");
  server.start(path);
  SocketClient client(path);
  std::vector<std::string> ids;
  for (int i = 0; i < 20; ++i) {
    client.send_raw(json{{"op", "task"}, {"family", "mpc"}, {"seed", i}}.dump() + "\n");
  }
  for (int i = 0; i < 20; ++i) {
    const auto j = json::parse(client.read_line());
    ids.push_back(j["task_id"]);
  }
  for (int i = 0; i < 20; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "task-%08d", i + 1);
    EXPECT_EQ(ids[i], buf);
  }
  EXPECT_EQ(json::parse(client.request("garbage"))["error"]["code"], "bad_request");
  EXPECT_EQ(json::parse(client.request(R"({"op": "nap"})"))["error"]["code"], "unknown_op");
  server.stop();
  EXPECT_FALSE(std::filesystem::exists(path));
}

TEST(Socket, ManyClients) {
  RolloutService svc(small_config());
  SocketServer server(svc);
  const auto path = socket_path("many");
  server.start(path);
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int c = 0; c < 4; ++c) {
    threads.emplace_back([&] {
      SocketClient client(path);
      for (int i = 0; i < 10; ++i) {
        const auto j = json::parse(client.request(R"({"op": "task", "family": "mpc"})"));
        if (j.contains("task_id")) ++ok;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok.load(), 40);
  EXPECT_EQ(svc.task_count(), 40u);
  server.stop();
  EXPECT_THROW(SocketClient{path}, PolicyError);
}

TEST(Env, PortFromEnvironment) {
  ::unsetenv("DRIVERL_PORT");
  EXPECT_EQ(port_from_env(1234), 1234);
  ::setenv("DRIVERL_PORT", "9100", 1);
  EXPECT_EQ(port_from_env(), 9100);
  ::setenv("DRIVERL_PORT", "abc", 1);
  EXPECT_THROW(port_from_env(), ValidationError);
  ::unsetenv("DRIVERL_PORT");
}
