#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "tq/server.hpp"

namespace tq {
namespace {

class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    port_ = server_.bind_any_port();
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.http().wait_until_ready();
  }

  void TearDown() override {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  httplib::Client client() { return httplib::Client("127.0.0.1", port_); }

  json post(const std::string& path, const json& body, int expect) {
    auto res = client().Post(path, body.dump(), "application/json");
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << res->body;
    return json::parse(res->body);
  }

  json get(const std::string& path, int expect) {
    auto res = client().Get(path);
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << res->body;
    return json::parse(res->body);
  }

  ApiServer server_;
  int port_ = -1;
  std::thread thread_;
};

TEST_F(ServerTest, BarbetPresetGameEndsWithYes) {
  auto s = post("/api/sessions", {{"preset", "barbet"}}, 201);
  EXPECT_EQ(s["question"], "Is it x1?");
  EXPECT_EQ(s["question_number"], 1);
  EXPECT_NEAR(s["expected_questions"].get<double>(), 2.3, 1e-12);
  EXPECT_NEAR(s["entropy"].get<double>(), 1.9709505944546687, 1e-12);
  const std::string id = s["id"];
  EXPECT_EQ(id.size(), 32u);

  const std::string path = "/api/sessions/" + id + "/answers";
  for (int i = 0; i < 3; ++i) {
    s = post(path, {{"answer", "no"}}, 200);
    EXPECT_EQ(s["state"], "active");
    EXPECT_EQ(s["question_number"], i + 2);
  }
  s = post(path, {{"answer", "yes"}}, 200);
  EXPECT_EQ(s["state"], "won");
  EXPECT_EQ(s["won_object"], "x4");
  EXPECT_EQ(s["question_count"], 4);
  EXPECT_EQ(s["final_answer"], "yes");
  EXPECT_EQ(s["transcript"].size(), 4u);
  EXPECT_EQ(s["transcript"].back()["answer"], "yes");

  auto err = post(path, {{"answer", "yes"}}, 409);
  EXPECT_EQ(err["error"], "SessionFinished");

  EXPECT_EQ(get("/api/sessions/" + id, 200), s);
}

TEST_F(ServerTest, CustomDistributions) {
  auto s = post("/api/sessions", {{"labels", {"a"}}, {"probs", {1.0}}}, 201);
  EXPECT_EQ(s["question"], "Is it a?");
  s = post("/api/sessions/" + s["id"].get<std::string>() + "/answers", {{"answer", "yes"}}, 200);
  EXPECT_EQ(s["question_count"], 1);

  auto err = post("/api/sessions", {{"labels", {"a", "b"}}, {"probs", {0.7, 0.2}}}, 400);
  EXPECT_EQ(err["error"], "SumNotOne");
  err = post("/api/sessions", {{"probs", std::vector<double>(13, 1.0 / 13)}}, 422);
  EXPECT_EQ(err["error"], "LimitExceeded");
  post("/api/sessions", {{"preset", "nope"}}, 400);
  auto res = client().Post("/api/sessions", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
}

TEST_F(ServerTest, AnswerErrors) {
  post("/api/sessions/0123456789abcdef/answers", {{"answer", "yes"}}, 404);
  const std::string id = post("/api/sessions", {{"preset", "barbet"}}, 201)["id"];
  auto err = post("/api/sessions/" + id + "/answers", {{"answer", "maybe"}}, 400);
  EXPECT_EQ(err["error"], "MalformedAnswer");
  post("/api/sessions/" + id + "/answers", {{"reply", "yes"}}, 400);
  get("/api/sessions/ffff", 404);
}

TEST_F(ServerTest, InconsistentAnswer) {
  const std::string id = post("/api/sessions", {{"preset", "barbet"}}, 201)["id"];
  json s;
  for (int i = 0; i < 4; ++i) s = post("/api/sessions/" + id + "/answers", {{"answer", "no"}}, 200);
  EXPECT_EQ(s["state"], "inconsistent");
  EXPECT_FALSE(s.contains("final_answer"));
}

TEST_F(ServerTest, Analysis) {
  auto r = get("/api/analysis?dist=barbet", 200);
  EXPECT_NEAR(r["entropy"].get<double>(), 1.9709505944546687, 1e-12);
  EXPECT_DOUBLE_EQ(r["l_huffman"].get<double>(), 2.0);
  EXPECT_NEAR(r["l_yes"].get<double>(), 2.3, 1e-12);
  EXPECT_TRUE(r["all_hold"].get<bool>());
  for (auto& [name, holds] : r["bounds_hold"].items()) EXPECT_TRUE(holds.get<bool>()) << name;

  r = get("/api/analysis?dist=0.9,0.1", 200);
  EXPECT_NEAR(r["l_hat"].get<double>(), 1.1, 1e-12);

  r = get("/api/analysis?dist=" +
              httplib::detail::encode_url(R"({"labels":["a","b"],"probs":[0.5,0.5]})"),
          200);
  EXPECT_DOUBLE_EQ(r["l_yes"].get<double>(), 1.5);

  auto err = get("/api/analysis?dist=1.0", 400);
  EXPECT_EQ(err["error"], "TooFewObjects");
  get("/api/analysis?dist=0.5,abc", 400);
  get("/api/analysis", 400);
}

TEST_F(ServerTest, ReplayIsByteIdenticalModuloId) {
  auto run = [&] {
    json s = post("/api/sessions", {{"preset", "barbet"}}, 201);
    const std::string id = s["id"];
    for (const char* a : {"no", "yes"}) s = post("/api/sessions/" + id + "/answers", {{"answer", a}}, 200);
    s.erase("id");
    return s.dump();
  };
  EXPECT_EQ(run(), run());
}

TEST_F(ServerTest, ConcurrentAnswersAreSerialized) {
  const std::string id = post("/api/sessions", {{"preset", "barbet"}}, 201)["id"];
  const std::string path = "/api/sessions/" + id + "/answers";
  std::atomic<int> ok{0}, conflict{0};
  {
    std::vector<std::jthread> pool;
    for (int i = 0; i < 8; ++i)
      pool.emplace_back([&] {
        auto res = client().Post(path, R"({"answer":"yes"})", "application/json");
        if (!res) return;
        if (res->status == 200) ++ok;
        if (res->status == 409) ++conflict;
      });
  }
  EXPECT_EQ(ok.load(), 1);
  EXPECT_EQ(conflict.load(), 7);
  auto s = get("/api/sessions/" + id, 200);
  EXPECT_EQ(s["question_count"], 1);
  EXPECT_EQ(s["transcript"].size(), 1u);
}

TEST_F(ServerTest, CorsForLocalOriginsOnly) {
  httplib::Headers local{{"Origin", "http://localhost:5173"}};
  auto res = client().Get("/api/analysis?dist=barbet", local);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "http://localhost:5173");
  httplib::Headers remote{{"Origin", "https://evil.example"}};
  res = client().Get("/api/analysis?dist=barbet", remote);
  ASSERT_TRUE(res);
  EXPECT_FALSE(res->has_header("Access-Control-Allow-Origin"));
}

TEST(SessionStore, ExpiresIdleSessions) {
  auto now = SessionStore::Clock::now();
  SessionStore store(std::chrono::seconds(10), [&] { return now; });
  store.insert(start_session(barbet_distribution(), "aa"));
  auto b = store.insert(start_session(barbet_distribution(), "bb"));
  now += std::chrono::seconds(6);
  store.touch(*b);
  now += std::chrono::seconds(6);
  EXPECT_EQ(store.expire(), 1u);
  EXPECT_EQ(store.find("aa"), nullptr);
  EXPECT_NE(store.find("bb"), nullptr);
}

TEST(ServerConfig, TtlFromEnvironment) {
  ::setenv("TQ_SESSION_TTL_SECS", "42", 1);
  EXPECT_EQ(session_ttl_from_env(), std::chrono::seconds(42));
  ::unsetenv("TQ_SESSION_TTL_SECS");
  EXPECT_EQ(session_ttl_from_env(), std::chrono::hours(1));
}

}  // namespace
}  // namespace tq
