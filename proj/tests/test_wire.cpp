#include <atomic>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <catch2/catch_amalgamated.hpp>
#include <httplib.h>

#include "deepread/chat.hpp"
#include "deepread/eval.hpp"
#include "deepread/remote_ranker.hpp"
#include "deepread/tools.hpp"
#include "support/fixtures.hpp"
#include "support/wire_fixtures.hpp"

using namespace deepread;

namespace {

// In-process HTTP endpoint for wire-conformance tests.
class TestServer {
 public:
  TestServer() = default;
  ~TestServer() { stop(); }

  httplib::Server& server() { return server_; }

  std::string start() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return "http://127.0.0.1:" + std::to_string(port_);
  }

  void stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

ChatSettings fast_settings(const std::string& endpoint) {
  ChatSettings s;
  s.endpoint = endpoint;
  s.model = "test-model";
  s.backoff_ms = 1;
  s.timeout_seconds = 5;
  return s;
}

const std::vector<ChatMessage> kCanonicalHistory = {
    {"system", "You are a test assistant.", {}, {}}, {"user", "What is Delta?", {}, {}}};

}  // namespace

TEST_CASE("chat_complete round-trips the recorded request/response fixtures") {
  TestServer ts;
  std::string captured_body;
  ts.server().Post("/v1/chat/completions",
                   [&](const httplib::Request& req, httplib::Response& res) {
                     captured_body = req.body;
                     res.set_content(testsupport::kChatToolCallResponseFixture,
                                     "application/json");
                   });
  const auto base = ts.start();

  const auto settings = fast_settings(base + "/v1/chat/completions");
  const PolicyOutput out = chat_complete(kCanonicalHistory, tool_specs(), settings);

  // Request drift check: exact bytes against the recorded fixture.
  CHECK(captured_body == testsupport::kChatRequestFixture);

  // Response parsing: structured tool call and usage counters.
  REQUIRE(out.tool_call.has_value());
  CHECK(out.tool_call->id == "call_abc123");
  CHECK(out.tool_call->name == "ReadSection");
  const auto parsed = parse_action(out);
  REQUIRE(std::holds_alternative<Action>(parsed));
  CHECK(std::get<Action>(parsed) == Action{ReadSectionAction{1, 1, 0, 2}});
  CHECK(out.usage.input == 321);
  CHECK(out.usage.output == 21);
  CHECK_FALSE(out.usage.estimated);
}

TEST_CASE("chat_complete parses plain final answers") {
  TestServer ts;
  ts.server().Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(testsupport::kChatFinalResponseFixture, "application/json");
  });
  const auto base = ts.start();
  const PolicyOutput out =
      chat_complete(kCanonicalHistory, tool_specs(), fast_settings(base + "/v1/chat/completions"));
  CHECK_FALSE(out.tool_call.has_value());
  CHECK(out.content == "The answer is Delta.");
  CHECK(std::get<Action>(parse_action(out)) == Action{FinalAction{"The answer is Delta."}});
}

TEST_CASE("chat_complete estimates usage when the reply omits it") {
  TestServer ts;
  ts.server().Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(testsupport::kChatNoUsageResponseFixture, "application/json");
  });
  const auto base = ts.start();
  const PolicyOutput out =
      chat_complete(kCanonicalHistory, {}, fast_settings(base + "/v1/chat/completions"));
  CHECK(out.usage.estimated);
  CHECK(out.usage.input == count_tokens("You are a test assistant.") +
                               count_tokens("What is Delta?"));
  CHECK(out.usage.output == count_tokens("estimated reply"));
}

TEST_CASE("chat_complete retries transient failures then gives up") {
  TestServer ts;
  std::atomic<int> attempts{0};
  ts.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++attempts;
    res.status = 500;
    res.set_content("overloaded", "text/plain");
  });
  const auto base = ts.start();
  try {
    chat_complete(kCanonicalHistory, {}, fast_settings(base + "/v1/chat/completions"));
    FAIL("expected PolicyUnavailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PolicyUnavailable);
  }
  CHECK(attempts == 3);
}

TEST_CASE("chat_complete flags malformed bodies and hard rejections") {
  TestServer ts;
  ts.server().Post("/bad-json", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("this is not json", "text/plain");
  });
  ts.server().Post("/no-choices", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"object":"chat.completion"})", "application/json");
  });
  std::atomic<int> rejected_attempts{0};
  ts.server().Post("/reject", [&](const httplib::Request&, httplib::Response& res) {
    ++rejected_attempts;
    res.status = 400;
    res.set_content("bad request", "text/plain");
  });
  const auto base = ts.start();

  auto code_for = [&](const std::string& path) {
    try {
      chat_complete(kCanonicalHistory, {}, fast_settings(base + path));
    } catch (const Error& e) {
      return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::IoError;
  };
  CHECK(code_for("/bad-json") == ErrorCode::ProtocolError);
  CHECK(code_for("/no-choices") == ErrorCode::ProtocolError);
  CHECK(code_for("/reject") == ErrorCode::ProtocolError);
  CHECK(rejected_attempts == 1);  // 4xx is not retried
}

TEST_CASE("chat_complete reports unreachable endpoints as PolicyUnavailable") {
  auto settings = fast_settings("http://127.0.0.1:9/v1/chat/completions");
  settings.timeout_seconds = 1;
  try {
    chat_complete(kCanonicalHistory, {}, settings);
    FAIL("expected PolicyUnavailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PolicyUnavailable);
  }
}

TEST_CASE("judge substitutes inputs and parses boolean verdicts") {
  TestServer ts;
  std::string captured_body;
  std::string reply = " True \n";
  ts.server().Post("/judge", [&](const httplib::Request& req, httplib::Response& res) {
    captured_body = req.body;
    const nlohmann::json body = {
        {"choices", {{{"message", {{"role", "assistant"}, {"content", reply}}}}}},
        {"usage", {{"prompt_tokens", 100}, {"completion_tokens", 1}}}};
    res.set_content(body.dump(), "application/json");
  });
  const auto base = ts.start();

  JudgeSettings js;
  js.chat = fast_settings(base + "/judge");
  js.name = "fixture-judge";

  const Verdict v = judge("What is Delta?", "It is Delta.", "Delta", js);
  CHECK(v.correct);
  CHECK(v.judge == "fixture-judge");
  CHECK(v.raw == " True \n");

  // The request is a single user message carrying all three inputs, no tools.
  const auto body = nlohmann::json::parse(captured_body);
  REQUIRE(body.at("messages").size() == 1);
  CHECK(body["messages"][0]["role"] == "user");
  const std::string prompt = body["messages"][0]["content"].get<std::string>();
  CHECK(prompt.find("Query: What is Delta?") != std::string::npos);
  CHECK(prompt.find("AI-Generated Answer: It is Delta.") != std::string::npos);
  CHECK(prompt.find("Golden Answer: Delta") != std::string::npos);
  CHECK_FALSE(body.contains("tools"));
  CHECK(body.at("temperature").get<double>() == 0.0);

  reply = "  false\n";
  CHECK_FALSE(judge("q", "p", "g", js).correct);

  reply = "maybe";
  try {
    judge("q", "p", "g", js);
    FAIL("expected JudgeUnparseable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::JudgeUnparseable);
    CHECK(std::string(e.what()).find("maybe") != std::string::npos);
  }
}

TEST_CASE("judge transport failures surface as JudgeUnavailable") {
  JudgeSettings js;
  js.chat = fast_settings("http://127.0.0.1:9/judge");
  js.chat.timeout_seconds = 1;
  try {
    judge("q", "p", "g", js);
    FAIL("expected JudgeUnavailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::JudgeUnavailable);
  }
}

TEST_CASE("remote ranker round-trips scored coordinates") {
  const auto index = testsupport::tinydoc_index();
  TestServer ts;
  std::string captured_body;
  ts.server().Post("/rank", [&](const httplib::Request& req, httplib::Response& res) {
    captured_body = req.body;
    // Deliberately unsorted: the client must enforce the rank contract.
    res.set_content(
        R"({"hits":[{"doc_id":1,"sec_id":0,"para_idx":0,"score":0.25},)"
        R"({"doc_id":1,"sec_id":1,"para_idx":1,"score":0.9}]})",
        "application/json");
  });
  const auto base = ts.start();

  RemoteRanker ranker(index, base + "/rank");
  const auto hits = ranker.rank("delta neighborhood", 2);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].coordinate == Coordinate{1, 1, 1});
  CHECK(hits[0].score == 0.9);
  CHECK(hits[1].coordinate == Coordinate{1, 0, 0});

  const auto body = nlohmann::json::parse(captured_body);
  CHECK(body.at("query") == "delta neighborhood");
  CHECK(body.at("k") == 2);
  CHECK(body.at("candidates").size() == index.paragraph_count());
  CHECK(body["candidates"][0].contains("doc_id"));
  CHECK(body["candidates"][0].contains("text"));
}

TEST_CASE("remote ranker failures propagate and become error observations") {
  const auto index = testsupport::tinydoc_index();
  TestServer ts;
  ts.server().Post("/rank-fail", [](const httplib::Request&, httplib::Response& res) {
    res.status = 503;
  });
  ts.server().Post("/rank-bogus", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"hits":[{"doc_id":9,"sec_id":9,"para_idx":9,"score":1.0}]})",
                    "application/json");
  });
  const auto base = ts.start();

  RemoteRanker failing(index, base + "/rank-fail");
  try {
    failing.rank("delta", 2);
    FAIL("expected RemoteRankerUnavailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RemoteRankerUnavailable);
  }

  RemoteRanker bogus(index, base + "/rank-bogus");
  CHECK_THROWS_AS(bogus.rank("delta", 2), Error);

  // Through the tools layer the failure is an observation, not an exception.
  const Observation obs = retrieve(index, failing, "delta", 2, {0, 0});
  CHECK(obs.error);
  CHECK(obs.message.find("remote ranker") != std::string::npos);
}

TEST_CASE("make_ranker selects the configured implementation") {
  const auto index = testsupport::tinydoc_index();
  RankerConfig lexical;
  CHECK(dynamic_cast<LexicalRanker*>(make_ranker(index, lexical).get()) != nullptr);

  RankerConfig remote;
  remote.kind = RankerKind::Remote;
  remote.endpoint = "http://127.0.0.1:9/rank";
  CHECK(dynamic_cast<RemoteRanker*>(make_ranker(index, remote).get()) != nullptr);

  RankerConfig broken;
  broken.kind = RankerKind::Remote;
  CHECK_THROWS_AS(make_ranker(index, broken), Error);
}

TEST_CASE("remote policy drives a full session over the wire") {
  const auto index = testsupport::tinydoc_index();
  TestServer ts;
  std::atomic<int> turn{0};
  ts.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    const int t = ++turn;
    nlohmann::json message;
    if (t == 1) {
      message = {{"role", "assistant"},
                 {"content", nullptr},
                 {"tool_calls",
                  {{{"id", "call_1"},
                    {"type", "function"},
                    {"function",
                     {{"name", "Retrieve"}, {"arguments", R"({"query":"Delta"})"}}}}}}};
    } else {
      message = {{"role", "assistant"}, {"content", "Delta."}};
    }
    const nlohmann::json body = {{"choices", {{{"message", message}}}},
                                 {"usage", {{"prompt_tokens", 10}, {"completion_tokens", 5}}}};
    res.set_content(body.dump(), "application/json");
  });
  const auto base = ts.start();

  AgentConfig config;
  config.policy = fast_settings(base + "/v1/chat/completions");
  RemotePolicy policy(config.policy);
  const Trajectory traj = run_session("Where is Delta?", index, policy, config);

  CHECK(traj.termination == Termination::Final);
  CHECK(traj.final_answer == "Delta.");
  REQUIRE(traj.rounds.size() == 2);
  REQUIRE(traj.rounds[0].observation);
  CHECK(traj.rounds[0].observation->payload == testsupport::kRetrieveDeltaGolden);
  CHECK(traj.rounds[0].tokens_in == 10);
  CHECK(traj.rounds[0].wall_ms > 0.0);  // live sessions record real timings
}
