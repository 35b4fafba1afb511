#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "deepread/agent.hpp"
#include "support/fixtures.hpp"

using namespace deepread;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "deepread-test-agent";
  std::filesystem::create_directories(dir);
  return dir / name;
}

AgentConfig scripted_config() {
  AgentConfig config;  // paper defaults: T=50, k=2, window (0,0), temperature 0
  return config;
}

// Feeds pre-built raw outputs to the session, recording the history it sees.
class RawPolicy : public Policy {
 public:
  explicit RawPolicy(std::vector<PolicyOutput> outputs) : outputs_(std::move(outputs)) {}

  PolicyOutput next_action(const std::vector<ChatMessage>& history,
                           const std::vector<ToolSpec>& tools) override {
    REQUIRE(tools.size() == 2);
    // Monotonicity: the new history must extend the previous one unchanged.
    REQUIRE(history.size() >= last_history_.size());
    for (std::size_t i = 0; i < last_history_.size(); ++i)
      REQUIRE(history[i] == last_history_[i]);
    last_history_ = history;
    REQUIRE(next_ < outputs_.size());
    return outputs_[next_++];
  }

  bool deterministic() const override { return true; }

  const std::vector<ChatMessage>& seen() const { return last_history_; }

 private:
  std::vector<PolicyOutput> outputs_;
  std::vector<ChatMessage> last_history_;
  std::size_t next_ = 0;
};

}  // namespace

TEST_CASE("build_system_prompt splices the TOC into the guideline template") {
  const auto index = testsupport::tinydoc_index();
  const std::string prompt = build_system_prompt(index);
  CHECK(prompt.find("- (1) [0] Intro | paragraphs=2 | tokens=2 | children=[1]") !=
        std::string::npos);
  CHECK(prompt.find("## Directory Structure") != std::string::npos);
  CHECK(prompt.find("DO NOT write tool invocations in plain text") != std::string::npos);
  CHECK(prompt.find(kTocPlaceholder) == std::string::npos);
}

TEST_CASE("build_system_prompt rejects unusable template overrides") {
  const auto index = testsupport::tinydoc_index();
  CHECK_THROWS_AS(build_system_prompt(index, std::optional<std::string>{""}), Error);
  CHECK_THROWS_AS(build_system_prompt(index, std::optional<std::string>{"  \n \t"}), Error);
  CHECK_THROWS_AS(build_system_prompt(index, std::optional<std::string>{"no placeholder"}), Error);
  try {
    build_system_prompt(index, std::optional<std::string>{""});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingTemplate);
  }
  const std::string prompt =
      build_system_prompt(index, std::optional<std::string>{"TOC:\n{{DIRECTORY_STRUCTURE}}"});
  CHECK(prompt.find("- (1) [2] Conclusion") != std::string::npos);
}

TEST_CASE("build_system_prompt groups multi-document TOCs in build order") {
  auto a = parse_document(testsupport::tinydoc_source(2));
  auto b = parse_document({1, "other", "# Solo\nOnly."});
  const auto index = build_index({a, b});
  const std::string prompt = build_system_prompt(index);
  CHECK(prompt.find("- (2) [0] Intro") < prompt.find("- (1) [0] Solo"));
}

TEST_CASE("parse_action maps structured calls and plain text") {
  PolicyOutput read_call;
  read_call.tool_call = ToolCallRequest{
      "c1", "ReadSection", R"({"doc_id":1,"sec_id":1,"start":0,"end":2})"};
  const auto parsed = parse_action(read_call);
  REQUIRE(std::holds_alternative<Action>(parsed));
  CHECK(std::get<Action>(parsed) == Action{ReadSectionAction{1, 1, 0, 2}});

  PolicyOutput final_text;
  final_text.content = "The answer is Delta.";
  const auto final_parsed = parse_action(final_text);
  REQUIRE(std::holds_alternative<Action>(final_parsed));
  CHECK(std::get<Action>(final_parsed) == Action{FinalAction{"The answer is Delta."}});

  PolicyOutput retrieve_call;
  retrieve_call.tool_call = ToolCallRequest{"c2", "Retrieve", R"({"query":"Delta"})"};
  CHECK(std::get<Action>(parse_action(retrieve_call)) == Action{RetrieveAction{"Delta"}});
}

TEST_CASE("parse_action failures carry readable reasons") {
  auto failure_of = [](const char* name, const char* args) {
    PolicyOutput out;
    out.tool_call = ToolCallRequest{"c", name, args};
    const auto parsed = parse_action(out);
    REQUIRE(std::holds_alternative<ParseFailure>(parsed));
    return std::get<ParseFailure>(parsed).reason;
  };
  CHECK(failure_of("ReadSection", R"({"doc_id":1,"sec_id":1,"start":0})") == "missing field end");
  CHECK(failure_of("ReadSection", R"({"doc_id":1,"sec_id":1,"start":"a","end":2})") ==
        "field start must be an integer");
  CHECK(failure_of("Retrieve", R"({})") == "missing field query");
  CHECK(failure_of("Retrieve", R"({"query":7})") == "field query must be a string");
  CHECK(failure_of("Search", R"({"query":"x"})") == "unknown tool: Search");
  CHECK(failure_of("Retrieve", "{not json") == "tool call arguments are not valid JSON");

  // Integral floats are tolerated.
  PolicyOutput lenient;
  lenient.tool_call =
      ToolCallRequest{"c", "ReadSection", R"({"doc_id":1.0,"sec_id":1,"start":0,"end":2})"};
  CHECK(std::get<Action>(parse_action(lenient)) == Action{ReadSectionAction{1, 1, 0, 2}});
}

TEST_CASE("run_session executes the canonical scripted session") {
  const auto index = testsupport::tinydoc_index();
  ScriptedPolicy policy({Action{RetrieveAction{"Delta"}}, Action{ReadSectionAction{1, 1, 0, 2}},
                         Action{FinalAction{"Delta"}}});
  const Trajectory traj = run_session("Where is Delta?", index, policy, scripted_config());

  CHECK(traj.termination == Termination::Final);
  CHECK(traj.final_answer == "Delta");
  REQUIRE(traj.rounds.size() == 3);
  CHECK(traj.tool_call_count() == 2);

  REQUIRE(traj.rounds[0].observation);
  CHECK(traj.rounds[0].observation->payload == testsupport::kRetrieveDeltaGolden);
  REQUIRE(traj.rounds[1].observation);
  CHECK(traj.rounds[1].observation->payload == testsupport::kReadDetailsGolden);
  CHECK_FALSE(traj.rounds[2].observation);  // FINAL rounds carry no observation
  CHECK(traj.rounds[0].usage_estimated);
  CHECK(traj.rounds[0].wall_ms == 0.0);  // deterministic policies zero the clock
}

TEST_CASE("run_session with an immediate final answer") {
  const auto index = testsupport::tinydoc_index();
  ScriptedPolicy policy({Action{FinalAction{"x"}}});
  const Trajectory traj = run_session("q", index, policy, scripted_config());
  CHECK(traj.rounds.size() == 1);
  CHECK(traj.tool_call_count() == 0);
  CHECK(traj.termination == Termination::Final);
}

TEST_CASE("run_session stops at the round limit") {
  const auto index = testsupport::tinydoc_index();
  std::vector<Action> script;
  for (int i = 0; i < 60; ++i) script.push_back(Action{RetrieveAction{"delta"}});
  ScriptedPolicy policy(script);
  const Trajectory traj = run_session("q", index, policy, scripted_config());
  CHECK(traj.rounds.size() == 50);
  CHECK(traj.termination == Termination::RoundLimit);
  CHECK(traj.tool_call_count() == 50);
}

TEST_CASE("run_session enforces ablation modes with error observations") {
  const auto index = testsupport::tinydoc_index();

  AgentConfig retrieve_only = scripted_config();
  retrieve_only.mode = AgentMode::RetrieveOnly;
  ScriptedPolicy p1({Action{ReadSectionAction{1, 1, 0, 2}}, Action{FinalAction{"done"}}});
  const Trajectory t1 = run_session("q", index, p1, retrieve_only);
  REQUIRE(t1.rounds.size() == 2);
  REQUIRE(t1.rounds[0].observation);
  CHECK(t1.rounds[0].observation->error);
  CHECK(t1.rounds[0].observation->message == "ReadSection is disabled in retrieve_only mode");

  AgentConfig read_only = scripted_config();
  read_only.mode = AgentMode::ReadOnly;
  ScriptedPolicy p2({Action{RetrieveAction{"Delta"}}, Action{FinalAction{"done"}}});
  const Trajectory t2 = run_session("q", index, p2, read_only);
  REQUIRE(t2.rounds.size() == 2);
  REQUIRE(t2.rounds[0].observation);
  CHECK(t2.rounds[0].observation->error);
  CHECK(t2.rounds[0].observation->message == "Retrieve is disabled in read_only mode");
}

TEST_CASE("run_session feeds parse failures back and keeps going") {
  const auto index = testsupport::tinydoc_index();
  PolicyOutput malformed;
  malformed.tool_call = ToolCallRequest{"c1", "ReadSection", R"({"doc_id":1})"};
  PolicyOutput unknown;
  unknown.tool_call = ToolCallRequest{"c2", "Search", R"({"query":"x"})"};
  PolicyOutput final_out;
  final_out.content = "giving up";
  RawPolicy policy({malformed, unknown, final_out});

  const Trajectory traj = run_session("q", index, policy, scripted_config());
  REQUIRE(traj.rounds.size() == 3);
  CHECK_FALSE(traj.rounds[0].action);
  CHECK(traj.rounds[0].parse_error == "missing field sec_id");
  REQUIRE(traj.rounds[0].observation);
  CHECK(traj.rounds[0].observation->error);
  CHECK(traj.rounds[0].observation->message.find("structured tool call interface") !=
        std::string::npos);
  CHECK(traj.rounds[1].parse_error == "unknown tool: Search");
  CHECK(traj.termination == Termination::Final);
  CHECK(traj.final_answer == "giving up");
  // The parse-failure feedback reached the policy as a tool message.
  bool saw_feedback = false;
  for (const auto& m : policy.seen())
    if (m.role == "tool" && m.content.find("invalid tool call") != std::string::npos)
      saw_feedback = true;
  CHECK(saw_feedback);
}

TEST_CASE("run_session reports an exhausted or dead policy") {
  const auto index = testsupport::tinydoc_index();
  ScriptedPolicy policy({Action{RetrieveAction{"Delta"}}});  // exhausts after one round
  const Trajectory traj = run_session("q", index, policy, scripted_config());
  CHECK(traj.termination == Termination::PolicyUnavailable);
  CHECK(traj.rounds.size() == 1);
  CHECK_FALSE(traj.error.empty());
}

TEST_CASE("config defaults match the documented operating point") {
  const AgentConfig config;
  CHECK(config.max_rounds == 50);
  CHECK(config.ranker.k == 2);
  CHECK(config.policy.temperature == 0.0);
  CHECK(config.window == ScanWindow{0, 0});
  CHECK(kExpandWindow == ScanWindow{1, 1});
}

TEST_CASE("trajectory files round-trip exactly") {
  const auto index = testsupport::tinydoc_index();
  ScriptedPolicy policy({Action{RetrieveAction{"Delta"}}, Action{ReadSectionAction{1, 1, 0, 2}},
                         Action{FinalAction{"Delta"}}});
  const Trajectory traj = run_session("Where is Delta?", index, policy, scripted_config());

  const auto path = temp_file("session.traj.jsonl");
  save_trajectory(traj, path);
  const Trajectory loaded = load_trajectory(path);
  CHECK(loaded == traj);

  // Byte-identical files on identical reruns.
  ScriptedPolicy again({Action{RetrieveAction{"Delta"}}, Action{ReadSectionAction{1, 1, 0, 2}},
                        Action{FinalAction{"Delta"}}});
  const Trajectory traj2 = run_session("Where is Delta?", index, again, scripted_config());
  const auto path2 = temp_file("session2.traj.jsonl");
  save_trajectory(traj2, path2);
  std::ifstream f1(path), f2(path2);
  const std::string bytes1((std::istreambuf_iterator<char>(f1)), {});
  const std::string bytes2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(bytes1 == bytes2);
}

TEST_CASE("load_trajectory rejects truncated and foreign files") {
  const auto index = testsupport::tinydoc_index();
  ScriptedPolicy policy({Action{FinalAction{"x"}}});
  const Trajectory traj = run_session("q", index, policy, scripted_config());
  const auto path = temp_file("good.traj.jsonl");
  save_trajectory(traj, path);

  // Truncate: drop the footer line.
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  in.close();
  const auto truncated = temp_file("truncated.traj.jsonl");
  {
    std::ofstream out(truncated);
    for (std::size_t i = 0; i + 1 < lines.size(); ++i) out << lines[i] << '\n';
  }
  CHECK_THROWS_AS(load_trajectory(truncated), Error);

  const auto foreign = temp_file("foreign.traj.jsonl");
  {
    std::ofstream out(foreign);
    out << R"({"type":"header","format":"deepread-trajectory","version":99,"question":"q",)"
        << R"("config":{}})" << '\n';
  }
  try {
    load_trajectory(foreign);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IncompatibleTrajectory);
  }
}

TEST_CASE("replay reproduces fresh trajectories and detects index drift") {
  const auto index = testsupport::tinydoc_index();
  ScriptedPolicy policy({Action{RetrieveAction{"Delta"}}, Action{ReadSectionAction{1, 1, 0, 2}},
                         Action{FinalAction{"Delta"}}});
  const Trajectory traj = run_session("q", index, policy, scripted_config());

  const ReplayReport clean = replay_trajectory(traj, index);
  CHECK(clean.tool_rounds == 2);
  CHECK(clean.clean());

  // Same structure, different paragraph text: observations must drift.
  auto altered_doc = parse_document(testsupport::tinydoc_source());
  altered_doc.paragraphs[1][1].text = "Möbius.";
  altered_doc.headings[1].n_tok = 3;
  const auto altered = build_index({altered_doc});
  const ReplayReport drifted = replay_trajectory(traj, altered);
  CHECK_FALSE(drifted.clean());
}

TEST_CASE("action json round-trip") {
  for (const Action& action :
       {Action{FinalAction{"answer"}}, Action{RetrieveAction{"query words"}},
        Action{ReadSectionAction{3, 4, 0, 9}}}) {
    CHECK(action_from_json(action_to_json(action)) == action);
  }
}
