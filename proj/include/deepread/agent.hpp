#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "deepread/action.hpp"
#include "deepread/chat.hpp"
#include "deepread/entities.hpp"
#include "deepread/error.hpp"
#include "deepread/index.hpp"
#include "deepread/remote_ranker.hpp"
#include "deepread/retrieval.hpp"
#include "deepread/tools.hpp"
#include "deepread/version.hpp"

namespace deepread {

enum class AgentMode { Full, RetrieveOnly, ReadOnly };

inline const char* agent_mode_name(AgentMode mode) {
  switch (mode) {
    case AgentMode::Full: return "full";
    case AgentMode::RetrieveOnly: return "retrieve_only";
    case AgentMode::ReadOnly: return "read_only";
  }
  return "full";
}

inline AgentMode agent_mode_from_name(const std::string& name) {
  if (name == "full") return AgentMode::Full;
  if (name == "retrieve_only") return AgentMode::RetrieveOnly;
  if (name == "read_only") return AgentMode::ReadOnly;
  throw Error(ErrorCode::ConfigError, "unknown mode: " + name +
                                          " (expected full, retrieve_only, or read_only)");
}

struct AgentConfig {
  int max_rounds = 50;
  RankerConfig ranker;     // k defaults to 2
  ScanWindow window{0, 0};  // --expand switches to kExpandWindow
  AgentMode mode = AgentMode::Full;
  ChatSettings policy;     // temperature defaults to 0
  std::optional<std::string> prompt_template;
};

// The placeholder the Directory Structure is spliced into.
inline constexpr const char* kTocPlaceholder = "{{DIRECTORY_STRUCTURE}}";

inline constexpr const char* kSystemPromptTemplate =
    "You are a documents assistant and will receive one or more documents structured as "
    "follows:\n"
    "- (doc_id) [node_id] Title | paragraphs=Num | tokens=Num | children=[ID list].\n"
    "Use this structure and your available tools to answer the user's question.\n"
    "\n"
    "## Guidelines\n"
    "- Use <Search/Retrieve> to locate relevant nodes based on the directory.\n"
    "- Answer strictly based on the provided corpus; do not fabricate.\n"
    "- The hierarchical structure of documents is represented in the Directory Structure. "
    "Parsing errors may cause body text to be mistakenly treated as hierarchical elements (or "
    "headings), rendering the heading text inaccessible to search and reading tools. Please "
    "make reasonable inferences based on the structure and the content returned by the tool.\n"
    "- Respond in the User's language; align queries with the Directory Structure.\n"
    "- Usually, you need to think step by step and then call tools to locate or read, "
    "iterating in this way until you can answer the question.\n"
    "- When calling tools, DO NOT write tool invocations in plain text. Use the structured "
    "tool call interface (tool_calls) only.\n"
    "\n"
    "## Directory Structure\n"
    "{{DIRECTORY_STRUCTURE}}\n";

/// Instantiates the system prompt: the guideline template with the Directory
/// Structure placeholder replaced by the serialized TOC. An override template
/// must be non-blank and contain the placeholder.
inline std::string build_system_prompt(const DocumentIndex& index,
                                       const std::optional<std::string>& template_override = {}) {
  std::string tmpl = template_override ? *template_override : std::string(kSystemPromptTemplate);
  if (tmpl.find_first_not_of(" \t\r\n") == std::string::npos)
    throw Error(ErrorCode::MissingTemplate, "system prompt template is empty");
  const auto pos = tmpl.find(kTocPlaceholder);
  if (pos == std::string::npos)
    throw Error(ErrorCode::MissingTemplate,
                std::string("system prompt template lacks the ") + kTocPlaceholder +
                    " placeholder");
  tmpl.replace(pos, std::string(kTocPlaceholder).size(), serialize_toc(index));
  return tmpl;
}

/// Behavioral contract for the decision model: given the message history and
/// tool declarations, produce either assistant text (a final answer) or one
/// structured tool call. Implementations must be deterministic at temperature
/// 0 where the backend allows it.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual PolicyOutput next_action(const std::vector<ChatMessage>& history,
                                   const std::vector<ToolSpec>& tools) = 0;
  /// Deterministic offline policies get zeroed wall-clock entries so that
  /// identical runs produce byte-identical trajectory files.
  virtual bool deterministic() const { return false; }
};

/// Replays a fixed list of actions; the offline stand-in for a live model.
class ScriptedPolicy : public Policy {
 public:
  explicit ScriptedPolicy(std::vector<Action> script) : script_(std::move(script)) {}

  PolicyOutput next_action(const std::vector<ChatMessage>& history,
                           const std::vector<ToolSpec>&) override {
    if (next_ >= script_.size())
      throw Error(ErrorCode::PolicyUnavailable,
                  "scripted policy exhausted after " + std::to_string(script_.size()) +
                      " actions");
    const Action& action = script_[next_];
    ++next_;

    PolicyOutput out;
    if (const auto* f = std::get_if<FinalAction>(&action)) {
      out.content = f->answer;
    } else if (const auto* r = std::get_if<RetrieveAction>(&action)) {
      out.tool_call = ToolCallRequest{"call_" + std::to_string(next_), "Retrieve",
                                      nlohmann::json{{"query", r->query}}.dump()};
    } else {
      const auto& rs = std::get<ReadSectionAction>(action);
      out.tool_call = ToolCallRequest{"call_" + std::to_string(next_), "ReadSection",
                                      nlohmann::json{{"doc_id", rs.doc_id},
                                                     {"sec_id", rs.sec_id},
                                                     {"start", rs.start},
                                                     {"end", rs.end}}
                                          .dump()};
    }
    out.usage.input = detail::estimate_history_tokens(history);
    out.usage.output =
        count_tokens(out.content) + (out.tool_call ? count_tokens(out.tool_call->arguments) : 0);
    out.usage.estimated = true;
    return out;
  }

  bool deterministic() const override { return true; }

 private:
  std::vector<Action> script_;
  std::size_t next_ = 0;
};

inline std::vector<Action> load_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open script file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, "malformed script file " + path.string() + ": " + e.what());
  }
  if (!j.is_array())
    throw Error(ErrorCode::ParseError, "script file must hold a JSON array of actions");
  std::vector<Action> script;
  for (const auto& a : j) script.push_back(action_from_json(a));
  return script;
}

/// Policy served by a chat-completion endpoint.
class RemotePolicy : public Policy {
 public:
  explicit RemotePolicy(ChatSettings settings) : settings_(std::move(settings)) {}

  PolicyOutput next_action(const std::vector<ChatMessage>& history,
                           const std::vector<ToolSpec>& tools) override {
    return chat_complete(history, tools, settings_);
  }

 private:
  ChatSettings settings_;
};

struct ParseFailure {
  std::string reason;
};

/// Maps raw policy output onto the action space. A structured call with
/// well-typed arguments becomes the corresponding tool action; plain
/// assistant text is the final answer; anything else is a ParseFailure the
/// session feeds back as an error observation.
inline std::variant<Action, ParseFailure> parse_action(const PolicyOutput& output) {
  if (!output.tool_call) return Action{FinalAction{output.content}};
  const auto& call = *output.tool_call;

  nlohmann::json args;
  try {
    args = nlohmann::json::parse(call.arguments);
  } catch (const nlohmann::json::exception&) {
    return ParseFailure{"tool call arguments are not valid JSON"};
  }
  if (!args.is_object()) return ParseFailure{"tool call arguments must be a JSON object"};

  auto take_int = [&args](const char* field, int& into) -> std::optional<std::string> {
    if (!args.contains(field)) return std::string("missing field ") + field;
    const auto& v = args[field];
    if (v.is_number_integer()) {
      into = v.get<int>();
      return std::nullopt;
    }
    // Tolerate integral floats (some models emit 3.0 for 3).
    if (v.is_number_float() && v.get<double>() == static_cast<double>(static_cast<int>(v.get<double>()))) {
      into = static_cast<int>(v.get<double>());
      return std::nullopt;
    }
    return std::string("field ") + field + " must be an integer";
  };

  if (call.name == "Retrieve") {
    if (!args.contains("query")) return ParseFailure{"missing field query"};
    if (!args["query"].is_string()) return ParseFailure{"field query must be a string"};
    return Action{RetrieveAction{args["query"].get<std::string>()}};
  }
  if (call.name == "ReadSection") {
    ReadSectionAction rs;
    for (auto [field, into] : {std::pair{"doc_id", &rs.doc_id}, {"sec_id", &rs.sec_id},
                               {"start", &rs.start}, {"end", &rs.end}}) {
      if (auto err = take_int(field, *into)) return ParseFailure{*err};
    }
    return Action{rs};
  }
  return ParseFailure{"unknown tool: " + call.name};
}

enum class Termination { Final, RoundLimit, PolicyUnavailable };

inline const char* termination_name(Termination t) {
  switch (t) {
    case Termination::Final: return "final";
    case Termination::RoundLimit: return "round_limit";
    case Termination::PolicyUnavailable: return "policy_unavailable";
  }
  return "round_limit";
}

inline Termination termination_from_name(const std::string& name) {
  if (name == "final") return Termination::Final;
  if (name == "round_limit") return Termination::RoundLimit;
  if (name == "policy_unavailable") return Termination::PolicyUnavailable;
  throw Error(ErrorCode::ParseError, "unknown termination marker: " + name);
}

/// Config snapshot persisted with each trajectory so recorded sessions can be
/// replayed against an index later. Credentials are never part of this.
struct TrajectoryConfig {
  int max_rounds = 50;
  int k = 2;
  ScanWindow window{0, 0};
  std::string mode = "full";
  std::string ranker_kind = "lexical";
  std::string ranker_endpoint;
  std::string model;
  double temperature = 0.0;
  std::string tool_version = kToolVersion;

  bool operator==(const TrajectoryConfig&) const = default;
};

inline TrajectoryConfig snapshot_config(const AgentConfig& config) {
  TrajectoryConfig snap;
  snap.max_rounds = config.max_rounds;
  snap.k = config.ranker.k;
  snap.window = config.window;
  snap.mode = agent_mode_name(config.mode);
  snap.ranker_kind = config.ranker.kind == RankerKind::Remote ? "remote" : "lexical";
  snap.ranker_endpoint = config.ranker.endpoint;
  snap.model = config.policy.model;
  snap.temperature = config.policy.temperature;
  return snap;
}

struct TrajectoryRound {
  std::optional<Action> action;  // empty when the policy output failed to parse
  std::string parse_error;
  std::optional<Observation> observation;  // empty for FINAL rounds
  std::int64_t tokens_in = 0;
  std::int64_t tokens_out = 0;
  bool usage_estimated = false;
  double wall_ms = 0.0;

  bool operator==(const TrajectoryRound&) const = default;
};

/// Full record of one session: the unit of behavioral analysis and replay.
struct Trajectory {
  std::string question;
  TrajectoryConfig config;
  std::vector<TrajectoryRound> rounds;
  Termination termination = Termination::RoundLimit;
  std::string final_answer;
  std::string error;

  bool operator==(const Trajectory&) const = default;

  int tool_call_count() const {
    int n = 0;
    for (const auto& r : rounds)
      if (r.action && is_tool_call(*r.action)) ++n;
    return n;
  }
};

/// Message history plus round counter; grows append-only as the session runs.
struct AgentState {
  std::vector<ChatMessage> messages;
  int round = 0;
};

/// Runs one locate-then-read session: system prompt with the serialized TOC,
/// then up to max_rounds policy turns, dispatching tool calls and appending
/// each (action, observation) pair to the history. Stops on a final answer,
/// the round limit, or a dead policy. Tool failures, parse failures, and
/// mode-disabled tools all come back to the policy as error observations;
/// the session itself never throws for them.
inline Trajectory run_session(const std::string& question, const DocumentIndex& index,
                              Policy& policy, const AgentConfig& config) {
  if (config.max_rounds < 1)
    throw Error(ErrorCode::ConfigError, "max_rounds must be >= 1");

  std::shared_ptr<const Ranker> ranker = make_ranker(index, config.ranker);
  const Toolbox toolbox(index, ranker, config.ranker.k, config.window);
  const auto specs = tool_specs();
  const bool zero_clock = policy.deterministic();

  Trajectory traj;
  traj.question = question;
  traj.config = snapshot_config(config);

  AgentState state;
  state.messages.push_back({"system", build_system_prompt(index, config.prompt_template), {}, {}});
  state.messages.push_back({"user", question, {}, {}});

  for (int t = 1; t <= config.max_rounds; ++t) {
    const auto started = std::chrono::steady_clock::now();
    PolicyOutput output;
    try {
      output = policy.next_action(state.messages, specs);
    } catch (const Error& e) {
      traj.termination = Termination::PolicyUnavailable;
      traj.error = e.what();
      return traj;
    }
    state.round = t;

    TrajectoryRound round;
    round.tokens_in = output.usage.input;
    round.tokens_out = output.usage.output;
    round.usage_estimated = output.usage.estimated;

    auto parsed = parse_action(output);
    if (const auto* failure = std::get_if<ParseFailure>(&parsed)) {
      Observation obs = Observation::failure(
          output.tool_call ? output.tool_call->name : "",
          "invalid tool call (" + failure->reason +
              "); DO NOT write tool invocations in plain text, use the structured tool call "
              "interface (tool_calls) only");
      round.parse_error = failure->reason;
      round.observation = obs;
      state.messages.push_back({"assistant", output.content,
                                output.tool_call ? std::vector<ToolCallRequest>{*output.tool_call}
                                                 : std::vector<ToolCallRequest>{},
                                {}});
      state.messages.push_back(
          {"tool", obs.payload, {}, output.tool_call ? output.tool_call->id : ""});
    } else {
      const Action action = std::get<Action>(parsed);
      round.action = action;
      if (is_final(action)) {
        state.messages.push_back({"assistant", output.content, {}, {}});
        round.wall_ms = zero_clock ? 0.0
                                   : std::chrono::duration<double, std::milli>(
                                         std::chrono::steady_clock::now() - started)
                                         .count();
        traj.rounds.push_back(std::move(round));
        traj.termination = Termination::Final;
        traj.final_answer = std::get<FinalAction>(action).answer;
        return traj;
      }

      Observation obs;
      if (config.mode == AgentMode::RetrieveOnly && is_read_section(action)) {
        obs = Observation::failure("ReadSection", "ReadSection is disabled in retrieve_only mode");
      } else if (config.mode == AgentMode::ReadOnly && is_retrieve(action)) {
        obs = Observation::failure("Retrieve", "Retrieve is disabled in read_only mode");
      } else {
        obs = toolbox.dispatch(action);
      }
      round.observation = obs;
      state.messages.push_back({"assistant", output.content,
                                output.tool_call ? std::vector<ToolCallRequest>{*output.tool_call}
                                                 : std::vector<ToolCallRequest>{},
                                {}});
      state.messages.push_back(
          {"tool", obs.payload, {}, output.tool_call ? output.tool_call->id : ""});
    }

    round.wall_ms = zero_clock ? 0.0
                               : std::chrono::duration<double, std::milli>(
                                     std::chrono::steady_clock::now() - started)
                                     .count();
    traj.rounds.push_back(std::move(round));
  }
  traj.termination = Termination::RoundLimit;
  return traj;
}

namespace detail {

inline nlohmann::json trajectory_config_to_json(const TrajectoryConfig& c) {
  return {{"max_rounds", c.max_rounds},
          {"k", c.k},
          {"window_up", c.window.up},
          {"window_down", c.window.down},
          {"mode", c.mode},
          {"ranker_kind", c.ranker_kind},
          {"ranker_endpoint", c.ranker_endpoint},
          {"model", c.model},
          {"temperature", c.temperature},
          {"tool_version", c.tool_version}};
}

inline TrajectoryConfig trajectory_config_from_json(const nlohmann::json& j) {
  TrajectoryConfig c;
  c.max_rounds = j.at("max_rounds").get<int>();
  c.k = j.at("k").get<int>();
  c.window = {j.at("window_up").get<int>(), j.at("window_down").get<int>()};
  c.mode = j.at("mode").get<std::string>();
  c.ranker_kind = j.at("ranker_kind").get<std::string>();
  c.ranker_endpoint = j.at("ranker_endpoint").get<std::string>();
  c.model = j.at("model").get<std::string>();
  c.temperature = j.at("temperature").get<double>();
  c.tool_version = j.at("tool_version").get<std::string>();
  return c;
}

}  // namespace detail

/// Line-delimited trajectory file: header record, one record per round,
/// footer record. Append-friendly and diffable.
inline void save_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write trajectory file: " + path.string());
  nlohmann::json header = {{"type", "header"},
                           {"format", "deepread-trajectory"},
                           {"version", kTrajectoryFormatVersion},
                           {"question", traj.question},
                           {"config", detail::trajectory_config_to_json(traj.config)}};
  out << header.dump() << '\n';
  int idx = 0;
  for (const auto& r : traj.rounds) {
    nlohmann::json round = {{"type", "round"},
                            {"round", ++idx},
                            {"action", r.action ? action_to_json(*r.action) : nlohmann::json()},
                            {"parse_error", r.parse_error},
                            {"observation", r.observation ? observation_to_json(*r.observation)
                                                          : nlohmann::json()},
                            {"tokens_in", r.tokens_in},
                            {"tokens_out", r.tokens_out},
                            {"usage_estimated", r.usage_estimated},
                            {"wall_ms", r.wall_ms}};
    out << round.dump() << '\n';
  }
  nlohmann::json footer = {{"type", "footer"},
                           {"termination", termination_name(traj.termination)},
                           {"answer", traj.final_answer},
                           {"error", traj.error},
                           {"rounds", traj.rounds.size()}};
  out << footer.dump() << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed writing trajectory file: " + path.string());
}

inline Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open trajectory file: " + path.string());

  Trajectory traj;
  std::string line;
  bool saw_header = false;
  bool saw_footer = false;
  std::size_t declared_rounds = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError,
                  "malformed trajectory record in " + path.string() + ": " + e.what());
    }
    const std::string type = j.value("type", "");
    try {
      if (type == "header") {
        if (j.value("format", "") != "deepread-trajectory")
          throw Error(ErrorCode::ParseError, "not a deepread trajectory file: " + path.string());
        if (j.value("version", -1) != kTrajectoryFormatVersion)
          throw Error(ErrorCode::IncompatibleTrajectory,
                      "trajectory format version " + std::to_string(j.value("version", -1)) +
                          " is not supported");
        traj.question = j.at("question").get<std::string>();
        traj.config = detail::trajectory_config_from_json(j.at("config"));
        saw_header = true;
      } else if (type == "round") {
        TrajectoryRound r;
        if (!j.at("action").is_null()) r.action = action_from_json(j.at("action"));
        r.parse_error = j.at("parse_error").get<std::string>();
        if (!j.at("observation").is_null())
          r.observation = observation_from_json(j.at("observation"));
        r.tokens_in = j.at("tokens_in").get<std::int64_t>();
        r.tokens_out = j.at("tokens_out").get<std::int64_t>();
        r.usage_estimated = j.at("usage_estimated").get<bool>();
        r.wall_ms = j.at("wall_ms").get<double>();
        traj.rounds.push_back(std::move(r));
      } else if (type == "footer") {
        traj.termination = termination_from_name(j.at("termination").get<std::string>());
        traj.final_answer = j.at("answer").get<std::string>();
        traj.error = j.at("error").get<std::string>();
        declared_rounds = j.at("rounds").get<std::size_t>();
        saw_footer = true;
      } else {
        throw Error(ErrorCode::ParseError, "unknown trajectory record type: " + type);
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError,
                  "malformed trajectory record in " + path.string() + ": " + e.what());
    }
  }
  if (!saw_header || !saw_footer || traj.rounds.size() != declared_rounds)
    throw Error(ErrorCode::ParseError, "truncated trajectory file: " + path.string());
  return traj;
}

struct ReplayReport {
  int tool_rounds = 0;
  std::vector<int> drifted_rounds;  // 1-based round numbers

  bool clean() const { return drifted_rounds.empty(); }
};

/// Re-dispatches every recorded tool action against the given index and
/// compares the produced observation byte-for-byte with the recorded one.
inline ReplayReport replay_trajectory(const Trajectory& traj, const DocumentIndex& index) {
  RankerConfig rc;
  rc.k = traj.config.k;
  if (traj.config.ranker_kind == "remote") {
    rc.kind = RankerKind::Remote;
    rc.endpoint = traj.config.ranker_endpoint;
  }
  std::shared_ptr<const Ranker> ranker = make_ranker(index, rc);
  const Toolbox toolbox(index, ranker, traj.config.k, traj.config.window);
  const AgentMode mode = agent_mode_from_name(traj.config.mode);

  ReplayReport report;
  int idx = 0;
  for (const auto& round : traj.rounds) {
    ++idx;
    if (!round.action || !is_tool_call(*round.action)) continue;
    ++report.tool_rounds;
    Observation fresh;
    if (mode == AgentMode::RetrieveOnly && is_read_section(*round.action)) {
      fresh = Observation::failure("ReadSection", "ReadSection is disabled in retrieve_only mode");
    } else if (mode == AgentMode::ReadOnly && is_retrieve(*round.action)) {
      fresh = Observation::failure("Retrieve", "Retrieve is disabled in read_only mode");
    } else {
      fresh = toolbox.dispatch(*round.action);
    }
    if (!round.observation || !(fresh == *round.observation)) report.drifted_rounds.push_back(idx);
  }
  return report;
}

}  // namespace deepread
