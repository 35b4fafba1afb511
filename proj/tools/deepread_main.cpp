// deepread: structure-aware document navigation and agentic reading.
//
// Subcommands: index, inspect, ask, bench, replay. Settings merge with fixed
// precedence: built-in defaults < config file < flags < environment. API keys
// come from the environment only and are never echoed.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "deepread/deepread.hpp"

namespace {

using namespace deepread;

std::string env_or(const char* name, const std::string& fallback) {
  const char* value = std::getenv(name);
  return value ? std::string(value) : fallback;
}

struct Settings {
  std::string endpoint;
  std::string model;
  double temperature = 0.0;
  std::string judge_endpoint;
  std::string judge_model;
  std::string ranker = "lexical";
  std::string ranker_endpoint;
  int k = 2;
  bool expand = false;
  int max_rounds = 50;
  std::string mode = "full";
  int parallel = 1;
};

void apply_config_file(Settings& s, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, "malformed config file " + path.string() + ": " + e.what());
  }
  s.endpoint = j.value("endpoint", s.endpoint);
  s.model = j.value("model", s.model);
  s.temperature = j.value("temperature", s.temperature);
  s.judge_endpoint = j.value("judge_endpoint", s.judge_endpoint);
  s.judge_model = j.value("judge_model", s.judge_model);
  s.ranker = j.value("ranker", s.ranker);
  s.ranker_endpoint = j.value("ranker_endpoint", s.ranker_endpoint);
  s.k = j.value("k", s.k);
  s.expand = j.value("expand", s.expand);
  s.max_rounds = j.value("max_rounds", s.max_rounds);
  s.mode = j.value("mode", s.mode);
  s.parallel = j.value("parallel", s.parallel);
}

void apply_environment(Settings& s) {
  s.endpoint = env_or("DEEPREAD_ENDPOINT", s.endpoint);
  s.model = env_or("DEEPREAD_MODEL", s.model);
  s.judge_endpoint = env_or("DEEPREAD_JUDGE_ENDPOINT", s.judge_endpoint);
  s.judge_model = env_or("DEEPREAD_JUDGE_MODEL", s.judge_model);
  s.ranker_endpoint = env_or("DEEPREAD_RANKER_ENDPOINT", s.ranker_endpoint);
}

AgentConfig to_agent_config(const Settings& s) {
  AgentConfig config;
  config.max_rounds = s.max_rounds;
  config.ranker.k = s.k;
  if (s.ranker == "remote") {
    config.ranker.kind = RankerKind::Remote;
    config.ranker.endpoint = s.ranker_endpoint;
    config.ranker.api_key = env_or("DEEPREAD_RANKER_API_KEY", "");
  } else if (s.ranker != "lexical") {
    throw Error(ErrorCode::ConfigError, "unknown ranker kind: " + s.ranker);
  }
  config.window = s.expand ? kExpandWindow : ScanWindow{0, 0};
  config.mode = agent_mode_from_name(s.mode);
  config.policy.endpoint = s.endpoint;
  config.policy.model = s.model;
  config.policy.temperature = s.temperature;
  config.policy.api_key = env_or("DEEPREAD_API_KEY", "");
  return config;
}

std::string pluralize(std::size_t n, const char* noun) {
  return std::to_string(n) + " " + noun + (n == 1 ? "" : "s");
}

int cmd_index(const std::vector<std::string>& paths, const std::vector<int>& ids,
              const std::string& out_path) {
  if (!ids.empty() && ids.size() != paths.size())
    throw Error(ErrorCode::ConfigError, "--ids must list one id per input file");
  std::vector<ParsedDocument> docs;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::ifstream in(paths[i]);
    if (!in) throw Error(ErrorCode::IoError, "cannot open input file: " + paths[i]);
    std::stringstream buffer;
    buffer << in.rdbuf();
    DocumentSource source;
    source.doc_id = ids.empty() ? static_cast<int>(i) + 1 : ids[i];
    source.title = std::filesystem::path(paths[i]).stem().string();
    source.markdown = buffer.str();
    ParsedDocument doc = parse_document(source);
    const auto violations = validate_structure(doc);
    if (!violations.empty()) {
      std::ostringstream msg;
      msg << paths[i] << " failed validation:";
      for (const auto& v : violations) msg << " [" << v.rule << " sec " << v.sec_id << "] " << v.detail;
      throw Error(ErrorCode::InvalidDocument, msg.str());
    }
    docs.push_back(std::move(doc));
  }
  DocumentIndex index = build_index(std::move(docs));
  save_index(index, out_path);
  std::cout << pluralize(index.documents().size(), "document") << ", "
            << pluralize(index.heading_count(), "section") << ", "
            << pluralize(index.paragraph_count(), "paragraph") << "\n";
  return 0;
}

int cmd_inspect(const std::string& index_path, bool toc, const std::vector<int>& section,
                const std::vector<int>& para) {
  const DocumentIndex index = load_index(index_path);
  if (toc) {
    std::cout << serialize_toc(index) << "\n";
    return 0;
  }
  if (!section.empty()) {
    const auto& heading = index.heading(section[0], section[1]);
    std::cout << "(" << heading.doc_id << ") [" << heading.sec_id << "] " << heading.title << "\n";
    const Observation obs = read_section(index, section[0], section[1], 0,
                                         heading.n_para > 0 ? heading.n_para - 1 : 0);
    if (obs.error) throw Error(ErrorCode::UnknownSection, obs.message);
    std::cout << obs.payload << "\n";
    return 0;
  }
  if (!para.empty()) {
    std::cout << index.paragraph({para[0], para[1], para[2]}).text << "\n";
    return 0;
  }
  throw Error(ErrorCode::ConfigError, "inspect needs one of --toc, --section, --para");
}

int cmd_ask(const std::string& index_path, const std::string& question, const Settings& settings,
            const std::string& scripted_path, const std::string& trajectory_path) {
  const DocumentIndex index = load_index(index_path);
  const AgentConfig config = to_agent_config(settings);
  std::unique_ptr<Policy> policy;
  if (!scripted_path.empty()) {
    policy = std::make_unique<ScriptedPolicy>(load_script(scripted_path));
  } else {
    if (config.policy.endpoint.empty())
      throw Error(ErrorCode::ConfigError,
                  "no policy: pass --scripted FILE or configure --endpoint/--model");
    policy = std::make_unique<RemotePolicy>(config.policy);
  }
  const Trajectory traj = run_session(question, index, *policy, config);
  save_trajectory(traj, trajectory_path);
  switch (traj.termination) {
    case Termination::Final:
      std::cout << traj.final_answer << "\n";
      return 0;
    case Termination::RoundLimit:
      throw Error(ErrorCode::RoundLimit, "session hit the round limit without a final answer "
                                         "(trajectory saved to " + trajectory_path + ")");
    case Termination::PolicyUnavailable:
      throw Error(ErrorCode::PolicyUnavailable, traj.error);
  }
  return 1;
}

int cmd_bench(const std::string& index_path, const std::string& qa_path, const Settings& settings,
              const std::string& scripted_path, const std::string& judge_kind,
              const std::string& report_path, const std::string& trajectory_dir) {
  const DocumentIndex index = load_index(index_path);
  const std::vector<QAItem> items = load_qa_set(qa_path);
  const AgentConfig config = to_agent_config(settings);

  PolicyFactory make_policy;
  if (!scripted_path.empty()) {
    const auto script = load_script(scripted_path);
    make_policy = [script]() -> std::unique_ptr<Policy> {
      return std::make_unique<ScriptedPolicy>(script);
    };
  } else {
    if (config.policy.endpoint.empty())
      throw Error(ErrorCode::ConfigError,
                  "no policy: pass --scripted FILE or configure --endpoint/--model");
    const ChatSettings chat = config.policy;
    make_policy = [chat]() -> std::unique_ptr<Policy> {
      return std::make_unique<RemotePolicy>(chat);
    };
  }

  std::vector<std::shared_ptr<JudgeClient>> judges;
  if (judge_kind == "scripted") {
    judges.push_back(std::make_shared<ScriptedJudge>());
  } else if (judge_kind == "remote") {
    JudgeSettings js;
    js.chat.endpoint = settings.judge_endpoint;
    js.chat.model = settings.judge_model;
    js.chat.temperature = 0.0;
    js.chat.api_key = env_or("DEEPREAD_JUDGE_API_KEY", "");
    if (js.chat.endpoint.empty())
      throw Error(ErrorCode::ConfigError, "remote judge requires --judge-endpoint");
    judges.push_back(std::make_shared<RemoteJudge>(js));
  } else {
    throw Error(ErrorCode::ConfigError, "unknown judge kind: " + judge_kind);
  }

  BenchOptions options;
  options.parallelism = settings.parallel;
  options.trajectory_dir = trajectory_dir;
  const BenchReport report = run_bench(index, items, config, make_policy, judges, options);
  save_report(report, report_path);
  print_report(std::cout, report);
  return 0;
}

int cmd_replay(const std::string& index_path, const std::string& trajectory_path) {
  const DocumentIndex index = load_index(index_path);
  const Trajectory traj = load_trajectory(trajectory_path);
  const ReplayReport report = replay_trajectory(traj, index);
  std::cout << report.drifted_rounds.size() << " drifted rounds (of " << report.tool_rounds
            << " tool rounds)\n";
  for (int round : report.drifted_rounds) std::cout << "drift at round " << round << "\n";
  return report.clean() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deepread: structure-aware document navigation and agentic reading"};
  app.require_subcommand(1);

  Settings settings;
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file")->envname("DEEPREAD_CONFIG");

  // index
  auto* index_cmd = app.add_subcommand("index", "Parse Markdown files and build an index");
  std::vector<std::string> index_inputs;
  std::vector<int> index_ids;
  std::string index_out = "index.json";
  index_cmd->add_option("files", index_inputs, "Markdown input files")->required();
  index_cmd->add_option("--ids", index_ids, "Explicit doc_id per file (default: 1,2,...)");
  index_cmd->add_option("--out,-o", index_out, "Index output path");

  // inspect
  auto* inspect_cmd = app.add_subcommand("inspect", "Print TOC lines or resolved content");
  std::string inspect_index;
  bool inspect_toc = false;
  std::vector<int> inspect_section, inspect_para;
  inspect_cmd->add_option("--index", inspect_index, "Index file")->required();
  inspect_cmd->add_flag("--toc", inspect_toc, "Print the serialized table of contents");
  inspect_cmd->add_option("--section", inspect_section, "doc_id sec_id")->expected(2);
  inspect_cmd->add_option("--para", inspect_para, "doc_id sec_id para_idx")->expected(3);

  // shared policy/session flags
  std::string ask_index, ask_question, scripted_path;
  std::string trajectory_path = "trajectory.jsonl";
  auto add_session_flags = [&settings, &scripted_path](CLI::App* cmd) {
    cmd->add_option("--endpoint", settings.endpoint, "Chat completion endpoint URL");
    cmd->add_option("--model", settings.model, "Policy model name");
    cmd->add_option("--temperature", settings.temperature, "Decoding temperature");
    cmd->add_option("--k", settings.k, "Retrieval hit count per call");
    cmd->add_flag("--expand", settings.expand, "Use scanning window (1,1) instead of (0,0)");
    cmd->add_option("--max-rounds", settings.max_rounds, "Session round limit");
    cmd->add_option("--mode", settings.mode, "full | retrieve_only | read_only");
    cmd->add_option("--ranker", settings.ranker, "lexical | remote");
    cmd->add_option("--ranker-endpoint", settings.ranker_endpoint, "Remote ranker URL");
    cmd->add_option("--scripted", scripted_path, "Scripted policy file (offline)");
  };

  auto* ask_cmd = app.add_subcommand("ask", "Run one agentic reading session");
  ask_cmd->add_option("--index", ask_index, "Index file")->required();
  ask_cmd->add_option("question", ask_question, "The question to answer")->required();
  add_session_flags(ask_cmd);
  ask_cmd->add_option("--trajectory", trajectory_path, "Trajectory output path");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run a QA benchmark");
  std::string bench_index, bench_qa, bench_report = "report.json";
  std::string bench_trajectory_dir = "trajectories";
  std::string judge_kind = "scripted";
  bench_cmd->add_option("--index", bench_index, "Index file")->required();
  bench_cmd->add_option("--qa", bench_qa, "Line-delimited QA file")->required();
  add_session_flags(bench_cmd);
  bench_cmd->add_option("--judge", judge_kind, "scripted | remote");
  bench_cmd->add_option("--judge-endpoint", settings.judge_endpoint, "Judge endpoint URL");
  bench_cmd->add_option("--judge-model", settings.judge_model, "Judge model name");
  bench_cmd->add_option("--parallel", settings.parallel, "Concurrent sessions");
  bench_cmd->add_option("--out,-o", bench_report, "Report output path");
  bench_cmd->add_option("--trajectory-dir", bench_trajectory_dir, "Directory for trajectories");

  // replay
  auto* replay_cmd = app.add_subcommand("replay", "Re-dispatch a recorded trajectory");
  std::string replay_index, replay_traj;
  replay_cmd->add_option("--index", replay_index, "Index file")->required();
  replay_cmd->add_option("--trajectory", replay_traj, "Trajectory file")->required();

  // Flags are parsed first; config file fills anything the flags left at
  // defaults, then the environment overrides everything.
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    Settings defaults;  // capture pre-parse defaults to detect flag usage
    app.parse(argc, argv);

    if (!config_path.empty()) {
      Settings from_file = defaults;
      apply_config_file(from_file, config_path);
      // Flag values win over file values: keep any setting the parse changed.
      Settings merged = from_file;
      if (settings.endpoint != defaults.endpoint) merged.endpoint = settings.endpoint;
      if (settings.model != defaults.model) merged.model = settings.model;
      if (settings.temperature != defaults.temperature) merged.temperature = settings.temperature;
      if (settings.judge_endpoint != defaults.judge_endpoint)
        merged.judge_endpoint = settings.judge_endpoint;
      if (settings.judge_model != defaults.judge_model) merged.judge_model = settings.judge_model;
      if (settings.ranker != defaults.ranker) merged.ranker = settings.ranker;
      if (settings.ranker_endpoint != defaults.ranker_endpoint)
        merged.ranker_endpoint = settings.ranker_endpoint;
      if (settings.k != defaults.k) merged.k = settings.k;
      if (settings.expand != defaults.expand) merged.expand = settings.expand;
      if (settings.max_rounds != defaults.max_rounds) merged.max_rounds = settings.max_rounds;
      if (settings.mode != defaults.mode) merged.mode = settings.mode;
      if (settings.parallel != defaults.parallel) merged.parallel = settings.parallel;
      settings = merged;
    }
    apply_environment(settings);

    if (index_cmd->parsed()) return cmd_index(index_inputs, index_ids, index_out);
    if (inspect_cmd->parsed())
      return cmd_inspect(inspect_index, inspect_toc, inspect_section, inspect_para);
    if (ask_cmd->parsed())
      return cmd_ask(ask_index, ask_question, settings, scripted_path, trajectory_path);
    if (bench_cmd->parsed())
      return cmd_bench(bench_index, bench_qa, settings, scripted_path, judge_kind, bench_report,
                       bench_trajectory_dir);
    if (replay_cmd->parsed()) return cmd_replay(replay_index, replay_traj);
    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const deepread::Error& e) {
    std::cerr << "error: " << e.code_name() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << "\n";
    return 1;
  }
}
