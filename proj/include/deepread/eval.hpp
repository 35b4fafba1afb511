#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "deepread/agent.hpp"
#include "deepread/chat.hpp"
#include "deepread/error.hpp"
#include "deepread/index.hpp"

namespace deepread {

struct QAItem {
  std::string id;
  std::string question;
  std::string golden;
  std::vector<int> doc_filter;  // empty = whole collection
};

/// Loads a line-delimited QA set: {"id", "question", "golden", "docs"?}.
inline std::vector<QAItem> load_qa_set(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open QA file: " + path.string());
  std::vector<QAItem> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      QAItem item;
      item.id = j.at("id").get<std::string>();
      item.question = j.at("question").get<std::string>();
      item.golden = j.at("golden").get<std::string>();
      if (j.contains("docs")) item.doc_filter = j["docs"].get<std::vector<int>>();
      if (item.golden.empty())
        throw Error(ErrorCode::ParseError, "golden answer empty for item " + item.id);
      items.push_back(std::move(item));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, "malformed QA record at " + path.string() + ":" +
                                             std::to_string(line_no) + ": " + e.what());
    }
  }
  if (items.empty()) throw Error(ErrorCode::EmptyCollection, "QA file has no items: " + path.string());
  for (std::size_t i = 0; i < items.size(); ++i)
    for (std::size_t k = i + 1; k < items.size(); ++k)
      if (items[i].id == items[k].id)
        throw Error(ErrorCode::ParseError, "duplicate QA id: " + items[i].id);
  return items;
}

struct Verdict {
  std::string qa_id;
  std::string judge;
  bool correct = false;
  std::string raw;

  bool operator==(const Verdict&) const = default;
};

/// Strict boolean parsing of a judge reply: trim whitespace, then
/// case-insensitive `true`/`false`. Anything else is an explicit error.
inline std::optional<bool> parse_verdict_text(std::string_view raw) {
  while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.front()))) raw.remove_prefix(1);
  while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back()))) raw.remove_suffix(1);
  std::string lowered(raw);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lowered == "true") return true;
  if (lowered == "false") return false;
  return std::nullopt;
}

inline constexpr const char* kJudgePromptTemplate =
    "You are an expert evaluator for AI-generated responses to queries. Your task is to "
    "determine whether the AI-generated answer correctly answers the query based on the golden "
    "answer provided by a human expert.\n"
    "\n"
    "**Numerical Accuracy:**\n"
    "- Rounding differences should be **ignored** if they do not meaningfully change the "
    "conclusion.\n"
    "- You can allow some flexibility in accuracy. For example, 1.2 is considered similar to "
    "1.23. Two numbers are considered similar if one can be rounded to the other.\n"
    "- Fractions, percentage, and numerics could be considered similar, for example: \"11 of "
    "14\" is considered equivalent to \"79%\" and \"0.79\".\n"
    "\n"
    "**Evaluation Criteria:**\n"
    "- If the golden answer or any of its equivalence can be inferred or generated from the "
    "AI-generated answer, then the AI-generated answer is considered correct.\n"
    "- If any number, percentage, fraction, or figure in the golden answer is not present in "
    "the AI-generated answer, but can be inferred or generated from the AI-generated answer or "
    "implicitly exist in the AI-generated answer, then the AI-generated answer is considered "
    "correct.\n"
    "- The AI-generated answer is considered correct if it conveys the same or similar "
    "meaning, conclusion, or rationale as the golden answer.\n"
    "- If the AI-generated answer is a superset of the golden answer, it is also considered "
    "correct.\n"
    "- If the AI-generated answer provides a valid answer or reasonable interpretation "
    "compared to the golden answer, it is considered correct.\n"
    "- If the AI-generated answer contains subjective judgments or opinions, it is considered "
    "correct as long as they are reasonable and justifiable compared to the golden answer.\n"
    "- Otherwise, the AI-generated answer is incorrect.\n"
    "\n"
    "**Inputs:**\n"
    "Query: {question}\n"
    "- AI-Generated Answer: {predicted}\n"
    "- Golden Answer: {golden}\n"
    "\n"
    "Your output should be ONLY a boolean value: True or False, nothing else.";

inline std::string build_judge_prompt(const std::string& question, const std::string& predicted,
                                      const std::string& golden) {
  std::string prompt = kJudgePromptTemplate;
  auto substitute = [&prompt](const char* placeholder, const std::string& value) {
    const auto pos = prompt.find(placeholder);
    prompt.replace(pos, std::string(placeholder).size(), value);
  };
  substitute("{question}", question);
  substitute("{predicted}", predicted);
  substitute("{golden}", golden);
  return prompt;
}

struct JudgeSettings {
  ChatSettings chat;
  std::string name;  // defaults to the model name
};

/// One LLM-as-judge call: sends the evaluation prompt with the three inputs
/// substituted and parses the strict boolean reply.
inline Verdict judge(const std::string& question, const std::string& predicted,
                     const std::string& golden, const JudgeSettings& settings) {
  const std::vector<ChatMessage> messages = {
      {"user", build_judge_prompt(question, predicted, golden), {}, {}}};
  PolicyOutput reply;
  try {
    reply = chat_complete(messages, {}, settings.chat);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::PolicyUnavailable || e.code() == ErrorCode::ProtocolError)
      throw Error(ErrorCode::JudgeUnavailable, std::string("judge endpoint failed: ") + e.what());
    throw;
  }
  const auto verdict = parse_verdict_text(reply.content);
  if (!verdict)
    throw Error(ErrorCode::JudgeUnparseable,
                "judge reply is not a boolean: \"" + reply.content + "\"");
  Verdict v;
  v.judge = settings.name.empty() ? settings.chat.model : settings.name;
  v.correct = *verdict;
  v.raw = reply.content;
  return v;
}

/// Verdict source used by the bench runner.
class JudgeClient {
 public:
  virtual ~JudgeClient() = default;
  virtual std::string name() const = 0;
  virtual Verdict evaluate(const QAItem& item, const std::string& predicted) = 0;
};

class RemoteJudge : public JudgeClient {
 public:
  explicit RemoteJudge(JudgeSettings settings) : settings_(std::move(settings)) {}

  std::string name() const override {
    return settings_.name.empty() ? settings_.chat.model : settings_.name;
  }

  Verdict evaluate(const QAItem& item, const std::string& predicted) override {
    Verdict v = judge(item.question, predicted, item.golden, settings_);
    v.qa_id = item.id;
    return v;
  }

 private:
  JudgeSettings settings_;
};

/// Offline verdicts: correct iff the golden answer appears in the prediction
/// (case-insensitive). Deterministic, so bench runs are reproducible without
/// any endpoint.
class ScriptedJudge : public JudgeClient {
 public:
  std::string name() const override { return "scripted-contains"; }

  Verdict evaluate(const QAItem& item, const std::string& predicted) override {
    auto lower = [](std::string s) {
      std::transform(s.begin(), s.end(), s.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      return s;
    };
    const bool correct = lower(predicted).find(lower(item.golden)) != std::string::npos;
    return {item.id, name(), correct, correct ? "True" : "False"};
  }
};

/// Aggregate behavioral statistics over a set of trajectories (Retrieve/Read
/// balance, first-action pattern, token consumption).
struct BehaviorStats {
  std::size_t trajectory_count = 0;
  double first_action_retrieve_rate = 0.0;
  double s_to_r_rate = 0.0;           // first tool call Retrieve AND >=1 later Read
  std::int64_t retrieve_calls = 0;    // C_s
  std::int64_t read_calls = 0;        // C_r
  std::optional<double> retrieve_to_read_ratio;  // C_s/C_r, absent when C_r = 0
  std::vector<int> tool_calls_per_trajectory;
  std::vector<int> first_action_is_retrieve;  // raw 0/1 indicator per trajectory
  double mean_tool_calls = 0.0;
  std::int64_t input_tokens_total = 0;
  std::int64_t output_tokens_total = 0;
  double input_tokens_mean = 0.0;
  double output_tokens_mean = 0.0;

  bool operator==(const BehaviorStats&) const = default;
};

inline BehaviorStats compute_behavior_stats(const std::vector<Trajectory>& trajectories) {
  if (trajectories.empty())
    throw Error(ErrorCode::EmptyCollection, "no trajectories to analyze");
  BehaviorStats stats;
  stats.trajectory_count = trajectories.size();
  std::size_t first_retrieve = 0;
  std::size_t locate_then_read = 0;
  for (const auto& traj : trajectories) {
    int tools_here = 0;
    std::int64_t reads_here = 0;
    bool first_is_retrieve = false;
    bool saw_tool = false;
    for (const auto& round : traj.rounds) {
      stats.input_tokens_total += round.tokens_in;
      stats.output_tokens_total += round.tokens_out;
      if (!round.action || !is_tool_call(*round.action)) continue;
      ++tools_here;
      if (!saw_tool) {
        saw_tool = true;
        first_is_retrieve = is_retrieve(*round.action);
      }
      if (is_retrieve(*round.action)) ++stats.retrieve_calls;
      if (is_read_section(*round.action)) {
        ++stats.read_calls;
        ++reads_here;
      }
    }
    stats.tool_calls_per_trajectory.push_back(tools_here);
    stats.first_action_is_retrieve.push_back(first_is_retrieve ? 1 : 0);
    if (first_is_retrieve) {
      ++first_retrieve;
      if (reads_here > 0) ++locate_then_read;
    }
  }
  const double n = static_cast<double>(trajectories.size());
  stats.first_action_retrieve_rate = static_cast<double>(first_retrieve) / n;
  stats.s_to_r_rate = static_cast<double>(locate_then_read) / n;
  if (stats.read_calls > 0)
    stats.retrieve_to_read_ratio =
        static_cast<double>(stats.retrieve_calls) / static_cast<double>(stats.read_calls);
  std::int64_t total_tools = 0;
  for (int c : stats.tool_calls_per_trajectory) total_tools += c;
  stats.mean_tool_calls = static_cast<double>(total_tools) / n;
  stats.input_tokens_mean = static_cast<double>(stats.input_tokens_total) / n;
  stats.output_tokens_mean = static_cast<double>(stats.output_tokens_total) / n;
  return stats;
}

/// Fraction of items on which every judge returned the same verdict. One row
/// per item, one column per judge; rows must be uniform and complete.
inline double compute_agreement(const std::vector<std::vector<bool>>& verdict_matrix) {
  if (verdict_matrix.empty())
    throw Error(ErrorCode::IncompleteMatrix, "verdict matrix has no items");
  const std::size_t judges = verdict_matrix.front().size();
  if (judges == 0) throw Error(ErrorCode::IncompleteMatrix, "verdict matrix has no judges");
  std::size_t unanimous = 0;
  for (const auto& row : verdict_matrix) {
    if (row.size() != judges)
      throw Error(ErrorCode::IncompleteMatrix, "verdict missing for some judge");
    if (std::all_of(row.begin(), row.end(), [&](bool v) { return v == row.front(); })) ++unanimous;
  }
  return static_cast<double>(unanimous) / static_cast<double>(verdict_matrix.size());
}

struct CostSplit {
  std::size_t count = 0;
  double mean_tool_calls = 0.0;
  double mean_total_tokens = 0.0;

  bool operator==(const CostSplit&) const = default;
};

struct JudgeAccuracy {
  std::string judge;
  std::size_t correct = 0;
  std::size_t judged = 0;
  double accuracy = 0.0;

  bool operator==(const JudgeAccuracy&) const = default;
};

struct BenchReport {
  std::size_t item_count = 0;
  std::vector<JudgeAccuracy> accuracy;  // configured judge order
  std::string primary_judge;
  BehaviorStats behavior;
  std::optional<CostSplit> correct_cost;
  std::optional<CostSplit> wrong_cost;
  std::optional<double> agreement;
  std::vector<std::string> errored_items;

  bool operator==(const BenchReport&) const = default;
};

namespace detail {

inline CostSplit cost_split(const std::vector<const Trajectory*>& trajectories) {
  CostSplit split;
  split.count = trajectories.size();
  std::int64_t tools = 0;
  std::int64_t tokens = 0;
  for (const auto* traj : trajectories) {
    tools += traj->tool_call_count();
    for (const auto& round : traj->rounds) tokens += round.tokens_in + round.tokens_out;
  }
  if (!trajectories.empty()) {
    split.mean_tool_calls = static_cast<double>(tools) / static_cast<double>(trajectories.size());
    split.mean_total_tokens =
        static_cast<double>(tokens) / static_cast<double>(trajectories.size());
  }
  return split;
}

}  // namespace detail

/// Builds the benchmark report from complete keyed results: one trajectory
/// per item and, for every judge present, one verdict per item. The first
/// judge is the primary one and drives the correct/wrong cost split.
inline BenchReport aggregate(const std::vector<QAItem>& items,
                             const std::map<std::string, Trajectory>& trajectories,
                             const std::vector<Verdict>& verdicts) {
  if (items.empty()) throw Error(ErrorCode::EmptyCollection, "no QA items");
  if (verdicts.empty()) throw Error(ErrorCode::EmptyCollection, "no verdicts");
  for (const auto& item : items)
    if (!trajectories.contains(item.id))
      throw Error(ErrorCode::KeyMismatch, "no trajectory for item " + item.id);

  // Group verdicts by judge, preserving first-appearance order.
  std::vector<std::string> judge_order;
  std::map<std::string, std::map<std::string, const Verdict*>> by_judge;
  for (const auto& v : verdicts) {
    if (!by_judge.contains(v.judge)) judge_order.push_back(v.judge);
    by_judge[v.judge][v.qa_id] = &v;
  }
  for (const auto& judge_name : judge_order)
    for (const auto& item : items)
      if (!by_judge[judge_name].contains(item.id))
        throw Error(ErrorCode::KeyMismatch,
                    "judge " + judge_name + " has no verdict for item " + item.id);

  BenchReport report;
  report.item_count = items.size();
  report.primary_judge = judge_order.front();

  for (const auto& judge_name : judge_order) {
    JudgeAccuracy acc;
    acc.judge = judge_name;
    acc.judged = items.size();
    for (const auto& item : items)
      if (by_judge[judge_name][item.id]->correct) ++acc.correct;
    acc.accuracy = static_cast<double>(acc.correct) / static_cast<double>(acc.judged);
    report.accuracy.push_back(acc);
  }

  std::vector<Trajectory> ordered;
  for (const auto& item : items) ordered.push_back(trajectories.at(item.id));
  report.behavior = compute_behavior_stats(ordered);

  std::vector<const Trajectory*> correct_trajs, wrong_trajs;
  for (const auto& item : items) {
    const bool correct = by_judge[report.primary_judge][item.id]->correct;
    (correct ? correct_trajs : wrong_trajs).push_back(&trajectories.at(item.id));
  }
  if (!correct_trajs.empty()) report.correct_cost = detail::cost_split(correct_trajs);
  if (!wrong_trajs.empty()) report.wrong_cost = detail::cost_split(wrong_trajs);

  if (judge_order.size() >= 2) {
    std::vector<std::vector<bool>> matrix;
    for (const auto& item : items) {
      std::vector<bool> row;
      for (const auto& judge_name : judge_order) row.push_back(by_judge[judge_name][item.id]->correct);
      matrix.push_back(std::move(row));
    }
    report.agreement = compute_agreement(matrix);
  }
  return report;
}

struct BenchOptions {
  int parallelism = 1;
  std::filesystem::path trajectory_dir;
};

using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

/// Runs one session per QA item with bounded concurrency over the shared
/// immutable index, persists each trajectory, judges the answers, and
/// aggregates. Item failures are recorded in the report, never fatal.
inline BenchReport run_bench(const DocumentIndex& index, const std::vector<QAItem>& items,
                             const AgentConfig& config, const PolicyFactory& make_policy,
                             const std::vector<std::shared_ptr<JudgeClient>>& judges,
                             const BenchOptions& options) {
  if (items.empty()) throw Error(ErrorCode::EmptyCollection, "no QA items");
  if (options.parallelism < 1)
    throw Error(ErrorCode::ConfigError, "parallelism must be >= 1");
  if (!options.trajectory_dir.empty()) std::filesystem::create_directories(options.trajectory_dir);

  struct ItemOutcome {
    std::optional<Trajectory> trajectory;
    std::vector<Verdict> verdicts;
    std::vector<std::string> errors;
  };
  std::vector<ItemOutcome> outcomes(items.size());
  std::atomic<std::size_t> cursor{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= items.size()) return;
      const QAItem& item = items[i];
      ItemOutcome& outcome = outcomes[i];
      try {
        const DocumentIndex scoped =
            item.doc_filter.empty() ? DocumentIndex() : index.subset(item.doc_filter);
        const DocumentIndex& session_index = item.doc_filter.empty() ? index : scoped;
        auto policy = make_policy();
        Trajectory traj = run_session(item.question, session_index, *policy, config);
        if (!options.trajectory_dir.empty())
          save_trajectory(traj, options.trajectory_dir / (item.id + ".traj.jsonl"));
        const std::string predicted = traj.final_answer;
        outcome.trajectory = std::move(traj);
        for (const auto& j : judges) {
          try {
            outcome.verdicts.push_back(j->evaluate(item, predicted));
          } catch (const Error& e) {
            outcome.errors.push_back(item.id + ": judge " + j->name() + ": " + e.what());
          }
        }
      } catch (const Error& e) {
        outcome.errors.push_back(item.id + ": " + std::string(e.what()));
      }
    }
  };
  std::vector<std::thread> threads;
  const int n_threads = std::min<int>(options.parallelism, static_cast<int>(items.size()));
  for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  BenchReport report;
  report.item_count = items.size();
  std::vector<Trajectory> sessioned;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (outcomes[i].trajectory) sessioned.push_back(*outcomes[i].trajectory);
    for (const auto& err : outcomes[i].errors) report.errored_items.push_back(err);
  }
  if (!sessioned.empty()) report.behavior = compute_behavior_stats(sessioned);

  for (const auto& j : judges) {
    JudgeAccuracy acc;
    acc.judge = j->name();
    for (std::size_t i = 0; i < items.size(); ++i)
      for (const auto& v : outcomes[i].verdicts)
        if (v.judge == acc.judge) {
          ++acc.judged;
          if (v.correct) ++acc.correct;
        }
    if (acc.judged > 0) acc.accuracy = static_cast<double>(acc.correct) / acc.judged;
    report.accuracy.push_back(acc);
  }
  if (!judges.empty()) {
    report.primary_judge = judges.front()->name();
    std::vector<const Trajectory*> correct_trajs, wrong_trajs;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (!outcomes[i].trajectory) continue;
      for (const auto& v : outcomes[i].verdicts)
        if (v.judge == report.primary_judge)
          (v.correct ? correct_trajs : wrong_trajs).push_back(&*outcomes[i].trajectory);
    }
    if (!correct_trajs.empty()) report.correct_cost = detail::cost_split(correct_trajs);
    if (!wrong_trajs.empty()) report.wrong_cost = detail::cost_split(wrong_trajs);
  }
  if (judges.size() >= 2) {
    std::vector<std::vector<bool>> matrix;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (outcomes[i].verdicts.size() != judges.size()) continue;
      std::vector<bool> row;
      for (const auto& v : outcomes[i].verdicts) row.push_back(v.correct);
      matrix.push_back(std::move(row));
    }
    if (!matrix.empty()) report.agreement = compute_agreement(matrix);
  }
  return report;
}

inline nlohmann::json behavior_stats_to_json(const BehaviorStats& s) {
  return {{"trajectory_count", s.trajectory_count},
          {"first_action_retrieve_rate", s.first_action_retrieve_rate},
          {"s_to_r_rate", s.s_to_r_rate},
          {"retrieve_calls", s.retrieve_calls},
          {"read_calls", s.read_calls},
          {"retrieve_to_read_ratio",
           s.retrieve_to_read_ratio ? nlohmann::json(*s.retrieve_to_read_ratio) : nlohmann::json()},
          {"tool_calls_per_trajectory", s.tool_calls_per_trajectory},
          {"first_action_is_retrieve", s.first_action_is_retrieve},
          {"mean_tool_calls", s.mean_tool_calls},
          {"input_tokens_total", s.input_tokens_total},
          {"output_tokens_total", s.output_tokens_total},
          {"input_tokens_mean", s.input_tokens_mean},
          {"output_tokens_mean", s.output_tokens_mean}};
}

inline nlohmann::json report_to_json(const BenchReport& r) {
  nlohmann::json accuracy = nlohmann::json::array();
  for (const auto& a : r.accuracy)
    accuracy.push_back({{"judge", a.judge},
                        {"correct", a.correct},
                        {"judged", a.judged},
                        {"accuracy", a.accuracy}});
  auto cost = [](const std::optional<CostSplit>& c) {
    if (!c) return nlohmann::json();
    return nlohmann::json{{"count", c->count},
                          {"mean_tool_calls", c->mean_tool_calls},
                          {"mean_total_tokens", c->mean_total_tokens}};
  };
  return {{"format", "deepread-report"},
          {"version", 1},
          {"item_count", r.item_count},
          {"accuracy", std::move(accuracy)},
          {"primary_judge", r.primary_judge},
          {"behavior", behavior_stats_to_json(r.behavior)},
          {"cost_correct", cost(r.correct_cost)},
          {"cost_wrong", cost(r.wrong_cost)},
          {"agreement", r.agreement ? nlohmann::json(*r.agreement) : nlohmann::json()},
          {"errored_items", r.errored_items}};
}

inline void save_report(const BenchReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write report file: " + path.string());
  out << report_to_json(report).dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed writing report file: " + path.string());
}

/// Human-readable summary table.
inline void print_report(std::ostream& os, const BenchReport& r) {
  os << "items: " << r.item_count << "\n";
  for (const auto& a : r.accuracy) {
    os << "accuracy[" << a.judge << "]: " << std::fixed << std::setprecision(4) << a.accuracy
       << " (" << a.correct << "/" << a.judged << ")\n";
  }
  os << "first_action_retrieve_rate: " << std::fixed << std::setprecision(4)
     << r.behavior.first_action_retrieve_rate << "\n";
  os << "s_to_r_rate: " << r.behavior.s_to_r_rate << "\n";
  os << "retrieve_calls: " << r.behavior.retrieve_calls
     << "  read_calls: " << r.behavior.read_calls;
  if (r.behavior.retrieve_to_read_ratio)
    os << "  ratio: " << *r.behavior.retrieve_to_read_ratio;
  else
    os << "  ratio: undefined";
  os << "\n";
  os << "mean_tool_calls: " << r.behavior.mean_tool_calls << "\n";
  os << "tokens total in/out: " << r.behavior.input_tokens_total << "/"
     << r.behavior.output_tokens_total << "\n";
  auto print_cost = [&os](const char* label, const std::optional<CostSplit>& c) {
    os << label << ": ";
    if (c)
      os << c->count << " items, mean tool calls " << c->mean_tool_calls << ", mean tokens "
         << c->mean_total_tokens << "\n";
    else
      os << "none\n";
  };
  print_cost("correct cost", r.correct_cost);
  print_cost("wrong cost", r.wrong_cost);
  if (r.agreement) os << "agreement: " << *r.agreement << "\n";
  for (const auto& e : r.errored_items) os << "errored: " << e << "\n";
}

}  // namespace deepread
