#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "deepread/error.hpp"

namespace deepread {

struct FinalAction {
  std::string answer;
  bool operator==(const FinalAction&) const = default;
};

struct RetrieveAction {
  std::string query;
  bool operator==(const RetrieveAction&) const = default;
};

struct ReadSectionAction {
  int doc_id = 0;
  int sec_id = 0;
  int start = 0;
  int end = 0;
  bool operator==(const ReadSectionAction&) const = default;
};

/// The agent's move each round: exactly one of a final answer, a Retrieve
/// call, or a ReadSection call.
using Action = std::variant<FinalAction, RetrieveAction, ReadSectionAction>;

inline bool is_final(const Action& a) { return std::holds_alternative<FinalAction>(a); }
inline bool is_retrieve(const Action& a) { return std::holds_alternative<RetrieveAction>(a); }
inline bool is_read_section(const Action& a) { return std::holds_alternative<ReadSectionAction>(a); }
inline bool is_tool_call(const Action& a) { return !is_final(a); }

inline nlohmann::json action_to_json(const Action& action) {
  if (const auto* f = std::get_if<FinalAction>(&action))
    return {{"type", "final"}, {"answer", f->answer}};
  if (const auto* r = std::get_if<RetrieveAction>(&action))
    return {{"type", "retrieve"}, {"query", r->query}};
  const auto& rs = std::get<ReadSectionAction>(action);
  return {{"type", "read_section"},
          {"doc_id", rs.doc_id},
          {"sec_id", rs.sec_id},
          {"start", rs.start},
          {"end", rs.end}};
}

inline Action action_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "final") return FinalAction{j.at("answer").get<std::string>()};
  if (type == "retrieve") return RetrieveAction{j.at("query").get<std::string>()};
  if (type == "read_section")
    return ReadSectionAction{j.at("doc_id").get<int>(), j.at("sec_id").get<int>(),
                             j.at("start").get<int>(), j.at("end").get<int>()};
  throw Error(ErrorCode::ParseError, "unknown action type: " + type);
}

/// A raw structured tool call as it arrives from the chat protocol:
/// arguments are an unparsed JSON text, validated later by parse_action.
struct ToolCallRequest {
  std::string id;
  std::string name;
  std::string arguments;

  bool operator==(const ToolCallRequest&) const = default;
};

}  // namespace deepread
