#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "deepread/action.hpp"
#include "deepread/entities.hpp"
#include "deepread/error.hpp"
#include "deepread/index.hpp"
#include "deepread/retrieval.hpp"

namespace deepread {

inline constexpr const char* kNoResults = "NO RESULTS";

struct ToolParam {
  std::string name;
  std::string type;  // JSON-schema type
  std::string description;
  bool required = true;
};

/// Declaration of one agent-facing tool; parameter names match the Action
/// fields exactly and are what the policy sees in the function schema.
struct ToolSpec {
  std::string name;
  std::string description;
  std::vector<ToolParam> parameters;
};

inline std::vector<ToolSpec> tool_specs() {
  return {
      {"Retrieve",
       "Locate relevant paragraphs. Scores every paragraph in the collection against the "
       "query and returns the top hits, each expanded by the configured scanning window and "
       "prefixed with its coordinate (doc_id, sec_id, para_id).",
       {{"query", "string", "Search query used to score paragraphs.", true}}},
      {"ReadSection",
       "Read contiguous paragraphs of one section in order. Returns paragraphs start..end "
       "(0-based, inclusive) of the given section, clipped to the section's valid range, each "
       "prefixed with its coordinate.",
       {{"doc_id", "integer", "Document identifier from the Directory Structure.", true},
        {"sec_id", "integer", "Section identifier within the document.", true},
        {"start", "integer", "First paragraph index to read (0-based, inclusive).", true},
        {"end", "integer", "Last paragraph index to read (0-based, inclusive).", true}}}};
}

/// Chat-protocol function declaration for one tool.
inline nlohmann::json tool_spec_to_function_declaration(const ToolSpec& spec) {
  nlohmann::json properties = nlohmann::json::object();
  nlohmann::json required = nlohmann::json::array();
  for (const auto& p : spec.parameters) {
    properties[p.name] = {{"type", p.type}, {"description", p.description}};
    if (p.required) required.push_back(p.name);
  }
  return {{"type", "function"},
          {"function",
           {{"name", spec.name},
            {"description", spec.description},
            {"parameters",
             {{"type", "object"}, {"properties", properties}, {"required", required}}}}}};
}

/// Result of one tool invocation as the policy sees it. For successful calls
/// the payload is the format_paragraphs serialization of `records`; for
/// failures the payload carries the error message and `error` is set.
struct Observation {
  std::string tool;
  std::string payload;
  std::vector<ParagraphEntity> records;
  bool error = false;
  std::string message;

  bool operator==(const Observation&) const = default;

  static Observation failure(std::string tool, std::string message) {
    Observation obs;
    obs.tool = std::move(tool);
    obs.payload = message;
    obs.error = true;
    obs.message = std::move(message);
    return obs;
  }
};

inline nlohmann::json observation_to_json(const Observation& obs) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& p : obs.records)
    records.push_back({{"doc_id", p.doc_id},
                       {"sec_id", p.sec_id},
                       {"para_idx", p.para_idx},
                       {"text", p.text}});
  return {{"tool", obs.tool},
          {"payload", obs.payload},
          {"records", std::move(records)},
          {"error", obs.error},
          {"message", obs.message}};
}

inline Observation observation_from_json(const nlohmann::json& j) {
  Observation obs;
  obs.tool = j.at("tool").get<std::string>();
  obs.payload = j.at("payload").get<std::string>();
  obs.error = j.at("error").get<bool>();
  obs.message = j.at("message").get<std::string>();
  for (const auto& r : j.at("records"))
    obs.records.push_back({r.at("text").get<std::string>(), r.at("doc_id").get<int>(),
                           r.at("sec_id").get<int>(), r.at("para_idx").get<int>()});
  return obs;
}

/// Serializes paragraph entities in input order, one record per line:
/// `doc_id=<d>, sec_id=<i>, para_id=<j>, text="<paragraph text>"`.
/// Empty input yields the NO RESULTS sentinel so the policy is always told
/// something parseable.
inline std::string format_paragraphs(const std::vector<ParagraphEntity>& entities) {
  if (entities.empty()) return kNoResults;
  std::string out;
  for (const auto& p : entities) {
    if (!out.empty()) out += '\n';
    out += "doc_id=" + std::to_string(p.doc_id) + ", sec_id=" + std::to_string(p.sec_id) +
           ", para_id=" + std::to_string(p.para_idx) + ", text=\"" + p.text + "\"";
  }
  return out;
}

namespace detail {

inline Observation observation_from_coords(std::string tool, const DocumentIndex& index,
                                           const std::vector<Coordinate>& coords) {
  Observation obs;
  obs.tool = std::move(tool);
  for (const auto& coord : coords) obs.records.push_back(index.paragraph(coord));
  obs.payload = format_paragraphs(obs.records);
  return obs;
}

}  // namespace detail

/// Retrieve: rank, expand each hit by the scanning window in rank order,
/// dedup first-occurrence, serialize. Failures come back as error
/// observations so a session never crashes on a bad call.
inline Observation retrieve(const DocumentIndex& index, const Ranker& ranker,
                            std::string_view query, int k, const ScanWindow& window) {
  try {
    const auto hits = ranker.rank(query, k);
    const auto coords = expand_and_dedup(hits, window, index);
    return detail::observation_from_coords("Retrieve", index, coords);
  } catch (const Error& e) {
    return Observation::failure("Retrieve", e.what());
  }
}

/// ReadSection: clip [start, end] to the section's valid range and return the
/// slice in order. A range that is inverted before clipping is an error; one
/// that clips to nothing yields NO RESULTS.
inline Observation read_section(const DocumentIndex& index, int doc_id, int sec_id, int start,
                                int end) {
  try {
    const int n_para = index.section_length(doc_id, sec_id);
    if (start > end)
      return Observation::failure("ReadSection",
                                  "invalid range: start " + std::to_string(start) +
                                      " exceeds end " + std::to_string(end));
    const int lo = std::max(0, start);
    const int hi = std::min(n_para - 1, end);
    std::vector<Coordinate> coords;
    for (int j = lo; j <= hi; ++j) coords.push_back({doc_id, sec_id, j});
    return detail::observation_from_coords("ReadSection", index, coords);
  } catch (const Error& e) {
    return Observation::failure("ReadSection", e.what());
  }
}

/// Everything a session needs to execute tools: the immutable index plus a
/// ranker built once per session. Pure with respect to calls; safe for
/// concurrent sessions over the same index.
class Toolbox {
 public:
  Toolbox(const DocumentIndex& index, std::shared_ptr<const Ranker> ranker, int k,
          ScanWindow window)
      : index_(&index), ranker_(std::move(ranker)), k_(k), window_(window) {}

  const DocumentIndex& index() const { return *index_; }

  Observation retrieve(std::string_view query) const {
    return deepread::retrieve(*index_, *ranker_, query, k_, window_);
  }

  Observation read_section(int doc_id, int sec_id, int start, int end) const {
    return deepread::read_section(*index_, doc_id, sec_id, start, end);
  }

  /// Routes a typed action. Only tool actions are dispatchable; anything else
  /// is reported as an error observation, never thrown.
  Observation dispatch(const Action& action) const {
    if (const auto* r = std::get_if<RetrieveAction>(&action)) return retrieve(r->query);
    if (const auto* rs = std::get_if<ReadSectionAction>(&action))
      return read_section(rs->doc_id, rs->sec_id, rs->start, rs->end);
    return Observation::failure("FINAL", "unknown tool: FINAL is not dispatchable");
  }

  /// Routes a raw (name, arguments) pair, tolerating unknown names and
  /// malformed arguments. This is the entry point for replaying recorded
  /// calls and for callers below the parse_action layer.
  Observation dispatch(std::string_view name, const nlohmann::json& args) const {
    if (name == "Retrieve") {
      if (!args.contains("query") || !args["query"].is_string())
        return Observation::failure("Retrieve", "missing field query");
      return retrieve(args["query"].get<std::string>());
    }
    if (name == "ReadSection") {
      for (const char* field : {"doc_id", "sec_id", "start", "end"}) {
        if (!args.contains(field))
          return Observation::failure("ReadSection", std::string("missing field ") + field);
        if (!args[field].is_number_integer())
          return Observation::failure("ReadSection",
                                      std::string("field ") + field + " must be an integer");
      }
      return read_section(args["doc_id"].get<int>(), args["sec_id"].get<int>(),
                          args["start"].get<int>(), args["end"].get<int>());
    }
    return Observation::failure(std::string(name), "unknown tool: " + std::string(name));
  }

 private:
  const DocumentIndex* index_;
  std::shared_ptr<const Ranker> ranker_;
  int k_;
  ScanWindow window_;
};

}  // namespace deepread
