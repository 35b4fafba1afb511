#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "deepread/action.hpp"
#include "deepread/entities.hpp"
#include "deepread/error.hpp"
#include "deepread/http.hpp"
#include "deepread/tools.hpp"

namespace deepread {

/// One chat-protocol message. Assistant messages may carry structured tool
/// calls; tool messages echo the call id they answer.
struct ChatMessage {
  std::string role;  // system | user | assistant | tool
  std::string content;
  std::vector<ToolCallRequest> tool_calls;
  std::string tool_call_id;

  bool operator==(const ChatMessage&) const = default;
};

struct TokenUsage {
  std::int64_t input = 0;
  std::int64_t output = 0;
  bool estimated = false;

  bool operator==(const TokenUsage&) const = default;
};

/// What the policy produced for one round: assistant text, at most one
/// structured tool call, and token accounting.
struct PolicyOutput {
  std::string content;
  std::optional<ToolCallRequest> tool_call;
  TokenUsage usage;
};

struct ChatSettings {
  std::string endpoint;
  std::string model;
  double temperature = 0.0;
  std::string api_key;
  int max_attempts = 3;
  int backoff_ms = 500;
  int timeout_seconds = 300;
};

inline nlohmann::json chat_message_to_json(const ChatMessage& m) {
  nlohmann::json j = {{"role", m.role}, {"content", m.content}};
  if (!m.tool_calls.empty()) {
    nlohmann::json calls = nlohmann::json::array();
    for (const auto& tc : m.tool_calls)
      calls.push_back({{"id", tc.id},
                       {"type", "function"},
                       {"function", {{"name", tc.name}, {"arguments", tc.arguments}}}});
    j["tool_calls"] = std::move(calls);
  }
  if (!m.tool_call_id.empty()) j["tool_call_id"] = m.tool_call_id;
  return j;
}

inline nlohmann::json build_chat_request(const std::vector<ChatMessage>& history,
                                         const std::vector<ToolSpec>& tools,
                                         const ChatSettings& settings) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : history) messages.push_back(chat_message_to_json(m));
  nlohmann::json j = {{"model", settings.model},
                      {"messages", std::move(messages)},
                      {"temperature", settings.temperature}};
  if (!tools.empty()) {
    nlohmann::json decls = nlohmann::json::array();
    for (const auto& t : tools) decls.push_back(tool_spec_to_function_declaration(t));
    j["tools"] = std::move(decls);
  }
  return j;
}

namespace detail {

inline std::int64_t estimate_history_tokens(const std::vector<ChatMessage>& history) {
  std::int64_t n = 0;
  for (const auto& m : history) {
    n += count_tokens(m.content);
    for (const auto& tc : m.tool_calls) n += count_tokens(tc.name) + count_tokens(tc.arguments);
  }
  return n;
}

inline PolicyOutput parse_chat_response(const std::string& body,
                                        const std::vector<ChatMessage>& history) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
    const auto& message = j.at("choices").at(0).at("message");
    PolicyOutput out;
    if (message.contains("content") && message["content"].is_string())
      out.content = message["content"].get<std::string>();
    if (message.contains("tool_calls") && message["tool_calls"].is_array() &&
        !message["tool_calls"].empty()) {
      const auto& tc = message["tool_calls"].at(0);
      out.tool_call = ToolCallRequest{tc.value("id", ""),
                                      tc.at("function").at("name").get<std::string>(),
                                      tc.at("function").at("arguments").get<std::string>()};
    }
    if (j.contains("usage") && j["usage"].is_object() &&
        j["usage"].contains("prompt_tokens") && j["usage"].contains("completion_tokens")) {
      out.usage.input = j["usage"]["prompt_tokens"].get<std::int64_t>();
      out.usage.output = j["usage"]["completion_tokens"].get<std::int64_t>();
    } else {
      out.usage.input = estimate_history_tokens(history);
      out.usage.output = count_tokens(out.content) +
                         (out.tool_call ? count_tokens(out.tool_call->arguments) : 0);
      out.usage.estimated = true;
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ProtocolError,
                std::string("malformed chat completion response: ") + e.what());
  }
}

}  // namespace detail

/// Sends the history and tool declarations over the chat-completion wire
/// protocol. Transient failures (transport, 5xx, 429) are retried with
/// exponential backoff; persistent failure raises PolicyUnavailable.
inline PolicyOutput chat_complete(const std::vector<ChatMessage>& history,
                                  const std::vector<ToolSpec>& tools,
                                  const ChatSettings& settings) {
  if (settings.endpoint.empty())
    throw Error(ErrorCode::ConfigError, "chat endpoint not configured");
  const UrlParts url = split_url(settings.endpoint);
  const nlohmann::json request = build_chat_request(history, tools, settings);

  std::string last_failure = "no attempts made";
  for (int attempt = 1; attempt <= settings.max_attempts; ++attempt) {
    if (attempt > 1) {
      const auto delay = settings.backoff_ms * (1 << (attempt - 2));
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }
    auto response = post_json(url, request, settings.api_key, settings.timeout_seconds);
    if (!response) {
      last_failure = "transport failure reaching " + url.base;
      continue;
    }
    if (response->status == 200) return detail::parse_chat_response(response->body, history);
    if (response->status >= 500 || response->status == 429) {
      last_failure = "HTTP " + std::to_string(response->status);
      continue;
    }
    throw Error(ErrorCode::ProtocolError,
                "chat endpoint rejected request: HTTP " + std::to_string(response->status) +
                    (response->body.empty() ? "" : " " + response->body.substr(0, 200)));
  }
  throw Error(ErrorCode::PolicyUnavailable,
              "chat endpoint unavailable after " + std::to_string(settings.max_attempts) +
                  " attempts (" + last_failure + ")");
}

}  // namespace deepread
