#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "deepread/http.hpp"
#include "deepread/index.hpp"
#include "deepread/retrieval.hpp"

namespace deepread {

/// Ranker backed by an HTTP scoring service, for deployments where a dense
/// embedding model replaces the built-in lexical scorer. The request carries
/// the query plus all candidate paragraphs; the response returns scored
/// coordinates. The Rank contract (ordering, tie-breaking, k cap) is enforced
/// client-side regardless of what the service returns.
///
/// POST <endpoint>
///   {"query": "...", "k": 2, "candidates": [
///     {"doc_id": 1, "sec_id": 0, "para_idx": 0, "text": "..."}, ...]}
/// Response:
///   {"hits": [{"doc_id": 1, "sec_id": 0, "para_idx": 0, "score": 0.91}, ...]}
class RemoteRanker : public Ranker {
 public:
  RemoteRanker(const DocumentIndex& index, std::string endpoint, std::string api_key = "")
      : index_(&index), url_(split_url(endpoint)), api_key_(std::move(api_key)) {}

  std::vector<RankHit> rank(std::string_view query, int k) const override {
    if (normalize_terms(query).empty())
      throw Error(ErrorCode::EmptyQuery, "query must be non-empty");
    if (k < 1) throw Error(ErrorCode::EmptyQuery, "k must be >= 1");

    nlohmann::json candidates = nlohmann::json::array();
    for (const auto& doc : index_->documents())
      for (const auto& section : doc.paragraphs)
        for (const auto& para : section)
          candidates.push_back({{"doc_id", para.doc_id},
                                {"sec_id", para.sec_id},
                                {"para_idx", para.para_idx},
                                {"text", para.text}});
    nlohmann::json request = {
        {"query", std::string(query)}, {"k", k}, {"candidates", std::move(candidates)}};

    auto response = post_json(url_, request, api_key_);
    if (!response)
      throw Error(ErrorCode::RemoteRankerUnavailable,
                  "remote ranker unreachable at " + url_.base + url_.path);
    if (response->status != 200)
      throw Error(ErrorCode::RemoteRankerUnavailable,
                  "remote ranker returned HTTP " + std::to_string(response->status));

    std::vector<RankHit> hits;
    try {
      const auto j = nlohmann::json::parse(response->body);
      for (const auto& h : j.at("hits")) {
        RankHit hit{{h.at("doc_id").get<int>(), h.at("sec_id").get<int>(),
                     h.at("para_idx").get<int>()},
                    h.at("score").get<double>()};
        index_->paragraph(hit.coordinate);  // reject hits that do not resolve
        hits.push_back(hit);
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::RemoteRankerUnavailable,
                  std::string("remote ranker response malformed: ") + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::RemoteRankerUnavailable,
                  std::string("remote ranker returned unresolvable coordinate: ") + e.what());
    }
    std::sort(hits.begin(), hits.end(), [](const RankHit& a, const RankHit& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.coordinate < b.coordinate;
    });
    if (hits.size() > static_cast<std::size_t>(k)) hits.resize(static_cast<std::size_t>(k));
    return hits;
  }

 private:
  const DocumentIndex* index_;
  UrlParts url_;
  std::string api_key_;
};

inline std::unique_ptr<Ranker> make_ranker(const DocumentIndex& index, const RankerConfig& config) {
  if (config.kind == RankerKind::Remote) {
    if (config.endpoint.empty())
      throw Error(ErrorCode::ConfigError, "remote ranker requires an endpoint");
    return std::make_unique<RemoteRanker>(index, config.endpoint, config.api_key);
  }
  return std::make_unique<LexicalRanker>(index, config.k1, config.b);
}

}  // namespace deepread
