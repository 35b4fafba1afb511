#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "deepread/entities.hpp"
#include "deepread/error.hpp"
#include "deepread/index.hpp"

namespace deepread {

/// Per-hit look-ahead: `up` paragraphs above and `down` below the hit, never
/// crossing the section boundary.
struct ScanWindow {
  int up = 0;
  int down = 0;

  bool operator==(const ScanWindow&) const = default;
};

// The `expand` configuration variant.
inline constexpr ScanWindow kExpandWindow{1, 1};

struct RankHit {
  Coordinate coordinate;
  double score = 0.0;

  bool operator==(const RankHit&) const = default;
};

enum class RankerKind { Lexical, Remote };

struct RankerConfig {
  RankerKind kind = RankerKind::Lexical;
  int k = 2;
  double k1 = 1.2;
  double b = 0.75;
  std::string endpoint;  // remote kind only
  std::string api_key;   // remote kind only, sourced from the environment
};

/// Lowercases ASCII, strips punctuation, splits on whitespace. Applied to
/// both queries and paragraphs so lexical scoring is deterministic.
inline std::vector<std::string> normalize_terms(std::string_view text) {
  std::vector<std::string> terms;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      current += static_cast<char>(std::tolower(c));
    } else if (!current.empty()) {
      terms.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) terms.push_back(std::move(current));
  return terms;
}

/// Corpus-wide statistics for BM25, computed once per index build.
struct CorpusStats {
  struct ParagraphStats {
    Coordinate coordinate;
    int length = 0;
    std::unordered_map<std::string, int> term_freq;
  };

  std::vector<ParagraphStats> paragraphs;
  std::unordered_map<std::string, int> doc_freq;
  double avg_length = 0.0;

  static CorpusStats from_index(const DocumentIndex& index) {
    CorpusStats stats;
    std::int64_t total_len = 0;
    for (const auto& doc : index.documents()) {
      for (const auto& section : doc.paragraphs) {
        for (const auto& para : section) {
          ParagraphStats ps;
          ps.coordinate = para.coordinate();
          for (auto& term : normalize_terms(para.text)) {
            ++ps.length;
            ++ps.term_freq[term];
          }
          total_len += ps.length;
          stats.paragraphs.push_back(std::move(ps));
        }
      }
    }
    for (const auto& ps : stats.paragraphs)
      for (const auto& [term, _] : ps.term_freq) ++stats.doc_freq[term];
    stats.avg_length =
        stats.paragraphs.empty() ? 0.0 : static_cast<double>(total_len) / stats.paragraphs.size();
    return stats;
  }
};

/// Okapi BM25 for one paragraph against pre-normalized, deduplicated query
/// terms. IDF is clamped at a small positive epsilon so that paragraphs
/// containing a query term always outscore paragraphs without it.
inline double lexical_score(const std::vector<std::string>& query_terms,
                            const CorpusStats::ParagraphStats& paragraph,
                            const CorpusStats& corpus, double k1 = 1.2, double b = 0.75) {
  constexpr double kEpsilonIdf = 1e-6;
  const double n_docs = static_cast<double>(corpus.paragraphs.size());
  const double norm_len =
      corpus.avg_length > 0.0 ? static_cast<double>(paragraph.length) / corpus.avg_length : 1.0;
  double score = 0.0;
  for (const auto& term : query_terms) {
    auto tf_it = paragraph.term_freq.find(term);
    if (tf_it == paragraph.term_freq.end()) continue;
    const double tf = static_cast<double>(tf_it->second);
    auto df_it = corpus.doc_freq.find(term);
    const double df = df_it == corpus.doc_freq.end() ? 0.0 : static_cast<double>(df_it->second);
    const double idf = std::max(kEpsilonIdf, std::log((n_docs - df + 0.5) / (df + 0.5)));
    score += idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * norm_len));
  }
  return score;
}

/// Rank contract: at most k hits over paragraph entities (never headings),
/// sorted by score descending with ties broken by coordinate ascending.
class Ranker {
 public:
  virtual ~Ranker() = default;
  virtual std::vector<RankHit> rank(std::string_view query, int k) const = 0;
};

class LexicalRanker : public Ranker {
 public:
  explicit LexicalRanker(const DocumentIndex& index, double k1 = 1.2, double b = 0.75)
      : stats_(CorpusStats::from_index(index)), k1_(k1), b_(b) {}

  std::vector<RankHit> rank(std::string_view query, int k) const override {
    std::vector<std::string> terms = normalize_terms(query);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    if (terms.empty()) throw Error(ErrorCode::EmptyQuery, "query must be non-empty");
    if (k < 1) throw Error(ErrorCode::EmptyQuery, "k must be >= 1");

    std::vector<RankHit> hits;
    for (const auto& ps : stats_.paragraphs) {
      const double score = lexical_score(terms, ps, stats_, k1_, b_);
      if (score > 0.0) hits.push_back({ps.coordinate, score});
    }
    std::sort(hits.begin(), hits.end(), [](const RankHit& a, const RankHit& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.coordinate < b.coordinate;
    });
    if (hits.size() > static_cast<std::size_t>(k)) hits.resize(static_cast<std::size_t>(k));
    return hits;
  }

  const CorpusStats& stats() const { return stats_; }

 private:
  CorpusStats stats_;
  double k1_;
  double b_;
};

inline std::vector<RankHit> rank(const DocumentIndex& index, std::string_view query, int k) {
  return LexicalRanker(index).rank(query, k);
}

/// Expands one hit into its scan-window slice: coordinates j in
/// [max(0, j_hit-up), min(n_para-1, j_hit+down)] within the hit's section.
inline std::vector<Coordinate> scan(const Coordinate& hit, const ScanWindow& window,
                                    const DocumentIndex& index) {
  const int n_para = index.section_length(hit.doc_id, hit.sec_id);
  if (hit.para_idx < 0 || hit.para_idx >= n_para)
    throw Error(ErrorCode::ParagraphOutOfRange,
                "para_idx " + std::to_string(hit.para_idx) + " out of range for (" +
                    std::to_string(hit.doc_id) + "," + std::to_string(hit.sec_id) + ")");
  const int lo = std::max(0, hit.para_idx - window.up);
  const int hi = std::min(n_para - 1, hit.para_idx + window.down);
  std::vector<Coordinate> out;
  for (int j = lo; j <= hi; ++j) out.push_back({hit.doc_id, hit.sec_id, j});
  return out;
}

/// Concatenates per-hit scans in rank order and removes repeated coordinates,
/// keeping the first occurrence. Output order is exactly construction order.
inline std::vector<Coordinate> expand_and_dedup(const std::vector<RankHit>& hits,
                                                const ScanWindow& window,
                                                const DocumentIndex& index) {
  std::vector<Coordinate> out;
  std::set<Coordinate> seen;
  for (const auto& hit : hits) {
    for (const auto& coord : scan(hit.coordinate, window, index)) {
      if (seen.insert(coord).second) out.push_back(coord);
    }
  }
  return out;
}

}  // namespace deepread
