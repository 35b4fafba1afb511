#pragma once

#include <cctype>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace deepread {

/// One input document: already-parsed Markdown text plus its collection id.
struct DocumentSource {
  int doc_id = 0;
  std::string title;
  std::string markdown;
};

/// Unique address of one paragraph: (doc_id, sec_id, para_idx), 0-based.
struct Coordinate {
  int doc_id = 0;
  int sec_id = 0;
  int para_idx = 0;

  auto operator<=>(const Coordinate&) const = default;
};

/// Hierarchy node. sec_ids are consecutive integers in document order;
/// children holds the sec_ids of immediate sub-headings. n_para/n_tok cover
/// only the paragraphs directly under this heading, not its sub-headings.
struct HeadingEntity {
  int doc_id = 0;
  int sec_id = 0;
  int level = 1;
  std::string title;
  std::vector<int> children;
  int n_para = 0;
  std::int64_t n_tok = 0;

  bool operator==(const HeadingEntity&) const = default;
};

/// Atomic retrieval unit: paragraph text plus its coordinate.
struct ParagraphEntity {
  std::string text;
  int doc_id = 0;
  int sec_id = 0;
  int para_idx = 0;

  Coordinate coordinate() const { return {doc_id, sec_id, para_idx}; }
  bool operator==(const ParagraphEntity&) const = default;
};

/// A fully parsed document: headings indexed by sec_id, and per-section
/// ordered paragraph lists (paragraphs[sec_id] are that heading's direct
/// paragraphs). Immutable after construction.
struct ParsedDocument {
  int doc_id = 0;
  std::string title;
  std::vector<HeadingEntity> headings;
  std::vector<std::vector<ParagraphEntity>> paragraphs;

  bool operator==(const ParsedDocument&) const = default;

  std::size_t paragraph_count() const {
    std::size_t n = 0;
    for (const auto& section : paragraphs) n += section.size();
    return n;
  }
};

/// Token-count strategy slot. The default estimates by whitespace-delimited
/// word count; a model-matched tokenizer can be plugged in instead.
using TokenCounter = std::function<std::int64_t(std::string_view)>;

inline std::int64_t count_tokens(std::string_view text) {
  std::int64_t count = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

inline const char* kDefaultTokenizerName = "whitespace";

}  // namespace deepread
