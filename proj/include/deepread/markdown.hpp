#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deepread/entities.hpp"
#include "deepread/error.hpp"

namespace deepread {

enum class BlockKind { Heading, Paragraph };

/// One source block. For headings, level is the ATX depth and text the title;
/// for paragraphs, text is the block content with source line breaks kept.
struct Block {
  BlockKind kind = BlockKind::Paragraph;
  int level = 0;
  std::string text;

  bool operator==(const Block&) const = default;
};

struct ParserOptions {
  TokenCounter tokenizer = count_tokens;
  std::string tokenizer_name = kDefaultTokenizerName;
};

namespace detail {

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

inline bool is_blank(std::string_view line) {
  for (unsigned char c : line)
    if (!std::isspace(c)) return false;
  return true;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// ATX heading: up to 3 leading spaces, 1-6 '#', then whitespace or
// end-of-line. Returns (level, title) or nullopt. Setext underlines are not
// recognized; OCR pipelines emit ATX.
inline std::optional<std::pair<int, std::string>> match_atx_heading(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && i < 3 && line[i] == ' ') ++i;
  std::size_t hashes = 0;
  while (i + hashes < line.size() && line[i + hashes] == '#') ++hashes;
  if (hashes < 1 || hashes > 6) return std::nullopt;
  std::size_t rest = i + hashes;
  if (rest < line.size() && line[rest] != ' ' && line[rest] != '\t') return std::nullopt;
  std::string_view title = trim(line.substr(rest));
  // Trailing closing hashes ("## Title ##") are decoration, not content.
  while (!title.empty() && title.back() == '#') title.remove_suffix(1);
  title = trim(title);
  return std::make_pair(static_cast<int>(hashes), std::string(title));
}

// Fence opener: 3+ backticks or tildes after optional indentation. Returns
// the fence character and run length.
inline std::optional<std::pair<char, std::size_t>> match_fence(std::string_view line) {
  std::string_view t = line;
  std::size_t i = 0;
  while (i < t.size() && i < 3 && t[i] == ' ') ++i;
  t.remove_prefix(i);
  if (t.size() < 3) return std::nullopt;
  char c = t.front();
  if (c != '`' && c != '~') return std::nullopt;
  std::size_t run = 0;
  while (run < t.size() && t[run] == c) ++run;
  if (run < 3) return std::nullopt;
  return std::make_pair(c, run);
}

inline bool closes_fence(std::string_view line, char fence_char, std::size_t open_len) {
  auto m = match_fence(line);
  if (!m || m->first != fence_char || m->second < open_len) return false;
  return trim(line).find_first_not_of(fence_char) == std::string_view::npos;
}

inline bool is_table_row(std::string_view line) {
  std::string_view t = trim(line);
  return !t.empty() && t.front() == '|';
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(strip_cr(text.substr(start)));
      break;
    }
    lines.push_back(strip_cr(text.substr(start, nl - start)));
    start = nl + 1;
  }
  return lines;
}

}  // namespace detail

/// Splits Markdown into source-order blocks. Headings come from ATX lines;
/// consecutive non-blank lines merge into one paragraph; fenced code blocks
/// and pipe-tables each form a single paragraph block. Lenient: malformed
/// markup degrades to paragraph text, never an error.
inline std::vector<Block> segment_blocks(std::string_view markdown) {
  std::vector<Block> blocks;
  std::vector<std::string> pending;

  auto flush = [&] {
    if (pending.empty()) return;
    std::string text = pending.front();
    for (std::size_t i = 1; i < pending.size(); ++i) {
      text += '\n';
      text += pending[i];
    }
    blocks.push_back({BlockKind::Paragraph, 0, std::move(text)});
    pending.clear();
  };

  const auto lines = detail::split_lines(markdown);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (detail::is_blank(line)) {
      flush();
      continue;
    }
    if (auto heading = detail::match_atx_heading(line)) {
      flush();
      blocks.push_back({BlockKind::Heading, heading->first, std::move(heading->second)});
      continue;
    }
    if (auto fence = detail::match_fence(line)) {
      flush();
      std::vector<std::string> fenced{std::string(line)};
      while (++i < lines.size()) {
        fenced.emplace_back(lines[i]);
        if (detail::closes_fence(lines[i], fence->first, fence->second)) break;
      }
      std::string text = fenced.front();
      for (std::size_t j = 1; j < fenced.size(); ++j) {
        text += '\n';
        text += fenced[j];
      }
      blocks.push_back({BlockKind::Paragraph, 0, std::move(text)});
      continue;
    }
    if (detail::is_table_row(line)) {
      flush();
      std::vector<std::string> rows{std::string(line)};
      while (i + 1 < lines.size() && detail::is_table_row(lines[i + 1])) rows.emplace_back(lines[++i]);
      std::string text = rows.front();
      for (std::size_t j = 1; j < rows.size(); ++j) {
        text += '\n';
        text += rows[j];
      }
      blocks.push_back({BlockKind::Paragraph, 0, std::move(text)});
      continue;
    }
    pending.emplace_back(line);
  }
  flush();
  return blocks;
}

/// Builds the entity model from one source document. Heading blocks become
/// HeadingEntity values with sec_id in order of appearance; each paragraph
/// attaches to the most recent heading. Content before the first heading goes
/// under a synthetic level-1 root titled with the document title, so no
/// paragraph is orphaned.
inline ParsedDocument parse_document(const DocumentSource& source,
                                     const ParserOptions& options = {}) {
  const auto blocks = segment_blocks(source.markdown);
  if (blocks.empty()) {
    throw Error(ErrorCode::EmptyDocument,
                "document " + std::to_string(source.doc_id) + " has no content blocks");
  }

  ParsedDocument doc;
  doc.doc_id = source.doc_id;
  doc.title = source.title;

  const bool needs_root = blocks.front().kind != BlockKind::Heading;
  if (needs_root) {
    doc.headings.push_back({source.doc_id, 0, 1, source.title, {}, 0, 0});
    doc.paragraphs.emplace_back();
  }

  // (sec_id, level) stack: a heading nests under the nearest preceding
  // heading of strictly smaller level; skipped levels fall through to the
  // nearest shallower ancestor.
  std::vector<std::pair<int, int>> open;
  if (needs_root) open.push_back({0, 1});

  for (const auto& block : blocks) {
    if (block.kind == BlockKind::Heading) {
      const int sec_id = static_cast<int>(doc.headings.size());
      while (!open.empty() && open.back().second >= block.level) open.pop_back();
      if (!open.empty()) doc.headings[open.back().first].children.push_back(sec_id);
      open.push_back({sec_id, block.level});
      doc.headings.push_back({source.doc_id, sec_id, block.level, block.text, {}, 0, 0});
      doc.paragraphs.emplace_back();
    } else {
      auto& heading = doc.headings.back();
      auto& section = doc.paragraphs.back();
      section.push_back(
          {block.text, source.doc_id, heading.sec_id, static_cast<int>(section.size())});
      heading.n_para += 1;
      heading.n_tok += options.tokenizer(block.text);
    }
  }
  return doc;
}

/// One broken invariant found by validate_structure.
struct Violation {
  std::string rule;
  int sec_id = -1;
  std::string detail;
};

/// Checks the ParsedDocument invariants. Empty result means the document is
/// well-formed; each entry names the violated rule and the offending sec_id.
inline std::vector<Violation> validate_structure(const ParsedDocument& doc) {
  std::vector<Violation> out;
  const int n = static_cast<int>(doc.headings.size());

  if (doc.paragraphs.size() != doc.headings.size()) {
    out.push_back({"section-paragraph-alignment", -1,
                   "headings and paragraph sections differ in count"});
    return out;
  }

  std::vector<int> child_owner(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    const auto& h = doc.headings[static_cast<std::size_t>(i)];
    if (h.sec_id != i)
      out.push_back({"sec-id-sequence", i,
                     "expected sec_id " + std::to_string(i) + ", found " + std::to_string(h.sec_id)});
    if (h.doc_id != doc.doc_id)
      out.push_back({"doc-id-consistency", i, "heading doc_id differs from document"});
    if (h.level < 1 || h.level > 6)
      out.push_back({"level-range", i, "level " + std::to_string(h.level)});
    if (h.n_para != static_cast<int>(doc.paragraphs[static_cast<std::size_t>(i)].size()))
      out.push_back({"n-para-count", i,
                     "n_para " + std::to_string(h.n_para) + " != paragraph list length " +
                         std::to_string(doc.paragraphs[static_cast<std::size_t>(i)].size())});
    if (h.n_para == 0 && h.n_tok != 0)
      out.push_back({"n-tok-empty-section", i, "n_tok nonzero with no paragraphs"});
    for (int child : h.children) {
      if (child <= i || child >= n) {
        out.push_back({"children-forward-reference", i, "child " + std::to_string(child)});
        continue;
      }
      if (child_owner[static_cast<std::size_t>(child)] != -1)
        out.push_back({"children-single-parent", child,
                       "claimed by headings " +
                           std::to_string(child_owner[static_cast<std::size_t>(child)]) + " and " +
                           std::to_string(i)});
      child_owner[static_cast<std::size_t>(child)] = i;
    }
    const auto& section = doc.paragraphs[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < section.size(); ++j) {
      const auto& p = section[j];
      if (p.para_idx != static_cast<int>(j) || p.sec_id != i || p.doc_id != doc.doc_id) {
        out.push_back({"paragraph-coordinate", i,
                       "paragraph " + std::to_string(j) + " carries (" + std::to_string(p.doc_id) +
                           "," + std::to_string(p.sec_id) + "," + std::to_string(p.para_idx) + ")"});
      }
    }
  }
  return out;
}

}  // namespace deepread
