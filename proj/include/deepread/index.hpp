#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "deepread/entities.hpp"
#include "deepread/error.hpp"
#include "deepread/markdown.hpp"
#include "deepread/version.hpp"

namespace deepread {

struct IndexMetadata {
  std::string tool_version = kToolVersion;
  std::string tokenizer = kDefaultTokenizerName;

  bool operator==(const IndexMetadata&) const = default;
};

/// One serialized TOC entry; depth is nesting distance from a root heading.
struct TocLine {
  int doc_id = 0;
  int sec_id = 0;
  int depth = 0;
  std::string title;
  int n_para = 0;
  std::int64_t n_tok = 0;
  std::vector<int> children;
};

/// Immutable multi-document collection. Resolves coordinates to paragraphs
/// and is safe to share across concurrent readers once built.
class DocumentIndex {
 public:
  DocumentIndex() = default;

  const std::vector<ParsedDocument>& documents() const { return documents_; }
  const IndexMetadata& metadata() const { return metadata_; }

  const ParsedDocument& document(int doc_id) const {
    auto it = by_id_.find(doc_id);
    if (it == by_id_.end())
      throw Error(ErrorCode::UnknownDocument, "unknown doc_id " + std::to_string(doc_id));
    return documents_[it->second];
  }

  const HeadingEntity& heading(int doc_id, int sec_id) const {
    const auto& doc = document(doc_id);
    if (sec_id < 0 || sec_id >= static_cast<int>(doc.headings.size()))
      throw Error(ErrorCode::UnknownSection, "unknown sec_id " + std::to_string(sec_id) +
                                                 " in doc " + std::to_string(doc_id));
    return doc.headings[static_cast<std::size_t>(sec_id)];
  }

  const ParagraphEntity& paragraph(const Coordinate& coord) const {
    const auto& doc = document(coord.doc_id);
    if (coord.sec_id < 0 || coord.sec_id >= static_cast<int>(doc.headings.size()))
      throw Error(ErrorCode::UnknownSection, "unknown sec_id " + std::to_string(coord.sec_id) +
                                                 " in doc " + std::to_string(coord.doc_id));
    const auto& section = doc.paragraphs[static_cast<std::size_t>(coord.sec_id)];
    if (coord.para_idx < 0 || coord.para_idx >= static_cast<int>(section.size()))
      throw Error(ErrorCode::ParagraphOutOfRange,
                  "para_idx " + std::to_string(coord.para_idx) + " out of range for (" +
                      std::to_string(coord.doc_id) + "," + std::to_string(coord.sec_id) +
                      "): section has " + std::to_string(section.size()) + " paragraphs");
    return section[static_cast<std::size_t>(coord.para_idx)];
  }

  int section_length(int doc_id, int sec_id) const { return heading(doc_id, sec_id).n_para; }

  std::size_t heading_count() const {
    std::size_t n = 0;
    for (const auto& d : documents_) n += d.headings.size();
    return n;
  }

  std::size_t paragraph_count() const {
    std::size_t n = 0;
    for (const auto& d : documents_) n += d.paragraph_count();
    return n;
  }

  /// Restricts the collection to the given doc_ids, preserving build order.
  DocumentIndex subset(const std::vector<int>& doc_ids) const {
    DocumentIndex out;
    out.metadata_ = metadata_;
    for (int id : doc_ids) {
      const auto& doc = document(id);
      out.by_id_[id] = out.documents_.size();
      out.documents_.push_back(doc);
    }
    if (out.documents_.empty())
      throw Error(ErrorCode::EmptyCollection, "document subset is empty");
    return out;
  }

  bool operator==(const DocumentIndex& other) const {
    return documents_ == other.documents_ && metadata_ == other.metadata_;
  }

  friend DocumentIndex build_index(std::vector<ParsedDocument> docs, IndexMetadata metadata);

 private:
  std::vector<ParsedDocument> documents_;
  std::unordered_map<int, std::size_t> by_id_;
  IndexMetadata metadata_;
};

/// Assembles an index from validated documents. Input order is preserved and
/// becomes the TOC document order.
inline DocumentIndex build_index(std::vector<ParsedDocument> docs, IndexMetadata metadata = {}) {
  if (docs.empty()) throw Error(ErrorCode::EmptyCollection, "no documents to index");
  DocumentIndex index;
  index.metadata_ = std::move(metadata);
  for (auto& doc : docs) {
    const auto violations = validate_structure(doc);
    if (!violations.empty()) {
      throw Error(ErrorCode::InvalidDocument,
                  "document " + std::to_string(doc.doc_id) + " violates " + violations.front().rule +
                      " (sec_id " + std::to_string(violations.front().sec_id) + "): " +
                      violations.front().detail);
    }
    if (!index.by_id_.emplace(doc.doc_id, index.documents_.size()).second)
      throw Error(ErrorCode::DuplicateDocument, "duplicate doc_id " + std::to_string(doc.doc_id));
    index.documents_.push_back(std::move(doc));
  }
  return index;
}

inline std::vector<TocLine> toc_lines(const DocumentIndex& index) {
  std::vector<TocLine> lines;
  for (const auto& doc : index.documents()) {
    // Depth of a heading = depth of its parent + 1; roots sit at depth 0.
    std::vector<int> depth(doc.headings.size(), 0);
    for (const auto& h : doc.headings)
      for (int child : h.children)
        depth[static_cast<std::size_t>(child)] = depth[static_cast<std::size_t>(h.sec_id)] + 1;
    for (const auto& h : doc.headings)
      lines.push_back({h.doc_id, h.sec_id, depth[static_cast<std::size_t>(h.sec_id)], h.title,
                       h.n_para, h.n_tok, h.children});
  }
  return lines;
}

/// Serializes the navigation schema injected into the system prompt: one line
/// per heading, `- (doc) [sec] Title | paragraphs=N | tokens=N | children=[...]`,
/// indented two spaces per nesting depth. Paragraph text never appears here.
inline std::string serialize_toc(const DocumentIndex& index) {
  std::string out;
  for (const auto& line : toc_lines(index)) {
    if (!out.empty()) out += '\n';
    out.append(static_cast<std::size_t>(line.depth) * 2, ' ');
    out += "- (" + std::to_string(line.doc_id) + ") [" + std::to_string(line.sec_id) + "] " +
           line.title + " | paragraphs=" + std::to_string(line.n_para) +
           " | tokens=" + std::to_string(line.n_tok) + " | children=[";
    for (std::size_t i = 0; i < line.children.size(); ++i) {
      if (i > 0) out += ',';
      out += std::to_string(line.children[i]);
    }
    out += ']';
  }
  return out;
}

inline const ParagraphEntity& get_paragraph(const DocumentIndex& index, const Coordinate& coord) {
  return index.paragraph(coord);
}

inline int section_length(const DocumentIndex& index, int doc_id, int sec_id) {
  return index.section_length(doc_id, sec_id);
}

namespace detail {

inline nlohmann::json document_to_json(const ParsedDocument& doc) {
  nlohmann::json headings = nlohmann::json::array();
  for (const auto& h : doc.headings) {
    headings.push_back({{"sec_id", h.sec_id},
                        {"level", h.level},
                        {"title", h.title},
                        {"children", h.children},
                        {"n_para", h.n_para},
                        {"n_tok", h.n_tok}});
  }
  nlohmann::json sections = nlohmann::json::array();
  for (const auto& section : doc.paragraphs) {
    nlohmann::json paras = nlohmann::json::array();
    for (const auto& p : section) paras.push_back({{"para_idx", p.para_idx}, {"text", p.text}});
    sections.push_back(std::move(paras));
  }
  return {{"doc_id", doc.doc_id},
          {"title", doc.title},
          {"headings", std::move(headings)},
          {"paragraphs", std::move(sections)}};
}

inline ParsedDocument document_from_json(const nlohmann::json& j) {
  ParsedDocument doc;
  doc.doc_id = j.at("doc_id").get<int>();
  doc.title = j.at("title").get<std::string>();
  for (const auto& h : j.at("headings")) {
    doc.headings.push_back({doc.doc_id, h.at("sec_id").get<int>(), h.at("level").get<int>(),
                            h.at("title").get<std::string>(),
                            h.at("children").get<std::vector<int>>(), h.at("n_para").get<int>(),
                            h.at("n_tok").get<std::int64_t>()});
  }
  int sec_id = 0;
  for (const auto& section : j.at("paragraphs")) {
    std::vector<ParagraphEntity> paras;
    for (const auto& p : section)
      paras.push_back({p.at("text").get<std::string>(), doc.doc_id, sec_id,
                       p.at("para_idx").get<int>()});
    doc.paragraphs.push_back(std::move(paras));
    ++sec_id;
  }
  return doc;
}

}  // namespace detail

/// Writes the index as versioned, human-diffable JSON.
inline void save_index(const DocumentIndex& index, const std::filesystem::path& path) {
  nlohmann::json docs = nlohmann::json::array();
  for (const auto& doc : index.documents()) docs.push_back(detail::document_to_json(doc));
  nlohmann::json j = {{"format", "deepread-index"},
                      {"version", kIndexFormatVersion},
                      {"tool_version", index.metadata().tool_version},
                      {"tokenizer", index.metadata().tokenizer},
                      {"documents", std::move(docs)}};
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write index file: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed writing index file: " + path.string());
}

inline DocumentIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open index file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, "malformed index file " + path.string() + ": " + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "deepread-index")
    throw Error(ErrorCode::ParseError, "not a deepread index file: " + path.string());
  const int version = j.value("version", -1);
  if (version != kIndexFormatVersion)
    throw Error(ErrorCode::IncompatibleIndex,
                "index format version " + std::to_string(version) + " is not supported (expected " +
                    std::to_string(kIndexFormatVersion) + ")");
  IndexMetadata meta;
  meta.tool_version = j.value("tool_version", "");
  meta.tokenizer = j.value("tokenizer", "");
  std::vector<ParsedDocument> docs;
  try {
    for (const auto& d : j.at("documents")) docs.push_back(detail::document_from_json(d));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, "malformed index file " + path.string() + ": " + e.what());
  }
  return build_index(std::move(docs), std::move(meta));
}

}  // namespace deepread
