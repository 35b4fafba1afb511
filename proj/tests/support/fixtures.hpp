#pragma once

// Shared test fixtures: the canonical tiny document exercised throughout the
// suite, plus its frozen golden serializations.

#include <string>

#include "deepread/index.hpp"
#include "deepread/markdown.hpp"

namespace testsupport {

inline const char* kTinyDocMarkdown =
    "# Intro\n"
    "Alpha.\n"
    "\n"
    "Beta.\n"
    "## Details\n"
    "Gamma.\n"
    "\n"
    "Delta.\n"
    "\n"
    "Epsilon.\n"
    "# Conclusion\n"
    "Zeta.";

inline deepread::DocumentSource tinydoc_source(int doc_id = 1) {
  return {doc_id, "tinydoc", kTinyDocMarkdown};
}

inline deepread::DocumentIndex tinydoc_index() {
  return deepread::build_index({deepread::parse_document(tinydoc_source())});
}

// serialize_toc golden, frozen from the schema line format and the tinydoc
// paragraph/word counts (two sections under "Intro" nesting).
inline const char* kTinyDocTocGolden =
    "- (1) [0] Intro | paragraphs=2 | tokens=2 | children=[1]\n"
    "  - (1) [1] Details | paragraphs=3 | tokens=3 | children=[]\n"
    "- (1) [2] Conclusion | paragraphs=1 | tokens=1 | children=[]";

// format_paragraphs goldens for the scripted acceptance session.
inline const char* kRetrieveDeltaGolden = "doc_id=1, sec_id=1, para_id=1, text=\"Delta.\"";

inline const char* kReadDetailsGolden =
    "doc_id=1, sec_id=1, para_id=0, text=\"Gamma.\"\n"
    "doc_id=1, sec_id=1, para_id=1, text=\"Delta.\"\n"
    "doc_id=1, sec_id=1, para_id=2, text=\"Epsilon.\"";

}  // namespace testsupport
