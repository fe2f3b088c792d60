#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fragsel/core.hpp"
#include "fragsel/segment_text.hpp"

namespace fragsel {

using Json = nlohmann::json;

// Canonical JSON forms. Doubles round-trip exactly through these.
Json to_json(const Query& q);
Json to_json(const Document& d);
Json to_json(const BoundingBox& b);
Json to_json(const TextFragment& f);
Json to_json(const VisualFragment& f);
Json to_json(const EvidenceItem& item);
Json to_json(const SegmentScoreTrace& trace);
Json to_json(const Config& cfg);

Query query_from_json(const Json& j);
Document document_from_json(const Json& j);
BoundingBox box_from_json(const Json& j);
TextFragment text_fragment_from_json(const Json& j);
VisualFragment visual_fragment_from_json(const Json& j);
EvidenceItem evidence_item_from_json(const Json& j);
Config config_from_json(const Json& j);

// Stable identity string for a fragment, used as the fixture lookup key for
// likelihood and teacher backends ("none" stands for the fragment-free
// baseline request).
std::string fragment_key(const EvidenceItem& item);
std::string baseline_fragment_key();

// Parses one JSON value per line; empty lines are skipped. Throws DataError
// with the line number on malformed input.
std::vector<Json> read_jsonl(const std::string& path);
Json parse_json(const std::string& text, const std::string& what);
Json load_json_file(const std::string& path);

}  // namespace fragsel
