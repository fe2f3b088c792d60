#include "fragsel/json_io.hpp"

#include <fstream>

namespace fragsel {

namespace {

const Json& require_field(const Json& j, const char* field, const std::string& what) {
    auto it = j.find(field);
    if (it == j.end()) {
        throw Error(ErrorKind::DataError, what + " is missing field '" + field + "'");
    }
    return *it;
}

}  // namespace

Json to_json(const Query& q) {
    Json j{{"id", q.id}, {"text", q.text}};
    if (q.image_ref) j["image_ref"] = *q.image_ref;
    return j;
}

Query query_from_json(const Json& j) {
    Query q;
    q.id = require_field(j, "id", "query").get<std::string>();
    q.text = require_field(j, "text", "query").get<std::string>();
    if (j.contains("image_ref") && !j["image_ref"].is_null()) {
        q.image_ref = j["image_ref"].get<std::string>();
    }
    q.validate();
    return q;
}

Json to_json(const Document& d) {
    Json j{{"id", d.id}, {"token_count", d.token_count}};
    if (d.is_image()) {
        j["modality"] = "image";
        j["image_ref"] = d.image_ref;
    } else {
        j["modality"] = "text";
        j["body"] = d.body;
    }
    return j;
}

Document document_from_json(const Json& j) {
    const std::string id = require_field(j, "id", "document").get<std::string>();
    const std::string modality = require_field(j, "modality", "document").get<std::string>();
    if (modality == "text") {
        return Document::make_text(id, require_field(j, "body", "document").get<std::string>());
    }
    if (modality == "image") {
        return Document::make_image(id,
                                    require_field(j, "image_ref", "document").get<std::string>());
    }
    throw Error(ErrorKind::DataError, "document '" + id + "' has unknown modality '" + modality + "'");
}

Json to_json(const BoundingBox& b) {
    return Json::array({b.x_min, b.y_min, b.x_max, b.y_max});
}

BoundingBox box_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 4) {
        throw Error(ErrorKind::DataError, "bounding box must be an array [x0,y0,x1,y1]");
    }
    BoundingBox b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
    if (!b.valid()) {
        throw Error(ErrorKind::DataError, "bounding box " + j.dump() + " has non-positive extent");
    }
    return b;
}

Json to_json(const TextFragment& f) {
    return Json{{"parent_doc_id", f.parent_doc_id},
                {"span", Json::array({f.span.start, f.span.end})},
                {"text", f.text},
                {"relevance_score", f.relevance_score}};
}

TextFragment text_fragment_from_json(const Json& j) {
    TextFragment f;
    f.parent_doc_id = require_field(j, "parent_doc_id", "text fragment").get<std::string>();
    const Json& span = require_field(j, "span", "text fragment");
    if (!span.is_array() || span.size() != 2) {
        throw Error(ErrorKind::DataError, "text fragment span must be [start,end]");
    }
    f.span = SentenceSpan{span[0].get<int>(), span[1].get<int>()};
    if (f.span.start < 0 || f.span.end < f.span.start) {
        throw Error(ErrorKind::DataError, "text fragment span " + span.dump() + " is invalid");
    }
    f.text = require_field(j, "text", "text fragment").get<std::string>();
    f.relevance_score = j.value("relevance_score", 0.0);
    return f;
}

Json to_json(const VisualFragment& f) {
    return Json{{"parent_doc_id", f.parent_doc_id},
                {"box", to_json(f.box)},
                {"objectness", f.objectness},
                {"semantic_score", f.semantic_score}};
}

VisualFragment visual_fragment_from_json(const Json& j) {
    VisualFragment f;
    f.parent_doc_id = require_field(j, "parent_doc_id", "visual fragment").get<std::string>();
    f.box = box_from_json(require_field(j, "box", "visual fragment"));
    f.objectness = require_field(j, "objectness", "visual fragment").get<double>();
    f.semantic_score = require_field(j, "semantic_score", "visual fragment").get<double>();
    if (!(f.objectness >= 0.0 && f.objectness <= 1.0) ||
        !(f.semantic_score >= 0.0 && f.semantic_score <= 1.0)) {
        throw Error(ErrorKind::DataError, "visual fragment scores must lie in [0,1]");
    }
    return f;
}

namespace {

const char* kind_name(EvidenceKind kind) {
    switch (kind) {
        case EvidenceKind::CoarseDoc: return "coarse_doc";
        case EvidenceKind::TextFrag: return "text_frag";
        case EvidenceKind::VisualFrag: return "visual_frag";
        case EvidenceKind::OriginalImage: return "original_image";
    }
    return "unknown";
}

}  // namespace

Json to_json(const EvidenceItem& item) {
    Json payload;
    switch (item.kind) {
        case EvidenceKind::CoarseDoc:
        case EvidenceKind::OriginalImage:
            payload = to_json(*item.doc());
            break;
        case EvidenceKind::TextFrag:
            payload = to_json(*item.text_fragment());
            break;
        case EvidenceKind::VisualFrag:
            payload = to_json(*item.visual_fragment());
            break;
    }
    Json j{{"kind", kind_name(item.kind)}, {"payload", std::move(payload)}};
    if (item.selector_score) j["selector_score"] = *item.selector_score;
    return j;
}

EvidenceItem evidence_item_from_json(const Json& j) {
    const std::string kind = require_field(j, "kind", "evidence item").get<std::string>();
    const Json& payload = require_field(j, "payload", "evidence item");
    EvidenceItem item;
    if (kind == "coarse_doc") {
        item = EvidenceItem::coarse_doc(document_from_json(payload));
    } else if (kind == "text_frag") {
        item = EvidenceItem::text_frag(text_fragment_from_json(payload));
    } else if (kind == "visual_frag") {
        item = EvidenceItem::visual_frag(visual_fragment_from_json(payload));
    } else if (kind == "original_image") {
        Document doc = document_from_json(payload);
        if (!doc.is_image()) {
            throw Error(ErrorKind::DataError, "original_image payload must be an image document");
        }
        item = EvidenceItem::original_image(std::move(doc));
    } else {
        throw Error(ErrorKind::DataError, "unknown evidence kind '" + kind + "'");
    }
    if (j.contains("selector_score") && !j["selector_score"].is_null()) {
        item.selector_score = j["selector_score"].get<double>();
    }
    return item;
}

Json to_json(const SegmentScoreTrace& trace) {
    Json visited = Json::array();
    for (const auto& [span, score] : trace.visited) {
        visited.push_back(Json{{"span", Json::array({span.start, span.end})}, {"score", score}});
    }
    return Json{{"visited", std::move(visited)},
                {"result_span", Json::array({trace.result_span.start, trace.result_span.end})}};
}

Json to_json(const Config& cfg) {
    return Json{{"n_ret", cfg.n_ret},
                {"n_seg", cfg.n_seg},
                {"k", cfg.k},
                {"tau_fig", cfg.tau_fig},
                {"tau_obj", cfg.tau_obj},
                {"tau_sem", cfg.tau_sem},
                {"tau_size", cfg.tau_size},
                {"alpha", cfg.alpha},
                {"temperature", cfg.temperature},
                {"image_token_cost", cfg.image_token_cost},
                {"parallelism", cfg.parallelism},
                {"collect_trace_nodes", cfg.collect_trace_nodes}};
}

Config config_from_json(const Json& j) {
    Config cfg;
    cfg.n_ret = j.value("n_ret", cfg.n_ret);
    cfg.n_seg = j.value("n_seg", cfg.n_seg);
    cfg.k = j.value("k", cfg.k);
    cfg.tau_fig = j.value("tau_fig", cfg.tau_fig);
    cfg.tau_obj = j.value("tau_obj", cfg.tau_obj);
    cfg.tau_sem = j.value("tau_sem", cfg.tau_sem);
    cfg.tau_size = j.value("tau_size", cfg.tau_size);
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.temperature = j.value("temperature", cfg.temperature);
    cfg.image_token_cost = j.value("image_token_cost", cfg.image_token_cost);
    cfg.parallelism = j.value("parallelism", cfg.parallelism);
    cfg.collect_trace_nodes = j.value("collect_trace_nodes", cfg.collect_trace_nodes);
    cfg.validate();
    return cfg;
}

std::string fragment_key(const EvidenceItem& item) {
    switch (item.kind) {
        case EvidenceKind::CoarseDoc:
            if (item.doc()->is_image()) return "image:" + item.doc()->image_ref;
            return "text:" + item.doc()->body;
        case EvidenceKind::TextFrag:
            return "text:" + item.text_fragment()->text;
        case EvidenceKind::OriginalImage:
            return "image:" + item.doc()->image_ref;
        case EvidenceKind::VisualFrag: {
            const auto& f = *item.visual_fragment();
            return "roi:" + f.parent_doc_id + ":" + to_json(f.box).dump();
        }
    }
    return {};
}

std::string baseline_fragment_key() { return "none"; }

std::vector<Json> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::DataError, "cannot open '" + path + "'");
    }
    std::vector<Json> lines;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (normalize_whitespace(line).empty()) continue;
        try {
            lines.push_back(Json::parse(line));
        } catch (const Json::parse_error& e) {
            throw Error(ErrorKind::DataError,
                        path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return lines;
}

Json parse_json(const std::string& text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorKind::DataError, what + ": " + e.what());
    }
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::DataError, "cannot open '" + path + "'");
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_json(text, path);
}

}  // namespace fragsel
