#include "fragsel/wire.hpp"

#include <cmath>

namespace fragsel {

Json wire_retrieve_request(const Query& query, long n_ret) {
    return Json{{"v", kWireVersion}, {"query", to_json(query)}, {"n_ret", n_ret}};
}

Json wire_score_request(const Query& query, const std::string& text) {
    return Json{{"v", kWireVersion}, {"query", to_json(query)}, {"text", text}};
}

Json wire_detect_request(const Query& query, const std::string& image_ref) {
    return Json{{"v", kWireVersion}, {"query", to_json(query)}, {"image_ref", image_ref}};
}

Json wire_logprobs_request(const Query& query, const std::optional<EvidenceItem>& fragment,
                           const std::vector<std::string>& answer_tokens) {
    Json j{{"v", kWireVersion},
           {"query", to_json(query)},
           {"answer_tokens", answer_tokens}};
    j["fragment"] = fragment ? to_json(*fragment) : Json(nullptr);
    return j;
}

Json wire_teacher_request(const Query& query, const EvidenceItem& fragment) {
    return Json{{"v", kWireVersion}, {"query", to_json(query)}, {"fragment", to_json(fragment)}};
}

Json wire_generate_request(const Query& query, const std::vector<EvidenceItem>& context) {
    Json ctx = Json::array();
    for (const auto& item : context) ctx.push_back(to_json(item));
    return Json{{"v", kWireVersion}, {"query", to_json(query)}, {"context", std::move(ctx)}};
}

namespace {

const Json& field(const Json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) {
        throw Error(ErrorKind::BackendFailure,
                    std::string("backend response is missing field '") + name + "'");
    }
    return *it;
}

double finite_number(const Json& j, const char* what) {
    if (!j.is_number()) {
        throw Error(ErrorKind::BackendFailure, std::string(what) + " is not a number");
    }
    double v = j.get<double>();
    if (!std::isfinite(v)) {
        throw Error(ErrorKind::BackendFailure, std::string(what) + " is not finite");
    }
    return v;
}

}  // namespace

std::vector<Document> parse_retrieve_response(const Json& j) {
    std::vector<Document> docs;
    for (const auto& d : field(j, "docs")) {
        try {
            docs.push_back(document_from_json(d));
        } catch (const Error& e) {
            throw Error(ErrorKind::BackendFailure, std::string("bad document in response: ") + e.what());
        }
    }
    return docs;
}

double parse_score_response(const Json& j) {
    return finite_number(field(j, "score"), "score");
}

std::vector<DetectionCandidate> parse_detect_response(const Json& j) {
    std::vector<DetectionCandidate> out;
    for (const auto& c : field(j, "candidates")) {
        DetectionCandidate cand;
        try {
            cand.box = box_from_json(field(c, "box"));
        } catch (const Error& e) {
            throw Error(ErrorKind::BackendFailure, std::string("bad candidate box: ") + e.what());
        }
        cand.objectness = finite_number(field(c, "objectness"), "objectness");
        cand.semantic_score = finite_number(field(c, "semantic"), "semantic");
        out.push_back(cand);
    }
    return out;
}

std::vector<double> parse_logprobs_response(const Json& j) {
    std::vector<double> out;
    for (const auto& v : field(j, "logprobs")) {
        out.push_back(finite_number(v, "logprob"));
    }
    return out;
}

double parse_teacher_response(const Json& j) {
    return finite_number(field(j, "logit"), "teacher logit");
}

std::string parse_generate_response(const Json& j) {
    const Json& a = field(j, "answer");
    if (!a.is_string()) {
        throw Error(ErrorKind::BackendFailure, "answer is not a string");
    }
    return a.get<std::string>();
}

}  // namespace fragsel
