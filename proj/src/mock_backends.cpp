#include "fragsel/mock_backends.hpp"

#include <cmath>
#include <filesystem>

#include "fragsel/wire.hpp"

namespace fragsel {

namespace {

Json fixture_array(const Json& fixture, const char* table, const std::string& descriptor) {
    if (!fixture.is_object()) {
        throw Error(ErrorKind::FixtureParseError, descriptor + ": fixture must be a JSON object");
    }
    if (!fixture.contains(table)) return Json::array();
    if (!fixture[table].is_array()) {
        throw Error(ErrorKind::FixtureParseError,
                    descriptor + ": field '" + std::string(table) + "' must be an array");
    }
    return fixture[table];
}

Json fixture_responses(const Json& fixture) {
    if (fixture.is_object() && fixture.contains("responses") && fixture["responses"].is_object()) {
        return fixture["responses"];
    }
    return Json::object();
}

// Generic digest-keyed lookup shared by all mocks.
const Json* lookup_response(const Json& responses, const Json& request) {
    if (responses.empty()) return nullptr;
    auto it = responses.find(request.dump());
    return it == responses.end() ? nullptr : &*it;
}

[[noreturn]] void miss(const std::string& descriptor, const std::string& key) {
    throw Error(ErrorKind::FixtureMiss, descriptor + " has no entry for " + key);
}

std::string fixture_string(const Json& row, const char* name, const std::string& descriptor) {
    if (!row.contains(name) || !row[name].is_string()) {
        throw Error(ErrorKind::FixtureParseError,
                    descriptor + ": row is missing string field '" + std::string(name) + "'");
    }
    return row[name].get<std::string>();
}

}  // namespace

MockScorer::MockScorer(Json fixture, std::string descriptor)
    : responses_(fixture_responses(fixture)), descriptor_(std::move(descriptor)) {
    for (const auto& row : fixture_array(fixture, "scores", descriptor_)) {
        if (!row.contains("score") || !row["score"].is_number()) {
            throw Error(ErrorKind::FixtureParseError, descriptor_ + ": score row without number");
        }
        scores_[{fixture_string(row, "query_id", descriptor_),
                 fixture_string(row, "text", descriptor_)}] = row["score"].get<double>();
    }
}

double MockScorer::score(const Query& query, const std::string& text) {
    Json request = wire_score_request(query, text);
    calls_.append(request);
    auto it = scores_.find({query.id, text});
    if (it != scores_.end()) return it->second;
    if (const Json* r = lookup_response(responses_, request)) {
        return parse_score_response(*r);
    }
    miss(descriptor_, "(" + query.id + ", \"" + text + "\")");
}

MockRetriever::MockRetriever(Json fixture, const std::vector<Document>& corpus,
                             std::string descriptor)
    : descriptor_(std::move(descriptor)) {
    std::map<std::string, const Document*> by_id;
    for (const auto& doc : corpus) by_id[doc.id] = &doc;
    for (const auto& row : fixture_array(fixture, "retrievals", descriptor_)) {
        std::string query_id = fixture_string(row, "query_id", descriptor_);
        if (!row.contains("doc_ids") || !row["doc_ids"].is_array()) {
            throw Error(ErrorKind::FixtureParseError,
                        descriptor_ + ": retrieval row for '" + query_id + "' lacks doc_ids");
        }
        std::vector<Document> docs;
        for (const auto& id : row["doc_ids"]) {
            auto it = by_id.find(id.get<std::string>());
            if (it == by_id.end()) {
                throw Error(ErrorKind::FixtureParseError,
                            descriptor_ + ": doc id '" + id.get<std::string>() +
                                "' is not in the corpus");
            }
            docs.push_back(*it->second);
        }
        rankings_[query_id] = std::move(docs);
    }
}

std::vector<Document> MockRetriever::retrieve(const Query& query, long n_ret) {
    calls_.append(wire_retrieve_request(query, n_ret));
    auto it = rankings_.find(query.id);
    if (it == rankings_.end()) miss(descriptor_, "query '" + query.id + "'");
    const auto& ranked = it->second;
    size_t n = std::min(ranked.size(), static_cast<size_t>(std::max<long>(n_ret, 0)));
    return std::vector<Document>(ranked.begin(), ranked.begin() + static_cast<long>(n));
}

MockDetector::MockDetector(Json fixture, std::string descriptor)
    : descriptor_(std::move(descriptor)) {
    for (const auto& row : fixture_array(fixture, "detections", descriptor_)) {
        std::string query_id = fixture_string(row, "query_id", descriptor_);
        std::string image_ref = fixture_string(row, "image_ref", descriptor_);
        std::vector<DetectionCandidate> candidates;
        if (row.contains("candidates")) {
            try {
                candidates = parse_detect_response(Json{{"candidates", row["candidates"]}});
            } catch (const Error& e) {
                throw Error(ErrorKind::FixtureParseError, descriptor_ + ": " + e.what());
            }
        }
        detections_[{query_id, image_ref}] = std::move(candidates);
    }
}

std::vector<DetectionCandidate> MockDetector::detect(const Query& query,
                                                     const std::string& image_ref) {
    calls_.append(wire_detect_request(query, image_ref));
    auto it = detections_.find({query.id, image_ref});
    if (it == detections_.end()) miss(descriptor_, "(" + query.id + ", " + image_ref + ")");
    return it->second;
}

MockLikelihood::MockLikelihood(Json fixture, std::string descriptor)
    : descriptor_(std::move(descriptor)) {
    for (const auto& row : fixture_array(fixture, "logprobs", descriptor_)) {
        std::string query_id = fixture_string(row, "query_id", descriptor_);
        std::string frag = fixture_string(row, "fragment", descriptor_);
        if (!row.contains("logprobs") || !row["logprobs"].is_array()) {
            throw Error(ErrorKind::FixtureParseError,
                        descriptor_ + ": logprobs row for '" + query_id + "' lacks values");
        }
        std::vector<double> values;
        for (const auto& v : row["logprobs"]) values.push_back(v.get<double>());
        table_[{query_id, frag}] = std::move(values);
    }
}

TokenLogProbs MockLikelihood::logprobs(const Query& query,
                                       const std::optional<EvidenceItem>& fragment,
                                       const std::vector<std::string>& answer_tokens) {
    calls_.append(wire_logprobs_request(query, fragment, answer_tokens));
    const std::string key = fragment ? fragment_key(*fragment) : baseline_fragment_key();
    auto it = table_.find({query.id, key});
    if (it == table_.end()) miss(descriptor_, "(" + query.id + ", " + key + ")");
    TokenLogProbs out;
    out.answer_tokens = answer_tokens;
    out.logprobs = it->second;
    out.validate();
    return out;
}

MockTeacher::MockTeacher(Json fixture, std::string descriptor)
    : descriptor_(std::move(descriptor)) {
    for (const auto& row : fixture_array(fixture, "logits", descriptor_)) {
        if (!row.contains("logit") || !row["logit"].is_number()) {
            throw Error(ErrorKind::FixtureParseError, descriptor_ + ": logit row without number");
        }
        logits_[{fixture_string(row, "query_id", descriptor_),
                 fixture_string(row, "fragment", descriptor_)}] = row["logit"].get<double>();
    }
}

double MockTeacher::logit(const Query& query, const EvidenceItem& fragment) {
    calls_.append(wire_teacher_request(query, fragment));
    const std::string key = fragment_key(fragment);
    auto it = logits_.find({query.id, key});
    if (it == logits_.end()) miss(descriptor_, "(" + query.id + ", " + key + ")");
    if (!std::isfinite(it->second)) {
        throw Error(ErrorKind::BackendFailure, descriptor_ + " returned a non-finite logit");
    }
    return it->second;
}

MockGenerator::MockGenerator(Json fixture, std::string descriptor)
    : descriptor_(std::move(descriptor)) {
    for (const auto& row : fixture_array(fixture, "answers", descriptor_)) {
        answers_[fixture_string(row, "query_id", descriptor_)] =
            fixture_string(row, "answer", descriptor_);
    }
}

std::string MockGenerator::generate(const Query& query, const std::vector<EvidenceItem>& context) {
    calls_.append(wire_generate_request(query, context));
    auto it = answers_.find(query.id);
    if (it == answers_.end()) miss(descriptor_, "query '" + query.id + "'");
    return it->second;
}

namespace {

Json load_fixture(const std::string& path) {
    try {
        return load_json_file(path);
    } catch (const Error& e) {
        throw Error(ErrorKind::FixtureParseError, e.what());
    }
}

}  // namespace

MockBackendSet mock_backends_from_dir(const std::string& dir,
                                      const std::vector<Document>& corpus) {
    namespace fs = std::filesystem;
    MockBackendSet set;
    auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };
    auto desc = [&](const char* name) { return "fixture:" + std::string(name); };

    if (fs::exists(path("retriever.json"))) {
        set.retriever = std::make_unique<MockRetriever>(load_fixture(path("retriever.json")),
                                                        corpus, desc("retriever.json"));
    }
    if (fs::exists(path("scorer.json"))) {
        set.scorer = std::make_unique<MockScorer>(load_fixture(path("scorer.json")),
                                                  desc("scorer.json"));
    }
    if (fs::exists(path("detector.json"))) {
        set.detector = std::make_unique<MockDetector>(load_fixture(path("detector.json")),
                                                      desc("detector.json"));
    }
    if (fs::exists(path("likelihood.json"))) {
        set.likelihood = std::make_unique<MockLikelihood>(load_fixture(path("likelihood.json")),
                                                          desc("likelihood.json"));
    }
    if (fs::exists(path("teacher.json"))) {
        set.teacher = std::make_unique<MockTeacher>(load_fixture(path("teacher.json")),
                                                    desc("teacher.json"));
    }
    if (fs::exists(path("generator.json"))) {
        set.generator = std::make_unique<MockGenerator>(load_fixture(path("generator.json")),
                                                        desc("generator.json"));
    }
    return set;
}

}  // namespace fragsel
