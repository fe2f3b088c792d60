#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "fragsel/backends.hpp"
#include "fragsel/json_io.hpp"

namespace fragsel {

// Thread-safe record of every request a mock backend answered, as the
// canonical wire request body.
class CallLog {
public:
    void append(Json request) {
        std::lock_guard<std::mutex> lock(mutex_);
        entries_.push_back(std::move(request));
    }
    size_t size() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return entries_.size();
    }
    std::vector<Json> snapshot() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return entries_;
    }

private:
    mutable std::mutex mutex_;
    std::vector<Json> entries_;
};

// Fixture-driven backends. Each answers exactly from its fixture tables and
// logs every call; a request with no fixture entry raises FixtureMiss naming
// the key. All fixtures additionally accept a generic "responses" object
// keyed by the compact canonical wire request body.

class MockScorer final : public RelevanceScorer {
public:
    MockScorer(Json fixture, std::string descriptor);
    double score(const Query& query, const std::string& text) override;
    std::string descriptor() const override { return descriptor_; }
    const CallLog& calls() const { return calls_; }

private:
    std::map<std::pair<std::string, std::string>, double> scores_;
    Json responses_;
    std::string descriptor_;
    CallLog calls_;
};

class MockRetriever final : public Retriever {
public:
    MockRetriever(Json fixture, const std::vector<Document>& corpus, std::string descriptor);
    std::vector<Document> retrieve(const Query& query, long n_ret) override;
    std::string descriptor() const override { return descriptor_; }
    const CallLog& calls() const { return calls_; }

private:
    std::map<std::string, std::vector<Document>> rankings_;
    std::string descriptor_;
    CallLog calls_;
};

class MockDetector final : public Detector {
public:
    MockDetector(Json fixture, std::string descriptor);
    std::vector<DetectionCandidate> detect(const Query& query,
                                           const std::string& image_ref) override;
    std::string descriptor() const override { return descriptor_; }
    const CallLog& calls() const { return calls_; }

private:
    std::map<std::pair<std::string, std::string>, std::vector<DetectionCandidate>> detections_;
    std::string descriptor_;
    CallLog calls_;
};

class MockLikelihood final : public LikelihoodScorer {
public:
    MockLikelihood(Json fixture, std::string descriptor);
    TokenLogProbs logprobs(const Query& query, const std::optional<EvidenceItem>& fragment,
                           const std::vector<std::string>& answer_tokens) override;
    std::string descriptor() const override { return descriptor_; }
    const CallLog& calls() const { return calls_; }

private:
    std::map<std::pair<std::string, std::string>, std::vector<double>> table_;
    std::string descriptor_;
    CallLog calls_;
};

class MockTeacher final : public TeacherScorer {
public:
    MockTeacher(Json fixture, std::string descriptor);
    double logit(const Query& query, const EvidenceItem& fragment) override;
    std::string descriptor() const override { return descriptor_; }
    const CallLog& calls() const { return calls_; }

private:
    std::map<std::pair<std::string, std::string>, double> logits_;
    std::string descriptor_;
    CallLog calls_;
};

class MockGenerator final : public Generator {
public:
    MockGenerator(Json fixture, std::string descriptor);
    std::string generate(const Query& query, const std::vector<EvidenceItem>& context) override;
    std::string descriptor() const override { return descriptor_; }
    const CallLog& calls() const { return calls_; }

private:
    std::map<std::string, std::string> answers_;
    std::string descriptor_;
    CallLog calls_;
};

// Loads <dir>/{retriever,scorer,detector,likelihood,teacher,generator}.json;
// absent files leave the corresponding backend null.
struct MockBackendSet {
    std::unique_ptr<MockRetriever> retriever;
    std::unique_ptr<MockScorer> scorer;
    std::unique_ptr<MockDetector> detector;
    std::unique_ptr<MockLikelihood> likelihood;
    std::unique_ptr<MockTeacher> teacher;
    std::unique_ptr<MockGenerator> generator;
};

MockBackendSet mock_backends_from_dir(const std::string& dir,
                                      const std::vector<Document>& corpus);

}  // namespace fragsel
