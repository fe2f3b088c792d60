#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fragsel/core.hpp"

namespace fragsel {

// The five model-backend contracts. Every implementation carries a stable
// descriptor string that is recorded in all output headers.

class Retriever {
public:
    virtual ~Retriever() = default;
    virtual std::vector<Document> retrieve(const Query& query, long n_ret) = 0;
    virtual std::string descriptor() const = 0;
};

// Serves both the coarse reranker and the recursive-segmentation scorer.
// For image documents the reranker passes the image_ref in place of text.
class RelevanceScorer {
public:
    virtual ~RelevanceScorer() = default;
    virtual double score(const Query& query, const std::string& text) = 0;
    virtual std::string descriptor() const = 0;
};

class Detector {
public:
    virtual ~Detector() = default;
    virtual std::vector<DetectionCandidate> detect(const Query& query,
                                                   const std::string& image_ref) = 0;
    virtual std::string descriptor() const = 0;
};

class LikelihoodScorer {
public:
    virtual ~LikelihoodScorer() = default;
    virtual TokenLogProbs logprobs(const Query& query,
                                   const std::optional<EvidenceItem>& fragment,
                                   const std::vector<std::string>& answer_tokens) = 0;
    virtual std::string descriptor() const = 0;
};

class TeacherScorer {
public:
    virtual ~TeacherScorer() = default;
    virtual double logit(const Query& query, const EvidenceItem& fragment) = 0;
    virtual std::string descriptor() const = 0;
};

class Generator {
public:
    virtual ~Generator() = default;
    virtual std::string generate(const Query& query,
                                 const std::vector<EvidenceItem>& context) = 0;
    virtual std::string descriptor() const = 0;
};

// Adapter turning a plain function into a RelevanceScorer; used by tests and
// the Python bindings.
class FunctionScorer final : public RelevanceScorer {
public:
    using Fn = std::function<double(const Query&, const std::string&)>;

    explicit FunctionScorer(Fn fn, std::string descriptor = "function")
        : fn_(std::move(fn)), descriptor_(std::move(descriptor)) {}

    double score(const Query& query, const std::string& text) override {
        return fn_(query, text);
    }
    std::string descriptor() const override { return descriptor_; }

private:
    Fn fn_;
    std::string descriptor_;
};

}  // namespace fragsel
