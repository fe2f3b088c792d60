#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fragsel/backends.hpp"
#include "fragsel/json_io.hpp"

namespace fragsel {

struct HttpOptions {
    std::string base_url;            // e.g. "http://127.0.0.1:8080"
    std::string auth_token_env;      // env var holding a bearer token; empty = none
    double timeout_s = 30.0;
    int retries = 3;                 // total attempts
    double backoff_base_s = 0.5;     // sleep backoff_base * 2^attempt between attempts
};

// One JSON-over-HTTP client implementing all five backend contracts. Each
// contract method POSTs its wire body to a fixed path under the base URL.
// Transport errors, timeouts and 5xx responses are retried with exponential
// backoff; other non-2xx responses fail immediately.
class HttpBackend final : public Retriever,
                          public RelevanceScorer,
                          public Detector,
                          public LikelihoodScorer,
                          public TeacherScorer,
                          public Generator {
public:
    explicit HttpBackend(HttpOptions options);
    ~HttpBackend() override;

    std::vector<Document> retrieve(const Query& query, long n_ret) override;
    double score(const Query& query, const std::string& text) override;
    std::vector<DetectionCandidate> detect(const Query& query,
                                           const std::string& image_ref) override;
    TokenLogProbs logprobs(const Query& query, const std::optional<EvidenceItem>& fragment,
                           const std::vector<std::string>& answer_tokens) override;
    double logit(const Query& query, const EvidenceItem& fragment) override;
    std::string generate(const Query& query, const std::vector<EvidenceItem>& context) override;

    std::string descriptor() const override;

    // Number of attempts made by the most recent request (for tests).
    int last_attempt_count() const { return last_attempts_; }

private:
    Json post(const std::string& path, const Json& body);

    HttpOptions options_;
    int last_attempts_ = 0;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace fragsel
