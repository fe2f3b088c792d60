#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fragsel/core.hpp"
#include "fragsel/json_io.hpp"

namespace fragsel {

// Versioned wire bodies shared by the HTTP adapter and the fixture mocks.
// Field names are part of the format and must not change.
inline constexpr int kWireVersion = 1;

Json wire_retrieve_request(const Query& query, long n_ret);
Json wire_score_request(const Query& query, const std::string& text);
Json wire_detect_request(const Query& query, const std::string& image_ref);
Json wire_logprobs_request(const Query& query, const std::optional<EvidenceItem>& fragment,
                           const std::vector<std::string>& answer_tokens);
Json wire_teacher_request(const Query& query, const EvidenceItem& fragment);
Json wire_generate_request(const Query& query, const std::vector<EvidenceItem>& context);

std::vector<Document> parse_retrieve_response(const Json& j);
double parse_score_response(const Json& j);
std::vector<DetectionCandidate> parse_detect_response(const Json& j);
std::vector<double> parse_logprobs_response(const Json& j);
double parse_teacher_response(const Json& j);
std::string parse_generate_response(const Json& j);

}  // namespace fragsel
