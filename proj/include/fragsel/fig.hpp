#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fragsel/backends.hpp"
#include "fragsel/core.hpp"

namespace fragsel {

// One supervision tuple: the query, the fragment, its information gain, the
// thresholded hard label and (when a teacher scored it) the teacher logit.
struct FigRecord {
    std::string query_id;
    std::string query_text;
    EvidenceItem fragment;
    double fig = 0.0;
    int hard_label = 0;
    std::optional<double> teacher_logit;
};

// One input sample for dataset construction.
struct FigSample {
    Query query;
    std::vector<std::string> answer_tokens;
    std::vector<EvidenceItem> fragments;
};

// Difference of length-normalized answer log-likelihoods, with minus without
// the fragment in context. Both inputs must cover the same token sequence.
double fig_score(const TokenLogProbs& with_fragment, const TokenLogProbs& without_fragment);

// 1 iff fig strictly exceeds tau_fig.
int hard_label(double fig, double tau_fig);

// Builds one FigRecord per (query, fragment) pair. The fragment-free baseline
// is scored once per query and reused; per-fragment calls may run on up to
// `parallelism` threads while output order stays the input order.
std::vector<FigRecord> build_fig_dataset(const std::vector<FigSample>& samples,
                                         LikelihoodScorer& likelihood,
                                         TeacherScorer* teacher,
                                         const Config& config,
                                         long parallelism = 1);

}  // namespace fragsel
