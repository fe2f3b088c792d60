#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fragsel/core.hpp"
#include "fragsel/fig.hpp"

namespace fragsel {

using FeatureVector = std::vector<double>;

inline constexpr int kBaselineFeatureDim = 8;
inline constexpr const char* kBaselineFeatureSpec = "baseline/v1";

// Baseline extractor (feature_spec "baseline/v1"), dimension 8:
//   [0] unigram overlap ratio (share of query unigrams present in the fragment)
//   [1] bigram overlap ratio
//   [2] fragment token count / 100
//   [3] fragment relevance score, 0 when absent
//   [4] 1 for image-kind items, else 0
//   [5] objectness, 0 when not a visual fragment
//   [6] semantic score, 0 when not a visual fragment
//   [7] log(1 + box area) / 20, 0 when not a visual fragment
// Overlap tokens are lowercased with non-alphanumeric edges stripped.
FeatureVector extract_features(const Query& query, const EvidenceItem& fragment);

// Linear scorer over a fixed-length feature vector.
struct SelectorModel {
    std::vector<double> weights;
    double bias = 0.0;
    std::string feature_spec = kBaselineFeatureSpec;
};

double score(const SelectorModel& model, const FeatureVector& features);

// Numerically stable logistic function.
double sigmoid(double logit);

// Mean binary cross-entropy; probabilities are clamped to
// [1e-12, 1 - 1e-12] before the logs.
double bce_loss(const std::vector<int>& labels, const std::vector<double>& probs);

// Bernoulli KL divergence KL(p || q) over {select, discard}. Throws
// DomainError at the 0/1 endpoints; callers clamp first.
double binary_kl(double p_teacher, double p_student);

// Per-sample (1-alpha) * BCE(z, sigma(s_S)) + alpha * T^2 *
// KL(sigma(s_T/T) || sigma(s_S/T)), averaged over the batch.
double kd_loss(const std::vector<int>& labels, const std::vector<double>& student_logits,
               const std::vector<double>& teacher_logits, double alpha, double temperature);

// Analytic gradient of kd_loss w.r.t. each student logit:
// (1/N) [ (1-alpha)(sigma(s_S) - z) + alpha * T * (sigma(s_S/T) - sigma(s_T/T)) ].
std::vector<double> kd_grad(const std::vector<int>& labels,
                            const std::vector<double>& student_logits,
                            const std::vector<double>& teacher_logits, double alpha,
                            double temperature);

struct TrainConfig {
    double alpha = 0.7;
    double temperature = 2.0;
    double learning_rate = 2e-5;
    long epochs = 5;
    long batch_size = 32;
    std::uint64_t seed = 0;

    void validate() const;
};

struct TrainReport {
    std::vector<double> epoch_losses;  // full-dataset loss after each epoch
    double final_loss = 0.0;
};

using FeatureExtractor = std::function<FeatureVector(const Query&, const EvidenceItem&)>;

// Mini-batch gradient descent from a zero-initialized model; batches are
// formed by a seed-determined shuffle each epoch, so identical seeds and data
// give bit-identical models. Requires teacher logits on every record when
// alpha > 0.
SelectorModel train(const std::vector<FigRecord>& dataset, const FeatureExtractor& extractor,
                    const TrainConfig& config, TrainReport* report = nullptr);

}  // namespace fragsel
