#include "fragsel/selector.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "fragsel/segment_visual.hpp"

namespace fragsel {

namespace {

constexpr double kProbEps = 1e-12;

double clamp_prob(double p) {
    return std::min(1.0 - kProbEps, std::max(kProbEps, p));
}

std::vector<std::string> overlap_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        // lowercase, strip non-alphanumeric edges
        size_t a = 0, b = current.size();
        while (a < b && !std::isalnum(static_cast<unsigned char>(current[a]))) ++a;
        while (b > a && !std::isalnum(static_cast<unsigned char>(current[b - 1]))) --b;
        if (b > a) {
            std::string t = current.substr(a, b - a);
            for (char& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            tokens.push_back(std::move(t));
        }
        current.clear();
    };
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!current.empty()) flush();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) flush();
    return tokens;
}

std::set<std::string> ngrams(const std::vector<std::string>& tokens, size_t n) {
    std::set<std::string> grams;
    if (tokens.size() < n) return grams;
    for (size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string g = tokens[i];
        for (size_t j = 1; j < n; ++j) g += "\x1f" + tokens[i + j];
        grams.insert(std::move(g));
    }
    return grams;
}

double overlap_ratio(const std::vector<std::string>& query_tokens,
                     const std::vector<std::string>& frag_tokens, size_t n) {
    auto qg = ngrams(query_tokens, n);
    if (qg.empty()) return 0.0;
    auto fg = ngrams(frag_tokens, n);
    size_t hits = 0;
    for (const auto& g : qg) {
        if (fg.count(g) > 0) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(qg.size());
}

}  // namespace

FeatureVector extract_features(const Query& query, const EvidenceItem& fragment) {
    FeatureVector f(kBaselineFeatureDim, 0.0);
    const std::string text = fragment.content_text();
    if (!text.empty()) {
        auto qt = overlap_tokens(query.text);
        auto ft = overlap_tokens(text);
        f[0] = overlap_ratio(qt, ft, 1);
        f[1] = overlap_ratio(qt, ft, 2);
        f[2] = static_cast<double>(count_tokens(text)) / 100.0;
    }
    if (const TextFragment* tf = fragment.text_fragment()) {
        f[3] = tf->relevance_score;
    }
    if (fragment.is_image_kind()) {
        f[4] = 1.0;
    }
    if (const VisualFragment* vf = fragment.visual_fragment()) {
        f[5] = vf->objectness;
        f[6] = vf->semantic_score;
        f[7] = std::log1p(box_area(vf->box)) / 20.0;
    }
    return f;
}

double score(const SelectorModel& model, const FeatureVector& features) {
    if (model.weights.size() != features.size()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "model expects " + std::to_string(model.weights.size()) +
                        " features, got " + std::to_string(features.size()));
    }
    double logit = model.bias;
    for (size_t i = 0; i < features.size(); ++i) {
        logit += model.weights[i] * features[i];
    }
    return logit;
}

double sigmoid(double logit) {
    if (logit >= 0.0) {
        return 1.0 / (1.0 + std::exp(-logit));
    }
    double e = std::exp(logit);
    return e / (1.0 + e);
}

double bce_loss(const std::vector<int>& labels, const std::vector<double>& probs) {
    if (labels.empty() || labels.size() != probs.size()) {
        throw Error(ErrorKind::LengthMismatch,
                    "labels and probabilities must be equal-length non-empty lists");
    }
    double total = 0.0;
    for (size_t i = 0; i < labels.size(); ++i) {
        double p = clamp_prob(probs[i]);
        total += labels[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
    }
    return total / static_cast<double>(labels.size());
}

double binary_kl(double p_teacher, double p_student) {
    if (!(p_teacher > 0.0 && p_teacher < 1.0) || !(p_student > 0.0 && p_student < 1.0)) {
        throw Error(ErrorKind::DomainError,
                    "binary_kl requires probabilities strictly inside (0,1)");
    }
    return p_teacher * std::log(p_teacher / p_student) +
           (1.0 - p_teacher) * std::log((1.0 - p_teacher) / (1.0 - p_student));
}

namespace {

void check_kd_inputs(const std::vector<int>& labels, const std::vector<double>& student_logits,
                     const std::vector<double>& teacher_logits, double alpha, double temperature) {
    if (labels.empty() || labels.size() != student_logits.size() ||
        labels.size() != teacher_logits.size()) {
        throw Error(ErrorKind::LengthMismatch,
                    "labels, student logits and teacher logits must be equal-length non-empty lists");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw Error(ErrorKind::DomainError, "alpha must lie in [0,1]");
    }
    if (!(temperature > 0.0)) {
        throw Error(ErrorKind::DomainError, "temperature must be positive");
    }
}

}  // namespace

double kd_loss(const std::vector<int>& labels, const std::vector<double>& student_logits,
               const std::vector<double>& teacher_logits, double alpha, double temperature) {
    check_kd_inputs(labels, student_logits, teacher_logits, alpha, temperature);
    const double t2 = temperature * temperature;
    double total = 0.0;
    for (size_t i = 0; i < labels.size(); ++i) {
        double p_student = clamp_prob(sigmoid(student_logits[i]));
        double per_sample =
            (1.0 - alpha) * (labels[i] == 1 ? -std::log(p_student) : -std::log(1.0 - p_student));
        if (alpha > 0.0) {
            double p_t = clamp_prob(sigmoid(teacher_logits[i] / temperature));
            double p_s = clamp_prob(sigmoid(student_logits[i] / temperature));
            per_sample += alpha * t2 * binary_kl(p_t, p_s);
        }
        total += per_sample;
    }
    return total / static_cast<double>(labels.size());
}

std::vector<double> kd_grad(const std::vector<int>& labels,
                            const std::vector<double>& student_logits,
                            const std::vector<double>& teacher_logits, double alpha,
                            double temperature) {
    check_kd_inputs(labels, student_logits, teacher_logits, alpha, temperature);
    const double n = static_cast<double>(labels.size());
    std::vector<double> grad(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) {
        double g = (1.0 - alpha) * (sigmoid(student_logits[i]) - static_cast<double>(labels[i]));
        if (alpha > 0.0) {
            g += alpha * temperature *
                 (sigmoid(student_logits[i] / temperature) - sigmoid(teacher_logits[i] / temperature));
        }
        grad[i] = g / n;
    }
    return grad;
}

void TrainConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::ConfigError, "alpha must lie in [0,1]");
    if (!(temperature > 0.0)) throw Error(ErrorKind::ConfigError, "temperature must be positive");
    if (!(learning_rate > 0.0)) throw Error(ErrorKind::ConfigError, "learning_rate must be positive");
    if (epochs < 0) throw Error(ErrorKind::ConfigError, "epochs must be non-negative");
    if (batch_size < 1) throw Error(ErrorKind::ConfigError, "batch_size must be positive");
}

SelectorModel train(const std::vector<FigRecord>& dataset, const FeatureExtractor& extractor,
                    const TrainConfig& config, TrainReport* report) {
    config.validate();
    if (dataset.empty()) {
        throw Error(ErrorKind::PreconditionViolation, "training dataset is empty");
    }
    if (config.alpha > 0.0) {
        for (const auto& record : dataset) {
            if (!record.teacher_logit) {
                throw Error(ErrorKind::MissingTeacherLogits,
                            "record for query '" + record.query_id +
                                "' lacks a teacher logit but alpha > 0");
            }
        }
    }

    const size_t n = dataset.size();
    std::vector<FeatureVector> features(n);
    std::vector<int> labels(n);
    std::vector<double> teacher(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        Query q{dataset[i].query_id, dataset[i].query_text, std::nullopt};
        features[i] = extractor(q, dataset[i].fragment);
        labels[i] = dataset[i].hard_label;
        if (dataset[i].teacher_logit) teacher[i] = *dataset[i].teacher_logit;
        if (features[i].size() != features[0].size()) {
            throw Error(ErrorKind::DimensionMismatch, "feature dimension varies across records");
        }
    }

    SelectorModel model;
    model.weights.assign(features[0].size(), 0.0);
    model.bias = 0.0;

    auto dataset_loss = [&] {
        std::vector<int> z(n);
        std::vector<double> s(n), t(n);
        for (size_t i = 0; i < n; ++i) {
            z[i] = labels[i];
            s[i] = score(model, features[i]);
            t[i] = teacher[i];
        }
        return kd_loss(z, s, t, config.alpha, config.temperature);
    };

    std::mt19937_64 rng(config.seed);
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});

    if (report) report->epoch_losses.clear();
    for (long epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (size_t begin = 0; begin < n; begin += static_cast<size_t>(config.batch_size)) {
            size_t end = std::min(n, begin + static_cast<size_t>(config.batch_size));
            size_t m = end - begin;
            std::vector<int> z(m);
            std::vector<double> s(m), t(m);
            for (size_t j = 0; j < m; ++j) {
                size_t idx = order[begin + j];
                z[j] = labels[idx];
                s[j] = score(model, features[idx]);
                t[j] = teacher[idx];
            }
            std::vector<double> g = kd_grad(z, s, t, config.alpha, config.temperature);
            for (size_t j = 0; j < m; ++j) {
                size_t idx = order[begin + j];
                const FeatureVector& x = features[idx];
                for (size_t d = 0; d < x.size(); ++d) {
                    model.weights[d] -= config.learning_rate * g[j] * x[d];
                }
                model.bias -= config.learning_rate * g[j];
            }
        }
        if (report) report->epoch_losses.push_back(dataset_loss());
    }
    if (report) {
        report->final_loss = report->epoch_losses.empty() ? dataset_loss() : report->epoch_losses.back();
    }
    return model;
}

}  // namespace fragsel
