#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fragsel/errors.hpp"

namespace fragsel {

// Tokens are maximal non-whitespace runs. This is the unit used for every
// budget and report in the library; model tokenizers live behind backends.
long count_tokens(std::string_view text);

// Collapses whitespace runs to single spaces and trims the ends.
std::string normalize_whitespace(std::string_view text);

enum class Modality { Text, Image };

struct Query {
    std::string id;
    std::string text;
    std::optional<std::string> image_ref;

    void validate() const;
};

struct Document {
    std::string id;
    Modality modality = Modality::Text;
    std::string body;       // Text only
    std::string image_ref;  // Image only
    long token_count = 0;   // cached count_tokens(body); 0 for images

    static Document make_text(std::string id, std::string body);
    static Document make_image(std::string id, std::string image_ref);

    bool is_image() const { return modality == Modality::Image; }
};

// Inclusive sentence index range.
struct SentenceSpan {
    int start = 0;
    int end = 0;

    bool operator==(const SentenceSpan&) const = default;
    int size() const { return end - start + 1; }
};

struct TextFragment {
    std::string parent_doc_id;
    SentenceSpan span;
    std::string text;
    double relevance_score = 0.0;
};

struct BoundingBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    bool valid() const { return x_max > x_min && y_max > y_min; }
};

struct VisualFragment {
    std::string parent_doc_id;
    BoundingBox box;
    double objectness = 0.0;
    double semantic_score = 0.0;
};

// Detector output before filtering; scores are raw backend values.
struct DetectionCandidate {
    BoundingBox box;
    double objectness = 0.0;
    double semantic_score = 0.0;
};

// Per-token log-likelihoods of one answer under one context.
struct TokenLogProbs {
    std::vector<std::string> answer_tokens;
    std::vector<double> logprobs;

    void validate() const;
};

enum class EvidenceKind { CoarseDoc, TextFrag, VisualFrag, OriginalImage };

// The unified unit flowing through the pipeline. CoarseDoc and OriginalImage
// carry a Document payload; the fragment kinds carry their fragment type.
struct EvidenceItem {
    EvidenceKind kind = EvidenceKind::CoarseDoc;
    std::variant<Document, TextFragment, VisualFragment> payload;
    std::optional<double> selector_score;

    static EvidenceItem coarse_doc(Document doc);
    static EvidenceItem text_frag(TextFragment frag);
    static EvidenceItem visual_frag(VisualFragment frag);
    static EvidenceItem original_image(Document image_doc);

    const Document* doc() const { return std::get_if<Document>(&payload); }
    const TextFragment* text_fragment() const { return std::get_if<TextFragment>(&payload); }
    const VisualFragment* visual_fragment() const { return std::get_if<VisualFragment>(&payload); }

    // Text carried into the generation context; empty for image kinds.
    std::string content_text() const;

    // True when the item is charged the configured image token cost.
    bool is_image_kind() const;

    // Token cost of this item under the given per-image cost.
    long token_cost(long image_token_cost) const;
};

struct Config {
    long n_ret = 100;
    long n_seg = 15;
    long k = 5;
    double tau_fig = 0.2;
    double tau_obj = 0.40;
    double tau_sem = 0.35;
    double tau_size = 2500.0;  // px^2
    double alpha = 0.7;
    double temperature = 2.0;
    long image_token_cost = 32;
    long parallelism = 1;
    bool collect_trace_nodes = false;

    void validate() const;
};

}  // namespace fragsel
