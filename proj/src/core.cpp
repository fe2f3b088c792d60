#include "fragsel/core.hpp"

#include <cctype>
#include <cmath>

namespace fragsel {

namespace {

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

long count_tokens(std::string_view text) {
    long count = 0;
    bool in_token = false;
    for (char c : text) {
        if (is_space(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++count;
        }
    }
    return count;
}

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (is_space(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) {
                out.push_back(' ');
                pending_space = false;
            }
            out.push_back(c);
        }
    }
    return out;
}

void Query::validate() const {
    if (normalize_whitespace(text).empty()) {
        throw Error(ErrorKind::DataError, "query '" + id + "' has empty text");
    }
}

Document Document::make_text(std::string id, std::string body) {
    Document d;
    d.id = std::move(id);
    d.modality = Modality::Text;
    d.body = std::move(body);
    d.token_count = count_tokens(d.body);
    return d;
}

Document Document::make_image(std::string id, std::string image_ref) {
    Document d;
    d.id = std::move(id);
    d.modality = Modality::Image;
    d.image_ref = std::move(image_ref);
    d.token_count = 0;
    return d;
}

void TokenLogProbs::validate() const {
    if (answer_tokens.empty()) {
        throw Error(ErrorKind::DataError, "token logprobs must cover at least one token");
    }
    if (answer_tokens.size() != logprobs.size()) {
        throw Error(ErrorKind::LengthMismatch,
                    "answer tokens and logprobs differ in length (" +
                        std::to_string(answer_tokens.size()) + " vs " +
                        std::to_string(logprobs.size()) + ")");
    }
    for (double lp : logprobs) {
        if (!(lp <= 0.0) || std::isnan(lp)) {
            throw Error(ErrorKind::DataError,
                        "logprob " + std::to_string(lp) + " is not a valid log-probability");
        }
    }
}

EvidenceItem EvidenceItem::coarse_doc(Document doc) {
    EvidenceItem item;
    item.kind = EvidenceKind::CoarseDoc;
    item.payload = std::move(doc);
    return item;
}

EvidenceItem EvidenceItem::text_frag(TextFragment frag) {
    EvidenceItem item;
    item.kind = EvidenceKind::TextFrag;
    item.payload = std::move(frag);
    return item;
}

EvidenceItem EvidenceItem::visual_frag(VisualFragment frag) {
    EvidenceItem item;
    item.kind = EvidenceKind::VisualFrag;
    item.payload = std::move(frag);
    return item;
}

EvidenceItem EvidenceItem::original_image(Document image_doc) {
    EvidenceItem item;
    item.kind = EvidenceKind::OriginalImage;
    item.payload = std::move(image_doc);
    return item;
}

std::string EvidenceItem::content_text() const {
    switch (kind) {
        case EvidenceKind::CoarseDoc:
            return doc()->is_image() ? std::string() : doc()->body;
        case EvidenceKind::TextFrag:
            return text_fragment()->text;
        case EvidenceKind::VisualFrag:
        case EvidenceKind::OriginalImage:
            return {};
    }
    return {};
}

bool EvidenceItem::is_image_kind() const {
    switch (kind) {
        case EvidenceKind::VisualFrag:
        case EvidenceKind::OriginalImage:
            return true;
        case EvidenceKind::CoarseDoc:
            return doc()->is_image();
        case EvidenceKind::TextFrag:
            return false;
    }
    return false;
}

long EvidenceItem::token_cost(long image_token_cost) const {
    return is_image_kind() ? image_token_cost : count_tokens(content_text());
}

void Config::validate() const {
    if (n_ret < 1) throw Error(ErrorKind::ConfigError, "n_ret must be positive");
    if (n_seg < 1) throw Error(ErrorKind::ConfigError, "n_seg must be positive");
    if (n_seg > n_ret) throw Error(ErrorKind::ConfigError, "n_seg must not exceed n_ret");
    if (k < 1) throw Error(ErrorKind::ConfigError, "k must be at least 1");
    if (!(temperature > 0.0)) throw Error(ErrorKind::ConfigError, "temperature must be positive");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::ConfigError, "alpha must lie in [0,1]");
    if (!(tau_size > 0.0)) throw Error(ErrorKind::ConfigError, "tau_size must be positive");
    if (image_token_cost < 0) throw Error(ErrorKind::ConfigError, "image_token_cost must be non-negative");
    if (parallelism < 1) throw Error(ErrorKind::ConfigError, "parallelism must be at least 1");
}

}  // namespace fragsel
