#include "fragsel/baseline.hpp"

#include <cctype>

namespace fragsel {

namespace {

// Prefix of `body` covering its first `n` whitespace-run tokens, without
// trailing whitespace.
std::string token_prefix(const std::string& body, long n) {
    if (n <= 0) return {};
    long seen = 0;
    bool in_token = false;
    size_t end = 0;
    for (size_t i = 0; i < body.size(); ++i) {
        bool space = std::isspace(static_cast<unsigned char>(body[i])) != 0;
        if (!space) {
            if (!in_token) {
                in_token = true;
                ++seen;
            }
            if (seen > n) break;
            end = i + 1;
        } else {
            in_token = false;
            if (seen == n) break;
        }
    }
    return body.substr(0, end);
}

}  // namespace

std::vector<EvidenceItem> truncate_baseline(const Query& query,
                                            const std::vector<Document>& sorted_docs,
                                            long token_budget, long image_token_cost) {
    (void)query;  // ranking already reflects the query
    if (token_budget < 0) {
        throw Error(ErrorKind::PreconditionViolation, "token budget must be non-negative");
    }

    std::vector<EvidenceItem> selected;
    long remaining = token_budget;
    for (const Document& doc : sorted_docs) {
        if (remaining <= 0) break;
        if (doc.is_image()) {
            if (image_token_cost > remaining) break;  // whole or not at all
            selected.push_back(EvidenceItem::coarse_doc(doc));
            remaining -= image_token_cost;
        } else if (doc.token_count <= remaining) {
            selected.push_back(EvidenceItem::coarse_doc(doc));
            remaining -= doc.token_count;
        } else {
            Document cut = Document::make_text(doc.id, token_prefix(doc.body, remaining));
            selected.push_back(EvidenceItem::coarse_doc(std::move(cut)));
            remaining = 0;
            break;
        }
    }
    return selected;
}

std::vector<long> bucket_fig(const std::vector<FigRecord>& records,
                             const std::vector<double>& edges) {
    for (size_t i = 1; i < edges.size(); ++i) {
        if (!(edges[i] > edges[i - 1])) {
            throw Error(ErrorKind::UnsortedEdges, "bucket edges must be strictly increasing");
        }
    }
    std::vector<long> counts(edges.size() + 1, 0);
    for (const auto& record : records) {
        size_t bucket = edges.size();
        for (size_t i = 0; i < edges.size(); ++i) {
            if (record.fig <= edges[i]) {
                bucket = i;
                break;
            }
        }
        ++counts[bucket];
    }
    return counts;
}

}  // namespace fragsel
