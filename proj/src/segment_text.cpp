#include "fragsel/segment_text.hpp"

#include <array>
#include <cctype>
#include <cstdlib>
#include <numeric>
#include <string_view>

namespace fragsel {

namespace {

constexpr std::array<std::string_view, 8> kAbbreviations = {
    "Dr.", "Mr.", "Mrs.", "Ms.", "Prof.", "e.g.", "i.e.", "etc.",
};

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_terminal(char c) {
    return c == '.' || c == '!' || c == '?';
}

// The non-whitespace run ending at (and including) position pos.
std::string_view word_ending_at(const std::string& body, size_t pos) {
    size_t begin = pos;
    while (begin > 0 && !is_space(body[begin - 1])) --begin;
    return std::string_view(body).substr(begin, pos - begin + 1);
}

bool is_abbreviation(std::string_view word) {
    for (auto abbr : kAbbreviations) {
        if (word == abbr) return true;
    }
    return false;
}

std::string trim(std::string_view s) {
    size_t a = 0;
    size_t b = s.size();
    while (a < b && is_space(s[a])) ++a;
    while (b > a && is_space(s[b - 1])) --b;
    return std::string(s.substr(a, b - a));
}

}  // namespace

std::vector<std::string> split_sentences(const std::string& body) {
    if (normalize_whitespace(body).empty()) {
        throw Error(ErrorKind::EmptyDocument, "document body is empty or whitespace-only");
    }

    std::vector<std::string> sentences;
    size_t start = 0;
    for (size_t i = 0; i < body.size(); ++i) {
        char c = body[i];
        if (!is_terminal(c)) continue;
        bool at_end = i + 1 == body.size();
        if (!at_end && !is_space(body[i + 1])) continue;
        if (c == '.' && is_abbreviation(word_ending_at(body, i))) continue;
        std::string sentence = trim(std::string_view(body).substr(start, i - start + 1));
        if (!sentence.empty()) sentences.push_back(std::move(sentence));
        start = i + 1;
    }
    if (start < body.size()) {
        std::string tail = trim(std::string_view(body).substr(start));
        if (!tail.empty()) sentences.push_back(std::move(tail));
    }
    return sentences;
}

std::string join_span(const std::vector<std::string>& sentences, SentenceSpan span) {
    std::string out;
    for (int i = span.start; i <= span.end; ++i) {
        if (!out.empty()) out.push_back(' ');
        out += sentences[static_cast<size_t>(i)];
    }
    return out;
}

std::pair<SentenceSpan, SentenceSpan> split_doc(const std::vector<std::string>& sentences,
                                                SentenceSpan span) {
    if (span.size() < 2) {
        throw Error(ErrorKind::SingleSentence, "cannot bisect a single-sentence span");
    }

    long total = 0;
    for (int i = span.start; i <= span.end; ++i) {
        total += static_cast<long>(sentences[static_cast<size_t>(i)].size());
    }

    long left_chars = 0;
    long best_imbalance = 0;
    int best_mid = span.start;
    for (int mid = span.start; mid < span.end; ++mid) {
        left_chars += static_cast<long>(sentences[static_cast<size_t>(mid)].size());
        long imbalance = std::labs(2 * left_chars - total);
        if (mid == span.start || imbalance < best_imbalance) {
            best_imbalance = imbalance;
            best_mid = mid;
        }
    }
    return {SentenceSpan{span.start, best_mid}, SentenceSpan{best_mid + 1, span.end}};
}

std::pair<TextFragment, SegmentScoreTrace> recur_split(const Query& query, const Document& doc,
                                                       RelevanceScorer& scorer,
                                                       const SentenceSplitter& splitter) {
    if (doc.is_image()) {
        throw Error(ErrorKind::PreconditionViolation,
                    "recur_split requires a text document, got image '" + doc.id + "'");
    }

    const std::vector<std::string> sentences =
        splitter ? splitter(doc.body) : split_sentences(doc.body);
    if (sentences.empty()) {
        throw Error(ErrorKind::EmptyDocument, "document '" + doc.id + "' has no sentences");
    }

    SegmentScoreTrace trace;
    SentenceSpan node{0, static_cast<int>(sentences.size()) - 1};
    double node_score = scorer.score(query, join_span(sentences, node));
    trace.visited.emplace_back(node, node_score);

    while (node.size() > 1) {
        auto [left, right] = split_doc(sentences, node);
        double s_left = scorer.score(query, join_span(sentences, left));
        double s_right = scorer.score(query, join_span(sentences, right));
        if (std::max(s_left, s_right) <= node_score) break;  // no gain, keep intact
        if (s_left > s_right) {
            node = left;
            node_score = s_left;
        } else {
            node = right;
            node_score = s_right;
        }
        trace.visited.emplace_back(node, node_score);
    }

    trace.result_span = node;
    TextFragment fragment;
    fragment.parent_doc_id = doc.id;
    fragment.span = node;
    fragment.text = join_span(sentences, node);
    fragment.relevance_score = node_score;
    return {std::move(fragment), std::move(trace)};
}

}  // namespace fragsel
