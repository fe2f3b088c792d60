#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fragsel/backends.hpp"
#include "fragsel/core.hpp"

namespace fragsel {

// Every node visited by the recursive decomposition, in visit order, with the
// scorer value observed at that node. result_span is the span of the last
// visited node.
struct SegmentScoreTrace {
    std::vector<std::pair<SentenceSpan, double>> visited;
    SentenceSpan result_span;
};

// Rule-based splitter: a sentence ends at '.', '!' or '?' followed by
// whitespace (or end of input), except when the '.' terminates a known
// abbreviation (Dr., Mr., Mrs., Ms., Prof., e.g., i.e., etc.).
// Throws EmptyDocument when the body is whitespace-only.
std::vector<std::string> split_sentences(const std::string& body);

// Joins the sentences of an inclusive span with single spaces.
std::string join_span(const std::vector<std::string>& sentences, SentenceSpan span);

// Bisects a span at the sentence boundary minimizing the character imbalance
// between the halves; ties break toward the smaller left half.
// Throws SingleSentence when the span holds fewer than two sentences.
std::pair<SentenceSpan, SentenceSpan> split_doc(const std::vector<std::string>& sentences,
                                                SentenceSpan span);

using SentenceSplitter = std::function<std::vector<std::string>(const std::string&)>;

// Score-driven recursive decomposition: score the node, bisect, score both
// halves, and descend into the strictly better half only while that improves
// on the parent (left before right on a child tie going right, i.e. descent
// goes left only when the left child is strictly higher). Returns the fragment
// at the final node together with the full visit trace.
// A custom splitter may be supplied for corpora with pre-split sentences.
std::pair<TextFragment, SegmentScoreTrace> recur_split(
    const Query& query, const Document& doc, RelevanceScorer& scorer,
    const SentenceSplitter& splitter = {});

}  // namespace fragsel
