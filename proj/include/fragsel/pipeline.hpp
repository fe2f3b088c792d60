#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fragsel/backends.hpp"
#include "fragsel/core.hpp"
#include "fragsel/json_io.hpp"
#include "fragsel/segment_text.hpp"
#include "fragsel/selector.hpp"

namespace fragsel {

struct PhaseLatencies {
    double retrieval_s = 0.0;
    double rerank_s = 0.0;
    double segment_select_s = 0.0;
    double generate_s = 0.0;
};

struct PoolSizes {
    long retrieved = 0;
    long sorted = 0;
    long segmented_docs = 0;
    long hybrid_pool = 0;
    long selected = 0;
};

struct PipelineReport {
    PhaseLatencies phase_latencies;
    PoolSizes pool_sizes;
    long context_tokens = 0;
    std::vector<EvidenceItem> selected_items;  // selector_score set on each
    std::string answer;
};

Json to_json(const PipelineReport& report);
PipelineReport pipeline_report_from_json(const Json& j);

struct PipelineBackends {
    Retriever* retriever = nullptr;
    RelevanceScorer* scorer = nullptr;
    Detector* detector = nullptr;
    Generator* generator = nullptr;
};

// Monotonic time source in seconds; injectable so reports can be reproduced
// bit-for-bit under a fixed clock.
using Clock = std::function<double()>;
Clock steady_clock_seconds();

// Stable descending sort of the candidates by scorer value; ties keep
// retrieval order. Image documents are scored on their image_ref.
std::vector<Document> rerank(const Query& query, std::vector<Document> candidates,
                             RelevanceScorer& scorer);

using TextSegmenter =
    std::function<std::pair<TextFragment, SegmentScoreTrace>(const Query&, const Document&)>;
using VisualSegmenter = std::function<std::vector<VisualFragment>(const Query&, const Document&)>;

// Hybrid candidate pool: each of the top n_seg documents contributes its
// fragments (text documents are replaced by their fragments; image documents
// keep the original image ahead of its ROIs); the rest join unchanged as
// coarse documents. With collect_trace_nodes every visited trace span becomes
// a candidate, deduplicated by (doc id, span).
std::vector<EvidenceItem> build_hybrid_pool(const Query& query,
                                            const std::vector<Document>& sorted_docs, long n_seg,
                                            const TextSegmenter& text_segmenter,
                                            const VisualSegmenter& visual_segmenter,
                                            bool collect_trace_nodes = false,
                                            long parallelism = 1);

// Scores every pool item with the selector and returns the top min(k, pool)
// items with scores attached; ties keep pool order.
std::vector<EvidenceItem> select_top_k(const Query& query, const std::vector<EvidenceItem>& pool,
                                       const SelectorModel& model,
                                       const FeatureExtractor& extractor, long k,
                                       long parallelism = 1);

long context_token_count(const std::vector<EvidenceItem>& items, long image_token_cost);

struct RunResult {
    std::string answer;
    PipelineReport report;
};

// The four-phase pipeline: retrieve + rerank, segment the top n_seg
// documents, select top-k from the hybrid pool, generate from the purified
// context. Throws EmptyRetrieval when the retriever returns nothing.
RunResult run(const Query& query, const Config& config, const PipelineBackends& backends,
              const SelectorModel& model, const Clock& clock = {});

// Brute-force truncation mode: phases 1 and 4 as in run(), but the context is
// the token-budget prefix of the reranked documents.
RunResult run_truncate_baseline(const Query& query, const Config& config,
                                const PipelineBackends& backends, long token_budget,
                                const Clock& clock = {});

}  // namespace fragsel
