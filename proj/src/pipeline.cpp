#include "fragsel/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "fragsel/baseline.hpp"
#include "fragsel/segment_visual.hpp"
#include "parallel.hpp"

namespace fragsel {

Clock steady_clock_seconds() {
    return [] {
        auto now = std::chrono::steady_clock::now().time_since_epoch();
        return std::chrono::duration<double>(now).count();
    };
}

Json to_json(const PipelineReport& report) {
    Json items = Json::array();
    for (const auto& item : report.selected_items) items.push_back(to_json(item));
    return Json{{"phase_latencies",
                 Json{{"retrieval", report.phase_latencies.retrieval_s},
                      {"rerank", report.phase_latencies.rerank_s},
                      {"segment_select", report.phase_latencies.segment_select_s},
                      {"generate", report.phase_latencies.generate_s}}},
                {"pool_sizes",
                 Json{{"retrieved", report.pool_sizes.retrieved},
                      {"sorted", report.pool_sizes.sorted},
                      {"segmented_docs", report.pool_sizes.segmented_docs},
                      {"hybrid_pool", report.pool_sizes.hybrid_pool},
                      {"selected", report.pool_sizes.selected}}},
                {"context_tokens", report.context_tokens},
                {"selected_items", std::move(items)},
                {"answer", report.answer}};
}

PipelineReport pipeline_report_from_json(const Json& j) {
    PipelineReport r;
    const Json& lat = j.at("phase_latencies");
    r.phase_latencies.retrieval_s = lat.at("retrieval").get<double>();
    r.phase_latencies.rerank_s = lat.at("rerank").get<double>();
    r.phase_latencies.segment_select_s = lat.at("segment_select").get<double>();
    r.phase_latencies.generate_s = lat.at("generate").get<double>();
    const Json& sizes = j.at("pool_sizes");
    r.pool_sizes.retrieved = sizes.at("retrieved").get<long>();
    r.pool_sizes.sorted = sizes.at("sorted").get<long>();
    r.pool_sizes.segmented_docs = sizes.at("segmented_docs").get<long>();
    r.pool_sizes.hybrid_pool = sizes.at("hybrid_pool").get<long>();
    r.pool_sizes.selected = sizes.at("selected").get<long>();
    r.context_tokens = j.at("context_tokens").get<long>();
    for (const auto& item : j.at("selected_items")) {
        r.selected_items.push_back(evidence_item_from_json(item));
    }
    r.answer = j.at("answer").get<std::string>();
    return r;
}

std::vector<Document> rerank(const Query& query, std::vector<Document> candidates,
                             RelevanceScorer& scorer) {
    std::vector<double> scores(candidates.size());
    for (size_t i = 0; i < candidates.size(); ++i) {
        const Document& doc = candidates[i];
        scores[i] = scorer.score(query, doc.is_image() ? doc.image_ref : doc.body);
    }
    std::vector<size_t> order(candidates.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return scores[a] > scores[b]; });
    std::vector<Document> sorted;
    sorted.reserve(candidates.size());
    for (size_t i : order) sorted.push_back(std::move(candidates[i]));
    return sorted;
}

std::vector<EvidenceItem> build_hybrid_pool(const Query& query,
                                            const std::vector<Document>& sorted_docs, long n_seg,
                                            const TextSegmenter& text_segmenter,
                                            const VisualSegmenter& visual_segmenter,
                                            bool collect_trace_nodes, long parallelism) {
    const size_t top = std::min(sorted_docs.size(),
                                static_cast<size_t>(std::max<long>(n_seg, 0)));

    std::vector<std::vector<EvidenceItem>> per_doc(top);
    detail::parallel_for(static_cast<long>(top), parallelism, [&](long i) {
        const Document& doc = sorted_docs[static_cast<size_t>(i)];
        std::vector<EvidenceItem>& items = per_doc[static_cast<size_t>(i)];
        try {
            if (doc.is_image()) {
                items.push_back(EvidenceItem::original_image(doc));
                for (auto& frag : visual_segmenter(query, doc)) {
                    items.push_back(EvidenceItem::visual_frag(std::move(frag)));
                }
            } else {
                auto [fragment, trace] = text_segmenter(query, doc);
                if (collect_trace_nodes) {
                    const std::vector<std::string> sentences = split_sentences(doc.body);
                    std::set<std::pair<int, int>> seen;
                    for (const auto& [span, span_score] : trace.visited) {
                        if (!seen.insert({span.start, span.end}).second) continue;
                        TextFragment node;
                        node.parent_doc_id = doc.id;
                        node.span = span;
                        node.text = join_span(sentences, span);
                        node.relevance_score = span_score;
                        items.push_back(EvidenceItem::text_frag(std::move(node)));
                    }
                } else {
                    items.push_back(EvidenceItem::text_frag(std::move(fragment)));
                }
            }
        } catch (const Error& e) {
            throw Error(e.kind(), "segmenting document '" + doc.id + "': " + e.what());
        }
    });

    std::vector<EvidenceItem> pool;
    for (auto& items : per_doc) {
        for (auto& item : items) pool.push_back(std::move(item));
    }
    for (size_t i = top; i < sorted_docs.size(); ++i) {
        pool.push_back(EvidenceItem::coarse_doc(sorted_docs[i]));
    }
    return pool;
}

std::vector<EvidenceItem> select_top_k(const Query& query, const std::vector<EvidenceItem>& pool,
                                       const SelectorModel& model,
                                       const FeatureExtractor& extractor, long k,
                                       long parallelism) {
    if (k < 1) {
        throw Error(ErrorKind::PreconditionViolation, "k must be at least 1");
    }
    std::vector<double> logits(pool.size());
    detail::parallel_for(static_cast<long>(pool.size()), parallelism, [&](long i) {
        logits[static_cast<size_t>(i)] =
            score(model, extractor(query, pool[static_cast<size_t>(i)]));
    });

    std::vector<size_t> order(pool.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return logits[a] > logits[b]; });

    const size_t take = std::min(pool.size(), static_cast<size_t>(k));
    std::vector<EvidenceItem> selected;
    selected.reserve(take);
    for (size_t i = 0; i < take; ++i) {
        EvidenceItem item = pool[order[i]];
        item.selector_score = logits[order[i]];
        selected.push_back(std::move(item));
    }
    return selected;
}

long context_token_count(const std::vector<EvidenceItem>& items, long image_token_cost) {
    long total = 0;
    for (const auto& item : items) total += item.token_cost(image_token_cost);
    return total;
}

namespace {

struct PhaseTimer {
    explicit PhaseTimer(const Clock& clock) : clock_(clock ? clock : steady_clock_seconds()) {}
    double measure(const std::function<void()>& fn) {
        double start = clock_();
        fn();
        return clock_() - start;
    }
    Clock clock_;
};

void require_backend(const void* backend, const char* name) {
    if (backend == nullptr) {
        throw Error(ErrorKind::ConfigError, std::string("pipeline requires a ") + name + " backend");
    }
}

}  // namespace

RunResult run(const Query& query, const Config& config, const PipelineBackends& backends,
              const SelectorModel& model, const Clock& clock) {
    config.validate();
    require_backend(backends.retriever, "retriever");
    require_backend(backends.scorer, "scorer");
    require_backend(backends.generator, "generator");

    PhaseTimer timer(clock);
    PipelineReport report;

    // Phase 1: coarse retrieval and reranking.
    std::vector<Document> candidates;
    report.phase_latencies.retrieval_s = timer.measure(
        [&] { candidates = backends.retriever->retrieve(query, config.n_ret); });
    if (candidates.empty()) {
        throw Error(ErrorKind::EmptyRetrieval,
                    "retriever returned no documents for query '" + query.id + "'");
    }
    report.pool_sizes.retrieved = static_cast<long>(candidates.size());

    std::vector<Document> sorted;
    report.phase_latencies.rerank_s =
        timer.measure([&] { sorted = rerank(query, std::move(candidates), *backends.scorer); });
    report.pool_sizes.sorted = static_cast<long>(sorted.size());

    // Phases 2 and 3: segmentation, hybrid pool, fine-grained selection.
    std::vector<EvidenceItem> selected;
    report.phase_latencies.segment_select_s = timer.measure([&] {
        TextSegmenter text_segmenter = [&](const Query& q, const Document& d) {
            return recur_split(q, d, *backends.scorer);
        };
        VisualSegmenter visual_segmenter = [&](const Query& q, const Document& d) {
            require_backend(backends.detector, "detector");
            return extract_visual_fragments(q, d, *backends.detector,
                                            VisualFilterThresholds::from_config(config));
        };
        std::vector<EvidenceItem> pool =
            build_hybrid_pool(query, sorted, config.n_seg, text_segmenter, visual_segmenter,
                              config.collect_trace_nodes, config.parallelism);
        report.pool_sizes.segmented_docs =
            std::min<long>(config.n_seg, static_cast<long>(sorted.size()));
        report.pool_sizes.hybrid_pool = static_cast<long>(pool.size());
        selected = select_top_k(query, pool, model, extract_features, config.k,
                                config.parallelism);
    });
    report.pool_sizes.selected = static_cast<long>(selected.size());
    report.selected_items = selected;
    report.context_tokens = context_token_count(selected, config.image_token_cost);

    // Phase 4: purified generation.
    RunResult result;
    report.phase_latencies.generate_s = timer.measure(
        [&] { result.answer = backends.generator->generate(query, selected); });
    report.answer = result.answer;
    result.report = std::move(report);
    return result;
}

RunResult run_truncate_baseline(const Query& query, const Config& config,
                                const PipelineBackends& backends, long token_budget,
                                const Clock& clock) {
    config.validate();
    require_backend(backends.retriever, "retriever");
    require_backend(backends.scorer, "scorer");
    require_backend(backends.generator, "generator");

    PhaseTimer timer(clock);
    PipelineReport report;

    std::vector<Document> candidates;
    report.phase_latencies.retrieval_s = timer.measure(
        [&] { candidates = backends.retriever->retrieve(query, config.n_ret); });
    if (candidates.empty()) {
        throw Error(ErrorKind::EmptyRetrieval,
                    "retriever returned no documents for query '" + query.id + "'");
    }
    report.pool_sizes.retrieved = static_cast<long>(candidates.size());

    std::vector<Document> sorted;
    report.phase_latencies.rerank_s =
        timer.measure([&] { sorted = rerank(query, std::move(candidates), *backends.scorer); });
    report.pool_sizes.sorted = static_cast<long>(sorted.size());

    std::vector<EvidenceItem> selected;
    report.phase_latencies.segment_select_s = timer.measure([&] {
        selected = truncate_baseline(query, sorted, token_budget, config.image_token_cost);
    });
    report.pool_sizes.segmented_docs = 0;
    report.pool_sizes.hybrid_pool = static_cast<long>(sorted.size());
    report.pool_sizes.selected = static_cast<long>(selected.size());
    report.selected_items = selected;
    report.context_tokens = context_token_count(selected, config.image_token_cost);

    RunResult result;
    report.phase_latencies.generate_s = timer.measure(
        [&] { result.answer = backends.generator->generate(query, selected); });
    report.answer = result.answer;
    result.report = std::move(report);
    return result;
}

}  // namespace fragsel
