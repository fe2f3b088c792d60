// Python bindings for the fragment-selection core: domain types, the
// segmentation and scoring operations, loss/gradient math, training and a
// fixture-driven pipeline runner.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fragsel/baseline.hpp"
#include "fragsel/config_file.hpp"
#include "fragsel/dataset_io.hpp"
#include "fragsel/fig.hpp"
#include "fragsel/json_io.hpp"
#include "fragsel/mock_backends.hpp"
#include "fragsel/pipeline.hpp"
#include "fragsel/segment_text.hpp"
#include "fragsel/segment_visual.hpp"
#include "fragsel/selector.hpp"

namespace py = pybind11;
using namespace fragsel;

namespace {

std::string item_to_json_str(const EvidenceItem& item) { return to_json(item).dump(); }

EvidenceItem item_from_json_str(const std::string& text) {
    return evidence_item_from_json(parse_json(text, "evidence item"));
}

}  // namespace

PYBIND11_MODULE(_fragsel, m) {
    m.doc() = "fragment-level evidence selection for retrieval-augmented generation";

    py::register_exception<Error>(m, "FragselError");

    py::enum_<Modality>(m, "Modality")
        .value("TEXT", Modality::Text)
        .value("IMAGE", Modality::Image);

    py::enum_<EvidenceKind>(m, "EvidenceKind")
        .value("COARSE_DOC", EvidenceKind::CoarseDoc)
        .value("TEXT_FRAG", EvidenceKind::TextFrag)
        .value("VISUAL_FRAG", EvidenceKind::VisualFrag)
        .value("ORIGINAL_IMAGE", EvidenceKind::OriginalImage);

    py::class_<Query>(m, "Query")
        .def(py::init([](const std::string& id, const std::string& text,
                         std::optional<std::string> image_ref) {
                 Query q{id, text, std::move(image_ref)};
                 q.validate();
                 return q;
             }),
             py::arg("id"), py::arg("text"), py::arg("image_ref") = std::nullopt)
        .def_readonly("id", &Query::id)
        .def_readonly("text", &Query::text)
        .def_readonly("image_ref", &Query::image_ref);

    py::class_<Document>(m, "Document")
        .def_static("text", &Document::make_text, py::arg("id"), py::arg("body"))
        .def_static("image", &Document::make_image, py::arg("id"), py::arg("image_ref"))
        .def_readonly("id", &Document::id)
        .def_readonly("modality", &Document::modality)
        .def_readonly("body", &Document::body)
        .def_readonly("image_ref", &Document::image_ref)
        .def_readonly("token_count", &Document::token_count);

    py::class_<SentenceSpan>(m, "SentenceSpan")
        .def_readonly("start", &SentenceSpan::start)
        .def_readonly("end", &SentenceSpan::end)
        .def("__repr__", [](const SentenceSpan& s) {
            return "SentenceSpan(" + std::to_string(s.start) + ", " + std::to_string(s.end) + ")";
        });

    py::class_<TextFragment>(m, "TextFragment")
        .def_readonly("parent_doc_id", &TextFragment::parent_doc_id)
        .def_readonly("span", &TextFragment::span)
        .def_readonly("text", &TextFragment::text)
        .def_readonly("relevance_score", &TextFragment::relevance_score);

    py::class_<BoundingBox>(m, "BoundingBox")
        .def(py::init<double, double, double, double>(), py::arg("x_min"), py::arg("y_min"),
             py::arg("x_max"), py::arg("y_max"))
        .def_readonly("x_min", &BoundingBox::x_min)
        .def_readonly("y_min", &BoundingBox::y_min)
        .def_readonly("x_max", &BoundingBox::x_max)
        .def_readonly("y_max", &BoundingBox::y_max);

    py::class_<DetectionCandidate>(m, "DetectionCandidate")
        .def(py::init([](const BoundingBox& box, double objectness, double semantic) {
                 return DetectionCandidate{box, objectness, semantic};
             }),
             py::arg("box"), py::arg("objectness"), py::arg("semantic"))
        .def_readonly("box", &DetectionCandidate::box)
        .def_readonly("objectness", &DetectionCandidate::objectness)
        .def_readonly("semantic", &DetectionCandidate::semantic_score);

    py::class_<VisualFilterThresholds>(m, "VisualFilterThresholds")
        .def(py::init([](double tau_obj, double tau_sem, double tau_size) {
                 return VisualFilterThresholds{tau_obj, tau_sem, tau_size};
             }),
             py::arg("tau_obj") = 0.40, py::arg("tau_sem") = 0.35, py::arg("tau_size") = 2500.0);

    py::class_<SegmentScoreTrace>(m, "SegmentScoreTrace")
        .def_readonly("visited", &SegmentScoreTrace::visited)
        .def_readonly("result_span", &SegmentScoreTrace::result_span);

    py::class_<EvidenceItem>(m, "EvidenceItem")
        .def_readonly("kind", &EvidenceItem::kind)
        .def_readonly("selector_score", &EvidenceItem::selector_score)
        .def_property_readonly("text", &EvidenceItem::content_text)
        .def("to_json", &item_to_json_str)
        .def_static("from_json", &item_from_json_str, py::arg("text"));

    py::class_<Config>(m, "Config")
        .def(py::init<>())
        .def_readwrite("n_ret", &Config::n_ret)
        .def_readwrite("n_seg", &Config::n_seg)
        .def_readwrite("k", &Config::k)
        .def_readwrite("tau_fig", &Config::tau_fig)
        .def_readwrite("tau_obj", &Config::tau_obj)
        .def_readwrite("tau_sem", &Config::tau_sem)
        .def_readwrite("tau_size", &Config::tau_size)
        .def_readwrite("alpha", &Config::alpha)
        .def_readwrite("temperature", &Config::temperature)
        .def_readwrite("image_token_cost", &Config::image_token_cost)
        .def_readwrite("parallelism", &Config::parallelism)
        .def_readwrite("collect_trace_nodes", &Config::collect_trace_nodes)
        .def("validate", &Config::validate);

    py::class_<SelectorModel>(m, "SelectorModel")
        .def(py::init([](std::vector<double> weights, double bias) {
                 SelectorModel model;
                 model.weights = std::move(weights);
                 model.bias = bias;
                 return model;
             }),
             py::arg("weights"), py::arg("bias") = 0.0)
        .def_readonly("weights", &SelectorModel::weights)
        .def_readonly("bias", &SelectorModel::bias)
        .def_readonly("feature_spec", &SelectorModel::feature_spec);

    // core
    m.def("count_tokens", [](const std::string& s) { return count_tokens(s); }, py::arg("text"));
    m.def("normalize_whitespace", [](const std::string& s) { return normalize_whitespace(s); },
          py::arg("text"));

    // text segmentation
    m.def("split_sentences", &split_sentences, py::arg("body"));
    m.def(
        "recur_split",
        [](const Query& query, const Document& doc,
           const std::function<double(const Query&, const std::string&)>& scorer) {
            FunctionScorer adapter(scorer, "python");
            return recur_split(query, doc, adapter);
        },
        py::arg("query"), py::arg("doc"), py::arg("scorer"),
        "Score-driven recursive decomposition; scorer is a callable "
        "(query, text) -> float.");

    // visual segmentation
    m.def("box_area", &box_area, py::arg("box"));
    m.def("filter_boxes", &filter_boxes, py::arg("candidates"), py::arg("thresholds"));

    // FIG supervision
    m.def(
        "fig_score",
        [](const std::vector<std::string>& tokens, const std::vector<double>& with_fragment,
           const std::vector<double>& without_fragment) {
            return fig_score(TokenLogProbs{tokens, with_fragment},
                             TokenLogProbs{tokens, without_fragment});
        },
        py::arg("answer_tokens"), py::arg("with_fragment"), py::arg("without_fragment"));
    m.def("hard_label", &hard_label, py::arg("fig"), py::arg("tau_fig"));

    // selector math
    m.def("extract_features", &extract_features, py::arg("query"), py::arg("fragment"));
    m.def("selector_score", &score, py::arg("model"), py::arg("features"));
    m.def("sigmoid", &sigmoid, py::arg("logit"));
    m.def("bce_loss", &bce_loss, py::arg("labels"), py::arg("probs"));
    m.def("binary_kl", &binary_kl, py::arg("p_teacher"), py::arg("p_student"));
    m.def("kd_loss", &kd_loss, py::arg("labels"), py::arg("student_logits"),
          py::arg("teacher_logits"), py::arg("alpha"), py::arg("temperature"));
    m.def("kd_grad", &kd_grad, py::arg("labels"), py::arg("student_logits"),
          py::arg("teacher_logits"), py::arg("alpha"), py::arg("temperature"));

    // reporting helpers
    m.def(
        "bucket_fig",
        [](const std::vector<double>& figs, const std::vector<double>& edges) {
            std::vector<FigRecord> records;
            for (double f : figs) {
                FigRecord r;
                r.fragment = EvidenceItem::coarse_doc(Document::make_text("x", "x"));
                r.fig = f;
                records.push_back(std::move(r));
            }
            return bucket_fig(records, edges);
        },
        py::arg("figs"), py::arg("edges"));

    // fixture-driven pipeline runner
    m.def(
        "run_with_fixtures",
        [](const Query& query, const Config& config, const std::string& fixture_dir,
           const std::string& corpus_path, const std::string& model_path) {
            std::vector<Document> corpus;
            for (const Json& j : read_jsonl(corpus_path)) corpus.push_back(document_from_json(j));
            MockBackendSet backends = mock_backends_from_dir(fixture_dir, corpus);
            SelectorModel model = load_model(model_path).model;
            PipelineBackends pb{backends.retriever.get(), backends.scorer.get(),
                                backends.detector.get(), backends.generator.get()};
            RunResult result = run(query, config, pb, model);
            return py::make_tuple(result.answer, to_json(result.report).dump());
        },
        py::arg("query"), py::arg("config"), py::arg("fixture_dir"), py::arg("corpus_path"),
        py::arg("model_path"),
        "Runs the four-phase pipeline against fixture backends; returns "
        "(answer, report_json).");

    m.attr("__version__") = kArtifactVersion;
    m.attr("BASELINE_FEATURE_DIM") = kBaselineFeatureDim;
}
