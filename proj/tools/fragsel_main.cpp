// fragsel: fragment-level evidence selection for retrieval-augmented
// generation. Subcommands cover the full workflow: segment documents, build
// FIG supervision data, train the selector, run the pipeline and report.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fragsel/baseline.hpp"
#include "fragsel/config_file.hpp"
#include "fragsel/dataset_io.hpp"
#include "fragsel/fig.hpp"
#include "fragsel/http_backend.hpp"
#include "fragsel/json_io.hpp"
#include "fragsel/manifest.hpp"
#include "fragsel/mock_backends.hpp"
#include "fragsel/pipeline.hpp"
#include "fragsel/segment_text.hpp"
#include "fragsel/segment_visual.hpp"
#include "fragsel/selector.hpp"

namespace fs = std::filesystem;
using namespace fragsel;

namespace {

struct GlobalOptions {
    std::string config_path;
    long seed = 0;
    bool verbose = false;

    Config config() const {
        return config_path.empty() ? Config{} : load_config_file(config_path);
    }
};

bool is_url(const std::string& spec) {
    return spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0;
}

std::unique_ptr<HttpBackend> make_http(const std::string& url) {
    HttpOptions options;
    options.base_url = url;
    return std::make_unique<HttpBackend>(options);
}

Query load_query_file(const std::string& path) {
    return query_from_json(load_json_file(path));
}

std::vector<Document> load_corpus(const std::string& path) {
    std::vector<Document> docs;
    for (const Json& j : read_jsonl(path)) docs.push_back(document_from_json(j));
    return docs;
}

std::vector<Query> load_queries(const std::string& path) {
    std::vector<Query> queries;
    for (const Json& j : read_jsonl(path)) queries.push_back(query_from_json(j));
    return queries;
}

// Owns whichever backend implementations a command resolved, fixture or HTTP.
struct ResolvedBackends {
    MockBackendSet mocks;
    std::unique_ptr<HttpBackend> http;
    PipelineBackends pipeline;
    LikelihoodScorer* likelihood = nullptr;
    TeacherScorer* teacher = nullptr;
    std::map<std::string, std::string> descriptors;
};

ResolvedBackends resolve_backends(const std::string& spec, const std::vector<Document>& corpus) {
    ResolvedBackends r;
    if (fs::is_directory(spec)) {
        r.mocks = mock_backends_from_dir(spec, corpus);
        r.pipeline.retriever = r.mocks.retriever.get();
        r.pipeline.scorer = r.mocks.scorer.get();
        r.pipeline.detector = r.mocks.detector.get();
        r.pipeline.generator = r.mocks.generator.get();
        r.likelihood = r.mocks.likelihood.get();
        r.teacher = r.mocks.teacher.get();
        if (r.mocks.retriever) r.descriptors["retriever"] = r.mocks.retriever->descriptor();
        if (r.mocks.scorer) r.descriptors["scorer"] = r.mocks.scorer->descriptor();
        if (r.mocks.detector) r.descriptors["detector"] = r.mocks.detector->descriptor();
        if (r.mocks.likelihood) r.descriptors["likelihood"] = r.mocks.likelihood->descriptor();
        if (r.mocks.teacher) r.descriptors["teacher"] = r.mocks.teacher->descriptor();
        if (r.mocks.generator) r.descriptors["generator"] = r.mocks.generator->descriptor();
        return r;
    }
    if (!fs::exists(spec)) {
        throw Error(ErrorKind::ConfigError,
                    "--backends must be a fixture directory or an endpoints file, got '" + spec + "'");
    }
    Json endpoints = load_json_file(spec);
    HttpOptions options;
    options.base_url = endpoints.at("base_url").get<std::string>();
    options.auth_token_env = endpoints.value("auth_token_env", std::string());
    options.timeout_s = endpoints.value("timeout_s", options.timeout_s);
    options.retries = endpoints.value("retries", options.retries);
    r.http = std::make_unique<HttpBackend>(std::move(options));
    r.pipeline.retriever = r.http.get();
    r.pipeline.scorer = r.http.get();
    r.pipeline.detector = r.http.get();
    r.pipeline.generator = r.http.get();
    r.likelihood = r.http.get();
    r.teacher = r.http.get();
    for (const char* name : {"retriever", "scorer", "detector", "likelihood", "teacher", "generator"}) {
        r.descriptors[name] = r.http->descriptor();
    }
    return r;
}

int cmd_segment_text(const GlobalOptions& global, const std::string& query_path,
                     const std::string& doc_path, const std::string& scores_spec) {
    Query query = load_query_file(query_path);
    Document doc = document_from_json(load_json_file(doc_path));

    std::unique_ptr<RelevanceScorer> owned_scorer;
    std::unique_ptr<HttpBackend> http;
    RelevanceScorer* scorer = nullptr;
    if (is_url(scores_spec)) {
        http = make_http(scores_spec);
        scorer = http.get();
    } else {
        owned_scorer = std::make_unique<MockScorer>(load_json_file(scores_spec),
                                                    "fixture:" + scores_spec);
        scorer = owned_scorer.get();
    }

    auto [fragment, trace] = recur_split(query, doc, *scorer);
    Json out{{"query_id", query.id},
             {"fragment", to_json(fragment)},
             {"trace", to_json(trace)},
             {"scorer", scorer->descriptor()},
             {"seed", global.seed}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_segment_image(const GlobalOptions& global, const std::string& query_path,
                      const std::string& image_id, const std::string& detections_spec) {
    Query query = load_query_file(query_path);
    Config config = global.config();
    VisualFilterThresholds thresholds = VisualFilterThresholds::from_config(config);

    std::unique_ptr<Detector> owned;
    std::unique_ptr<HttpBackend> http;
    Detector* detector = nullptr;
    if (is_url(detections_spec)) {
        http = make_http(detections_spec);
        detector = http.get();
    } else {
        owned = std::make_unique<MockDetector>(load_json_file(detections_spec),
                                               "fixture:" + detections_spec);
        detector = owned.get();
    }

    Document image_doc = Document::make_image(image_id, image_id);
    std::vector<DetectionCandidate> candidates = detector->detect(query, image_id);

    Json kept = Json::array();
    Json rejected = Json::array();
    for (const auto& c : candidates) {
        Json cj{{"box", to_json(c.box)},
                {"objectness", c.objectness},
                {"semantic", c.semantic_score},
                {"area", box_area(c.box)}};
        auto failed = failed_constraints(c, thresholds);
        if (failed.empty()) {
            kept.push_back(std::move(cj));
        } else {
            rejected.push_back(Json{{"candidate", std::move(cj)}, {"failed", failed}});
        }
    }

    // Same contract enforcement as the pipeline path.
    std::vector<VisualFragment> fragments =
        extract_visual_fragments(query, image_doc, *detector, thresholds);
    Json frags = Json::array();
    for (const auto& f : fragments) frags.push_back(to_json(f));

    Json out{{"query_id", query.id},
             {"image_id", image_id},
             {"thresholds",
              Json{{"tau_obj", thresholds.tau_obj},
                   {"tau_sem", thresholds.tau_sem},
                   {"tau_size", thresholds.tau_size}}},
             {"kept", std::move(kept)},
             {"rejected", std::move(rejected)},
             {"fragments", std::move(frags)},
             {"seed", global.seed}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_fig_build(const GlobalOptions& global, const std::string& in_path,
                  const std::string& out_path, const std::string& likelihood_spec,
                  const std::string& teacher_spec, long parallelism) {
    Config config = global.config();
    if (parallelism > 0) config.parallelism = parallelism;

    std::unique_ptr<LikelihoodScorer> owned_likelihood;
    std::unique_ptr<TeacherScorer> owned_teacher;
    std::unique_ptr<HttpBackend> http_l, http_t;
    LikelihoodScorer* likelihood = nullptr;
    TeacherScorer* teacher = nullptr;

    if (is_url(likelihood_spec)) {
        http_l = make_http(likelihood_spec);
        likelihood = http_l.get();
    } else {
        owned_likelihood = std::make_unique<MockLikelihood>(load_json_file(likelihood_spec),
                                                            "fixture:" + likelihood_spec);
        likelihood = owned_likelihood.get();
    }
    if (!teacher_spec.empty()) {
        if (is_url(teacher_spec)) {
            http_t = make_http(teacher_spec);
            teacher = http_t.get();
        } else {
            owned_teacher = std::make_unique<MockTeacher>(load_json_file(teacher_spec),
                                                          "fixture:" + teacher_spec);
            teacher = owned_teacher.get();
        }
    }

    std::vector<FigSample> samples = fig_samples_from_jsonl(in_path);
    std::vector<FigRecord> records =
        build_fig_dataset(samples, *likelihood, teacher, config, config.parallelism);

    std::map<std::string, std::string> descriptors{{"likelihood", likelihood->descriptor()}};
    if (teacher) descriptors["teacher"] = teacher->descriptor();
    RunManifest manifest = make_manifest(to_json(config), std::move(descriptors), global.seed);
    write_fig_records(out_path, manifest, config.tau_fig, records);

    if (global.verbose) {
        std::cerr << "wrote " << records.size() << " records to " << out_path << "\n";
    }
    return 0;
}

int cmd_selector_train([[maybe_unused]] const GlobalOptions& global, const std::string& data_path,
                       const TrainConfig& train_config, const std::string& out_path) {
    std::vector<FigRecord> dataset = read_fig_records(data_path);
    TrainReport report;
    SelectorModel model = train(dataset, extract_features, train_config, &report);

    ModelFile file;
    file.manifest = make_manifest(to_json(train_config), {{"data", data_path}},
                                  static_cast<long>(train_config.seed));
    file.model = model;
    file.train_config = train_config;
    file.final_loss = report.final_loss;
    save_model(out_path, file);

    Json summary{{"records", dataset.size()},
                 {"epoch_losses", report.epoch_losses},
                 {"final_loss", report.final_loss},
                 {"model", out_path}};
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_run(const GlobalOptions& global, const std::string& corpus_path,
            const std::string& queries_path, const std::string& model_path,
            const std::string& backends_spec, const std::string& out_path,
            const std::string& baseline, long budget) {
    Config config = global.config();
    std::vector<Document> corpus = load_corpus(corpus_path);
    std::vector<Query> queries = load_queries(queries_path);
    ResolvedBackends backends = resolve_backends(backends_spec, corpus);

    SelectorModel model;
    if (baseline.empty()) {
        model = load_model(model_path).model;
    }

    RunManifest manifest = make_manifest(to_json(config), backends.descriptors, global.seed);
    if (!baseline.empty()) {
        manifest.config["baseline"] = baseline;
        manifest.config["budget"] = budget;
    }

    std::ofstream out(out_path);
    if (!out) throw Error(ErrorKind::DataError, "cannot write '" + out_path + "'");
    out << Json{{"header", to_json(manifest)}}.dump() << "\n";

    for (const Query& query : queries) {
        RunResult result;
        if (baseline.empty()) {
            result = run(query, config, backends.pipeline, model);
        } else {
            result = run_truncate_baseline(query, config, backends.pipeline, budget);
        }
        out << Json{{"query_id", query.id},
                    {"answer", result.answer},
                    {"report", to_json(result.report)}}
                   .dump()
            << "\n";
        if (global.verbose) {
            std::cerr << query.id << ": " << result.report.context_tokens << " context tokens, "
                      << result.report.pool_sizes.selected << " items\n";
        }
    }
    return 0;
}

int cmd_report(const std::string& results_path, const std::string& fig_path,
               const std::string& edges_csv, bool as_json) {
    Json out = Json::object();

    if (!results_path.empty()) {
        std::vector<Json> lines = read_jsonl(results_path);
        double lat_retrieval = 0, lat_rerank = 0, lat_segsel = 0, lat_generate = 0;
        long total_tokens = 0, total_selected = 0, n = 0;
        long min_tokens = 0, max_tokens = 0;
        for (const Json& line : lines) {
            if (line.contains("header")) continue;
            PipelineReport r = pipeline_report_from_json(line.at("report"));
            lat_retrieval += r.phase_latencies.retrieval_s;
            lat_rerank += r.phase_latencies.rerank_s;
            lat_segsel += r.phase_latencies.segment_select_s;
            lat_generate += r.phase_latencies.generate_s;
            total_tokens += r.context_tokens;
            total_selected += r.pool_sizes.selected;
            min_tokens = n == 0 ? r.context_tokens : std::min(min_tokens, r.context_tokens);
            max_tokens = std::max(max_tokens, r.context_tokens);
            ++n;
        }
        if (n == 0) throw Error(ErrorKind::DataError, "no result records in '" + results_path + "'");
        const double dn = static_cast<double>(n);
        Json phases{{"retrieval", lat_retrieval / dn},
                    {"rerank", lat_rerank / dn},
                    {"segment_select", lat_segsel / dn},
                    {"generate", lat_generate / dn},
                    {"end_to_end", (lat_retrieval + lat_rerank + lat_segsel + lat_generate) / dn}};
        Json tokens{{"mean", total_tokens / dn},
                    {"min", min_tokens},
                    {"max", max_tokens},
                    {"total", total_tokens}};
        out["queries"] = n;
        out["mean_phase_latency_s"] = phases;
        out["context_tokens"] = tokens;
        out["mean_selected_items"] = total_selected / dn;

        if (!as_json) {
            std::cout << "queries: " << n << "\n\n";
            std::cout << "mean phase latency (s)\n";
            for (const char* phase : {"retrieval", "rerank", "segment_select", "generate", "end_to_end"}) {
                std::printf("  %-16s %.6f\n", phase, phases[phase].get<double>());
            }
            std::cout << "\ncontext tokens\n";
            std::printf("  %-16s %.2f\n", "mean", tokens["mean"].get<double>());
            std::printf("  %-16s %ld\n", "min", min_tokens);
            std::printf("  %-16s %ld\n", "max", max_tokens);
            std::printf("  %-16s %ld\n", "total", total_tokens);
            std::printf("\nmean selected items: %.2f\n", total_selected / dn);
        }
    }

    if (!fig_path.empty()) {
        std::vector<FigRecord> records = read_fig_records(fig_path);
        std::vector<double> edges;
        std::stringstream ss(edges_csv);
        std::string part;
        while (std::getline(ss, part, ',')) {
            if (part.empty()) continue;
            try {
                size_t pos = 0;
                edges.push_back(std::stod(part, &pos));
                if (pos != part.size()) throw std::invalid_argument(part);
            } catch (const std::exception&) {
                throw Error(ErrorKind::DataError, "bad edge value '" + part + "' in --edges");
            }
        }
        std::vector<long> counts = bucket_fig(records, edges);

        std::vector<std::string> labels;
        if (edges.empty()) {
            labels.push_back("all");
        } else {
            std::ostringstream first;
            first << "FIG <= " << edges.front();
            labels.push_back(first.str());
            for (size_t i = 1; i < edges.size(); ++i) {
                std::ostringstream mid;
                mid << edges[i - 1] << " < FIG <= " << edges[i];
                labels.push_back(mid.str());
            }
            std::ostringstream last;
            last << "FIG > " << edges.back();
            labels.push_back(last.str());
        }

        Json buckets = Json::array();
        for (size_t i = 0; i < counts.size(); ++i) {
            buckets.push_back(Json{{"interval", labels[i]}, {"count", counts[i]}});
        }
        out["fig_records"] = records.size();
        out["fig_buckets"] = buckets;
        out["fig_interval_convention"] = "left-open, right-closed (a < FIG <= b)";

        if (!as_json) {
            std::cout << "\nFIG buckets (left-open, right-closed: a < FIG <= b)\n";
            for (size_t i = 0; i < counts.size(); ++i) {
                std::printf("  %-24s %ld\n", labels[i].c_str(), counts[i]);
            }
        }
    }

    if (as_json) std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fragment-level evidence selection for retrieval-augmented generation"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--config", global.config_path, "config file (flat key = value)");
    app.add_option("--seed", global.seed, "manifest seed recorded in outputs");
    app.add_flag("--verbose", global.verbose, "verbose progress on stderr");

    // segment-text
    std::string st_query, st_doc, st_scores;
    CLI::App* seg_text = app.add_subcommand("segment-text", "recursively segment one text document");
    seg_text->add_option("--query", st_query, "query JSON file")->required();
    seg_text->add_option("--doc", st_doc, "document JSON file")->required();
    seg_text->add_option("--scores", st_scores, "scorer fixture file or endpoint URL")->required();

    // segment-image
    std::string si_query, si_image, si_detections;
    CLI::App* seg_image = app.add_subcommand("segment-image", "filter detector candidates for one image");
    seg_image->add_option("--query", si_query, "query JSON file")->required();
    seg_image->add_option("--image-id", si_image, "image document id / reference")->required();
    seg_image->add_option("--detections", si_detections, "detector fixture file or endpoint URL")->required();

    // fig build
    CLI::App* fig = app.add_subcommand("fig", "fragment information gain tooling");
    fig->require_subcommand(1);
    std::string fb_in, fb_out, fb_likelihood, fb_teacher;
    long fb_parallelism = 0;
    CLI::App* fig_build = fig->add_subcommand("build", "build the FIG supervision dataset");
    fig_build->add_option("--in", fb_in, "input samples JSONL")->required();
    fig_build->add_option("--out", fb_out, "output records JSONL")->required();
    fig_build->add_option("--likelihood", fb_likelihood, "likelihood fixture file or endpoint URL")->required();
    fig_build->add_option("--teacher", fb_teacher, "teacher fixture file or endpoint URL");
    fig_build->add_option("--parallelism", fb_parallelism, "concurrent likelihood calls");

    // selector train
    CLI::App* selector = app.add_subcommand("selector", "selector tooling");
    selector->require_subcommand(1);
    std::string tr_data, tr_out = "model.json";
    TrainConfig tr_config;
    CLI::App* selector_train = selector->add_subcommand("train", "train the selector by distillation");
    selector_train->add_option("--data", tr_data, "FIG records JSONL")->required();
    selector_train->add_option("--alpha", tr_config.alpha, "distillation weight");
    selector_train->add_option("--temperature", tr_config.temperature, "distillation temperature");
    selector_train->add_option("--epochs", tr_config.epochs, "training epochs");
    selector_train->add_option("--batch-size", tr_config.batch_size, "mini-batch size");
    selector_train->add_option("--lr", tr_config.learning_rate, "learning rate");
    selector_train->add_option("--seed", tr_config.seed, "shuffle seed");
    selector_train->add_option("--out", tr_out, "output model file");

    // run
    std::string run_corpus, run_queries, run_model, run_backends, run_out = "results.jsonl";
    std::string run_baseline;
    long run_budget = -1;
    CLI::App* run_cmd = app.add_subcommand("run", "run the retrieve-rerank-select-generate pipeline");
    run_cmd->add_option("--corpus", run_corpus, "corpus JSONL of documents")->required();
    run_cmd->add_option("--queries", run_queries, "queries JSONL")->required();
    run_cmd->add_option("--model", run_model, "selector model file");
    run_cmd->add_option("--backends", run_backends, "fixture directory or endpoints file")->required();
    run_cmd->add_option("--out", run_out, "output results JSONL");
    run_cmd->add_option("--baseline", run_baseline, "baseline mode: truncate");
    run_cmd->add_option("--budget", run_budget, "token budget for --baseline truncate");

    // report
    std::string rp_results, rp_fig, rp_edges = "0.0,0.2";
    bool rp_json = false;
    CLI::App* report_cmd = app.add_subcommand("report", "aggregate token, latency and FIG tables");
    report_cmd->add_option("--results", rp_results, "results JSONL from 'fragsel run'");
    report_cmd->add_option("--fig", rp_fig, "FIG records JSONL");
    report_cmd->add_option("--edges", rp_edges, "FIG bucket edges, comma-separated");
    report_cmd->add_flag("--json", rp_json, "emit a JSON object instead of tables");

    for (CLI::App* sub : app.get_subcommands({})) {
        sub->fallthrough();
        for (CLI::App* nested : sub->get_subcommands({})) nested->fallthrough();
    }

    try {
        app.parse(argc, argv);

        if (*seg_text) return cmd_segment_text(global, st_query, st_doc, st_scores);
        if (*seg_image) return cmd_segment_image(global, si_query, si_image, si_detections);
        if (*fig_build) {
            return cmd_fig_build(global, fb_in, fb_out, fb_likelihood, fb_teacher, fb_parallelism);
        }
        if (*selector_train) return cmd_selector_train(global, tr_data, tr_config, tr_out);
        if (*run_cmd) {
            if (!run_baseline.empty() && run_baseline != "truncate") {
                throw Error(ErrorKind::ConfigError,
                            "unknown baseline '" + run_baseline + "' (expected: truncate)");
            }
            if (!run_baseline.empty() && run_budget < 0) {
                throw Error(ErrorKind::ConfigError, "--baseline truncate requires --budget");
            }
            if (run_baseline.empty() && run_model.empty()) {
                throw Error(ErrorKind::ConfigError, "--model is required unless --baseline is used");
            }
            return cmd_run(global, run_corpus, run_queries, run_model, run_backends, run_out,
                           run_baseline, run_budget);
        }
        if (*report_cmd) {
            if (rp_results.empty() && rp_fig.empty()) {
                throw Error(ErrorKind::ConfigError, "report needs --results and/or --fig");
            }
            return cmd_report(rp_results, rp_fig, rp_edges, rp_json);
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error:USAGE: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error:" << e.code() << ": " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error:INTERNAL: " << e.what() << "\n";
        return 4;
    }
}
