#include "fragsel/dataset_io.hpp"

#include <fstream>

namespace fragsel {

std::vector<FigSample> fig_samples_from_jsonl(const std::string& path) {
    std::vector<FigSample> samples;
    for (const Json& j : read_jsonl(path)) {
        FigSample sample;
        sample.query.id = j.at("query_id").get<std::string>();
        sample.query.text = j.at("query_text").get<std::string>();
        sample.query.validate();
        for (const auto& t : j.at("answer_tokens")) {
            sample.answer_tokens.push_back(t.get<std::string>());
        }
        if (sample.answer_tokens.empty()) {
            throw Error(ErrorKind::DataError,
                        "sample for query '" + sample.query.id + "' has no answer tokens");
        }
        for (const auto& f : j.at("fragments")) {
            sample.fragments.push_back(evidence_item_from_json(f));
        }
        samples.push_back(std::move(sample));
    }
    return samples;
}

Json to_json(const FigRecord& record) {
    Json j{{"query_id", record.query_id},
           {"query_text", record.query_text},
           {"fragment", to_json(record.fragment)},
           {"fig", record.fig},
           {"hard_label", record.hard_label}};
    j["teacher_logit"] = record.teacher_logit ? Json(*record.teacher_logit) : Json(nullptr);
    return j;
}

FigRecord fig_record_from_json(const Json& j) {
    FigRecord r;
    r.query_id = j.at("query_id").get<std::string>();
    r.query_text = j.value("query_text", std::string());
    r.fragment = evidence_item_from_json(j.at("fragment"));
    r.fig = j.at("fig").get<double>();
    r.hard_label = j.at("hard_label").get<int>();
    if (r.hard_label != 0 && r.hard_label != 1) {
        throw Error(ErrorKind::DataError, "hard_label must be 0 or 1");
    }
    if (j.contains("teacher_logit") && !j["teacher_logit"].is_null()) {
        r.teacher_logit = j["teacher_logit"].get<double>();
    }
    return r;
}

void write_fig_records(const std::string& path, const RunManifest& manifest, double tau_fig,
                       const std::vector<FigRecord>& records) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::DataError, "cannot write '" + path + "'");
    }
    Json header = to_json(manifest);
    header["tau_fig"] = tau_fig;
    out << Json{{"header", std::move(header)}}.dump() << "\n";
    for (const auto& record : records) {
        out << to_json(record).dump() << "\n";
    }
}

std::vector<FigRecord> read_fig_records(const std::string& path) {
    std::vector<FigRecord> records;
    for (const Json& j : read_jsonl(path)) {
        if (j.contains("header")) continue;
        records.push_back(fig_record_from_json(j));
    }
    return records;
}

Json to_json(const TrainConfig& cfg) {
    return Json{{"alpha", cfg.alpha},
                {"temperature", cfg.temperature},
                {"learning_rate", cfg.learning_rate},
                {"epochs", cfg.epochs},
                {"batch_size", cfg.batch_size},
                {"seed", cfg.seed}};
}

TrainConfig train_config_from_json(const Json& j) {
    TrainConfig cfg;
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.temperature = j.value("temperature", cfg.temperature);
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.validate();
    return cfg;
}

void save_model(const std::string& path, const ModelFile& file) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::DataError, "cannot write '" + path + "'");
    }
    Json j{{"manifest", to_json(file.manifest)},
           {"feature_spec", file.model.feature_spec},
           {"weights", file.model.weights},
           {"bias", file.model.bias}};
    j["train_config"] = file.train_config ? to_json(*file.train_config) : Json(nullptr);
    j["final_loss"] = file.final_loss ? Json(*file.final_loss) : Json(nullptr);
    out << j.dump(2) << "\n";
}

ModelFile load_model(const std::string& path) {
    Json j = load_json_file(path);
    ModelFile file;
    file.model.feature_spec = j.at("feature_spec").get<std::string>();
    for (const auto& w : j.at("weights")) file.model.weights.push_back(w.get<double>());
    file.model.bias = j.at("bias").get<double>();
    if (file.model.weights.empty()) {
        throw Error(ErrorKind::DataError, "model file '" + path + "' has no weights");
    }
    if (j.contains("train_config") && !j["train_config"].is_null()) {
        file.train_config = train_config_from_json(j["train_config"]);
    }
    if (j.contains("final_loss") && !j["final_loss"].is_null()) {
        file.final_loss = j["final_loss"].get<double>();
    }
    return file;
}

}  // namespace fragsel
