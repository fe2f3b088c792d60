#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fragsel/fig.hpp"
#include "fragsel/json_io.hpp"
#include "fragsel/manifest.hpp"
#include "fragsel/selector.hpp"

namespace fragsel {

// FIG dataset input: one {query_id, query_text, answer_tokens, fragments}
// object per line.
std::vector<FigSample> fig_samples_from_jsonl(const std::string& path);

Json to_json(const FigRecord& record);
FigRecord fig_record_from_json(const Json& j);

// FIG dataset output: a {"header": ...} line carrying the manifest, tau_fig
// and backend descriptors, then one FigRecord per line.
void write_fig_records(const std::string& path, const RunManifest& manifest, double tau_fig,
                       const std::vector<FigRecord>& records);

// Reads a FIG record file, skipping the header line when present.
std::vector<FigRecord> read_fig_records(const std::string& path);

// Selector model file: a single JSON object with the manifest embedded.
struct ModelFile {
    RunManifest manifest;
    SelectorModel model;
    std::optional<TrainConfig> train_config;
    std::optional<double> final_loss;
};

void save_model(const std::string& path, const ModelFile& file);
ModelFile load_model(const std::string& path);

Json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const Json& j);

}  // namespace fragsel
