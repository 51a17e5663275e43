#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "stylos/corpus.hpp"
#include "stylos/explain.hpp"
#include "stylos/probe.hpp"
#include "stylos/tasks.hpp"

// JSON artifact formats shared by the CLI and the HTTP service. Every
// artifact is wrapped as {tool, version, kind, params, result}; the same
// inputs always render to the same bytes.
namespace stylos::io {

using nlohmann::json;

std::string version();

json envelope(const std::string& kind, json params, json result);
// Checks tool/kind and returns the result member.
const json& unwrap(const json& artifact, const std::string& kind);

// Canonical rendering used for every artifact file and response body.
std::string render(const json& j);
json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

json to_json(const SparseVector& v);
SparseVector sparse_from_json(const json& j);

json to_json(const corpus::Segment& s);
json to_json(const corpus::PairSet& p);
corpus::PairSet pairs_from_json(const json& j);

json corpus_artifact(const corpus::CorpusBundle& b, std::uint64_t seed);
corpus::CorpusBundle corpus_from_artifact(const json& artifact);

json to_json(const tasks::Metrics& m);
tasks::Metrics metrics_from_json(const json& j);

json to_json(const tasks::TaskSpec& s);
tasks::TaskSpec spec_from_json(const json& j);

json to_json(const optim::LinearModel& m);
optim::LinearModel model_from_json(const json& j);

json model_artifact(const tasks::TrainedTask& t);
tasks::TrainedTask task_from_artifact(const json& artifact);

json metrics_artifact(const tasks::TrainedTask& t);

json ranking_artifact(const explain::FeatureRanking& r, const tasks::TrainedTask& t);
json local_artifact(const explain::LocalExplanation& e, const tasks::TrainedTask& t);
json irof_artifact(const explain::IrofCurve& c, const tasks::TrainedTask& t);
json neighbors_artifact(const explain::NeighborReport& r, const tasks::TrainedTask& t);

json to_json(const probe::LabelerParams& p);
probe::LabelerParams labeler_params_from_json(const json& j);
json probe_artifact(const probe::ProbeReport& r, const probe::LabelerParams& params,
                    const probe::Labeler& labeler);

}  // namespace stylos::io
