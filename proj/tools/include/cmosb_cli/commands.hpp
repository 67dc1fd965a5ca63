#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cmosb/data.hpp"
#include "cmosb/sbo.hpp"
#include "cmosb_cli/config.hpp"

namespace cmosb::cli {

using Paths = std::vector<std::filesystem::path>;

std::shared_ptr<const data::Dataset> load_dataset(const ExperimentConfig& config);
fed::ContextOptions context_options(const ExperimentConfig& config, const data::Dataset& dataset);

// dataset.csv plus the dataset.json sidecar.
Paths cmd_gen_data(const ExperimentConfig& config);

// forest.json, leaf_log.json, report.json for config.training_config().
Paths cmd_train(const ExperimentConfig& config);

// attack_report.json from a leaf log; the forest file, when given, must parse.
Paths cmd_attack(const ExperimentConfig& config, const std::filesystem::path& leaf_log,
                 const std::optional<std::filesystem::path>& forest);

// front.csv, front.json, hv_trace.csv, baselines.csv.
Paths cmd_optimize(const ExperimentConfig& config);

// Pairwise projections of a front (plus baselines) and, when a trace is given,
// hypervolume against generation. Writes nothing when the front is empty.
Paths cmd_plot(const std::filesystem::path& front_json, const std::optional<std::filesystem::path>& trace_csv,
               const std::filesystem::path& output);

}  // namespace cmosb::cli
