#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedprune/datagen.hpp"
#include "fedprune/evaluation.hpp"
#include "fedprune/federation.hpp"

namespace fedprune {

/// Grid of prune-configuration axes; the cross product defines the
/// federated cells of one run.
struct GridAxes {
    std::vector<double> sparsity = {0.5};
    std::vector<Metric> metric = {Metric::Wanda};
    std::vector<ComparisonGroup> local_group = {ComparisonGroup::Row};
    std::vector<ComparisonGroup> server_group = {ComparisonGroup::Layer};
    std::vector<Strategy> strategy = {Strategy::OneShot};
    std::vector<bool> scaling = {false};
    std::vector<std::uint32_t> clients = {16};
};

struct ExperimentSpec {
    CorpusParams corpus;
    ModelDims model;
    TrainParams train;
    GridAxes grid;
    double ria_alpha = 0.5;
    std::string sparsegpt_lambda_rule = "default";
    std::uint64_t master_seed = 0;

    static ExperimentSpec from_file(const std::string& path);
    /// Accepts the object produced by either the TOML reader or a .json file.
    static ExperimentSpec from_json(const nlohmann::json& j);
    void validate() const;
};

/// Stable per-cell seed: mixes the master seed with a canonical key=value
/// rendering of the cell axes, so adding grid values never reshuffles the
/// seeds of existing cells.
std::uint64_t cell_seed(std::uint64_t master,
                        const std::vector<std::pair<std::string, std::string>>& axes);

struct RunArtifacts {
    std::vector<PruneReport> reports;
    nlohmann::json archive;
    std::string model_checkpoint;
    std::string corpus_dump;

    std::string csv() const;
};

/// Executes every grid cell plus the Centralized and Local-only baselines.
RunArtifacts execute_run(const ExperimentSpec& spec);

enum class SweepAxis { Clients, Samples };
SweepAxis sweep_axis_from_name(std::string_view name);

/// Sensitivity sweep over client count (fixed total samples) or total
/// calibration samples (clients = samples/2). Uses the first value of every
/// grid axis as the fixed configuration; emits centralized, local-only and
/// federated rows per value. Incompatible values produce a "skipped" row.
RunArtifacts execute_sweep(const ExperimentSpec& base, SweepAxis axis,
                           const std::vector<std::uint32_t>& values);

}  // namespace fedprune
