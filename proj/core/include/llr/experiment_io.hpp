#pragma once

#include "llr/experiment.hpp"

#include <filesystem>
#include <string>

namespace llr {

/// Experiment config parsed from JSON. `grid_auto` marks a config whose grid
/// is resolved from the data (grid: "auto"); resolve_grid fills it in.
struct ParsedExperimentConfig {
    ExperimentConfig config;
    bool grid_auto = false;
};

/// Strict-schema parse: top-level keys model, replications, bandwidth,
/// kernel, grid, base_seed; model keys kind, m, n, margin, sweeps, noise_sd,
/// order, redraw_noise, plus covariate_preset (model2) and halfwidth (iid).
/// Unknown keys and type mismatches are errors.
ParsedExperimentConfig parse_experiment_config(const std::string& json_text);
ParsedExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Fills config.x_grid via default_x_grid when the config asked for "auto".
void resolve_grid(ParsedExperimentConfig& parsed);

/// `lo:hi:count` evaluation grid syntax.
std::vector<double> parse_grid_spec(const std::string& spec);

std::string experiment_curves_csv(const ExperimentResult& result);
std::string experiment_summary_csv(const ExperimentResult& result);
std::string experiment_nsr_csv(const ExperimentResult& result);
std::string experiment_summary_json(const ExperimentConfig& cfg, const ExperimentResult& result);
std::string scatter_csv(const LatticeField& field);

/// Writes curves.csv, summary.csv, nsr.csv, scatter.csv (replication 1) and
/// summary.json under out_dir, each atomically.
void write_experiment_outputs(const ExperimentConfig& cfg, const ExperimentResult& result,
                              const std::filesystem::path& out_dir);

} // namespace llr
