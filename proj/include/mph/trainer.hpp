#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mph/config.hpp"

namespace mph {

struct MetricsRow {
    int round = 0;
    long env_steps = 0;
    double kl_worker = 0.0;
    double kl_master = 0.0;
    double policy_obj_worker = 0.0;
    double policy_obj_master = 0.0;
    double value_loss_worker = 0.0;
    double value_loss_master = 0.0;
    double curiosity_loss_worker = 0.0;
    double curiosity_loss_master = 0.0;
    double intrinsic_worker = 0.0;
    double intrinsic_master = 0.0;
    double eval_success = 0.0;
    double eval_return = 0.0;
};

std::string metrics_header();
std::string format_metrics_row(const MetricsRow& row);

struct TrainResult {
    std::vector<MetricsRow> metrics;
    Agent agent;
    double final_success = 0.0;
    double final_return = 0.0;
    bool aborted = false;
};

// Full training loop: round 0 is an eval-only row, then per round
// {collect batch across workers -> per-level updates -> periodic eval}.
// Deterministic given (seed, config, workers). When out_dir is non-empty,
// writes metrics.csv, config.txt, and checkpoint.ckpt (last good state on
// NaN abort). The per-level KL contract is asserted on every row.
TrainResult run_training(const RunConfig& config,
                         const std::filesystem::path& out_dir = {});

// Fig-4-style modulation table on the master clock: one row per timestep,
// frequencies held constant within each activation window, computed over
// the episodes still running at the window start. Columns are bits (mph)
// or skills (options / one-hot); flat agents are rejected.
struct HistogramTable {
    int time_scale = 1;
    int width = 0;
    std::vector<std::vector<double>> freq;  // [t][j]
    std::vector<int> alive;                 // [t] episodes contributing
};

HistogramTable export_modulation_histogram(const Agent& agent, Env& env, int episodes,
                                           std::uint64_t seed);
void write_histogram_tsv(const HistogramTable& table, const std::filesystem::path& path);

// The four intrinsic-motivation arms, trained with shared seeds.
struct AblationArm {
    std::string name;
    double final_success = 0.0;
    double final_return = 0.0;
};

std::vector<AblationArm> run_ablation(const RunConfig& base,
                                      const std::filesystem::path& out_dir);

}  // namespace mph
