#include "mph/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace mph {

std::string metrics_header() {
    return "round,env_steps,kl_worker,kl_master,policy_obj_worker,policy_obj_master,"
           "value_loss_worker,value_loss_master,curiosity_loss_worker,"
           "curiosity_loss_master,intrinsic_worker,intrinsic_master,"
           "eval_success,eval_return";
}

std::string format_metrics_row(const MetricsRow& row) {
    char buffer[512];
    std::snprintf(buffer, sizeof(buffer),
                  "%d,%ld,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,"
                  "%.10g,%.10g",
                  row.round, row.env_steps, row.kl_worker, row.kl_master,
                  row.policy_obj_worker, row.policy_obj_master, row.value_loss_worker,
                  row.value_loss_master, row.curiosity_loss_worker,
                  row.curiosity_loss_master, row.intrinsic_worker, row.intrinsic_master,
                  row.eval_success, row.eval_return);
    return buffer;
}

namespace {

void fill_level_stats(MetricsRow& row, const RoundStats& stats) {
    row.kl_worker = stats.levels[0].mean_kl;
    row.policy_obj_worker = stats.levels[0].policy_objective;
    row.value_loss_worker = stats.levels[0].value_loss;
    row.curiosity_loss_worker = stats.levels[0].curiosity_loss;
    row.intrinsic_worker = stats.levels[0].mean_intrinsic;
    if (stats.levels.size() > 1) {
        row.kl_master = stats.levels[1].mean_kl;
        row.policy_obj_master = stats.levels[1].policy_objective;
        row.value_loss_master = stats.levels[1].value_loss;
        row.curiosity_loss_master = stats.levels[1].curiosity_loss;
        row.intrinsic_master = stats.levels[1].mean_intrinsic;
    }
}

void write_metrics_file(const std::filesystem::path& out_dir,
                        const std::vector<MetricsRow>& rows) {
    std::ofstream out(out_dir / "metrics.csv", std::ios::trunc);
    out << metrics_header() << "\n";
    for (const MetricsRow& row : rows) out << format_metrics_row(row) << "\n";
}

}  // namespace

TrainResult run_training(const RunConfig& config, const std::filesystem::path& out_dir) {
    config.validate();
    const bool writing = !out_dir.empty();
    if (writing) std::filesystem::create_directories(out_dir);

    Env env = Env::make(config.env_name, config.horizon);
    AgentConfig agent_config = config.agent_config;
    agent_config.kind = config.agent;
    agent_config.seed = config.seed;

    TrainResult result;
    result.agent = build_agent(agent_config, env.spec());
    Agent& agent = result.agent;

    // persistent per-worker streams: stream layout is part of the
    // determinism contract
    std::vector<Rng> worker_rngs;
    worker_rngs.reserve(config.workers);
    for (int w = 0; w < config.workers; ++w) {
        worker_rngs.emplace_back(derive_seed(config.seed, 1000 + w));
    }

    auto eval_now = [&](int round) {
        return evaluate(agent, env, config.eval_episodes,
                        derive_seed(config.seed, 500000 + round));
    };

    long env_steps = 0;
    {
        MetricsRow row;
        row.round = 0;
        row.env_steps = 0;
        const EvalResult eval = eval_now(0);
        row.eval_success = eval.success_rate;
        row.eval_return = eval.mean_return;
        result.final_success = eval.success_rate;
        result.final_return = eval.mean_return;
        result.metrics.push_back(row);
    }

    Agent last_good = agent;
    for (int round = 1; round <= config.rounds; ++round) {
        std::vector<CollectedEpisode> episodes;
        episodes.reserve(config.rollouts_per_round);
        for (int r = 0; r < config.rollouts_per_round; ++r) {
            episodes.push_back(collect_episode(agent, env, worker_rngs[r % config.workers]));
        }
        const RoundStats stats = update_agent(agent, episodes);
        env_steps += stats.env_steps;

        MetricsRow row;
        row.round = round;
        row.env_steps = env_steps;
        fill_level_stats(row, stats);

        if (stats.aborted) {
            // NaN detected inside an update: stop, keep the last good agent
            agent = last_good;
            result.aborted = true;
            row.eval_success = result.final_success;
            row.eval_return = result.final_return;
            result.metrics.push_back(row);
            break;
        }
        for (int k = 0; k < agent.level_count(); ++k) {
            if (stats.levels[k].mean_kl > 1.5 * agent.levels[k].ppo.delta + 1e-12) {
                throw DomainError("trainer: per-level KL contract violated");
            }
        }
        last_good = agent;

        if (round % config.eval_every == 0 || round == config.rounds) {
            const EvalResult eval = eval_now(round);
            result.final_success = eval.success_rate;
            result.final_return = eval.mean_return;
        }
        row.eval_success = result.final_success;
        row.eval_return = result.final_return;
        result.metrics.push_back(row);
    }

    if (writing) {
        write_metrics_file(out_dir, result.metrics);
        std::ofstream cfg(out_dir / "config.txt", std::ios::trunc);
        cfg << serialize_config(config);
        save_agent(agent, out_dir / "checkpoint.ckpt");
    }
    return result;
}

HistogramTable export_modulation_histogram(const Agent& agent, Env& env, int episodes,
                                           std::uint64_t seed) {
    if (!agent.has_master()) {
        throw UsageError("histogram: flat agents have no modulation signal");
    }
    if (episodes < 1) throw UsageError("histogram: episode count must be >= 1");

    const int t2 = agent.hspec.levels[1].time_scale;
    const int width = agent.hspec.levels[1].signal_width;
    const int horizon = agent.env_spec.horizon;
    const bool categorical = agent.levels[1].head == HeadKind::categorical;

    const int windows = (horizon + t2 - 1) / t2;
    std::vector<std::vector<double>> counts(windows, std::vector<double>(width, 0.0));
    std::vector<int> alive(windows, 0);

    Rng rng(derive_seed(seed, 777));
    for (int e = 0; e < episodes; ++e) {
        const CollectedEpisode episode = collect_episode(agent, env, rng);
        for (size_t t = 0; t < episode.trace.steps.size(); ++t) {
            for (const LevelDecision& d : episode.trace.steps[t].decisions) {
                if (d.level != 2) continue;
                // master decisions land exactly on window starts
                const int window = static_cast<int>(t) / t2;
                ++alive[window];
                if (categorical) {
                    counts[window][static_cast<int>(d.action[0])] += 1.0;
                } else {
                    for (int j = 0; j < width; ++j) counts[window][j] += d.action[j];
                }
            }
        }
    }

    HistogramTable table;
    table.time_scale = t2;
    table.width = width;
    for (int w = 0; w < windows; ++w) {
        if (alive[w] == 0) break;
        std::vector<double> freq(width);
        for (int j = 0; j < width; ++j) freq[j] = counts[w][j] / alive[w];
        const int window_end = std::min((w + 1) * t2, horizon);
        for (int t = w * t2; t < window_end; ++t) {
            table.freq.push_back(freq);
            table.alive.push_back(alive[w]);
        }
    }
    return table;
}

void write_histogram_tsv(const HistogramTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    out << "t";
    for (int j = 0; j < table.width; ++j) out << "\tsignal" << j;
    out << "\talive\n";
    char buffer[64];
    for (size_t t = 0; t < table.freq.size(); ++t) {
        out << t;
        for (int j = 0; j < table.width; ++j) {
            std::snprintf(buffer, sizeof(buffer), "%.17g", table.freq[t][j]);
            out << "\t" << buffer;
        }
        out << "\t" << table.alive[t] << "\n";
    }
}

std::vector<AblationArm> run_ablation(const RunConfig& base,
                                      const std::filesystem::path& out_dir) {
    struct ArmSpec {
        const char* name;
        bool worker;
        bool master;
    };
    const ArmSpec arms[] = {{"both", true, true},
                            {"worker_only", true, false},
                            {"master_only", false, true},
                            {"none", false, false}};

    std::vector<AblationArm> results;
    for (const ArmSpec& arm : arms) {
        RunConfig config = base;
        config.agent_config.worker_curiosity.enabled = arm.worker;
        config.agent_config.master_curiosity.enabled = arm.master;
        const TrainResult r =
            run_training(config, out_dir.empty() ? std::filesystem::path{}
                                                 : out_dir / arm.name);
        results.push_back({arm.name, r.final_success, r.final_return});
    }

    std::stable_sort(results.begin(), results.end(),
                     [](const AblationArm& a, const AblationArm& b) {
                         return a.final_success > b.final_success;
                     });
    if (!out_dir.empty()) {
        std::ofstream out(out_dir / "ablation.csv", std::ios::trunc);
        out << "arm,final_success,final_return\n";
        char buffer[128];
        for (const AblationArm& arm : results) {
            std::snprintf(buffer, sizeof(buffer), "%s,%.10g,%.10g", arm.name.c_str(),
                          arm.final_success, arm.final_return);
            out << buffer << "\n";
        }
    }
    return results;
}

}  // namespace mph
