// mph-lab: training, evaluation, modulation histograms, intrinsic-motivation
// ablations, and the tabular kernel-drift verifier.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "mph/bounds.hpp"
#include "mph/trainer.hpp"

namespace {

struct CommonArgs {
    std::string env = "keydoor";
    std::string agent = "mph";
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    bool seed_given = false;
};

mph::RunConfig resolve_config(const CommonArgs& args, const std::vector<std::string>& sets) {
    // precedence: per-env defaults < config file < explicit --set/--seed flags
    mph::RunConfig config =
        mph::default_run_config(args.env, mph::agent_kind_from_string(args.agent));
    if (!args.config_path.empty()) {
        mph::load_config_file(config, args.config_path);
    }
    for (const std::string& kv : sets) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos) throw mph::UsageError("--set expects key=value");
        mph::apply_config_entry(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (args.seed_given) {
        config.seed = args.seed;
        config.agent_config.seed = args.seed;
    }
    config.agent_config.kind = config.agent;
    return config;
}

void add_common(CLI::App* cmd, CommonArgs& args, std::vector<std::string>& sets) {
    cmd->add_option("--env", args.env, "environment: keydoor | pointpush");
    cmd->add_option("--agent", args.agent, "agent: flat | options | onehot | mph");
    cmd->add_option("--config", args.config_path, "key=value config file");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "run seed")->each([&args](const std::string&) {
        args.seed_given = true;
    });
    cmd->add_option("--set", sets, "override single config keys (key=value)")
        ->take_all();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"modulated policy hierarchy lab"};
    app.require_subcommand(1);

    CommonArgs args;
    std::vector<std::string> sets;

    auto* train = app.add_subcommand("train", "run a training session");
    add_common(train, args, sets);
    int train_rounds = -1;
    train->add_option("--rounds", train_rounds, "override round count");

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    add_common(eval, args, sets);
    std::string eval_ckpt;
    int eval_episodes = 32;
    eval->add_option("--checkpoint", eval_ckpt, "agent checkpoint")->required();
    eval->add_option("--episodes", eval_episodes, "evaluation episodes");

    auto* histogram = app.add_subcommand("histogram", "export modulation frequencies");
    add_common(histogram, args, sets);
    std::string hist_ckpt;
    int hist_episodes = 32;
    std::string hist_out = "histogram.tsv";
    histogram->add_option("--checkpoint", hist_ckpt, "agent checkpoint")->required();
    histogram->add_option("--episodes", hist_episodes, "episodes to average");
    histogram->add_option("--file", hist_out, "output tsv path");

    auto* ablate = app.add_subcommand("ablate", "run the four intrinsic-motivation arms");
    add_common(ablate, args, sets);

    auto* bounds = app.add_subcommand("bounds", "tabular kernel-drift verification");
    int instances = 1000;
    int levels = 3;
    std::vector<double> deltas;
    std::uint64_t bounds_seed = 0;
    std::string bounds_out = "bounds_report.json";
    bounds->add_option("--instances", instances, "random instances");
    bounds->add_option("--levels", levels, "maximum hierarchy depth (2 or 3)");
    bounds->add_option("--delta", deltas, "per-level KL budgets to sample from")->take_all();
    bounds->add_option("--seed", bounds_seed, "campaign seed");
    bounds->add_option("--file", bounds_out, "report path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            mph::RunConfig config = resolve_config(args, sets);
            if (train_rounds >= 0) config.rounds = train_rounds;
            const mph::TrainResult result = mph::run_training(config, args.out_dir);
            std::printf("%s\n", mph::metrics_header().c_str());
            for (const mph::MetricsRow& row : result.metrics) {
                std::printf("%s\n", mph::format_metrics_row(row).c_str());
            }
            std::printf("# final_success %.10g final_return %.10g%s\n", result.final_success,
                        result.final_return, result.aborted ? " (aborted on NaN)" : "");
            return result.aborted ? 2 : 0;
        }

        if (eval->parsed()) {
            mph::RunConfig config = resolve_config(args, sets);
            mph::Env env = mph::Env::make(config.env_name, config.horizon);
            mph::AgentConfig agent_config = config.agent_config;
            agent_config.seed = config.seed;
            mph::Agent agent = mph::build_agent(agent_config, env.spec());
            mph::load_agent(agent, eval_ckpt);
            const mph::EvalResult r = mph::evaluate(agent, env, eval_episodes, config.seed);
            std::printf("success_rate %.10g\nmean_return %.10g\n", r.success_rate,
                        r.mean_return);
            return 0;
        }

        if (histogram->parsed()) {
            mph::RunConfig config = resolve_config(args, sets);
            mph::Env env = mph::Env::make(config.env_name, config.horizon);
            mph::AgentConfig agent_config = config.agent_config;
            agent_config.seed = config.seed;
            mph::Agent agent = mph::build_agent(agent_config, env.spec());
            mph::load_agent(agent, hist_ckpt);
            const mph::HistogramTable table =
                mph::export_modulation_histogram(agent, env, hist_episodes, config.seed);
            mph::write_histogram_tsv(table, hist_out);
            std::printf("wrote %s (%zu rows, width %d, T=%d)\n", hist_out.c_str(),
                        table.freq.size(), table.width, table.time_scale);
            return 0;
        }

        if (ablate->parsed()) {
            mph::RunConfig config = resolve_config(args, sets);
            const std::vector<mph::AblationArm> arms = mph::run_ablation(config, args.out_dir);
            std::printf("arm,final_success,final_return\n");
            for (const mph::AblationArm& arm : arms) {
                std::printf("%s,%.10g,%.10g\n", arm.name.c_str(), arm.final_success,
                            arm.final_return);
            }
            return 0;
        }

        if (bounds->parsed()) {
            mph::CampaignConfig config;
            config.instances = instances;
            config.max_levels = levels;
            config.seed = bounds_seed;
            if (!deltas.empty()) config.deltas = deltas;
            const mph::CampaignResult result = mph::run_bounds_campaign(config);

            nlohmann::json report;
            report["instances"] = result.instances.size();
            report["violations"] = result.violations;
            report["min_slack"] = result.min_slack;
            report["max_drift_ratio"] = result.max_drift_ratio;
            report["results"] = nlohmann::json::array();
            for (const mph::CampaignInstance& instance : result.instances) {
                nlohmann::json entry;
                entry["seed"] = instance.seed;
                entry["env_states"] = instance.env_states;
                entry["action_counts"] = instance.action_counts;
                entry["deltas"] = instance.deltas;
                entry["pass"] = instance.report.pass;
                entry["levels"] = nlohmann::json::array();
                for (const mph::LevelDrift& level : instance.report.levels) {
                    entry["levels"].push_back({{"level", level.level},
                                               {"drift", level.drift},
                                               {"bound", level.bound},
                                               {"slack", level.slack},
                                               {"holder_l1", level.holder_l1},
                                               {"pass", level.pass}});
                }
                report["results"].push_back(std::move(entry));
            }
            std::ofstream out(bounds_out, std::ios::trunc);
            out << report.dump(2) << "\n";
            std::printf("instances %d violations %d min_slack %.10g max_drift_ratio %.10g\n",
                        instances, result.violations, result.min_slack,
                        result.max_drift_ratio);
            return result.violations == 0 ? 0 : 3;
        }
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
    return 0;
}
