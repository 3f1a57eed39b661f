#include "mph/config.hpp"

#include <fstream>
#include <sstream>

#include "mph/envs/env.hpp"

namespace mph {

EnvSpec RunConfig::env_spec() const {
    return Env::make(env_name, horizon).spec();
}

void RunConfig::validate() const {
    if (rounds < 0) throw UsageError("config: rounds must be >= 0");
    if (rollouts_per_round < 1) throw UsageError("config: rollouts_per_round must be >= 1");
    if (workers < 1) throw UsageError("config: workers must be >= 1");
    if (eval_episodes < 1) throw UsageError("config: eval_episodes must be >= 1");
    if (eval_every < 1) throw UsageError("config: eval_every must be >= 1");
    if (agent != AgentKind::flat) {
        HierarchySpec::two_level(env_spec().observation_dim, agent_config.master_time_scale,
                                 agent_config.signal_width);
    }
}

RunConfig default_run_config(const std::string& env_name, AgentKind kind) {
    RunConfig config;
    config.env_name = env_name;
    config.agent = kind;
    config.agent_config.kind = kind;
    config.agent_config.master_time_scale = kind == AgentKind::options ? 8 : 4;
    config.agent_config.signal_width = 3;

    auto& worker = config.agent_config.worker_ppo;
    auto& master = config.agent_config.master_ppo;
    if (env_name == "pointpush") {
        config.rollouts_per_round = 32;
        worker.gamma = master.gamma = 0.98;
        worker.epochs = master.epochs = 32;
        worker.lr_value = master.lr_value = 3e-4;
    } else {
        config.rollouts_per_round = 50;
        worker.gamma = master.gamma = 0.985;
        worker.epochs = master.epochs = 40;
        worker.lr_value = master.lr_value = 1e-2;
    }
    worker.lr_policy = master.lr_policy = 1e-4;
    worker.delta = 0.002;
    master.delta = 0.001;

    // intrinsic motivation on both levels by default for MPH, off for the
    // baseline agents (they are the plain comparison methods)
    const bool curious = kind == AgentKind::mph;
    config.agent_config.worker_curiosity.enabled = curious;
    config.agent_config.master_curiosity.enabled = curious;
    return config;
}

namespace {

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const double x = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw UsageError("config: bad numeric value for " + key + ": " + value);
    }
}

int parse_int(const std::string& key, const std::string& value) {
    const double x = parse_double(key, value);
    const int i = static_cast<int>(x);
    if (x != i) throw UsageError("config: expected integer for " + key);
    return i;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "on") return true;
    if (value == "0" || value == "false" || value == "off") return false;
    throw UsageError("config: expected boolean for " + key);
}

}  // namespace

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value) {
    AgentConfig& a = config.agent_config;
    if (key == "env") {
        config.env_name = value;
    } else if (key == "agent") {
        config.agent = agent_kind_from_string(value);
        a.kind = config.agent;
    } else if (key == "seed") {
        config.seed = static_cast<std::uint64_t>(parse_double(key, value));
        a.seed = config.seed;
    } else if (key == "rounds") {
        config.rounds = parse_int(key, value);
    } else if (key == "rollouts_per_round") {
        config.rollouts_per_round = parse_int(key, value);
    } else if (key == "workers") {
        config.workers = parse_int(key, value);
    } else if (key == "eval_episodes") {
        config.eval_episodes = parse_int(key, value);
    } else if (key == "eval_every") {
        config.eval_every = parse_int(key, value);
    } else if (key == "horizon") {
        config.horizon = parse_int(key, value);
    } else if (key == "hierarchy.t2") {
        a.master_time_scale = parse_int(key, value);
    } else if (key == "hierarchy.m2") {
        a.signal_width = parse_int(key, value);
    } else if (key == "hierarchy.emb_dim") {
        a.emb_dim = parse_int(key, value);
    } else if (key == "ppo.gamma") {
        a.worker_ppo.gamma = a.master_ppo.gamma = parse_double(key, value);
    } else if (key == "ppo.gae_lambda") {
        a.worker_ppo.gae_lambda = a.master_ppo.gae_lambda = parse_double(key, value);
    } else if (key == "ppo.epochs") {
        a.worker_ppo.epochs = a.master_ppo.epochs = parse_int(key, value);
    } else if (key == "ppo.clip_ratio") {
        a.worker_ppo.clip_ratio = a.master_ppo.clip_ratio = parse_double(key, value);
    } else if (key == "ppo.lr_policy") {
        a.worker_ppo.lr_policy = a.master_ppo.lr_policy = parse_double(key, value);
    } else if (key == "ppo.lr_value") {
        a.worker_ppo.lr_value = a.master_ppo.lr_value = parse_double(key, value);
    } else if (key == "ppo.worker.delta") {
        a.worker_ppo.delta = parse_double(key, value);
    } else if (key == "ppo.master.delta") {
        a.master_ppo.delta = parse_double(key, value);
    } else if (key == "curiosity.beta") {
        a.worker_curiosity.beta = a.master_curiosity.beta = parse_double(key, value);
    } else if (key == "curiosity.lambda") {
        a.worker_curiosity.lambda = a.master_curiosity.lambda = parse_double(key, value);
    } else if (key == "curiosity.worker.eta") {
        a.worker_curiosity.eta = parse_double(key, value);
    } else if (key == "curiosity.master.eta") {
        a.master_curiosity.eta = parse_double(key, value);
    } else if (key == "curiosity.worker.enabled") {
        a.worker_curiosity.enabled = parse_bool(key, value);
    } else if (key == "curiosity.master.enabled") {
        a.master_curiosity.enabled = parse_bool(key, value);
    } else if (key == "models.lr") {
        a.lr_models = parse_double(key, value);
    } else if (key == "models.epochs") {
        a.model_epochs = parse_int(key, value);
    } else {
        throw UsageError("config: unknown key " + key);
    }
}

void load_config_file(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("config: cannot open " + path.string());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const size_t eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos) {
            throw UsageError("config: line " + std::to_string(line_no) + " has no '='");
        }
        auto strip = [](std::string s) {
            const size_t b = s.find_first_not_of(" \t\r");
            const size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        apply_config_entry(config, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
    }
}

std::string serialize_config(const RunConfig& config) {
    const AgentConfig& a = config.agent_config;
    std::ostringstream out;
    out << "env = " << config.env_name << "\n";
    out << "agent = " << to_string(config.agent) << "\n";
    out << "seed = " << config.seed << "\n";
    out << "rounds = " << config.rounds << "\n";
    out << "rollouts_per_round = " << config.rollouts_per_round << "\n";
    out << "workers = " << config.workers << "\n";
    out << "eval_episodes = " << config.eval_episodes << "\n";
    out << "eval_every = " << config.eval_every << "\n";
    out << "horizon = " << config.horizon << "\n";
    out << "hierarchy.t2 = " << a.master_time_scale << "\n";
    out << "hierarchy.m2 = " << a.signal_width << "\n";
    out << "hierarchy.emb_dim = " << a.emb_dim << "\n";
    out << "ppo.gamma = " << a.worker_ppo.gamma << "\n";
    out << "ppo.gae_lambda = " << a.worker_ppo.gae_lambda << "\n";
    out << "ppo.epochs = " << a.worker_ppo.epochs << "\n";
    out << "ppo.clip_ratio = " << a.worker_ppo.clip_ratio << "\n";
    out << "ppo.lr_policy = " << a.worker_ppo.lr_policy << "\n";
    out << "ppo.lr_value = " << a.worker_ppo.lr_value << "\n";
    out << "ppo.worker.delta = " << a.worker_ppo.delta << "\n";
    out << "ppo.master.delta = " << a.master_ppo.delta << "\n";
    out << "curiosity.beta = " << a.worker_curiosity.beta << "\n";
    out << "curiosity.lambda = " << a.worker_curiosity.lambda << "\n";
    out << "curiosity.worker.eta = " << a.worker_curiosity.eta << "\n";
    out << "curiosity.master.eta = " << a.master_curiosity.eta << "\n";
    out << "curiosity.worker.enabled = " << (a.worker_curiosity.enabled ? 1 : 0) << "\n";
    out << "curiosity.master.enabled = " << (a.master_curiosity.enabled ? 1 : 0) << "\n";
    out << "models.lr = " << a.lr_models << "\n";
    out << "models.epochs = " << a.model_epochs << "\n";
    return out.str();
}

}  // namespace mph
