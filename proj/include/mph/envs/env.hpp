#pragma once

#include <string>
#include <variant>

#include "mph/common.hpp"
#include "mph/distributions.hpp"
#include "mph/envs/keydoor.hpp"
#include "mph/envs/pointpush.hpp"

namespace mph {

// Uniform environment front for the trainer. Discrete actions arrive as a
// single-entry Action holding the index.
class Env {
public:
    explicit Env(KeyDoorEnv env) : impl_(std::move(env)) {}
    explicit Env(PointPushEnv env) : impl_(std::move(env)) {}

    static Env make(const std::string& name, int horizon = 0);

    EnvSpec spec() const {
        return std::visit([](const auto& e) { return e.spec(); }, impl_);
    }

    std::vector<double> reset(Rng& rng) {
        return std::visit([&rng](auto& e) { return e.reset(rng); }, impl_);
    }

    StepResult step(const Action& action) {
        if (auto* kd = std::get_if<KeyDoorEnv>(&impl_)) {
            if (action.size() != 1) throw DomainError("discrete env expects an index action");
            return kd->step(static_cast<int>(action[0]));
        }
        return std::get<PointPushEnv>(impl_).step(action);
    }

private:
    std::variant<KeyDoorEnv, PointPushEnv> impl_;
};

inline Env Env::make(const std::string& name, int horizon) {
    if (name == "keydoor") return Env(KeyDoorEnv(7, horizon > 0 ? horizon : 200));
    if (name == "pointpush") return Env(PointPushEnv(horizon > 0 ? horizon : 50));
    throw UsageError("unknown environment: " + name);
}

}  // namespace mph
