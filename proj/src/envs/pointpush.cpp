#include "mph/envs/pointpush.hpp"

#include <algorithm>
#include <cmath>

#include "mph/common.hpp"

namespace mph {

namespace {

double dist2d(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

PointPushEnv::PointPushEnv(int horizon) : horizon_(horizon) {
    if (horizon < 1) throw DomainError("pointpush: horizon must be >= 1");
}

EnvSpec PointPushEnv::spec() const {
    EnvSpec s;
    s.observation_dim = 10;
    s.discrete = false;
    s.action_dim = 2;
    s.horizon = horizon_;
    return s;
}

std::vector<double> PointPushEnv::reset(Rng& rng) {
    auto draw = [&rng] {
        return std::array<double, 2>{rng.uniform(-kSpawnHalfWidth, kSpawnHalfWidth),
                                     rng.uniform(-kSpawnHalfWidth, kSpawnHalfWidth)};
    };
    agent_ = draw();
    // reject layouts where the goal is already (nearly) satisfied
    do {
        box_ = draw();
        target_ = draw();
    } while (dist2d(box_, target_) < 2.0 * kGoalRadius);
    done_ = false;
    steps_ = 0;
    return observation();
}

StepResult PointPushEnv::step(const std::vector<double>& action) {
    if (done_) throw UsageError("pointpush: step called on a finished episode");
    if (action.size() != 2) throw DomainError("pointpush: action must be 2-D");
    if (!std::isfinite(action[0]) || !std::isfinite(action[1])) {
        throw DomainError("pointpush: non-finite action");
    }

    const bool contact = dist2d(agent_, box_) <= kContactRadius;
    std::array<double, 2> moved = agent_;
    for (int i = 0; i < 2; ++i) {
        const double a = std::clamp(action[i], -1.0, 1.0);
        moved[i] = std::clamp(agent_[i] + kStepScale * a, -1.0, 1.0);
    }
    if (contact) {
        // the box travels with the agent's realized displacement
        box_[0] += moved[0] - agent_[0];
        box_[1] += moved[1] - agent_[1];
    }
    agent_ = moved;
    ++steps_;

    StepResult result;
    if (dist2d(box_, target_) <= kGoalRadius) {
        result.reward = 1.0;
        result.success = true;
        done_ = true;
    }
    if (steps_ >= horizon_) done_ = true;
    result.done = done_;
    result.observation = observation();
    return result;
}

std::vector<double> PointPushEnv::observation() const {
    return {agent_[0],
            agent_[1],
            box_[0],
            box_[1],
            target_[0],
            target_[1],
            box_[0] - agent_[0],
            box_[1] - agent_[1],
            box_[0] - target_[0],
            box_[1] - target_[1]};
}

}  // namespace mph
