#pragma once

#include <array>
#include <vector>

#include "mph/envs/keydoor.hpp"
#include "mph/rng.hpp"

namespace mph {

// Planar pusher with a single sparse goal reward. The agent point moves by
// 0.05 * action; while within the contact radius of the box, the box
// translates with the agent. Reward 1.0 (terminal) once the box is inside
// the goal radius. Initial layouts with the goal nearly satisfied are
// rejected and resampled.
class PointPushEnv {
public:
    static constexpr double kStepScale = 0.05;
    static constexpr double kContactRadius = 0.1;
    static constexpr double kGoalRadius = 0.15;
    static constexpr double kSpawnHalfWidth = 0.35;

    explicit PointPushEnv(int horizon = 50);

    EnvSpec spec() const;
    std::vector<double> reset(Rng& rng);
    StepResult step(const std::vector<double>& action);

    std::array<double, 2> agent() const { return agent_; }
    std::array<double, 2> box() const { return box_; }
    std::array<double, 2> target() const { return target_; }

private:
    std::vector<double> observation() const;

    int horizon_;
    std::array<double, 2> agent_{}, box_{}, target_{};
    bool done_ = true;
    int steps_ = 0;
};

}  // namespace mph
