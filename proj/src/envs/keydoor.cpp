#include "mph/envs/keydoor.hpp"

#include "mph/common.hpp"

namespace mph {

KeyDoorEnv::KeyDoorEnv(int grid_size, int horizon)
    : grid_size_(grid_size), horizon_(horizon) {
    if (grid_size < 3) throw DomainError("keydoor: grid must be at least 3x3");
    if (horizon < 1) throw DomainError("keydoor: horizon must be >= 1");
}

EnvSpec KeyDoorEnv::spec() const {
    EnvSpec s;
    s.observation_dim = 10;
    s.discrete = true;
    s.action_count = 5;
    s.horizon = horizon_;
    return s;
}

std::vector<double> KeyDoorEnv::reset(Rng& rng) {
    const int cells = grid_size_ * grid_size_;
    int picks[4];
    for (int i = 0; i < 4; ++i) {
        bool fresh = false;
        while (!fresh) {
            picks[i] = rng.uniform_int(cells);
            fresh = true;
            for (int j = 0; j < i; ++j) fresh = fresh && picks[j] != picks[i];
        }
    }
    auto to_cell = [this](int idx) { return Cell{idx % grid_size_, idx / grid_size_}; };
    agent_ = to_cell(picks[0]);
    key_ = to_cell(picks[1]);
    door_ = to_cell(picks[2]);
    treasure_ = to_cell(picks[3]);
    has_key_ = false;
    door_open_ = false;
    key_taken_ = false;
    done_ = false;
    steps_ = 0;
    return observation();
}

StepResult KeyDoorEnv::step(int action) {
    if (done_) throw UsageError("keydoor: step called on a finished episode");
    if (action < 0 || action > 4) throw DomainError("keydoor: invalid action");

    StepResult result;
    ++steps_;

    if (action == kActionInteract) {
        const int dist = std::abs(agent_.x - door_.x) + std::abs(agent_.y - door_.y);
        if (dist == 1 && has_key_ && !door_open_) {
            door_open_ = true;
            result.reward += 0.1;
        }
    } else {
        Cell next = agent_;
        if (action == kActionUp) next.y -= 1;
        if (action == kActionDown) next.y += 1;
        if (action == kActionLeft) next.x -= 1;
        if (action == kActionRight) next.x += 1;
        const bool inside = next.x >= 0 && next.x < grid_size_ && next.y >= 0 &&
                            next.y < grid_size_;
        const bool blocked = !door_open_ && next == door_;
        if (inside && !blocked) {
            agent_ = next;
            if (!key_taken_ && agent_ == key_) {
                key_taken_ = true;
                has_key_ = true;
                result.reward += 0.1;
            }
        }
    }

    // state rule: standing on the treasure with the door open ends the episode,
    // whether the agent walked in or opened the door while already there
    if (door_open_ && agent_ == treasure_) {
        result.reward += 1.0;
        result.success = true;
        done_ = true;
    }

    if (steps_ >= horizon_) done_ = true;
    result.done = done_;
    result.observation = observation();
    return result;
}

std::vector<double> KeyDoorEnv::observation() const {
    const double denom = grid_size_ - 1;
    return {agent_.x / denom,    agent_.y / denom,    key_.x / denom,
            key_.y / denom,      door_.x / denom,     door_.y / denom,
            treasure_.x / denom, treasure_.y / denom, has_key_ ? 1.0 : 0.0,
            door_open_ ? 1.0 : 0.0};
}

}  // namespace mph
