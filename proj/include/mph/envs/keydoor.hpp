#pragma once

#include <vector>

#include "mph/rng.hpp"

namespace mph {

struct EnvSpec {
    int observation_dim = 0;
    bool discrete = false;
    int action_count = 0;  // discrete
    int action_dim = 0;    // continuous
    int horizon = 0;
};

struct StepResult {
    std::vector<double> observation;
    double reward = 0.0;
    bool done = false;
    bool success = false;
};

// KeyDoorTreasure gridworld. Sparse subtask-gated rewards: +0.1 for the
// first key pickup, +0.1 for opening the door (needs the key), +1.0 for
// entering the treasure cell once the door is open (terminal). The door
// cell is impassable while closed. Layout is resampled every reset.
class KeyDoorEnv {
public:
    static constexpr int kActionUp = 0;
    static constexpr int kActionDown = 1;
    static constexpr int kActionLeft = 2;
    static constexpr int kActionRight = 3;
    static constexpr int kActionInteract = 4;

    explicit KeyDoorEnv(int grid_size = 7, int horizon = 200);

    EnvSpec spec() const;
    std::vector<double> reset(Rng& rng);
    StepResult step(int action);

    // layout accessors (tests and scripted policies)
    struct Cell {
        int x = 0;
        int y = 0;
        bool operator==(const Cell&) const = default;
    };
    Cell agent() const { return agent_; }
    Cell key() const { return key_; }
    Cell door() const { return door_; }
    Cell treasure() const { return treasure_; }
    bool has_key() const { return has_key_; }
    bool door_open() const { return door_open_; }
    int grid_size() const { return grid_size_; }
    int steps_taken() const { return steps_; }

private:
    std::vector<double> observation() const;

    int grid_size_;
    int horizon_;
    Cell agent_, key_, door_, treasure_;
    bool has_key_ = false;
    bool door_open_ = false;
    bool key_taken_ = false;
    bool done_ = true;
    int steps_ = 0;
};

}  // namespace mph
