#pragma once

// Scripted reference controllers, used as independent oracles for the
// environment and evaluation tests. They see privileged layout state via the
// env accessors, not the learned-observation path.

#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "mph/envs/keydoor.hpp"
#include "mph/envs/pointpush.hpp"

namespace mph::testutil {

// Breadth-first distances on the grid, avoiding `blocked` (pass {-1,-1} for
// none). Unreachable cells get a large sentinel.
inline std::vector<int> bfs_distances(int n, KeyDoorEnv::Cell from,
                                      KeyDoorEnv::Cell blocked) {
    const int kInf = std::numeric_limits<int>::max() / 2;
    std::vector<int> dist(static_cast<size_t>(n) * n, kInf);
    auto idx = [n](int x, int y) { return y * n + x; };
    std::queue<KeyDoorEnv::Cell> frontier;
    dist[idx(from.x, from.y)] = 0;
    frontier.push(from);
    while (!frontier.empty()) {
        const KeyDoorEnv::Cell c = frontier.front();
        frontier.pop();
        const int d = dist[idx(c.x, c.y)];
        const int dx[4] = {0, 0, -1, 1};
        const int dy[4] = {-1, 1, 0, 0};
        for (int k = 0; k < 4; ++k) {
            const int nx = c.x + dx[k];
            const int ny = c.y + dy[k];
            if (nx < 0 || nx >= n || ny < 0 || ny >= n) continue;
            if (nx == blocked.x && ny == blocked.y) continue;
            if (dist[idx(nx, ny)] > d + 1) {
                dist[idx(nx, ny)] = d + 1;
                frontier.push({nx, ny});
            }
        }
    }
    return dist;
}

// Action sequence for a shortest path from -> to (empty if from == to).
inline std::vector<int> bfs_path_actions(int n, KeyDoorEnv::Cell from,
                                         KeyDoorEnv::Cell to, KeyDoorEnv::Cell blocked) {
    std::vector<int> dist = bfs_distances(n, to, blocked);  // distances to target
    auto idx = [n](int x, int y) { return y * n + x; };
    std::vector<int> actions;
    KeyDoorEnv::Cell cur = from;
    while (!(cur == to)) {
        const int dx[4] = {0, 0, -1, 1};
        const int dy[4] = {-1, 1, 0, 0};
        const int acts[4] = {KeyDoorEnv::kActionUp, KeyDoorEnv::kActionDown,
                             KeyDoorEnv::kActionLeft, KeyDoorEnv::kActionRight};
        int best = -1, best_dist = dist[idx(cur.x, cur.y)];
        for (int k = 0; k < 4; ++k) {
            const int nx = cur.x + dx[k];
            const int ny = cur.y + dy[k];
            if (nx < 0 || nx >= n || ny < 0 || ny >= n) continue;
            if (nx == blocked.x && ny == blocked.y) continue;
            if (dist[idx(nx, ny)] < best_dist) {
                best_dist = dist[idx(nx, ny)];
                best = k;
            }
        }
        if (best < 0) return actions;  // unreachable; caller checks lengths
        actions.push_back(acts[best]);
        cur = {cur.x + dx[best], cur.y + dy[best]};
    }
    return actions;
}

// Optimal KeyDoor plan: key, then interact next to the door, then treasure.
// Returns the full action sequence; its length is the BFS-optimal episode
// length for the layout.
inline std::vector<int> keydoor_optimal_actions(const KeyDoorEnv& env) {
    const int n = env.grid_size();
    const KeyDoorEnv::Cell door = env.door();
    const KeyDoorEnv::Cell none{-1, -1};

    std::vector<int> plan = bfs_path_actions(n, env.agent(), env.key(), door);

    // best door-adjacent staging cell, minimizing approach + treasure legs
    const std::vector<int> from_key = bfs_distances(n, env.key(), door);
    const std::vector<int> to_treasure = bfs_distances(n, env.treasure(), none);
    auto idx = [n](int x, int y) { return y * n + x; };
    KeyDoorEnv::Cell stage{-1, -1};
    long best_cost = std::numeric_limits<long>::max();
    const int dx[4] = {0, 0, -1, 1};
    const int dy[4] = {-1, 1, 0, 0};
    for (int k = 0; k < 4; ++k) {
        const int cx = door.x + dx[k];
        const int cy = door.y + dy[k];
        if (cx < 0 || cx >= n || cy < 0 || cy >= n) continue;
        const long cost = static_cast<long>(from_key[idx(cx, cy)]) + to_treasure[idx(cx, cy)];
        if (cost < best_cost) {
            best_cost = cost;
            stage = {cx, cy};
        }
    }

    std::vector<int> leg = bfs_path_actions(n, env.key(), stage, door);
    plan.insert(plan.end(), leg.begin(), leg.end());
    plan.push_back(KeyDoorEnv::kActionInteract);
    leg = bfs_path_actions(n, stage, env.treasure(), none);
    plan.insert(plan.end(), leg.begin(), leg.end());
    return plan;
}

// Closed-loop pusher: stage behind the box relative to the target (orbiting
// around the box instead of plowing through it), then push straight.
inline std::vector<double> pointpush_scripted_action(const PointPushEnv& env) {
    const auto agent = env.agent();
    const auto box = env.box();
    const auto target = env.target();
    const double gx = target[0] - box[0];
    const double gy = target[1] - box[1];
    const double gnorm = std::sqrt(gx * gx + gy * gy);
    const double dx = gx / gnorm;  // push direction
    const double dy = gy / gnorm;

    // L-inf normalization: full diagonal speed, components stay in [-1, 1]
    auto steer = [](double vx, double vy) -> std::vector<double> {
        const double m = std::max(std::abs(vx), std::abs(vy));
        if (m < 1e-12) return {0.0, 0.0};
        return {vx / m, vy / m};
    };

    const double bx = box[0] - agent[0];
    const double by = box[1] - agent[1];
    const double bdist = std::sqrt(bx * bx + by * by);
    const bool aligned = bdist > 1e-9 && (bx * dx + by * dy) / bdist > 0.9;
    if (aligned && bdist < 0.13) {
        return {dx, dy};
    }

    const double stage_x = box[0] - 0.12 * dx;
    const double stage_y = box[1] - 0.12 * dy;
    double to_stage_x = stage_x - agent[0];
    double to_stage_y = stage_y - agent[1];
    const double stage_dist = std::hypot(to_stage_x, to_stage_y);
    if (stage_dist < 1e-9) return {dx, dy};

    // near the box but not behind it: orbit tangentially toward the stage side
    if (bdist < 0.16) {
        const double rx = -bx / bdist;  // radial, box -> agent
        const double ry = -by / bdist;
        const double cross = rx * (-dy) - ry * (-dx);  // sign picks the short way round
        const double sgn = cross >= 0.0 ? 1.0 : -1.0;
        const double tx = sgn * -ry;
        const double ty = sgn * rx;
        return steer(0.8 * tx + 0.45 * rx, 0.8 * ty + 0.45 * ry);
    }

    if (stage_dist < PointPushEnv::kStepScale) {
        const double s = stage_dist / PointPushEnv::kStepScale;
        return {s * to_stage_x / stage_dist, s * to_stage_y / stage_dist};
    }
    return steer(to_stage_x, to_stage_y);
}

}  // namespace mph::testutil
