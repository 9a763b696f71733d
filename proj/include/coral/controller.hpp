#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "coral/geometry.hpp"
#include "coral/grid.hpp"
#include "coral/random.hpp"

namespace coral {

struct RobotState {
    double x = 0.0, y = 0.0;
    double theta = 0.0;
    double v = 0.0;
    double omega = 0.0;

    Vec2 position() const { return {x, y}; }
    Pose pose() const { return {{x, y}, theta}; }
};

struct Control {
    double accel = 0.0;  // m/s^2
    double alpha = 0.0;  // rad/s^2
};

struct DynamicsLimits {
    double v_max = 0.8;
    double omega_max = 1.0;
    double a_max = 0.5;
    double alpha_max = 1.0;
    double k_d = 0.5;  // linear drag, 1/s
    double k_r = 0.8;  // rotational drag, 1/s
};

// Decremental rollout schedule: integration intervals grow along the horizon
// while collision boundary points thin out, both under one exponent.
struct DdpSchedule {
    double horizon_s = 2.0;   // total rollout time T
    int steps = 10;           // step count
    double exponent = 2.0;    // decrement rate p
    int boundary_count = 16;  // full boundary-point set n

    // Interval of step t; the closed form telescopes so the intervals sum to
    // the horizon exactly.
    double interval(int t) const {
        if (t < 0 || t >= steps) throw std::out_of_range("schedule step out of range");
        double a = static_cast<double>(t) / steps;
        double b = static_cast<double>(t + 1) / steps;
        return horizon_s * (std::pow(b, exponent) - std::pow(a, exponent));
    }

    // Boundary points checked at step t, floored at one so every step inside
    // the horizon keeps at least one check (the raw formula reaches zero).
    int boundary_points(int t) const {
        if (t < 0 || t >= steps) throw std::out_of_range("schedule step out of range");
        double frac = std::pow(static_cast<double>(t) / steps, exponent);
        int n = static_cast<int>(std::ceil(boundary_count * (1.0 - frac)));
        return std::max(1, n);
    }
};

enum class Fidelity { full, kinematic };

// One integration step of the planar underactuated surrogate.
//
// full: second-order model with linear drag, semi-implicit Euler (velocities
// first, pose with the new velocities), saturated to the thruster limits.
// kinematic: pose advances with the current velocities, then the velocities
// jump to the saturated steady-state targets implied by the commanded
// accelerations — the far-horizon simplification.
inline RobotState step_dynamics(const RobotState& s, Control u, double dt, Fidelity fidelity,
                                const DynamicsLimits& lim = {}) {
    if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
    RobotState n = s;
    if (fidelity == Fidelity::full) {
        n.v = std::clamp(s.v + (u.accel - lim.k_d * s.v) * dt, -lim.v_max, lim.v_max);
        n.omega =
            std::clamp(s.omega + (u.alpha - lim.k_r * s.omega) * dt, -lim.omega_max, lim.omega_max);
        n.x = s.x + n.v * std::cos(s.theta) * dt;
        n.y = s.y + n.v * std::sin(s.theta) * dt;
        n.theta = wrap_angle(s.theta + n.omega * dt);
    } else {
        n.x = s.x + s.v * std::cos(s.theta) * dt;
        n.y = s.y + s.v * std::sin(s.theta) * dt;
        n.theta = wrap_angle(s.theta + s.omega * dt);
        n.v = std::clamp(u.accel / lim.k_d, -lim.v_max, lim.v_max);
        n.omega = std::clamp(u.alpha / lim.k_r, -lim.omega_max, lim.omega_max);
    }
    return n;
}

// Exact Euclidean distance to the nearest obstacle cell, in meters.
// Felzenszwalb-Huttenlocher squared-distance transform, two 1D passes.
struct DistanceField {
    int width = 0, height = 0;
    double cell_m = 0.1;
    std::vector<float> dist;

    static DistanceField build(const OccupancyGrid& grid) {
        DistanceField f;
        f.width = grid.width;
        f.height = grid.height;
        f.cell_m = 1.0 / grid.resolution;
        const double inf = 1e18;
        size_t n = static_cast<size_t>(f.width) * f.height;
        std::vector<double> d(n);
        for (int y = 0; y < grid.height; ++y)
            for (int x = 0; x < grid.width; ++x)
                d[static_cast<size_t>(y) * f.width + x] =
                    grid.at({x, y}) == CellClass::obstacle ? 0.0 : inf;

        std::vector<double> row(std::max(f.width, f.height));
        std::vector<double> out(std::max(f.width, f.height));
        std::vector<int> v(std::max(f.width, f.height));
        std::vector<double> z(std::max(f.width, f.height) + 1);

        auto transform_1d = [&](int len) {
            int k = 0;
            v[0] = 0;
            z[0] = -inf;
            z[1] = inf;
            for (int q = 1; q < len; ++q) {
                double s;
                while (true) {
                    s = ((row[q] + q * q) - (row[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
                    if (s <= z[k]) {
                        --k;
                    } else {
                        break;
                    }
                }
                ++k;
                v[k] = q;
                z[k] = s;
                z[k + 1] = inf;
            }
            k = 0;
            for (int q = 0; q < len; ++q) {
                while (z[k + 1] < q) ++k;
                double dq = q - v[k];
                out[q] = dq * dq + row[v[k]];
            }
        };

        for (int y = 0; y < f.height; ++y) {
            for (int x = 0; x < f.width; ++x) row[x] = d[static_cast<size_t>(y) * f.width + x];
            transform_1d(f.width);
            for (int x = 0; x < f.width; ++x) d[static_cast<size_t>(y) * f.width + x] = out[x];
        }
        for (int x = 0; x < f.width; ++x) {
            for (int y = 0; y < f.height; ++y) row[y] = d[static_cast<size_t>(y) * f.width + x];
            transform_1d(f.height);
            for (int y = 0; y < f.height; ++y) d[static_cast<size_t>(y) * f.width + x] = out[y];
        }
        f.dist.resize(n);
        for (size_t i = 0; i < n; ++i)
            f.dist[i] = static_cast<float>(std::sqrt(d[i]) * f.cell_m);
        return f;
    }

    double at(PixelCoord p) const {
        if (p.x < 0 || p.y < 0 || p.x >= width || p.y >= height) return 0.0;
        return dist[static_cast<size_t>(p.y) * width + p.x];
    }
};

struct CostWeights {
    double goal = 0.6;
    double obstacle = 0.5;
    double speed = 0.3;
    double path = 0.0;  // cost term carried but disabled by default
};

struct ControllerConfig {
    int rollouts = 400;
    double sigma_lin = 0.05;
    double sigma_ang = 0.05;
    double lambda = 0.5;
    DdpSchedule schedule;
    DynamicsLimits limits;
    CostWeights weights;
    double v_ref = 0.4;         // speed setpoint for the speed cost
    double d_sense = 4.0;       // obstacle cost range
    double robot_radius = 0.3;
    double safety_margin = 0.05;  // extra clearance required at the center
};

struct RolloutResult {
    std::vector<RobotState> trajectory;
    double cost = 0.0;
    bool feasible = true;
};

// Rolls one control sequence through the decremental schedule. Near steps
// use the full model; once the interval has grown past twice the initial one
// the kinematic model takes over. At every step the thinning boundary-point
// ring is tested against obstacle cells, plus a center clearance check
// against the distance field. Any hit makes the rollout infeasible (that is
// a result, not an error).
inline RolloutResult rollout(const RobotState& s0, const std::vector<Control>& seq,
                             const DdpSchedule& sched, const OccupancyGrid& grid,
                             const DistanceField& field, const Vec2& goal,
                             const ControllerConfig& cfg,
                             std::vector<Vec2>* checked_points = nullptr) {
    if (static_cast<int>(seq.size()) != sched.steps)
        throw std::invalid_argument("control sequence length must match the schedule");
    RolloutResult r;
    r.trajectory.reserve(sched.steps + 1);
    r.trajectory.push_back(s0);

    const double delta0 = sched.interval(0);
    double c_obs = 0.0, c_speed = 0.0, c_path = 0.0;
    RobotState s = s0;
    Vec2 seg_a = s0.position();
    Vec2 seg_dir = goal - seg_a;
    double seg_len = seg_dir.norm();

    for (int t = 0; t < sched.steps; ++t) {
        double dt = sched.interval(t);
        Fidelity fid = dt <= 2.0 * delta0 ? Fidelity::full : Fidelity::kinematic;
        s = step_dynamics(s, seq[t], dt, fid, cfg.limits);
        r.trajectory.push_back(s);

        Vec2 pos = s.position();
        int npts = sched.boundary_points(t);
        for (int j = 0; j < npts; ++j) {
            double a = 2.0 * kPi * j / npts;
            Vec2 bp = pos + unit_from_angle(a) * cfg.robot_radius;
            if (checked_points) checked_points->push_back(bp);
            PixelCoord c = grid.pixel_of(bp);
            if (!grid.in_grid(c) || grid.at(c) == CellClass::obstacle) {
                r.feasible = false;
                break;
            }
        }
        if (!r.feasible) break;
        double clearance = field.at(grid.pixel_of(pos));
        if (clearance < cfg.robot_radius + cfg.safety_margin) {
            r.feasible = false;
            break;
        }
        c_obs += std::max(0.0, 1.0 - clearance / cfg.d_sense);
        c_speed += (s.v - cfg.v_ref) * (s.v - cfg.v_ref);
        if (seg_len > 1e-9) {
            Vec2 rel = pos - seg_a;
            double along = std::clamp(rel.dot(seg_dir) / (seg_len * seg_len), 0.0, 1.0);
            c_path += distance(pos, seg_a + seg_dir * along);
        }
    }
    double c_goal = distance(r.trajectory.back().position(), goal);
    r.cost = cfg.weights.goal * c_goal + cfg.weights.obstacle * c_obs +
             cfg.weights.speed * c_speed + cfg.weights.path * c_path;
    return r;
}

// Sampling-based controller: perturbs a warm-started nominal sequence,
// discards infeasible rollouts, and softmax-averages the survivors by cost.
class MppiController {
public:
    MppiController(const ControllerConfig& cfg, uint64_t seed)
        : cfg_(cfg), rng_(seed), nominal_(cfg.schedule.steps) {}

    struct Output {
        Control control;
        bool failure = false;  // no feasible rollout this tick
        double j_min = std::numeric_limits<double>::quiet_NaN();
        int feasible_count = 0;
    };

    Output control(const RobotState& state, const Vec2& goal, const OccupancyGrid& grid,
                   const DistanceField& field) {
        const int K = cfg_.rollouts;
        const int T = cfg_.schedule.steps;
        const auto& lim = cfg_.limits;

        samples_.assign(K, nominal_);
        costs_.assign(K, 0.0);
        feasible_.assign(K, 0);

        Output out;
        double j_min = std::numeric_limits<double>::infinity();
        for (int k = 0; k < K; ++k) {
            auto& seq = samples_[k];
            for (int t = 0; t < T; ++t) {
                seq[t].accel = std::clamp(seq[t].accel + rng_.gaussian(0.0, cfg_.sigma_lin),
                                          -lim.a_max, lim.a_max);
                seq[t].alpha = std::clamp(seq[t].alpha + rng_.gaussian(0.0, cfg_.sigma_ang),
                                          -lim.alpha_max, lim.alpha_max);
            }
            RolloutResult r = rollout(state, seq, cfg_.schedule, grid, field, goal, cfg_);
            if (!r.feasible) continue;
            feasible_[k] = 1;
            costs_[k] = r.cost;
            j_min = std::min(j_min, r.cost);
            ++out.feasible_count;
        }
        if (out.feasible_count == 0) {
            out.failure = true;
            return out;
        }
        out.j_min = j_min;

        std::vector<Control> avg(T);
        double wsum = 0.0;
        for (int k = 0; k < K; ++k) {
            if (!feasible_[k]) continue;
            double w = std::exp(-(costs_[k] - j_min) / cfg_.lambda);
            wsum += w;
            for (int t = 0; t < T; ++t) {
                avg[t].accel += w * samples_[k][t].accel;
                avg[t].alpha += w * samples_[k][t].alpha;
            }
        }
        for (int t = 0; t < T; ++t) {
            avg[t].accel /= wsum;
            avg[t].alpha /= wsum;
        }
        out.control = avg[0];
        // Warm start: shift left, repeat the tail.
        for (int t = 0; t + 1 < T; ++t) nominal_[t] = avg[t + 1];
        nominal_[T - 1] = avg[T - 1];
        return out;
    }

    const std::vector<Control>& nominal() const { return nominal_; }
    void set_nominal(const std::vector<Control>& n) {
        if (static_cast<int>(n.size()) != cfg_.schedule.steps)
            throw std::invalid_argument("nominal length must match the schedule");
        nominal_ = n;
    }

private:
    ControllerConfig cfg_;
    Rng rng_;
    std::vector<Control> nominal_;
    // Scratch buffers, reused across ticks.
    std::vector<std::vector<Control>> samples_;
    std::vector<double> costs_;
    std::vector<uint8_t> feasible_;
};

}  // namespace coral
