#pragma once

#include <optional>
#include <string>

#include "coral/centroid.hpp"
#include "coral/geometry.hpp"

namespace coral {

struct VerifierConfig {
    double theta_back = deg2rad(100.0);    // backward rejection threshold
    double theta_behind = deg2rad(60.0);   // behind-previous threshold
    double d_exempt = 6.0;                 // far waypoints skip the behind-prev check
    double theta_dev = deg2rad(75.0);      // maximum deviation from the chain trend
    double d_fwd_ref = 1.0;                // forward-reference projection minimum
    double d_lat_ref = 3.0;                // forward-reference lateral maximum
    int min_map_cells = 500;               // deviation check activates after this
    int max_requeries = 3;
};

// True iff the waypoint direction opens more than theta_back from the
// robot's forward axis. Equality accepts.
inline bool behind_robot(const Vec2& p, const Pose& robot, double theta_back) {
    Vec2 d = p - robot.position;
    if (d.norm() == 0.0) throw std::invalid_argument("waypoint coincides with robot");
    return angle_between(d, robot.forward()) > theta_back;
}

// True iff the new waypoint falls back toward the robot relative to the
// previous one: the angle between n = norm(p_new - p_prev) and
// b = norm(robot - p_prev) closes below theta_behind, the step is shorter
// than the distance exemption, and forward centroids still exist (a dead end
// grants a turnaround exemption).
inline bool behind_prev(const Vec2& p_new, const Vec2& p_prev, const Pose& robot,
                        double theta_behind, double d_exempt, bool has_forward_centroids) {
    Vec2 step = p_new - p_prev;
    if (step.norm() == 0.0) return true;  // zero progress
    if (!has_forward_centroids) return false;
    if (step.norm() >= d_exempt) return false;
    Vec2 back = robot.position - p_prev;
    if (back.norm() == 0.0) return false;
    return angle_between(step, back) < theta_behind;
}

inline bool has_forward_centroid(const CentroidChain& chain, const Pose& robot, double d_min) {
    for (const auto& e : chain.ordered)
        if (forward_projection(e.position, robot) >= d_min) return true;
    return false;
}

// Chain-trend reference: the farthest centroid with forward projection
// >= d_fwd_ref and |lateral| < d_lat_ref. Falls back to the mirrored
// criterion behind the robot, with the reference direction flipped to point
// from the backward reference toward the robot.
struct TrendReference {
    Vec2 direction;       // unit
    Vec2 anchor;          // the reference centroid itself
    bool backward = false;
};

inline std::optional<TrendReference> trend_reference(const CentroidChain& chain,
                                                     const Pose& robot,
                                                     const VerifierConfig& cfg) {
    const ChainEntry* best = nullptr;
    double best_proj = 0.0;
    for (const auto& e : chain.ordered) {
        double f = forward_projection(e.position, robot);
        double l = lateral_offset(e.position, robot);
        if (f >= cfg.d_fwd_ref && std::abs(l) < cfg.d_lat_ref && (!best || f > best_proj)) {
            best = &e;
            best_proj = f;
        }
    }
    if (best) return TrendReference{(best->position - robot.position).normalized(),
                                    best->position, false};
    const ChainEntry* back = nullptr;
    double back_proj = 0.0;
    for (const auto& e : chain.ordered) {
        double f = forward_projection(e.position, robot);
        double l = lateral_offset(e.position, robot);
        if (f <= -cfg.d_fwd_ref && std::abs(l) < cfg.d_lat_ref && (!back || f < back_proj)) {
            back = &e;
            back_proj = f;
        }
    }
    if (back) return TrendReference{(robot.position - back->position).normalized(),
                                    back->position, true};
    return std::nullopt;
}

// True iff the waypoint direction deviates from the chain trend by more than
// theta_dev. Skipped (false) until the map has accumulated min_map_cells
// explored cells, when no trend reference exists, or when the waypoint
// coincides with the reference centroid.
inline bool is_deviated(const Vec2& p_new, const Pose& robot, const CentroidChain& chain,
                        const VerifierConfig& cfg, int map_cells_seen) {
    if (map_cells_seen < cfg.min_map_cells) return false;
    auto ref = trend_reference(chain, robot, cfg);
    if (!ref) return false;
    if (distance(p_new, ref->anchor) < 1e-9) return false;
    Vec2 wp = p_new - robot.position;
    if (wp.norm() == 0.0) return false;
    return angle_between(ref->direction, wp) > cfg.theta_dev;
}

enum class FailureMode { none, behind_robot, behind_prev, deviated, invalid_index };

inline const char* failure_mode_name(FailureMode m) {
    switch (m) {
        case FailureMode::none: return "none";
        case FailureMode::behind_robot: return "behind_robot";
        case FailureMode::behind_prev: return "behind_prev";
        case FailureMode::deviated: return "deviated";
        case FailureMode::invalid_index: return "invalid_index";
    }
    return "?";
}

struct Verdict {
    bool accepted = true;
    FailureMode failure_mode = FailureMode::none;
    std::string feedback;
    // Diagnostics for the log, degrees; negative when not evaluated.
    double angle_back_request_deg = -1.0;
    double angle_back_delivery_deg = -1.0;
    double angle_prev_deg = -1.0;
    double angle_dev_deg = -1.0;
};

struct VerifyContext {
    Pose request_pose;
    Pose delivery_pose;
    std::optional<Vec2> prev_goal;
    const CentroidChain* chain = nullptr;
    int map_cells_seen = 0;
    // Set by waypoint resolution when the planner picked a label that does
    // not exist on the map.
    bool invalid_index = false;
    int requested_index = -1;
    int chain_size = 0;
};

// Combined check: backward rejection at both the request-time and
// delivery-time poses, behind-previous, then chain-trend deviation. The
// feedback sentence names the failure so a re-query can correct it.
inline Verdict verify(const std::optional<Vec2>& waypoint, const VerifyContext& ctx,
                      const VerifierConfig& cfg) {
    Verdict v;
    if (ctx.invalid_index || !waypoint) {
        v.accepted = false;
        v.failure_mode = FailureMode::invalid_index;
        v.feedback = "selected centroid index " + std::to_string(ctx.requested_index) +
                     " does not exist on the map; valid indices are 0.." +
                     std::to_string(ctx.chain_size > 0 ? ctx.chain_size - 1 : 0);
        return v;
    }
    const Vec2 p = *waypoint;
    static const CentroidChain empty_chain;
    const CentroidChain& chain = ctx.chain ? *ctx.chain : empty_chain;

    auto reject = [&](FailureMode mode, std::string feedback) {
        v.accepted = false;
        v.failure_mode = mode;
        v.feedback = std::move(feedback);
    };

    for (int pass = 0; pass < 2; ++pass) {
        const Pose& pose = pass == 0 ? ctx.request_pose : ctx.delivery_pose;
        if (distance(p, pose.position) == 0.0) {
            reject(FailureMode::behind_robot, "selected centroid is behind the robot");
            return v;
        }
        double a = angle_between(p - pose.position, pose.forward());
        (pass == 0 ? v.angle_back_request_deg : v.angle_back_delivery_deg) = rad2deg(a);
        if (a > cfg.theta_back) {
            reject(FailureMode::behind_robot, "selected centroid is behind the robot");
            return v;
        }
    }
    bool fwd = has_forward_centroid(chain, ctx.delivery_pose, cfg.d_fwd_ref);
    if (ctx.prev_goal) {
        Vec2 step = p - *ctx.prev_goal;
        Vec2 back = ctx.delivery_pose.position - *ctx.prev_goal;
        if (step.norm() > 0.0 && back.norm() > 0.0)
            v.angle_prev_deg = rad2deg(angle_between(step, back));
        if (behind_prev(p, *ctx.prev_goal, ctx.delivery_pose, cfg.theta_behind, cfg.d_exempt,
                        fwd)) {
            reject(FailureMode::behind_prev,
                   "selected centroid is behind the previous waypoint");
            return v;
        }
    }
    if (ctx.map_cells_seen >= cfg.min_map_cells) {
        auto ref = trend_reference(chain, ctx.delivery_pose, cfg);
        if (ref && distance(p, ref->anchor) >= 1e-9 &&
            distance(p, ctx.delivery_pose.position) > 0.0) {
            Vec2 wp = p - ctx.delivery_pose.position;
            double a = angle_between(ref->direction, wp);
            v.angle_dev_deg = rad2deg(a);
            if (a > cfg.theta_dev) {
                const char* side = ref->direction.cross(wp) > 0.0 ? "left" : "right";
                reject(FailureMode::deviated,
                       std::string("selected centroid deviates to the ") + side +
                           " of the chain trend");
                return v;
            }
        }
    }
    return v;
}

}  // namespace coral
