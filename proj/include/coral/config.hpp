#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "coral/centroid.hpp"
#include "coral/controller.hpp"
#include "coral/planner.hpp"
#include "coral/verifier.hpp"
#include "coral/world.hpp"

namespace coral {

// Smart-trigger thresholds (distance, stuck window, failure count, cooldown,
// minimum goal separation).
struct TriggerConfig {
    double d_trig = 2.5;      // distance trigger radius, m
    double dp_stuck = 0.1;    // stuck window displacement, m
    double v_stuck = 0.1;     // stuck speed bound, m/s
    double t_stuck = 20.0;    // stuck window, s
    int n_fail_max = 2;       // consecutive planner failures
    double t_cooldown = 50.0; // minimum interval between queries, s
    double dd_min = 1.0;      // minimum new-goal separation, m
};

struct SensorConfig {
    int rays = 120;
    double fov = deg2rad(120.0);
    double d_max = 4.0;
};

struct MapConfig {
    double resolution = 10.0;  // cells per meter
    int a_min_cells = 100;     // component area filter
};

struct WorldSource {
    std::string kind = "generate";  // generate | load
    Topology topology = Topology::L;
    double size = 20.0;
    uint64_t seed = 1;
    std::string path;  // load
};

struct PlannerSpec {
    std::string kind = "rule";  // rule | scripted | stub | remote
    int latency_ticks = 0;      // injected latency for rule/scripted/stub
    std::vector<PlannerResponse> script;
    std::vector<std::string> replies;  // stub canned texts
    RemoteEndpointConfig remote;
};

struct MissionConfig {
    WorldSource world;
    PlannerSpec planner;
    ControllerConfig controller;
    VerifierConfig verifier;
    TriggerConfig trigger;
    TrackerConfig tracker;
    SensorConfig sensor;
    MapConfig map;
    double dt = 0.1;
    int tick_budget = 20000;
    uint64_t seed = 1;
    bool threaded = false;
    double planner_d_min = 1.0;        // mode-selection forward threshold, m
    int planner_exhaust_limit = 3;     // consecutive abandoned requests ending the mission
    double initial_waypoint_dist = 3.0;
    double coverage_threshold = 0.6;   // per-cluster covered fraction
    double coverage_target_pct = 60.0; // batch time-to-coverage anchor
};

// -------- JSON binding --------
// Absent fields keep their defaults, so config files only name overrides.

namespace cfgio {

template <typename T>
void get(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

inline void get_angle_deg(const nlohmann::json& j, const char* key, double& out_rad) {
    if (j.contains(key)) out_rad = deg2rad(j.at(key).get<double>());
}

}  // namespace cfgio

inline void from_json_into(const nlohmann::json& j, PlannerResponse& r) {
    std::string kind = j.value("kind", "none");
    if (kind == "centroid_index") {
        r.kind = PlannerResponse::Kind::centroid_index;
        r.index = j.at("index").get<int>();
    } else if (kind == "relative_move") {
        r.kind = PlannerResponse::Kind::relative_move;
        r.d_fwd = j.value("d_fwd", 0.0);
        r.d_lat = j.value("d_lat", 0.0);
    } else {
        r.kind = PlannerResponse::Kind::none;
    }
    r.reason = j.value("reason", "");
}

inline nlohmann::json to_json(const PlannerResponse& r) {
    nlohmann::json j;
    j["kind"] = response_kind_name(r.kind);
    if (r.kind == PlannerResponse::Kind::centroid_index) j["index"] = r.index;
    if (r.kind == PlannerResponse::Kind::relative_move) {
        j["d_fwd"] = r.d_fwd;
        j["d_lat"] = r.d_lat;
    }
    if (!r.reason.empty()) j["reason"] = r.reason;
    return j;
}

inline MissionConfig mission_config_from_json(const nlohmann::json& j) {
    using cfgio::get;
    using cfgio::get_angle_deg;
    MissionConfig c;
    if (j.contains("world")) {
        const auto& w = j.at("world");
        get(w, "kind", c.world.kind);
        if (w.contains("topology")) c.world.topology = topology_from_name(w.at("topology"));
        get(w, "size", c.world.size);
        get(w, "seed", c.world.seed);
        get(w, "path", c.world.path);
        if (!c.world.path.empty() && !w.contains("kind")) c.world.kind = "load";
    }
    if (j.contains("planner")) {
        const auto& p = j.at("planner");
        get(p, "kind", c.planner.kind);
        get(p, "latency_ticks", c.planner.latency_ticks);
        if (p.contains("script"))
            for (const auto& s : p.at("script")) {
                PlannerResponse r;
                from_json_into(s, r);
                c.planner.script.push_back(r);
            }
        if (p.contains("replies"))
            c.planner.replies = p.at("replies").get<std::vector<std::string>>();
        get(p, "endpoint", c.planner.remote.endpoint);
        get(p, "model", c.planner.remote.model);
        get(p, "timeout_s", c.planner.remote.timeout_s);
    }
    if (j.contains("controller")) {
        const auto& k = j.at("controller");
        get(k, "rollouts", c.controller.rollouts);
        get(k, "sigma_lin", c.controller.sigma_lin);
        get(k, "sigma_ang", c.controller.sigma_ang);
        get(k, "lambda", c.controller.lambda);
        get(k, "horizon_s", c.controller.schedule.horizon_s);
        get(k, "steps", c.controller.schedule.steps);
        get(k, "exponent", c.controller.schedule.exponent);
        get(k, "boundary_points", c.controller.schedule.boundary_count);
        get(k, "v_max", c.controller.limits.v_max);
        get(k, "omega_max", c.controller.limits.omega_max);
        get(k, "a_max", c.controller.limits.a_max);
        get(k, "alpha_max", c.controller.limits.alpha_max);
        get(k, "k_d", c.controller.limits.k_d);
        get(k, "k_r", c.controller.limits.k_r);
        get(k, "w_goal", c.controller.weights.goal);
        get(k, "w_obs", c.controller.weights.obstacle);
        get(k, "w_speed", c.controller.weights.speed);
        get(k, "w_path", c.controller.weights.path);
        get(k, "v_ref", c.controller.v_ref);
        get(k, "d_sense", c.controller.d_sense);
        get(k, "robot_radius", c.controller.robot_radius);
        get(k, "safety_margin", c.controller.safety_margin);
    }
    if (j.contains("verifier")) {
        const auto& v = j.at("verifier");
        get_angle_deg(v, "theta_back_deg", c.verifier.theta_back);
        get_angle_deg(v, "theta_behind_deg", c.verifier.theta_behind);
        get(v, "d_exempt", c.verifier.d_exempt);
        get_angle_deg(v, "theta_dev_deg", c.verifier.theta_dev);
        get(v, "d_fwd_ref", c.verifier.d_fwd_ref);
        get(v, "d_lat_ref", c.verifier.d_lat_ref);
        get(v, "min_map_cells", c.verifier.min_map_cells);
        get(v, "max_requeries", c.verifier.max_requeries);
    }
    if (j.contains("trigger")) {
        const auto& t = j.at("trigger");
        get(t, "d_trig", c.trigger.d_trig);
        get(t, "dp_stuck", c.trigger.dp_stuck);
        get(t, "v_stuck", c.trigger.v_stuck);
        get(t, "t_stuck", c.trigger.t_stuck);
        get(t, "n_fail_max", c.trigger.n_fail_max);
        get(t, "t_cooldown", c.trigger.t_cooldown);
        get(t, "dd_min", c.trigger.dd_min);
    }
    if (j.contains("tracker")) {
        const auto& t = j.at("tracker");
        get(t, "d_merge", c.tracker.d_merge);
        get(t, "alpha_old", c.tracker.alpha_old);
        get(t, "alpha_new", c.tracker.alpha_new);
        get(t, "max_misses", c.tracker.max_misses);
    }
    if (j.contains("sensor")) {
        const auto& s = j.at("sensor");
        get(s, "rays", c.sensor.rays);
        get_angle_deg(s, "fov_deg", c.sensor.fov);
        get(s, "d_max", c.sensor.d_max);
    }
    if (j.contains("map")) {
        const auto& m = j.at("map");
        get(m, "resolution", c.map.resolution);
        get(m, "a_min_cells", c.map.a_min_cells);
    }
    if (j.contains("mission")) {
        const auto& m = j.at("mission");
        get(m, "dt", c.dt);
        get(m, "tick_budget", c.tick_budget);
        get(m, "seed", c.seed);
        get(m, "threaded", c.threaded);
        get(m, "planner_d_min", c.planner_d_min);
        get(m, "planner_exhaust_limit", c.planner_exhaust_limit);
        get(m, "initial_waypoint_dist", c.initial_waypoint_dist);
        get(m, "coverage_threshold", c.coverage_threshold);
        get(m, "coverage_target_pct", c.coverage_target_pct);
    }
    return c;
}

inline nlohmann::json mission_config_to_json(const MissionConfig& c) {
    nlohmann::json j;
    j["world"] = {{"kind", c.world.kind},
                  {"topology", topology_name(c.world.topology)},
                  {"size", c.world.size},
                  {"seed", c.world.seed}};
    if (!c.world.path.empty()) j["world"]["path"] = c.world.path;
    nlohmann::json p = {{"kind", c.planner.kind}, {"latency_ticks", c.planner.latency_ticks}};
    if (!c.planner.script.empty()) {
        p["script"] = nlohmann::json::array();
        for (const auto& s : c.planner.script) p["script"].push_back(to_json(s));
    }
    if (!c.planner.replies.empty()) p["replies"] = c.planner.replies;
    if (!c.planner.remote.endpoint.empty()) {
        p["endpoint"] = c.planner.remote.endpoint;
        p["model"] = c.planner.remote.model;
        p["timeout_s"] = c.planner.remote.timeout_s;
    }
    j["planner"] = p;
    j["controller"] = {{"rollouts", c.controller.rollouts},
                       {"sigma_lin", c.controller.sigma_lin},
                       {"sigma_ang", c.controller.sigma_ang},
                       {"lambda", c.controller.lambda},
                       {"horizon_s", c.controller.schedule.horizon_s},
                       {"steps", c.controller.schedule.steps},
                       {"exponent", c.controller.schedule.exponent},
                       {"boundary_points", c.controller.schedule.boundary_count},
                       {"v_max", c.controller.limits.v_max},
                       {"omega_max", c.controller.limits.omega_max},
                       {"a_max", c.controller.limits.a_max},
                       {"alpha_max", c.controller.limits.alpha_max},
                       {"k_d", c.controller.limits.k_d},
                       {"k_r", c.controller.limits.k_r},
                       {"w_goal", c.controller.weights.goal},
                       {"w_obs", c.controller.weights.obstacle},
                       {"w_speed", c.controller.weights.speed},
                       {"w_path", c.controller.weights.path},
                       {"v_ref", c.controller.v_ref},
                       {"d_sense", c.controller.d_sense},
                       {"robot_radius", c.controller.robot_radius},
                       {"safety_margin", c.controller.safety_margin}};
    j["verifier"] = {{"theta_back_deg", rad2deg(c.verifier.theta_back)},
                     {"theta_behind_deg", rad2deg(c.verifier.theta_behind)},
                     {"d_exempt", c.verifier.d_exempt},
                     {"theta_dev_deg", rad2deg(c.verifier.theta_dev)},
                     {"d_fwd_ref", c.verifier.d_fwd_ref},
                     {"d_lat_ref", c.verifier.d_lat_ref},
                     {"min_map_cells", c.verifier.min_map_cells},
                     {"max_requeries", c.verifier.max_requeries}};
    j["trigger"] = {{"d_trig", c.trigger.d_trig},     {"dp_stuck", c.trigger.dp_stuck},
                    {"v_stuck", c.trigger.v_stuck},   {"t_stuck", c.trigger.t_stuck},
                    {"n_fail_max", c.trigger.n_fail_max}, {"t_cooldown", c.trigger.t_cooldown},
                    {"dd_min", c.trigger.dd_min}};
    j["tracker"] = {{"d_merge", c.tracker.d_merge},
                    {"alpha_old", c.tracker.alpha_old},
                    {"alpha_new", c.tracker.alpha_new},
                    {"max_misses", c.tracker.max_misses}};
    j["sensor"] = {{"rays", c.sensor.rays},
                   {"fov_deg", rad2deg(c.sensor.fov)},
                   {"d_max", c.sensor.d_max}};
    j["map"] = {{"resolution", c.map.resolution}, {"a_min_cells", c.map.a_min_cells}};
    j["mission"] = {{"dt", c.dt},
                    {"tick_budget", c.tick_budget},
                    {"seed", c.seed},
                    {"threaded", c.threaded},
                    {"planner_d_min", c.planner_d_min},
                    {"planner_exhaust_limit", c.planner_exhaust_limit},
                    {"initial_waypoint_dist", c.initial_waypoint_dist},
                    {"coverage_threshold", c.coverage_threshold},
                    {"coverage_target_pct", c.coverage_target_pct}};
    return j;
}

inline MissionConfig load_mission_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read config file: " + path);
    nlohmann::json j;
    f >> j;
    return mission_config_from_json(j);
}

}  // namespace coral
