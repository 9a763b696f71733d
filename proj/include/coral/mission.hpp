#pragma once

#include <deque>
#include <filesystem>
#include <future>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coral/config.hpp"
#include "coral/log.hpp"
#include "coral/map_image.hpp"
#include "coral/planner.hpp"
#include "coral/vlm_client.hpp"

namespace coral {

// -------- Smart trigger --------

enum class TriggerCause { none, dist, stuck, fail };

inline const char* trigger_cause_name(TriggerCause c) {
    switch (c) {
        case TriggerCause::none: return "none";
        case TriggerCause::dist: return "dist";
        case TriggerCause::stuck: return "stuck";
        case TriggerCause::fail: return "fail";
    }
    return "?";
}

struct HistorySample {
    Vec2 position;
    double speed = 0.0;
};

struct TriggerDecision {
    bool fire = false;
    TriggerCause cause = TriggerCause::none;
};

// Condition-based planner invocation: near-goal distance, a stalled sliding
// window, or repeated planner failure. Distance and failure are suppressed
// during the cooldown; the stuck trigger bypasses it so a trapped robot can
// recover promptly.
inline TriggerDecision evaluate_trigger(const std::deque<HistorySample>& history,
                                        const Vec2& robot, const std::optional<Vec2>& goal,
                                        int fail_count, double time_since_query_s,
                                        const TriggerConfig& cfg, double dt) {
    bool in_cooldown = time_since_query_s < cfg.t_cooldown;
    if (goal && distance(robot, *goal) < cfg.d_trig && !in_cooldown)
        return {true, TriggerCause::dist};

    size_t window = static_cast<size_t>(std::lround(cfg.t_stuck / dt)) + 1;
    if (history.size() >= window) {
        size_t first = history.size() - window;
        bool slow = true;
        for (size_t i = first; i < history.size() && slow; ++i)
            slow = history[i].speed < cfg.v_stuck;
        if (slow && distance(history[first].position, history.back().position) < cfg.dp_stuck)
            return {true, TriggerCause::stuck};
    }
    if (fail_count >= cfg.n_fail_max && !in_cooldown) return {true, TriggerCause::fail};
    return {false, TriggerCause::none};
}

// Minimum spatial progress rule for accepting a new goal.
inline bool accept_new_goal(const Vec2& p_new, const std::optional<Vec2>& current,
                            double dd_min) {
    if (!current) return true;
    return distance(p_new, *current) >= dd_min;
}

// -------- Coverage --------

// A cluster counts as covered once the configured fraction of its cells has
// been inside the range-limited FOV sector at some pose.
class CoverageTracker {
public:
    CoverageTracker(const WorldModel& world, double fov, double d_max, double threshold)
        : world_(&world), fov_(fov), d_max_(d_max), threshold_(threshold) {
        seen_.resize(world.clusters.size());
        seen_count_.assign(world.clusters.size(), 0);
        covered_.assign(world.clusters.size(), 0);
        reach_.resize(world.clusters.size());
        for (size_t i = 0; i < world.clusters.size(); ++i) {
            const auto& cl = world.clusters[i];
            seen_[i].assign(cl.cells.size(), 0);
            double r = 0.0;
            for (auto& c : cl.cells) r = std::max(r, distance(world.cell_center(c), cl.centroid_gt));
            reach_[i] = r + d_max;
        }
    }

    void observe(const Pose& pose) {
        for (size_t i = 0; i < world_->clusters.size(); ++i) {
            const auto& cl = world_->clusters[i];
            if (distance(pose.position, cl.centroid_gt) > reach_[i]) continue;
            for (size_t k = 0; k < cl.cells.size(); ++k) {
                if (seen_[i][k]) continue;
                Vec2 p = world_->cell_center(cl.cells[k]);
                Vec2 d = p - pose.position;
                if (d.norm() > d_max_) continue;
                if (std::abs(wrap_angle(std::atan2(d.y, d.x) - pose.heading)) > fov_ / 2.0)
                    continue;
                seen_[i][k] = 1;
                ++seen_count_[i];
                if (!covered_[i] &&
                    seen_count_[i] + 1e-9 >= threshold_ * static_cast<double>(cl.cells.size())) {
                    covered_[i] = 1;
                    ++covered_count_;
                }
            }
        }
    }

    int covered_count() const { return covered_count_; }
    int total() const { return static_cast<int>(world_->clusters.size()); }
    double coverage_pct() const {
        return total() == 0 ? 0.0 : 100.0 * covered_count_ / total();
    }

private:
    const WorldModel* world_;
    double fov_, d_max_, threshold_;
    std::vector<std::vector<uint8_t>> seen_;
    std::vector<int> seen_count_;
    std::vector<uint8_t> covered_;
    std::vector<double> reach_;
    int covered_count_ = 0;
};

// Coverage recomputed from a log's pose history alone (the same predicate
// the mission applies incrementally).
inline double coverage_rate(const MissionLog& log, const WorldModel& world, double fov,
                            double d_max, double threshold) {
    CoverageTracker cov(world, fov, d_max, threshold);
    for (const auto& t : log.ticks) cov.observe({{t.x, t.y}, t.theta});
    return cov.coverage_pct();
}

// -------- Mission time metrics --------

enum class TimeModel { dream, coral };

// dream: synchronous protocol, one movement second plus one model wait per
// step. coral: asynchronous, steps at the control period plus rejection
// stall time.
inline double mission_time(const MissionLog& log, TimeModel model, double t_vlm_mean_s,
                           double dt) {
    double n = static_cast<double>(log.ticks.size());
    if (model == TimeModel::dream) return n * (1.0 + t_vlm_mean_s);
    return n * dt + t_idle_seconds(log, dt);
}

inline std::optional<double> efficiency(double steps, double coverage_pct) {
    if (coverage_pct <= 0.0) return std::nullopt;
    return steps / coverage_pct;
}

inline std::optional<double> efficiency(const MissionLog& log) {
    if (!log.has_summary) return std::nullopt;
    return efficiency(static_cast<double>(log.summary.steps), log.summary.coverage_pct);
}

// Sim-time until coverage first reaches target_pct, idle time included.
inline std::optional<double> time_to_coverage(const MissionLog& log, double target_pct,
                                              double dt) {
    for (const auto& t : log.ticks)
        if (t.coverage_pct >= target_pct) {
            double idle = 0.0;
            for (const auto& r : log.responses) {
                if (r.tick > t.tick) continue;
                for (const auto& q : log.queries)
                    if (q.qid == r.qid) {
                        if (q.cause == "requery") idle += r.latency_ticks * dt;
                        break;
                    }
            }
            return (t.tick + 1) * dt + idle;
        }
    return std::nullopt;
}

// -------- Planner construction --------

inline std::unique_ptr<HighLevelPlanner> make_planner(const PlannerSpec& spec) {
    if (spec.kind == "rule") return std::make_unique<RuleBasedPlanner>(spec.latency_ticks);
    if (spec.kind == "scripted")
        return std::make_unique<ScriptedPlanner>(spec.script, spec.latency_ticks);
    if (spec.kind == "stub") {
        std::vector<std::string> replies = spec.replies;
        if (replies.empty())
            replies.push_back(R"({"selected_centroid_index": null, "reason": "stub default"})");
        int latency = spec.latency_ticks > 0 ? spec.latency_ticks : 100;
        return std::make_unique<VlmPlanner>(std::make_unique<StubVlmClient>(replies), latency);
    }
    if (spec.kind == "remote") {
        RemoteEndpointConfig rc = spec.remote;
        RemoteEndpointConfig env = RemoteEndpointConfig::from_env();
        if (rc.endpoint.empty()) rc.endpoint = env.endpoint;
        if (rc.model.empty()) rc.model = env.model;
        if (rc.api_key.empty()) rc.api_key = env.api_key;
        return std::make_unique<VlmPlanner>(std::make_unique<RemoteVlmClient>(rc),
                                            spec.latency_ticks);
    }
    throw std::invalid_argument("unknown planner kind: " + spec.kind);
}

// -------- Mission loop --------

struct MissionOutputs {
    MissionLog log;
    WorldModel world;
    OccupancyGrid grid;
    CentroidChain final_chain;
    std::vector<Vec2> trajectory;
};

namespace detail {

struct InFlight {
    int qid = 0;
    int submit_tick = 0;
    int deliver_tick = 0;
    Pose request_pose;
    PlannerMode mode = PlannerMode::centroid_select;
    int requery_count = 0;
    bool threaded = false;
    std::future<PlannerOutcome> future;
    PlannerOutcome ready;
};

}  // namespace detail

inline MissionOutputs run_mission(const MissionConfig& cfg, WorldModel world) {
    MissionOutputs out;
    out.world = std::move(world);
    const WorldModel& w = out.world;
    MissionLog& log = out.log;
    log.config = mission_config_to_json(cfg);

    OccupancyGrid& grid = out.grid;
    grid = OccupancyGrid::covering(w.bounds, cfg.map.resolution);
    CentroidTracker tracker(cfg.tracker);
    CoverageTracker coverage(w, cfg.sensor.fov, cfg.sensor.d_max, cfg.coverage_threshold);
    MppiController controller(cfg.controller, derive_seed(cfg.seed, 1));
    std::unique_ptr<HighLevelPlanner> planner = make_planner(cfg.planner);

    DistanceField field = DistanceField::build(grid);
    uint64_t field_revision = grid.obstacle_revision;

    RobotState state;
    state.x = w.start.position.x;
    state.y = w.start.position.y;
    state.theta = w.start.heading;

    std::optional<Vec2> goal = w.start.position + w.start.forward() * cfg.initial_waypoint_dist;
    int goal_track_id = -1;
    log.goals.push_back({0, -1, goal->x, goal->y, -1, true});

    std::deque<HistorySample> history;
    const size_t history_cap = static_cast<size_t>(std::lround(cfg.trigger.t_stuck / cfg.dt)) + 2;

    std::optional<detail::InFlight> in_flight;
    int next_qid = 0;
    int last_query_tick = std::numeric_limits<int>::min() / 2;
    int mppi_fail_streak = 0;
    bool pending_planner_failure = false;
    int consecutive_abandoned = 0;
    std::string end_reason = "budget";

    std::vector<Vec2> detections;  // cached between target-revision changes
    uint64_t ccl_revision = std::numeric_limits<uint64_t>::max();

    auto submit_query = [&](int tick, const std::string& cause, const std::string& feedback,
                            int requery_count, const CentroidChain& chain,
                            const SensorFrame& frame) {
        detail::InFlight q;
        q.qid = next_qid++;
        q.submit_tick = tick;
        q.deliver_tick = tick + std::max(0, planner->latency_ticks());
        q.request_pose = state.pose();
        q.mode = select_mode(chain, state.pose(), cfg.planner_d_min);
        q.requery_count = requery_count;

        PlannerQuery pq;
        pq.mode = q.mode;
        pq.chain = chain;
        pq.robot = state;
        pq.feedback = feedback;
        pq.frame = frame;
        MapOverlays ov;
        ov.robot = state.pose();
        ov.trajectory = out.trajectory;
        for (int i = 0; i < chain.size(); ++i)
            ov.centroids.push_back({chain.ordered[i].position, i});
        ov.chain_edges = chain.edges();
        pq.map_image = render_map(grid, ov);

        log.queries.push_back({q.qid, tick, planner_mode_name(q.mode), cause,
                               state.x, state.y, state.theta});
        last_query_tick = tick;

        if (cfg.threaded) {
            q.threaded = true;
            HighLevelPlanner* p = planner.get();
            q.future = std::async(std::launch::async,
                                  [p, pq = std::move(pq)]() { return p->plan(pq); });
        } else {
            q.ready = planner->plan(pq);
        }
        in_flight = std::move(q);
    };

    int tick = 0;
    for (; tick < cfg.tick_budget; ++tick) {
        // Perception.
        SensorFrame frame =
            render_sensor(w, state.pose(), cfg.sensor.fov, cfg.sensor.d_max, cfg.sensor.rays);
        CameraModel cam = scanline_camera(state.pose(), cfg.sensor.rays, cfg.sensor.fov);
        integrate_frame(grid, frame, cam);

        // Cluster extraction from the persistent map, reused until new
        // target cells appear.
        if (grid.target_revision != ccl_revision) {
            ccl_revision = grid.target_revision;
            detections.clear();
            for (const auto& r : target_components(grid, cfg.map.a_min_cells))
                detections.push_back(region_centroid_world(r, grid));
        }
        tracker.update(detections);
        CentroidChain chain = tracker.chain();
        {
            ChainRecord cr;
            cr.tick = tick;
            for (int i = 0; i < chain.size(); ++i)
                cr.entries.push_back({chain.ordered[i].id, chain.ordered[i].position.x,
                                      chain.ordered[i].position.y, i,
                                      chain.ordered[i].visited});
            log.chains.push_back(std::move(cr));
        }

        coverage.observe(state.pose());
        out.trajectory.push_back(state.position());

        // Mailbox delivery.
        if (in_flight && tick >= in_flight->deliver_tick) {
            detail::InFlight q = std::move(*in_flight);
            in_flight.reset();
            PlannerOutcome outcome = q.threaded ? q.future.get() : std::move(q.ready);

            ResponseRecord rr;
            rr.qid = q.qid;
            rr.tick = tick;
            rr.latency_ticks = tick - q.submit_tick;
            rr.failed = outcome.failed;
            rr.kind = outcome.failed ? "failed" : response_kind_name(outcome.response.kind);
            rr.index = outcome.response.index;
            rr.d_fwd = outcome.response.d_fwd;
            rr.d_lat = outcome.response.d_lat;
            rr.raw = outcome.raw_text;
            rr.prompt = outcome.prompt;
            rr.wall_ms = outcome.wall_ms;
            log.responses.push_back(std::move(rr));

            if (outcome.failed || outcome.response.kind == PlannerResponse::Kind::none) {
                ++consecutive_abandoned;
                pending_planner_failure = true;
            } else {
                WaypointResolution res =
                    resolve_waypoint(outcome.response, chain, state.pose());
                VerifyContext vctx;
                vctx.request_pose = q.request_pose;
                vctx.delivery_pose = state.pose();
                vctx.prev_goal = goal;
                vctx.chain = &chain;
                vctx.map_cells_seen = static_cast<int>(grid.explored_count());
                vctx.invalid_index = res.invalid_index;
                vctx.requested_index = outcome.response.index;
                vctx.chain_size = chain.size();
                Verdict verdict = verify(res.point, vctx, cfg.verifier);

                VerdictRecord vr;
                vr.qid = q.qid;
                vr.tick = tick;
                vr.accepted = verdict.accepted;
                vr.failure = failure_mode_name(verdict.failure_mode);
                vr.feedback = verdict.feedback;
                vr.mode = planner_mode_name(q.mode);
                vr.wp_x = res.point ? res.point->x : 0.0;
                vr.wp_y = res.point ? res.point->y : 0.0;
                vr.angle_back_request_deg = verdict.angle_back_request_deg;
                vr.angle_back_delivery_deg = verdict.angle_back_delivery_deg;
                vr.angle_prev_deg = verdict.angle_prev_deg;
                vr.angle_dev_deg = verdict.angle_dev_deg;
                log.verdicts.push_back(std::move(vr));

                if (verdict.accepted) {
                    bool ok = accept_new_goal(*res.point, goal, cfg.trigger.dd_min);
                    int track = outcome.response.kind == PlannerResponse::Kind::centroid_index
                                    ? chain.ordered[outcome.response.index].id
                                    : -1;
                    log.goals.push_back({tick, q.qid, res.point->x, res.point->y, track, ok});
                    if (ok) {
                        goal = *res.point;
                        goal_track_id = track;
                        consecutive_abandoned = 0;
                        pending_planner_failure = false;
                        history.clear();  // fresh motion episode for the stuck window
                    }
                } else if (q.requery_count < cfg.verifier.max_requeries) {
                    submit_query(tick, "requery", verdict.feedback, q.requery_count + 1, chain,
                                 frame);
                } else {
                    ++consecutive_abandoned;
                    pending_planner_failure = true;
                }
            }
        }

        // Smart trigger; one query in flight at most.
        history.push_back({state.position(), std::abs(state.v)});
        if (history.size() > history_cap) history.pop_front();
        if (!in_flight) {
            int fail_count =
                pending_planner_failure ? cfg.trigger.n_fail_max : mppi_fail_streak;
            double since_query = (tick - last_query_tick) * cfg.dt;
            TriggerDecision trig = evaluate_trigger(history, state.position(), goal,
                                                    fail_count, since_query, cfg.trigger, cfg.dt);
            if (trig.fire) {
                log.triggers.push_back({tick, trigger_cause_name(trig.cause)});
                if (trig.cause == TriggerCause::dist && goal_track_id >= 0)
                    tracker.mark_visited(goal_track_id);
                chain = tracker.chain();
                submit_query(tick, trigger_cause_name(trig.cause), "", 0, chain, frame);
            }
        }

        // Low-level control, every tick regardless of planner state.
        if (grid.obstacle_revision != field_revision) {
            field = DistanceField::build(grid);
            field_revision = grid.obstacle_revision;
        }
        MppiController::Output ctrl = controller.control(state, *goal, grid, field);
        if (ctrl.failure)
            ++mppi_fail_streak;
        else
            mppi_fail_streak = 0;

        TickRecord tr;
        tr.tick = tick;
        tr.x = state.x;
        tr.y = state.y;
        tr.theta = state.theta;
        tr.v = state.v;
        tr.omega = state.omega;
        tr.accel = ctrl.control.accel;
        tr.alpha = ctrl.control.alpha;
        tr.mppi_fail = ctrl.failure;
        tr.feasible = ctrl.feasible_count;
        tr.j_min = ctrl.failure ? 0.0 : ctrl.j_min;
        tr.goal_x = goal->x;
        tr.goal_y = goal->y;

        state = step_dynamics(state, ctrl.control, cfg.dt, Fidelity::full, cfg.controller.limits);
        tr.collision = check_collision(w, state.position(), cfg.controller.robot_radius);
        tr.coverage_pct = coverage.coverage_pct();
        log.ticks.push_back(tr);

        if (coverage.total() > 0 && coverage.covered_count() == coverage.total()) {
            end_reason = "complete";
            break;
        }
        if (consecutive_abandoned >= cfg.planner_exhaust_limit) {
            end_reason = "planner_exhausted";
            break;
        }
    }

    out.final_chain = tracker.chain();

    SummaryRecord s;
    s.steps = static_cast<int>(log.ticks.size());
    s.coverage_pct = coverage.coverage_pct();
    s.collisions = count_collisions(log);
    s.vlm_calls = count_vlm_calls(log);
    s.deviations = count_deviations(log);
    s.t_idle_s = t_idle_seconds(log, cfg.dt);
    s.mission_time_s = s.steps * cfg.dt + s.t_idle_s;
    auto eff = efficiency(static_cast<double>(s.steps), s.coverage_pct);
    s.has_efficiency = eff.has_value();
    s.efficiency = eff.value_or(0.0);
    s.clusters_covered = coverage.covered_count();
    s.clusters_total = coverage.total();
    s.end = end_reason;
    log.summary = s;
    log.has_summary = true;
    return out;
}

inline MissionOutputs run_mission(const MissionConfig& cfg) {
    if (cfg.world.kind == "load") return run_mission(cfg, load_world_file(cfg.world.path));
    return run_mission(cfg, generate_world(cfg.world.topology, cfg.world.size, cfg.world.seed));
}

// -------- Log replay utilities --------

// Rebuilds the final overlay image from a log by replaying perception over
// the pose history; chain and trajectory come from the log records.
inline MapImage render_from_log(const MissionLog& log, const WorldModel& world,
                                std::optional<int> up_to_tick = std::nullopt) {
    MissionConfig cfg = mission_config_from_json(log.config);
    OccupancyGrid grid = OccupancyGrid::covering(world.bounds, cfg.map.resolution);
    MapOverlays ov;
    const ChainRecord* last_chain = nullptr;
    for (const auto& t : log.ticks) {
        if (up_to_tick && t.tick > *up_to_tick) break;
        Pose pose{{t.x, t.y}, t.theta};
        SensorFrame frame = render_sensor(world, pose, cfg.sensor.fov, cfg.sensor.d_max,
                                          cfg.sensor.rays);
        integrate_frame(grid, frame, scanline_camera(pose, cfg.sensor.rays, cfg.sensor.fov));
        ov.trajectory.push_back({t.x, t.y});
        ov.robot = pose;
    }
    for (const auto& c : log.chains) {
        if (up_to_tick && c.tick > *up_to_tick) break;
        last_chain = &c;
    }
    if (last_chain) {
        std::vector<const ChainEntryRecord*> by_order;
        for (const auto& e : last_chain->entries) by_order.push_back(&e);
        std::sort(by_order.begin(), by_order.end(),
                  [](auto* a, auto* b) { return a->order_index < b->order_index; });
        for (auto* e : by_order) ov.centroids.push_back({{e->x, e->y}, e->order_index});
        for (size_t i = 1; i < by_order.size(); ++i)
            ov.chain_edges.push_back(
                {{by_order[i - 1]->x, by_order[i - 1]->y}, {by_order[i]->x, by_order[i]->y}});
    }
    return render_map(grid, ov);
}

// Recomputes every summary metric from the raw records and reports
// mismatches; an empty result means the log is internally consistent.
inline std::vector<std::string> verify_log(const MissionLog& log, const WorldModel& world) {
    std::vector<std::string> issues;
    if (!log.has_summary) {
        issues.push_back("log has no summary record");
        return issues;
    }
    MissionConfig cfg = mission_config_from_json(log.config);
    auto check_int = [&](const char* name, int logged, int recomputed) {
        if (logged != recomputed)
            issues.push_back(std::string(name) + ": logged " + std::to_string(logged) +
                             ", recomputed " + std::to_string(recomputed));
    };
    auto check_double = [&](const char* name, double logged, double recomputed) {
        if (std::abs(logged - recomputed) > 1e-9)
            issues.push_back(std::string(name) + ": logged " + std::to_string(logged) +
                             ", recomputed " + std::to_string(recomputed));
    };
    for (size_t i = 1; i < log.ticks.size(); ++i)
        if (log.ticks[i].tick != log.ticks[i - 1].tick + 1) {
            issues.push_back("tick indices are not consecutive at position " + std::to_string(i));
            break;
        }
    for (const auto& r : log.responses) {
        bool found = false;
        for (const auto& q : log.queries) found |= q.qid == r.qid;
        if (!found)
            issues.push_back("response qid " + std::to_string(r.qid) + " has no query");
    }
    check_int("steps", log.summary.steps, static_cast<int>(log.ticks.size()));
    check_int("collisions", log.summary.collisions, count_collisions(log));
    check_int("vlm_calls", log.summary.vlm_calls, count_vlm_calls(log));
    check_int("deviations", log.summary.deviations, count_deviations(log));
    check_double("t_idle_s", log.summary.t_idle_s, t_idle_seconds(log, cfg.dt));
    check_double("mission_time_s", log.summary.mission_time_s,
                 mission_time(log, TimeModel::coral, 0.0, cfg.dt));
    check_double("coverage_pct", log.summary.coverage_pct,
                 coverage_rate(log, world, cfg.sensor.fov, cfg.sensor.d_max,
                               cfg.coverage_threshold));
    return issues;
}

// -------- Batch harness --------

struct BatchRun {
    std::string name;
    MissionConfig config;
};

struct BatchRow {
    std::string name;
    bool ok = false;
    std::string error;
    SummaryRecord summary;
    std::optional<double> cov_time_s;
};

struct BatchResult {
    std::vector<BatchRow> rows;
};

// Runs each mission in isolation; a failure becomes a row, not an abort.
// When out_dir is set, per-mission logs, worlds, and final map images are
// written next to the summary table.
inline BatchResult run_batch(const std::vector<BatchRun>& runs, const std::string& out_dir = "") {
    BatchResult result;
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
    for (const auto& run : runs) {
        BatchRow row;
        row.name = run.name;
        try {
            MissionOutputs m = run_mission(run.config);
            row.ok = true;
            row.summary = m.log.summary;
            row.cov_time_s =
                time_to_coverage(m.log, run.config.coverage_target_pct, run.config.dt);
            if (!out_dir.empty()) {
                save_log(m.log, out_dir + "/" + run.name + ".jsonl");
                save_world(m.world, out_dir + "/" + run.name + ".world.txt");
                MapOverlays ov;
                if (!m.log.ticks.empty())
                    ov.robot = Pose{{m.log.ticks.back().x, m.log.ticks.back().y},
                                    m.log.ticks.back().theta};
                ov.trajectory = m.trajectory;
                for (int i = 0; i < m.final_chain.size(); ++i)
                    ov.centroids.push_back({m.final_chain.ordered[i].position, i});
                ov.chain_edges = m.final_chain.edges();
                export_map_image(m.grid, ov, out_dir + "/" + run.name + ".ppm");
            }
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
        result.rows.push_back(std::move(row));
    }
    return result;
}

inline void write_summary_table(const BatchResult& result, std::ostream& out) {
    out << "name\tcov_pct\tcov_time_s\tcoll\tvlm_calls\tdev\tsteps_per_pct\tsteps\tend\n";
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };
    int n_ok = 0;
    double sum_cov = 0, sum_time = 0, sum_coll = 0, sum_calls = 0, sum_dev = 0, sum_eff = 0;
    int n_time = 0, n_eff = 0;
    for (const auto& r : result.rows) {
        if (!r.ok) {
            out << r.name << "\tFAILED: " << r.error << "\n";
            continue;
        }
        ++n_ok;
        sum_cov += r.summary.coverage_pct;
        sum_coll += r.summary.collisions;
        sum_calls += r.summary.vlm_calls;
        sum_dev += r.summary.deviations;
        out << r.name << "\t" << fmt(r.summary.coverage_pct) << "\t";
        if (r.cov_time_s) {
            out << fmt(*r.cov_time_s);
            sum_time += *r.cov_time_s;
            ++n_time;
        } else {
            out << "-";
        }
        out << "\t" << r.summary.collisions << "\t" << r.summary.vlm_calls << "\t"
            << r.summary.deviations << "\t";
        if (r.summary.has_efficiency) {
            out << fmt(r.summary.efficiency);
            sum_eff += r.summary.efficiency;
            ++n_eff;
        } else {
            out << "inf";
        }
        out << "\t" << r.summary.steps << "\t" << r.summary.end << "\n";
    }
    if (n_ok > 0) {
        out << "mean\t" << fmt(sum_cov / n_ok) << "\t"
            << (n_time ? fmt(sum_time / n_time) : "-") << "\t" << fmt(sum_coll / n_ok) << "\t"
            << fmt(sum_calls / n_ok) << "\t" << fmt(sum_dev / n_ok) << "\t"
            << (n_eff ? fmt(sum_eff / n_eff) : "inf") << "\t-\t-\n";
    }
}

// The evaluation matrix: two environments per topology class, sizes spanning
// the supported range.
inline std::vector<BatchRun> standard_batch(const MissionConfig& base, uint64_t seed_base) {
    struct Env {
        Topology topo;
        double size;
    };
    const Env envs[10] = {{Topology::L, 20}, {Topology::L, 26}, {Topology::S, 22},
                          {Topology::S, 28}, {Topology::K, 24}, {Topology::K, 30},
                          {Topology::E, 20}, {Topology::E, 30}, {Topology::O, 25},
                          {Topology::O, 28}};
    std::vector<BatchRun> runs;
    for (int i = 0; i < 10; ++i) {
        BatchRun r;
        r.config = base;
        r.config.world.kind = "generate";
        r.config.world.topology = envs[i].topo;
        r.config.world.size = envs[i].size;
        r.config.world.seed = seed_base + i;
        r.config.seed = seed_base + 100 + i;
        r.name = std::string(topology_name(envs[i].topo)) + std::to_string(i % 2 + 1);
        runs.push_back(std::move(r));
    }
    return runs;
}

}  // namespace coral
