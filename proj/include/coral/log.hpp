#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace coral {

// Append-only line-delimited mission record stream, schema version 1.
// Serialization order is deterministic: header, then per tick all events of
// that tick (chain, response, verdict, goal, trigger, query) followed by the
// tick record, then the summary.

struct TickRecord {
    int tick = 0;
    double x = 0, y = 0, theta = 0, v = 0, omega = 0;
    double accel = 0, alpha = 0;
    bool collision = false;
    bool mppi_fail = false;
    int feasible = 0;
    double j_min = 0;
    double goal_x = 0, goal_y = 0;
    double coverage_pct = 0;
};

struct TriggerRecord {
    int tick = 0;
    std::string cause;
};

struct QueryRecord {
    int qid = 0;
    int tick = 0;
    std::string mode;
    std::string cause;  // dist | stuck | fail | requery | initial
    double x = 0, y = 0, heading = 0;
};

struct ResponseRecord {
    int qid = 0;
    int tick = 0;
    int latency_ticks = 0;
    bool failed = false;
    std::string kind;
    int index = -1;
    double d_fwd = 0, d_lat = 0;
    std::string raw;
    std::string prompt;
    double wall_ms = -1.0;  // remote planner only
};

struct VerdictRecord {
    int qid = 0;
    int tick = 0;
    bool accepted = false;
    std::string failure;
    std::string feedback;
    std::string mode;
    double wp_x = 0, wp_y = 0;
    double angle_back_request_deg = -1, angle_back_delivery_deg = -1;
    double angle_prev_deg = -1, angle_dev_deg = -1;
};

struct GoalRecord {
    int tick = 0;
    int qid = -1;
    double x = 0, y = 0;
    int track_id = -1;
    bool accepted = true;  // false when rejected by the separation rule
};

struct ChainEntryRecord {
    int id = 0;
    double x = 0, y = 0;
    int order_index = 0;
    bool visited = false;
};

struct ChainRecord {
    int tick = 0;
    std::vector<ChainEntryRecord> entries;
};

struct SummaryRecord {
    int steps = 0;
    double coverage_pct = 0;
    int collisions = 0;
    int vlm_calls = 0;
    int deviations = 0;
    double t_idle_s = 0;
    double mission_time_s = 0;
    bool has_efficiency = false;
    double efficiency = 0;
    int clusters_covered = 0;
    int clusters_total = 0;
    std::string end;  // complete | budget | planner_exhausted
};

struct MissionLog {
    nlohmann::json config;  // resolved configuration snapshot
    std::vector<TickRecord> ticks;
    std::vector<TriggerRecord> triggers;
    std::vector<QueryRecord> queries;
    std::vector<ResponseRecord> responses;
    std::vector<VerdictRecord> verdicts;
    std::vector<GoalRecord> goals;
    std::vector<ChainRecord> chains;
    SummaryRecord summary;
    bool has_summary = false;
};

namespace logio {

inline nlohmann::json to_json(const TickRecord& r) {
    return {{"type", "tick"},       {"i", r.tick},        {"x", r.x},
            {"y", r.y},             {"th", r.theta},      {"v", r.v},
            {"om", r.omega},        {"a", r.accel},       {"al", r.alpha},
            {"coll", r.collision},  {"fail", r.mppi_fail}, {"feas", r.feasible},
            {"jmin", r.j_min},      {"gx", r.goal_x},     {"gy", r.goal_y},
            {"cov", r.coverage_pct}};
}
inline nlohmann::json to_json(const TriggerRecord& r) {
    return {{"type", "trigger"}, {"i", r.tick}, {"cause", r.cause}};
}
inline nlohmann::json to_json(const QueryRecord& r) {
    return {{"type", "query"}, {"qid", r.qid},     {"i", r.tick}, {"mode", r.mode},
            {"cause", r.cause}, {"x", r.x},        {"y", r.y},    {"heading", r.heading}};
}
inline nlohmann::json to_json(const ResponseRecord& r) {
    nlohmann::json j = {{"type", "response"}, {"qid", r.qid},   {"i", r.tick},
                        {"latency", r.latency_ticks}, {"failed", r.failed},
                        {"kind", r.kind},     {"index", r.index}, {"dfwd", r.d_fwd},
                        {"dlat", r.d_lat},    {"raw", r.raw},   {"prompt", r.prompt}};
    if (r.wall_ms >= 0.0) j["wall_ms"] = r.wall_ms;
    return j;
}
inline nlohmann::json to_json(const VerdictRecord& r) {
    return {{"type", "verdict"},   {"qid", r.qid},         {"i", r.tick},
            {"accepted", r.accepted}, {"failure", r.failure}, {"feedback", r.feedback},
            {"mode", r.mode},      {"wx", r.wp_x},         {"wy", r.wp_y},
            {"ang_back_req", r.angle_back_request_deg},
            {"ang_back_del", r.angle_back_delivery_deg},
            {"ang_prev", r.angle_prev_deg},
            {"ang_dev", r.angle_dev_deg}};
}
inline nlohmann::json to_json(const GoalRecord& r) {
    return {{"type", "goal"}, {"i", r.tick},          {"qid", r.qid},
            {"x", r.x},       {"y", r.y},             {"track", r.track_id},
            {"accepted", r.accepted}};
}
inline nlohmann::json to_json(const ChainRecord& r) {
    nlohmann::json entries = nlohmann::json::array();
    for (auto& e : r.entries)
        entries.push_back(
            {{"id", e.id}, {"x", e.x}, {"y", e.y}, {"ord", e.order_index}, {"vis", e.visited}});
    return {{"type", "chain"}, {"i", r.tick}, {"entries", entries}};
}
inline nlohmann::json to_json(const SummaryRecord& r) {
    nlohmann::json j = {{"type", "summary"},
                        {"steps", r.steps},
                        {"coverage_pct", r.coverage_pct},
                        {"collisions", r.collisions},
                        {"vlm_calls", r.vlm_calls},
                        {"deviations", r.deviations},
                        {"t_idle_s", r.t_idle_s},
                        {"mission_time_s", r.mission_time_s},
                        {"clusters_covered", r.clusters_covered},
                        {"clusters_total", r.clusters_total},
                        {"end", r.end}};
    if (r.has_efficiency)
        j["efficiency"] = r.efficiency;
    else
        j["efficiency"] = nullptr;
    return j;
}

}  // namespace logio

inline void serialize_log(const MissionLog& log, std::ostream& out) {
    nlohmann::json header = {{"type", "header"}, {"version", 1}, {"config", log.config}};
    out << header.dump() << "\n";
    size_t it = 0, itr = 0, iq = 0, ir = 0, iv = 0, ig = 0, ic = 0;
    int max_tick = log.ticks.empty() ? -1 : log.ticks.back().tick;
    for (int tick = 0; tick <= max_tick; ++tick) {
        while (ic < log.chains.size() && log.chains[ic].tick == tick)
            out << logio::to_json(log.chains[ic++]).dump() << "\n";
        while (ir < log.responses.size() && log.responses[ir].tick == tick)
            out << logio::to_json(log.responses[ir++]).dump() << "\n";
        while (iv < log.verdicts.size() && log.verdicts[iv].tick == tick)
            out << logio::to_json(log.verdicts[iv++]).dump() << "\n";
        while (ig < log.goals.size() && log.goals[ig].tick == tick)
            out << logio::to_json(log.goals[ig++]).dump() << "\n";
        while (itr < log.triggers.size() && log.triggers[itr].tick == tick)
            out << logio::to_json(log.triggers[itr++]).dump() << "\n";
        while (iq < log.queries.size() && log.queries[iq].tick == tick)
            out << logio::to_json(log.queries[iq++]).dump() << "\n";
        while (it < log.ticks.size() && log.ticks[it].tick == tick)
            out << logio::to_json(log.ticks[it++]).dump() << "\n";
    }
    // Events past the last tick record (e.g. from a zero-tick mission).
    while (ic < log.chains.size()) out << logio::to_json(log.chains[ic++]).dump() << "\n";
    while (ir < log.responses.size()) out << logio::to_json(log.responses[ir++]).dump() << "\n";
    while (iv < log.verdicts.size()) out << logio::to_json(log.verdicts[iv++]).dump() << "\n";
    while (ig < log.goals.size()) out << logio::to_json(log.goals[ig++]).dump() << "\n";
    while (itr < log.triggers.size()) out << logio::to_json(log.triggers[itr++]).dump() << "\n";
    while (iq < log.queries.size()) out << logio::to_json(log.queries[iq++]).dump() << "\n";
    if (log.has_summary) out << logio::to_json(log.summary).dump() << "\n";
}

inline std::string serialize_log(const MissionLog& log) {
    std::ostringstream ss;
    serialize_log(log, ss);
    return ss.str();
}

inline void save_log(const MissionLog& log, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write log file: " + path);
    serialize_log(log, f);
}

inline MissionLog parse_log(std::istream& in) {
    MissionLog log;
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        std::string type = j.at("type");
        if (type == "header") {
            if (j.at("version").get<int>() != 1)
                throw std::runtime_error("unsupported log version");
            log.config = j.at("config");
            saw_header = true;
        } else if (type == "tick") {
            TickRecord r;
            r.tick = j.at("i");
            r.x = j.at("x");
            r.y = j.at("y");
            r.theta = j.at("th");
            r.v = j.at("v");
            r.omega = j.at("om");
            r.accel = j.at("a");
            r.alpha = j.at("al");
            r.collision = j.at("coll");
            r.mppi_fail = j.at("fail");
            r.feasible = j.at("feas");
            r.j_min = j.at("jmin");
            r.goal_x = j.at("gx");
            r.goal_y = j.at("gy");
            r.coverage_pct = j.at("cov");
            log.ticks.push_back(r);
        } else if (type == "trigger") {
            log.triggers.push_back({j.at("i"), j.at("cause")});
        } else if (type == "query") {
            QueryRecord r;
            r.qid = j.at("qid");
            r.tick = j.at("i");
            r.mode = j.at("mode");
            r.cause = j.at("cause");
            r.x = j.at("x");
            r.y = j.at("y");
            r.heading = j.at("heading");
            log.queries.push_back(r);
        } else if (type == "response") {
            ResponseRecord r;
            r.qid = j.at("qid");
            r.tick = j.at("i");
            r.latency_ticks = j.at("latency");
            r.failed = j.at("failed");
            r.kind = j.at("kind");
            r.index = j.at("index");
            r.d_fwd = j.at("dfwd");
            r.d_lat = j.at("dlat");
            r.raw = j.at("raw");
            r.prompt = j.at("prompt");
            r.wall_ms = j.value("wall_ms", -1.0);
            log.responses.push_back(r);
        } else if (type == "verdict") {
            VerdictRecord r;
            r.qid = j.at("qid");
            r.tick = j.at("i");
            r.accepted = j.at("accepted");
            r.failure = j.at("failure");
            r.feedback = j.at("feedback");
            r.mode = j.at("mode");
            r.wp_x = j.at("wx");
            r.wp_y = j.at("wy");
            r.angle_back_request_deg = j.at("ang_back_req");
            r.angle_back_delivery_deg = j.at("ang_back_del");
            r.angle_prev_deg = j.at("ang_prev");
            r.angle_dev_deg = j.at("ang_dev");
            log.verdicts.push_back(r);
        } else if (type == "goal") {
            GoalRecord r;
            r.tick = j.at("i");
            r.qid = j.at("qid");
            r.x = j.at("x");
            r.y = j.at("y");
            r.track_id = j.at("track");
            r.accepted = j.at("accepted");
            log.goals.push_back(r);
        } else if (type == "chain") {
            ChainRecord r;
            r.tick = j.at("i");
            for (auto& e : j.at("entries"))
                r.entries.push_back(
                    {e.at("id"), e.at("x"), e.at("y"), e.at("ord"), e.at("vis")});
            log.chains.push_back(r);
        } else if (type == "summary") {
            SummaryRecord& s = log.summary;
            s.steps = j.at("steps");
            s.coverage_pct = j.at("coverage_pct");
            s.collisions = j.at("collisions");
            s.vlm_calls = j.at("vlm_calls");
            s.deviations = j.at("deviations");
            s.t_idle_s = j.at("t_idle_s");
            s.mission_time_s = j.at("mission_time_s");
            s.clusters_covered = j.at("clusters_covered");
            s.clusters_total = j.at("clusters_total");
            s.end = j.at("end");
            if (!j.at("efficiency").is_null()) {
                s.has_efficiency = true;
                s.efficiency = j.at("efficiency");
            }
            log.has_summary = true;
        } else {
            throw std::runtime_error("unknown log record type: " + type);
        }
    }
    if (!saw_header) throw std::runtime_error("log has no header record");
    return log;
}

inline MissionLog load_log(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read log file: " + path);
    return parse_log(f);
}

// -------- Derived counts --------

// Planner invocations, feedback re-queries included.
inline int count_vlm_calls(const MissionLog& log) {
    return static_cast<int>(log.queries.size());
}

// Waypoints that violated the geometric constraints (index errors are planner
// format failures, not route deviations).
inline int count_deviations(const MissionLog& log) {
    int n = 0;
    for (auto& v : log.verdicts)
        if (!v.accepted &&
            (v.failure == "behind_robot" || v.failure == "behind_prev" || v.failure == "deviated"))
            ++n;
    return n;
}

inline int count_collisions(const MissionLog& log) {
    int n = 0;
    for (auto& t : log.ticks) n += t.collision;
    return n;
}

// Cumulative stall from verification rejections: the injected latency of
// every re-query round.
inline double t_idle_seconds(const MissionLog& log, double dt) {
    double s = 0.0;
    for (auto& r : log.responses) {
        for (auto& q : log.queries)
            if (q.qid == r.qid) {
                if (q.cause == "requery") s += r.latency_ticks * dt;
                break;
            }
    }
    return s;
}

}  // namespace coral
