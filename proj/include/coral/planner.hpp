#pragma once

#include <cstdlib>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <json.hpp>

#include "coral/centroid.hpp"
#include "coral/controller.hpp"
#include "coral/map_image.hpp"
#include "coral/prompts.hpp"
#include "coral/verifier.hpp"
#include "coral/world.hpp"

namespace coral {

enum class PlannerMode { centroid_select, free_waypoint };

inline const char* planner_mode_name(PlannerMode m) {
    return m == PlannerMode::centroid_select ? "centroid_select" : "free_waypoint";
}

// Snapshot handed to a planner; everything is copied so a planner thread
// never observes a partially updated map.
struct PlannerQuery {
    PlannerMode mode = PlannerMode::centroid_select;
    CentroidChain chain;
    RobotState robot;
    std::string feedback;  // verifier rejection text on a re-query
    MapImage map_image;
    SensorFrame frame;     // scanline segmentation + depth
};

struct PlannerResponse {
    enum class Kind { centroid_index, relative_move, none };
    Kind kind = Kind::none;
    int index = -1;       // centroid_index
    double d_fwd = 0.0;   // relative_move, forward positive
    double d_lat = 0.0;   // relative_move, left positive
    std::string reason;
};

inline const char* response_kind_name(PlannerResponse::Kind k) {
    switch (k) {
        case PlannerResponse::Kind::centroid_index: return "centroid_index";
        case PlannerResponse::Kind::relative_move: return "relative_move";
        case PlannerResponse::Kind::none: return "none";
    }
    return "?";
}

// Active mode: centroid selection whenever some tracked centroid projects at
// least d_min ahead of the robot, free waypoint otherwise. Pure in its
// inputs; the switch back to centroid selection happens by re-evaluation as
// new components appear ahead.
inline PlannerMode select_mode(const CentroidChain& chain, const Pose& robot, double d_min) {
    for (const auto& e : chain.ordered)
        if (forward_projection(e.position, robot) >= d_min)
            return PlannerMode::centroid_select;
    return PlannerMode::free_waypoint;
}

// -------- Response text handling --------

// Canonical response text, the inverse of parse_response on well-formed
// responses. Used by scripted/stub planners and the log.
inline std::string format_response(const PlannerResponse& r) {
    nlohmann::json j;
    switch (r.kind) {
        case PlannerResponse::Kind::centroid_index:
            j["selected_centroid_index"] = r.index;
            j["reason"] = r.reason;
            break;
        case PlannerResponse::Kind::none:
            j["selected_centroid_index"] = nullptr;
            j["reason"] = r.reason;
            break;
        case PlannerResponse::Kind::relative_move: {
            int fwd = static_cast<int>(std::lround(std::abs(r.d_fwd)));
            int lat = static_cast<int>(std::lround(std::abs(r.d_lat)));
            std::string key = std::string("Move ") + (r.d_fwd >= 0.0 ? "forward" : "backward") +
                              " " + std::to_string(fwd) + " meters, move " +
                              (r.d_lat >= 0.0 ? "left" : "right") + " " + std::to_string(lat) +
                              " meters";
            j[key] = r.reason;
            break;
        }
    }
    return j.dump();
}

namespace detail {

inline std::optional<PlannerResponse> parse_action_string(const std::string& key,
                                                          const std::string& reason) {
    static const std::regex fwd_re(R"((forward|backward)\s+(\d+))", std::regex::icase);
    static const std::regex lat_re(R"((left|right)\s+(\d+))", std::regex::icase);
    std::smatch m;
    PlannerResponse r;
    r.kind = PlannerResponse::Kind::relative_move;
    r.reason = reason;
    bool any = false;
    if (std::regex_search(key, m, fwd_re)) {
        any = true;
        double mag = std::min(6.0, std::stod(m[2]));
        char c = static_cast<char>(std::tolower(m[1].str()[0]));
        r.d_fwd = c == 'f' ? mag : -mag;
    }
    if (std::regex_search(key, m, lat_re)) {
        any = true;
        double mag = std::min(6.0, std::stod(m[2]));
        char c = static_cast<char>(std::tolower(m[1].str()[0]));
        r.d_lat = c == 'l' ? mag : -mag;
    }
    if (!any) return std::nullopt;
    return r;
}

}  // namespace detail

// Parses raw planner text. Centroid form: a dict carrying
// "selected_centroid_index" (null means no candidate). Free form: a dict
// whose single key is the action string ("Move forward 4 meters, move right
// 1 meter"); forward/left are positive, magnitudes clamp to {0..6}.
// Unparseable text is a planner failure, reported as nullopt.
inline std::optional<PlannerResponse> parse_response(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_object()) {
        if (j.contains("selected_centroid_index")) {
            PlannerResponse r;
            r.reason = j.value("reason", "");
            const auto& idx = j["selected_centroid_index"];
            if (idx.is_null()) {
                r.kind = PlannerResponse::Kind::none;
                return r;
            }
            if (idx.is_number_integer()) {
                r.kind = PlannerResponse::Kind::centroid_index;
                r.index = idx.get<int>();
                return r;
            }
            return std::nullopt;
        }
        for (auto it = j.begin(); it != j.end(); ++it) {
            std::string reason = it.value().is_string() ? it.value().get<std::string>() : "";
            auto r = detail::parse_action_string(it.key(), reason);
            if (r) return r;
        }
        return std::nullopt;
    }
    // Fallback for replies that wrap the dict in prose or code fences.
    static const std::regex idx_re(R"("selected_centroid_index"\s*:\s*(null|-?\d+))");
    std::smatch m;
    if (std::regex_search(text, m, idx_re)) {
        PlannerResponse r;
        if (m[1] == "null") {
            r.kind = PlannerResponse::Kind::none;
        } else {
            r.kind = PlannerResponse::Kind::centroid_index;
            r.index = std::stoi(m[1]);
        }
        return r;
    }
    auto r = detail::parse_action_string(text, "");
    if (r) return r;
    return std::nullopt;
}

// -------- Waypoint resolution --------

struct WaypointResolution {
    std::optional<Vec2> point;
    bool invalid_index = false;
};

// Converts a response to an odometry-frame waypoint: a centroid label picks
// the tracked position at that chain position; a relative move is applied in
// the robot frame (forward, left). An out-of-range label is reported so the
// verifier can reject it with feedback.
inline WaypointResolution resolve_waypoint(const PlannerResponse& r, const CentroidChain& chain,
                                           const Pose& robot) {
    WaypointResolution out;
    switch (r.kind) {
        case PlannerResponse::Kind::centroid_index:
            if (r.index < 0 || r.index >= chain.size()) {
                out.invalid_index = true;
                return out;
            }
            out.point = chain.ordered[r.index].position;
            return out;
        case PlannerResponse::Kind::relative_move:
            out.point = robot.position + robot.forward() * r.d_fwd + robot.left() * r.d_lat;
            return out;
        case PlannerResponse::Kind::none:
            throw std::invalid_argument("cannot resolve a 'none' response");
    }
    return out;
}

// -------- Prompt assembly --------

struct ImageAttachment {
    std::string name;
    std::string ppm;  // binary P6 payload
};

struct PromptBundle {
    std::string text;
    std::vector<ImageAttachment> images;
};

// Renders the scanline frame as small strip images so remote planners
// receive the same three inputs the prompts describe.
inline MapImage render_segmentation_strip(const SensorFrame& f, int strip_height = 16) {
    MapImage img;
    img.width = f.width();
    img.height = strip_height;
    img.rgb.assign(static_cast<size_t>(img.width) * img.height * 3, 0);
    for (int x = 0; x < img.width; ++x) {
        Rgb c = f.label[x] == RayLabel::target     ? kColorTarget
                : f.label[x] == RayLabel::obstacle ? kColorObstacle
                                                   : kColorFree;
        for (int y = 0; y < img.height; ++y) img.set(x, y, c);
    }
    return img;
}

inline MapImage render_depth_strip(const SensorFrame& f, int strip_height = 16) {
    MapImage img;
    img.width = f.width();
    img.height = strip_height;
    img.rgb.assign(static_cast<size_t>(img.width) * img.height * 3, 0);
    for (int x = 0; x < img.width; ++x) {
        Rgb c{255, 255, 255};
        if (std::isfinite(f.depth[x])) {
            auto v = static_cast<uint8_t>(std::clamp(255.0 * (1.0 - f.depth[x] / f.d_max), 0.0, 255.0));
            c = {v, v, v};
        }
        for (int y = 0; y < img.height; ++y) img.set(x, y, c);
    }
    return img;
}

// Assembles the mode's template verbatim, with the verifier feedback
// sentence appended on re-queries, plus the three image attachments.
inline PromptBundle build_prompt(const PlannerQuery& q) {
    PromptBundle b;
    b.text = q.mode == PlannerMode::centroid_select ? kPromptCentroidSelect : kPromptFreeWaypoint;
    b.text = append_feedback(std::move(b.text), q.feedback);
    b.images.push_back({"map", encode_ppm(q.map_image)});
    b.images.push_back({"segmentation", encode_ppm(render_segmentation_strip(q.frame))});
    b.images.push_back({"depth", encode_ppm(render_depth_strip(q.frame))});
    return b;
}

// -------- Planner implementations --------

struct PlannerOutcome {
    bool failed = false;         // transport failure, parse failure, script exhaustion
    PlannerResponse response;    // valid when !failed
    std::string raw_text;        // verbatim model/script output
    std::string prompt;          // verbatim prompt, when one was built
    int latency_ticks = 0;       // simulated latency
    double wall_ms = -1.0;       // measured wall latency, remote only
};

class HighLevelPlanner {
public:
    virtual ~HighLevelPlanner() = default;
    virtual PlannerOutcome plan(const PlannerQuery& query) = 0;
    virtual const char* name() const = 0;
    // Injected latency in ticks; the mission delivers a response this many
    // ticks after submission.
    virtual int latency_ticks() const = 0;
};

// Nearest-unvisited-centroid heuristic. On a re-query after a rejection the
// previous pick is excluded so the planner cannot re-offer the rejected
// waypoint forever.
class RuleBasedPlanner : public HighLevelPlanner {
public:
    explicit RuleBasedPlanner(int latency_ticks = 0) : latency_ticks_(latency_ticks) {}

    PlannerOutcome plan(const PlannerQuery& q) override {
        PlannerOutcome out;
        out.latency_ticks = latency_ticks_;
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        int best_id = std::numeric_limits<int>::max();
        for (int i = 0; i < q.chain.size(); ++i) {
            const auto& e = q.chain.ordered[i];
            if (e.visited) continue;
            if (!q.feedback.empty() && i == last_index_) continue;
            double d = distance(e.position, q.robot.position());
            if (d < best_d || (d == best_d && e.id < best_id)) {
                best_d = d;
                best = i;
                best_id = e.id;
            }
        }
        if (best < 0) {
            out.response.kind = PlannerResponse::Kind::none;
            out.response.reason = "all centroids visited";
        } else {
            out.response.kind = PlannerResponse::Kind::centroid_index;
            out.response.index = best;
            out.response.reason = "nearest unvisited centroid";
        }
        last_index_ = best;
        out.raw_text = format_response(out.response);
        return out;
    }
    const char* name() const override { return "rule"; }
    int latency_ticks() const override { return latency_ticks_; }

private:
    int latency_ticks_;
    int last_index_ = -1;
};

// Deterministic test double: pops pre-scripted responses in order and
// signals failure once the script runs out.
class ScriptedPlanner : public HighLevelPlanner {
public:
    explicit ScriptedPlanner(std::vector<PlannerResponse> script, int latency_ticks = 0)
        : script_(std::move(script)), latency_ticks_(latency_ticks) {
        if (script_.empty()) throw std::invalid_argument("script must be non-empty");
    }

    PlannerOutcome plan(const PlannerQuery&) override {
        PlannerOutcome out;
        out.latency_ticks = latency_ticks_;
        if (cursor_ >= script_.size()) {
            out.failed = true;
            out.raw_text = "script exhausted";
            return out;
        }
        out.response = script_[cursor_++];
        out.raw_text = format_response(out.response);
        return out;
    }
    const char* name() const override { return "scripted"; }
    int latency_ticks() const override { return latency_ticks_; }

private:
    std::vector<PlannerResponse> script_;
    size_t cursor_ = 0;
    int latency_ticks_;
};

struct RemoteEndpointConfig {
    std::string endpoint;  // full URL
    std::string model;
    std::string api_key;
    double timeout_s = 30.0;

    // Credentials and endpoint come from the environment unless configured.
    static RemoteEndpointConfig from_env() {
        RemoteEndpointConfig c;
        if (const char* e = std::getenv("CORAL_VLM_ENDPOINT")) c.endpoint = e;
        if (const char* m = std::getenv("CORAL_VLM_MODEL")) c.model = m;
        if (const char* k = std::getenv("CORAL_VLM_API_KEY")) c.api_key = k;
        return c;
    }
};

// Text-level client boundary; implementations are the latency stub and the
// remote HTTP endpoint.
class VlmClient {
public:
    virtual ~VlmClient() = default;
    // Returns the raw model text, or nullopt on transport failure/timeout.
    virtual std::optional<std::string> query(const std::string& prompt,
                                             const std::vector<ImageAttachment>& images,
                                             double* wall_ms) = 0;
    virtual const char* name() const = 0;
};

// Canned-reply client; repeats its last reply once the list is exhausted so
// long missions keep a well-defined planner.
class StubVlmClient : public VlmClient {
public:
    explicit StubVlmClient(std::vector<std::string> replies) : replies_(std::move(replies)) {
        if (replies_.empty()) throw std::invalid_argument("stub needs at least one reply");
    }
    std::optional<std::string> query(const std::string&, const std::vector<ImageAttachment>&,
                                     double* wall_ms) override {
        if (wall_ms) *wall_ms = -1.0;
        if (cursor_ < replies_.size()) return replies_[cursor_++];
        return replies_.back();
    }
    const char* name() const override { return "stub"; }

private:
    std::vector<std::string> replies_;
    size_t cursor_ = 0;
};

// Full prompt-query-parse pipeline around a text client.
class VlmPlanner : public HighLevelPlanner {
public:
    VlmPlanner(std::unique_ptr<VlmClient> client, int latency_ticks)
        : client_(std::move(client)), latency_ticks_(latency_ticks) {}

    PlannerOutcome plan(const PlannerQuery& q) override {
        PlannerOutcome out;
        out.latency_ticks = latency_ticks_;
        PromptBundle bundle = build_prompt(q);
        out.prompt = bundle.text;
        auto text = client_->query(bundle.text, bundle.images, &out.wall_ms);
        if (!text) {
            out.failed = true;
            out.raw_text = "transport failure";
            return out;
        }
        out.raw_text = *text;
        auto parsed = parse_response(*text);
        if (!parsed) {
            out.failed = true;
            return out;
        }
        out.response = *parsed;
        return out;
    }
    const char* name() const override { return client_->name(); }
    int latency_ticks() const override { return latency_ticks_; }

private:
    std::unique_ptr<VlmClient> client_;
    int latency_ticks_;
};

}  // namespace coral
