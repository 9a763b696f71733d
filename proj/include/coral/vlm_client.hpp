#pragma once

#include <chrono>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "coral/planner.hpp"

namespace coral {

namespace detail {

inline std::string base64_encode(const std::string& in) {
    static const char* tbl = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((in.size() + 2) / 3 * 4);
    size_t i = 0;
    while (i + 2 < in.size()) {
        uint32_t v = (static_cast<uint8_t>(in[i]) << 16) | (static_cast<uint8_t>(in[i + 1]) << 8) |
                     static_cast<uint8_t>(in[i + 2]);
        out += tbl[(v >> 18) & 63];
        out += tbl[(v >> 12) & 63];
        out += tbl[(v >> 6) & 63];
        out += tbl[v & 63];
        i += 3;
    }
    if (i + 1 == in.size()) {
        uint32_t v = static_cast<uint8_t>(in[i]) << 16;
        out += tbl[(v >> 18) & 63];
        out += tbl[(v >> 12) & 63];
        out += "==";
    } else if (i + 2 == in.size()) {
        uint32_t v = (static_cast<uint8_t>(in[i]) << 16) | (static_cast<uint8_t>(in[i + 1]) << 8);
        out += tbl[(v >> 18) & 63];
        out += tbl[(v >> 12) & 63];
        out += tbl[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

// Splits "http://host:port/path" into base and path.
inline std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace detail

// Remote planner endpoint. Wire format: POST with a JSON body
//   {"model": ..., "prompt": ..., "images": [{"name", "format", "data_base64"}]}
// expecting a JSON reply {"text": "..."}; any transport error, non-200
// status, or malformed body is a planner failure.
class RemoteVlmClient : public VlmClient {
public:
    explicit RemoteVlmClient(RemoteEndpointConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.endpoint.empty())
            throw std::invalid_argument("remote planner requires an endpoint URL");
    }

    std::optional<std::string> query(const std::string& prompt,
                                     const std::vector<ImageAttachment>& images,
                                     double* wall_ms) override {
        auto [base, path] = detail::split_url(cfg_.endpoint);
        httplib::Client cli(base);
        cli.set_connection_timeout(std::chrono::milliseconds(
            static_cast<int>(cfg_.timeout_s * 1000)));
        cli.set_read_timeout(std::chrono::milliseconds(static_cast<int>(cfg_.timeout_s * 1000)));
        httplib::Headers headers;
        if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

        nlohmann::json body;
        body["model"] = cfg_.model;
        body["prompt"] = prompt;
        body["images"] = nlohmann::json::array();
        for (const auto& img : images)
            body["images"].push_back({{"name", img.name},
                                      {"format", "ppm"},
                                      {"data_base64", detail::base64_encode(img.ppm)}});

        auto t0 = std::chrono::steady_clock::now();
        auto res = cli.Post(path, headers, body.dump(), "application/json");
        auto t1 = std::chrono::steady_clock::now();
        if (wall_ms)
            *wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        if (!res || res->status != 200) return std::nullopt;
        nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
        if (!reply.is_object() || !reply.contains("text") || !reply["text"].is_string())
            return std::nullopt;
        return reply["text"].get<std::string>();
    }
    const char* name() const override { return "remote"; }

private:
    RemoteEndpointConfig cfg_;
};

}  // namespace coral
