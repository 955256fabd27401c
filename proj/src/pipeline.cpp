#include "cmend/pipeline.hpp"

#include "cmend/preprocess.hpp"

#include <chrono>
#include <stdexcept>

namespace cmend {

namespace {

class StageClock {
public:
    explicit StageClock(std::map<std::string, double>& sink) : sink_(sink) {}

    template <typename F>
    auto time(const std::string& name, F&& f) {
        auto t0 = std::chrono::steady_clock::now();
        auto result = f();
        auto t1 = std::chrono::steady_clock::now();
        sink_[name] = std::chrono::duration<double, std::milli>(t1 - t0).count();
        return result;
    }

private:
    std::map<std::string, double>& sink_;
};

} // namespace

PipelineResult run_pipeline(const GrayImage& input, const PipelineConfig& cfg) {
    if (cfg.median_passes < 0)
        throw std::invalid_argument("run_pipeline: median_passes must be non-negative");
    if (cfg.tail_k < 2) throw std::invalid_argument("run_pipeline: tail_k must be at least 2");
    if (cfg.sample_step <= 0.0)
        throw std::invalid_argument("run_pipeline: sample_step must be positive");
    if (cfg.threshold && (*cfg.threshold < 0 || *cfg.threshold > 255))
        throw std::invalid_argument("run_pipeline: threshold outside [0, 255]");

    PipelineResult result;
    StageClock clock(result.report.timings_ms);

    int level = clock.time("threshold_select", [&] {
        return cfg.threshold ? *cfg.threshold : spread_midpoint(histogram(input)).midpoint;
    });
    result.report.threshold_used = level;

    result.stages.binary = clock.time("threshold", [&] { return threshold(input, level); });

    result.stages.filtered = clock.time("median", [&] {
        BinaryImage img = result.stages.binary;
        for (int i = 0; i < cfg.median_passes; ++i) img = median_filter3(img);
        return img;
    });

    result.stages.thinned =
        clock.time("thin", [&] { return zhang_suen_thin(result.stages.filtered); });

    auto crossed = clock.time("remove_crossed",
                              [&] { return remove_crossed_points(result.stages.thinned); });
    result.stages.uncrossed = std::move(crossed.image);
    result.report.crossed_removed = std::move(crossed.removed);

    auto coords =
        clock.time("endpoints", [&] { return detect_endpoints(result.stages.uncrossed); });
    result.report.endpoints_before = static_cast<int>(coords.size());

    auto annotation = clock.time("annotate", [&] {
        ComponentLabels labels = label_components(result.stages.uncrossed);
        return annotate_endpoints(result.stages.uncrossed, coords, labels);
    });
    result.report.endpoints = annotation.endpoints;
    result.report.excluded_endpoints = annotation.excluded;

    result.report.match = clock.time("match", [&] {
        MatchConfig mc;
        mc.window = cfg.window;
        mc.max_gap = cfg.max_gap;
        mc.tie_epsilon = cfg.tie_epsilon;
        return match_endpoints(annotation.endpoints, mc);
    });

    result.paths = clock.time("reconnect", [&] {
        std::vector<ReconnectionPath> paths;
        for (const MatchPair& pair : result.report.match.pairs) {
            ContourTail ta = trace_tail(result.stages.uncrossed, pair.a.pos, cfg.tail_k);
            ContourTail tb = trace_tail(result.stages.uncrossed, pair.b.pos, cfg.tail_k);
            paths.push_back(build_path(pair, ta, tb, cfg.sample_step));
        }
        return paths;
    });
    for (const ReconnectionPath& p : result.paths)
        result.report.path_pixel_counts.push_back(p.pixels.size());

    result.stages.reconnected = clock.time(
        "apply", [&] { return apply_reconnection(result.stages.uncrossed, result.paths); });
    result.report.endpoints_after =
        static_cast<int>(detect_endpoints(result.stages.reconnected).size());

    return result;
}

nlohmann::json report_json(const RunReport& report, bool include_timings) {
    nlohmann::json j;
    j["version"] = 1;
    j["threshold"] = report.threshold_used;

    j["crossed_removed"] = nlohmann::json::array();
    for (PixelCoord p : report.crossed_removed)
        j["crossed_removed"].push_back({{"row", p.row}, {"col", p.col}});

    j["endpoints"] = nlohmann::json::array();
    for (const Endpoint& e : report.endpoints) {
        j["endpoints"].push_back({{"row", e.pos.row},
                                  {"col", e.pos.col},
                                  {"gx", e.gx},
                                  {"gy", e.gy},
                                  {"direction", e.direction_deg},
                                  {"dir_class", e.dir_class},
                                  {"contour_id", e.contour_id}});
    }

    j["excluded_endpoints"] = nlohmann::json::array();
    for (PixelCoord p : report.excluded_endpoints)
        j["excluded_endpoints"].push_back({{"row", p.row}, {"col", p.col}});

    j["pairs"] = nlohmann::json::array();
    for (const MatchPair& pair : report.match.pairs) {
        j["pairs"].push_back(
            {{"a", {{"row", pair.a.pos.row}, {"col", pair.a.pos.col}}},
             {"b", {{"row", pair.b.pos.row}, {"col", pair.b.pos.col}}},
             {"distance", pair.distance},
             {"phase", pair.phase == MatchPhase::windowed ? "windowed" : "global"}});
    }

    j["unmatched"] = nlohmann::json::array();
    for (const Endpoint& e : report.match.unmatched)
        j["unmatched"].push_back({{"row", e.pos.row}, {"col", e.pos.col}});

    j["paths"] = nlohmann::json::array();
    for (std::size_t n : report.path_pixel_counts)
        j["paths"].push_back({{"pixel_count", n}});

    j["endpoints_before"] = report.endpoints_before;
    j["endpoints_after"] = report.endpoints_after;

    if (include_timings) {
        j["timings_ms"] = nlohmann::json::object();
        for (const auto& [name, ms] : report.timings_ms) j["timings_ms"][name] = ms;
    }
    return j;
}

GrayImage render_overlay(const BinaryImage& skeleton, const PipelineResult& result) {
    GrayImage out(skeleton.width(), skeleton.height(), 255);
    for (const Endpoint& e : result.report.endpoints)
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc)
                if (out.in_bounds(e.pos.row + dr, e.pos.col + dc))
                    out.set(e.pos.row + dr, e.pos.col + dc, 160);
    for (int r = 0; r < skeleton.height(); ++r)
        for (int c = 0; c < skeleton.width(); ++c)
            if (skeleton.at(r, c)) out.set(r, c, 80);
    for (const ReconnectionPath& path : result.paths)
        for (PixelCoord p : path.pixels)
            if (out.in_bounds(p.row, p.col)) out.set(p, 0);
    return out;
}

} // namespace cmend
