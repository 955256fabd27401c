#pragma once

#include "cmend/matcher.hpp"
#include "cmend/raster.hpp"
#include "cmend/reconnect.hpp"
#include "cmend/skeleton.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cmend {

struct PipelineConfig {
    std::optional<int> threshold;  // empty: midpoint of the occupied intensity range
    int median_passes = 1;
    int window = 11;
    double max_gap = 80.0;
    int tail_k = 5;
    double sample_step = 0.5;
    double tie_epsilon = 1e-6;
};

// Everything needed to reconstruct how the run made its decisions.
struct RunReport {
    int threshold_used = 0;
    std::vector<PixelCoord> crossed_removed;
    std::vector<Endpoint> endpoints;
    std::vector<PixelCoord> excluded_endpoints;
    MatchResult match;
    std::vector<std::size_t> path_pixel_counts;
    int endpoints_before = 0;
    int endpoints_after = 0;
    std::map<std::string, double> timings_ms;
};

struct StageImages {
    BinaryImage binary;
    BinaryImage filtered;
    BinaryImage thinned;
    BinaryImage uncrossed;
    BinaryImage reconnected;
};

struct PipelineResult {
    RunReport report;
    StageImages stages;
    std::vector<ReconnectionPath> paths;
};

// threshold -> median passes -> thinning -> crossed-point removal -> endpoint
// detection/annotation -> two-phase matching -> spline bridges -> overlay.
PipelineResult run_pipeline(const GrayImage& input, const PipelineConfig& cfg = {});

// JSON form of the report. Timings vary run to run, so they are included only
// on request; everything else is byte-stable for identical inputs.
nlohmann::json report_json(const RunReport& report, bool include_timings = false);

// Debug rendering: surviving ink mid-gray, reconstructed bridges black,
// endpoints boxed, on a white ground.
GrayImage render_overlay(const BinaryImage& skeleton, const PipelineResult& result);

} // namespace cmend
