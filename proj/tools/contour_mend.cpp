#include "cmend/glyphs.hpp"
#include "cmend/harness.hpp"
#include "cmend/netpbm.hpp"
#include "cmend/pipeline.hpp"
#include "cmend/preprocess.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using nlohmann::json;

// ---- configuration layering: defaults < config file < explicit flags ------

struct PipelineFlags {
    std::string config_path;
    int threshold = 0;
    int median_passes = 1;
    int window = 11;
    double max_gap = 80.0;
    int tail_k = 5;
    double sample_step = 0.5;
    double tie_epsilon = 1e-6;

    CLI::Option* o_threshold = nullptr;
    CLI::Option* o_median = nullptr;
    CLI::Option* o_window = nullptr;
    CLI::Option* o_max_gap = nullptr;
    CLI::Option* o_tail_k = nullptr;
    CLI::Option* o_step = nullptr;
    CLI::Option* o_tie = nullptr;
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f) {
    cmd->add_option("--config", f.config_path,
                    "key=value config file (otherwise $CONTOUR_MEND_CONFIG if set)");
    f.o_threshold =
        cmd->add_option("--threshold", f.threshold, "fixed binarization threshold (default auto)");
    f.o_median = cmd->add_option("--median-passes", f.median_passes, "3x3 median filter passes");
    f.o_window = cmd->add_option("--window", f.window, "windowed matching side length (odd)");
    f.o_max_gap = cmd->add_option("--max-gap", f.max_gap, "global matching distance ceiling");
    f.o_tail_k = cmd->add_option("--tail-k", f.tail_k, "tail pixels used for tangents");
    f.o_step = cmd->add_option("--sample-step", f.sample_step, "spline sampling step");
    f.o_tie = cmd->add_option("--tie-epsilon", f.tie_epsilon, "distance tie tolerance");
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

void apply_config_file(cmend::PipelineConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cmend::IoError("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::string text = trim(line);
        if (text.empty()) continue;
        auto eq = text.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        std::string key = trim(text.substr(0, eq));
        std::string value = trim(text.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        try {
            if (key == "threshold") {
                if (value == "auto")
                    cfg.threshold.reset();
                else
                    cfg.threshold = std::stoi(value);
            } else if (key == "median_passes") {
                cfg.median_passes = std::stoi(value);
            } else if (key == "window") {
                cfg.window = std::stoi(value);
            } else if (key == "max_gap") {
                cfg.max_gap = std::stod(value);
            } else if (key == "tail_k") {
                cfg.tail_k = std::stoi(value);
            } else if (key == "sample_step") {
                cfg.sample_step = std::stod(value);
            } else if (key == "tie_epsilon") {
                cfg.tie_epsilon = std::stod(value);
            } else {
                throw std::invalid_argument("unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
}

cmend::PipelineConfig resolve_config(const PipelineFlags& f) {
    cmend::PipelineConfig cfg;
    std::string path = f.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("CONTOUR_MEND_CONFIG")) path = env;
    }
    if (!path.empty()) apply_config_file(cfg, path);
    if (f.o_threshold->count()) cfg.threshold = f.threshold;
    if (f.o_median->count()) cfg.median_passes = f.median_passes;
    if (f.o_window->count()) cfg.window = f.window;
    if (f.o_max_gap->count()) cfg.max_gap = f.max_gap;
    if (f.o_tail_k->count()) cfg.tail_k = f.tail_k;
    if (f.o_step->count()) cfg.sample_step = f.sample_step;
    if (f.o_tie->count()) cfg.tie_epsilon = f.tie_epsilon;
    return cfg;
}

void emit_json(const json& j, const std::string& path) {
    std::string text = j.dump(2) + "\n";
    if (path.empty())
        std::cout << text;
    else
        cmend::write_file(path, text);
}

json endpoint_json(const cmend::Endpoint& e) {
    return {{"row", e.pos.row},      {"col", e.pos.col},
            {"gx", e.gx},            {"gy", e.gy},
            {"direction", e.direction_deg}, {"dir_class", e.dir_class},
            {"contour_id", e.contour_id}};
}

struct SkeletonAnalysis {
    cmend::EndpointAnnotation annotation;
    cmend::MatchResult match;
};

SkeletonAnalysis analyze_skeleton(const cmend::BinaryImage& skeleton,
                                  const cmend::PipelineConfig& cfg) {
    SkeletonAnalysis out;
    auto coords = cmend::detect_endpoints(skeleton);
    auto labels = cmend::label_components(skeleton);
    out.annotation = cmend::annotate_endpoints(skeleton, coords, labels);
    cmend::MatchConfig mc;
    mc.window = cfg.window;
    mc.max_gap = cfg.max_gap;
    mc.tie_epsilon = cfg.tie_epsilon;
    out.match = cmend::match_endpoints(out.annotation.endpoints, mc);
    return out;
}

json match_json(const SkeletonAnalysis& a) {
    json j;
    j["endpoints"] = json::array();
    for (const auto& e : a.annotation.endpoints) j["endpoints"].push_back(endpoint_json(e));
    j["excluded_endpoints"] = json::array();
    for (auto p : a.annotation.excluded)
        j["excluded_endpoints"].push_back({{"row", p.row}, {"col", p.col}});
    j["pairs"] = json::array();
    for (const auto& pair : a.match.pairs) {
        j["pairs"].push_back(
            {{"a", {{"row", pair.a.pos.row}, {"col", pair.a.pos.col}}},
             {"b", {{"row", pair.b.pos.row}, {"col", pair.b.pos.col}}},
             {"distance", pair.distance},
             {"phase", pair.phase == cmend::MatchPhase::windowed ? "windowed" : "global"}});
    }
    j["unmatched"] = json::array();
    for (const auto& e : a.match.unmatched)
        j["unmatched"].push_back({{"row", e.pos.row}, {"col", e.pos.col}});
    return j;
}

cmend::GenOptions gen_options_from(const json& params) {
    cmend::GenOptions opts;
    opts.stroke_px = params.at("stroke").get<int>();
    opts.noise_density = params.at("noise_density").get<double>();
    return opts;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"contour-mend: reconstruct broken contour lines in scanned raster maps"};
    app.require_subcommand(1);

    // -- pipeline -------------------------------------------------------
    auto* cmd_pipeline = app.add_subcommand("pipeline", "full reconstruction run on a PGM scan");
    std::string pl_input, pl_output, pl_report, pl_overlay, pl_dump;
    bool pl_timings = false;
    PipelineFlags pl_flags;
    cmd_pipeline->add_option("--input", pl_input, "input PGM scan")->required();
    cmd_pipeline->add_option("--output", pl_output, "output PBM with reconstructed skeleton");
    cmd_pipeline->add_option("--report", pl_report, "write the JSON run report here");
    cmd_pipeline->add_option("--overlay", pl_overlay, "write a PGM debug overlay here");
    cmd_pipeline->add_option("--dump-stages", pl_dump, "prefix for per-stage PBM dumps");
    cmd_pipeline->add_flag("--timings", pl_timings, "include stage timings in the report");
    add_pipeline_flags(cmd_pipeline, pl_flags);

    // -- threshold ------------------------------------------------------
    auto* cmd_threshold = app.add_subcommand("threshold", "binarize a PGM scan");
    std::string th_input, th_output;
    PipelineFlags th_flags;
    cmd_threshold->add_option("--input", th_input, "input PGM")->required();
    cmd_threshold->add_option("--output", th_output, "output PBM")->required();
    add_pipeline_flags(cmd_threshold, th_flags);

    // -- thin -----------------------------------------------------------
    auto* cmd_thin = app.add_subcommand("thin", "thin a binary image to a skeleton");
    std::string tn_input, tn_output;
    cmd_thin->add_option("--input", tn_input, "input PBM")->required();
    cmd_thin->add_option("--output", tn_output, "output PBM")->required();

    // -- endpoints ------------------------------------------------------
    auto* cmd_endpoints = app.add_subcommand("endpoints", "detect and annotate skeleton endpoints");
    std::string ep_input, ep_json;
    cmd_endpoints->add_option("--input", ep_input, "input skeleton PBM")->required();
    cmd_endpoints->add_option("--json", ep_json, "write endpoint JSON here (default stdout)");

    // -- match ----------------------------------------------------------
    auto* cmd_match = app.add_subcommand("match", "pair up broken endpoints on a skeleton");
    std::string ma_input, ma_json;
    PipelineFlags ma_flags;
    cmd_match->add_option("--input", ma_input, "input skeleton PBM")->required();
    cmd_match->add_option("--json", ma_json, "write match JSON here (default stdout)");
    add_pipeline_flags(cmd_match, ma_flags);

    // -- reconnect ------------------------------------------------------
    auto* cmd_reconnect =
        app.add_subcommand("reconnect", "match endpoints and bridge them on a skeleton");
    std::string rc_input, rc_output, rc_json;
    PipelineFlags rc_flags;
    cmd_reconnect->add_option("--input", rc_input, "input skeleton PBM")->required();
    cmd_reconnect->add_option("--output", rc_output, "output PBM with bridges")->required();
    cmd_reconnect->add_option("--json", rc_json, "write match/path JSON here");
    add_pipeline_flags(cmd_reconnect, rc_flags);

    // -- glyph ----------------------------------------------------------
    auto* cmd_glyph = app.add_subcommand("glyph", "classify a digit glyph");
    std::string gl_input, gl_json, gl_templates;
    cmd_glyph->add_option("--input", gl_input, "input glyph PBM")->required();
    cmd_glyph->add_option("--templates", gl_templates, "template override file");
    cmd_glyph->add_option("--json", gl_json, "write classification JSON here (default stdout)");

    // -- synth ----------------------------------------------------------
    auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic contour-map corpus");
    std::uint64_t sy_seed = 1;
    int sy_count = 1, sy_contours = 3, sy_size = 512, sy_stroke = 2, sy_gaps = 0, sy_gap_len = 10;
    double sy_noise = 0.005;
    std::string sy_dir = ".", sy_manifest;
    cmd_synth->add_option("--seed", sy_seed, "seed of the first map");
    cmd_synth->add_option("--count", sy_count, "number of maps (seeds count up from --seed)");
    cmd_synth->add_option("--contours", sy_contours, "contours per map");
    cmd_synth->add_option("--size", sy_size, "image side length");
    cmd_synth->add_option("--stroke", sy_stroke, "stroke width in pixels (1 or 2)");
    cmd_synth->add_option("--noise", sy_noise, "salt-and-pepper density");
    cmd_synth->add_option("--gaps", sy_gaps, "gaps to break into each map");
    cmd_synth->add_option("--gap-len", sy_gap_len, "gap length in chain pixels");
    cmd_synth->add_option("--out-dir", sy_dir, "directory for the PGM files");
    cmd_synth->add_option("--manifest", sy_manifest, "write the corpus manifest here");

    // -- eval -----------------------------------------------------------
    auto* cmd_eval = app.add_subcommand("eval", "score pipeline runs over a synthetic corpus");
    std::string ev_manifest, ev_json;
    PipelineFlags ev_flags;
    cmd_eval->add_option("--corpus", ev_manifest, "corpus manifest from synth")->required();
    cmd_eval->add_option("--json", ev_json, "write metrics JSON here (default stdout)");
    add_pipeline_flags(cmd_eval, ev_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_pipeline) {
            auto cfg = resolve_config(pl_flags);
            auto input = cmend::load_pgm(pl_input);
            auto result = cmend::run_pipeline(input, cfg);
            if (!pl_output.empty()) cmend::save_pbm(pl_output, result.stages.reconnected);
            if (!pl_dump.empty()) {
                cmend::save_pbm(pl_dump + "_01_binary.pbm", result.stages.binary);
                cmend::save_pbm(pl_dump + "_02_filtered.pbm", result.stages.filtered);
                cmend::save_pbm(pl_dump + "_03_thinned.pbm", result.stages.thinned);
                cmend::save_pbm(pl_dump + "_04_uncrossed.pbm", result.stages.uncrossed);
                cmend::save_pbm(pl_dump + "_05_reconnected.pbm", result.stages.reconnected);
            }
            if (!pl_overlay.empty())
                cmend::save_pgm(pl_overlay, cmend::render_overlay(result.stages.uncrossed, result));
            if (!pl_report.empty())
                emit_json(cmend::report_json(result.report, pl_timings), pl_report);
        } else if (*cmd_threshold) {
            auto cfg = resolve_config(th_flags);
            auto input = cmend::load_pgm(th_input);
            int level = cfg.threshold ? *cfg.threshold
                                      : cmend::spread_midpoint(cmend::histogram(input)).midpoint;
            cmend::save_pbm(th_output, cmend::threshold(input, level));
        } else if (*cmd_thin) {
            cmend::save_pbm(tn_output, cmend::zhang_suen_thin(cmend::load_pbm(tn_input)));
        } else if (*cmd_endpoints) {
            auto skeleton = cmend::load_pbm(ep_input);
            auto coords = cmend::detect_endpoints(skeleton);
            auto labels = cmend::label_components(skeleton);
            auto ann = cmend::annotate_endpoints(skeleton, coords, labels);
            json j;
            j["endpoints"] = json::array();
            for (const auto& e : ann.endpoints) j["endpoints"].push_back(endpoint_json(e));
            j["excluded_endpoints"] = json::array();
            for (auto p : ann.excluded)
                j["excluded_endpoints"].push_back({{"row", p.row}, {"col", p.col}});
            emit_json(j, ep_json);
        } else if (*cmd_match) {
            auto cfg = resolve_config(ma_flags);
            auto skeleton = cmend::load_pbm(ma_input);
            emit_json(match_json(analyze_skeleton(skeleton, cfg)), ma_json);
        } else if (*cmd_reconnect) {
            auto cfg = resolve_config(rc_flags);
            auto skeleton = cmend::load_pbm(rc_input);
            auto analysis = analyze_skeleton(skeleton, cfg);
            std::vector<cmend::ReconnectionPath> paths;
            for (const auto& pair : analysis.match.pairs) {
                auto ta = cmend::trace_tail(skeleton, pair.a.pos, cfg.tail_k);
                auto tb = cmend::trace_tail(skeleton, pair.b.pos, cfg.tail_k);
                paths.push_back(cmend::build_path(pair, ta, tb, cfg.sample_step));
            }
            cmend::save_pbm(rc_output, cmend::apply_reconnection(skeleton, paths));
            if (!rc_json.empty()) {
                json j = match_json(analysis);
                j["paths"] = json::array();
                for (const auto& p : paths) j["paths"].push_back({{"pixel_count", p.pixels.size()}});
                emit_json(j, rc_json);
            }
        } else if (*cmd_glyph) {
            auto glyph = cmend::load_pbm(gl_input);
            auto profile = cmend::zone_features(glyph);
            std::vector<cmend::DigitTemplate> templates;
            if (!gl_templates.empty()) {
                std::ifstream in(gl_templates);
                if (!in) throw cmend::IoError("cannot open template file: " + gl_templates);
                templates = cmend::load_templates(in);
            } else {
                templates = cmend::builtin_templates();
            }
            auto cls = cmend::classify_digit(profile, templates);
            json j;
            j["digit"] = cls.digit;
            j["score"] = cls.score;
            j["zones"] = profile.counts;
            emit_json(j, gl_json);
        } else if (*cmd_synth) {
            cmend::GenOptions opts;
            opts.stroke_px = sy_stroke;
            opts.noise_density = sy_noise;
            std::filesystem::create_directories(sy_dir);
            json manifest = json::array();
            for (int i = 0; i < sy_count; ++i) {
                std::uint64_t seed = sy_seed + static_cast<std::uint64_t>(i);
                auto map = cmend::generate_map(seed, sy_contours, sy_size, opts);
                std::string base = "map_" + std::to_string(seed);
                std::string image_name = base + ".pgm";
                cmend::save_pgm((std::filesystem::path(sy_dir) / image_name).string(), map.image);
                json entry;
                entry["seed"] = seed;
                entry["params"] = {{"contours", sy_contours}, {"size", sy_size},
                                   {"stroke", sy_stroke},     {"noise_density", sy_noise},
                                   {"gaps", sy_gaps},         {"gap_len", sy_gap_len}};
                entry["image"] = image_name;
                if (sy_gaps > 0) {
                    auto broken = cmend::inject_gaps(map, sy_gaps, sy_gap_len, seed);
                    std::string broken_name = base + "_broken.pgm";
                    cmend::save_pgm((std::filesystem::path(sy_dir) / broken_name).string(),
                                    broken.image);
                    entry["broken_image"] = broken_name;
                    entry["records"] = json::array();
                    for (const auto& rec : broken.records) {
                        json r;
                        r["curve"] = rec.curve_index;
                        r["end_a"] = {{"row", rec.end_a.row}, {"col", rec.end_a.col}};
                        r["end_b"] = {{"row", rec.end_b.row}, {"col", rec.end_b.col}};
                        r["erased"] = json::array();
                        for (auto px : rec.erased) r["erased"].push_back({px.row, px.col});
                        entry["records"].push_back(r);
                    }
                }
                manifest.push_back(entry);
            }
            emit_json(manifest, sy_manifest);
        } else if (*cmd_eval) {
            auto cfg = resolve_config(ev_flags);
            json manifest = json::parse(cmend::read_file(ev_manifest));
            if (!manifest.is_array())
                throw std::invalid_argument("corpus manifest must be a JSON array");
            auto dir = std::filesystem::path(ev_manifest).parent_path();
            json per_map = json::array();
            long total_records = 0, total_matched = 0, total_closed = 0;
            double deviation_weighted = 0.0, max_deviation = 0.0;
            for (const json& entry : manifest) {
                std::uint64_t seed = entry.at("seed").get<std::uint64_t>();
                const json& params = entry.at("params");
                auto map = cmend::generate_map(seed, params.at("contours").get<int>(),
                                               params.at("size").get<int>(),
                                               gen_options_from(params));
                std::string image_name = entry.contains("broken_image")
                                             ? entry.at("broken_image").get<std::string>()
                                             : entry.at("image").get<std::string>();
                auto scan = cmend::load_pgm((dir / image_name).string());
                auto result = cmend::run_pipeline(scan, cfg);
                std::vector<cmend::GapRecord> records;
                if (entry.contains("records")) {
                    for (const json& r : entry.at("records")) {
                        cmend::GapRecord rec;
                        rec.curve_index = r.at("curve").get<int>();
                        rec.end_a = {r.at("end_a").at("row").get<int>(),
                                     r.at("end_a").at("col").get<int>()};
                        rec.end_b = {r.at("end_b").at("row").get<int>(),
                                     r.at("end_b").at("col").get<int>()};
                        for (const json& px : r.at("erased"))
                            rec.erased.push_back({px.at(0).get<int>(), px.at(1).get<int>()});
                        records.push_back(std::move(rec));
                    }
                }
                auto metrics = cmend::evaluate(records, result.report.match.pairs, result.paths,
                                               map.truth_curves);
                long n = static_cast<long>(records.size());
                total_records += n;
                total_matched += std::lround(metrics.pairing_accuracy * n);
                total_closed += metrics.gaps_closed;
                deviation_weighted += metrics.mean_deviation * metrics.gaps_closed;
                max_deviation = std::max(max_deviation, metrics.max_deviation);
                per_map.push_back({{"seed", seed},
                                   {"records", n},
                                   {"pairing_accuracy", metrics.pairing_accuracy},
                                   {"mean_deviation", metrics.mean_deviation},
                                   {"max_deviation", metrics.max_deviation},
                                   {"gaps_closed", metrics.gaps_closed}});
            }
            json j;
            j["maps"] = manifest.size();
            j["records"] = total_records;
            j["pairing_accuracy"] =
                total_records ? static_cast<double>(total_matched) / total_records : 1.0;
            j["mean_deviation"] = total_closed ? deviation_weighted / total_closed : 0.0;
            j["max_deviation"] = max_deviation;
            j["gaps_closed"] = total_closed;
            j["per_map"] = per_map;
            emit_json(j, ev_json);
        }
    } catch (const cmend::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const cmend::PnmError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
