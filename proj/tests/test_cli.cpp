#include <doctest.h>

#include "cmend/glyphs.hpp"
#include "cmend/netpbm.hpp"
#include "cmend/raster.hpp"
#include "cmend/skeleton.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

using namespace cmend;
namespace fs = std::filesystem;

namespace {

// Each test gets its own scratch directory under the system temp root and
// cleans up after itself.
struct TempDir {
    fs::path dir;

    explicit TempDir(const std::string& tag) {
        dir = fs::temp_directory_path() /
              ("cmend_cli_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }
};

// Runs the installed binary through the shell and decodes its exit status.
int run_cli(const std::string& args, const std::string& env_prefix = "") {
    std::string cmd = env_prefix + std::string(CONTOUR_MEND_BIN) + " " + args +
                      " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

nlohmann::json read_json(const std::string& path) {
    return nlohmann::json::parse(read_file(path));
}

// One-pixel stroke on row 60 with cols 61..70 missing; see the pipeline tests.
void write_broken_stroke(const std::string& path) {
    GrayImage img(160, 128, 240);
    for (int c = 20; c <= 60; ++c) img.set(60, c, 30);
    for (int c = 71; c <= 111; ++c) img.set(60, c, 30);
    save_pgm(path, img);
}

// Four-intensity quadrant card: 30 | 120 / 180 | 250, eight pixels of each.
// Distinct threshold levels produce distinct foreground counts:
//   auto midpoint (30+250)/2 = 140 -> 16, level 100 -> 8, level 200 -> 24,
//   level 25 -> 0.
void write_quadrant_card(const std::string& path) {
    GrayImage img(8, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 8; ++c) {
            int v = r < 2 ? (c < 4 ? 30 : 120) : (c < 4 ? 180 : 250);
            img.set(r, c, static_cast<std::uint8_t>(v));
        }
    save_pgm(path, img);
}

std::size_t foreground_of(const std::string& pbm_path) {
    return load_pbm(pbm_path).foreground_count();
}

} // namespace

TEST_CASE("cli: missing input file exits with the I/O code") {
    TempDir tmp("missing");
    CHECK(run_cli("pipeline --input " + tmp.path("absent.pgm")) == 2);
    CHECK(run_cli("thin --input " + tmp.path("absent.pbm") + " --output " +
                  tmp.path("out.pbm")) == 2);
}

TEST_CASE("cli: malformed image exits with the format code") {
    TempDir tmp("malformed");
    write_file(tmp.path("bad.pgm"), "P5\n-3 2\n255\nxxxxxx");
    CHECK(run_cli("pipeline --input " + tmp.path("bad.pgm")) == 3);

    write_file(tmp.path("not_even.pgm"), "hello world\n");
    CHECK(run_cli("pipeline --input " + tmp.path("not_even.pgm")) == 3);
}

TEST_CASE("cli: argument parse failures are nonzero") {
    TempDir tmp("parse");
    // Missing required --input.
    CHECK(run_cli("pipeline") != 0);
    // Unknown subcommand.
    CHECK(run_cli("frobnicate") != 0);
}

TEST_CASE("cli: pipeline run produces report, output, overlay and stage dumps") {
    TempDir tmp("pipeline");
    write_broken_stroke(tmp.path("scan.pgm"));

    int rc = run_cli("pipeline --input " + tmp.path("scan.pgm") +
                     " --output " + tmp.path("mended.pbm") +
                     " --report " + tmp.path("report.json") +
                     " --overlay " + tmp.path("overlay.pgm") +
                     " --dump-stages " + tmp.path("stage") +
                     " --timings --median-passes 0");
    REQUIRE(rc == 0);

    nlohmann::json report = read_json(tmp.path("report.json"));
    CHECK(report["version"] == 1);
    CHECK(report["endpoints_before"] == 4);
    CHECK(report["pairs"].size() == 1);
    CHECK(report["endpoints_after"] == 2);
    CHECK(report.contains("timings_ms"));

    BinaryImage mended = load_pbm(tmp.path("mended.pbm"));
    CHECK(mended.foreground_count() >= 92); // 82 surviving + 10-column bridge
    CHECK(label_components(mended).count == 1);

    GrayImage overlay = load_pgm(tmp.path("overlay.pgm"));
    CHECK(overlay.width() == 160);
    CHECK(overlay.height() == 128);

    for (const char* stage : {"_01_binary.pbm", "_02_filtered.pbm", "_03_thinned.pbm",
                              "_04_uncrossed.pbm", "_05_reconnected.pbm"})
        CHECK(load_pbm(tmp.path("stage") + stage).foreground_count() > 0);
}

TEST_CASE("cli: pipeline reruns write byte-identical artifacts") {
    TempDir tmp("determinism");
    write_broken_stroke(tmp.path("scan.pgm"));

    for (int run = 1; run <= 2; ++run) {
        std::string n = std::to_string(run);
        REQUIRE(run_cli("pipeline --input " + tmp.path("scan.pgm") +
                        " --output " + tmp.path("out" + n + ".pbm") +
                        " --report " + tmp.path("report" + n + ".json") +
                        " --median-passes 0") == 0);
    }
    CHECK(read_file(tmp.path("out1.pbm")) == read_file(tmp.path("out2.pbm")));
    CHECK(read_file(tmp.path("report1.json")) == read_file(tmp.path("report2.json")));
}

TEST_CASE("cli: configuration layers resolve as defaults, file, then flags") {
    TempDir tmp("config");
    write_quadrant_card(tmp.path("card.pgm"));
    write_file(tmp.path("level100.cfg"), "# fixed level\nthreshold = 100\n");
    write_file(tmp.path("level25.cfg"), "threshold=25\n");

    std::string base = "threshold --input " + tmp.path("card.pgm") + " --output ";

    // Defaults: automatic midpoint of the occupied range.
    REQUIRE(run_cli(base + tmp.path("auto.pbm")) == 0);
    CHECK(foreground_of(tmp.path("auto.pbm")) == 16);

    // Config file overrides the default.
    REQUIRE(run_cli(base + tmp.path("file.pbm") + " --config " +
                    tmp.path("level100.cfg")) == 0);
    CHECK(foreground_of(tmp.path("file.pbm")) == 8);

    // An explicit flag beats the config file.
    REQUIRE(run_cli(base + tmp.path("flag.pbm") + " --config " +
                    tmp.path("level100.cfg") + " --threshold 200") == 0);
    CHECK(foreground_of(tmp.path("flag.pbm")) == 24);

    // The environment variable stands in for --config ...
    REQUIRE(run_cli(base + tmp.path("env.pbm"),
                    "CONTOUR_MEND_CONFIG=" + tmp.path("level100.cfg") + " ") == 0);
    CHECK(foreground_of(tmp.path("env.pbm")) == 8);

    // ... but an explicit --config beats the environment.
    REQUIRE(run_cli(base + tmp.path("both.pbm") + " --config " + tmp.path("level25.cfg"),
                    "CONTOUR_MEND_CONFIG=" + tmp.path("level100.cfg") + " ") == 0);
    CHECK(foreground_of(tmp.path("both.pbm")) == 0);

    // A config file back to auto matches the defaults.
    write_file(tmp.path("auto.cfg"), "threshold=auto\n");
    REQUIRE(run_cli(base + tmp.path("auto2.pbm") + " --config " +
                    tmp.path("auto.cfg")) == 0);
    CHECK(foreground_of(tmp.path("auto2.pbm")) == 16);
}

TEST_CASE("cli: malformed config files are rejected") {
    TempDir tmp("badcfg");
    write_quadrant_card(tmp.path("card.pgm"));
    std::string base = "threshold --input " + tmp.path("card.pgm") + " --output " +
                       tmp.path("out.pbm") + " --config ";

    write_file(tmp.path("nokey.cfg"), "just words\n");
    CHECK(run_cli(base + tmp.path("nokey.cfg")) == 3);

    write_file(tmp.path("unknown.cfg"), "bogus=5\n");
    CHECK(run_cli(base + tmp.path("unknown.cfg")) == 3);

    CHECK(run_cli(base + tmp.path("absent.cfg")) == 2);
}

TEST_CASE("cli: stage subcommands chain into a full reconstruction") {
    TempDir tmp("stages");
    write_broken_stroke(tmp.path("scan.pgm"));

    REQUIRE(run_cli("threshold --input " + tmp.path("scan.pgm") + " --output " +
                    tmp.path("binary.pbm")) == 0);
    REQUIRE(run_cli("thin --input " + tmp.path("binary.pbm") + " --output " +
                    tmp.path("skeleton.pbm")) == 0);

    REQUIRE(run_cli("endpoints --input " + tmp.path("skeleton.pbm") + " --json " +
                    tmp.path("endpoints.json")) == 0);
    nlohmann::json eps = read_json(tmp.path("endpoints.json"));
    CHECK(eps["endpoints"].size() == 4);
    CHECK(eps["excluded_endpoints"].empty());

    REQUIRE(run_cli("match --input " + tmp.path("skeleton.pbm") + " --json " +
                    tmp.path("match.json")) == 0);
    nlohmann::json match = read_json(tmp.path("match.json"));
    REQUIRE(match["pairs"].size() == 1);
    CHECK(match["pairs"][0]["phase"] == "global");
    CHECK(match["unmatched"].size() == 2);

    REQUIRE(run_cli("reconnect --input " + tmp.path("skeleton.pbm") + " --output " +
                    tmp.path("mended.pbm") + " --json " + tmp.path("reconnect.json")) == 0);
    CHECK(label_components(load_pbm(tmp.path("mended.pbm"))).count == 1);
    nlohmann::json rec = read_json(tmp.path("reconnect.json"));
    REQUIRE(rec["paths"].size() == 1);
    CHECK(rec["paths"][0]["pixel_count"].get<std::size_t>() >= 10);
}

TEST_CASE("cli: synth writes a reproducible corpus with manifest") {
    TempDir a("syntha");
    TempDir b("synthb");
    std::string args = "synth --seed 7 --count 2 --contours 2 --size 192 --stroke 1"
                       " --noise 0.004 --gaps 1 --gap-len 8";

    REQUIRE(run_cli(args + " --out-dir " + a.dir.string() + " --manifest " +
                    a.path("manifest.json")) == 0);
    REQUIRE(run_cli(args + " --out-dir " + b.dir.string() + " --manifest " +
                    b.path("manifest.json")) == 0);

    // Same seeds, same bytes -- manifests carry only directory-relative names.
    CHECK(read_file(a.path("manifest.json")) == read_file(b.path("manifest.json")));
    CHECK(read_file(a.path("map_7.pgm")) == read_file(b.path("map_7.pgm")));
    CHECK(read_file(a.path("map_7_broken.pgm")) == read_file(b.path("map_7_broken.pgm")));
    CHECK(read_file(a.path("map_8.pgm")) == read_file(b.path("map_8.pgm")));

    nlohmann::json manifest = read_json(a.path("manifest.json"));
    REQUIRE(manifest.is_array());
    REQUIRE(manifest.size() == 2);
    for (const auto& entry : manifest) {
        CHECK(entry["params"]["size"] == 192);
        CHECK(entry["records"].size() == 1);
        const auto& rec = entry["records"][0];
        CHECK(rec.contains("curve"));
        CHECK(rec["erased"].size() == 8);
    }

    GrayImage intact = load_pgm(a.path("map_7.pgm"));
    GrayImage broken = load_pgm(a.path("map_7_broken.pgm"));
    CHECK(intact.width() == 192);
    CHECK(intact.pixels() != broken.pixels());
}

TEST_CASE("cli: eval scores a corpus end to end") {
    TempDir tmp("eval");
    REQUIRE(run_cli("synth --seed 11 --count 2 --contours 2 --size 192 --stroke 1"
                    " --noise 0.004 --gaps 1 --gap-len 8 --out-dir " +
                    tmp.dir.string() + " --manifest " + tmp.path("manifest.json")) == 0);

    REQUIRE(run_cli("eval --corpus " + tmp.path("manifest.json") + " --median-passes 0"
                    " --json " + tmp.path("metrics.json")) == 0);

    nlohmann::json metrics = read_json(tmp.path("metrics.json"));
    CHECK(metrics["maps"] == 2);
    CHECK(metrics["records"] == 2);
    double accuracy = metrics["pairing_accuracy"].get<double>();
    CHECK(accuracy >= 0.0);
    CHECK(accuracy <= 1.0);
    CHECK(metrics["gaps_closed"].get<int>() >= 0);
    CHECK(metrics["per_map"].size() == 2);
    CHECK(metrics["max_deviation"].get<double>() >= 0.0);
}

TEST_CASE("cli: glyph subcommand classifies rendered digits") {
    TempDir tmp("glyph");
    for (int digit : {0, 3, 8}) {
        std::string name = "digit" + std::to_string(digit);
        save_pbm(tmp.path(name + ".pbm"), render_digit(digit));
        REQUIRE(run_cli("glyph --input " + tmp.path(name + ".pbm") + " --json " +
                        tmp.path(name + ".json")) == 0);
        nlohmann::json j = read_json(tmp.path(name + ".json"));
        CHECK(j["digit"] == digit);
        CHECK(j["score"].get<double>() == 0.0);
        CHECK(j["zones"].size() == 9);
    }
}
