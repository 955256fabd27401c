#include "cmend/glyphs.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace cmend {

namespace {

// 5x7 bitmap digits, '#' = ink.
constexpr const char* kDigitRows[10][7] = {
    {".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."}, // 0
    {"..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."}, // 1
    {".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"}, // 2
    {".###.", "#...#", "....#", "..##.", "....#", "#...#", ".###."}, // 3
    {"...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."}, // 4
    {"#####", "#....", "####.", "....#", "....#", "#...#", ".###."}, // 5
    {"..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."}, // 6
    {"#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."}, // 7
    {".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."}, // 8
    {".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."}, // 9
};

int band_of(int index, int dim) {
    int base = dim / 3;
    if (index < base) return 0;
    if (index < 2 * base) return 1;
    return 2;
}

} // namespace

ZoneProfile zone_features(const BinaryImage& glyph) {
    if (glyph.width() < 3 || glyph.height() < 3)
        throw std::invalid_argument("zone_features: glyph box must be at least 3x3");
    ZoneProfile profile;
    for (int r = 0; r < glyph.height(); ++r)
        for (int c = 0; c < glyph.width(); ++c)
            if (glyph.at(r, c))
                ++profile.counts[band_of(r, glyph.height()) * 3 + band_of(c, glyph.width())];
    int total = profile.total();
    if (total > 0)
        for (int z = 0; z < 9; ++z)
            profile.normalized[z] = static_cast<double>(profile.counts[z]) / total;
    return profile;
}

Classification classify_digit(const ZoneProfile& profile,
                              const std::vector<DigitTemplate>& templates) {
    if (templates.empty())
        throw std::invalid_argument("classify_digit: no templates");
    if (profile.total() == 0)
        throw std::invalid_argument("classify_digit: blank glyph");
    Classification best;
    for (const DigitTemplate& t : templates) {
        double score = 0.0;
        for (int z = 0; z < 9; ++z)
            score += std::fabs(profile.normalized[z] - t.profile.normalized[z]);
        if (best.digit < 0 || score < best.score ||
            (score == best.score && t.digit < best.digit)) {
            best.digit = t.digit;
            best.score = score;
        }
    }
    return best;
}

BinaryImage render_digit(int digit) {
    if (digit < 0 || digit > 9)
        throw std::invalid_argument("render_digit: digit must be in [0, 9]");
    BinaryImage img(5, 7);
    for (int r = 0; r < 7; ++r)
        for (int c = 0; c < 5; ++c)
            if (kDigitRows[digit][r][c] == '#') img.set(r, c, 1);
    return img;
}

const std::vector<DigitTemplate>& builtin_templates() {
    static const std::vector<DigitTemplate> templates = [] {
        std::vector<DigitTemplate> out;
        for (int d = 0; d <= 9; ++d)
            out.push_back({d, zone_features(render_digit(d))});
        return out;
    }();
    return templates;
}

std::vector<DigitTemplate> load_templates(std::istream& in) {
    std::vector<DigitTemplate> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = line;
        if (auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
        std::istringstream row{std::string(sv)};
        int digit;
        if (!(row >> digit)) continue; // blank or comment-only line
        if (digit < 0 || digit > 9)
            throw std::invalid_argument("load_templates: digit out of range at line " +
                                        std::to_string(lineno));
        for (const DigitTemplate& t : out)
            if (t.digit == digit)
                throw std::invalid_argument("load_templates: duplicate digit at line " +
                                            std::to_string(lineno));
        DigitTemplate t;
        t.digit = digit;
        int total = 0;
        for (int z = 0; z < 9; ++z) {
            if (!(row >> t.profile.counts[z]) || t.profile.counts[z] < 0)
                throw std::invalid_argument("load_templates: expected nine zone counts at line " +
                                            std::to_string(lineno));
            total += t.profile.counts[z];
        }
        if (total == 0)
            throw std::invalid_argument("load_templates: all-zero template at line " +
                                        std::to_string(lineno));
        for (int z = 0; z < 9; ++z)
            t.profile.normalized[z] = static_cast<double>(t.profile.counts[z]) / total;
        out.push_back(t);
    }
    return out;
}

} // namespace cmend
