#pragma once

#include "cmend/raster.hpp"

#include <array>
#include <istream>
#include <vector>

namespace cmend {

// Ink counts over a 3x3 zoning of the glyph box, zones numbered row-major
// top-left to bottom-right (normalized by total ink).
struct ZoneProfile {
    std::array<int, 9> counts{};
    std::array<double, 9> normalized{};

    int total() const {
        int t = 0;
        for (int c : counts) t += c;
        return t;
    }
};

struct DigitTemplate {
    int digit = 0;
    ZoneProfile profile;
};

struct Classification {
    int digit = -1;
    double score = 0.0; // L1 distance between normalized profiles
};

// Partition the glyph box into a 3x3 grid (each band floor(dim/3) wide, the
// remainder joining the last band) and count ink per zone. The box must be at
// least 3x3.
ZoneProfile zone_features(const BinaryImage& glyph);

// Nearest template by L1 distance over normalized profiles; ties go to the
// smaller digit. Throws on a blank profile or an empty template list.
Classification classify_digit(const ZoneProfile& profile,
                              const std::vector<DigitTemplate>& templates);

// Templates derived from the built-in 5x7 bitmap digits.
const std::vector<DigitTemplate>& builtin_templates();

// The built-in 5x7 bitmap for a digit, as a binary image.
BinaryImage render_digit(int digit);

// Override templates: lines of "digit c1 c2 ... c9" (raw zone counts, '#'
// comments allowed); counts are normalized on load.
std::vector<DigitTemplate> load_templates(std::istream& in);

} // namespace cmend
