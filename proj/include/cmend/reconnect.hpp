#pragma once

#include "cmend/matcher.hpp"
#include "cmend/raster.hpp"
#include "cmend/skeleton.hpp"
#include "cmend/spline.hpp"

#include <span>
#include <vector>

namespace cmend {

// One reconstructed bridge between a matched pair of endpoints.
struct ReconnectionPath {
    MatchPair pair;
    std::vector<Vec2> samples;      // smooth curve samples, sub-pixel
    std::vector<PixelCoord> pixels; // rasterized, 8-connected, duplicate-free
};

// Round samples to pixels, bridge consecutive rounded points with integer line
// stepping so the chain is 8-connected, and drop consecutive duplicates.
std::vector<PixelCoord> rasterize(std::span<const Vec2> samples);

// Build a smooth bridge for a matched pair. End tangents come from the
// principal direction of each contour tail, oriented outward into the gap and
// scaled to the chord length; degenerate tails fall back to the chord itself.
// sample_step bounds the sub-pixel spacing between consecutive samples.
ReconnectionPath build_path(const MatchPair& pair, const ContourTail& tail_a,
                            const ContourTail& tail_b, double sample_step = 0.5);

// Stamp the path pixels as foreground onto a copy of the skeleton.
BinaryImage apply_reconnection(const BinaryImage& skeleton,
                               std::span<const ReconnectionPath> paths);

} // namespace cmend
