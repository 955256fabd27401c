#pragma once

#include "cmend/matcher.hpp"
#include "cmend/raster.hpp"
#include "cmend/reconnect.hpp"
#include "cmend/spline.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace cmend {

struct GenOptions {
    int stroke_px = 2;            // rendered stroke width, 1 or 2
    double noise_density = 0.005; // fraction of pixels flipped to salt/pepper
    std::uint8_t ink = 30;
    std::uint8_t background = 240;
    int border_margin = 12;            // curves stay this far from image edges
    double min_perimeter = 90.0;       // reject shorter level curves
    int min_curve_separation = 5;      // Chebyshev clearance between curves
};

// A rendered synthetic contour map plus its exact geometry. truth_curves are
// closed sub-pixel polylines (first point repeated at the end); curve_chains
// are their rendered one-pixel center chains in order along each curve.
struct SyntheticMap {
    GrayImage image;
    std::vector<std::vector<Vec2>> truth_curves;
    std::uint64_t seed = 0;
    std::vector<std::vector<PixelCoord>> curve_chains;
    GenOptions options;
};

// One injected break: which curve, the pixels actually erased, and the two
// chain pixels left facing the gap.
struct GapRecord {
    int curve_index = -1;
    std::vector<PixelCoord> erased;
    PixelCoord end_a;
    PixelCoord end_b;
};

struct BrokenMap {
    GrayImage image;
    std::vector<GapRecord> records;
};

struct GapOptions {
    // Endpoints of distinct gaps are kept at least this far apart, putting
    // cross-gap pairs outside the matcher's default global radius.
    double min_cross_gap_distance = 85.0;
    // Gap sites are rejected when a noise speck sits within this Chebyshev
    // distance of the span being erased: a speck inside the gap region makes
    // the true reconstruction ambiguous.
    int speck_clearance = 4;
};

struct EvalMetrics {
    double pairing_accuracy = 0.0;
    double mean_deviation = 0.0;
    double max_deviation = 0.0;
    int gaps_closed = 0;
};

// Closed iso-level curves of a scalar field sampled on a width x height grid
// (row-major), as ordered sub-pixel polylines with the first point repeated at
// the end. Curves that run off the grid edge are discarded.
std::vector<std::vector<Vec2>> extract_level_set(const std::vector<double>& field, int width,
                                                 int height, double level);

// Deterministic synthetic map: a smooth sum-of-bumps height field, n_contours
// closed level curves rendered as dark ink, plus isolated salt-and-pepper
// specks that never touch the curves. Same seed, same bytes.
SyntheticMap generate_map(std::uint64_t seed, int n_contours, int size,
                          const GenOptions& options = {});

// Erase n_gaps spans of gap_len chain positions at seeded random arc
// positions; gaps on one curve stay at least 3 * gap_len apart along the arc.
BrokenMap inject_gaps(const SyntheticMap& map, int n_gaps, int gap_len, std::uint64_t seed,
                      const GapOptions& options = {});

// Score a pipeline run against the injected ground truth: the fraction of gaps
// whose endpoint pair was re-found (within one pixel per end, either order),
// and the distance statistics from reconstructed path pixels to the true
// curves for the gaps that were closed.
EvalMetrics evaluate(std::span<const GapRecord> records, std::span<const MatchPair> pairs,
                     std::span<const ReconnectionPath> paths,
                     const std::vector<std::vector<Vec2>>& truth_curves);

} // namespace cmend
