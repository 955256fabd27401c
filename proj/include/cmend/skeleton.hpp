#pragma once

#include "cmend/raster.hpp"

#include <cstdint>
#include <vector>

namespace cmend {

// A skeleton endpoint annotated with its local gradient response.
struct Endpoint {
    PixelCoord pos;
    int gx = 0;
    int gy = 0;
    double direction_deg = 0.0; // atan2(gy, gx) in degrees, (-180, 180]
    int dir_class = 0;          // 1 iff direction_deg > 0
    int contour_id = -1;

    friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

// The first few skeleton pixels walking inward from an endpoint;
// pixels.front() is the endpoint itself.
struct ContourTail {
    std::vector<PixelCoord> pixels;
};

struct CrossedRemoval {
    BinaryImage image;
    std::vector<PixelCoord> removed; // raster order
};

struct ComponentLabels {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> labels; // -1 for background
    std::int32_t count = 0;

    std::int32_t at(int row, int col) const {
        return labels[static_cast<std::size_t>(row) * width + col];
    }
    std::int32_t at(PixelCoord p) const { return at(p.row, p.col); }
};

// Number of foreground pixels among the 8 neighbors (zero-padded at borders).
int neighbor_sum(const BinaryImage& img, int row, int col);

// Number of 0->1 transitions traversing the 8-neighborhood clockwise starting
// north: N, NE, E, SE, S, SW, W, NW and back to N.
int crossing_number(const BinaryImage& img, int row, int col);

// Iterative two-subpass thinning to a one-pixel-wide skeleton. Each subpass
// reads a frozen snapshot, deletes the flagged pixels simultaneously, and the
// iteration stops when a full two-subpass round deletes nothing.
BinaryImage zhang_suen_thin(const BinaryImage& img);

// Delete every pixel whose crossing number is 3 or more. Each round decides
// against a frozen snapshot and deletes simultaneously (no scan-order
// dependence); rounds repeat until no crossed pixel remains, because removing
// a junction can expose a new one next to it. removed lists every deleted
// pixel in raster order. Afterwards every foreground pixel has crossing
// number at most 2.
CrossedRemoval remove_crossed_points(const BinaryImage& img);

// Interior foreground pixels with exactly one foreground neighbor, in raster
// order. Border rows and columns are not scanned.
std::vector<PixelCoord> detect_endpoints(const BinaryImage& img);

// 8-connected components, labelled 0..count-1 in raster-scan discovery order.
ComponentLabels label_components(const BinaryImage& img);

// Walk inward from an endpoint until k pixels are collected, a junction is
// reached, or the curve ends. start must be a foreground endpoint, k >= 2.
ContourTail trace_tail(const BinaryImage& img, PixelCoord start, int k = 5);

} // namespace cmend
