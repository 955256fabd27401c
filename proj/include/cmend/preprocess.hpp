#pragma once

#include "cmend/raster.hpp"

#include <array>
#include <cstdint>

namespace cmend {

struct Histogram {
    std::array<std::uint64_t, 256> bins{};

    std::uint64_t total() const {
        std::uint64_t n = 0;
        for (auto b : bins) n += b;
        return n;
    }
};

struct ThresholdReport {
    int low = 0;      // darkest occupied intensity
    int high = 0;     // brightest occupied intensity
    int midpoint = 0; // floor((low + high) / 2)
};

Histogram histogram(const GrayImage& img);

// Midpoint of the occupied intensity range; the automatic threshold choice.
ThresholdReport spread_midpoint(const Histogram& hist);

// Pixels strictly above the threshold become background 0, the rest foreground 1
// (dark ink on a light scan).
BinaryImage threshold(const GrayImage& img, int level);

// 3x3 majority vote over the zero-padded neighborhood (median of nine binary
// values): output 1 iff at least five of the nine are 1.
BinaryImage median_filter3(const BinaryImage& img);

} // namespace cmend
