#pragma once

#include "cmend/raster.hpp"
#include "cmend/skeleton.hpp"

#include <vector>

namespace cmend {

struct SobelResponse {
    int gx = 0;
    int gy = 0;
};

// 3x3 Sobel response at an interior pixel of an 8-bit image.
SobelResponse sobel_at(const GrayImage& img, PixelCoord p);

// atan2(gy, gx) in degrees, normalized to (-180, 180]. Throws on a zero vector.
double gradient_direction(double gx, double gy);

// 1 for strictly positive direction, 0 otherwise.
int dir_class(double direction_deg);

double euclidean(PixelCoord a, PixelCoord b);

enum class MatchPhase { windowed, global };

struct MatchConfig {
    int window = 11;          // odd side length of the local search square
    double max_gap = 80.0;    // global-phase distance ceiling, in pixels
    double tie_epsilon = 1e-6;
};

struct MatchPair {
    Endpoint a; // lexicographically smaller position of the two
    Endpoint b;
    double distance = 0.0;
    MatchPhase phase = MatchPhase::windowed;
};

struct MatchResult {
    std::vector<MatchPair> pairs;
    std::vector<Endpoint> unmatched; // sorted by position
};

struct EndpointAnnotation {
    std::vector<Endpoint> endpoints;
    std::vector<PixelCoord> excluded; // zero gradient or border; left out of matching
};

// Attach Sobel gradients (computed on the skeleton promoted to {0, 255}),
// directions, direction classes, and component ids to detected endpoints.
EndpointAnnotation annotate_endpoints(const BinaryImage& skeleton,
                                      const std::vector<PixelCoord>& coords,
                                      const ComponentLabels& labels);

// Two-phase mutual-nearest pairing. The windowed phase pairs opposite-class
// endpoints of different contours within a small Chebyshev window; the global
// phase relaxes to a Euclidean ceiling and permits same-contour pairs only for
// endpoints with no cross-contour candidate in range. The result does not
// depend on the order of the input.
MatchResult match_endpoints(std::vector<Endpoint> endpoints, const MatchConfig& cfg = {});

} // namespace cmend
