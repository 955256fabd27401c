#include "cmend/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cmend {

SobelResponse sobel_at(const GrayImage& img, PixelCoord p) {
    if (p.row < 1 || p.row + 1 >= img.height() || p.col < 1 || p.col + 1 >= img.width())
        throw std::invalid_argument("sobel_at: pixel is on the image border");
    static constexpr int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
    static constexpr int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
    SobelResponse g;
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            int v = img.at(p.row + dr, p.col + dc);
            g.gx += kx[dr + 1][dc + 1] * v;
            g.gy += ky[dr + 1][dc + 1] * v;
        }
    }
    return g;
}

double gradient_direction(double gx, double gy) {
    if (gx == 0.0 && gy == 0.0)
        throw std::invalid_argument("gradient_direction: zero gradient has no direction");
    double deg = std::atan2(gy, gx) * (180.0 / std::numbers::pi);
    if (deg <= -180.0) deg += 360.0;
    if (deg > 180.0) deg = 180.0;
    return deg;
}

int dir_class(double direction_deg) { return direction_deg > 0.0 ? 1 : 0; }

double euclidean(PixelCoord a, PixelCoord b) {
    double dr = a.row - b.row, dc = a.col - b.col;
    return std::sqrt(dr * dr + dc * dc);
}

EndpointAnnotation annotate_endpoints(const BinaryImage& skeleton,
                                      const std::vector<PixelCoord>& coords,
                                      const ComponentLabels& labels) {
    EndpointAnnotation out;
    GrayImage gray = promote(skeleton);
    for (PixelCoord p : coords) {
        if (p.row < 1 || p.row + 1 >= gray.height() || p.col < 1 || p.col + 1 >= gray.width()) {
            out.excluded.push_back(p);
            continue;
        }
        SobelResponse g = sobel_at(gray, p);
        if (g.gx == 0 && g.gy == 0) {
            out.excluded.push_back(p);
            continue;
        }
        Endpoint e;
        e.pos = p;
        e.gx = g.gx;
        e.gy = g.gy;
        e.direction_deg = gradient_direction(g.gx, g.gy);
        e.dir_class = dir_class(e.direction_deg);
        e.contour_id = labels.at(p);
        out.endpoints.push_back(e);
    }
    return out;
}

namespace {

// Absolute circular distance between two angles in degrees, in [0, 180].
double angle_gap(double a, double b) {
    double d = std::fmod(std::fabs(a - b), 360.0);
    return d > 180.0 ? 360.0 - d : d;
}

} // namespace

MatchResult match_endpoints(std::vector<Endpoint> endpoints, const MatchConfig& cfg) {
    if (cfg.window < 3 || cfg.window % 2 == 0)
        throw std::invalid_argument("match_endpoints: window must be odd and at least 3");
    if (cfg.max_gap <= 0.0)
        throw std::invalid_argument("match_endpoints: max_gap must be positive");
    if (cfg.tie_epsilon < 0.0)
        throw std::invalid_argument("match_endpoints: tie_epsilon must be non-negative");

    // Canonical processing order makes the result independent of input order.
    std::sort(endpoints.begin(), endpoints.end(),
              [](const Endpoint& a, const Endpoint& b) { return a.pos < b.pos; });

    const int n = static_cast<int>(endpoints.size());
    const int radius = (cfg.window - 1) / 2;
    std::vector<char> taken(n, 0);
    MatchResult result;

    // Nearest admissible candidate for endpoint i; distances tied within
    // tie_epsilon of the minimum fall back to the candidate whose direction is
    // closest to antipodal, then to the lexicographically smallest position.
    auto pick_best = [&](int i, MatchPhase phase, bool allow_same_contour) {
        auto admissible = [&](int j) {
            if (j == i || taken[j]) return false;
            const Endpoint& a = endpoints[i];
            const Endpoint& b = endpoints[j];
            if (a.dir_class == b.dir_class) return false;
            bool same_contour = a.contour_id == b.contour_id;
            if (phase == MatchPhase::windowed) {
                if (same_contour) return false;
                if (chebyshev(a.pos, b.pos) > radius) return false;
            } else {
                if (same_contour && !allow_same_contour) return false;
                if (euclidean(a.pos, b.pos) > cfg.max_gap) return false;
            }
            return true;
        };

        double dmin = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j)
            if (admissible(j)) dmin = std::min(dmin, euclidean(endpoints[i].pos, endpoints[j].pos));
        if (!std::isfinite(dmin)) return -1;

        int best = -1;
        double best_err = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            if (!admissible(j)) continue;
            if (euclidean(endpoints[i].pos, endpoints[j].pos) > dmin + cfg.tie_epsilon) continue;
            double err = std::fabs(
                angle_gap(endpoints[i].direction_deg, endpoints[j].direction_deg) - 180.0);
            if (best < 0 || err < best_err ||
                (err == best_err && endpoints[j].pos < endpoints[best].pos)) {
                best = j;
                best_err = err;
            }
        }
        return best;
    };

    auto run_phase = [&](MatchPhase phase) {
        for (;;) {
            std::vector<int> best(n, -1);
            for (int i = 0; i < n; ++i) {
                if (taken[i]) continue;
                if (phase == MatchPhase::global) {
                    best[i] = pick_best(i, phase, false);
                    if (best[i] < 0) best[i] = pick_best(i, phase, true);
                } else {
                    best[i] = pick_best(i, phase, false);
                }
            }
            bool committed = false;
            for (int i = 0; i < n; ++i) {
                int j = best[i];
                if (j <= i || taken[i] || taken[j]) continue;
                if (best[j] != i) continue;
                MatchPair pair;
                pair.a = endpoints[i];
                pair.b = endpoints[j];
                pair.distance = euclidean(pair.a.pos, pair.b.pos);
                pair.phase = phase;
                result.pairs.push_back(pair);
                taken[i] = taken[j] = 1;
                committed = true;
            }
            if (!committed) break;
        }
    };

    run_phase(MatchPhase::windowed);
    run_phase(MatchPhase::global);

    for (int i = 0; i < n; ++i)
        if (!taken[i]) result.unmatched.push_back(endpoints[i]);
    return result;
}

} // namespace cmend
