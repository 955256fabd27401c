#include "cmend/reconnect.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>

namespace cmend {

namespace {

PixelCoord round_to_pixel(Vec2 v) {
    return {static_cast<int>(std::llround(v.row)), static_cast<int>(std::llround(v.col))};
}

// Intermediate integer steps between two pixels: Chebyshev-many interpolation
// steps, so consecutive outputs differ by at most one in each coordinate.
void bridge_into(std::vector<PixelCoord>& out, PixelCoord from, PixelCoord to) {
    int steps = chebyshev(from, to);
    for (int s = 1; s <= steps; ++s) {
        PixelCoord p{
            from.row + static_cast<int>(std::llround(static_cast<double>(to.row - from.row) * s / steps)),
            from.col + static_cast<int>(std::llround(static_cast<double>(to.col - from.col) * s / steps))};
        if (out.empty() || out.back() != p) out.push_back(p);
    }
}

// Truncate at revisits so the chain never repeats a pixel: returning to an
// earlier pixel erases the loop walked since its first visit.
std::vector<PixelCoord> collapse_revisits(const std::vector<PixelCoord>& chain) {
    std::vector<PixelCoord> out;
    std::map<PixelCoord, std::size_t> first_seen;
    for (PixelCoord p : chain) {
        auto it = first_seen.find(p);
        if (it != first_seen.end()) {
            while (out.size() > it->second + 1) {
                first_seen.erase(out.back());
                out.pop_back();
            }
        } else {
            first_seen[p] = out.size();
            out.push_back(p);
        }
    }
    return out;
}

// Unit direction of the tail pointing from the contour body out through the
// endpoint (the direction the curve would continue into the gap). Empty when
// the tail is too short or directionally degenerate.
std::optional<Vec2> outward_direction(const ContourTail& tail) {
    if (tail.pixels.size() < 2) return std::nullopt;
    double mr = 0.0, mc = 0.0;
    for (PixelCoord p : tail.pixels) {
        mr += p.row;
        mc += p.col;
    }
    mr /= static_cast<double>(tail.pixels.size());
    mc /= static_cast<double>(tail.pixels.size());
    double srr = 0.0, src = 0.0, scc = 0.0;
    for (PixelCoord p : tail.pixels) {
        double dr = p.row - mr, dc = p.col - mc;
        srr += dr * dr;
        src += dr * dc;
        scc += dc * dc;
    }
    // Principal eigenvector of the 2x2 scatter matrix.
    double half_diff = (srr - scc) / 2.0;
    double lambda = (srr + scc) / 2.0 + std::hypot(half_diff, src);
    Vec2 v1{lambda - scc, src};
    Vec2 v2{src, lambda - srr};
    Vec2 axis = norm(v1) >= norm(v2) ? v1 : v2;
    double len = norm(axis);
    if (len < 1e-12) return std::nullopt;
    axis = axis * (1.0 / len);
    Vec2 tip{static_cast<double>(tail.pixels.front().row),
             static_cast<double>(tail.pixels.front().col)};
    double side = dot(axis, tip - Vec2{mr, mc});
    if (std::fabs(side) < 1e-12) return std::nullopt;
    return side > 0.0 ? axis : -axis;
}

} // namespace

std::vector<PixelCoord> rasterize(std::span<const Vec2> samples) {
    if (samples.empty()) throw std::invalid_argument("rasterize: no samples");
    std::vector<PixelCoord> out;
    out.push_back(round_to_pixel(samples[0]));
    for (std::size_t i = 1; i < samples.size(); ++i) {
        PixelCoord p = round_to_pixel(samples[i]);
        if (p == out.back()) continue;
        bridge_into(out, out.back(), p);
    }
    return out;
}

ReconnectionPath build_path(const MatchPair& pair, const ContourTail& tail_a,
                            const ContourTail& tail_b, double sample_step) {
    if (sample_step <= 0.0)
        throw std::invalid_argument("build_path: sample_step must be positive");
    if (tail_a.pixels.empty() || tail_b.pixels.empty())
        throw std::invalid_argument("build_path: empty tail");
    if (tail_a.pixels.front() != pair.a.pos || tail_b.pixels.front() != pair.b.pos)
        throw std::invalid_argument("build_path: tails do not start at the pair endpoints");

    ReconnectionPath path;
    path.pair = pair;

    Vec2 p0{static_cast<double>(pair.a.pos.row), static_cast<double>(pair.a.pos.col)};
    Vec2 p1{static_cast<double>(pair.b.pos.row), static_cast<double>(pair.b.pos.col)};
    Vec2 chord = p1 - p0;
    double len = norm(chord);
    if (len == 0.0) {
        path.samples = {p0};
        path.pixels = {pair.a.pos};
        return path;
    }
    Vec2 unit_chord = chord * (1.0 / len);

    // Tangent at the start points into the gap; tangent at the end points out
    // of the gap into the second contour, i.e. opposite its outward direction.
    Vec2 dir0 = outward_direction(tail_a).value_or(unit_chord);
    auto out_b = outward_direction(tail_b);
    Vec2 dir1 = out_b ? -(*out_b) : unit_chord;

    HermiteSegment seg{p0, p1, dir0 * len, dir1 * len};

    // Bound the parametric speed so consecutive samples stay within
    // sample_step of each other: the derivative is quadratic per component.
    Vec2 ca = 2.0 * seg.p0 - 2.0 * seg.p1 + seg.t0 + seg.t1;
    Vec2 cb = -3.0 * seg.p0 + 3.0 * seg.p1 - 2.0 * seg.t0 - seg.t1;
    auto max_abs_quadratic = [](double qa, double qb, double qc) {
        double m = std::max(std::fabs(qc), std::fabs(qa + qb + qc));
        if (qa != 0.0) {
            double u = -qb / (2.0 * qa);
            if (u > 0.0 && u < 1.0) m = std::max(m, std::fabs((qa * u + qb) * u + qc));
        }
        return m;
    };
    double vmax = std::hypot(max_abs_quadratic(3.0 * ca.row, 2.0 * cb.row, seg.t0.row),
                             max_abs_quadratic(3.0 * ca.col, 2.0 * cb.col, seg.t0.col));
    int n = std::max(1, static_cast<int>(std::ceil(vmax / sample_step)));

    path.samples.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i)
        path.samples.push_back(hermite_eval(seg, static_cast<double>(i) / n));

    path.pixels = collapse_revisits(rasterize(path.samples));
    return path;
}

BinaryImage apply_reconnection(const BinaryImage& skeleton,
                               std::span<const ReconnectionPath> paths) {
    BinaryImage out = skeleton;
    for (const ReconnectionPath& path : paths) {
        for (PixelCoord p : path.pixels) {
            if (!out.in_bounds(p.row, p.col))
                throw std::invalid_argument("apply_reconnection: path pixel out of bounds");
            out.set(p, 1);
        }
    }
    return out;
}

} // namespace cmend
