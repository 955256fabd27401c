#include "cmend/skeleton.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace cmend {

namespace {

// 8-neighborhood offsets clockwise from north: N, NE, E, SE, S, SW, W, NW.
constexpr std::array<std::pair<int, int>, 8> kRing = {{
    {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1},
}};

std::array<std::uint8_t, 8> ring_values(const BinaryImage& img, int row, int col) {
    std::array<std::uint8_t, 8> v{};
    for (std::size_t i = 0; i < kRing.size(); ++i)
        v[i] = img.at_or(row + kRing[i].first, col + kRing[i].second);
    return v;
}

int transitions(const std::array<std::uint8_t, 8>& v) {
    int t = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] == 0 && v[(i + 1) % v.size()] == 1) ++t;
    return t;
}

} // namespace

int neighbor_sum(const BinaryImage& img, int row, int col) {
    int s = 0;
    for (auto [dr, dc] : kRing) s += img.at_or(row + dr, col + dc);
    return s;
}

int crossing_number(const BinaryImage& img, int row, int col) {
    return transitions(ring_values(img, row, col));
}

BinaryImage zhang_suen_thin(const BinaryImage& img) {
    BinaryImage cur = img;
    const int w = cur.width(), h = cur.height();
    std::vector<PixelCoord> doomed;

    auto subpass = [&](int parity) {
        const BinaryImage snap = cur;
        doomed.clear();
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                if (!snap.at(r, c)) continue;
                auto v = ring_values(snap, r, c);
                // v indices: 0=N(P2) 1=NE(P3) 2=E(P4) 3=SE(P5) 4=S(P6) 5=SW(P7) 6=W(P8) 7=NW(P9)
                int b = 0;
                for (auto x : v) b += x;
                if (b < 2 || b > 6) continue;
                if (transitions(v) != 1) continue;
                if (parity == 0) {
                    if (v[0] && v[2] && v[4]) continue; // N*E*S
                    if (v[2] && v[4] && v[6]) continue; // E*S*W
                } else {
                    if (v[0] && v[2] && v[6]) continue; // N*E*W
                    if (v[0] && v[4] && v[6]) continue; // N*S*W
                }
                doomed.push_back({r, c});
            }
        }
        for (auto p : doomed) cur.set(p, 0);
        return !doomed.empty();
    };

    for (;;) {
        bool changed = subpass(0);
        changed = subpass(1) || changed;
        if (!changed) break;
    }
    return cur;
}

CrossedRemoval remove_crossed_points(const BinaryImage& img) {
    CrossedRemoval out{img, {}};
    // Deleting a junction pixel can split a neighbor's foreground run and push
    // that neighbor to three arms, so one pass is not enough: repeat whole
    // simultaneous rounds until no crossed pixel remains.
    std::vector<PixelCoord> round;
    do {
        round.clear();
        for (int r = 0; r < out.image.height(); ++r)
            for (int c = 0; c < out.image.width(); ++c)
                if (out.image.at(r, c) && crossing_number(out.image, r, c) >= 3)
                    round.push_back({r, c});
        for (auto p : round) out.image.set(p, 0);
        out.removed.insert(out.removed.end(), round.begin(), round.end());
    } while (!round.empty());
    std::sort(out.removed.begin(), out.removed.end());
    return out;
}

std::vector<PixelCoord> detect_endpoints(const BinaryImage& img) {
    std::vector<PixelCoord> out;
    for (int r = 1; r + 1 < img.height(); ++r)
        for (int c = 1; c + 1 < img.width(); ++c)
            if (img.at(r, c) && neighbor_sum(img, r, c) == 1)
                out.push_back({r, c});
    return out;
}

ComponentLabels label_components(const BinaryImage& img) {
    const int w = img.width(), h = img.height();
    ComponentLabels out;
    out.width = w;
    out.height = h;
    out.labels.assign(static_cast<std::size_t>(w) * h, -1);

    std::vector<PixelCoord> stack;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!img.at(r, c) || out.at(r, c) >= 0) continue;
            std::int32_t id = out.count++;
            stack.push_back({r, c});
            out.labels[static_cast<std::size_t>(r) * w + c] = id;
            while (!stack.empty()) {
                PixelCoord p = stack.back();
                stack.pop_back();
                for (auto [dr, dc] : kRing) {
                    int nr = p.row + dr, nc = p.col + dc;
                    if (!img.in_bounds(nr, nc)) continue;
                    if (!img.at(nr, nc) || out.at(nr, nc) >= 0) continue;
                    out.labels[static_cast<std::size_t>(nr) * w + nc] = id;
                    stack.push_back({nr, nc});
                }
            }
        }
    }
    return out;
}

ContourTail trace_tail(const BinaryImage& img, PixelCoord start, int k) {
    if (k < 2) throw std::invalid_argument("trace_tail: k must be at least 2");
    if (!img.in_bounds(start.row, start.col) || !img.at(start))
        throw std::invalid_argument("trace_tail: start is not a foreground pixel");
    if (neighbor_sum(img, start.row, start.col) != 1)
        throw std::invalid_argument("trace_tail: start is not an endpoint");

    ContourTail tail;
    tail.pixels.push_back(start);
    PixelCoord cur = start;
    while (static_cast<int>(tail.pixels.size()) < k) {
        PixelCoord next{};
        int found = 0;
        for (auto [dr, dc] : kRing) {
            PixelCoord cand{cur.row + dr, cur.col + dc};
            if (!img.in_bounds(cand.row, cand.col) || !img.at(cand)) continue;
            bool visited = false;
            for (auto p : tail.pixels)
                if (p == cand) { visited = true; break; }
            if (visited) continue;
            next = cand;
            ++found;
        }
        if (found != 1) break; // dead end or junction
        tail.pixels.push_back(next);
        cur = next;
    }
    return tail;
}

} // namespace cmend
