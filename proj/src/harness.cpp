#include "cmend/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

namespace cmend {

namespace {

// Seeded draws built on a fixed-width engine so corpora are reproducible.
struct Rng {
    std::mt19937_64 eng;

    explicit Rng(std::uint64_t seed) : eng(seed) {}

    double uniform() { return (eng() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(eng() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    bool coin() { return (eng() & 1) != 0; }
};

constexpr double kChainSampleStep = 0.4;

// ---- level-set extraction ------------------------------------------------

struct EdgeKey {
    int r, c, vertical;
    friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

Vec2 edge_point(const std::vector<double>& f, int width, EdgeKey e, double level) {
    double va = f[static_cast<std::size_t>(e.r) * width + e.c];
    double vb = e.vertical ? f[static_cast<std::size_t>(e.r + 1) * width + e.c]
                           : f[static_cast<std::size_t>(e.r) * width + e.c + 1];
    double t = (level - va) / (vb - va);
    return e.vertical ? Vec2{e.r + t, static_cast<double>(e.c)}
                      : Vec2{static_cast<double>(e.r), e.c + t};
}

} // namespace

std::vector<std::vector<Vec2>> extract_level_set(const std::vector<double>& field, int width,
                                                 int height, double level) {
    if (width < 2 || height < 2)
        throw std::invalid_argument("extract_level_set: grid must be at least 2x2");
    if (field.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("extract_level_set: field size does not match dimensions");

    auto inside = [&](int r, int c) {
        return field[static_cast<std::size_t>(r) * width + c] > level;
    };

    // Each crossed cell contributes segments between points on its crossed
    // edges; every edge is shared by at most two cells, so the contour graph
    // has maximum degree two and decomposes into paths and cycles.
    std::map<EdgeKey, std::vector<EdgeKey>> links;
    auto connect = [&](EdgeKey a, EdgeKey b) {
        links[a].push_back(b);
        links[b].push_back(a);
    };

    for (int r = 0; r + 1 < height; ++r) {
        for (int c = 0; c + 1 < width; ++c) {
            bool tl = inside(r, c), tr = inside(r, c + 1);
            bool bl = inside(r + 1, c), br = inside(r + 1, c + 1);
            EdgeKey top{r, c, 0}, bottom{r + 1, c, 0};
            EdgeKey left{r, c, 1}, right{r, c + 1, 1};
            int code = (tl ? 1 : 0) | (tr ? 2 : 0) | (bl ? 4 : 0) | (br ? 8 : 0);
            switch (code) {
                case 0: case 15: break;
                case 1: case 14: connect(top, left); break;
                case 2: case 13: connect(top, right); break;
                case 4: case 11: connect(left, bottom); break;
                case 8: case 7: connect(right, bottom); break;
                case 3: case 12: connect(left, right); break;
                case 5: case 10: connect(top, bottom); break;
                case 6: case 9: {
                    // Saddle: resolve by the cell-center average.
                    double center = (field[static_cast<std::size_t>(r) * width + c] +
                                     field[static_cast<std::size_t>(r) * width + c + 1] +
                                     field[static_cast<std::size_t>(r + 1) * width + c] +
                                     field[static_cast<std::size_t>(r + 1) * width + c + 1]) /
                                    4.0;
                    bool center_in = center > level;
                    bool diag_tl = (code == 9); // tl and br inside
                    if (diag_tl == center_in) {
                        connect(top, right);
                        connect(left, bottom);
                    } else {
                        connect(top, left);
                        connect(right, bottom);
                    }
                    break;
                }
            }
        }
    }

    std::vector<std::vector<Vec2>> loops;
    std::set<EdgeKey> visited;
    for (const auto& [start, nbrs] : links) {
        if (visited.count(start) || nbrs.size() != 2) continue;
        // Walk the cycle; abandon it if it runs into a degree-one edge (an
        // open chain clipped by the grid border).
        std::vector<EdgeKey> cycle{start};
        visited.insert(start);
        EdgeKey prev = start, cur = nbrs[0];
        bool closed = false;
        while (true) {
            if (cur == start) {
                closed = true;
                break;
            }
            if (visited.count(cur)) break;
            visited.insert(cur);
            cycle.push_back(cur);
            const auto& ln = links[cur];
            if (ln.size() != 2) break;
            EdgeKey next = (ln[0] == prev) ? ln[1] : ln[0];
            prev = cur;
            cur = next;
        }
        if (!closed) continue;
        std::vector<Vec2> poly;
        poly.reserve(cycle.size() + 1);
        for (EdgeKey e : cycle) poly.push_back(edge_point(field, width, e, level));
        poly.push_back(poly.front());
        loops.push_back(std::move(poly));
    }
    return loops;
}

namespace {

// ---- chain rendering -------------------------------------------------------

double polyline_length(const std::vector<Vec2>& poly) {
    double len = 0.0;
    for (std::size_t i = 1; i < poly.size(); ++i) len += norm(poly[i] - poly[i - 1]);
    return len;
}

PixelCoord round_point(Vec2 v) {
    return {static_cast<int>(std::llround(v.row)), static_cast<int>(std::llround(v.col))};
}

// Dense samples of a closed polyline, rounded and deduplicated into a closed
// pixel chain (last pixel adjacent to, and distinct from, the first).
std::vector<PixelCoord> round_closed_polyline(const std::vector<Vec2>& poly) {
    std::vector<PixelCoord> chain;
    auto push = [&](PixelCoord p) {
        if (chain.empty() || chain.back() != p) chain.push_back(p);
    };
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        Vec2 a = poly[i], b = poly[i + 1];
        double len = norm(b - a);
        int steps = std::max(1, static_cast<int>(std::ceil(len / kChainSampleStep)));
        for (int s = 0; s < steps; ++s)
            push(round_point(a + (b - a) * (static_cast<double>(s) / steps)));
    }
    while (chain.size() > 1 && chain.back() == chain.front()) chain.pop_back();
    return chain;
}

// Remove pixels whose circular neighbors are already adjacent to each other,
// leaving a minimal 8-connected closed chain.
void simplify_closed_chain(std::vector<PixelCoord>& chain) {
    bool changed = true;
    while (changed && chain.size() > 3) {
        changed = false;
        const int n = static_cast<int>(chain.size());
        for (int i = 0; i < n; ++i) {
            PixelCoord prev = chain[(i + n - 1) % n];
            PixelCoord next = chain[(i + 1) % n];
            if (chebyshev(prev, next) <= 1) {
                chain.erase(chain.begin() + i);
                changed = true;
                break;
            }
        }
    }
}

// A usable chain visits distinct pixels, is 8-connected in a single cycle, and
// never comes close to itself elsewhere: any two pixels within Chebyshev
// distance 3 must be near neighbors along the arc. This keeps rendered strokes
// from merging and keeps thinning from rewriting the geometry.
bool chain_is_clean(const std::vector<PixelCoord>& chain) {
    const int n = static_cast<int>(chain.size());
    if (n < 8) return false;
    std::map<PixelCoord, int> index;
    for (int i = 0; i < n; ++i)
        if (!index.emplace(chain[i], i).second) return false;
    for (int i = 0; i < n; ++i) {
        if (chebyshev(chain[i], chain[(i + 1) % n]) != 1) return false;
        for (int dr = -3; dr <= 3; ++dr) {
            for (int dc = -3; dc <= 3; ++dc) {
                auto it = index.find({chain[i].row + dr, chain[i].col + dc});
                if (it == index.end()) continue;
                int diff = std::abs(it->second - i);
                int arc = std::min(diff, n - diff);
                bool near_spatial = std::max(std::abs(dr), std::abs(dc)) <= 1;
                if (near_spatial ? arc > 1 : arc > 6) return false;
            }
        }
    }
    return true;
}

std::vector<PixelCoord> stamp_offsets(int stroke_px) {
    if (stroke_px == 1) return {{0, 0}};
    if (stroke_px == 2) return {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    throw std::invalid_argument("stroke width must be 1 or 2");
}

struct Grid {
    int size = 0;
    std::vector<char> cells;

    explicit Grid(int n) : size(n), cells(static_cast<std::size_t>(n) * n, 0) {}
    bool get(int r, int c) const {
        return r >= 0 && r < size && c >= 0 && c < size &&
               cells[static_cast<std::size_t>(r) * size + c];
    }
    void set(int r, int c) {
        if (r >= 0 && r < size && c >= 0 && c < size)
            cells[static_cast<std::size_t>(r) * size + c] = 1;
    }
    void mark_disc(PixelCoord p, int radius) {
        for (int dr = -radius; dr <= radius; ++dr)
            for (int dc = -radius; dc <= radius; ++dc) set(p.row + dr, p.col + dc);
    }
};

} // namespace

SyntheticMap generate_map(std::uint64_t seed, int n_contours, int size,
                          const GenOptions& options) {
    if (n_contours < 1) throw std::invalid_argument("generate_map: need at least one contour");
    if (size < 128) throw std::invalid_argument("generate_map: size must be at least 128");
    if (options.noise_density < 0.0 || options.noise_density > 0.05)
        throw std::invalid_argument("generate_map: noise density outside [0, 0.05]");
    auto offsets = stamp_offsets(options.stroke_px);

    Rng rng(seed);

    // Smooth height field: a handful of positive Gaussian bumps.
    struct Bump {
        double cr, cc, sigma, amp;
    };
    std::vector<Bump> bumps(static_cast<std::size_t>(rng.uniform_int(2, 4)));
    for (Bump& b : bumps) {
        b.cr = rng.uniform(0.25, 0.75) * size;
        b.cc = rng.uniform(0.25, 0.75) * size;
        b.sigma = rng.uniform(0.15, 0.30) * size;
        b.amp = rng.uniform(0.5, 1.0);
    }
    std::vector<double> field(static_cast<std::size_t>(size) * size);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            double v = 0.0;
            for (const Bump& b : bumps) {
                double dr = r - b.cr, dc = c - b.cc;
                v += b.amp * std::exp(-(dr * dr + dc * dc) / (2.0 * b.sigma * b.sigma));
            }
            field[static_cast<std::size_t>(r) * size + c] = v;
        }
    }
    auto [lo_it, hi_it] = std::minmax_element(field.begin(), field.end());
    double fmin = *lo_it, fmax = *hi_it;

    SyntheticMap map;
    map.seed = seed;
    map.options = options;

    Grid occupancy(size);
    const int margin = options.border_margin;

    for (int k = 0; k < n_contours; ++k) {
        bool placed = false;
        for (int attempt = 0; attempt < 60 && !placed; ++attempt) {
            double level = fmin + rng.uniform(0.2, 0.8) * (fmax - fmin);
            auto loops = extract_level_set(field, size, size, level);
            if (loops.empty()) continue; // level set empty or fully clipped: resample
            std::size_t best = 0;
            double best_len = -1.0;
            for (std::size_t i = 0; i < loops.size(); ++i) {
                double len = polyline_length(loops[i]);
                if (len > best_len) {
                    best_len = len;
                    best = i;
                }
            }
            const std::vector<Vec2>& loop = loops[best];
            if (best_len < options.min_perimeter) continue;
            bool in_frame = true;
            for (const Vec2& p : loop)
                if (p.row < margin || p.row > size - 1 - margin || p.col < margin ||
                    p.col > size - 1 - margin) {
                    in_frame = false;
                    break;
                }
            if (!in_frame) continue;

            std::vector<PixelCoord> chain = round_closed_polyline(loop);
            simplify_closed_chain(chain);
            if (!chain_is_clean(chain)) continue;
            bool clear = true;
            for (PixelCoord p : chain)
                if (occupancy.get(p.row, p.col)) {
                    clear = false;
                    break;
                }
            if (!clear) continue;

            for (PixelCoord p : chain) occupancy.mark_disc(p, options.min_curve_separation);
            map.truth_curves.push_back(loop);
            map.curve_chains.push_back(std::move(chain));
            placed = true;
        }
        if (!placed)
            throw std::runtime_error("generate_map: no usable level curve for contour " +
                                     std::to_string(k) + " after bounded retries");
    }

    // Render: background wash, then each chain stamped with the stroke.
    GrayImage img(size, size, options.background);
    Grid ink(size);
    for (const auto& chain : map.curve_chains) {
        for (PixelCoord p : chain) {
            for (PixelCoord d : offsets) {
                img.set(p.row + d.row, p.col + d.col, options.ink);
                ink.set(p.row + d.row, p.col + d.col);
            }
        }
    }

    // Salt-and-pepper specks, kept clear of the ink and of each other so they
    // stay isolated single pixels.
    Grid blocked(size);
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c)
            if (ink.get(r, c)) blocked.mark_disc({r, c}, 1);
    long target = std::lround(options.noise_density * size * size);
    long placed_noise = 0;
    for (long attempt = 0; attempt < target * 60 && placed_noise < target; ++attempt) {
        int r = rng.uniform_int(0, size - 1);
        int c = rng.uniform_int(0, size - 1);
        bool salt = rng.coin();
        if (blocked.get(r, c)) continue;
        img.set(r, c, salt ? 255 : 0);
        blocked.mark_disc({r, c}, 1);
        ++placed_noise;
    }

    map.image = std::move(img);
    return map;
}

namespace {

int circular_distance(int a, int b, int n) {
    int d = std::abs(a - b) % n;
    return std::min(d, n - d);
}

// Exact minimal arc distance between two equal-length spans on a cycle.
int span_arc_distance(int s1, int s2, int len, int n) {
    int best = n;
    for (int i = 0; i < len; ++i)
        for (int j = 0; j < len; ++j)
            best = std::min(best, circular_distance((s1 + i) % n, (s2 + j) % n, n));
    return best;
}

} // namespace

BrokenMap inject_gaps(const SyntheticMap& map, int n_gaps, int gap_len, std::uint64_t seed,
                      const GapOptions& options) {
    if (n_gaps < 0) throw std::invalid_argument("inject_gaps: n_gaps must be non-negative");
    if (gap_len < 1) throw std::invalid_argument("inject_gaps: gap_len must be at least 1");
    if (map.curve_chains.empty())
        throw std::invalid_argument("inject_gaps: map has no rendered curves");
    auto offsets = stamp_offsets(map.options.stroke_px);

    struct Placement {
        int curve;
        int start;
        PixelCoord end_a, end_b;
    };

    const int n_curves = static_cast<int>(map.curve_chains.size());
    std::vector<bool> closed(n_curves);
    for (int i = 0; i < n_curves; ++i) {
        const auto& ch = map.curve_chains[i];
        closed[i] = chebyshev(ch.front(), ch.back()) <= 1;
    }

    // Dark pixels that belong to no curve stamp are noise specks; mark their
    // neighborhoods so candidate spans near one can be rejected quickly.
    const int width = map.image.width(), height = map.image.height();
    std::vector<std::uint8_t> near_speck(static_cast<std::size_t>(width) * height, 0);
    {
        std::set<PixelCoord> stamped;
        for (const auto& chain : map.curve_chains)
            for (PixelCoord p : chain)
                for (PixelCoord d : offsets) stamped.insert({p.row + d.row, p.col + d.col});
        const int radius = options.speck_clearance;
        for (int r = 0; r < height; ++r)
            for (int c = 0; c < width; ++c) {
                if (map.image.at(r, c) >= 128 || stamped.count({r, c})) continue;
                for (int dr = -radius; dr <= radius; ++dr)
                    for (int dc = -radius; dc <= radius; ++dc) {
                        int rr = r + dr, cc = c + dc;
                        if (rr >= 0 && rr < height && cc >= 0 && cc < width)
                            near_speck[static_cast<std::size_t>(rr) * width + cc] = 1;
                    }
            }
    }

    Rng rng(seed);
    std::vector<Placement> placements;
    for (int g = 0; g < n_gaps; ++g) {
        bool placed = false;
        for (int attempt = 0; attempt < 500 && !placed; ++attempt) {
            int ci = rng.uniform_int(0, n_curves - 1);
            const auto& chain = map.curve_chains[ci];
            const int n = static_cast<int>(chain.size());
            if (n < 8 * gap_len) continue;
            int s;
            if (closed[ci]) {
                s = rng.uniform_int(0, n - 1);
            } else {
                if (n - gap_len - 1 < 1) continue;
                s = rng.uniform_int(1, n - gap_len - 1);
            }
            PixelCoord end_a = chain[(s - 1 + n) % n];
            PixelCoord end_b = chain[(s + gap_len) % n];

            bool ok = true;
            for (const Placement& p : placements) {
                if (p.curve == ci) {
                    int arc = closed[ci]
                                  ? span_arc_distance(s, p.start, gap_len, n)
                                  : std::max(0, std::max(p.start - (s + gap_len - 1),
                                                         s - (p.start + gap_len - 1)));
                    if (arc < 3 * gap_len) {
                        ok = false;
                        break;
                    }
                }
                for (PixelCoord mine : {end_a, end_b}) {
                    for (PixelCoord theirs : {p.end_a, p.end_b}) {
                        if (euclidean(mine, theirs) < options.min_cross_gap_distance) {
                            ok = false;
                            break;
                        }
                    }
                    if (!ok) break;
                }
                if (!ok) break;
            }
            if (!ok) continue;

            // The span must actually erase something once neighboring stamps
            // are accounted for (wide strokes can fully cover a tiny span).
            std::set<PixelCoord> kept_nearby;
            for (int i = 0; i < n; ++i) {
                int rel = closed[ci] ? ((i - s) % n + n) % n : i - s;
                if (rel >= 0 && rel < gap_len) continue; // the span itself
                for (PixelCoord d : offsets)
                    kept_nearby.insert({chain[i].row + d.row, chain[i].col + d.col});
            }
            bool erases = false;
            for (int i = 0; i < gap_len && !erases; ++i) {
                PixelCoord p = chain[(s + i) % n];
                for (PixelCoord d : offsets)
                    if (!kept_nearby.count({p.row + d.row, p.col + d.col})) {
                        erases = true;
                        break;
                    }
            }
            if (!erases) continue;

            // Reject spans with a noise speck nearby (faces included).
            bool clear = true;
            for (int rel = -1; rel <= gap_len && clear; ++rel) {
                PixelCoord p = chain[((s + rel) % n + n) % n];
                for (PixelCoord d : offsets) {
                    int rr = p.row + d.row, cc = p.col + d.col;
                    if (rr >= 0 && rr < height && cc >= 0 && cc < width &&
                        near_speck[static_cast<std::size_t>(rr) * width + cc]) {
                        clear = false;
                        break;
                    }
                }
            }
            if (!clear) continue;

            placements.push_back({ci, s, end_a, end_b});
            placed = true;
        }
        if (!placed)
            throw std::runtime_error(
                "inject_gaps: could not place gap (insufficient curve length)");
    }

    // Erased chain positions per curve, then the kept stamp footprint.
    std::vector<std::set<int>> erased_positions(n_curves);
    for (const Placement& p : placements) {
        const int n = static_cast<int>(map.curve_chains[p.curve].size());
        for (int i = 0; i < gap_len; ++i)
            erased_positions[p.curve].insert((p.start + i) % n);
    }
    std::set<PixelCoord> kept;
    for (int ci = 0; ci < n_curves; ++ci) {
        const auto& chain = map.curve_chains[ci];
        for (int i = 0; i < static_cast<int>(chain.size()); ++i) {
            if (erased_positions[ci].count(i)) continue;
            for (PixelCoord d : offsets)
                kept.insert({chain[i].row + d.row, chain[i].col + d.col});
        }
    }

    BrokenMap out;
    out.image = map.image;
    for (const Placement& p : placements) {
        const auto& chain = map.curve_chains[p.curve];
        const int n = static_cast<int>(chain.size());
        GapRecord rec;
        rec.curve_index = p.curve;
        rec.end_a = p.end_a;
        rec.end_b = p.end_b;
        std::set<PixelCoord> seen;
        for (int i = 0; i < gap_len; ++i) {
            PixelCoord base = chain[(p.start + i) % n];
            for (PixelCoord d : offsets) {
                PixelCoord px{base.row + d.row, base.col + d.col};
                if (kept.count(px) || !seen.insert(px).second) continue;
                rec.erased.push_back(px);
                out.image.set(px, map.options.background);
            }
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

namespace {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 == 0.0) return norm(p - a);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + ab * t));
}

double point_polyline_distance(Vec2 p, const std::vector<Vec2>& poly) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < poly.size(); ++i)
        best = std::min(best, point_segment_distance(p, poly[i], poly[i + 1]));
    return best;
}

bool pair_matches_record(const MatchPair& pair, const GapRecord& rec) {
    auto close = [](PixelCoord a, PixelCoord b) { return chebyshev(a, b) <= 1; };
    return (close(pair.a.pos, rec.end_a) && close(pair.b.pos, rec.end_b)) ||
           (close(pair.a.pos, rec.end_b) && close(pair.b.pos, rec.end_a));
}

} // namespace

EvalMetrics evaluate(std::span<const GapRecord> records, std::span<const MatchPair> pairs,
                     std::span<const ReconnectionPath> paths,
                     const std::vector<std::vector<Vec2>>& truth_curves) {
    EvalMetrics metrics;
    if (records.empty()) {
        metrics.pairing_accuracy = 1.0;
        return metrics;
    }

    std::vector<char> pair_used(pairs.size(), 0);
    int matched = 0;
    double deviation_sum = 0.0;
    int deviation_gaps = 0;

    for (const GapRecord& rec : records) {
        if (rec.curve_index < 0 || rec.curve_index >= static_cast<int>(truth_curves.size()))
            throw std::invalid_argument("evaluate: record references an unknown curve");
        int found = -1;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (pair_used[i]) continue;
            if (pair_matches_record(pairs[i], rec)) {
                found = static_cast<int>(i);
                break;
            }
        }
        if (found < 0) continue;
        pair_used[found] = 1;
        ++matched;

        const ReconnectionPath* applied = nullptr;
        for (const ReconnectionPath& path : paths) {
            if (path.pair.a.pos == pairs[found].a.pos && path.pair.b.pos == pairs[found].b.pos) {
                applied = &path;
                break;
            }
        }
        if (!applied || applied->pixels.empty()) continue;
        ++metrics.gaps_closed;

        const std::vector<Vec2>& truth = truth_curves[rec.curve_index];
        double sum = 0.0;
        for (PixelCoord px : applied->pixels) {
            double d = point_polyline_distance(
                Vec2{static_cast<double>(px.row), static_cast<double>(px.col)}, truth);
            sum += d;
            metrics.max_deviation = std::max(metrics.max_deviation, d);
        }
        deviation_sum += sum / static_cast<double>(applied->pixels.size());
        ++deviation_gaps;
    }

    metrics.pairing_accuracy = static_cast<double>(matched) / static_cast<double>(records.size());
    if (deviation_gaps > 0)
        metrics.mean_deviation = deviation_sum / static_cast<double>(deviation_gaps);
    return metrics;
}

} // namespace cmend
