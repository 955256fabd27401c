#include "cmend/spline.hpp"

#include <algorithm>
#include <stdexcept>

namespace cmend {

std::vector<SplineSegment> natural_cubic_spline(std::span<const double> xs,
                                                std::span<const double> ys) {
    const std::size_t n = xs.size();
    if (n < 2) throw std::invalid_argument("natural_cubic_spline: need at least two knots");
    if (ys.size() != n)
        throw std::invalid_argument("natural_cubic_spline: xs and ys differ in length");
    const double h = xs[1] - xs[0];
    if (!(h > 0.0)) throw std::invalid_argument("natural_cubic_spline: knots must increase");
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double hi = xs[i + 1] - xs[i];
        if (std::fabs(hi - h) > 1e-9 * std::max(1.0, std::fabs(h)))
            throw std::invalid_argument("natural_cubic_spline: knots must be uniformly spaced");
    }

    // Natural end conditions pin m[0] = m[n-1] = 0; solve the interior
    // tridiagonal system (sub/super diagonal 1, main diagonal 4) in place.
    std::vector<double> m(n, 0.0);
    const std::size_t interior = n - 2;
    if (interior > 0) {
        std::vector<double> diag(interior, 4.0), rhs(interior);
        for (std::size_t i = 0; i < interior; ++i)
            rhs[i] = 6.0 * (ys[i] - 2.0 * ys[i + 1] + ys[i + 2]) / (h * h);
        for (std::size_t i = 1; i < interior; ++i) {
            double w = 1.0 / diag[i - 1];
            diag[i] -= w;
            rhs[i] -= w * rhs[i - 1];
        }
        for (std::size_t i = interior; i-- > 0;) {
            double upper = (i + 1 < interior) ? m[i + 2] : 0.0;
            m[i + 1] = (rhs[i] - upper) / diag[i];
        }
    }

    std::vector<SplineSegment> segments(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        SplineSegment& s = segments[i];
        s.x_start = xs[i];
        s.h = h;
        s.m0 = m[i];
        s.m1 = m[i + 1];
        s.a = (s.m1 - s.m0) / (6.0 * h);
        s.b = s.m0 / 2.0;
        s.c = (ys[i + 1] - ys[i]) / h - (s.m1 + 2.0 * s.m0) * h / 6.0;
        s.d = ys[i];
    }
    return segments;
}

double spline_eval(std::span<const SplineSegment> segments, double x) {
    if (segments.empty()) throw std::invalid_argument("spline_eval: no segments");
    std::size_t i = 0;
    while (i + 1 < segments.size() && x >= segments[i + 1].x_start) ++i;
    return segments[i].eval(x);
}

std::vector<double> spline_interp(std::span<const double> xs, std::span<const double> ys,
                                  std::span<const double> queries) {
    auto segments = natural_cubic_spline(xs, ys);
    std::vector<double> out(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i)
        out[i] = spline_eval(segments, queries[i]);
    return out;
}

Vec2 hermite_eval(const HermiteSegment& seg, double u) {
    if (u < 0.0 || u > 1.0)
        throw std::invalid_argument("hermite_eval: parameter outside [0, 1]");
    double u2 = u * u, u3 = u2 * u;
    double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    double h10 = u3 - 2.0 * u2 + u;
    double h01 = -2.0 * u3 + 3.0 * u2;
    double h11 = u3 - u2;
    return h00 * seg.p0 + h10 * seg.t0 + h01 * seg.p1 + h11 * seg.t1;
}

Vec2 hermite_derivative(const HermiteSegment& seg, double u) {
    if (u < 0.0 || u > 1.0)
        throw std::invalid_argument("hermite_derivative: parameter outside [0, 1]");
    double u2 = u * u;
    double d00 = 6.0 * u2 - 6.0 * u;
    double d10 = 3.0 * u2 - 4.0 * u + 1.0;
    double d01 = -6.0 * u2 + 6.0 * u;
    double d11 = 3.0 * u2 - 2.0 * u;
    return d00 * seg.p0 + d10 * seg.t0 + d01 * seg.p1 + d11 * seg.t1;
}

} // namespace cmend
