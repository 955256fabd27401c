#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace cmend {

// Planar point/vector in image coordinates (row, col), sub-pixel precision.
struct Vec2 {
    double row = 0.0;
    double col = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.row + b.row, a.col + b.col}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.row - b.row, a.col - b.col}; }
    friend Vec2 operator*(Vec2 a, double s) { return {a.row * s, a.col * s}; }
    friend Vec2 operator*(double s, Vec2 a) { return a * s; }
    friend Vec2 operator-(Vec2 a) { return {-a.row, -a.col}; }
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double norm(Vec2 v) { return std::hypot(v.row, v.col); }
inline double dot(Vec2 a, Vec2 b) { return a.row * b.row + a.col * b.col; }

// One cubic piece of a natural spline on [x_start, x_start + h]:
// S(x) = a*(x-x_start)^3 + b*(x-x_start)^2 + c*(x-x_start) + d.
struct SplineSegment {
    double x_start = 0.0;
    double h = 0.0;
    double m0 = 0.0; // second derivative at the left knot
    double m1 = 0.0; // second derivative at the right knot
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    double eval(double x) const {
        double t = x - x_start;
        return ((a * t + b) * t + c) * t + d;
    }
    double deriv(double x) const {
        double t = x - x_start;
        return (3.0 * a * t + 2.0 * b) * t + c;
    }
};

// Natural cubic spline through uniformly spaced knots: second derivatives
// vanish at both ends, interior ones solve the tridiagonal system
// m[i-1] + 4 m[i] + m[i+1] = 6 (y[i-1] - 2 y[i] + y[i+1]) / h^2.
// Requires at least two knots and strictly increasing, uniform xs.
std::vector<SplineSegment> natural_cubic_spline(std::span<const double> xs,
                                                std::span<const double> ys);

// Evaluate a spline at x; queries outside the knot range use the end segments.
double spline_eval(std::span<const SplineSegment> segments, double x);

std::vector<double> spline_interp(std::span<const double> xs, std::span<const double> ys,
                                  std::span<const double> queries);

// Cubic Hermite curve between two points with specified end tangents.
struct HermiteSegment {
    Vec2 p0, p1; // endpoints
    Vec2 t0, t1; // tangents at u = 0 and u = 1
};

// Position at parameter u in [0, 1]:
// P(u) = h00 p0 + h10 t0 + h01 p1 + h11 t1 with the standard cubic basis.
Vec2 hermite_eval(const HermiteSegment& seg, double u);
Vec2 hermite_derivative(const HermiteSegment& seg, double u);

} // namespace cmend
