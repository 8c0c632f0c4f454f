// Quadrature for cell integrals of coefficient fields against P1 shape pairs.
// Smooth fields use fixed Gauss rules (exact for the polynomial integrands the
// assembly produces); singular fields use adaptive subdivision refined until
// the relative cell-integral change drops below 1e-10, with the singular
// point structurally excluded from all evaluation nodes: remaining slivers
// around it are dropped only once their analytic tail bound is below
// tolerance.
//
// Panel acceptance measures the split-vs-whole change against the larger of
// the local panel value and an error budget: the cell-level L1 scale divided
// down in proportion to panel measure. A pure-relative criterion would be
// unreachable where the envelope vanishes (shape products are zero along
// element edges), forcing full-depth recursion on panels that contribute
// nothing; the budgeted floor keeps the summed error at the advertised
// relative level while letting negligible panels terminate immediately.
#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "robinlab/core.hpp"
#include "robinlab/fields.hpp"

namespace robinlab::quad {

struct Options {
    double rel_tol = 1e-10;
    int max_depth = 48;
};

// 7-point Gauss-Legendre on [-1,1], degree 13.
inline constexpr std::array<double, 7> kG7Nodes = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
    0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
inline constexpr std::array<double, 7> kG7Weights = {
    0.1294849661688697, 0.2797053914892766, 0.3818300505051189, 0.4179591836734694,
    0.3818300505051189, 0.2797053914892766, 0.1294849661688697};

// 3-point Gauss-Legendre on [-1,1], degree 5 (boundary edges).
inline constexpr std::array<double, 3> kG3Nodes = {-0.7745966692414834, 0.0,
                                                   0.7745966692414834};
inline constexpr std::array<double, 3> kG3Weights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

// 7-point degree-5 symmetric triangle rule; weights sum to 1 (area factors
// applied by the caller).
struct TriPoint {
    double l0, l1, l2, w;
};
inline const std::array<TriPoint, 7> kTri7 = {{
    {1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225},
    {0.0597158717897698, 0.4701420641051151, 0.4701420641051151, 0.1323941527885062},
    {0.4701420641051151, 0.0597158717897698, 0.4701420641051151, 0.1323941527885062},
    {0.4701420641051151, 0.4701420641051151, 0.0597158717897698, 0.1323941527885062},
    {0.7974269853530873, 0.1012865073234563, 0.1012865073234563, 0.1259391805448271},
    {0.1012865073234563, 0.7974269853530873, 0.1012865073234563, 0.1259391805448271},
    {0.1012865073234563, 0.1012865073234563, 0.7974269853530873, 0.1259391805448271},
}};

using Fn1 = std::function<double(double)>;

inline double gauss7(const Fn1& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0;
    for (int k = 0; k < 7; ++k) s += kG7Weights[k] * f(mid + half * kG7Nodes[k]);
    return s * half;
}

namespace detail {

inline double adaptive_1d(const Fn1& f, double a, double b, double abs_floor, int depth,
                          const Options& opt) {
    const double whole = gauss7(f, a, b);
    const double mid = 0.5 * (a + b);
    const double parts = gauss7(f, a, mid) + gauss7(f, mid, b);
    if (depth >= opt.max_depth ||
        std::fabs(parts - whole) <= opt.rel_tol * std::max(std::fabs(parts), abs_floor))
        return parts;
    // Halve the error budget with the panel measure so the floors of all
    // accepted panels sum back to the cell-level scale.
    return adaptive_1d(f, a, mid, 0.5 * abs_floor, depth + 1, opt) +
           adaptive_1d(f, mid, b, 0.5 * abs_floor, depth + 1, opt);
}

// Integral over [a,b] of s0*|x-c|^(-alpha) * env(x) where c is an endpoint
// (c == a or c == b) and env is smooth.  Grading substitution |x-c| = t^p with
// p = 4/(1-alpha) turns the integrand into p*s0 * t^3 * env(c +- t^p): the
// power factors are combined analytically (exponent p-1-p*alpha = 3), so the
// singular part is evaluated from the exact distance t^p and never from the
// rounded coordinate x - only the smooth envelope sees x, where rounding onto
// the ulp grid near c is harmless.  Plain adaptive Gauss then reaches full
// precision; quadrature nodes are strictly interior, so t > 0 always.
inline double graded_endpoint_1d(const Fn1& env, double a, double b, bool singular_at_left,
                                 double alpha, double s0, const Options& opt) {
    const double len = b - a;
    if (!(len > 0)) return 0.0;
    const double c = singular_at_left ? a : b;
    const double sgn = singular_at_left ? 1.0 : -1.0;
    const double p = 4.0 / (1.0 - alpha);
    const double expo = p - 1.0 - p * alpha;  // = 3 up to roundoff
    const double T = std::pow(len, 1.0 / p);
    auto h = [&](double t) {
        double x = c + sgn * std::pow(t, p);
        if (singular_at_left ? x > b : x < a) x = singular_at_left ? b : a;
        return p * s0 * std::pow(t, expo) * env(x);
    };
    const double floor = gauss7([&](double t) { return std::fabs(h(t)); }, 0.0, T);
    return adaptive_1d(h, 0.0, T, floor, 0, opt);
}

}  // namespace detail

// Integral of field(x) * env(x) over [a,b]; env must be smooth on the cell.
inline double integrate_1d(const Fn1& env, double a, double b, const ScalarField& field,
                           const Options& opt = {}) {
    if (!field.singular()) {
        if (field.is_constant()) {
            const double v = field.constant_value();
            return v == 0.0 ? 0.0 : v * gauss7(env, a, b);
        }
        auto f = [&](double x) { return field(Point{x, 0.0}) * env(x); };
        const double floor = gauss7([&](double x) { return std::fabs(f(x)); }, a, b);
        return detail::adaptive_1d(f, a, b, floor, 0, opt);
    }
    const double c = field.singular_center()[0];
    const double alpha = field.singular_exponent();
    const double s0 = field.singular_strength();
    if (c < a || c > b) {
        // Smooth on the cell, but possibly steep near an endpoint: adaptive.
        auto f = [&](double x) { return field(Point{x, 0.0}) * env(x); };
        const double floor = gauss7([&](double x) { return std::fabs(f(x)); }, a, b);
        return detail::adaptive_1d(f, a, b, floor, 0, opt);
    }
    if (c == a) return detail::graded_endpoint_1d(env, a, b, true, alpha, s0, opt);
    if (c == b) return detail::graded_endpoint_1d(env, a, b, false, alpha, s0, opt);
    // Split exactly at the singular point, so quadrature nodes (strictly
    // interior to subintervals) can never coincide with it.
    return detail::graded_endpoint_1d(env, a, c, false, alpha, s0, opt) +
           detail::graded_endpoint_1d(env, c, b, true, alpha, s0, opt);
}

// --- triangles ---------------------------------------------------------

struct Tri {
    Point p0, p1, p2;

    double area() const {
        return 0.5 * std::fabs((p1[0] - p0[0]) * (p2[1] - p0[1]) -
                               (p2[0] - p0[0]) * (p1[1] - p0[1]));
    }
    Point at(double l0, double l1, double l2) const {
        return {l0 * p0[0] + l1 * p1[0] + l2 * p2[0], l0 * p0[1] + l1 * p1[1] + l2 * p2[1]};
    }
    bool contains(const Point& q) const {
        const double d = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        const double b1 =
            ((p1[0] - q[0]) * (p2[1] - q[1]) - (p2[0] - q[0]) * (p1[1] - q[1])) / d;
        const double b2 =
            ((p2[0] - q[0]) * (p0[1] - q[1]) - (p0[0] - q[0]) * (p2[1] - q[1])) / d;
        const double b3 = 1.0 - b1 - b2;
        const double eps = -1e-14;
        return b1 >= eps && b2 >= eps && b3 >= eps;
    }
    double max_vertex_dist(const Point& q) const {
        auto d = [&](const Point& p) {
            return std::sqrt((p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1]));
        };
        return std::max({d(p0), d(p1), d(p2)});
    }
};

using Fn2 = std::function<double(const Point&)>;

inline double tri7(const Fn2& f, const Tri& t) {
    double s = 0;
    for (const auto& q : kTri7) s += q.w * f(t.at(q.l0, q.l1, q.l2));
    return s * t.area();
}

namespace detail {

inline std::array<Tri, 4> split4(const Tri& t) {
    auto mid = [](const Point& a, const Point& b) {
        return Point{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
    };
    const Point m01 = mid(t.p0, t.p1), m12 = mid(t.p1, t.p2), m02 = mid(t.p0, t.p2);
    return {Tri{t.p0, m01, m02}, Tri{m01, t.p1, m12}, Tri{m02, m12, t.p2},
            Tri{m01, m12, m02}};
}

inline double adaptive_tri(const Fn2& f, const Tri& t, double abs_floor, int depth,
                           const Options& opt) {
    const double whole = tri7(f, t);
    const auto kids = split4(t);
    double parts = 0;
    for (const auto& k : kids) parts += tri7(f, k);
    if (depth >= opt.max_depth ||
        std::fabs(parts - whole) <= opt.rel_tol * std::max(std::fabs(parts), abs_floor))
        return parts;
    // Quarter the error budget with the panel measure so the floors of all
    // accepted panels sum back to the cell-level scale.
    double s = 0;
    for (const auto& k : kids) s += adaptive_tri(f, k, 0.25 * abs_floor, depth + 1, opt);
    return s;
}

// Triangle containing the singular point: keep subdividing; children free of
// the point integrate adaptively, the shrinking children around it are
// dropped once their tail bound env * 2*pi*R^(2-alpha)/(2-alpha) is below
// tolerance.  The point may sit on a subdivision edge or vertex (meshes built
// from round coordinates put it there routinely), in which case every child
// whose closed triangle touches it must take the tail-bounded route: handing
// such a child to the plain adaptive rule would chase an unbounded boundary
// integrand to full depth.  A point interior to an edge touches two children,
// and at the next level again at most two, so the recursion stays linear in
// depth.
inline double singular_tri(const Fn2& f, const Tri& t, const Point& c, double alpha,
                           double env, double running, int depth, const Options& opt) {
    const double R = t.max_vertex_dist(c);
    const double tail = env * 2.0 * M_PI * std::pow(R, 2.0 - alpha) / (2.0 - alpha);
    if (tail <= opt.rel_tol * std::max(std::fabs(running), 1e-30) || depth >= opt.max_depth)
        return 0.0;
    double s = 0;
    const auto kids = split4(t);
    std::array<bool, 4> near{};
    for (int i = 0; i < 4; ++i) near[i] = kids[i].contains(c);
    for (int i = 0; i < 4; ++i)
        if (!near[i]) {
            const double floor = tri7([&](const Point& q) { return std::fabs(f(q)); }, kids[i]);
            s += adaptive_tri(f, kids[i], floor, depth, opt);
        }
    for (int i = 0; i < 4; ++i)
        if (near[i]) s += singular_tri(f, kids[i], c, alpha, env, running + s, depth + 1, opt);
    return s;
}

}  // namespace detail

// Integral of field(q) * env(q) over the triangle; env must be smooth.  In
// two dimensions the point-singularity mass scales as R^(2-alpha) with
// 2-alpha > 1, so plain dyadic refinement toward the singular point converges
// within the depth budget and no grading transform is needed.
inline double integrate_tri(const Fn2& env, const Tri& t, const ScalarField& field,
                            const Options& opt = {}) {
    if (!field.singular()) {
        if (field.is_constant()) {
            const double v = field.constant_value();
            return v == 0.0 ? 0.0 : v * tri7(env, t);
        }
        Fn2 f = [&](const Point& q) { return field(q) * env(q); };
        const double floor = tri7([&](const Point& q) { return std::fabs(f(q)); }, t);
        return detail::adaptive_tri(f, t, floor, 0, opt);
    }
    const Point c = field.singular_center();
    const double alpha = field.singular_exponent();
    const double bound = std::fabs(field.singular_strength());
    Fn2 f = [&](const Point& q) { return field(q) * env(q); };
    if (!t.contains(c)) {
        const double floor = tri7([&](const Point& q) { return std::fabs(f(q)); }, t);
        return detail::adaptive_tri(f, t, floor, 0, opt);
    }
    return detail::singular_tri(f, t, c, alpha, bound, 0.0, 0, opt);
}

}  // namespace robinlab::quad
