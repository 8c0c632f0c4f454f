#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "robinlab/fields.hpp"
#include "robinlab/quadrature.hpp"

using namespace robinlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Gauss panel integrates polynomials exactly", "[quadrature]") {
    // Degree-13 exactness of the 7-point rule.
    auto poly = [](double x) { return ((x - 0.3) * x + 2) * x * x * x - 5 * x + 1; };
    auto anti = [](double x) {
        return std::pow(x, 6) / 6 - 0.3 * std::pow(x, 5) / 5 + 2 * std::pow(x, 4) / 4 -
               5 * x * x / 2 + x;
    };
    REQUIRE_THAT(quad::gauss7(poly, -1.0, 2.0), WithinAbs(anti(2.0) - anti(-1.0), 1e-13));
}

TEST_CASE("adaptive 1d integration of smooth fields", "[quadrature]") {
    auto field = ScalarField::expression("sin(3*x)*exp(x)", 1);
    auto one = [](double) { return 1.0; };
    // Antiderivative of e^x sin 3x: e^x (sin 3x - 3 cos 3x)/10.
    auto anti = [](double x) {
        return std::exp(x) * (std::sin(3 * x) - 3 * std::cos(3 * x)) / 10.0;
    };
    const double got = quad::integrate_1d(one, 0.0, 2.0, field);
    REQUIRE_THAT(got, WithinRel(anti(2.0) - anti(0.0), 1e-10));
}

TEST_CASE("graded quadrature handles integrable power singularities", "[quadrature]") {
    // int_a^b |x-c|^(-alpha) dx, closed form via the antiderivative
    // sign(x-c) |x-c|^(1-alpha) / (1-alpha).
    const double alpha = 0.5, c = 0.25;
    auto field = ScalarField::singular_power(Point{c, 0.0}, 1.0, alpha);
    auto one = [](double) { return 1.0; };
    auto prim = [&](double x) {
        const double d = x - c;
        const double s = d >= 0 ? 1.0 : -1.0;
        return s * std::pow(std::fabs(d), 1 - alpha) / (1 - alpha);
    };

    SECTION("singularity interior to the panel") {
        const double got = quad::integrate_1d(one, 0.0, 1.0, field);
        REQUIRE_THAT(got, WithinRel(prim(1.0) - prim(0.0), 1e-9));
    }
    SECTION("singularity at the left endpoint") {
        const double got = quad::integrate_1d(one, c, 1.0, field);
        REQUIRE_THAT(got, WithinRel(prim(1.0) - prim(c), 1e-9));
    }
    SECTION("strong singularity alpha = 0.9") {
        auto f9 = ScalarField::singular_power(Point{0.0, 0.0}, 2.0, 0.9);
        const double exact = 2.0 * std::pow(1.0, 0.1) / 0.1;
        REQUIRE_THAT(quad::integrate_1d(one, 0.0, 1.0, f9), WithinRel(exact, 1e-8));
    }
}

TEST_CASE("triangle rule integrates low-order polynomials exactly", "[quadrature]") {
    quad::Tri t{Point{0, 0}, Point{1, 0}, Point{0, 1}};
    // int over the unit simplex: x^a y^b -> a! b! / (a+b+2)!.
    auto mono = [&](int a, int b) {
        return quad::tri7([a, b](const Point& p) {
            return std::pow(p[0], a) * std::pow(p[1], b);
        }, t);
    };
    REQUIRE_THAT(mono(0, 0), WithinAbs(0.5, 1e-15));
    REQUIRE_THAT(mono(1, 0), WithinAbs(1.0 / 6, 1e-15));
    REQUIRE_THAT(mono(2, 1), WithinAbs(2.0 / 120, 1e-15));
    REQUIRE_THAT(mono(3, 2), WithinAbs(6.0 * 2 / 5040, 1e-15));
}

TEST_CASE("adaptive triangle integration of smooth fields", "[quadrature]") {
    auto field = ScalarField::expression("cos(x)*sin(y)", 2);
    quad::Tri t{Point{0, 0}, Point{2, 0}, Point{0, 2}};
    auto one = [](const Point&) { return 1.0; };
    // int over {x,y >= 0, x+y <= 2} of cos x sin y = sin(2)/2 - cos(2).
    const double exact = std::sin(2.0) / 2 - std::cos(2.0);
    const double got = quad::integrate_tri(one, t, field);
    REQUIRE_THAT(got, WithinRel(exact, 1e-9));
}

TEST_CASE("graded triangle quadrature integrates point singularities", "[quadrature]") {
    // int over triangle of |p - c|^(-alpha): compare against intensive
    // adaptive refinement reference computed with a smaller tolerance; the
    // polar bound guarantees integrability for alpha < 1 (indeed < 2).
    const double alpha = 0.8;
    auto field = ScalarField::singular_power(Point{0.0, 0.0}, 1.0, alpha);
    quad::Tri t{Point{0, 0}, Point{1, 0}, Point{0, 1}};
    auto one = [](const Point&) { return 1.0; };

    // Closed form on the unit right triangle by polar coordinates:
    // int_0^(pi/2) int_0^(R(phi)) r^(1-alpha) dr dphi with
    // R(phi) = 1/(cos phi + sin phi).
    double exact = 0;
    const int nphi = 20000;
    for (int i = 0; i < nphi; ++i) {
        const double phi = (i + 0.5) * (M_PI / 2) / nphi;
        const double R = 1.0 / (std::cos(phi) + std::sin(phi));
        exact += std::pow(R, 2 - alpha) / (2 - alpha) * (M_PI / 2) / nphi;
    }
    const double got = quad::integrate_tri(one, t, field);
    REQUIRE_THAT(got, WithinRel(exact, 1e-5));
}

TEST_CASE("singular field construction guards", "[fields]") {
    REQUIRE_THROWS_AS(ScalarField::singular_power(Point{0, 0}, 1.0, 1.0), Error);
    REQUIRE_THROWS_AS(ScalarField::singular_power(Point{0, 0}, 1.0, -0.1), Error);
    auto f = ScalarField::singular_power(Point{0.5, 0.0}, -2.0, 0.5);
    REQUIRE(f(Point{0.75, 0.0}) == -2.0 * std::pow(0.25, -0.5));
}

TEST_CASE("expression fields evaluate and reject malformed input", "[fields]") {
    auto f = ScalarField::expression("2*x + 1", 1);
    REQUIRE_THAT(f(Point{0.25, 0.0}), WithinAbs(1.5, 1e-15));
    auto g = ScalarField::expression("x*y - min(x, y)", 2);
    REQUIRE_THAT(g(Point{2.0, 3.0}), WithinAbs(4.0, 1e-15));
    REQUIRE_THROWS_AS(ScalarField::expression("2*(x", 1), Error);   // unbalanced paren
    REQUIRE_THROWS_AS(ScalarField::expression("x+*2", 1), Error);   // dangling operator
    REQUIRE_THROWS_AS(ScalarField::expression("x 2", 1), Error);    // trailing garbage
    REQUIRE_THROWS_AS(ScalarField::expression("y", 1), Error);  // unknown variable in 1d
}
