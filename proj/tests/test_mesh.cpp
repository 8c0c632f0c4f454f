#include <catch2/catch_amalgamated.hpp>

#include "robinlab/mesh.hpp"

using namespace robinlab;

TEST_CASE("interval mesh geometry", "[mesh]") {
    auto m = build_interval_mesh(0.0, 1.0, 8);
    REQUIRE(m.dim == 1);
    REQUIRE(m.n_nodes() == 9);
    REQUIRE(m.n_cells() == 8);
    REQUIRE(m.nodes.front()[0] == 0.0);
    REQUIRE(m.nodes.back()[0] == 1.0);

    double total = 0;
    for (int c = 0; c < m.n_cells(); ++c) total += m.cell_measure(c);
    REQUIRE_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(m.domain_measure(), Catch::Matchers::WithinAbs(1.0, 1e-15));

    // Robin boundary of an interval: two endpoints, unit counting measure.
    REQUIRE(m.boundary_facets.size() == 2);
    REQUIRE_THAT(m.boundary_measure(), Catch::Matchers::WithinAbs(2.0, 1e-15));
    REQUIRE(m.is_boundary[0]);
    REQUIRE(m.is_boundary[8]);
    REQUIRE_FALSE(m.is_boundary[4]);
}

TEST_CASE("interval mesh halving is exact in floating point", "[mesh]") {
    auto coarse = build_interval_mesh(0.0, 1.0, 64);
    auto fine = build_interval_mesh(0.0, 1.0, 128);
    REQUIRE(coarse.h / fine.h == 2.0);
    // Every coarse node is a fine node, bitwise.
    for (int i = 0; i < coarse.n_nodes(); ++i)
        REQUIRE(coarse.nodes[i][0] == fine.nodes[2 * i][0]);
}

TEST_CASE("interval mesh rejects degenerate input", "[mesh]") {
    REQUIRE_THROWS_AS(build_interval_mesh(1.0, 0.0, 8), Error);
    REQUIRE_THROWS_AS(build_interval_mesh(0.0, 1.0, 1), Error);
    REQUIRE_THROWS_AS(build_interval_mesh(0.0, std::numeric_limits<double>::infinity(), 8),
                      Error);
}

TEST_CASE("rectangle mesh geometry", "[mesh]") {
    auto m = build_rectangle_mesh(2.0, 1.0, 8, 4);
    REQUIRE(m.dim == 2);
    REQUIRE(m.n_nodes() == 9 * 5);
    REQUIRE(m.n_cells() == 2 * 8 * 4);

    double total = 0;
    for (int c = 0; c < m.n_cells(); ++c) {
        REQUIRE(m.cell_measure(c) > 0);  // consistent orientation
        total += m.cell_measure(c);
    }
    REQUIRE_THAT(total, Catch::Matchers::WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(m.boundary_measure(), Catch::Matchers::WithinAbs(6.0, 1e-12));

    int boundary_nodes = 0;
    for (bool b : m.is_boundary) boundary_nodes += b ? 1 : 0;
    REQUIRE(boundary_nodes == 2 * 8 + 2 * 4);  // perimeter nodes, corners once
}

TEST_CASE("rectangle cells are right triangles", "[mesh]") {
    // The uniform same-diagonal split produces only axis-aligned right
    // triangles, the non-obtuse condition behind the discrete comparison
    // inequalities.
    auto m = build_rectangle_mesh(1.0, 1.0, 4, 4);
    for (int c = 0; c < m.n_cells(); ++c) {
        const auto& cell = m.cells[c];
        double dots[3];
        for (int k = 0; k < 3; ++k) {
            const auto& a = m.nodes[cell[k]];
            const auto& b = m.nodes[cell[(k + 1) % 3]];
            const auto& d = m.nodes[cell[(k + 2) % 3]];
            dots[k] = (b[0] - a[0]) * (d[0] - a[0]) + (b[1] - a[1]) * (d[1] - a[1]);
        }
        int right = 0, acute = 0;
        for (double v : dots) {
            if (std::fabs(v) < 1e-14) ++right;
            if (v > 1e-14) ++acute;
        }
        REQUIRE(right == 1);
        REQUIRE(acute == 2);
    }
}

TEST_CASE("rectangle mesh rejects degenerate input", "[mesh]") {
    REQUIRE_THROWS_AS(build_rectangle_mesh(0.0, 1.0, 4, 4), Error);
    REQUIRE_THROWS_AS(build_rectangle_mesh(1.0, 1.0, 1, 4), Error);
}
