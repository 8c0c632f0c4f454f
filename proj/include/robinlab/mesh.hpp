// Uniform interval and rectangle meshes with P1-ready connectivity.
// Rectangles are split into two triangles along the same diagonal, so all
// cells are non-obtuse right triangles; boundary facets carry their surface
// measure (counting measure at interval endpoints, edge length in 2D).
#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "robinlab/core.hpp"

namespace robinlab {

struct Facet {
    std::array<int, 2> nodes;  // nodes[1] == -1 for interval endpoints
    double measure;
};

struct Mesh {
    int dim = 1;
    // Interval: [a,b]; rectangle: (0,lx) x (0,ly) stored as a=0,b=lx, ly.
    double a = 0, b = 1, ly = 0;
    int nx = 0, ny = 0;

    std::vector<Point> nodes;
    std::vector<std::array<int, 3>> cells;  // [2] == -1 for segments
    std::vector<Facet> boundary_facets;
    std::vector<bool> is_boundary;
    double h = 0;  // max cell diameter; halves exactly under uniform refinement

    int n_nodes() const { return int(nodes.size()); }
    int n_cells() const { return int(cells.size()); }

    double cell_measure(int c) const {
        const auto& cell = cells[c];
        if (dim == 1) return std::fabs(nodes[cell[1]][0] - nodes[cell[0]][0]);
        const Point& p0 = nodes[cell[0]];
        const Point& p1 = nodes[cell[1]];
        const Point& p2 = nodes[cell[2]];
        return 0.5 * std::fabs((p1[0] - p0[0]) * (p2[1] - p0[1]) -
                               (p2[0] - p0[0]) * (p1[1] - p0[1]));
    }

    double domain_measure() const {
        return dim == 1 ? (b - a) : (b - a) * ly;
    }

    double boundary_measure() const {
        double s = 0;
        for (const auto& f : boundary_facets) s += f.measure;
        return s;
    }

    std::vector<int> interior_nodes() const {
        std::vector<int> out;
        for (int i = 0; i < n_nodes(); ++i)
            if (!is_boundary[i]) out.push_back(i);
        return out;
    }
};

inline Mesh build_interval_mesh(double a, double b, int n) {
    require(std::isfinite(a) && std::isfinite(b), "mesh: interval endpoints must be finite");
    require(b > a, "mesh: interval requires b > a");
    require(n >= 2, "mesh: interval requires at least 2 cells (got " + std::to_string(n) + ")");

    Mesh m;
    m.dim = 1;
    m.a = a;
    m.b = b;
    m.nx = n;
    m.h = (b - a) / n;

    m.nodes.resize(n + 1);
    for (int i = 0; i <= n; ++i) m.nodes[i] = {a + (b - a) * (double(i) / n), 0.0};
    m.nodes[n] = {b, 0.0};

    m.cells.resize(n);
    for (int i = 0; i < n; ++i) m.cells[i] = {i, i + 1, -1};

    m.boundary_facets = {{{0, -1}, 1.0}, {{n, -1}, 1.0}};
    m.is_boundary.assign(n + 1, false);
    m.is_boundary[0] = m.is_boundary[n] = true;
    return m;
}

inline Mesh build_rectangle_mesh(double lx, double ly, int nx, int ny) {
    require(std::isfinite(lx) && std::isfinite(ly), "mesh: rectangle sides must be finite");
    require(lx > 0 && ly > 0, "mesh: rectangle requires positive side lengths");
    require(nx >= 2 && ny >= 2,
            "mesh: rectangle requires at least 2 cells per direction (got " +
                std::to_string(nx) + "x" + std::to_string(ny) + ")");

    Mesh m;
    m.dim = 2;
    m.a = 0;
    m.b = lx;
    m.ly = ly;
    m.nx = nx;
    m.ny = ny;

    const double hx = lx / nx, hy = ly / ny;
    m.h = std::sqrt(hx * hx + hy * hy);

    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };

    m.nodes.resize(std::size_t(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            m.nodes[id(i, j)] = {lx * (double(i) / nx), ly * (double(j) / ny)};

    // Same diagonal (lower-left to upper-right) in every grid cell.
    m.cells.reserve(std::size_t(2) * nx * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            int n00 = id(i, j), n10 = id(i + 1, j), n01 = id(i, j + 1), n11 = id(i + 1, j + 1);
            m.cells.push_back({n00, n10, n11});
            m.cells.push_back({n00, n11, n01});
        }

    m.is_boundary.assign(m.nodes.size(), false);
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            if (i == 0 || i == nx || j == 0 || j == ny) m.is_boundary[id(i, j)] = true;

    for (int i = 0; i < nx; ++i) {
        m.boundary_facets.push_back({{id(i, 0), id(i + 1, 0)}, hx});
        m.boundary_facets.push_back({{id(i, ny), id(i + 1, ny)}, hx});
    }
    for (int j = 0; j < ny; ++j) {
        m.boundary_facets.push_back({{id(0, j), id(0, j + 1)}, hy});
        m.boundary_facets.push_back({{id(nx, j), id(nx, j + 1)}, hy});
    }
    return m;
}

inline std::shared_ptr<const Mesh> make_interval(double a, double b, int n) {
    return std::make_shared<const Mesh>(build_interval_mesh(a, b, n));
}

inline std::shared_ptr<const Mesh> make_rectangle(double lx, double ly, int nx, int ny) {
    return std::make_shared<const Mesh>(build_rectangle_mesh(lx, ly, nx, ny));
}

}  // namespace robinlab
