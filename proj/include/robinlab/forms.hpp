// P1 assembly of the bilinear forms on interval/rectangle meshes:
//   K   stiffness            (Du, Dv)
//   M   mass                 (u, v)
//   Mxi potential-weighted   (xi u, v)
//   B   boundary mass        (beta u, v) over the boundary
//   G = K + Mxi + B          the principal form
// plus lumped weights (row sums of M) used for nodal reaction quadrature.
// Assembly order is fixed, so repeated runs are bit-identical.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "robinlab/core.hpp"
#include "robinlab/fields.hpp"
#include "robinlab/mesh.hpp"
#include "robinlab/quadrature.hpp"

namespace robinlab {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

struct AssembledForms {
    std::shared_ptr<const Mesh> mesh;
    ScalarField xi, beta;
    SpMat K, M, Mxi, B, G;
    Vec lumped;  // lumped mass weights, = integral of each hat function

    int n() const { return int(lumped.size()); }

    double h1_norm_sq(const Vec& u) const {
        return u.dot(K * u) + u.dot(M * u);
    }
    double h1_norm(const Vec& u) const { return std::sqrt(std::max(0.0, h1_norm_sq(u))); }

    // gamma(u) = |Du|^2 + int xi u^2 + int_boundary beta u^2
    double gamma(const Vec& u) const { return u.dot(G * u); }
};

namespace detail {

// Affine coefficients of the P1 shape functions over one cell, so the same
// evaluators remain valid on quadrature subdivisions of that cell.
struct CellShapes {
    int k;  // 2 or 3 nodes
    std::array<std::array<double, 3>, 3> coef;  // phi_a(z) = c0 + c1 x + c2 y

    double phi(int a, const Point& z) const {
        return coef[a][0] + coef[a][1] * z[0] + coef[a][2] * z[1];
    }
};

inline CellShapes interval_shapes(double x0, double x1) {
    CellShapes s{};
    s.k = 2;
    const double h = x1 - x0;
    s.coef[0] = {x1 / h, -1.0 / h, 0.0};
    s.coef[1] = {-x0 / h, 1.0 / h, 0.0};
    return s;
}

inline CellShapes triangle_shapes(const Point& p0, const Point& p1, const Point& p2) {
    CellShapes s{};
    s.k = 3;
    const double det =
        (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    const Point ps[3] = {p0, p1, p2};
    for (int a = 0; a < 3; ++a) {
        const Point& pb = ps[(a + 1) % 3];
        const Point& pc = ps[(a + 2) % 3];
        // phi_a = (cross of edge opposite a) / det, affine in (x, y)
        s.coef[a][0] = (pb[0] * pc[1] - pc[0] * pb[1]) / det;
        s.coef[a][1] = (pb[1] - pc[1]) / det;
        s.coef[a][2] = (pc[0] - pb[0]) / det;
    }
    return s;
}

}  // namespace detail

inline AssembledForms assemble(std::shared_ptr<const Mesh> mesh, const ScalarField& xi,
                               const ScalarField& beta) {
    const Mesh& m = *mesh;
    const int n = m.n_nodes();

    if (xi.singular())
        require(xi.singular_strength() <= 0,
                "forms: singular potential with positive strength is unbounded above; "
                "the potential must have a bounded positive part");
    require(beta.kind() != FieldKind::SingularPower,
            "forms: boundary coefficient must be bounded; singular kind rejected");

    std::vector<Eigen::Triplet<double>> tK, tM, tX, tB;
    tK.reserve(std::size_t(9) * m.n_cells());
    tM.reserve(std::size_t(9) * m.n_cells());
    tX.reserve(std::size_t(9) * m.n_cells());

    for (int c = 0; c < m.n_cells(); ++c) {
        const auto& cell = m.cells[c];
        if (m.dim == 1) {
            const int i = cell[0], j = cell[1];
            const double x0 = m.nodes[i][0], x1 = m.nodes[j][0];
            const double h = x1 - x0;
            const double kloc = 1.0 / h;
            tK.emplace_back(i, i, kloc);
            tK.emplace_back(j, j, kloc);
            tK.emplace_back(i, j, -kloc);
            tK.emplace_back(j, i, -kloc);

            const double m2 = h / 3.0, m1 = h / 6.0;
            tM.emplace_back(i, i, m2);
            tM.emplace_back(j, j, m2);
            tM.emplace_back(i, j, m1);
            tM.emplace_back(j, i, m1);

            if (xi.is_constant()) {
                const double v = xi.constant_value();
                tX.emplace_back(i, i, v * m2);
                tX.emplace_back(j, j, v * m2);
                tX.emplace_back(i, j, v * m1);
                tX.emplace_back(j, i, v * m1);
            } else {
                const auto sh = detail::interval_shapes(x0, x1);
                const int ids[2] = {i, j};
                for (int a = 0; a < 2; ++a)
                    for (int b = a; b < 2; ++b) {
                        auto env = [&](double z) {
                            const Point p{z, 0.0};
                            return sh.phi(a, p) * sh.phi(b, p);
                        };
                        const double v = quad::integrate_1d(env, x0, x1, xi);
                        tX.emplace_back(ids[a], ids[b], v);
                        if (a != b) tX.emplace_back(ids[b], ids[a], v);
                    }
            }
        } else {
            const int ids[3] = {cell[0], cell[1], cell[2]};
            const Point p0 = m.nodes[ids[0]], p1 = m.nodes[ids[1]], p2 = m.nodes[ids[2]];
            const double area = m.cell_measure(c);

            // Gradient of phi_a is constant: (b_a, c_a) / (2 area).
            const double bb[3] = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
            const double cc[3] = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    tK.emplace_back(ids[a], ids[b], (bb[a] * bb[b] + cc[a] * cc[b]) / (4.0 * area));

            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    tM.emplace_back(ids[a], ids[b], area / 12.0 * (a == b ? 2.0 : 1.0));

            if (xi.is_constant()) {
                const double v = xi.constant_value();
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        tX.emplace_back(ids[a], ids[b], v * area / 12.0 * (a == b ? 2.0 : 1.0));
            } else {
                const auto sh = detail::triangle_shapes(p0, p1, p2);
                const quad::Tri tri{p0, p1, p2};
                for (int a = 0; a < 3; ++a)
                    for (int b = a; b < 3; ++b) {
                        auto env = [&](const Point& p) {
                            return sh.phi(a, p) * sh.phi(b, p);
                        };
                        const double v = quad::integrate_tri(env, tri, xi);
                        tX.emplace_back(ids[a], ids[b], v);
                        if (a != b) tX.emplace_back(ids[b], ids[a], v);
                    }
            }
        }
    }

    for (const auto& fct : m.boundary_facets) {
        if (m.dim == 1) {
            const int i = fct.nodes[0];
            const double v = beta(m.nodes[i]);
            require(v >= 0, "forms: boundary coefficient must be >= 0 (violated at x = " +
                                fmt_short(m.nodes[i][0]) + ")");
            tB.emplace_back(i, i, v * fct.measure);
        } else {
            const int i = fct.nodes[0], j = fct.nodes[1];
            const Point pi = m.nodes[i], pj = m.nodes[j];
            const double L = fct.measure;
            if (beta.is_constant()) {
                const double v = beta.constant_value();
                require(v >= 0, "forms: boundary coefficient must be >= 0");
                tB.emplace_back(i, i, v * L / 3.0);
                tB.emplace_back(j, j, v * L / 3.0);
                tB.emplace_back(i, j, v * L / 6.0);
                tB.emplace_back(j, i, v * L / 6.0);
            } else {
                double e[3] = {0, 0, 0};  // entries (i,i), (j,j), (i,j)
                for (int k = 0; k < 3; ++k) {
                    const double s = 0.5 * (1.0 + quad::kG3Nodes[k]);
                    const double w = 0.5 * quad::kG3Weights[k] * L;
                    const Point z{pi[0] + s * (pj[0] - pi[0]), pi[1] + s * (pj[1] - pi[1])};
                    const double v = beta(z);
                    require(v >= 0,
                            "forms: boundary coefficient must be >= 0 (violated at x = " +
                                fmt_short(z[0]) + ", y = " + fmt_short(z[1]) + ")");
                    e[0] += w * v * (1 - s) * (1 - s);
                    e[1] += w * v * s * s;
                    e[2] += w * v * s * (1 - s);
                }
                tB.emplace_back(i, i, e[0]);
                tB.emplace_back(j, j, e[1]);
                tB.emplace_back(i, j, e[2]);
                tB.emplace_back(j, i, e[2]);
            }
        }
    }

    AssembledForms out;
    out.mesh = std::move(mesh);
    out.xi = xi;
    out.beta = beta;
    out.K.resize(n, n);
    out.M.resize(n, n);
    out.Mxi.resize(n, n);
    out.B.resize(n, n);
    out.K.setFromTriplets(tK.begin(), tK.end());
    out.M.setFromTriplets(tM.begin(), tM.end());
    out.Mxi.setFromTriplets(tX.begin(), tX.end());
    out.B.setFromTriplets(tB.begin(), tB.end());
    out.G = out.K + out.Mxi + out.B;

    out.lumped = out.M * Vec::Ones(n);
    return out;
}

// Mass matrix weighted by a scalar field: entries int w phi_a phi_b.
inline SpMat assemble_weighted_mass(std::shared_ptr<const Mesh> mesh, const ScalarField& w) {
    return assemble(std::move(mesh), w, ScalarField::constant(0.0)).Mxi;
}

// COO text: one "row col value" line per stored entry, sorted by (row, col).
inline std::string to_coo_text(const SpMat& A) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(A.nonZeros());
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it)
            trip.emplace_back(int(it.row()), int(it.col()), it.value());
    std::sort(trip.begin(), trip.end(), [](const auto& a, const auto& b) {
        return a.row() != b.row() ? a.row() < b.row() : a.col() < b.col();
    });
    std::string s;
    for (const auto& t : trip)
        s += std::to_string(t.row()) + " " + std::to_string(t.col()) + " " +
             fmt_full(t.value()) + "\n";
    return s;
}

}  // namespace robinlab
