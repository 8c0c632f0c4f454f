// Generalized eigenvalue machinery for the pencil (A, B) with B symmetric
// positive definite: smallest eigenvalues by shift-and-invert power iteration
// with B-orthogonal deflation, polished by Rayleigh-quotient inverse
// iteration. On top of it: the principal eigenvalue/eigenfunction of the
// Robin form, the coercivity shift mu, the spectral-gap constant of the
// weighted comparison inequality, and the discrete Picone defect.
#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "robinlab/forms.hpp"

namespace robinlab {

struct EigenPair {
    double value = 0;
    Vec vector;
    bool converged = false;
    int iterations = 0;
    double residual = 0;  // |A v - value B v| in the B^-1 norm, v B-normalized
};

struct SpectrumOptions {
    double tol = 1e-12;        // Rayleigh-quotient increment tolerance
    int max_iterations = 10000;
    int polish_steps = 2;      // Rayleigh-quotient inverse-iteration refinements
};

namespace detail {

class PencilSolver {
  public:
    PencilSolver(SpMat A, SpMat B, SpectrumOptions opts = {})
        : A_(std::move(A)), B_(std::move(B)), opts_(opts) {
        require(A_.rows() == A_.cols() && B_.rows() == B_.cols() && A_.rows() == B_.rows(),
                "eigensolver: pencil matrices must be square and of equal size");
        bfact_.compute(B_);
        require(bfact_.info() == Eigen::Success &&
                    (bfact_.vectorD().array() > 0).all(),
                "eigensolver: right-hand matrix of the pencil must be positive definite");

        double s = 1.0;
        bool found = false;
        for (int t = 0; t < 80 && !found; ++t) {
            SpMat C = A_ + s * B_;
            fact_.compute(C);
            if (fact_.info() == Eigen::Success && (fact_.vectorD().array() > 0).all()) {
                shift_ = s;
                found = true;
            } else {
                s *= 4;
            }
        }
        require(found, "eigensolver: no positive definite shift of the pencil found");
    }

    // Smallest eigenvalue orthogonal (in B) to the already-computed pairs.
    EigenPair next(const std::vector<Vec>& prior, std::uint64_t seed) const {
        const Eigen::Index n = A_.rows();
        Vec v(n);
        if (prior.empty()) {
            v.setOnes();
        } else {
            Rng rng(seed);
            for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.next_in(-1.0, 1.0);
        }
        deflate(v, prior);
        double nv = b_norm(v);
        require(nv > 0, "eigensolver: deflated start vector vanished");
        v /= nv;

        EigenPair out;
        double rho_prev = std::numeric_limits<double>::infinity();
        for (int it = 0; it < opts_.max_iterations; ++it) {
            Vec w = fact_.solve(B_ * v);
            deflate(w, prior);
            const double nw = b_norm(w);
            require(nw > 0, "eigensolver: deflation collapsed the iterate");
            w /= nw;
            const double rho = w.dot(A_ * w) / w.dot(B_ * w);
            v = w;
            out.iterations = it + 1;
            if (std::fabs(rho - rho_prev) <= opts_.tol * (1 + std::fabs(rho))) {
                out.converged = true;
                break;
            }
            rho_prev = rho;
        }

        // Rayleigh-quotient inverse iteration: cubic local refinement.
        for (int step = 0; step < opts_.polish_steps; ++step) {
            const double rho = v.dot(A_ * v) / v.dot(B_ * v);
            Eigen::SparseLU<SpMat> lu;
            SpMat C = A_ - rho * B_;
            lu.analyzePattern(C);
            lu.factorize(C);
            if (lu.info() != Eigen::Success) break;  // rho is (numerically) exact
            Vec w = lu.solve(B_ * v);
            if (!w.allFinite()) break;
            deflate(w, prior);
            const double nw = b_norm(w);
            if (!(nw > 0) || !std::isfinite(nw)) break;
            w /= nw;
            if (residual_of(w) <= residual_of(v)) v = w;
        }

        out.value = v.dot(A_ * v) / v.dot(B_ * v);
        out.vector = v;
        out.residual = residual_of(v);
        return out;
    }

    double residual_of(const Vec& v) const {
        const double rho = v.dot(A_ * v) / v.dot(B_ * v);
        Vec r = A_ * v - rho * (B_ * v);
        return std::sqrt(std::max(0.0, r.dot(bfact_.solve(r)))) / b_norm(v);
    }

    // Number of pencil eigenvalues strictly below sigma (Sylvester inertia of
    // A - sigma B).  Returns -1 when the unpivoted factorization breaks down,
    // which can only happen within roundoff of an exact eigenvalue.
    int count_below(double sigma) const {
        Eigen::SimplicialLDLT<SpMat> ldlt;
        SpMat C = A_ - sigma * B_;
        ldlt.compute(C);
        if (ldlt.info() != Eigen::Success || !ldlt.vectorD().allFinite()) return -1;
        return int((ldlt.vectorD().array() < 0).count());
    }

    // Smallest eigenvalue by inertia bisection: immune to the clustering that
    // defeats power iteration (e.g. when the minimizer sits at the top of an
    // h^-2 family of modes spaced only O(eps) apart).
    double smallest_value() const {
        auto cnt = [&](double sigma) {
            for (int nudge = 0; nudge < 8; ++nudge) {
                const int c = count_below(sigma);
                if (c >= 0) return c;
                sigma += 1e-13 * (1.0 + std::fabs(sigma));
            }
            throw Error("eigensolver: inertia factorization failed persistently");
        };
        // A + shift_ B is positive definite, so every eigenvalue exceeds -shift_.
        double lo = -shift_;
        while (cnt(lo) > 0) lo = 2 * lo - 1;  // guard against roundoff at the bound
        Vec ones = Vec::Ones(A_.rows());
        const double rho = ones.dot(A_ * ones) / ones.dot(B_ * ones);
        double hi = rho + 1e-12 * (1 + std::fabs(rho));
        while (cnt(hi) < 1) hi += std::max(1.0, std::fabs(hi));
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (cnt(mid) >= 1)
                hi = mid;
            else
                lo = mid;
        }
        return 0.5 * (lo + hi);
    }

  private:
    double b_norm(const Vec& v) const { return std::sqrt(std::max(0.0, v.dot(B_ * v))); }

    void deflate(Vec& v, const std::vector<Vec>& prior) const {
        for (int pass = 0; pass < 2; ++pass)
            for (const Vec& p : prior) v -= p.dot(B_ * v) * p;  // p is B-normalized
    }

    SpMat A_, B_;
    SpectrumOptions opts_;
    Eigen::SimplicialLDLT<SpMat> fact_;
    Eigen::SimplicialLDLT<SpMat> bfact_;
    double shift_ = 0;
};

}  // namespace detail

// Smallest k eigenvalues of the pencil (A, B), ascending, B-normalized.
inline std::vector<EigenPair> smallest_eigenpairs(const SpMat& A, const SpMat& B, int k,
                                                  SpectrumOptions opts = {}) {
    require(k >= 1 && k <= A.rows(), "eigensolver: invalid eigenvalue count");
    detail::PencilSolver solver(A, B, opts);
    std::vector<EigenPair> out;
    std::vector<Vec> prior;
    for (int m = 0; m < k; ++m) {
        EigenPair p = solver.next(prior, 0x9e3779b97f4a7c15ull + std::uint64_t(m));
        prior.push_back(p.vector);
        out.push_back(std::move(p));
    }
    for (std::size_t i = 1; i < out.size(); ++i)
        require(out[i].value >= out[i - 1].value - 1e-9 * (1 + std::fabs(out[i].value)),
                "eigensolver: deflation produced out-of-order eigenvalues");
    return out;
}

// Eigenvalues of the Robin form against the mass matrix.
inline std::vector<EigenPair> form_eigenvalues(const AssembledForms& F, int k,
                                               SpectrumOptions opts = {}) {
    return smallest_eigenpairs(F.G, F.M, k, opts);
}

// Principal eigenpair: smallest eigenvalue with M-normalized, strictly
// positive eigenfunction (sign fixed by positive mass average).
inline EigenPair principal_eigenpair(const AssembledForms& F, SpectrumOptions opts = {}) {
    EigenPair p = smallest_eigenpairs(F.G, F.M, 1, opts)[0];
    if (F.lumped.dot(p.vector) < 0) p.vector = -p.vector;
    const double mx = p.vector.maxCoeff();
    const double mn = p.vector.minCoeff();
    require(mn > -1e-8 * mx,
            "principal eigenpair: eigenfunction changes sign; the discretization cannot "
            "represent the principal mode (refine the mesh)");
    require(mn > 0,
            "principal eigenpair: eigenfunction touches zero at a node; refine the mesh");
    return p;
}

// Coercivity shift: mu = max(0, -lambda_min(G, M)) + 1, so that
// u'Gu + mu u'Mu >= u'Mu for all u.
inline double coercivity_shift(const AssembledForms& F, SpectrumOptions opts = {}) {
    const double lmin = smallest_eigenpairs(F.G, F.M, 1, opts)[0].value;
    return std::max(0.0, -lmin) + 1.0;
}

// Spectral-gap constant of the weighted comparison inequality: the largest
// c with gamma(u) - int theta u^2 >= c |u|_{H1}^2, i.e. the smallest
// eigenvalue of (G - M_theta, K + M). Requires theta <= lambda_1 nodally;
// the gap degenerates to zero exactly when theta occupies the principal level.
struct GapResult {
    double c_hat = 0;
    bool degenerate = false;
};

inline GapResult weighted_gap(const AssembledForms& F, const ScalarField& theta,
                              double lambda1, SpectrumOptions opts = {}) {
    const Mesh& m = *F.mesh;
    for (int i = 0; i < m.n_nodes(); ++i) {
        const double t = theta(m.nodes[i]);
        require(t <= lambda1 + 1e-10 * (1 + std::fabs(lambda1)),
                "weighted gap: weight exceeds the principal eigenvalue at node " +
                    std::to_string(i));
    }
    SpMat Mtheta = assemble_weighted_mass(F.mesh, theta);
    SpMat A = F.G - Mtheta;
    SpMat B = F.K + F.M;
    GapResult out;
    // The minimizing mode of this pencil may sit inside a cluster of
    // near-identical quotients (spacing far below any iterative tolerance), so
    // the value is located by inertia bisection rather than by iteration.
    detail::PencilSolver solver(A, B, opts);
    out.c_hat = solver.smallest_value();
    if (std::fabs(out.c_hat) < 1e-12) {
        out.c_hat = 0;
        out.degenerate = true;
    }
    return out;
}

// Discrete Picone defect: v'Kv - u'K(v^2 / u) with the nodal interpolation
// of v^2/u. Nonnegative for strictly positive u on meshes whose stiffness
// off-diagonals are nonpositive (intervals; right-triangle meshes).
inline double picone_defect(const AssembledForms& F, const Vec& v, const Vec& u) {
    require(u.size() == v.size() && u.size() == F.n(), "picone defect: size mismatch");
    require(u.minCoeff() > 0,
            "picone defect: comparison function must be strictly positive at every node");
    Vec w(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) w[i] = v[i] * v[i] / u[i];
    return v.dot(F.K * v) - u.dot(F.K * w);
}

}  // namespace robinlab
