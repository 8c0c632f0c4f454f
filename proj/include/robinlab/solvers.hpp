// Solvers for the discrete variational problems: preconditioned descent with
// an Armijo line search and Newton tail, eigenfunction seeding, the auxiliary
// concave-absorption problem, order-interval solves, endpoint search, the
// mountain-pass deformation, and certification of existence / nonexistence /
// uniqueness / multiplicity at a fixed parameter value.
#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "robinlab/problem.hpp"
#include "robinlab/spectrum.hpp"

namespace robinlab {

enum class SolveStatus { Converged, MaxIter, DivergedToZero };
enum class Positivity { StrictlyInteriorPositive, Nonnegative, Zero };
enum class DivergencePolicy { Error, CollapseToZero };
enum class IntervalKind { AuxiliaryCapped, ReactionCapped, ReactionFloored, ReactionClamped };
enum class CertKind { Existence, Nonexistence, Uniqueness, Multiplicity };

inline std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIter: return "max-iterations";
        case SolveStatus::DivergedToZero: return "diverged-to-zero";
    }
    return "?";
}

inline std::string to_string(Positivity p) {
    switch (p) {
        case Positivity::StrictlyInteriorPositive: return "strictly-interior-positive";
        case Positivity::Nonnegative: return "nonnegative";
        case Positivity::Zero: return "zero";
    }
    return "?";
}

inline std::string to_string(CertKind k) {
    switch (k) {
        case CertKind::Existence: return "existence";
        case CertKind::Nonexistence: return "nonexistence";
        case CertKind::Uniqueness: return "uniqueness";
        case CertKind::Multiplicity: return "multiplicity";
    }
    return "?";
}

// Pinned tolerances shared by solvers, certification, and branch analysis.
struct Tolerances {
    double tol_grad = 1e-9;           // dual-norm residual for convergence
    double tol_eig = 1e-8;            // eigenvalue comparisons
    double uniq_tol = 1e-6;           // sup-norm agreement of independent solves
    double pos_floor = 1e-10;         // strict interior positivity floor
    double distinctness_floor = 1e-3; // sup-norm separation of a solution pair
    double zero_collapse = 1e-7;      // sup-norm threshold for the zero state
    double mono_tol = 1e-8;           // nodewise slack in branch monotonicity
    double cont_tol = 1e-4;           // final gap in the left-continuity probe
    double rho_mp = 1e-2;             // mountain-pass sphere radius (H1 norm)
};

struct SolveResult {
    Vec u;
    double energy = 0;
    double residual_norm = 0;
    int iterations = 0;
    SolveStatus status = SolveStatus::MaxIter;
    Positivity positivity = Positivity::Nonnegative;
};

struct SolverOptions {
    double tol_grad = 1e-9;
    int max_iterations = 20000;
    DivergencePolicy on_divergence = DivergencePolicy::Error;
    double energy_floor = -1e10;  // divergence guard on the energy
    double sup_cap = 1e8;         // divergence guard on the iterate

    // Superlinear certification: when no second positive state exists at the
    // discretization, strict mode raises an error; otherwise the certificate
    // downgrades to Existence and carries the negative evidence (used by
    // parameter sweeps, which must keep the branch value).
    bool multiplicity_required = true;

    Tolerances tol;
};

struct MountainPassOptions {
    int path_points = 41;
    double rho_mp = 1e-2;
    int max_steps = 20000;
    double tol_grad = 1e-9;
};

// Everything per-domain that the solvers reuse across parameter values:
// assembled forms, the principal eigenpair, and the coercivity shift.
struct Setting {
    std::shared_ptr<const AssembledForms> forms;
    double lambda1 = 0;  // principal level of the Robin form against the mass
    Vec u1;              // principal eigenfunction, mass-normalized, positive
    double mu = 0;       // coercivity shift: max(0, -lambda1) + 1

    static Setting create(std::shared_ptr<const AssembledForms> forms,
                          SpectrumOptions opts = {}) {
        require(forms != nullptr, "setting: assembled forms required");
        Setting s;
        s.forms = std::move(forms);
        EigenPair p = principal_eigenpair(*s.forms, opts);
        s.lambda1 = p.value;
        s.u1 = p.vector;
        s.mu = std::max(0.0, -p.value) + 1.0;
        return s;
    }
};

inline Positivity classify_positivity(const Mesh& mesh, const Vec& u,
                                      const Tolerances& tol = {}) {
    if (u.size() == 0 || u.cwiseAbs().maxCoeff() <= tol.zero_collapse)
        return Positivity::Zero;
    const double neg_sup = std::max(0.0, -u.minCoeff());
    double interior_min = std::numeric_limits<double>::infinity();
    for (int i : mesh.interior_nodes()) interior_min = std::min(interior_min, u[i]);
    if (neg_sup <= 1e-8 && interior_min > tol.pos_floor)
        return Positivity::StrictlyInteriorPositive;
    return Positivity::Nonnegative;
}

namespace detail {

// Descent preconditioner: the quadratic part G + mu D_w of the energy Hessian
// (lumped). Falls back to the H1 matrix if that is not factorizable.
inline std::shared_ptr<Eigen::SimplicialLDLT<SpMat>> make_preconditioner(
    const VariationalProblem& P) {
    const auto& F = P.forms();
    SpMat D(F.n(), F.n());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(F.n()));
    for (int i = 0; i < F.n(); ++i)
        trips.emplace_back(i, i, std::max(P.mass_shift(), 1e-12) * F.lumped[i]);
    D.setFromTriplets(trips.begin(), trips.end());
    auto ldlt = std::make_shared<Eigen::SimplicialLDLT<SpMat>>();
    SpMat A = F.G + D;
    ldlt->compute(A);
    if (ldlt->info() != Eigen::Success || !ldlt->vectorD().allFinite() ||
        ldlt->vectorD().minCoeff() <= 0) {
        SpMat H = F.K + F.M;
        ldlt->compute(H);
        require(ldlt->info() == Eigen::Success,
                "minimize: no positive-definite preconditioner available");
    }
    return ldlt;
}

// Damped Newton iteration on the gradient system, accepted only on residual
// decrease. Works at saddle points as well as minima (indefinite LU solve).
inline bool newton_critical(const VariationalProblem& P, Vec& u, double tol,
                            int max_steps = 50) {
    double res = P.dual_norm(P.gradient(u));
    if (!std::isfinite(res)) return false;
    for (int it = 0; it < max_steps; ++it) {
        if (res <= tol) return true;
        SpMat J = P.jacobian(u);
        Eigen::SparseLU<SpMat> lu;
        lu.analyzePattern(J);
        lu.factorize(J);
        if (lu.info() != Eigen::Success) return false;
        Vec d = lu.solve(-P.gradient(u));
        if (!d.allFinite()) return false;
        double s = 1.0;
        bool accepted = false;
        for (int h = 0; h < 30; ++h) {
            Vec trial = u + s * d;
            const double r2 = P.dual_norm(P.gradient(trial));
            if (std::isfinite(r2) && r2 < res) {
                u = trial;
                res = r2;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) return res <= tol;
    }
    return res <= tol;
}

}  // namespace detail

// Preconditioned descent with Armijo backtracking and a Newton tail. The
// energy is non-increasing across accepted steps (asserted); convergence
// means the dual-norm residual dropped to tol_grad.
inline SolveResult minimize(const VariationalProblem& P, Vec u, SolverOptions opts = {}) {
    require(u.size() == P.n(), "minimize: start vector has the wrong size");
    auto prec = detail::make_preconditioner(P);

    SolveResult out;
    double E = P.energy(u);
    int it = 0;
    auto zero_state = [&]() {
        SolveResult z;
        z.u = Vec::Zero(P.n());
        z.energy = P.energy(z.u);
        z.residual_norm = P.dual_norm(P.gradient(z.u));
        z.iterations = it;
        z.status = SolveStatus::DivergedToZero;
        z.positivity = Positivity::Zero;
        return z;
    };

    double res = P.dual_norm(P.gradient(u));
    double newton_gate = 1e-3;  // retry the Newton tail only after real progress
    for (; it < opts.max_iterations && res > opts.tol_grad; ++it) {
        // Newton tail: once the residual is small, energy differences sink
        // below roundoff and a line search can no longer certify descent, so
        // the finisher iterates on residual decrease instead (energy drift is
        // bounded by the descent-invariant slack below).
        if (res < newton_gate) {
            newton_gate = 0.25 * res;
            Vec cand = u;
            if (detail::newton_critical(P, cand, opts.tol_grad)) {
                const double Ec = P.energy(cand);
                if (Ec <= E + 1e-9 * (1.0 + std::fabs(E))) {
                    u = std::move(cand);
                    E = Ec;
                    res = P.dual_norm(P.gradient(u));
                    continue;
                }
            }
        }

        Vec g = P.gradient(u);
        Vec d = -prec->solve(g);
        const double slope = g.dot(d);
        if (!(slope < 0)) break;  // gradient at numerical noise level

        double step = 1.0;
        bool accepted = false;
        for (int h = 0; h < 64; ++h) {
            const double Et = P.energy(u + step * d);
            if (std::isfinite(Et) && Et <= E + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // stagnation at roundoff scale

        u += step * d;
        const double En = P.energy(u);
        require(En <= E + 1e-12 * (1.0 + std::fabs(E)),
                "minimize: energy increased across an accepted step (line-search "
                "invariant violated)");
        E = En;
        res = P.dual_norm(P.gradient(u));

        if (E < opts.energy_floor || u.cwiseAbs().maxCoeff() > opts.sup_cap) {
            if (opts.on_divergence == DivergencePolicy::CollapseToZero) return zero_state();
            fail("minimize: the energy is unbounded below along the iterates (energy " +
                 fmt_short(E) + ", sup " + fmt_short(u.cwiseAbs().maxCoeff()) +
                 "); for superlinear reactions use the mountain-pass solver, and at or "
                 "above the principal level certify nonexistence instead");
        }
    }

    out.u = std::move(u);
    out.energy = E;
    out.residual_norm = res;
    out.iterations = it;
    out.status = res <= opts.tol_grad ? SolveStatus::Converged : SolveStatus::MaxIter;
    out.positivity = classify_positivity(*P.forms().mesh, out.u, opts.tol);
    return out;
}

// Scaled principal eigenfunction t u1 with t in (0,1) chosen so the energy of
// the positive-shifted functional is negative while t u1 stays inside the
// concave-floor window [0, delta]. Requires lambda strictly below the
// principal level and a sublinear reaction.
inline Vec seed_from_eigenfunction(const Nonlinearity& nl, double lambda, const Setting& S) {
    require(!nl.superlinear(),
            "eigenfunction seed: requires a sublinear reaction (concave floor)");
    require(lambda < S.lambda1,
            "eigenfunction seed: requires lambda strictly below the principal level "
            "(lambda = " + fmt_short(lambda) + ", level = " + fmt_short(S.lambda1) + ")");
    require(nl.delta > 0, "eigenfunction seed: the reaction lacks a concave-floor window");

    VariationalProblem P(S.forms, truncation_shifted_positive(nl, lambda, S.mu), S.mu);
    const double umax = S.u1.maxCoeff();
    require(umax > 0, "eigenfunction seed: principal eigenfunction is not positive");
    double t = std::min(0.99, nl.delta / umax);
    while (t >= 1e-12) {
        Vec cand = t * S.u1;
        if (P.energy(cand) < 0) return cand;
        t *= 0.5;
    }
    fail("eigenfunction seed: no negative-energy scale found above t = 1e-12; the "
         "concave floor is numerically invisible at this discretization");
}

// Deterministic start collection: optional warm starts first, then the
// eigenfunction seed (when admissible), two canned states, and reproducible
// random positive fills.
inline std::vector<Vec> multistart_seeds(const Nonlinearity& nl, double lambda,
                                         const Setting& S, int n_starts, std::uint64_t seed,
                                         const std::vector<Vec>& extra = {}) {
    require(n_starts >= 1, "multistart: need at least one start");
    const int n = S.forms->n();
    std::vector<Vec> out;
    for (const auto& w : extra) {
        require(w.size() == n, "multistart: warm start has the wrong size");
        if (int(out.size()) < n_starts) out.push_back(w);
    }
    if (!nl.superlinear() && lambda < S.lambda1 && int(out.size()) < n_starts) {
        out.push_back(seed_from_eigenfunction(nl, lambda, S));
    }
    if (int(out.size()) < n_starts) out.push_back(0.5 * S.u1);
    if (int(out.size()) < n_starts) out.push_back(Vec::Constant(n, 0.1));
    for (std::uint64_t k = 0; int(out.size()) < n_starts; ++k) {
        Rng rng(hash_combine(seed, 0x5eedull + k));
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = rng.next_in(0.01, 1.0);
        out.push_back(v);
    }
    return out;
}

// Minimizes the auxiliary functional
//   psi(u) = 1/2 gamma(u) + mu/2 |u^-|^2 - (c1/q)|u^+|_q^q + (c4/tau)|u^+|_tau^tau
// from two independent starts and requires them to coincide. The certified
// constants are derived from the reaction at the given lambda unless an
// explicit set is supplied.
inline SolveResult solve_auxiliary(const Nonlinearity& nl, double lambda, const Setting& S,
                                   std::optional<UnilateralConstants> uc = std::nullopt,
                                   SolverOptions opts = {},
                                   double* pair_distance = nullptr) {
    if (!uc) {
        const int dim = S.forms->mesh->dim;
        uc = unilateral_constants(nl, lambda, default_tau(dim),
                                  suggested_x_max(nl, lambda));
    }
    VariationalProblem P(S.forms, truncation_concave_absorption(*uc), S.mu);

    const double umax = S.u1.maxCoeff();
    Vec start_a = (1.0 / umax) * S.u1;
    Vec start_b = Vec::Constant(S.forms->n(), 0.1);

    SolveResult ra = minimize(P, start_a, opts);
    SolveResult rb = minimize(P, start_b, opts);
    require(ra.status == SolveStatus::Converged && rb.status == SolveStatus::Converged,
            "auxiliary solve: a start failed to converge");
    const double dist = (ra.u - rb.u).cwiseAbs().maxCoeff();
    if (pair_distance) *pair_distance = dist;
    require(dist <= opts.tol.uniq_tol,
            "auxiliary solve: two independent starts disagree by " + fmt_short(dist) +
            " in sup norm; the discretization is too coarse for the absorption scale");
    SolveResult out = ra.energy <= rb.energy ? std::move(ra) : std::move(rb);
    require(out.positivity == Positivity::StrictlyInteriorPositive,
            "auxiliary solve: the state lost strict positivity");
    return out;
}

// Order-interval solve. The truncation family is chosen explicitly:
//   AuxiliaryCapped  - auxiliary reaction frozen above hi (requires lo == 0),
//   ReactionCapped   - problem reaction frozen above hi (requires lo == 0),
//   ReactionFloored  - problem reaction frozen below lo (no hi),
//   ReactionClamped  - frozen below lo and above hi (lo > 0).
// The result must land inside [lo, hi] up to 1e-8 or the call fails.
inline SolveResult solve_in_interval(const Nonlinearity& nl, double lambda, const Setting& S,
                                     IntervalKind kind, const Vec& lo,
                                     std::optional<Vec> hi, SolverOptions opts = {}) {
    const int n = S.forms->n();
    require(lo.size() == n, "interval solve: lower bound has the wrong size");
    if (hi) {
        require(hi->size() == n, "interval solve: upper bound has the wrong size");
        require(((*hi - lo).minCoeff() >= 0),
                "interval solve: the upper bound must dominate the lower bound");
    }

    TruncatedReaction reaction;
    Vec start;
    switch (kind) {
        case IntervalKind::AuxiliaryCapped: {
            require(hi.has_value(), "interval solve: auxiliary cap needs an upper bound");
            require(lo.cwiseAbs().maxCoeff() == 0,
                    "interval solve: auxiliary cap is defined on [0, hi]");
            const int dim = S.forms->mesh->dim;
            UnilateralConstants uc = unilateral_constants(nl, lambda, default_tau(dim),
                                                          suggested_x_max(nl, lambda));
            reaction = truncation_concave_absorption_capped(uc, S.mu, *hi);
            start = 0.5 * (*hi);
            break;
        }
        case IntervalKind::ReactionCapped: {
            require(hi.has_value(), "interval solve: reaction cap needs an upper bound");
            require(lo.cwiseAbs().maxCoeff() == 0,
                    "interval solve: reaction cap is defined on [0, hi]");
            reaction = truncation_capped_above(nl, lambda, S.mu, *hi);
            start = 0.5 * (*hi);
            break;
        }
        case IntervalKind::ReactionFloored: {
            require(!hi.has_value(),
                    "interval solve: the floored family is unbounded above; no upper "
                    "bound is accepted");
            reaction = truncation_floored_below(nl, lambda, S.mu, lo);
            start = lo;
            break;
        }
        case IntervalKind::ReactionClamped: {
            require(hi.has_value(), "interval solve: clamping needs an upper bound");
            reaction = truncation_clamped(nl, lambda, S.mu, lo, *hi);
            start = 0.5 * (lo + *hi);
            break;
        }
    }

    VariationalProblem P(S.forms, std::move(reaction), S.mu);
    SolveResult r = minimize(P, start, opts);
    require(r.status == SolveStatus::Converged,
            "interval solve: minimization did not converge (status " +
                to_string(r.status) + ")");
    require((r.u - lo).minCoeff() >= -1e-8,
            "interval solve: the state escaped below the lower bound; discretization "
            "alarm");
    if (hi)
        require((*hi - r.u).minCoeff() >= -1e-8,
                "interval solve: the state escaped above the upper bound; discretization "
                "alarm");
    return r;
}

// Doubling search along a positive direction until the energy drops below the
// given target. Only meaningful for superlinear reactions, where rays
// eventually descend.
inline Vec find_endpoint(const Nonlinearity& nl, const VariationalProblem& P,
                         const Vec& direction, double energy_below) {
    require(nl.superlinear(),
            "endpoint search: requires a superlinear reaction (sublinear energies are "
            "coercive and admit no descending ray)");
    require(direction.size() == P.n(), "endpoint search: direction has the wrong size");
    require(direction.minCoeff() >= 0 && direction.maxCoeff() > 0,
            "endpoint search: direction must be nonnegative and nonzero");
    double t = 1.0;
    for (int k = 0; k <= 60; ++k) {
        Vec cand = t * direction;
        if (P.energy(cand) < energy_below) return cand;
        t *= 2.0;
    }
    fail("endpoint search: the energy failed to drop below " + fmt_short(energy_below) +
         " within 2^60 doublings; the superlinear growth hypothesis looks violated");
}

// Sampled infimum of the energy over the H1 sphere of radius rho around a
// center, with a deterministic direction set.
inline double sphere_infimum(const VariationalProblem& P, const Vec& center, double rho,
                             int n_directions, std::uint64_t seed) {
    require(n_directions >= 1, "sphere sample: need at least one direction");
    require(rho > 0, "sphere sample: radius must be positive");
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_directions; ++k) {
        Rng rng(hash_combine(seed, 0xd15cull + std::uint64_t(k)));
        Vec d(P.n());
        for (int i = 0; i < P.n(); ++i) d[i] = rng.next_in(-1.0, 1.0);
        const double nrm = P.h1_norm(d);
        if (nrm <= 0) continue;
        best = std::min(best, P.energy(center + (rho / nrm) * d));
    }
    return best;
}

namespace detail {

// Equal-H1-arclength reparameterization of a polyline path; endpoints fixed.
inline void resample_path(const VariationalProblem& P, std::vector<Vec>& pts) {
    const int m = int(pts.size());
    std::vector<double> cum(m, 0.0);
    for (int i = 0; i + 1 < m; ++i) cum[i + 1] = cum[i] + P.h1_norm(pts[i + 1] - pts[i]);
    const double total = cum[m - 1];
    require(total > 0, "mountain pass: the path degenerated to a point");
    std::vector<Vec> fresh(m);
    fresh[0] = pts[0];
    fresh[m - 1] = pts[m - 1];
    int k = 0;
    for (int j = 1; j + 1 < m; ++j) {
        const double target = total * double(j) / double(m - 1);
        while (k + 2 < m && cum[k + 1] < target) ++k;
        const double seg = cum[k + 1] - cum[k];
        const double th = seg > 0 ? (target - cum[k]) / seg : 0.0;
        fresh[j] = (1.0 - th) * pts[k] + th * pts[k + 1];
    }
    pts = std::move(fresh);
}

}  // namespace detail

// Mountain-pass deformation: a polyline path from u0 (base) to u1 (lower
// energy, at least rho_mp away) is relaxed by repeatedly taking one
// preconditioned descent step at the path maximum and re-parameterizing to
// equal H1 arclength, endpoints fixed. Once the maximum is nearly critical a
// damped Newton iteration finishes it. The returned energy dominates both
// endpoint energies.
inline SolveResult mountain_pass(const VariationalProblem& P, const Vec& u0, const Vec& u1,
                                 MountainPassOptions opts = {}) {
    require(u0.size() == P.n() && u1.size() == P.n(),
            "mountain pass: endpoint vectors have the wrong size");
    const double E0 = P.energy(u0), E1 = P.energy(u1);
    require(E1 < E0,
            "mountain pass: the far endpoint must lie strictly below the base point in "
            "energy (got " + fmt_short(E1) + " vs " + fmt_short(E0) + ")");
    require(P.h1_norm(u1 - u0) > opts.rho_mp,
            "mountain pass: endpoints are closer than the sphere radius; decrease rho_mp "
            "or separate the endpoints");
    require(opts.path_points >= 5, "mountain pass: need at least 5 path points");

    auto prec = detail::make_preconditioner(P);
    const int m = opts.path_points;
    std::vector<Vec> pts(m);
    for (int i = 0; i < m; ++i) {
        const double s = double(i) / double(m - 1);
        pts[i] = (1.0 - s) * u0 + s * u1;
    }

    auto finish = [&](Vec u, int steps, SolveStatus status) {
        SolveResult out;
        out.energy = P.energy(u);
        out.residual_norm = P.dual_norm(P.gradient(u));
        out.iterations = steps;
        out.status = status;
        out.positivity = classify_positivity(*P.forms().mesh, u, Tolerances{});
        out.u = std::move(u);
        return out;
    };

    Vec best;
    double best_res = std::numeric_limits<double>::infinity();
    double last_newton_res = std::numeric_limits<double>::infinity();

    for (int step = 0; step < opts.max_steps; ++step) {
        int mx = 0;
        double emax = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            const double e = P.energy(pts[i]);
            if (e > emax) {
                emax = e;
                mx = i;
            }
        }
        if (mx == 0 || P.h1_norm(pts[mx] - u0) < opts.rho_mp)
            fail("mountain pass: the path maximum collapsed onto the base point; no "
                 "mountain geometry at this radius (decrease rho_mp or refine the mesh)");

        Vec g = P.gradient(pts[mx]);
        const double res = P.dual_norm(g);
        if (res < best_res) {
            best_res = res;
            best = pts[mx];
        }

        // Newton finish once the max point is nearly critical; accept only a
        // genuine saddle above both endpoints and off the base sphere.
        if (res <= opts.tol_grad || (res < 1e-2 && res < 0.5 * last_newton_res)) {
            last_newton_res = res;
            Vec cand = pts[mx];
            if (detail::newton_critical(P, cand, opts.tol_grad)) {
                const double ec = P.energy(cand);
                if (ec >= std::max(E0, E1) - 1e-12 &&
                    P.h1_norm(cand - u0) >= opts.rho_mp)
                    return finish(std::move(cand), step, SolveStatus::Converged);
            }
            if (res <= opts.tol_grad)
                return finish(pts[mx], step, SolveStatus::Converged);
        }

        // One preconditioned Armijo descent step at the maximum.
        Vec d = -prec->solve(g);
        double slope = g.dot(d);
        if (slope < 0) {
            double s = 1.0;
            const double e_here = emax;
            for (int h = 0; h < 64; ++h) {
                const double et = P.energy(pts[mx] + s * d);
                if (std::isfinite(et) && et <= e_here + 1e-4 * s * slope) {
                    pts[mx] += s * d;
                    break;
                }
                s *= 0.5;
            }
        }
        detail::resample_path(P, pts);
    }
    return finish(std::move(best), opts.max_steps, SolveStatus::MaxIter);
}

struct Certificate {
    CertKind kind = CertKind::Existence;
    double lambda = 0;
    double lambda1 = 0;
    int n_starts = 0;
    Vec u_min;                    // minimal / unique solution (empty if none)
    std::optional<Vec> u_mp;      // second solution (multiplicity only)
    double energy_min = 0;
    double energy_mp = 0;
    bool lower_bound_ok = true;   // auxiliary state sits below u_min (sublinear)
    double lower_bound_gap = 0;   // max nodewise violation of that law
    double pair_distance = 0;     // max pairwise sup distance of multistart states
    double m_rho = 0;             // sampled sphere infimum (superlinear)
    std::vector<std::string> evidence;
    Tolerances tol;
};

namespace detail {

inline Certificate certify_nonexistence(const Nonlinearity& nl, double lambda,
                                        const Setting& S, int n_starts, std::uint64_t seed,
                                        SolverOptions opts, Certificate cert,
                                        const std::vector<Vec>& warm) {
    VariationalProblem P(S.forms, truncation_shifted_positive(nl, lambda, S.mu), S.mu);
    opts.on_divergence = DivergencePolicy::CollapseToZero;
    auto seeds = multistart_seeds(nl, lambda, S, n_starts, seed, warm);
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        SolveResult r = minimize(P, seeds[k], opts);
        if (r.positivity == Positivity::Zero) {
            cert.evidence.push_back("start " + std::to_string(k) + ": collapsed to zero (" +
                                    to_string(r.status) + ")");
            continue;
        }
        if (r.status == SolveStatus::Converged)
            fail("certify: a positive state persists at lambda = " + fmt_short(lambda) +
                 " >= principal level " + fmt_short(S.lambda1) +
                 " - tol; discretization alarm (refine the mesh)");
        fail("certify: inconclusive minimization at lambda = " + fmt_short(lambda) +
             " (status " + to_string(r.status) + ", sup " +
             fmt_short(r.u.cwiseAbs().maxCoeff()) + "); increase the iteration budget");
    }
    cert.kind = CertKind::Nonexistence;
    return cert;
}

inline Certificate certify_sublinear(const Nonlinearity& nl, double lambda, const Setting& S,
                                     int n_starts, std::uint64_t seed, SolverOptions opts,
                                     Certificate cert, const std::vector<Vec>& warm) {
    VariationalProblem P(S.forms, truncation_shifted_positive(nl, lambda, S.mu), S.mu);
    auto seeds = multistart_seeds(nl, lambda, S, n_starts, seed, warm);
    std::vector<SolveResult> sols;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        SolveResult r = minimize(P, seeds[k], opts);
        require(r.status == SolveStatus::Converged,
                "certify: start " + std::to_string(k) + " failed to converge below the "
                "principal level (sublinear energies are coercive there)");
        require(r.positivity == Positivity::StrictlyInteriorPositive,
                "certify: start " + std::to_string(k) + " converged to a state without "
                "strict interior positivity; discretization alarm (existence is "
                "guaranteed below the principal level)");
        cert.evidence.push_back("start " + std::to_string(k) + ": converged positive, "
                                "energy " + fmt_short(r.energy));
        sols.push_back(std::move(r));
    }

    double worst_pair = 0;
    for (std::size_t a = 0; a < sols.size(); ++a)
        for (std::size_t b = a + 1; b < sols.size(); ++b)
            worst_pair = std::max(
                worst_pair, (sols[a].u - sols[b].u).cwiseAbs().maxCoeff());
    cert.pair_distance = worst_pair;

    if (has_decreasing_quotient(nl.cls)) {
        require(worst_pair <= opts.tol.uniq_tol,
                "certify: multistart states disagree by " + fmt_short(worst_pair) +
                " under the decreasing-quotient (uniqueness) hypothesis; discretization "
                "alarm");
        const auto it = std::min_element(
            sols.begin(), sols.end(),
            [](const SolveResult& a, const SolveResult& b) { return a.energy < b.energy; });
        cert.kind = CertKind::Uniqueness;
        cert.u_min = it->u;
        cert.energy_min = it->energy;
    } else {
        Vec hi = sols[0].u;
        for (const auto& s : sols) hi = hi.cwiseMin(s.u);
        SolveResult r = solve_in_interval(nl, lambda, S, IntervalKind::ReactionCapped,
                                          Vec::Zero(S.forms->n()), hi, opts);
        require(r.positivity == Positivity::StrictlyInteriorPositive,
                "certify: the capped interval solve lost strict positivity; "
                "discretization alarm");
        cert.kind = CertKind::Existence;
        cert.u_min = r.u;
        cert.energy_min = P.energy(r.u);
    }

    // Lower-bound law: the auxiliary state never exceeds a positive solution.
    SolveResult aux = solve_auxiliary(nl, lambda, S, std::nullopt, opts);
    cert.lower_bound_gap = (aux.u - cert.u_min).maxCoeff();
    cert.lower_bound_ok = cert.lower_bound_gap <= 1e-8;
    return cert;
}

// Mountain pass from zero plus Newton refinement of the multistart collection;
// returns the positive critical point of smallest sup norm.  Shared by the
// certification at the target parameter and at the comparison parameter.
inline Vec smallest_positive_critical_point(const Nonlinearity& nl, double lambda,
                                            const Setting& S, int n_starts,
                                            std::uint64_t seed, const SolverOptions& opts,
                                            std::vector<std::string>* evidence,
                                            const std::vector<Vec>& warm = {}) {
    VariationalProblem P(S.forms, truncation_shifted_positive(nl, lambda, S.mu), S.mu);
    const Vec zero = Vec::Zero(S.forms->n());

    MountainPassOptions mp;
    mp.tol_grad = opts.tol_grad;
    mp.rho_mp = opts.tol.rho_mp;
    Vec far = find_endpoint(nl, P, S.u1, P.energy(zero) - 1.0);
    SolveResult first = mountain_pass(P, zero, far, mp);
    require(first.status == SolveStatus::Converged,
            "certify: the mountain-pass deformation did not converge below the principal "
            "level");
    require(first.positivity == Positivity::StrictlyInteriorPositive,
            "certify: the mountain-pass state lost strict interior positivity; "
            "discretization alarm");
    if (evidence)
        evidence->push_back("base deformation: converged positive, energy " +
                            fmt_short(first.energy));

    // Hunt for lower positive critical points from the start collection.
    std::vector<Vec> candidates{first.u};
    auto seeds = multistart_seeds(nl, lambda, S, n_starts, seed, warm);
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        Vec u = seeds[k];
        if (!newton_critical(P, u, opts.tol_grad)) continue;
        if (u.cwiseAbs().maxCoeff() <= opts.tol.zero_collapse) continue;
        if (classify_positivity(*S.forms->mesh, u, opts.tol) !=
            Positivity::StrictlyInteriorPositive)
            continue;
        if (evidence)
            evidence->push_back("start " + std::to_string(k) +
                                ": refined to a positive critical point, energy " +
                                fmt_short(P.energy(u)));
        candidates.push_back(std::move(u));
    }
    const auto it = std::min_element(candidates.begin(), candidates.end(),
                                     [](const Vec& a, const Vec& b) {
                                         return a.cwiseAbs().maxCoeff() <
                                                b.cwiseAbs().maxCoeff();
                                     });
    return *it;
}

// Second state above u_min, route 1: a dominating solution at a parameter
// between lambda and the principal level opens a clamped-interval minimization
// on [u_min, u_cmp]; an interval minimizer distinct from u_min is itself a
// second solution of the untruncated problem.
inline std::optional<Vec> second_state_by_interval(const Nonlinearity& nl, double lambda,
                                                   const Setting& S, int n_starts,
                                                   std::uint64_t seed,
                                                   const SolverOptions& opts,
                                                   const Vec& u_min,
                                                   std::vector<std::string>& evidence) {
    const double eta = 0.5 * (lambda + S.lambda1);
    Vec u_cmp;
    try {
        u_cmp = smallest_positive_critical_point(nl, eta, S, n_starts,
                                                 hash_combine(seed, 0xE7A), opts, nullptr);
    } catch (const Error& e) {
        evidence.push_back(std::string("interval route unavailable: no comparison state "
                                       "at the midpoint parameter (") +
                           e.what() + ")");
        return std::nullopt;
    }
    if ((u_cmp - u_min).minCoeff() < 0.0 ||
        (u_cmp - u_min).maxCoeff() < opts.tol.distinctness_floor) {
        evidence.push_back(
            "interval route unavailable: the state at the midpoint parameter " +
            fmt_short(eta) +
            " does not dominate the first state (its amplitude shrinks toward the "
            "principal level)");
        return std::nullopt;
    }
    try {
        SolveResult boxed = solve_in_interval(nl, lambda, S, IntervalKind::ReactionClamped,
                                              u_min, u_cmp, opts);
        if ((boxed.u - u_min).cwiseAbs().maxCoeff() >= opts.tol.distinctness_floor) {
            evidence.push_back("interval route: distinct minimizer between the first "
                               "state and the midpoint-parameter state");
            return boxed.u;
        }
        evidence.push_back("interval route: the boxed minimizer returned the first state "
                           "(local-minimum case confirmed)");
    } catch (const Error& e) {
        evidence.push_back(std::string("interval route failed: ") + e.what());
    }
    return std::nullopt;
}

// Second state above u_min, route 2: mountain pass on the functional frozen
// below u_min.  Its critical points dominate u_min and its energy offset to
// the base functional is constant on that cone, so the saddle it finds is a
// second solution with higher base energy.
inline std::optional<Vec> second_state_by_deformation(const Nonlinearity& nl, double lambda,
                                                      const Setting& S,
                                                      const SolverOptions& opts,
                                                      const Vec& u_min,
                                                      std::vector<std::string>& evidence) {
    VariationalProblem Pf(S.forms, truncation_floored_below(nl, lambda, S.mu, u_min), S.mu);
    const double e_base = Pf.energy(u_min);
    MountainPassOptions mp;
    mp.tol_grad = opts.tol_grad;
    mp.rho_mp = opts.tol.rho_mp;
    try {
        // Far endpoint on the ray anchored at u_min.  Doubling alone overshoots
        // by orders of magnitude and the straight initial path then steps across
        // the barrier next to the base, so bisect back to the smallest scale
        // that still clears the target level; the barrier stays resolvable
        // inside the path.
        const double e_target = e_base - 1.0;
        double t_hi = 1.0, t_lo = 0.0;
        for (int k = 0; k <= 60 && !(Pf.energy(u_min + t_hi * S.u1) < e_target); ++k) {
            require(k < 60, "no endpoint below the base level along the deformation ray");
            t_lo = t_hi;
            t_hi *= 2.0;
        }
        for (int k = 0; k < 40; ++k) {
            const double t = 0.5 * (t_lo + t_hi);
            (Pf.energy(u_min + t * S.u1) < e_target ? t_hi : t_lo) = t;
        }
        Vec far = u_min + t_hi * S.u1;
        require(Pf.h1_norm(far - u_min) > mp.rho_mp,
                "the far endpoint of the deformation is too close to the first state");
        SolveResult second = mountain_pass(Pf, u_min, far, mp);
        require(second.status == SolveStatus::Converged,
                "the frozen-floor deformation did not converge");
        if ((second.u - u_min).cwiseAbs().maxCoeff() >= opts.tol.distinctness_floor) {
            evidence.push_back("frozen-floor deformation: saddle above the first state, "
                               "energy " + fmt_short(second.energy));
            return second.u;
        }
        evidence.push_back("frozen-floor deformation returned the first state");
    } catch (const Error& e) {
        evidence.push_back(std::string("frozen-floor deformation failed: ") + e.what());
    }
    return std::nullopt;
}

inline Certificate certify_superlinear(const Nonlinearity& nl, double lambda,
                                       const Setting& S, int n_starts, std::uint64_t seed,
                                       SolverOptions opts, Certificate cert,
                                       const std::vector<Vec>& warm) {
    VariationalProblem P(S.forms, truncation_shifted_positive(nl, lambda, S.mu), S.mu);
    cert.m_rho = sphere_infimum(P, Vec::Zero(S.forms->n()), opts.tol.rho_mp, 100, seed);

    Vec u_min = smallest_positive_critical_point(nl, lambda, S, n_starts, seed, opts,
                                                 &cert.evidence, warm);

    std::optional<Vec> second =
        second_state_by_interval(nl, lambda, S, n_starts, seed, opts, u_min, cert.evidence);
    if (!second)
        second = second_state_by_deformation(nl, lambda, S, opts, u_min, cert.evidence);

    if (second) {
        Vec u_mp = std::move(*second);
        // Snap onto the base functional's critical set (identical on the cone).
        require(newton_critical(P, u_mp, opts.tol_grad),
                "certify: the second state does not refine to a critical point of the "
                "base functional; discretization alarm");
        require(classify_positivity(*S.forms->mesh, u_mp, opts.tol) ==
                    Positivity::StrictlyInteriorPositive,
                "certify: the second state lost strict interior positivity; "
                "discretization alarm");
        require((u_mp - u_min).minCoeff() >= -1e-8,
                "certify: the second state fails the ordering law against the first; "
                "discretization alarm");
        require((u_mp - u_min).cwiseAbs().maxCoeff() >= opts.tol.distinctness_floor,
                "certify: the refined second state collapsed onto the first; no "
                "multiplicity detected at this discretization");
        cert.kind = CertKind::Multiplicity;
        cert.u_min = std::move(u_min);
        cert.energy_min = P.energy(cert.u_min);
        cert.energy_mp = P.energy(u_mp);
        cert.u_mp = std::move(u_mp);
        return cert;
    }

    const std::string verdict =
        "certify: no second positive state at lambda " + fmt_short(lambda) +
        ": the interval route and the frozen-floor deformation both ended at the first "
        "state; the positive state appears unique at this discretization";
    if (opts.multiplicity_required) fail(verdict);
    cert.kind = CertKind::Existence;
    cert.u_min = std::move(u_min);
    cert.energy_min = P.energy(cert.u_min);
    cert.evidence.push_back(verdict);
    return cert;
}

}  // namespace detail

// Certification at a fixed parameter value:
//   lambda >= lambda1 - tol_eig      -> Nonexistence (all starts collapse to zero),
//   lambda <  lambda1, sublinear     -> Uniqueness (decreasing quotient) or Existence,
//   lambda <  lambda1, superlinear   -> Multiplicity (ordered distinct pair).
inline Certificate certify(const Nonlinearity& nl, double lambda, const Setting& S,
                           int n_starts, std::uint64_t seed, SolverOptions opts = {},
                           const std::vector<Vec>& warm_starts = {}) {
    require(n_starts >= 1, "certify: need at least one start");
    Certificate cert;
    cert.lambda = lambda;
    cert.lambda1 = S.lambda1;
    cert.n_starts = n_starts;
    cert.tol = opts.tol;

    if (lambda >= S.lambda1 - opts.tol.tol_eig)
        return detail::certify_nonexistence(nl, lambda, S, n_starts, seed, opts,
                                            std::move(cert), warm_starts);
    if (!nl.superlinear())
        return detail::certify_sublinear(nl, lambda, S, n_starts, seed, opts,
                                         std::move(cert), warm_starts);
    return detail::certify_superlinear(nl, lambda, S, n_starts, seed, opts,
                                       std::move(cert), warm_starts);
}

}  // namespace robinlab
