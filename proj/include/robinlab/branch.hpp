// Parameter sweeps along the minimal-solution branch and the structural
// checks on it: monotonicity in the parameter, left-continuity at a grid
// point, and the nonexistence-threshold summary.
//
// A Branch is self-contained: it stores the setting (forms + principal pair)
// and the reaction, so the reports that need fresh solves (left-continuity)
// run off the branch object alone. Entries hold nodal vectors; the continuous
// C^1 convergence statement is tested in the sup norm plus an elementwise
// gradient sup norm as a surrogate.
//
// Determinism: every grid point draws its multistart seeds from
// hash_combine(sweep seed, grid index), in both warm and cold modes, so a
// warm and a cold sweep are comparable point by point and any rerun with the
// same options reproduces the branch bit for bit, independent of the worker
// count.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "robinlab/solvers.hpp"

namespace robinlab {

// --- branch data ----------------------------------------------------------

enum class EntryStatus { Existence, Nonexistence, Error };

inline std::string to_string(EntryStatus s) {
    switch (s) {
        case EntryStatus::Existence: return "existence";
        case EntryStatus::Nonexistence: return "nonexistence";
        default: return "error";
    }
}

struct BranchEntry {
    double lambda = 0;
    EntryStatus status = EntryStatus::Error;
    Vec u;                       // minimal state (empty unless Existence)
    double energy = 0;           // its energy (0 when no state)
    double u_max = 0;            // sup of the state
    double u_min_interior = 0;   // min over interior nodes (strict positivity)
    int n_solutions = 0;         // 2 with a second state, 1 single, 0 none
    std::string note;            // uniqueness verdict or the error text
    std::optional<Certificate> certificate;
};

struct SweepOptions {
    int n_starts = 6;
    std::uint64_t seed = 0;
    bool warm_start = true;   // sequential continuation from the previous state
    int workers = 1;          // parallel grid points (cold mode only)
    SolverOptions solver{};   // per-point overrides; a sweep never aborts on a
                              // missing second state, so multiplicity_required
                              // is forced off for every entry
};

struct Branch {
    Setting setting;
    Nonlinearity nl;
    std::vector<double> lambda_grid;
    std::vector<BranchEntry> entries;
    double lambda1 = 0;
    HypothesisClass cls = HypothesisClass::H1;
};

// --- elementwise gradient sup norm (C^1 surrogate) -------------------------

inline double grad_sup_norm(const Mesh& mesh, const Vec& v) {
    require(v.size() == mesh.n_nodes(), "grad_sup_norm: vector/mesh size mismatch");
    double sup = 0;
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const auto& cell = mesh.cells[c];
        if (mesh.dim == 1) {
            const double dx = mesh.nodes[cell[1]][0] - mesh.nodes[cell[0]][0];
            sup = std::max(sup, std::fabs((v[cell[1]] - v[cell[0]]) / dx));
            continue;
        }
        const Point& p0 = mesh.nodes[cell[0]];
        const Point& p1 = mesh.nodes[cell[1]];
        const Point& p2 = mesh.nodes[cell[2]];
        const double ax = p1[0] - p0[0], ay = p1[1] - p0[1];
        const double bx = p2[0] - p0[0], by = p2[1] - p0[1];
        const double d1 = v[cell[1]] - v[cell[0]], d2 = v[cell[2]] - v[cell[0]];
        const double det = ax * by - ay * bx;
        const double gx = (d1 * by - d2 * ay) / det;
        const double gy = (ax * d2 - bx * d1) / det;
        sup = std::max(sup, std::hypot(gx, gy));
    }
    return sup;
}

// --- sweep ------------------------------------------------------------------

namespace detail {

inline BranchEntry branch_entry_from(double lambda, Certificate&& c, const Mesh& mesh) {
    BranchEntry e;
    e.lambda = lambda;
    if (c.kind == CertKind::Nonexistence) {
        e.status = EntryStatus::Nonexistence;
        e.n_solutions = 0;
    } else {
        e.status = EntryStatus::Existence;
        e.n_solutions = (c.kind == CertKind::Multiplicity) ? 2 : 1;
        e.u = c.u_min;
        e.energy = c.energy_min;
        e.u_max = e.u.maxCoeff();
        double interior_min = std::numeric_limits<double>::infinity();
        for (int i : mesh.interior_nodes()) interior_min = std::min(interior_min, e.u[i]);
        e.u_min_interior = std::isfinite(interior_min) ? interior_min : e.u.minCoeff();
    }
    for (const std::string& line : c.evidence)
        if (line.find("appears unique") != std::string::npos) {
            e.note = line;
            break;
        }
    e.certificate = std::move(c);
    return e;
}

inline BranchEntry branch_solve_one(const Nonlinearity& nl, double lambda, const Setting& S,
                                    const SweepOptions& opts, std::uint64_t point_seed,
                                    const std::vector<Vec>& warm) {
    SolverOptions sopts = opts.solver;
    sopts.multiplicity_required = false;
    try {
        Certificate c = certify(nl, lambda, S, opts.n_starts, point_seed, sopts, warm);
        return branch_entry_from(lambda, std::move(c), *S.forms->mesh);
    } catch (const std::exception& err) {
        BranchEntry e;
        e.lambda = lambda;
        e.status = EntryStatus::Error;
        e.note = err.what();
        return e;
    }
}

}  // namespace detail

inline Branch sweep(const Nonlinearity& nl, const Setting& S,
                    const std::vector<double>& grid, const SweepOptions& opts = {}) {
    require(opts.n_starts >= 1, "sweep: need at least one start per grid point");
    for (std::size_t k = 1; k < grid.size(); ++k)
        require(grid[k] > grid[k - 1],
                "sweep: the parameter grid must be strictly increasing");

    Branch b;
    b.setting = S;
    b.nl = nl;
    b.lambda_grid = grid;
    b.lambda1 = S.lambda1;
    b.cls = nl.cls;
    b.entries.resize(grid.size());

    if (opts.warm_start || opts.workers <= 1 || grid.size() < 2) {
        std::vector<Vec> warm;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            b.entries[k] = detail::branch_solve_one(nl, grid[k], S, opts,
                                                    hash_combine(opts.seed, k),
                                                    opts.warm_start ? warm
                                                                    : std::vector<Vec>{});
            if (opts.warm_start && b.entries[k].status == EntryStatus::Existence)
                warm = {b.entries[k].u};
        }
        return b;
    }

    // Cold mode: grid points are independent, so they can be solved in
    // parallel; the per-point seeds make the result scheduling-independent.
    const int workers = std::min<int>(opts.workers, int(grid.size()));
    std::atomic<std::size_t> next{0};
    auto run = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= grid.size()) return;
            b.entries[k] = detail::branch_solve_one(nl, grid[k], S, opts,
                                                    hash_combine(opts.seed, k), {});
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    return b;
}

// --- monotonicity -----------------------------------------------------------

struct NodeWitness {
    double lambda_lo = 0;
    double lambda_hi = 0;
    int node = -1;
    double gap = 0;  // violation amount (nondecreasing) or interior min gap (strict)
};

struct MonotoneReport {
    bool nondecreasing_ok = true;
    bool strict_checked = false;   // shifted-monotonicity classes only
    bool strict_interior_ok = true;
    int n_pairs = 0;
    double mono_tol = 0;
    std::vector<NodeWitness> violations;
    std::vector<NodeWitness> strict_failures;
    std::string verdict;
    bool passed() const {
        return nondecreasing_ok && (!strict_checked || strict_interior_ok);
    }
};

inline MonotoneReport check_monotone(const Branch& b, double mono_tol = 1e-8) {
    MonotoneReport r;
    r.mono_tol = mono_tol;
    r.strict_checked = has_shifted_monotonicity(b.cls);
    const std::vector<int> interior = b.setting.forms->mesh->interior_nodes();

    const BranchEntry* prev = nullptr;
    for (const BranchEntry& e : b.entries) {
        if (e.status != EntryStatus::Existence || e.u.size() == 0) continue;
        if (prev != nullptr) {
            ++r.n_pairs;
            int worst_node = -1;
            double worst_gap = mono_tol;
            for (int i = 0; i < e.u.size(); ++i) {
                const double excess = prev->u[i] - e.u[i];
                if (excess > worst_gap) {
                    worst_gap = excess;
                    worst_node = i;
                }
            }
            if (worst_node >= 0) {
                r.nondecreasing_ok = false;
                r.violations.push_back({prev->lambda, e.lambda, worst_node, worst_gap});
            }
            if (r.strict_checked) {
                double min_gap = std::numeric_limits<double>::infinity();
                int argmin = -1;
                for (int i : interior) {
                    const double g = e.u[i] - prev->u[i];
                    if (g < min_gap) {
                        min_gap = g;
                        argmin = i;
                    }
                }
                if (argmin >= 0 && !(min_gap > 0)) {
                    r.strict_interior_ok = false;
                    r.strict_failures.push_back({prev->lambda, e.lambda, argmin, min_gap});
                }
            }
        }
        prev = &e;
    }

    if (r.nondecreasing_ok)
        r.verdict = "branch nondecreasing across " + std::to_string(r.n_pairs) +
                    " consecutive pair(s)";
    else
        r.verdict = "branch not nondecreasing: " + std::to_string(r.violations.size()) +
                    " violating pair(s), worst gap " + fmt_short(r.violations.front().gap);
    if (r.strict_checked)
        r.verdict += r.strict_interior_ok
                         ? "; strict interior growth confirmed"
                         : "; strict interior growth fails on " +
                               std::to_string(r.strict_failures.size()) + " pair(s)";
    return r;
}

// --- left-continuity --------------------------------------------------------

struct ContinuityOptions {
    double delta = 0.5;      // first approach offset; halves each step
    double cont_tol = 1e-4;  // required final sup-norm gap
    int n_starts = 2;
    std::uint64_t seed = 0;
    SolverOptions solver{};
};

struct ContinuityReport {
    bool applicable = false;
    bool passed = false;
    double lambda_star = 0;
    std::vector<double> approach;   // ascending toward lambda_star from the left
    std::vector<double> sup_gaps;   // |u_k - u_star|_inf
    std::vector<double> grad_gaps;  // elementwise gradient surrogate
    bool gaps_decreasing = false;
    double final_gap = 0;
    double cont_tol = 0;
    std::string verdict;
};

inline ContinuityReport check_left_continuity(const Branch& b, double lambda_star,
                                              int n_approach,
                                              const ContinuityOptions& opts = {}) {
    require(n_approach >= 1, "continuity: need at least one approach point");
    require(opts.delta > 0, "continuity: the approach offset must be positive");

    ContinuityReport r;
    r.lambda_star = lambda_star;
    r.cont_tol = opts.cont_tol;

    const BranchEntry* star = nullptr;
    for (const BranchEntry& e : b.entries)
        if (e.lambda == lambda_star) star = &e;
    if (star == nullptr) {
        r.verdict = "not applicable: " + fmt_short(lambda_star) +
                    " is not a grid point of the branch";
        return r;
    }
    if (star->status != EntryStatus::Existence || star->u.size() == 0) {
        r.verdict = "not applicable: no state on the branch at " + fmt_short(lambda_star) +
                    " (" + to_string(star->status) + ")";
        return r;
    }

    r.applicable = true;
    const Mesh& mesh = *b.setting.forms->mesh;
    SolverOptions sopts = opts.solver;
    sopts.multiplicity_required = false;

    std::vector<Vec> warm = {star->u};
    for (int k = 1; k <= n_approach; ++k) {
        const double lk = lambda_star - opts.delta * std::ldexp(1.0, -k);
        r.approach.push_back(lk);
        try {
            Certificate c = certify(b.nl, lk, b.setting, opts.n_starts,
                                    hash_combine(opts.seed, std::uint64_t(k)), sopts, warm);
            if (c.kind == CertKind::Nonexistence || c.u_min.size() == 0) {
                r.verdict = "approach failed: no state at " + fmt_short(lk);
                return r;
            }
            r.sup_gaps.push_back((c.u_min - star->u).cwiseAbs().maxCoeff());
            r.grad_gaps.push_back(grad_sup_norm(mesh, c.u_min - star->u));
            warm = {std::move(c.u_min)};
        } catch (const std::exception& err) {
            r.verdict = std::string("approach solve failed at ") + fmt_short(lk) + ": " +
                        err.what();
            return r;
        }
    }

    r.gaps_decreasing = true;
    for (std::size_t k = 1; k < r.sup_gaps.size(); ++k)
        if (!(r.sup_gaps[k] < r.sup_gaps[k - 1] + 1e-12)) r.gaps_decreasing = false;
    r.final_gap = r.sup_gaps.back();
    r.passed = r.gaps_decreasing && r.final_gap <= opts.cont_tol;
    r.verdict = std::string(r.passed ? "left-continuous" : "left-continuity not met") +
                ": final sup gap " + fmt_short(r.final_gap) + " (tolerance " +
                fmt_short(opts.cont_tol) + ", gaps " +
                (r.gaps_decreasing ? "decreasing" : "not decreasing") + ")";
    return r;
}

// --- summary ----------------------------------------------------------------

struct BranchSummary {
    int n_entries = 0;
    int n_existence = 0;
    int n_nonexistence = 0;
    int n_error = 0;
    int n_unique = 0;        // entries carrying a uniqueness certificate
    int n_multiplicity = 0;  // entries carrying a second state
    std::optional<double> max_existence_lambda;
    std::optional<double> min_nonexistence_lambda;
    double bracket_lo = 0;  // threshold bracket widened by grid spacing + eig tol
    double bracket_hi = 0;
    bool bracket_contains_lambda1 = false;
    bool sandwich_ok = true;  // every existence lambda below every nonexistence one
    bool two_states_everywhere_below = false;
    double lambda1 = 0;
    MonotoneReport monotone;
    std::vector<std::string> verdicts;
};

inline BranchSummary summarize(const Branch& b, double mono_tol = 1e-8) {
    BranchSummary s;
    s.lambda1 = b.lambda1;
    s.n_entries = int(b.entries.size());

    const double tol_eig = Tolerances{}.tol_eig;
    int n_below = 0, n_two_below = 0;
    for (const BranchEntry& e : b.entries) {
        switch (e.status) {
            case EntryStatus::Existence:
                ++s.n_existence;
                if (!s.max_existence_lambda || e.lambda > *s.max_existence_lambda)
                    s.max_existence_lambda = e.lambda;
                break;
            case EntryStatus::Nonexistence:
                ++s.n_nonexistence;
                if (!s.min_nonexistence_lambda || e.lambda < *s.min_nonexistence_lambda)
                    s.min_nonexistence_lambda = e.lambda;
                break;
            default:
                ++s.n_error;
        }
        if (e.certificate && e.certificate->kind == CertKind::Uniqueness) ++s.n_unique;
        if (e.n_solutions == 2) ++s.n_multiplicity;
        if (e.lambda < b.lambda1 - tol_eig && e.status != EntryStatus::Error) {
            ++n_below;
            if (e.n_solutions == 2) ++n_two_below;
        }
    }
    s.two_states_everywhere_below = n_below > 0 && n_two_below == n_below;

    double spacing = 0;
    for (std::size_t k = 1; k < b.lambda_grid.size(); ++k)
        spacing = std::max(spacing, b.lambda_grid[k] - b.lambda_grid[k - 1]);
    const double widen = spacing + tol_eig;

    if (s.max_existence_lambda && s.min_nonexistence_lambda) {
        s.sandwich_ok = *s.max_existence_lambda < *s.min_nonexistence_lambda;
        s.bracket_lo = *s.max_existence_lambda - widen;
        s.bracket_hi = *s.min_nonexistence_lambda + widen;
        s.bracket_contains_lambda1 =
            s.bracket_lo <= b.lambda1 && b.lambda1 <= s.bracket_hi;
        s.verdicts.push_back(
            "nonexistence threshold bracketed in [" + fmt_short(*s.max_existence_lambda) +
            ", " + fmt_short(*s.min_nonexistence_lambda) + "], widened by " +
            fmt_short(widen));
        s.verdicts.push_back(s.bracket_contains_lambda1
                                 ? "the widened bracket contains the principal level " +
                                       fmt_short(b.lambda1)
                                 : "alarm: the widened bracket misses the principal level " +
                                       fmt_short(b.lambda1));
        if (!s.sandwich_ok)
            s.verdicts.push_back("alarm: an existence point sits above a nonexistence "
                                 "point");
    } else if (s.max_existence_lambda) {
        s.verdicts.push_back("no nonexistence observed: the threshold exceeds " +
                             fmt_short(*s.max_existence_lambda));
    } else if (s.min_nonexistence_lambda) {
        s.verdicts.push_back("no existence observed: the threshold is at or below " +
                             fmt_short(*s.min_nonexistence_lambda));
    } else {
        s.verdicts.push_back("no threshold information (empty or all-error branch)");
    }

    s.verdicts.push_back("existence at " + std::to_string(s.n_existence) + " of " +
                         std::to_string(s.n_entries) + " grid points (" +
                         std::to_string(s.n_unique) + " unique, " +
                         std::to_string(s.n_multiplicity) + " with a second state), " +
                         std::to_string(s.n_nonexistence) + " nonexistence, " +
                         std::to_string(s.n_error) + " errors");
    if (n_below > 0)
        s.verdicts.push_back(
            s.two_states_everywhere_below
                ? "two positive states at every parameter below the principal level"
                : "a second positive state at " + std::to_string(n_two_below) + " of " +
                      std::to_string(n_below) + " parameters below the principal level");

    s.monotone = check_monotone(b, mono_tol);
    s.verdicts.push_back(s.monotone.verdict);
    return s;
}

// --- CSV table ---------------------------------------------------------------

inline std::string to_csv(const Branch& b) {
    std::string out = "lambda,status,energy,u_max,u_min_interior,n_solutions\n";
    for (const BranchEntry& e : b.entries) {
        out += fmt_full(e.lambda);
        out += ',';
        out += to_string(e.status);
        out += ',';
        out += fmt_full(e.energy);
        out += ',';
        out += fmt_full(e.u_max);
        out += ',';
        out += fmt_full(e.u_min_interior);
        out += ',';
        out += std::to_string(e.n_solutions);
        out += '\n';
    }
    return out;
}

}  // namespace robinlab
