// Branch-layer tests: parameter sweeps, the minimal-branch monotonicity and
// left-continuity checks, threshold summaries, and the CSV table.
//
// Oracles used here and their independent derivations:
//  * interval benchmark (0,1), xi == 0, beta == 1: principal level from the
//    transcendental root of (t^2-1) sin t = 2 t cos t, computed by bisection
//    below and frozen as the threshold reference.
//  * discrete-gradient sup norm: affine nodal data has a constant elementwise
//    gradient, so the surrogate must return |slope| exactly on intervals and
//    the Euclidean slope norm on rectangles.
//  * statuses on a straddling grid: existence strictly below the principal
//    level, nonexistence at or above it (grid points sit 0.5 away, far
//    outside the eigenvalue tolerance).
//  * pure-power superlinear reaction: the tested amplitude law (sup of the
//    state grows at least linearly in the distance to the principal level)
//    forces the branch to *shrink* as the parameter rises, so the monotone
//    check must report violations — that is the honest negative control for
//    the nondecreasing claim, which holds only for the sublinear classes.
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "robinlab/branch.hpp"

namespace {

using namespace robinlab;

double robin_lambda1_oracle() {
    // smallest positive root of (t^2 - 1) sin t - 2 t cos t = 0, squared
    double lo = 1.0, hi = 1.5;
    auto g = [](double t) { return (t * t - 1) * std::sin(t) - 2 * t * std::cos(t); };
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (g(lo) * g(mid) <= 0) hi = mid; else lo = mid;
    }
    const double t = 0.5 * (lo + hi);
    return t * t;
}

Setting benchmark_setting(int n) {
    auto mesh = make_interval(0.0, 1.0, n);
    auto forms = std::make_shared<AssembledForms>(
        assemble(mesh, ScalarField::constant(0.0), ScalarField::constant(1.0)));
    return Setting::create(forms);
}

bool bits_equal(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) return false;
    return std::memcmp(a.data(), b.data(), sizeof(double) * std::size_t(a.size())) == 0;
}

// Shared fixture: one warm sublinear sweep on the benchmark, reused by the
// monotone / summary / CSV tests to avoid recomputing it per test case.
const Branch& sublinear_fixture() {
    static const Branch b = [] {
        Setting S = benchmark_setting(64);
        Nonlinearity nl = builtin("sub_f1", {{"q", 1.5}});
        SweepOptions opts;
        opts.n_starts = 4;
        opts.seed = 11;
        return sweep(nl, S, {S.lambda1 - 2.0, S.lambda1 - 1.0, S.lambda1 - 0.5,
                             S.lambda1 + 0.5}, opts);
    }();
    return b;
}

const Branch& superlinear_fixture() {
    static const Branch b = [] {
        Setting S = benchmark_setting(64);
        Nonlinearity nl = builtin("super_f1", {{"q", 3.0}});
        SweepOptions opts;
        opts.n_starts = 4;
        opts.seed = 7;
        return sweep(nl, S, {S.lambda1 - 2.0, S.lambda1 - 1.0, S.lambda1 - 0.5}, opts);
    }();
    return b;
}

}  // namespace

TEST_CASE("gradient surrogate: affine data recovers the exact slope", "[branch][oracle]") {
    SECTION("interval") {
        auto mesh = make_interval(0.0, 2.0, 16);
        Vec v(mesh->n_nodes());
        for (int i = 0; i < mesh->n_nodes(); ++i) v[i] = 3.5 * mesh->nodes[i][0] - 1.0;
        REQUIRE(grad_sup_norm(*mesh, v) == Catch::Approx(3.5).margin(1e-12));
    }
    SECTION("rectangle") {
        auto mesh = make_rectangle(1.0, 2.0, 6, 8);
        Vec v(mesh->n_nodes());
        for (int i = 0; i < mesh->n_nodes(); ++i)
            v[i] = 2.0 * mesh->nodes[i][0] + 3.0 * mesh->nodes[i][1];
        REQUIRE(grad_sup_norm(*mesh, v) == Catch::Approx(std::sqrt(13.0)).margin(1e-12));
    }
    SECTION("constant data has zero gradient") {
        auto mesh = make_interval(0.0, 1.0, 8);
        REQUIRE(grad_sup_norm(*mesh, Vec::Constant(mesh->n_nodes(), 4.0)) ==
                Catch::Approx(0.0).margin(1e-15));
    }
}

TEST_CASE("sweep: sublinear grid straddling the principal level", "[branch][sweep]") {
    const Branch& b = sublinear_fixture();
    const double l1 = b.lambda1;

    REQUIRE(b.entries.size() == 4);
    REQUIRE(b.lambda_grid.size() == 4);
    REQUIRE(std::is_sorted(b.lambda_grid.begin(), b.lambda_grid.end()));

    SECTION("statuses split at the principal level") {
        for (int k = 0; k < 3; ++k) {
            const BranchEntry& e = b.entries[std::size_t(k)];
            INFO("entry " << k << " lambda " << e.lambda << " note " << e.note);
            REQUIRE(e.status == EntryStatus::Existence);
            REQUIRE(e.n_solutions == 1);
            REQUIRE(e.u.size() > 0);
            REQUIRE(e.u_max > 0.0);
            REQUIRE(e.u_min_interior > 0.0);
            REQUIRE(e.certificate.has_value());
            REQUIRE(e.certificate->kind == CertKind::Uniqueness);
            REQUIRE(e.energy == e.certificate->energy_min);
        }
        const BranchEntry& last = b.entries[3];
        REQUIRE(last.lambda > l1);
        REQUIRE(last.status == EntryStatus::Nonexistence);
        REQUIRE(last.n_solutions == 0);
        REQUIRE(last.u.size() == 0);
        REQUIRE(last.u_max == 0.0);
    }

    SECTION("decreasing-quotient class: multistart states collapse to one") {
        for (int k = 0; k < 3; ++k) {
            REQUIRE(b.entries[std::size_t(k)].certificate->pair_distance <= 1e-6);
        }
    }

    SECTION("entries align with the grid") {
        for (std::size_t k = 0; k < b.entries.size(); ++k)
            REQUIRE(b.entries[k].lambda == b.lambda_grid[k]);
    }
}

TEST_CASE("sweep: warm and cold starts agree and reruns are byte-identical",
          "[branch][sweep][determinism]") {
    Setting S = benchmark_setting(48);
    Nonlinearity nl = builtin("sub_f1", {{"q", 1.5}});
    // offsets >= 0.5: nearer the principal level the n = 48 mesh trips the
    // auxiliary solve's coarseness alarm (amplitudes scale like the inverse
    // square of the distance), which is its own test elsewhere
    const std::vector<double> grid = {S.lambda1 - 1.5, S.lambda1 - 1.0, S.lambda1 - 0.5};

    SweepOptions warm;
    warm.n_starts = 3;
    warm.seed = 21;
    warm.warm_start = true;
    Branch bw = sweep(nl, S, grid, warm);

    SweepOptions cold = warm;
    cold.warm_start = false;
    Branch bc = sweep(nl, S, grid, cold);

    SECTION("path-independence of the minimal branch") {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            REQUIRE(bw.entries[k].status == EntryStatus::Existence);
            REQUIRE(bc.entries[k].status == EntryStatus::Existence);
            const double gap = (bw.entries[k].u - bc.entries[k].u).cwiseAbs().maxCoeff();
            INFO("grid point " << k << " sup gap " << gap);
            REQUIRE(gap <= 1e-6);
        }
    }

    SECTION("warm rerun reproduces every byte") {
        Branch bw2 = sweep(nl, S, grid, warm);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            REQUIRE(bits_equal(bw.entries[k].u, bw2.entries[k].u));
            REQUIRE(bw.entries[k].energy == bw2.entries[k].energy);
        }
    }

    SECTION("parallel cold sweep matches the sequential one bytewise") {
        SweepOptions par = cold;
        par.workers = 3;
        Branch bp = sweep(nl, S, grid, par);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            REQUIRE(bits_equal(bc.entries[k].u, bp.entries[k].u));
            REQUIRE(bc.entries[k].energy == bp.entries[k].energy);
        }
    }
}

TEST_CASE("sweep: degenerate grids", "[branch][sweep]") {
    Setting S = benchmark_setting(32);
    Nonlinearity nl = builtin("sub_f1", {{"q", 1.5}});

    SECTION("empty grid yields an empty branch") {
        Branch b = sweep(nl, S, {}, {});
        REQUIRE(b.entries.empty());
        REQUIRE(b.lambda_grid.empty());
        REQUIRE(b.lambda1 == S.lambda1);
    }
    SECTION("unsorted grid is rejected") {
        REQUIRE_THROWS_AS(sweep(nl, S, {1.0, 0.5}, {}), Error);
    }
    SECTION("duplicate grid points are rejected") {
        REQUIRE_THROWS_AS(sweep(nl, S, {0.5, 0.5, 1.0}, {}), Error);
    }
}

TEST_CASE("sweep: per-point failures are recorded and the sweep continues",
          "[branch][sweep]") {
    Setting S = benchmark_setting(32);
    Nonlinearity nl = builtin("sub_f1", {{"q", 1.5}});
    SweepOptions opts;
    opts.n_starts = 2;
    opts.seed = 3;
    opts.solver.max_iterations = 2;  // starve the minimizer so every point fails

    Branch b = sweep(nl, S, {S.lambda1 - 1.0, S.lambda1 - 0.5}, opts);
    REQUIRE(b.entries.size() == 2);
    for (const BranchEntry& e : b.entries) {
        REQUIRE(e.status == EntryStatus::Error);
        REQUIRE(e.n_solutions == 0);
        REQUIRE(e.u.size() == 0);
        REQUIRE_FALSE(e.note.empty());
        REQUIRE_FALSE(e.certificate.has_value());
    }
}

TEST_CASE("check_monotone: sublinear branch grows with the parameter",
          "[branch][monotone]") {
    const Branch& b = sublinear_fixture();
    MonotoneReport r = check_monotone(b);

    REQUIRE(r.n_pairs == 2);  // three existence entries -> two consecutive pairs
    REQUIRE(r.nondecreasing_ok);
    REQUIRE(r.violations.empty());
    REQUIRE(r.strict_checked);  // shifted-monotonicity class
    REQUIRE(r.strict_interior_ok);
    REQUIRE(r.strict_failures.empty());
    REQUIRE(r.passed());
}

TEST_CASE("check_monotone: shuffled entries produce node witnesses",
          "[branch][monotone]") {
    Branch shuffled = sublinear_fixture();
    std::swap(shuffled.entries[0].u, shuffled.entries[2].u);  // big state first

    MonotoneReport r = check_monotone(shuffled);
    REQUIRE_FALSE(r.nondecreasing_ok);
    REQUIRE_FALSE(r.passed());
    REQUIRE_FALSE(r.violations.empty());
    for (const NodeWitness& w : r.violations) {
        REQUIRE(w.lambda_lo < w.lambda_hi);
        REQUIRE(w.node >= 0);
        REQUIRE(w.gap > 0.0);
    }
}

TEST_CASE("check_monotone: single-entry branch passes vacuously", "[branch][monotone]") {
    Setting S = benchmark_setting(32);
    Nonlinearity nl = builtin("sub_f1", {{"q", 1.5}});
    SweepOptions opts;
    opts.n_starts = 2;
    opts.seed = 5;
    Branch b = sweep(nl, S, {S.lambda1 - 1.0}, opts);

    MonotoneReport r = check_monotone(b);
    REQUIRE(r.n_pairs == 0);
    REQUIRE(r.nondecreasing_ok);
    REQUIRE(r.strict_interior_ok);
    REQUIRE(r.passed());
}

TEST_CASE("check_left_continuity: gaps shrink toward the branch value",
          "[branch][continuity]") {
    const Branch& b = sublinear_fixture();
    const double lstar = b.lambda_grid[1];  // principal level - 1, an existence point

    SECTION("short approach: sup gaps decrease monotonically") {
        ContinuityOptions copts;
        copts.n_starts = 2;
        copts.seed = 13;
        ContinuityReport r = check_left_continuity(b, lstar, 5, copts);
        REQUIRE(r.applicable);
        REQUIRE(r.sup_gaps.size() == 5);
        REQUIRE(r.grad_gaps.size() == 5);
        for (std::size_t k = 1; k < r.sup_gaps.size(); ++k) {
            INFO("step " << k << ": " << r.sup_gaps[k - 1] << " -> " << r.sup_gaps[k]);
            REQUIRE(r.sup_gaps[k] < r.sup_gaps[k - 1] + 1e-12);
            REQUIRE(r.grad_gaps[k] < r.grad_gaps[k - 1] + 1e-12);
        }
        REQUIRE(r.gaps_decreasing);
        // approach points ascend toward lambda* from the left
        REQUIRE(std::is_sorted(r.approach.begin(), r.approach.end()));
        REQUIRE(r.approach.back() < lstar);
    }

    SECTION("deep approach meets the continuity tolerance") {
        ContinuityOptions copts;
        copts.n_starts = 1;  // pure continuation from the previous approach state
        copts.seed = 13;
        ContinuityReport r = check_left_continuity(b, lstar, 14, copts);
        REQUIRE(r.applicable);
        REQUIRE(r.gaps_decreasing);
        REQUIRE(r.final_gap <= 1e-4);
        REQUIRE(r.passed);
    }
}

TEST_CASE("check_left_continuity: off-branch points are not applicable",
          "[branch][continuity]") {
    const Branch& b = sublinear_fixture();

    SECTION("a parameter between grid points") {
        ContinuityReport r = check_left_continuity(b, b.lambda_grid[1] + 0.1, 3, {});
        REQUIRE_FALSE(r.applicable);
        REQUIRE_FALSE(r.passed);
        REQUIRE_FALSE(r.verdict.empty());
    }
    SECTION("a nonexistence grid point") {
        ContinuityReport r = check_left_continuity(b, b.lambda_grid[3], 3, {});
        REQUIRE_FALSE(r.applicable);
        REQUIRE_FALSE(r.passed);
    }
}

TEST_CASE("sweep: superlinear branch reports unique states honestly",
          "[branch][sweep][superlinear]") {
    const Branch& b = superlinear_fixture();
    REQUIRE(b.entries.size() == 3);

    SECTION("every point carries one positive state with the uniqueness verdict") {
        for (const BranchEntry& e : b.entries) {
            INFO("lambda " << e.lambda << " note " << e.note);
            REQUIRE(e.status == EntryStatus::Existence);
            REQUIRE(e.n_solutions == 1);
            REQUIRE(e.note.find("appears unique") != std::string::npos);
            REQUIRE(e.certificate.has_value());
            REQUIRE(e.certificate->kind == CertKind::Existence);
            REQUIRE_FALSE(e.certificate->u_mp.has_value());
        }
    }

    SECTION("the amplitude law: the state shrinks as the parameter rises") {
        REQUIRE(b.entries[0].u_max > b.entries[1].u_max);
        REQUIRE(b.entries[1].u_max > b.entries[2].u_max);
        for (const BranchEntry& e : b.entries)
            REQUIRE(e.u_max >= (b.lambda1 - e.lambda) * 0.9);
    }

    SECTION("the monotone check reports the violations") {
        MonotoneReport r = check_monotone(b);
        REQUIRE_FALSE(r.nondecreasing_ok);
        REQUIRE_FALSE(r.violations.empty());
        REQUIRE(r.strict_checked);
        REQUIRE_FALSE(r.passed());
    }

    SECTION("the summary denies two states below the principal level") {
        BranchSummary s = summarize(b);
        REQUIRE(s.n_existence == 3);
        REQUIRE(s.n_multiplicity == 0);
        REQUIRE_FALSE(s.two_states_everywhere_below);
        REQUIRE_FALSE(s.min_nonexistence_lambda.has_value());
        REQUIRE_FALSE(s.bracket_contains_lambda1);  // no upper bracket observed
    }
}

TEST_CASE("summarize: straddling sublinear run brackets the principal level",
          "[branch][summary]") {
    const Branch& b = sublinear_fixture();
    BranchSummary s = summarize(b);

    REQUIRE(s.n_entries == 4);
    REQUIRE(s.n_existence == 3);
    REQUIRE(s.n_nonexistence == 1);
    REQUIRE(s.n_error == 0);
    REQUIRE(s.n_unique == 3);
    REQUIRE(s.n_multiplicity == 0);

    REQUIRE(s.max_existence_lambda.has_value());
    REQUIRE(s.min_nonexistence_lambda.has_value());
    REQUIRE(*s.max_existence_lambda == Catch::Approx(b.lambda1 - 0.5));
    REQUIRE(*s.min_nonexistence_lambda == Catch::Approx(b.lambda1 + 0.5));
    REQUIRE(s.sandwich_ok);

    SECTION("the widened bracket holds both eigenvalue estimates") {
        REQUIRE(s.bracket_contains_lambda1);
        REQUIRE(s.bracket_lo <= b.lambda1);
        REQUIRE(b.lambda1 <= s.bracket_hi);
        const double closed_form = robin_lambda1_oracle();
        REQUIRE(s.bracket_lo <= closed_form);
        REQUIRE(closed_form <= s.bracket_hi);
    }

    SECTION("the embedded monotone report passes") {
        REQUIRE(s.monotone.passed());
    }

    SECTION("verdict lines cover threshold, tallies and monotonicity") {
        REQUIRE_FALSE(s.verdicts.empty());
        std::string all;
        for (const auto& v : s.verdicts) all += v + "\n";
        REQUIRE(all.find("bracket") != std::string::npos);
        REQUIRE(all.find("nondecreasing") != std::string::npos);
    }
}

TEST_CASE("summarize: all-nonexistence grid reports the threshold bound",
          "[branch][summary]") {
    Setting S = benchmark_setting(32);
    Nonlinearity nl = builtin("sub_f1", {{"q", 1.5}});
    SweepOptions opts;
    opts.n_starts = 2;
    opts.seed = 17;
    Branch b = sweep(nl, S, {S.lambda1 + 0.5, S.lambda1 + 1.0}, opts);

    REQUIRE(b.entries[0].status == EntryStatus::Nonexistence);
    REQUIRE(b.entries[1].status == EntryStatus::Nonexistence);

    BranchSummary s = summarize(b);
    REQUIRE(s.n_existence == 0);
    REQUIRE(s.n_nonexistence == 2);
    REQUIRE_FALSE(s.max_existence_lambda.has_value());
    REQUIRE(*s.min_nonexistence_lambda == Catch::Approx(S.lambda1 + 0.5));
    REQUIRE_FALSE(s.bracket_contains_lambda1);

    std::string all;
    for (const auto& v : s.verdicts) all += v + "\n";
    REQUIRE(all.find("at or below") != std::string::npos);
}

TEST_CASE("branch CSV: exact header and round-trip values", "[branch][csv]") {
    const Branch& b = sublinear_fixture();
    const std::string csv = to_csv(b);

    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    REQUIRE(line == "lambda,status,energy,u_max,u_min_interior,n_solutions");

    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        REQUIRE(fields.size() == 6);
        rows.push_back(std::move(fields));
    }
    REQUIRE(rows.size() == b.entries.size());

    for (std::size_t k = 0; k < rows.size(); ++k) {
        const BranchEntry& e = b.entries[k];
        REQUIRE(std::stod(rows[k][0]) == e.lambda);  // full-precision round trip
        REQUIRE(rows[k][1] == (e.status == EntryStatus::Existence ? "existence"
                                                                  : "nonexistence"));
        REQUIRE(std::stod(rows[k][2]) == e.energy);
        REQUIRE(std::stod(rows[k][3]) == e.u_max);
        REQUIRE(std::stod(rows[k][4]) == e.u_min_interior);
        REQUIRE(std::stoi(rows[k][5]) == e.n_solutions);
    }

    SECTION("emission is deterministic") {
        REQUIRE(to_csv(b) == csv);
    }
}
