// Pipelines behind the CLI verbs: prepare the discrete setting from a
// validated config, run the requested computation, and write the artifact
// set. Every artifact is plot-ready CSV or JSON; every number is emitted in
// round-trip precision so reruns with the same seed are byte-identical.
// No artifact contains wall-clock data.
//
// Artifact map:
//   eig     -> eig.json, eigenfunction.csv, summary.json
//   solve   -> solution_<tag>.csv per existence point, summary.json
//   certify -> certificate_<tag>.json (+ solution CSVs, second state when
//              found), summary.json
//   sweep   -> branch.csv, solution_<tag>.csv per existence point,
//              summary.json
// <tag> is the parameter value in short form, deduplicated by grid index if
// two parameters collide at six significant digits.
//
// Failure contract: invalid or incomplete configuration reports exit code 2
// with field diagnostics; solver failures report exit 1 with the failing
// stage named. Whatever happens, everything attempted lands either as an
// artifact or as an error entry in summary.json — never silence.
#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "robinlab/branch.hpp"
#include "robinlab/config.hpp"

namespace robinlab {

struct RunReport {
    int exit_code = 0;
    std::string verb;
    std::string stage;    // failing stage when exit_code != 0
    std::string message;  // failure text
    std::vector<FieldDiagnostic> diagnostics;
    std::vector<std::string> artifacts;  // file names inside the output dir

    Json error_json() const {
        Json e;
        e["exit"] = exit_code;
        e["stage"] = stage;
        e["message"] = message;
        if (!diagnostics.empty()) {
            Json d = Json::array();
            for (const auto& fd : diagnostics)
                d.push_back({{"field", fd.field}, {"message", fd.message}});
            e["diagnostics"] = std::move(d);
        }
        return Json{{"error", std::move(e)}};
    }
};

// --- JSON views of the report types ----------------------------------------

inline Json to_json_view(const Tolerances& t) {
    return Json{{"tol_grad", t.tol_grad},
                {"tol_eig", t.tol_eig},
                {"uniq_tol", t.uniq_tol},
                {"pos_floor", t.pos_floor},
                {"distinctness_floor", t.distinctness_floor},
                {"zero_collapse", t.zero_collapse},
                {"mono_tol", t.mono_tol},
                {"cont_tol", t.cont_tol},
                {"rho_mp", t.rho_mp}};
}

inline Json to_json_view(const Mesh& mesh, const Vec& u) {
    Json j;
    j["sup"] = u.size() ? u.maxCoeff() : 0.0;
    j["min"] = u.size() ? u.minCoeff() : 0.0;
    if (u.size()) {
        double interior = std::numeric_limits<double>::infinity();
        for (int i : mesh.interior_nodes()) interior = std::min(interior, u[i]);
        if (std::isfinite(interior)) j["interior_min"] = interior;
    }
    return j;
}

inline Json to_json_view(const Certificate& c, const Mesh& mesh) {
    Json j;
    j["kind"] = to_string(c.kind);
    j["lambda"] = c.lambda;
    j["lambda_hat_1"] = c.lambda1;
    j["n_starts"] = c.n_starts;
    j["tolerances"] = to_json_view(c.tol);
    if (c.kind != CertKind::Nonexistence) {
        j["energy_min"] = c.energy_min;
        j["u_min"] = to_json_view(mesh, c.u_min);
        j["lower_bound_ok"] = c.lower_bound_ok;
        j["lower_bound_gap"] = c.lower_bound_gap;
        j["pair_distance"] = c.pair_distance;
    }
    if (c.u_mp.has_value()) {
        j["energy_second"] = c.energy_mp;
        j["u_second"] = to_json_view(mesh, *c.u_mp);
        j["sphere_infimum"] = c.m_rho;
    }
    j["evidence"] = c.evidence;
    return j;
}

inline Json to_json_view(const HypothesisReport& rep) {
    Json clauses = Json::array();
    for (const auto& c : rep.clauses)
        clauses.push_back({{"id", c.id},
                           {"pass", c.pass},
                           {"informational", c.informational},
                           {"witness", c.witness}});
    return Json{{"class", "H" + std::to_string(int(rep.cls) + 1)},
                {"all_pass", rep.all_pass},
                {"clauses", std::move(clauses)}};
}

inline Json to_json_view(const MonotoneReport& r) {
    auto witnesses = [](const std::vector<NodeWitness>& ws) {
        Json out = Json::array();
        for (const auto& w : ws)
            out.push_back({{"lambda_lo", w.lambda_lo},
                           {"lambda_hi", w.lambda_hi},
                           {"node", w.node},
                           {"gap", w.gap}});
        return out;
    };
    return Json{{"nondecreasing_ok", r.nondecreasing_ok},
                {"strict_checked", r.strict_checked},
                {"strict_interior_ok", r.strict_interior_ok},
                {"n_pairs", r.n_pairs},
                {"mono_tol", r.mono_tol},
                {"violations", witnesses(r.violations)},
                {"strict_failures", witnesses(r.strict_failures)},
                {"verdict", r.verdict}};
}

inline Json to_json_view(const BranchSummary& s) {
    Json j;
    j["n_entries"] = s.n_entries;
    j["n_existence"] = s.n_existence;
    j["n_nonexistence"] = s.n_nonexistence;
    j["n_error"] = s.n_error;
    j["n_unique"] = s.n_unique;
    j["n_multiplicity"] = s.n_multiplicity;
    if (s.max_existence_lambda) j["max_existence_lambda"] = *s.max_existence_lambda;
    if (s.min_nonexistence_lambda)
        j["min_nonexistence_lambda"] = *s.min_nonexistence_lambda;
    if (s.max_existence_lambda && s.min_nonexistence_lambda) {
        j["bracket_lo"] = s.bracket_lo;
        j["bracket_hi"] = s.bracket_hi;
    }
    j["bracket_contains_lambda1"] = s.bracket_contains_lambda1;
    j["sandwich_ok"] = s.sandwich_ok;
    j["two_states_everywhere_below"] = s.two_states_everywhere_below;
    j["lambda_hat_1"] = s.lambda1;
    j["monotone"] = to_json_view(s.monotone);
    j["verdicts"] = s.verdicts;
    return j;
}

// --- CSV views ----------------------------------------------------------------

inline std::string solution_csv(const Mesh& mesh, const Vec& u) {
    require(u.size() == mesh.n_nodes(), "solution_csv: vector/mesh size mismatch");
    std::string out = mesh.dim == 1 ? "x,u\n" : "x,y,u\n";
    for (int i = 0; i < mesh.n_nodes(); ++i) {
        out += fmt_full(mesh.nodes[i][0]);
        if (mesh.dim == 2) {
            out += ',';
            out += fmt_full(mesh.nodes[i][1]);
        }
        out += ',';
        out += fmt_full(u[i]);
        out += '\n';
    }
    return out;
}

namespace detail {

// Short parameter tags for file names; grid-index suffix on six-digit ties.
inline std::vector<std::string> lambda_tags(const std::vector<double>& lambdas) {
    std::vector<std::string> tags;
    tags.reserve(lambdas.size());
    for (double l : lambdas) tags.push_back(fmt_short(l));
    for (std::size_t i = 0; i < tags.size(); ++i)
        for (std::size_t k = i + 1; k < tags.size(); ++k)
            if (tags[k] == tags[i]) tags[k] += "_" + std::to_string(k);
    return tags;
}

inline void write_text(RunReport& rep, const std::string& dir, const std::string& name,
                       const std::string& text) {
    std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
    if (!out) fail("io: cannot write " + name + " in " + dir);
    out << text;
    if (!out) fail("io: short write on " + name);
    rep.artifacts.push_back(name);
}

inline void write_json(RunReport& rep, const std::string& dir, const std::string& name,
                       const Json& j) {
    write_text(rep, dir, name, j.dump(2) + "\n");
}

inline Json domain_json(const ExperimentConfig& cfg) {
    if (cfg.dim == 1)
        return Json{{"kind", "interval"}, {"a", cfg.a}, {"b", cfg.b}, {"n", cfg.n}};
    return Json{{"kind", "rectangle"},
                {"lx", cfg.lx},
                {"ly", cfg.ly},
                {"nx", cfg.nx},
                {"ny", cfg.ny}};
}

inline Json mesh_json(const Mesh& mesh) {
    return Json{{"dim", mesh.dim},
                {"n_nodes", mesh.n_nodes()},
                {"n_cells", mesh.n_cells()},
                {"h", mesh.h}};
}

inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? int(hc) : 1;
}

// Config gaps that only matter for specific verbs surface as exit-2
// diagnostics, same as parse-time defects.
inline bool need(RunReport& rep, bool ok, const std::string& field,
                 const std::string& message) {
    if (ok) return true;
    rep.exit_code = 2;
    rep.stage = "config";
    rep.message = "incomplete config for verb '" + rep.verb + "'";
    rep.diagnostics.push_back({field, message});
    return false;
}

}  // namespace detail

// --- pipelines ------------------------------------------------------------------

inline RunReport run_eig(const ExperimentConfig& cfg) {
    RunReport rep;
    rep.verb = "eig";
    try {
        rep.stage = "io";
        std::filesystem::create_directories(cfg.output_dir);

        rep.stage = "assemble";
        auto mesh = cfg.build_mesh();
        auto forms = std::make_shared<const AssembledForms>(assemble(mesh, cfg.xi, cfg.beta));

        rep.stage = "eigensolve";
        EigenPair pair = principal_eigenpair(*forms);
        log_info("eig: principal level %.12g (residual %.3g, %d iterations)", pair.value,
                 pair.residual, pair.iterations);

        rep.stage = "io";
        Json eig;
        eig["schema_version"] = 1;
        eig["domain"] = detail::domain_json(cfg);
        eig["mesh"] = detail::mesh_json(*mesh);
        eig["lambda_hat_1"] = pair.value;
        eig["residual"] = pair.residual;
        eig["iterations"] = pair.iterations;
        eig["converged"] = pair.converged;
        eig["u1"] = to_json_view(*mesh, pair.vector);
        detail::write_json(rep, cfg.output_dir, "eig.json", eig);
        detail::write_text(rep, cfg.output_dir, "eigenfunction.csv",
                           solution_csv(*mesh, pair.vector));

        Json summary;
        summary["verb"] = rep.verb;
        summary["exit"] = 0;
        summary["lambda_hat_1"] = pair.value;
        summary["artifacts"] = rep.artifacts;
        detail::write_json(rep, cfg.output_dir, "summary.json", summary);
        rep.stage.clear();
        return rep;
    } catch (const std::exception& e) {
        rep.exit_code = 1;
        rep.message = e.what();
        return rep;
    }
}

namespace detail {

// Shared prelude for the solving verbs: requires a reaction and a parameter
// set, assembles, eigensolves, and resolves relative parameters.
struct SolvePrelude {
    Setting S;
    std::vector<double> lambdas;
    std::vector<std::string> tags;
};

inline std::optional<SolvePrelude> prepare(RunReport& rep, const ExperimentConfig& cfg) {
    if (!detail::need(rep, cfg.nl.has_value(), "nonlinearity",
                      "a reaction is required for this verb"))
        return std::nullopt;
    if (!detail::need(rep, cfg.has_lambda, "lambda",
                      "a parameter specification is required for this verb"))
        return std::nullopt;

    rep.stage = "io";
    std::filesystem::create_directories(cfg.output_dir);

    rep.stage = "assemble";
    auto mesh = cfg.build_mesh();
    auto forms = std::make_shared<const AssembledForms>(assemble(mesh, cfg.xi, cfg.beta));

    rep.stage = "eigensolve";
    SolvePrelude p{Setting::create(forms), {}, {}};
    p.lambdas = cfg.resolve_lambdas(p.S.lambda1);
    for (std::size_t k = 1; k < p.lambdas.size(); ++k)
        require(p.lambdas[k] > p.lambdas[k - 1],
                "config: the resolved parameter grid must be strictly increasing");
    p.tags = detail::lambda_tags(p.lambdas);
    log_info("prepared setting: principal level %.12g, %zu parameter(s)", p.S.lambda1,
             p.lambdas.size());
    return p;
}

}  // namespace detail

inline RunReport run_solve(const ExperimentConfig& cfg) {
    RunReport rep;
    rep.verb = "solve";
    try {
        auto pre = detail::prepare(rep, cfg);
        if (!pre) return rep;

        rep.stage = "solve";
        SweepOptions sopts;
        sopts.n_starts = cfg.n_starts;
        sopts.seed = cfg.seed;
        sopts.warm_start = cfg.warm_start;
        sopts.workers = detail::resolve_workers(cfg.workers);
        sopts.solver = cfg.solver;
        Branch b = sweep(*cfg.nl, pre->S, pre->lambdas, sopts);

        rep.stage = "io";
        Json points = Json::array();
        std::string first_error;
        for (std::size_t k = 0; k < b.entries.size(); ++k) {
            const BranchEntry& e = b.entries[k];
            Json p;
            p["lambda"] = e.lambda;
            p["status"] = to_string(e.status);
            if (e.status == EntryStatus::Existence) {
                const std::string name = "solution_" + pre->tags[k] + ".csv";
                detail::write_text(rep, cfg.output_dir, name,
                                   solution_csv(*pre->S.forms->mesh, e.u));
                p["artifact"] = name;
                p["energy"] = e.energy;
                p["u_max"] = e.u_max;
                p["u_min_interior"] = e.u_min_interior;
            }
            if (!e.note.empty()) p["note"] = e.note;
            if (e.status == EntryStatus::Error && first_error.empty())
                first_error = "lambda " + fmt_short(e.lambda) + ": " + e.note;
            points.push_back(std::move(p));
        }

        Json summary;
        summary["verb"] = rep.verb;
        summary["lambda_hat_1"] = pre->S.lambda1;
        summary["points"] = std::move(points);
        summary["exit"] = first_error.empty() ? 0 : 1;
        summary["artifacts"] = rep.artifacts;
        detail::write_json(rep, cfg.output_dir, "summary.json", summary);

        if (!first_error.empty()) {
            rep.exit_code = 1;
            rep.stage = "solve";
            rep.message = first_error;
        } else {
            rep.stage.clear();
        }
        return rep;
    } catch (const std::exception& e) {
        rep.exit_code = 1;
        rep.message = e.what();
        return rep;
    }
}

inline RunReport run_certify(const ExperimentConfig& cfg) {
    RunReport rep;
    rep.verb = "certify";
    try {
        auto pre = detail::prepare(rep, cfg);
        if (!pre) return rep;
        const Mesh& mesh = *pre->S.forms->mesh;

        Json points = Json::array();
        std::string first_error;
        for (std::size_t k = 0; k < pre->lambdas.size(); ++k) {
            rep.stage = "certify";
            const double lambda = pre->lambdas[k];
            Json p;
            p["lambda"] = lambda;
            try {
                Certificate c = certify(*cfg.nl, lambda, pre->S, cfg.n_starts,
                                        hash_combine(cfg.seed, k), cfg.solver);
                rep.stage = "io";
                const std::string cert_name = "certificate_" + pre->tags[k] + ".json";
                detail::write_json(rep, cfg.output_dir, cert_name, to_json_view(c, mesh));
                p["status"] = to_string(c.kind);
                p["artifact"] = cert_name;
                if (c.kind != CertKind::Nonexistence) {
                    const std::string sol = "solution_" + pre->tags[k] + ".csv";
                    detail::write_text(rep, cfg.output_dir, sol,
                                       solution_csv(mesh, c.u_min));
                    p["solution"] = sol;
                }
                if (c.u_mp.has_value()) {
                    const std::string second = "solution_" + pre->tags[k] + "_second.csv";
                    detail::write_text(rep, cfg.output_dir, second,
                                       solution_csv(mesh, *c.u_mp));
                    p["solution_second"] = second;
                }
            } catch (const Error& e) {
                p["status"] = "error";
                p["note"] = e.what();
                if (first_error.empty())
                    first_error = "lambda " + fmt_short(lambda) + ": " + e.what();
            }
            points.push_back(std::move(p));
        }

        rep.stage = "io";
        Json summary;
        summary["verb"] = rep.verb;
        summary["lambda_hat_1"] = pre->S.lambda1;
        summary["hypotheses"] = to_json_view(check_hypotheses(*cfg.nl));
        summary["points"] = std::move(points);
        summary["exit"] = first_error.empty() ? 0 : 1;
        summary["artifacts"] = rep.artifacts;
        detail::write_json(rep, cfg.output_dir, "summary.json", summary);

        if (!first_error.empty()) {
            rep.exit_code = 1;
            rep.stage = "certify";
            rep.message = first_error;
        } else {
            rep.stage.clear();
        }
        return rep;
    } catch (const std::exception& e) {
        rep.exit_code = 1;
        rep.message = e.what();
        return rep;
    }
}

inline RunReport run_sweep(const ExperimentConfig& cfg) {
    RunReport rep;
    rep.verb = "sweep";
    try {
        auto pre = detail::prepare(rep, cfg);
        if (!pre) return rep;

        rep.stage = "sweep";
        SweepOptions sopts;
        sopts.n_starts = cfg.n_starts;
        sopts.seed = cfg.seed;
        sopts.warm_start = cfg.warm_start;
        sopts.workers = detail::resolve_workers(cfg.workers);
        sopts.solver = cfg.solver;
        Branch b = sweep(*cfg.nl, pre->S, pre->lambdas, sopts);
        BranchSummary bs = summarize(b);
        for (const std::string& v : bs.verdicts) log_info("sweep: %s", v.c_str());

        rep.stage = "io";
        detail::write_text(rep, cfg.output_dir, "branch.csv", to_csv(b));
        Json entries = Json::array();
        int n_errors = 0;
        for (std::size_t k = 0; k < b.entries.size(); ++k) {
            const BranchEntry& e = b.entries[k];
            Json p;
            p["lambda"] = e.lambda;
            p["status"] = to_string(e.status);
            p["n_solutions"] = e.n_solutions;
            if (e.status == EntryStatus::Existence) {
                const std::string name = "solution_" + pre->tags[k] + ".csv";
                detail::write_text(rep, cfg.output_dir, name,
                                   solution_csv(*pre->S.forms->mesh, e.u));
                p["artifact"] = name;
                p["energy"] = e.energy;
                p["u_max"] = e.u_max;
                p["u_min_interior"] = e.u_min_interior;
            }
            if (!e.note.empty()) p["note"] = e.note;
            n_errors += e.status == EntryStatus::Error;
            entries.push_back(std::move(p));
        }

        Json summary;
        summary["verb"] = rep.verb;
        summary["lambda_hat_1"] = pre->S.lambda1;
        summary["hypotheses"] = to_json_view(check_hypotheses(*cfg.nl));
        summary["entries"] = std::move(entries);
        summary["branch"] = to_json_view(bs);
        const bool all_failed = !b.entries.empty() && n_errors == int(b.entries.size());
        summary["exit"] = all_failed ? 1 : 0;
        summary["artifacts"] = rep.artifacts;
        detail::write_json(rep, cfg.output_dir, "summary.json", summary);

        if (all_failed) {
            rep.exit_code = 1;
            rep.stage = "sweep";
            rep.message = "every grid point failed: " + b.entries.front().note;
        } else {
            rep.stage.clear();
        }
        return rep;
    } catch (const std::exception& e) {
        rep.exit_code = 1;
        rep.message = e.what();
        return rep;
    }
}

inline RunReport run_verb(const std::string& verb, const ExperimentConfig& cfg) {
    if (verb == "eig") return run_eig(cfg);
    if (verb == "solve") return run_solve(cfg);
    if (verb == "certify") return run_certify(cfg);
    if (verb == "sweep") return run_sweep(cfg);
    RunReport rep;
    rep.verb = verb;
    rep.exit_code = 2;
    rep.stage = "cli";
    rep.message = "unknown verb '" + verb + "'";
    return rep;
}

}  // namespace robinlab
