// Command-line front end. Verbs: eig, solve, certify, sweep (config-driven,
// artifact-emitting), list-builtins, selftest. Exit codes: 0 success, 1
// solver failure (stage named in the error JSON), 2 invalid or incomplete
// configuration (field diagnostics in the error JSON). Machine-readable
// errors go to stdout; ROBIN_LAB_LOG={info,debug} adds progress on stderr.
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "robinlab/runner.hpp"

namespace {

using namespace robinlab;

struct Overrides {
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<double> tol_grad;

    void apply(ExperimentConfig& cfg) const {
        if (out) cfg.output_dir = *out;
        if (seed) cfg.seed = *seed;
        if (workers) cfg.workers = *workers;
        if (tol_grad) {
            cfg.solver.tol_grad = *tol_grad;
            cfg.solver.tol.tol_grad = *tol_grad;
        }
    }
};

void add_common_flags(CLI::App* cmd, std::string& config_path, Overrides& ov) {
    cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
    cmd->add_option("--out", ov.out, "output directory (overrides the config)");
    cmd->add_option("--seed", ov.seed, "RNG seed (overrides the config)");
    cmd->add_option("--workers", ov.workers,
                    "worker threads for cold sweeps, 0 = all cores");
    cmd->add_option("--tol-grad", ov.tol_grad, "gradient tolerance override");
}

int emit(const RunReport& rep) {
    if (rep.exit_code != 0) {
        std::printf("%s\n", rep.error_json().dump(2).c_str());
    } else {
        std::printf("ok %s: %zu artifact(s)\n", rep.verb.c_str(), rep.artifacts.size());
    }
    return rep.exit_code;
}

int run_config_verb(const std::string& verb, const std::string& config_path,
                    const Overrides& ov) {
    try {
        ExperimentConfig cfg = load_config(config_path);
        ov.apply(cfg);
        return emit(run_verb(verb, cfg));
    } catch (const ConfigError& e) {
        RunReport rep;
        rep.verb = verb;
        rep.exit_code = 2;
        rep.stage = "config";
        rep.message = "invalid config";
        rep.diagnostics = e.diagnostics;
        return emit(rep);
    }
}

int list_builtins() {
    for (const BuiltinInfo& b : builtin_catalog()) {
        Nonlinearity nl = builtin(b.name);
        std::printf("%-9s %-3s %s\n", b.name.c_str(),
                    ("H" + std::to_string(int(nl.cls) + 1)).c_str(), b.formula.c_str());
        std::printf("          range: %s\n", b.parameter_ranges.c_str());
        if (!b.notes.empty()) std::printf("          notes: %s\n", b.notes.c_str());
    }
    return 0;
}

double robin_level_oracle() {
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

int selftest() {
    int failures = 0;
    auto report = [&](bool ok, const char* what) {
        std::printf("[%s] %s\n", ok ? "ok" : "fail", what);
        failures += !ok;
    };
    try {
        auto mesh = make_interval(0.0, 1.0, 256);
        auto forms = std::make_shared<const AssembledForms>(
            assemble(mesh, ScalarField::constant(0.0), ScalarField::constant(1.0)));
        Setting S = Setting::create(forms);
        const double oracle = robin_level_oracle();
        report(std::fabs(S.lambda1 - oracle) <= 1e-4 * oracle,
               "principal level matches the closed-form root at n = 256");

        auto mesh32 = make_interval(0.0, 1.0, 32);
        auto forms32 = std::make_shared<const AssembledForms>(
            assemble(mesh32, ScalarField::constant(0.0), ScalarField::constant(1.0)));
        Setting S32 = Setting::create(forms32);

        Certificate sub = certify(builtin("sub_f1", {{"q", 1.5}}), S32.lambda1 - 1.0, S32,
                                  4, 1u);
        report(sub.kind == CertKind::Uniqueness && sub.u_min.minCoeff() > 0,
               "sublinear benchmark certifies a unique positive state");

        SolverOptions relaxed;
        relaxed.multiplicity_required = false;
        Certificate sup = certify(builtin("super_f1", {{"q", 3.0}}), S32.lambda1 - 1.0,
                                  S32, 4, 1u, relaxed);
        bool noted = false;
        for (const auto& line : sup.evidence)
            noted = noted || line.find("appears unique") != std::string::npos;
        report(sup.kind == CertKind::Existence && noted,
               "superlinear benchmark reports the single-state verdict");

        Nonlinearity nl = builtin("sub_f1", {{"q", 1.5}});
        SweepOptions sopts;
        sopts.n_starts = 2;
        sopts.seed = 5;
        const std::vector<double> grid = {S32.lambda1 - 1.5, S32.lambda1 - 1.0};
        const std::string csv1 = to_csv(sweep(nl, S32, grid, sopts));
        const std::string csv2 = to_csv(sweep(nl, S32, grid, sopts));
        report(csv1 == csv2, "repeated sweep is byte-identical");
    } catch (const std::exception& e) {
        std::printf("[fail] selftest aborted: %s\n", e.what());
        return 1;
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for a parametric Robin reaction-diffusion "
                 "problem"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;

    CLI::App* eig = app.add_subcommand("eig", "principal eigenpair of the Robin form");
    CLI::App* solve = app.add_subcommand("solve", "minimal positive states per parameter");
    CLI::App* certify =
        app.add_subcommand("certify", "existence / uniqueness / multiplicity certificates");
    CLI::App* sweep = app.add_subcommand("sweep", "branch sweep with structural checks");
    add_common_flags(eig, config_path, ov);
    add_common_flags(solve, config_path, ov);
    add_common_flags(certify, config_path, ov);
    add_common_flags(sweep, config_path, ov);

    CLI::App* lb = app.add_subcommand("list-builtins", "catalog of built-in reactions");
    CLI::App* st = app.add_subcommand("selftest", "quick benchmark smoke test");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        robinlab::RunReport rep;
        rep.verb = "cli";
        rep.exit_code = 2;
        rep.stage = "cli";
        rep.message = e.what();
        std::printf("%s\n", rep.error_json().dump(2).c_str());
        return 2;
    }

    if (lb->parsed()) return list_builtins();
    if (st->parsed()) return selftest();
    for (const auto& [verb, cmd] :
         {std::pair<const char*, CLI::App*>{"eig", eig}, {"solve", solve},
          {"certify", certify}, {"sweep", sweep}})
        if (cmd->parsed()) return run_config_verb(verb, config_path, ov);
    return 2;  // unreachable: a subcommand is required
}
