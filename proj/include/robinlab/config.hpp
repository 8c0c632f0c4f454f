// Experiment configuration: a versioned JSON schema describing the domain,
// the coefficient fields, the reaction, the parameter set, and solver
// overrides. Validation is exhaustive rather than fail-fast: every problem in
// the file is collected into a field-level diagnostic, and the whole list is
// thrown at once so the caller can emit a complete machine-readable report
// (the CLI maps it to exit code 2).
//
// Schema (version 1), all blocks optional unless a verb needs them:
//   {
//     "schema_version": 1,
//     "domain": {"kind": "interval", "a": 0, "b": 1}
//             | {"kind": "rectangle", "lx": 1, "ly": 2},
//     "mesh":   {"n": 64} | {"nx": 8, "ny": 8},
//     "xi":     {"kind": "constant", "value": 0}
//             | {"kind": "expression", "text": "x*x - 1"}
//             | {"kind": "singular", "center": [0.5, 0], "strength": 1,
//                "alpha": 0.5},
//     "beta":   {"kind": "constant", "value": 1}
//             | {"kind": "expression", "text": "1 + x"},
//     "nonlinearity": {"builtin": "sub_f1", "params": {"q": 1.5}}
//                   | {"user": {"f": "...", "F": "...", "class": "H2",
//                      "q": 1.5, "r": 0, "tau": 1.6, "delta": 0.1, "c1": 1}},
//     "lambda": {"single": 1.0}
//             | {"grid": {"min": -1, "max": 1, "count": 5}}
//             | {"offsets": [-2, -1, -0.5, 0.5]},        // relative to the
//                                                        // principal level
//     "solver": {"tol_grad": 1e-9, "max_iterations": 4000, "n_starts": 6,
//                "seed": 0, "workers": 0, "warm_start": true,
//                "multiplicity_required": true},
//     "output": "out"
//   }
// Exactly one lambda alternative may appear; offsets are resolved against the
// principal level only after the eigen-solve, so absolute and relative
// specifications are mutually exclusive by construction.
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "robinlab/solvers.hpp"

namespace robinlab {

using Json = nlohmann::json;

struct FieldDiagnostic {
    std::string field;
    std::string message;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<FieldDiagnostic> diags)
        : Error(render(diags)), diagnostics(std::move(diags)) {}

    std::vector<FieldDiagnostic> diagnostics;

private:
    static std::string render(const std::vector<FieldDiagnostic>& diags) {
        std::string s = "invalid config:";
        for (const auto& d : diags) s += "\n  " + d.field + ": " + d.message;
        return s;
    }
};

struct ExperimentConfig {
    int schema_version = 1;

    // domain + mesh (defaults: the interval benchmark)
    int dim = 1;
    double a = 0, b = 1;    // interval endpoints
    double lx = 1, ly = 1;  // rectangle sides
    int n = 64;             // interval cells
    int nx = 8, ny = 8;     // rectangle cells per direction

    ScalarField xi = ScalarField::constant(0.0);
    ScalarField beta = ScalarField::constant(1.0);
    std::optional<Nonlinearity> nl;

    // parameter set: either absolute values or offsets from the principal level
    bool has_lambda = false;
    bool relative = false;
    std::vector<double> lambdas;  // absolute (when !relative)
    std::vector<double> offsets;  // relative (when relative)

    // solver + sweep overrides
    SolverOptions solver{};
    int n_starts = 6;
    std::uint64_t seed = 0;
    int workers = 0;  // 0 = all available cores (cold sweeps only)
    bool warm_start = true;
    std::string output_dir = "out";

    std::shared_ptr<const Mesh> build_mesh() const {
        return dim == 1 ? make_interval(a, b, n) : make_rectangle(lx, ly, nx, ny);
    }

    // Relative specs resolve only once the principal level is known.
    std::vector<double> resolve_lambdas(double lambda1) const {
        if (!relative) return lambdas;
        std::vector<double> out;
        out.reserve(offsets.size());
        for (double o : offsets) out.push_back(lambda1 + o);
        return out;
    }
};

namespace detail {

// Collects diagnostics across the whole document instead of stopping at the
// first defect.
class ConfigReader {
public:
    explicit ConfigReader(const Json& root) : root_(root) {}

    std::vector<FieldDiagnostic> diags;

    void add(const std::string& field, const std::string& message) {
        diags.push_back({field, message});
    }

    bool is_object(const Json& j, const std::string& field) {
        if (j.is_object()) return true;
        add(field, "must be an object");
        return false;
    }

    void check_keys(const Json& j, const std::string& field,
                    std::initializer_list<const char*> allowed) {
        if (!j.is_object()) return;
        for (const auto& item : j.items()) {
            bool known = false;
            for (const char* k : allowed)
                if (item.key() == k) known = true;
            if (!known) add(field.empty() ? item.key() : field + "." + item.key(),
                            "unknown field");
        }
    }

    std::optional<double> number(const Json& j, const std::string& field,
                                 const char* key, bool required = false) {
        if (!j.is_object() || !j.contains(key)) {
            if (required) add(field + "." + key, "required number missing");
            return std::nullopt;
        }
        const Json& v = j.at(key);
        if (!v.is_number()) {
            add(field + "." + key, "must be a number");
            return std::nullopt;
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            add(field + "." + key, "must be finite");
            return std::nullopt;
        }
        return d;
    }

    std::optional<long long> integer(const Json& j, const std::string& field,
                                     const char* key, bool required = false) {
        if (!j.is_object() || !j.contains(key)) {
            if (required) add(field + "." + key, "required integer missing");
            return std::nullopt;
        }
        const Json& v = j.at(key);
        if (!v.is_number_integer()) {
            add(field + "." + key, "must be an integer");
            return std::nullopt;
        }
        return v.get<long long>();
    }

    std::optional<std::string> text(const Json& j, const std::string& field,
                                    const char* key, bool required = false) {
        if (!j.is_object() || !j.contains(key)) {
            if (required) add(field + "." + key, "required string missing");
            return std::nullopt;
        }
        const Json& v = j.at(key);
        if (!v.is_string()) {
            add(field + "." + key, "must be a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    std::optional<bool> boolean(const Json& j, const std::string& field,
                                const char* key) {
        if (!j.is_object() || !j.contains(key)) return std::nullopt;
        const Json& v = j.at(key);
        if (!v.is_boolean()) {
            add(field + "." + key, "must be a boolean");
            return std::nullopt;
        }
        return v.get<bool>();
    }

    const Json& root() const { return root_; }

private:
    const Json& root_;
};

inline std::optional<HypothesisClass> parse_class(const std::string& s) {
    if (s == "H1") return HypothesisClass::H1;
    if (s == "H2") return HypothesisClass::H2;
    if (s == "H3") return HypothesisClass::H3;
    if (s == "H4") return HypothesisClass::H4;
    if (s == "H5") return HypothesisClass::H5;
    if (s == "H6") return HypothesisClass::H6;
    return std::nullopt;
}

inline void parse_domain_mesh(ConfigReader& r, ExperimentConfig& cfg) {
    const Json& root = r.root();
    std::string kind = "interval";
    if (root.contains("domain")) {
        const Json& d = root.at("domain");
        if (!r.is_object(d, "domain")) return;
        r.check_keys(d, "domain", {"kind", "a", "b", "lx", "ly"});
        kind = r.text(d, "domain", "kind", true).value_or("interval");
        if (kind == "interval") {
            cfg.dim = 1;
            cfg.a = r.number(d, "domain", "a").value_or(cfg.a);
            cfg.b = r.number(d, "domain", "b").value_or(cfg.b);
            if (!(cfg.b > cfg.a)) r.add("domain.b", "must exceed domain.a");
        } else if (kind == "rectangle") {
            cfg.dim = 2;
            cfg.lx = r.number(d, "domain", "lx").value_or(cfg.lx);
            cfg.ly = r.number(d, "domain", "ly").value_or(cfg.ly);
            if (!(cfg.lx > 0)) r.add("domain.lx", "must be positive");
            if (!(cfg.ly > 0)) r.add("domain.ly", "must be positive");
        } else {
            r.add("domain.kind", "must be \"interval\" or \"rectangle\"");
        }
    }
    if (root.contains("mesh")) {
        const Json& m = root.at("mesh");
        if (!r.is_object(m, "mesh")) return;
        r.check_keys(m, "mesh", {"n", "nx", "ny"});
        if (auto v = r.integer(m, "mesh", "n")) {
            cfg.n = int(*v);
            cfg.nx = cfg.ny = int(*v);
        }
        if (auto v = r.integer(m, "mesh", "nx")) cfg.nx = int(*v);
        if (auto v = r.integer(m, "mesh", "ny")) cfg.ny = int(*v);
        if (cfg.dim == 1 && cfg.n < 2) r.add("mesh.n", "need at least 2 cells");
        if (cfg.dim == 2 && (cfg.nx < 2 || cfg.ny < 2))
            r.add("mesh", "need at least 2 cells per direction");
    }
}

inline ScalarField parse_field(ConfigReader& r, const char* key, bool allow_singular,
                               ScalarField fallback, int dim) {
    const Json& root = r.root();
    if (!root.contains(key)) return fallback;
    const Json& f = root.at(key);
    if (!r.is_object(f, key)) return fallback;
    r.check_keys(f, key, {"kind", "value", "text", "center", "strength", "alpha"});
    const auto kind = r.text(f, key, "kind", true);
    if (!kind) return fallback;
    try {
        if (*kind == "constant") {
            if (auto v = r.number(f, key, "value", true)) return ScalarField::constant(*v);
        } else if (*kind == "expression") {
            if (auto t = r.text(f, key, "text", true))
                return ScalarField::expression(*t, dim);
        } else if (*kind == "singular" && allow_singular) {
            Point center{0, 0};
            if (f.contains("center")) {
                const Json& c = f.at("center");
                if (c.is_number()) {
                    center[0] = c.get<double>();
                } else if (c.is_array() && c.size() == 2 && c[0].is_number() &&
                           c[1].is_number()) {
                    center = {c[0].get<double>(), c[1].get<double>()};
                } else {
                    r.add(std::string(key) + ".center",
                          "must be a number or a [x, y] pair");
                    return fallback;
                }
            }
            const auto s0 = r.number(f, key, "strength", true);
            const auto alpha = r.number(f, key, "alpha", true);
            if (s0 && alpha) return ScalarField::singular_power(center, *s0, *alpha);
        } else {
            r.add(std::string(key) + ".kind",
                  allow_singular
                      ? "must be \"constant\", \"expression\" or \"singular\""
                      : "must be \"constant\" or \"expression\"");
        }
    } catch (const Error& e) {
        r.add(key, e.what());
    }
    return fallback;
}

inline void parse_nonlinearity(ConfigReader& r, ExperimentConfig& cfg) {
    const Json& root = r.root();
    if (!root.contains("nonlinearity")) return;
    const Json& nj = root.at("nonlinearity");
    if (!r.is_object(nj, "nonlinearity")) return;
    r.check_keys(nj, "nonlinearity", {"builtin", "params", "user"});
    const bool has_builtin = nj.contains("builtin");
    const bool has_user = nj.contains("user");
    if (has_builtin == has_user) {
        r.add("nonlinearity", "exactly one of \"builtin\" or \"user\" is required");
        return;
    }
    try {
        if (has_builtin) {
            const auto name = r.text(nj, "nonlinearity", "builtin", true);
            if (!name) return;
            std::map<std::string, double> params;
            if (nj.contains("params")) {
                const Json& p = nj.at("params");
                if (!r.is_object(p, "nonlinearity.params")) return;
                for (const auto& item : p.items()) {
                    if (!item.value().is_number()) {
                        r.add("nonlinearity.params." + item.key(), "must be a number");
                        return;
                    }
                    params[item.key()] = item.value().get<double>();
                }
            }
            cfg.nl = builtin(*name, params);
            return;
        }
        const Json& u = nj.at("user");
        if (!r.is_object(u, "nonlinearity.user")) return;
        r.check_keys(u, "nonlinearity.user",
                     {"f", "F", "class", "q", "r", "tau", "delta", "c1"});
        const auto f = r.text(u, "nonlinearity.user", "f", true);
        const auto F = r.text(u, "nonlinearity.user", "F", true);
        const auto cls_text = r.text(u, "nonlinearity.user", "class", true);
        if (!f || !F || !cls_text) return;
        const auto cls = parse_class(*cls_text);
        if (!cls) {
            r.add("nonlinearity.user.class", "must be one of H1..H6");
            return;
        }
        cfg.nl = user_defined(*f, *F, *cls, r.number(u, "nonlinearity.user", "q").value_or(0),
                              r.number(u, "nonlinearity.user", "r").value_or(0),
                              r.number(u, "nonlinearity.user", "tau").value_or(0),
                              r.number(u, "nonlinearity.user", "delta").value_or(0),
                              r.number(u, "nonlinearity.user", "c1").value_or(0));
    } catch (const Error& e) {
        r.add("nonlinearity", e.what());
    }
}

inline void parse_lambda(ConfigReader& r, ExperimentConfig& cfg) {
    const Json& root = r.root();
    if (!root.contains("lambda")) return;
    const Json& lj = root.at("lambda");
    if (!r.is_object(lj, "lambda")) return;
    r.check_keys(lj, "lambda", {"single", "grid", "offsets"});
    const int n_given = int(lj.contains("single")) + int(lj.contains("grid")) +
                        int(lj.contains("offsets"));
    if (n_given != 1) {
        r.add("lambda",
              "exactly one of \"single\", \"grid\" or \"offsets\" is required "
              "(absolute and relative specifications are mutually exclusive)");
        return;
    }
    cfg.has_lambda = true;
    if (lj.contains("single")) {
        if (auto v = r.number(lj, "lambda", "single", true)) cfg.lambdas = {*v};
        return;
    }
    if (lj.contains("grid")) {
        const Json& g = lj.at("grid");
        if (!r.is_object(g, "lambda.grid")) return;
        r.check_keys(g, "lambda.grid", {"min", "max", "count"});
        const auto lo = r.number(g, "lambda.grid", "min", true);
        const auto hi = r.number(g, "lambda.grid", "max", true);
        const auto count = r.integer(g, "lambda.grid", "count", true);
        if (!lo || !hi || !count) return;
        if (*count < 1) {
            r.add("lambda.grid.count", "must be at least 1");
            return;
        }
        if (*count > 1 && !(*hi > *lo)) {
            r.add("lambda.grid", "max must exceed min when count > 1");
            return;
        }
        for (long long k = 0; k < *count; ++k)
            cfg.lambdas.push_back(*count == 1 ? *lo
                                              : *lo + (*hi - *lo) * double(k) /
                                                          double(*count - 1));
        return;
    }
    const Json& arr = lj.at("offsets");
    if (!arr.is_array() || arr.empty()) {
        r.add("lambda.offsets", "must be a nonempty array of numbers");
        return;
    }
    cfg.relative = true;
    for (std::size_t k = 0; k < arr.size(); ++k) {
        if (!arr[k].is_number() || !std::isfinite(arr[k].get<double>())) {
            r.add("lambda.offsets[" + std::to_string(k) + "]", "must be a finite number");
            return;
        }
        cfg.offsets.push_back(arr[k].get<double>());
    }
    for (std::size_t k = 1; k < cfg.offsets.size(); ++k)
        if (!(cfg.offsets[k] > cfg.offsets[k - 1])) {
            r.add("lambda.offsets", "must be strictly increasing");
            return;
        }
}

inline void parse_solver(ConfigReader& r, ExperimentConfig& cfg) {
    const Json& root = r.root();
    if (!root.contains("solver")) return;
    const Json& s = root.at("solver");
    if (!r.is_object(s, "solver")) return;
    r.check_keys(s, "solver",
                 {"tol_grad", "max_iterations", "n_starts", "seed", "workers",
                  "warm_start", "multiplicity_required"});
    if (auto v = r.number(s, "solver", "tol_grad")) {
        if (*v > 0)
            cfg.solver.tol_grad = *v;
        else
            r.add("solver.tol_grad", "must be positive");
    }
    if (auto v = r.integer(s, "solver", "max_iterations")) {
        if (*v >= 1)
            cfg.solver.max_iterations = int(*v);
        else
            r.add("solver.max_iterations", "must be at least 1");
    }
    if (auto v = r.integer(s, "solver", "n_starts")) {
        if (*v >= 1)
            cfg.n_starts = int(*v);
        else
            r.add("solver.n_starts", "must be at least 1");
    }
    if (auto v = r.integer(s, "solver", "seed")) {
        if (*v >= 0)
            cfg.seed = std::uint64_t(*v);
        else
            r.add("solver.seed", "must be nonnegative");
    }
    if (auto v = r.integer(s, "solver", "workers")) {
        if (*v >= 0)
            cfg.workers = int(*v);
        else
            r.add("solver.workers", "must be nonnegative (0 = all cores)");
    }
    if (auto v = r.boolean(s, "solver", "warm_start")) cfg.warm_start = *v;
    if (auto v = r.boolean(s, "solver", "multiplicity_required"))
        cfg.solver.multiplicity_required = *v;
}

}  // namespace detail

inline ExperimentConfig parse_config(const Json& root) {
    if (!root.is_object())
        throw ConfigError(std::vector<FieldDiagnostic>{
            {"(root)", "the config document must be a JSON object"}});

    detail::ConfigReader r(root);
    r.check_keys(root, "",
                 {"schema_version", "domain", "mesh", "xi", "beta", "nonlinearity",
                  "lambda", "solver", "output"});

    ExperimentConfig cfg;
    const auto ver = r.integer(root, "(root)", "schema_version", true);
    if (ver && *ver != 1)
        r.add("schema_version", "unsupported version " + std::to_string(*ver) +
                                    " (this build reads version 1)");

    detail::parse_domain_mesh(r, cfg);
    cfg.xi = detail::parse_field(r, "xi", /*allow_singular=*/true, cfg.xi, cfg.dim);
    cfg.beta = detail::parse_field(r, "beta", /*allow_singular=*/false, cfg.beta, cfg.dim);
    detail::parse_nonlinearity(r, cfg);
    detail::parse_lambda(r, cfg);
    detail::parse_solver(r, cfg);
    if (auto out = r.text(root, "(root)", "output")) {
        if (out->empty())
            r.add("output", "must be a nonempty path");
        else
            cfg.output_dir = *out;
    }

    if (!r.diags.empty()) throw ConfigError(std::move(r.diags));
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(std::vector<FieldDiagnostic>{
            {"(file)", "cannot open config file: " + path}});
    Json root;
    try {
        in >> root;
    } catch (const Json::exception& e) {
        throw ConfigError(std::vector<FieldDiagnostic>{
            {"(file)", std::string("JSON parse failure: ") + e.what()}});
    }
    return parse_config(root);
}

}  // namespace robinlab
