// Reaction nonlinearities f(x) with primitives F, hypothesis-class metadata,
// grid-based hypothesis verification, and the unilateral lower-bound
// constants (c1, q, c4(lambda), tau) used by the auxiliary absorption
// problem. All builtins are z-independent.
//
// Hypothesis classes:
//   H1  sublinear: f > 0 on (0,inf), locally bounded, f(x)/x -> 0 at
//       infinity, and a concave floor c1*x^(q-1) <= f on (0,delta], 1<q<2.
//   H2  H1 plus shifted monotonicity: f(x) + xi_hat*x nondecreasing on [0,rho].
//   H3  H1 plus strictly decreasing quotient x -> f(x)/x on (0,inf).
//   H4  H3 plus the H2 shifted monotonicity.
//   H5  superlinear: 0 <= f <= a(1+x^(r-1)) with 2<r<2*, F(x)/x^2 -> inf,
//       liminf (f(x)x - 2F(x))/x^q >= xi_tilde > 0, f(x)/x -> 0 at 0+.
//   H6  H5 plus shifted monotonicity.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "robinlab/core.hpp"
#include "robinlab/expr.hpp"
#include "robinlab/quadrature.hpp"

namespace robinlab {

enum class HypothesisClass { H1, H2, H3, H4, H5, H6 };

inline std::string to_string(HypothesisClass c) {
    switch (c) {
        case HypothesisClass::H1: return "H1";
        case HypothesisClass::H2: return "H2";
        case HypothesisClass::H3: return "H3";
        case HypothesisClass::H4: return "H4";
        case HypothesisClass::H5: return "H5";
        case HypothesisClass::H6: return "H6";
    }
    return "?";
}

inline HypothesisClass hypothesis_class_from_string(const std::string& s) {
    if (s == "H1") return HypothesisClass::H1;
    if (s == "H2") return HypothesisClass::H2;
    if (s == "H3") return HypothesisClass::H3;
    if (s == "H4") return HypothesisClass::H4;
    if (s == "H5") return HypothesisClass::H5;
    if (s == "H6") return HypothesisClass::H6;
    fail("nonlinearity: unknown hypothesis class '" + s + "'");
}

inline bool is_superlinear(HypothesisClass c) {
    return c == HypothesisClass::H5 || c == HypothesisClass::H6;
}
inline bool has_shifted_monotonicity(HypothesisClass c) {
    return c == HypothesisClass::H2 || c == HypothesisClass::H4 || c == HypothesisClass::H6;
}
inline bool has_decreasing_quotient(HypothesisClass c) {
    return c == HypothesisClass::H3 || c == HypothesisClass::H4;
}

struct Nonlinearity {
    std::string name;
    HypothesisClass cls = HypothesisClass::H1;
    double q = 0;      // concave-floor exponent (sublinear) / superlinearity exponent
    double r = 2;      // growth exponent in f <= a(1+x^(r-1))
    double tau = 3;    // preferred absorption exponent (sublinear) / AR exponent
    double delta = 0;  // concave-floor window (sublinear)
    double c1 = 0;     // concave-floor constant (sublinear)
    bool satisfies_ar = false;
    std::string description;
    std::function<double(double)> f, F;

    bool superlinear() const { return is_superlinear(cls); }
};

namespace detail {

inline double powp(double x, double e) { return x <= 0 ? 0.0 : std::pow(x, e); }

// Primitive of ln(x^(q-1)+1) on [0,1]: alternating series near zero
// (machine-precision for x <= 1/2), then one fixed Gauss panel on the smooth
// remainder. Closed form does not exist for general q.
inline double primitive_log_concave(double q, double x) {
    const double a = q - 1.0;
    auto series = [a](double t) {
        // int_0^t ln(1+s^a) ds = sum_{k>=1} (-1)^(k+1) t^(a k + 1) / (k (a k + 1))
        double sum = 0, tk = std::pow(t, a);
        double tak = tk;  // t^(a k)
        for (int k = 1; k < 2000000; ++k) {
            const double term = (k % 2 ? 1.0 : -1.0) * t * tak / (k * (a * k + 1.0));
            sum += term;
            if (std::fabs(term) < 1e-17 * (std::fabs(sum) + 1e-300)) break;
            tak *= tk;
        }
        return sum;
    };
    if (x <= 0.5) return series(x);
    auto g = [a](double t) { return std::log1p(std::pow(t, a)); };
    return series(0.5) + quad::gauss7(g, 0.5, 0.25 + 0.5 * x) +
           quad::gauss7(g, 0.25 + 0.5 * x, x);
}

}  // namespace detail

// --- builtin catalog -----------------------------------------------------

struct BuiltinInfo {
    std::string name;
    HypothesisClass cls;
    std::string formula;
    std::string parameter_ranges;
    std::string notes;
};

inline std::vector<BuiltinInfo> builtin_catalog() {
    return {
        {"sub_f1", HypothesisClass::H4, "f(x) = x^(q-1)", "1 < q < 2",
         "uniqueness and strictly increasing branch"},
        {"sub_f2", HypothesisClass::H1,
         "f(x) = -x^(q-1) ln x on [0,1]; x^(s-1) - x^(p-1) for x > 1",
         "1 < p < s < 2, 1 < q < 2", ""},
        {"h2_f2", HypothesisClass::H2,
         "f(x) = x^(q-1) on [0,1]; 2 x^(tau-1) - x^(s-1) for x > 1",
         "1 < q, tau, s < 2, s < tau", ""},
        {"h2_f3", HypothesisClass::H2,
         "f(x) = x^(q-1) - x^(s-1) on [0,1]; x^(tau-1) ln x for x > 1",
         "1 < q, s, tau < 2, q < s", ""},
        {"h2_f4", HypothesisClass::H2,
         "f(x) = ln(x^(q-1) + 1) on [0,1]; x^(tau-1) - x^(s-1) + ln 2 for x > 1",
         "1 < q, tau, s < 2, s < tau", ""},
        {"h3_f2", HypothesisClass::H3,
         "f(x) = x^(q-1) on [0,1]; x^(tau-1) for x > 1", "1 < tau < q < 2", ""},
        {"super_f1", HypothesisClass::H6, "f(x) = x^(q-1)", "2 < q < 2*",
         "satisfies the AR condition with tau = q"},
        {"super_f2", HypothesisClass::H6, "f(x) = x ln(1+x)", "(no parameters)",
         "fails AR; superlinearity certified via the q = 2 quotient"},
    };
}

inline Nonlinearity builtin(const std::string& name,
                            const std::map<std::string, double>& params = {}) {
    auto get = [&](const char* key, double dflt) {
        auto it = params.find(key);
        return it == params.end() ? dflt : it->second;
    };
    using detail::powp;
    Nonlinearity n;
    n.name = name;

    if (name == "sub_f1") {
        const double q = get("q", 1.5);
        require(q > 1 && q < 2, "sub_f1: exponent must satisfy 1 < q < 2 (sublinear "
                                "concave hypothesis); got q = " + fmt_short(q));
        n.cls = HypothesisClass::H4;
        n.q = q;
        n.r = 2;
        n.delta = 1;
        n.c1 = 1;
        n.description = "x^(q-1), q = " + fmt_short(q);
        n.f = [q](double x) { return powp(x, q - 1); };
        n.F = [q](double x) { return x <= 0 ? 0.0 : std::pow(x, q) / q; };
        return n;
    }
    if (name == "sub_f2") {
        const double p = get("p", 1.5), s = get("s", 1.8), q = get("q", 1.5);
        require(p > 1 && p < s && s < 2, "sub_f2: needs 1 < p < s < 2; got p = " +
                                             fmt_short(p) + ", s = " + fmt_short(s));
        require(q > 1 && q < 2, "sub_f2: needs 1 < q < 2; got q = " + fmt_short(q));
        n.cls = HypothesisClass::H1;
        n.q = q;
        n.r = 2;
        n.delta = std::exp(-1.0);
        n.c1 = 1;
        n.description = "-x^(q-1) ln x, then x^(s-1) - x^(p-1)";
        n.f = [p, s, q](double x) {
            if (x <= 0) return 0.0;
            if (x <= 1) return -std::pow(x, q - 1) * std::log(x);
            return std::pow(x, s - 1) - std::pow(x, p - 1);
        };
        n.F = [p, s, q](double x) {
            if (x <= 0) return 0.0;
            if (x <= 1) return -std::pow(x, q) * std::log(x) / q + std::pow(x, q) / (q * q);
            return 1.0 / (q * q) + (std::pow(x, s) - 1) / s - (std::pow(x, p) - 1) / p;
        };
        return n;
    }
    if (name == "h2_f2") {
        const double q = get("q", 1.5), tau = get("tau", 1.8), s = get("s", 1.3);
        require(q > 1 && q < 2 && tau > 1 && tau < 2 && s > 1 && s < 2 && s < tau,
                "h2_f2: needs 1 < q, tau, s < 2 with s < tau");
        n.cls = HypothesisClass::H2;
        n.q = q;
        n.r = 2;
        n.delta = 1;
        n.c1 = 1;
        n.description = "x^(q-1), then 2 x^(tau-1) - x^(s-1)";
        n.f = [q, tau, s](double x) {
            if (x <= 0) return 0.0;
            if (x <= 1) return std::pow(x, q - 1);
            return 2 * std::pow(x, tau - 1) - std::pow(x, s - 1);
        };
        n.F = [q, tau, s](double x) {
            if (x <= 0) return 0.0;
            if (x <= 1) return std::pow(x, q) / q;
            return 1.0 / q + 2 * (std::pow(x, tau) - 1) / tau - (std::pow(x, s) - 1) / s;
        };
        return n;
    }
    if (name == "h2_f3") {
        const double q = get("q", 1.3), s = get("s", 1.7), tau = get("tau", 1.5);
        require(q > 1 && q < 2 && s > 1 && s < 2 && tau > 1 && tau < 2 && q < s,
                "h2_f3: needs 1 < q, s, tau < 2 with q < s");
        n.cls = HypothesisClass::H2;
        n.q = q;
        n.r = 2;
        n.delta = std::pow(2.0, -1.0 / (s - q));
        n.c1 = 0.5;
        n.description = "x^(q-1) - x^(s-1), then x^(tau-1) ln x";
        n.f = [q, s, tau](double x) {
            if (x <= 0) return 0.0;
            if (x <= 1) return std::pow(x, q - 1) - std::pow(x, s - 1);
            return std::pow(x, tau - 1) * std::log(x);
        };
        n.F = [q, s, tau](double x) {
            if (x <= 0) return 0.0;
            if (x <= 1) return std::pow(x, q) / q - std::pow(x, s) / s;
            const double xt = std::pow(x, tau);
            return (1.0 / q - 1.0 / s) + xt * std::log(x) / tau - (xt - 1) / (tau * tau);
        };
        return n;
    }
    if (name == "h2_f4") {
        const double q = get("q", 1.5), tau = get("tau", 1.8), s = get("s", 1.3);
        require(q > 1 && q < 2 && tau > 1 && tau < 2 && s > 1 && s < 2 && s < tau,
                "h2_f4: needs 1 < q, tau, s < 2 with s < tau");
        n.cls = HypothesisClass::H2;
        n.q = q;
        n.r = 2;
        n.delta = 1;
        n.c1 = std::log(2.0);
        n.description = "ln(x^(q-1) + 1), then x^(tau-1) - x^(s-1) + ln 2";
        const double F1 = detail::primitive_log_concave(q, 1.0);
        n.f = [q, tau, s](double x) {
            if (x <= 0) return 0.0;
            if (x <= 1) return std::log1p(std::pow(x, q - 1));
            return std::pow(x, tau - 1) - std::pow(x, s - 1) + std::log(2.0);
        };
        n.F = [q, tau, s, F1](double x) {
            if (x <= 0) return 0.0;
            if (x <= 1) return detail::primitive_log_concave(q, x);
            return F1 + (std::pow(x, tau) - 1) / tau - (std::pow(x, s) - 1) / s +
                   std::log(2.0) * (x - 1);
        };
        return n;
    }
    if (name == "h3_f2") {
        const double q = get("q", 1.8), tau = get("tau", 1.3);
        require(q > 1 && q < 2 && tau > 1 && tau < q,
                "h3_f2: needs 1 < tau < q < 2 (strictly decreasing quotient)");
        n.cls = HypothesisClass::H3;
        n.q = q;
        n.r = 2;
        n.delta = 1;
        n.c1 = 1;
        n.description = "x^(q-1), then x^(tau-1)";
        n.f = [q, tau](double x) {
            if (x <= 0) return 0.0;
            return x <= 1 ? std::pow(x, q - 1) : std::pow(x, tau - 1);
        };
        n.F = [q, tau](double x) {
            if (x <= 0) return 0.0;
            return x <= 1 ? std::pow(x, q) / q : 1.0 / q + (std::pow(x, tau) - 1) / tau;
        };
        return n;
    }
    if (name == "super_f1") {
        const double q = get("q", 3.0);
        require(q > 2, "super_f1: exponent must satisfy 2 < q < 2* (superlinear "
                       "hypothesis); got q = " + fmt_short(q));
        n.cls = HypothesisClass::H6;
        n.q = q;  // superlinearity quotient exponent equals the power
        n.r = q;
        n.tau = q;
        n.satisfies_ar = true;
        n.description = "x^(q-1), q = " + fmt_short(q);
        n.f = [q](double x) { return powp(x, q - 1); };
        n.F = [q](double x) { return x <= 0 ? 0.0 : std::pow(x, q) / q; };
        return n;
    }
    if (name == "super_f2") {
        n.cls = HypothesisClass::H6;
        n.q = 2;    // (f(x)x - 2F(x))/x^2 -> 1/2
        n.r = 2.5;  // any exponent in (2, 2*) bounds x ln(1+x)
        n.tau = 0;
        n.satisfies_ar = false;
        n.description = "x ln(1+x)";
        n.f = [](double x) { return x <= 0 ? 0.0 : x * std::log1p(x); };
        n.F = [](double x) {
            if (x <= 0) return 0.0;
            return 0.5 * (x * x - 1) * std::log1p(x) - 0.25 * x * x + 0.5 * x;
        };
        return n;
    }
    fail("nonlinearity: unknown builtin '" + name +
         "' (available: sub_f1, sub_f2, h2_f2, h2_f3, h2_f4, h3_f2, super_f1, super_f2)");
}

// User-supplied reaction from expression strings plus declared growth data.
// The declared primitive is verified against f by central differences.
inline Nonlinearity user_defined(const std::string& f_text, const std::string& F_text,
                                 HypothesisClass cls, double q, double r, double tau,
                                 double delta, double c1) {
    Nonlinearity n;
    n.name = "user";
    n.cls = cls;
    n.q = q;
    n.r = r;
    n.tau = tau;
    n.delta = delta;
    n.c1 = c1;
    n.description = "user expression f = " + f_text;
    if (is_superlinear(cls)) {
        require(q > 1, "user nonlinearity: superlinear quotient exponent must be > 1");
        require(r > 2, "user nonlinearity: superlinear growth exponent must be > 2");
    } else {
        require(q > 1 && q < 2, "user nonlinearity: concave exponent must satisfy 1 < q < 2");
        require(delta > 0 && c1 > 0,
                "user nonlinearity: sublinear class requires delta > 0 and c1 > 0 for the "
                "concave floor");
    }
    expr::Expression fe(f_text, {"x"});
    expr::Expression Fe(F_text, {"x"});
    n.f = [fe](double x) { return x <= 0 ? 0.0 : fe.eval(&x); };
    n.F = [Fe](double x) { return x <= 0 ? 0.0 : Fe.eval(&x); };

    require(std::fabs(n.F(0.0)) <= 1e-12, "user nonlinearity: primitive must vanish at 0");
    for (int i = 1; i <= 40; ++i) {
        const double x = 0.25 * i;
        const double eps = 1e-6 * (1 + x);
        const double fd = (n.F(x + eps) - n.F(x - eps)) / (2 * eps);
        require(std::fabs(fd - n.f(x)) <= 1e-6 * (1 + std::fabs(n.f(x))),
                "user nonlinearity: declared primitive disagrees with f near x = " +
                    fmt_short(x) + " (finite-difference check)");
    }
    return n;
}

// --- hypothesis verification ---------------------------------------------

struct ClauseReport {
    std::string id;
    bool pass = false;
    bool informational = false;  // recorded but not counted toward the class verdict
    std::string witness;
};

struct HypothesisReport {
    HypothesisClass cls;
    bool all_pass = false;
    std::vector<ClauseReport> clauses;

    const ClauseReport* find(const std::string& id) const {
        for (const auto& c : clauses)
            if (c.id == id) return &c;
        return nullptr;
    }
};

namespace detail {

inline std::vector<double> log_grid(double lo, double hi, int count) {
    std::vector<double> xs(count);
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < count; ++i) xs[i] = std::exp(a + (b - a) * i / (count - 1));
    return xs;
}

}  // namespace detail

inline HypothesisReport check_hypotheses(const Nonlinearity& nl, double rho = 10.0,
                                         double x_top = 100.0) {
    HypothesisReport rep;
    rep.cls = nl.cls;
    auto add = [&](const std::string& id, bool pass, const std::string& witness,
                   bool info = false) {
        rep.clauses.push_back({id, pass, info, witness});
    };

    const auto xs_small = detail::log_grid(1e-9, 1.0, 500);
    const auto xs_large = detail::log_grid(1.0, x_top, 500);
    auto xs_all = xs_small;
    xs_all.insert(xs_all.end(), xs_large.begin() + 1, xs_large.end());

    if (!nl.superlinear()) {
        bool sign_ok = true;
        double bad_x = 0;
        for (double x : xs_all)
            if (nl.f(x) < -1e-12 * (1 + x)) {  // zeros at isolated points are allowed
                sign_ok = false;
                bad_x = x;
                break;
            }
        add("sign", sign_ok,
            sign_ok ? "f >= 0 sampled on (0, " + fmt_short(x_top) + "]"
                    : "f(x) < 0 at x = " + fmt_short(bad_x));

        double a_rho = 0;
        for (double x : xs_all)
            if (x <= rho) a_rho = std::max(a_rho, std::fabs(nl.f(x)));
        add("local-bound", std::isfinite(a_rho),
            "sup |f| on [0, " + fmt_short(rho) + "] = " + fmt_short(a_rho));

        // f(x)/x -> 0 at infinity, sampled by tail decrease.
        const auto tail = detail::log_grid(x_top, 100 * x_top, 50);
        bool dec = true;
        for (std::size_t i = 1; i < tail.size(); ++i)
            if (nl.f(tail[i]) / tail[i] > nl.f(tail[i - 1]) / tail[i - 1] * (1 + 1e-9))
                dec = false;
        const double q_end = nl.f(tail.back()) / tail.back();
        const double q_start = nl.f(tail.front()) / tail.front();
        add("sublinear-at-infinity", dec && q_end < 0.5 * q_start,
            "f(x)/x falls from " + fmt_short(q_start) + " to " + fmt_short(q_end) +
                " over the sampled tail");

        bool floor_ok = true;
        double bad = 0;
        for (double x : xs_all)
            if (x <= nl.delta && nl.f(x) < nl.c1 * std::pow(x, nl.q - 1) * (1 - 1e-12)) {
                floor_ok = false;
                bad = x;
                break;
            }
        add("concave-floor", floor_ok,
            floor_ok ? "c1 x^(q-1) <= f on (0, delta], c1 = " + fmt_short(nl.c1) +
                           ", delta = " + fmt_short(nl.delta)
                     : "floor violated at x = " + fmt_short(bad));

        if (has_decreasing_quotient(nl.cls)) {
            bool strict = true;
            double bx = 0;
            double prev = nl.f(xs_all[0]) / xs_all[0];
            for (std::size_t i = 1; i < xs_all.size(); ++i) {
                const double cur = nl.f(xs_all[i]) / xs_all[i];
                if (cur >= prev) {
                    strict = false;
                    bx = xs_all[i];
                    break;
                }
                prev = cur;
            }
            add("decreasing-quotient", strict,
                strict ? "f(x)/x strictly decreasing across the sampled grid"
                       : "quotient non-decreasing at x = " + fmt_short(bx));
        }
    } else {
        bool sign_ok = true;
        double bad_x = 0;
        for (double x : xs_all)
            if (nl.f(x) < 0) {
                sign_ok = false;
                bad_x = x;
                break;
            }
        add("sign", sign_ok,
            sign_ok ? "f >= 0 sampled" : "f(x) < 0 at x = " + fmt_short(bad_x));

        double a = 0;
        for (double x : xs_all)
            a = std::max(a, nl.f(x) / (1 + std::pow(x, nl.r - 1)));
        add("polynomial-growth", std::isfinite(a),
            "f <= a (1 + x^(r-1)) with a = " + fmt_short(a) + ", r = " + fmt_short(nl.r));

        const auto tail = detail::log_grid(10.0, 1e4, 60);
        bool grows = true;
        double prev = nl.F(tail[0]) / (tail[0] * tail[0]);
        for (std::size_t i = 1; i < tail.size(); ++i) {
            const double cur = nl.F(tail[i]) / (tail[i] * tail[i]);
            if (cur <= prev) grows = false;
            prev = cur;
        }
        add("superquadratic-primitive", grows && prev > 10 * nl.F(1.0),
            "F(x)/x^2 rises to " + fmt_short(prev) + " at x = " + fmt_short(tail.back()));

        double xi_tilde = 1e300;
        for (double x : tail)
            xi_tilde = std::min(xi_tilde, (nl.f(x) * x - 2 * nl.F(x)) / std::pow(x, nl.q));
        add("quotient-superlinearity", xi_tilde > 0,
            "(f(x)x - 2F(x))/x^q sampled lower envelope = " + fmt_short(xi_tilde) +
                " with q = " + fmt_short(nl.q));

        const auto zs = detail::log_grid(1e-10, 1e-4, 40);
        double worst = 0;
        for (double x : zs) worst = std::max(worst, nl.f(x) / x);
        add("vanishing-slope-at-zero", worst < 1e-3,
            "f(x)/x <= " + fmt_short(worst) + " on the sampled origin window");

        // AR condition: exists tau > 2 and M2 with 0 < tau F(x) <= f(x) x for
        // x >= M2. Informational: the superlinear class does not require it.
        {
            std::vector<double> candidates = {2.1, 2.5, 3.0, 4.0};
            if (nl.satisfies_ar && nl.tau > 2) candidates.insert(candidates.begin(), nl.tau);
            const auto ar_grid = detail::log_grid(1.0, 1e6, 2000);
            bool holds = false;
            std::string witness;
            for (double tau : candidates) {
                bool ok = true;
                double bad = 0;
                for (double x : ar_grid) {
                    const double lhs = tau * nl.F(x);
                    if (!(lhs > 0) || lhs > nl.f(x) * x * (1 + 1e-12)) {
                        ok = false;
                        bad = x;
                        break;
                    }
                }
                if (ok) {
                    holds = true;
                    witness = "0 < tau F <= f x on [1, 1e6] with tau = " + fmt_short(tau);
                    break;
                }
                witness += "tau = " + fmt_short(tau) + " violated at x = " + fmt_short(bad) + "; ";
            }
            if (!holds)
                witness += "x f(x)/F(x) decreases toward 2 on the tail (sampled " +
                           fmt_short(nl.f(1e6) * 1e6 / nl.F(1e6)) + ")";
            add("ar-condition", holds, witness, /*informational=*/true);
        }
    }

    if (has_shifted_monotonicity(nl.cls)) {
        // xi_hat = max(0, -min difference quotient of f on [0, rho]) + 1e-6.
        const auto g = detail::log_grid(1e-6, rho, 800);
        double min_dq = 1e300;
        for (std::size_t i = 1; i < g.size(); ++i)
            min_dq = std::min(min_dq, (nl.f(g[i]) - nl.f(g[i - 1])) / (g[i] - g[i - 1]));
        const double xi_hat = std::max(0.0, -min_dq) + 1e-6;
        bool mono = true;
        double bad = 0;
        for (std::size_t i = 1; i < g.size(); ++i)
            if (nl.f(g[i]) + xi_hat * g[i] <
                nl.f(g[i - 1]) + xi_hat * g[i - 1] - 1e-12 * (1 + xi_hat * rho)) {
                mono = false;
                bad = g[i];
                break;
            }
        add("shifted-monotonicity", mono,
            mono ? "f(x) + xi_hat x nondecreasing on [0, " + fmt_short(rho) +
                       "] with xi_hat = " + fmt_short(xi_hat)
                 : "shifted monotonicity fails near x = " + fmt_short(bad));
    }

    rep.all_pass = true;
    for (const auto& c : rep.clauses)
        if (!c.informational && !c.pass) rep.all_pass = false;
    return rep;
}

// Shift constant making x -> f(x) + xi_hat x nondecreasing on [0, rho].
inline double monotonicity_shift(const Nonlinearity& nl, double rho) {
    const auto g = detail::log_grid(1e-6, std::max(rho, 1e-3), 800);
    double min_dq = 1e300;
    for (std::size_t i = 1; i < g.size(); ++i)
        min_dq = std::min(min_dq, (nl.f(g[i]) - nl.f(g[i - 1])) / (g[i] - g[i - 1]));
    return std::max(0.0, -min_dq) + 1e-6;
}

// --- unilateral lower-bound constants -------------------------------------

// Certified constants for lambda x + f(x) >= c1_used x^(q-1) - c4 x^(tau-1)
// for all x >= 0. The concave constant is halved (c1_used = c1/2): with the
// full c1 and a tight floor f = c1 x^(q-1), a negative lambda forces
// c4 >= |lambda| x^(2-tau) -> inf near 0, so no finite constant certifies the
// bound. With the halved constant the near-zero excess is negative (x^(q-1)
// dominates |lambda| x), c4 is the grid maximum of
// (c1_used x^(q-1) + |lambda| x - f(x))^+ / x^(tau-1) inflated by 10%, it is
// stable under grid refinement, and it is nondecreasing in |lambda|. Beyond
// x_max >= 1 the ratio is bounded by (c1_used + |lambda|)(x^(q-tau)+x^(2-tau)),
// decreasing, so the grid value at x_max covers the tail.
struct UnilateralConstants {
    double c1 = 0, q = 0, c4 = 0, tau = 0, x_max = 0, lambda = 0;
};

inline double tau_floor(int dim) { return dim == 1 ? 2.0 : 4.0; }

inline double default_tau(int dim) { return dim == 1 ? 3.0 : 4.5; }

// Smallest x_max satisfying the dominance precondition with a factor-2 margin.
inline double suggested_x_max(const Nonlinearity& nl, double lambda) {
    if (lambda == 0) return 10.0;
    return std::max(10.0, std::pow(2 * nl.c1 / std::fabs(lambda), 1.0 / (2 - nl.q)));
}

inline UnilateralConstants unilateral_constants(const Nonlinearity& nl, double lambda,
                                                double tau, double x_max = 10.0,
                                                int grid_points = 4096) {
    require(!nl.superlinear(),
            "unilateral constants: defined for the sublinear classes (concave floor)");
    require(nl.c1 > 0 && nl.q > 1 && nl.q < 2,
            "unilateral constants: nonlinearity lacks concave-floor data (c1, q)");
    require(tau > 2, "unilateral constants: absorption exponent must exceed 2");
    require(x_max >= 1 && grid_points >= 1000,
            "unilateral constants: need x_max >= 1 and a dense grid (>= 1000 points)");
    if (lambda != 0)
        require(nl.c1 * std::pow(x_max, nl.q - 1) < std::fabs(lambda) * x_max,
                "unilateral constants: x_max too small; the concave term must be "
                "dominated by |lambda| x beyond it");

    const double c1u = 0.5 * nl.c1;
    const double al = std::fabs(lambda);
    const auto xs = detail::log_grid(x_max * 1e-9, x_max, grid_points);
    double worst = 0;
    for (double x : xs) {
        const double need = c1u * std::pow(x, nl.q - 1) + al * x - nl.f(x);
        if (need > 0) worst = std::max(worst, need / std::pow(x, tau - 1));
    }
    require(worst < 1e8,
            "unilateral constants: certification produced an unreasonable constant; "
            "the reaction violates the sublinear floor hypotheses");
    UnilateralConstants out;
    out.c1 = c1u;
    out.q = nl.q;
    out.c4 = 1.1 * worst;
    out.tau = tau;
    out.x_max = x_max;
    out.lambda = lambda;
    return out;
}

}  // namespace robinlab
