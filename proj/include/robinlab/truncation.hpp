// Truncated reactions: piecewise modifications of lambda x + f(x) (or of the
// concave-absorption pair c1 x^(q-1) - c4 x^(tau-1)) used to make energy
// functionals coercive or to confine minimizers to order intervals. Each
// carries its exact primitive and the shift target telling the variational
// problem whether the coercivity shift mu acts on u or only on u^-.
//
// Evaluators are nodal: g(i, x) may depend on the node i through frozen
// reference functions (truncation levels).
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "robinlab/core.hpp"
#include "robinlab/nonlinearity.hpp"

namespace robinlab {

using Vec = Eigen::VectorXd;

enum class ShiftTarget { None, Full, NegativePart };

enum class TruncationKind {
    ShiftedPositive,          // 0 for x <= 0; (lambda+mu) x + f(x) above
    ConcaveAbsorption,        // c1 (x+)^(q-1) - c4 (x+)^(tau-1)
    ConcaveAbsorptionCapped,  // concave-absorption + mu x, frozen above a reference
    CappedAbove,              // (lambda+mu) x + f(x), frozen above a reference
    PlainPositive,            // 0 for x <= 0; lambda x + f(x) above (no mu inside)
    FlooredBelow,             // frozen below a reference; (lambda+mu) x + f(x) above
    Clamped,                  // frozen below one reference and above another
    Linear,                   // coeff * x
    Zero,
};

inline std::string to_string(TruncationKind k) {
    switch (k) {
        case TruncationKind::ShiftedPositive: return "shifted-positive";
        case TruncationKind::ConcaveAbsorption: return "concave-absorption";
        case TruncationKind::ConcaveAbsorptionCapped: return "concave-absorption-capped";
        case TruncationKind::CappedAbove: return "capped-above";
        case TruncationKind::PlainPositive: return "plain-positive";
        case TruncationKind::FlooredBelow: return "floored-below";
        case TruncationKind::Clamped: return "clamped";
        case TruncationKind::Linear: return "linear";
        case TruncationKind::Zero: return "zero";
    }
    return "?";
}

struct TruncatedReaction {
    TruncationKind kind = TruncationKind::Zero;
    ShiftTarget shift = ShiftTarget::None;
    std::function<double(Eigen::Index, double)> g;  // evaluator
    std::function<double(Eigen::Index, double)> G;  // primitive, G(i, 0) = 0

    double slope(Eigen::Index i, double x) const {
        const double h = 1e-6 * (1 + std::fabs(x));
        return (g(i, x + h) - g(i, x - h)) / (2 * h);
    }
};

namespace detail {

// Freeze a scalar reaction above a nodal reference: evaluator constant beyond
// ref(i), primitive continued linearly.
template <class Eval, class Prim>
TruncatedReaction frozen_above(TruncationKind kind, ShiftTarget shift, Vec ref, Eval ev,
                               Prim pr) {
    TruncatedReaction t;
    t.kind = kind;
    t.shift = shift;
    t.g = [ref, ev](Eigen::Index i, double x) {
        if (x < 0) return 0.0;
        return x <= ref[i] ? ev(x) : ev(ref[i]);
    };
    t.G = [ref, ev, pr](Eigen::Index i, double x) {
        if (x <= 0) return 0.0;
        if (x <= ref[i]) return pr(x);
        return pr(ref[i]) + ev(ref[i]) * (x - ref[i]);
    };
    return t;
}

}  // namespace detail

inline TruncatedReaction truncation_shifted_positive(const Nonlinearity& nl, double lambda,
                                                     double mu) {
    TruncatedReaction t;
    t.kind = TruncationKind::ShiftedPositive;
    t.shift = ShiftTarget::Full;
    auto f = nl.f, F = nl.F;
    t.g = [f, lambda, mu](Eigen::Index, double x) {
        return x <= 0 ? 0.0 : (lambda + mu) * x + f(x);
    };
    t.G = [F, lambda, mu](Eigen::Index, double x) {
        return x <= 0 ? 0.0 : 0.5 * (lambda + mu) * x * x + F(x);
    };
    return t;
}

inline TruncatedReaction truncation_concave_absorption(const UnilateralConstants& uc) {
    TruncatedReaction t;
    t.kind = TruncationKind::ConcaveAbsorption;
    t.shift = ShiftTarget::NegativePart;
    const double c1 = uc.c1, q = uc.q, c4 = uc.c4, tau = uc.tau;
    t.g = [c1, q, c4, tau](Eigen::Index, double x) {
        if (x <= 0) return 0.0;
        return c1 * std::pow(x, q - 1) - c4 * std::pow(x, tau - 1);
    };
    t.G = [c1, q, c4, tau](Eigen::Index, double x) {
        if (x <= 0) return 0.0;
        return c1 * std::pow(x, q) / q - c4 * std::pow(x, tau) / tau;
    };
    return t;
}

inline TruncatedReaction truncation_concave_absorption_capped(const UnilateralConstants& uc,
                                                              double mu, const Vec& ref) {
    require(ref.size() > 0 && ref.minCoeff() > 0,
            "capped concave-absorption truncation: reference must be strictly positive");
    const double c1 = uc.c1, q = uc.q, c4 = uc.c4, tau = uc.tau;
    auto ev = [c1, q, c4, tau, mu](double x) {
        return c1 * std::pow(x, q - 1) - c4 * std::pow(x, tau - 1) + mu * x;
    };
    auto pr = [c1, q, c4, tau, mu](double x) {
        return c1 * std::pow(x, q) / q - c4 * std::pow(x, tau) / tau + 0.5 * mu * x * x;
    };
    return detail::frozen_above(TruncationKind::ConcaveAbsorptionCapped, ShiftTarget::Full,
                                ref, ev, pr);
}

inline TruncatedReaction truncation_capped_above(const Nonlinearity& nl, double lambda,
                                                 double mu, const Vec& upper) {
    require(upper.size() > 0 && upper.minCoeff() > 0,
            "capped-above truncation: upper reference must be strictly positive");
    auto f = nl.f, F = nl.F;
    auto ev = [f, lambda, mu](double x) { return (lambda + mu) * x + f(x); };
    auto pr = [F, lambda, mu](double x) { return 0.5 * (lambda + mu) * x * x + F(x); };
    return detail::frozen_above(TruncationKind::CappedAbove, ShiftTarget::Full, upper, ev,
                                pr);
}

inline TruncatedReaction truncation_plain_positive(const Nonlinearity& nl, double lambda) {
    TruncatedReaction t;
    t.kind = TruncationKind::PlainPositive;
    t.shift = ShiftTarget::NegativePart;
    auto f = nl.f, F = nl.F;
    t.g = [f, lambda](Eigen::Index, double x) { return x <= 0 ? 0.0 : lambda * x + f(x); };
    t.G = [F, lambda](Eigen::Index, double x) {
        return x <= 0 ? 0.0 : 0.5 * lambda * x * x + F(x);
    };
    return t;
}

inline TruncatedReaction truncation_floored_below(const Nonlinearity& nl, double lambda,
                                                  double mu, const Vec& lower) {
    require(lower.size() > 0 && lower.minCoeff() > 0,
            "floored-below truncation: lower reference must be strictly positive");
    TruncatedReaction t;
    t.kind = TruncationKind::FlooredBelow;
    t.shift = ShiftTarget::Full;
    auto f = nl.f, F = nl.F;
    Vec ref = lower;
    auto ev = [f, lambda, mu](double x) { return (lambda + mu) * x + f(x); };
    auto pr = [F, lambda, mu](double x) { return 0.5 * (lambda + mu) * x * x + F(x); };
    t.g = [ref, ev](Eigen::Index i, double x) { return x <= ref[i] ? ev(ref[i]) : ev(x); };
    t.G = [ref, ev, pr](Eigen::Index i, double x) {
        if (x <= ref[i]) return ev(ref[i]) * x;
        return ev(ref[i]) * ref[i] + pr(x) - pr(ref[i]);
    };
    return t;
}

inline TruncatedReaction truncation_clamped(const Nonlinearity& nl, double lambda, double mu,
                                            const Vec& lower, const Vec& upper) {
    require(lower.size() > 0 && lower.minCoeff() > 0,
            "clamped truncation: lower reference must be strictly positive");
    require(upper.size() == lower.size(), "clamped truncation: reference size mismatch");
    require(((upper - lower).minCoeff() >= 0),
            "clamped truncation: upper reference must dominate the lower one");
    TruncatedReaction base = truncation_floored_below(nl, lambda, mu, lower);
    TruncatedReaction t;
    t.kind = TruncationKind::Clamped;
    t.shift = ShiftTarget::Full;
    Vec up = upper;
    auto bg = base.g, bG = base.G;
    t.g = [up, bg](Eigen::Index i, double x) { return bg(i, std::min(x, up[i])); };
    t.G = [up, bg, bG](Eigen::Index i, double x) {
        if (x <= up[i]) return bG(i, x);
        return bG(i, up[i]) + bg(i, up[i]) * (x - up[i]);
    };
    return t;
}

inline TruncatedReaction truncation_linear(double coeff) {
    TruncatedReaction t;
    t.kind = TruncationKind::Linear;
    t.shift = ShiftTarget::None;
    t.g = [coeff](Eigen::Index, double x) { return coeff * x; };
    t.G = [coeff](Eigen::Index, double x) { return 0.5 * coeff * x * x; };
    return t;
}

inline TruncatedReaction truncation_zero() {
    TruncatedReaction t;
    t.kind = TruncationKind::Zero;
    t.shift = ShiftTarget::None;
    t.g = [](Eigen::Index, double) { return 0.0; };
    t.G = [](Eigen::Index, double) { return 0.0; };
    return t;
}

// Unified factory. References are required or rejected per kind.
inline TruncatedReaction make_truncation(TruncationKind kind, const Nonlinearity& nl,
                                         double lambda, double mu,
                                         const std::optional<UnilateralConstants>& uc = {},
                                         const std::optional<Vec>& lower = {},
                                         const std::optional<Vec>& upper = {}) {
    switch (kind) {
        case TruncationKind::ShiftedPositive:
            return truncation_shifted_positive(nl, lambda, mu);
        case TruncationKind::ConcaveAbsorption:
            require(uc.has_value(), "truncation: concave-absorption needs certified "
                                    "unilateral constants");
            return truncation_concave_absorption(*uc);
        case TruncationKind::ConcaveAbsorptionCapped:
            require(uc.has_value() && upper.has_value(),
                    "truncation: capped concave-absorption needs unilateral constants and "
                    "a reference function");
            return truncation_concave_absorption_capped(*uc, mu, *upper);
        case TruncationKind::CappedAbove:
            require(upper.has_value(), "truncation: capped-above needs an upper reference");
            return truncation_capped_above(nl, lambda, mu, *upper);
        case TruncationKind::PlainPositive:
            return truncation_plain_positive(nl, lambda);
        case TruncationKind::FlooredBelow:
            require(lower.has_value(), "truncation: floored-below needs a lower reference");
            return truncation_floored_below(nl, lambda, mu, *lower);
        case TruncationKind::Clamped:
            require(lower.has_value() && upper.has_value(),
                    "truncation: clamped needs lower and upper references");
            return truncation_clamped(nl, lambda, mu, *lower, *upper);
        case TruncationKind::Linear:
            return truncation_linear(lambda);
        case TruncationKind::Zero:
            return truncation_zero();
    }
    fail("truncation: unknown kind");
}

}  // namespace robinlab
