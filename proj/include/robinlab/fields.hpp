// Scalar coefficient fields: constants, parsed expressions over coordinates,
// and power singularities s0*|z-c|^(-alpha). The singular kind models
// unbounded-below potentials; its exponent must keep the field integrable.
#pragma once

#include <cmath>
#include <string>

#include "robinlab/core.hpp"
#include "robinlab/expr.hpp"

namespace robinlab {

enum class FieldKind { Constant, Expression, SingularPower };

class ScalarField {
public:
    ScalarField() : kind_(FieldKind::Constant), value_(0) {}

    static ScalarField constant(double v) {
        require(std::isfinite(v), "field: constant value must be finite");
        ScalarField f;
        f.kind_ = FieldKind::Constant;
        f.value_ = v;
        return f;
    }

    static ScalarField expression(const std::string& text, int dim) {
        require(dim == 1 || dim == 2, "field: dimension must be 1 or 2");
        ScalarField f;
        f.kind_ = FieldKind::Expression;
        f.expr_ = expr::Expression(text, dim == 1 ? std::vector<std::string>{"x"}
                                                  : std::vector<std::string>{"x", "y"});
        return f;
    }

    // s0 * |z - center|^(-alpha). alpha in [0,1) keeps the field in some
    // L^s with s above the dimension, which the potential hypotheses need.
    static ScalarField singular_power(Point center, double s0, double alpha) {
        require(std::isfinite(s0), "field: singular strength must be finite");
        require(alpha >= 0, "field: singular exponent must be >= 0");
        require(alpha < 1,
                "field: singular exponent must be < 1 to keep the potential integrable "
                "in L^s for some s above the dimension");
        ScalarField f;
        f.kind_ = FieldKind::SingularPower;
        f.center_ = center;
        f.value_ = s0;
        f.alpha_ = alpha;
        return f;
    }

    double operator()(const Point& z) const {
        switch (kind_) {
            case FieldKind::Constant:
                return value_;
            case FieldKind::Expression:
                return expr_.eval(z.data());
            case FieldKind::SingularPower: {
                const double dx = z[0] - center_[0];
                const double dy = z[1] - center_[1];
                const double r = std::sqrt(dx * dx + dy * dy);
                return value_ * std::pow(r, -alpha_);
            }
        }
        return 0;
    }

    FieldKind kind() const { return kind_; }
    bool singular() const { return kind_ == FieldKind::SingularPower && alpha_ > 0; }
    Point singular_center() const { return center_; }
    double singular_strength() const { return value_; }
    double singular_exponent() const { return alpha_; }
    double constant_value() const { return value_; }

    bool is_constant() const { return kind_ == FieldKind::Constant; }

private:
    FieldKind kind_;
    double value_ = 0;          // constant value or singular strength
    double alpha_ = 0;          // singular exponent
    Point center_ = {0, 0};
    expr::Expression expr_;
};

}  // namespace robinlab
