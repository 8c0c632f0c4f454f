// Discrete variational problem on a mesh: for nodal u,
//
//   E(u) = 1/2 u'Gu + mu/2 * sum_i w_i s(u_i) - c/2 u'Mu - sum_i w_i G(i, u_i)
//
// with G = K + M_xi + B the principal form, w the lumped mass weights,
// s(x) = x^2 (full shift), (x^-)^2 (negative-part shift) or 0, c an optional
// consistent-mass linear coefficient, and G(i, .) the reaction primitive.
// Reaction and shift terms share the lumped quadrature, so for u >= 0 under a
// full shift the mu contributions cancel identically in energy and gradient.
//
// Critical points solve G u + mu D_w s'(u)/... = c M u + D_w g(u), the
// lumped-mass finite element system for the continuous problem.
#pragma once

#include <memory>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>

#include "robinlab/forms.hpp"
#include "robinlab/truncation.hpp"

namespace robinlab {

class VariationalProblem {
  public:
    VariationalProblem(std::shared_ptr<const AssembledForms> forms, TruncatedReaction reaction,
                       double mass_shift, double linear_mass_coeff = 0.0)
        : forms_(std::move(forms)),
          reaction_(std::move(reaction)),
          mu_(mass_shift),
          c_lin_(linear_mass_coeff) {
        require(forms_ != nullptr, "variational problem: forms required");
        require(mu_ >= 0, "variational problem: mass shift must be nonnegative");
    }

    const AssembledForms& forms() const { return *forms_; }
    const TruncatedReaction& reaction() const { return reaction_; }
    double mass_shift() const { return mu_; }
    double linear_mass_coeff() const { return c_lin_; }
    Eigen::Index n() const { return forms_->n(); }

    double energy(const Vec& u) const {
        const auto& F = *forms_;
        double e = 0.5 * u.dot(F.G * u);
        if (c_lin_ != 0) e -= 0.5 * c_lin_ * u.dot(F.M * u);
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            e += 0.5 * mu_ * F.lumped[i] * shift_sq(u[i]);
            e -= F.lumped[i] * reaction_.G(i, u[i]);
        }
        return e;
    }

    Vec gradient(const Vec& u) const {
        const auto& F = *forms_;
        Vec r = F.G * u;
        if (c_lin_ != 0) r -= c_lin_ * (F.M * u);
        for (Eigen::Index i = 0; i < u.size(); ++i)
            r[i] += F.lumped[i] * (mu_ * shift_d(u[i]) - reaction_.g(i, u[i]));
        return r;
    }

    // G - c M + D_w (mu s''(u) - g'(u)) with g' by central differences.
    SpMat jacobian(const Vec& u) const {
        const auto& F = *forms_;
        SpMat J = F.G;
        if (c_lin_ != 0) J -= SpMat(c_lin_ * F.M);
        SpMat D(u.size(), u.size());
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(static_cast<std::size_t>(u.size()));
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            const double d = mu_ * shift_dd(u[i]) - reaction_.slope(i, u[i]);
            trips.emplace_back(static_cast<int>(i), static_cast<int>(i), F.lumped[i] * d);
        }
        D.setFromTriplets(trips.begin(), trips.end());
        return J + D;
    }

    // Residual norm in the dual of the discrete H1 inner product (K + M).
    double dual_norm(const Vec& r) const {
        ensure_h1();
        return std::sqrt(std::max(0.0, r.dot(h1_->solve(r))));
    }

    double h1_norm(const Vec& u) const { return forms_->h1_norm(u); }

  private:
    double shift_sq(double x) const {
        switch (reaction_.shift) {
            case ShiftTarget::Full: return x * x;
            case ShiftTarget::NegativePart: return x < 0 ? x * x : 0.0;
            case ShiftTarget::None: return 0.0;
        }
        return 0.0;
    }
    double shift_d(double x) const {
        switch (reaction_.shift) {
            case ShiftTarget::Full: return x;
            case ShiftTarget::NegativePart: return x < 0 ? x : 0.0;
            case ShiftTarget::None: return 0.0;
        }
        return 0.0;
    }
    double shift_dd(double x) const {
        switch (reaction_.shift) {
            case ShiftTarget::Full: return 1.0;
            case ShiftTarget::NegativePart: return x < 0 ? 1.0 : 0.0;
            case ShiftTarget::None: return 0.0;
        }
        return 0.0;
    }

    void ensure_h1() const {
        if (h1_) return;
        h1_ = std::make_shared<Eigen::SimplicialLDLT<SpMat>>();
        SpMat A = forms_->K + forms_->M;
        h1_->compute(A);
        require(h1_->info() == Eigen::Success,
                "variational problem: H1 inner-product factorization failed");
    }

    std::shared_ptr<const AssembledForms> forms_;
    TruncatedReaction reaction_;
    double mu_ = 0;
    double c_lin_ = 0;
    mutable std::shared_ptr<Eigen::SimplicialLDLT<SpMat>> h1_;
};

}  // namespace robinlab
