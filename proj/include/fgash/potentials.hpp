#ifndef FGASH_POTENTIALS_HPP
#define FGASH_POTENTIALS_HPP

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <string>

#include "fgash/core.hpp"

namespace fgash::potentials {

/// 2x2 Hermitian matrix potential in the diabatic basis,
///
///     V(x) = [ v00(x)        delta*v01(x) ]
///            [ delta*v10(x)  v11(x)       ]
///
/// The coupling scale delta is NOT part of the model; callers compose
/// delta*v01 themselves so coupling sweeps stay configuration-only.
/// v10 is defined as conj(v01) and never stored, so Hermiticity is structural.
class DiabaticPotential {
public:
    virtual ~DiabaticPotential() = default;

    virtual int dimension() const = 0;

    virtual double v00(const Eigen::VectorXd& q) const = 0;
    virtual double v11(const Eigen::VectorXd& q) const = 0;
    virtual Complex v01(const Eigen::VectorXd& q) const = 0;
    Complex v10(const Eigen::VectorXd& q) const { return std::conj(v01(q)); }

    /// Gradient of the diagonal entry V_ll, written into `out` (size m).
    virtual void grad_diag(int l, const Eigen::VectorXd& q, Eigen::VectorXd& out) const = 0;
    /// Hessian of the diagonal entry V_ll, written into `out` (m x m, symmetric).
    virtual void hess_diag(int l, const Eigen::VectorXd& q, Eigen::MatrixXd& out) const = 0;

    double diag(int l, const Eigen::VectorXd& q) const { return l == 0 ? v00(q) : v11(q); }

    /// Fused value/gradient/Hessian of V_ll. The trajectory integrator calls
    /// this once per RK4 stage; models override it to share subexpressions.
    virtual void diag_pack(int l, const Eigen::VectorXd& q, double& v, Eigen::VectorXd& grad,
                           Eigen::MatrixXd& hess) const {
        v = diag(l, q);
        grad_diag(l, q, grad);
        hess_diag(l, q, hess);
    }

    /// Matrix element V_{to,from} of the off-diagonal block, used as the
    /// hop coefficient when a trajectory switches from surface `from` to `to`.
    Complex coupling_element(int to, int /*from*/, const Eigen::VectorXd& q) const {
        return to == 0 ? v01(q) : v10(q);
    }
};

// Contract-checked entry points (dimension and surface-index validation).
double eval_diagonal(const DiabaticPotential& model, int l, const Eigen::VectorXd& q);
Complex eval_coupling(const DiabaticPotential& model, const Eigen::VectorXd& q);
Eigen::VectorXd gradient(const DiabaticPotential& model, int l, const Eigen::VectorXd& q);
Eigen::MatrixXd hessian(const DiabaticPotential& model, int l, const Eigen::VectorXd& q);

/// v00 = tanh(x), v11 = -tanh(x), v01 = coupling constant (default 1;
/// the physical off-diagonal is delta*coupling).
class SimpleCrossing final : public DiabaticPotential {
public:
    explicit SimpleCrossing(double coupling = 1.0) : coupling_(coupling) {}
    int dimension() const override { return 1; }
    double v00(const Eigen::VectorXd& q) const override { return std::tanh(q[0]); }
    double v11(const Eigen::VectorXd& q) const override { return -std::tanh(q[0]); }
    Complex v01(const Eigen::VectorXd&) const override { return coupling_; }
    void grad_diag(int l, const Eigen::VectorXd& q, Eigen::VectorXd& out) const override;
    void hess_diag(int l, const Eigen::VectorXd& q, Eigen::MatrixXd& out) const override;
    void diag_pack(int l, const Eigen::VectorXd& q, double& v, Eigen::VectorXd& grad,
                   Eigen::MatrixXd& hess) const override;

private:
    double coupling_;
};

/// v00 = 0, v11 = -a*exp(-b*x^2) + e, v01 = c*exp(-d*x^2).
/// The coupling amplitude lives inside v01 here; use delta = 1.
class DualCrossing final : public DiabaticPotential {
public:
    DualCrossing(double a = 0.1, double b = 0.28, double c = 0.015, double d = 0.06,
                 double e = 0.05)
        : a_(a), b_(b), c_(c), d_(d), e_(e) {}
    int dimension() const override { return 1; }
    double v00(const Eigen::VectorXd&) const override { return 0.0; }
    double v11(const Eigen::VectorXd& q) const override {
        return -a_ * std::exp(-b_ * q[0] * q[0]) + e_;
    }
    Complex v01(const Eigen::VectorXd& q) const override {
        return c_ * std::exp(-d_ * q[0] * q[0]);
    }
    void grad_diag(int l, const Eigen::VectorXd& q, Eigen::VectorXd& out) const override;
    void hess_diag(int l, const Eigen::VectorXd& q, Eigen::MatrixXd& out) const override;
    void diag_pack(int l, const Eigen::VectorXd& q, double& v, Eigen::VectorXd& grad,
                   Eigen::MatrixXd& hess) const override;

private:
    double a_, b_, c_, d_, e_;
};

/// v00 = arctan(s*x) + pi/2, v11 = -v00, v01 = coupling constant (default 1).
class ExtendedCoupling final : public DiabaticPotential {
public:
    explicit ExtendedCoupling(double steepness = 10.0, double coupling = 1.0)
        : s_(steepness), coupling_(coupling) {}
    int dimension() const override { return 1; }
    double v00(const Eigen::VectorXd& q) const override {
        return std::atan(s_ * q[0]) + M_PI / 2.0;
    }
    double v11(const Eigen::VectorXd& q) const override { return -v00(q); }
    Complex v01(const Eigen::VectorXd&) const override { return coupling_; }
    void grad_diag(int l, const Eigen::VectorXd& q, Eigen::VectorXd& out) const override;
    void hess_diag(int l, const Eigen::VectorXd& q, Eigen::MatrixXd& out) const override;
    void diag_pack(int l, const Eigen::VectorXd& q, double& v, Eigen::VectorXd& grad,
                   Eigen::MatrixXd& hess) const override;

private:
    double s_;
    double coupling_;
};

/// Builds a built-in model from its config tag ("simple", "dual", "extended")
/// with optional parameter overrides (keys depend on the model).
std::unique_ptr<DiabaticPotential> make_potential(const std::string& tag,
                                                  const std::map<std::string, double>& params = {});

} // namespace fgash::potentials

#endif
