#include "fgash/potentials.hpp"

namespace fgash::potentials {

namespace {

void check_surface(int l) { require(l == 0 || l == 1, "surface index must be 0 or 1"); }

void check_dim(const DiabaticPotential& model, const Eigen::VectorXd& q) {
    require(q.size() == model.dimension(),
            "position has dimension " + std::to_string(q.size()) + ", potential expects " +
                std::to_string(model.dimension()));
}

} // namespace

double eval_diagonal(const DiabaticPotential& model, int l, const Eigen::VectorXd& q) {
    check_surface(l);
    check_dim(model, q);
    return model.diag(l, q);
}

Complex eval_coupling(const DiabaticPotential& model, const Eigen::VectorXd& q) {
    check_dim(model, q);
    return model.v01(q);
}

Eigen::VectorXd gradient(const DiabaticPotential& model, int l, const Eigen::VectorXd& q) {
    check_surface(l);
    check_dim(model, q);
    Eigen::VectorXd out(model.dimension());
    model.grad_diag(l, q, out);
    return out;
}

Eigen::MatrixXd hessian(const DiabaticPotential& model, int l, const Eigen::VectorXd& q) {
    check_surface(l);
    check_dim(model, q);
    Eigen::MatrixXd out(model.dimension(), model.dimension());
    model.hess_diag(l, q, out);
    return out;
}

// tanh' = sech^2, tanh'' = -2 sech^2 tanh
void SimpleCrossing::grad_diag(int l, const Eigen::VectorXd& q, Eigen::VectorXd& out) const {
    const double sech2 = 1.0 - std::tanh(q[0]) * std::tanh(q[0]);
    out[0] = (l == 0 ? sech2 : -sech2);
}

void SimpleCrossing::hess_diag(int l, const Eigen::VectorXd& q, Eigen::MatrixXd& out) const {
    const double th = std::tanh(q[0]);
    const double d2 = -2.0 * (1.0 - th * th) * th;
    out(0, 0) = (l == 0 ? d2 : -d2);
}

void SimpleCrossing::diag_pack(int l, const Eigen::VectorXd& q, double& v, Eigen::VectorXd& grad,
                               Eigen::MatrixXd& hess) const {
    const double th = std::tanh(q[0]);
    const double sech2 = 1.0 - th * th;
    const double sign = (l == 0) ? 1.0 : -1.0;
    v = sign * th;
    grad[0] = sign * sech2;
    hess(0, 0) = sign * (-2.0 * sech2 * th);
}

void DualCrossing::grad_diag(int l, const Eigen::VectorXd& q, Eigen::VectorXd& out) const {
    if (l == 0) {
        out[0] = 0.0;
    } else {
        const double x = q[0];
        out[0] = 2.0 * a_ * b_ * x * std::exp(-b_ * x * x);
    }
}

void DualCrossing::hess_diag(int l, const Eigen::VectorXd& q, Eigen::MatrixXd& out) const {
    if (l == 0) {
        out(0, 0) = 0.0;
    } else {
        const double x = q[0];
        out(0, 0) = 2.0 * a_ * b_ * (1.0 - 2.0 * b_ * x * x) * std::exp(-b_ * x * x);
    }
}

void DualCrossing::diag_pack(int l, const Eigen::VectorXd& q, double& v, Eigen::VectorXd& grad,
                             Eigen::MatrixXd& hess) const {
    if (l == 0) {
        v = 0.0;
        grad[0] = 0.0;
        hess(0, 0) = 0.0;
    } else {
        const double x = q[0];
        const double g = std::exp(-b_ * x * x);
        v = -a_ * g + e_;
        grad[0] = 2.0 * a_ * b_ * x * g;
        hess(0, 0) = 2.0 * a_ * b_ * (1.0 - 2.0 * b_ * x * x) * g;
    }
}

// d/dx arctan(s x) = s/(1+s^2 x^2)
void ExtendedCoupling::grad_diag(int l, const Eigen::VectorXd& q, Eigen::VectorXd& out) const {
    const double u = 1.0 + s_ * s_ * q[0] * q[0];
    out[0] = (l == 0 ? s_ / u : -s_ / u);
}

void ExtendedCoupling::hess_diag(int l, const Eigen::VectorXd& q, Eigen::MatrixXd& out) const {
    const double u = 1.0 + s_ * s_ * q[0] * q[0];
    const double d2 = -2.0 * s_ * s_ * s_ * q[0] / (u * u);
    out(0, 0) = (l == 0 ? d2 : -d2);
}

void ExtendedCoupling::diag_pack(int l, const Eigen::VectorXd& q, double& v, Eigen::VectorXd& grad,
                                 Eigen::MatrixXd& hess) const {
    const double u = 1.0 + s_ * s_ * q[0] * q[0];
    const double sign = (l == 0) ? 1.0 : -1.0;
    v = sign * (std::atan(s_ * q[0]) + M_PI / 2.0);
    grad[0] = sign * s_ / u;
    hess(0, 0) = sign * (-2.0 * s_ * s_ * s_ * q[0] / (u * u));
}

std::unique_ptr<DiabaticPotential> make_potential(const std::string& tag,
                                                  const std::map<std::string, double>& params) {
    auto value_or = [&params](const std::string& key, double fallback) {
        auto it = params.find(key);
        return it != params.end() ? it->second : fallback;
    };

    if (tag == "simple") {
        return std::make_unique<SimpleCrossing>(value_or("coupling", 1.0));
    }
    if (tag == "dual") {
        return std::make_unique<DualCrossing>(value_or("a", 0.1), value_or("b", 0.28),
                                              value_or("c", 0.015), value_or("d", 0.06),
                                              value_or("e", 0.05));
    }
    if (tag == "extended") {
        return std::make_unique<ExtendedCoupling>(value_or("steepness", 10.0),
                                                  value_or("coupling", 1.0));
    }
    throw ContractError("unknown potential model '" + tag + "' (expected simple|dual|extended)");
}

} // namespace fgash::potentials
