#ifndef FGASH_TESTS_SUPPORT_HPP
#define FGASH_TESTS_SUPPORT_HPP

#include <cmath>
#include <random>

#include "fgash/potentials.hpp"

namespace fgash::testsupport {

/// Constant 2x2 potential: flat surfaces with a position-independent
/// coupling. Jump-rate and matrix-exponential tests lean on it.
class ConstantPotential final : public potentials::DiabaticPotential {
public:
    ConstantPotential(double v00, double v11, Complex coupling, int m = 1)
        : v00_(v00), v11_(v11), c_(coupling), m_(m) {}
    int dimension() const override { return m_; }
    double v00(const Eigen::VectorXd&) const override { return v00_; }
    double v11(const Eigen::VectorXd&) const override { return v11_; }
    Complex v01(const Eigen::VectorXd&) const override { return c_; }
    void grad_diag(int, const Eigen::VectorXd&, Eigen::VectorXd& out) const override {
        out.setZero();
    }
    void hess_diag(int, const Eigen::VectorXd&, Eigen::MatrixXd& out) const override {
        out.setZero();
    }

private:
    double v00_, v11_;
    Complex c_;
    int m_;
};

/// Isotropic harmonic well q^2/2 on both surfaces (any dimension).
class HarmonicPotential final : public potentials::DiabaticPotential {
public:
    explicit HarmonicPotential(int m = 1, Complex coupling = 0.0) : m_(m), c_(coupling) {}
    int dimension() const override { return m_; }
    double v00(const Eigen::VectorXd& q) const override { return 0.5 * q.squaredNorm(); }
    double v11(const Eigen::VectorXd& q) const override { return 0.5 * q.squaredNorm(); }
    Complex v01(const Eigen::VectorXd&) const override { return c_; }
    void grad_diag(int, const Eigen::VectorXd& q, Eigen::VectorXd& out) const override {
        out = q;
    }
    void hess_diag(int, const Eigen::VectorXd& q, Eigen::MatrixXd& out) const override {
        out.setIdentity(q.size(), q.size());
    }

private:
    int m_;
    Complex c_;
};

// Regularized incomplete gamma Q(a,x) (upper), series + continued fraction.
inline double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

inline double gamma_q(double a, double x) {
    if (x <= 0.0) return 1.0;
    return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

/// p-value of a chi^2 statistic with k degrees of freedom.
inline double chi2_pvalue(double stat, int dof) { return gamma_q(0.5 * dof, 0.5 * stat); }

inline double poisson_pmf(int k, double lambda) {
    return std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
}

/// Central finite differences of the diagonal potential entries.
inline Eigen::VectorXd fd_gradient(const potentials::DiabaticPotential& pot, int l,
                                   const Eigen::VectorXd& q, double h = 1e-5) {
    Eigen::VectorXd g(q.size());
    Eigen::VectorXd qp = q, qm = q;
    for (int d = 0; d < q.size(); ++d) {
        qp[d] = q[d] + h;
        qm[d] = q[d] - h;
        g[d] = (pot.diag(l, qp) - pot.diag(l, qm)) / (2.0 * h);
        qp[d] = q[d];
        qm[d] = q[d];
    }
    return g;
}

inline Eigen::MatrixXd fd_hessian(const potentials::DiabaticPotential& pot, int l,
                                  const Eigen::VectorXd& q, double h = 1e-4) {
    const int m = static_cast<int>(q.size());
    Eigen::MatrixXd H(m, m);
    Eigen::VectorXd p(q);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i == j) {
                p = q;
                const double f0 = pot.diag(l, p);
                p[i] = q[i] + h;
                const double fp = pot.diag(l, p);
                p[i] = q[i] - h;
                const double fm = pot.diag(l, p);
                H(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
            } else {
                p = q;
                p[i] += h;
                p[j] += h;
                const double fpp = pot.diag(l, p);
                p[j] -= 2.0 * h;
                const double fpm = pot.diag(l, p);
                p[i] -= 2.0 * h;
                const double fmm = pot.diag(l, p);
                p[j] += 2.0 * h;
                const double fmp = pot.diag(l, p);
                H(i, j) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            }
        }
    }
    return H;
}

/// Fixed-value stream for rigged hop decisions.
class FixedStream final : public UniformStream {
public:
    explicit FixedStream(double value) : value_(value) {}
    double next() override { return value_; }

private:
    double value_;
};

} // namespace fgash::testsupport

#endif
