#include "fgash/initial_data.hpp"

#include <algorithm>
#include <cmath>

namespace fgash::initial {

namespace {

constexpr double kLogSupportCut = 13.815510557964274; // -ln(1e-6)

// Odometer over a tensor grid: advances idx (base `n` per digit), returns
// false after the last combination.
bool advance(std::vector<int>& idx, int n) {
    for (std::size_t d = 0; d < idx.size(); ++d) {
        if (++idx[d] < n) return true;
        idx[d] = 0;
    }
    return false;
}

} // namespace

Complex GaussianWavePacket::evaluate(const Eigen::VectorXd& x, double eps) const {
    require(alpha > 0.0, "packet width exponent alpha must be positive");
    require(x.size() == center.size(), "packet evaluation dimension mismatch");
    const Eigen::VectorXd d = x - center;
    const double phase = momentum.dot(d) / eps;
    return prefactor * std::exp(-alpha * d.squaredNorm()) * Complex(std::cos(phase), std::sin(phase));
}

Complex compute_a0_quadrature(const std::function<Complex(const Eigen::VectorXd&)>& u0, int m,
                              const Eigen::VectorXd& q0, const Eigen::VectorXd& p0, double eps,
                              int nodesPerSqrtEps) {
    require(eps > 0.0, "compute_a0_quadrature: eps must be positive");
    require(q0.size() == m && p0.size() == m, "compute_a0_quadrature: dimension mismatch");
    require(nodesPerSqrtEps >= 16, "compute_a0_quadrature: need >= 16 nodes per sqrt(eps)");

    // Window where exp(-|y-q0|^2 / (2 eps)) >= 1e-16 per axis.
    const double sqrtEps = std::sqrt(eps);
    const double halfWidth = std::sqrt(2.0 * eps * std::log(1e16));
    const int nodes = std::max(3, static_cast<int>(std::ceil(2.0 * halfWidth / sqrtEps *
                                                             nodesPerSqrtEps)) +
                                      1);
    const double h = 2.0 * halfWidth / (nodes - 1);

    Eigen::VectorXd y(m);
    std::vector<int> idx(m, 0);
    Complex sum = 0.0;
    do {
        double w = 1.0;
        for (int d = 0; d < m; ++d) {
            y[d] = q0[d] - halfWidth + idx[d] * h;
            if (idx[d] == 0 || idx[d] == nodes - 1) w *= 0.5; // trapezoid ends
        }
        const Eigen::VectorXd dy = y - q0;
        const double gauss = std::exp(-dy.squaredNorm() / (2.0 * eps));
        const double phase = -p0.dot(dy) / eps;
        sum += w * u0(y) * gauss * Complex(std::cos(phase), std::sin(phase));
    } while (advance(idx, nodes));

    return std::pow(2.0, 0.5 * m) * sum * std::pow(h, m);
}

Complex analytic_a0_gaussian(const GaussianWavePacket& packet, const Eigen::VectorXd& q0,
                             const Eigen::VectorXd& p0, double eps) {
    require(eps > 0.0, "analytic_a0_gaussian: eps must be positive");
    require(packet.alpha > 0.0, "packet width exponent alpha must be positive");
    const int m = packet.dimension();
    require(q0.size() == m && p0.size() == m, "analytic_a0_gaussian: dimension mismatch");

    // Per coordinate the integrand is exp(-beta y^2 + gamma y + c) with
    //   beta  = alpha + 1/(2 eps)
    //   gamma = 2 alpha mu + q0/eps + i (pbar - p0)/eps
    //   c     = -alpha mu^2 - q0^2/(2 eps) + i (p0 q0 - pbar mu)/eps
    // and integrates to sqrt(pi/beta) exp(gamma^2/(4 beta) + c).
    const double alpha = packet.alpha;
    const double beta = alpha + 0.5 / eps;
    Complex result = std::pow(2.0, 0.5 * m) * packet.prefactor;
    for (int d = 0; d < m; ++d) {
        const double mu = packet.center[d];
        const double pbar = packet.momentum[d];
        const Complex gamma(2.0 * alpha * mu + q0[d] / eps, (pbar - p0[d]) / eps);
        const Complex c(-alpha * mu * mu - q0[d] * q0[d] / (2.0 * eps),
                        (p0[d] * q0[d] - pbar * mu) / eps);
        result *= std::sqrt(M_PI / beta) * std::exp(gamma * gamma / (4.0 * beta) + c);
    }
    return result;
}

void AmplitudeTable::point(std::size_t flat, Eigen::VectorXd& q0, Eigen::VectorXd& p0) const {
    q0.resize(m_);
    p0.resize(m_);
    // Row-major over 2m axes, q axes first.
    std::size_t rest = flat;
    for (int d = 2 * m_ - 1; d >= 0; --d) {
        const int i = static_cast<int>(rest % n_);
        rest /= n_;
        if (d < m_)
            q0[d] = qMin_[d] + (i + 0.5) * qStep_[d];
        else
            p0[d - m_] = pMin_[d - m_] + (i + 0.5) * pStep_[d - m_];
    }
}

void AmplitudeTable::finalize(double eps) {
    eps_ = eps;
    maxAbs_ = 0.0;
    double sumAbs = 0.0;
    for (const Complex& v : values_) {
        const double a = std::abs(v);
        maxAbs_ = std::max(maxAbs_, a);
        sumAbs += a;
    }
    cn_ = std::pow(2.0 * M_PI * eps, -1.5 * m_) * sumAbs * cellVolume_;
}

AmplitudeTable build_amplitude_table(const GaussianWavePacket& packet, double eps,
                                     const TableSpec& spec) {
    require(eps > 0.0, "build_amplitude_table: eps must be positive");
    require(packet.alpha > 0.0, "packet width exponent alpha must be positive");
    const int m = packet.dimension();
    require(packet.momentum.size() == m, "packet momentum dimension mismatch");

    Eigen::VectorXd qHalf = spec.qHalfWidth;
    Eigen::VectorXd pHalf = spec.pHalfWidth;
    if (qHalf.size() == 0 || pHalf.size() == 0) {
        // |A0| decays as exp(-aq |q0-mu|^2) exp(-ap |p0-pbar|^2); pick the box
        // so the boundary value sits well below the support cut (the 1.3
        // factor keeps the truncated tail of C_N below 1e-10 relative).
        const double aq = packet.alpha / (1.0 + 2.0 * packet.alpha * eps);
        const double ap = 1.0 / (4.0 * eps * eps * packet.alpha + 2.0 * eps);
        const double hq = 1.3 * std::sqrt(kLogSupportCut / aq);
        const double hp = 1.3 * std::sqrt(kLogSupportCut / ap);
        qHalf = Eigen::VectorXd::Constant(m, hq);
        pHalf = Eigen::VectorXd::Constant(m, hp);
    }

    AmplitudeTable t = AmplitudeTable::make_shell(m, eps, packet.center, packet.momentum, qHalf, pHalf, spec);
    Eigen::VectorXd q0(m), p0(m);
    for (std::size_t flat = 0; flat < t.values_.size(); ++flat) {
        t.point(flat, q0, p0);
        t.values_[flat] = analytic_a0_gaussian(packet, q0, p0, eps);
    }
    t.finalize(eps);
    return t;
}

AmplitudeTable build_amplitude_table_quadrature(
    const std::function<Complex(const Eigen::VectorXd&)>& u0, int m, double eps,
    const Eigen::VectorXd& qCenter, const Eigen::VectorXd& pCenter, const Eigen::VectorXd& qHalf,
    const Eigen::VectorXd& pHalf, const TableSpec& spec) {
    require(eps > 0.0, "build_amplitude_table_quadrature: eps must be positive");
    AmplitudeTable t = AmplitudeTable::make_shell(m, eps, qCenter, pCenter, qHalf, pHalf, spec);
    Eigen::VectorXd q0(m), p0(m);
    for (std::size_t flat = 0; flat < t.values_.size(); ++flat) {
        t.point(flat, q0, p0);
        t.values_[flat] = compute_a0_quadrature(u0, m, q0, p0, eps);
    }
    t.finalize(eps);
    return t;
}

AmplitudeTable AmplitudeTable::make_shell(int m, double eps, const Eigen::VectorXd& qCenter,
                                          const Eigen::VectorXd& pCenter,
                                          const Eigen::VectorXd& qHalf,
                                          const Eigen::VectorXd& pHalf, const TableSpec& spec) {
    require(m >= 1, "table dimension must be >= 1");
    require(spec.pointsPerAxis >= 2, "table needs >= 2 points per axis");
    require(qCenter.size() == m && pCenter.size() == m && qHalf.size() == m && pHalf.size() == m,
            "table box dimension mismatch");
    require((qHalf.array() > 0).all() && (pHalf.array() > 0).all(),
            "table box half-widths must be positive");

    AmplitudeTable t;
    t.m_ = m;
    t.n_ = spec.pointsPerAxis;
    t.eps_ = eps;
    t.supportCut_ = spec.supportCut;
    t.qCenter_ = qCenter;
    t.pCenter_ = pCenter;
    t.qHalf_ = qHalf;
    t.pHalf_ = pHalf;
    t.qMin_ = qCenter - qHalf;
    t.pMin_ = pCenter - pHalf;
    t.qStep_ = 2.0 * qHalf / t.n_;
    t.pStep_ = 2.0 * pHalf / t.n_;
    t.cellVolume_ = t.qStep_.prod() * t.pStep_.prod();

    const double cells = std::pow(double(t.n_), 2 * m);
    require(cells <= 1e8, "amplitude table would exceed 1e8 cells");
    t.values_.assign(static_cast<std::size_t>(cells), Complex(0.0, 0.0));
    return t;
}

double normalization_constant(const AmplitudeTable& table, double eps) {
    require(eps > 0.0, "normalization_constant: eps must be positive");
    double sumAbs = 0.0;
    for (const Complex& v : table.values()) sumAbs += std::abs(v);
    return std::pow(2.0 * M_PI * eps, -1.5 * table.dimension()) * sumAbs * table.cell_volume();
}

PhaseSpaceSampler::PhaseSpaceSampler(const AmplitudeTable& table, std::uint64_t seed)
    : table_(&table), rng_(seed) {
    const double cut = table.support_cut() * table.max_abs();
    double acc = 0.0;
    for (std::size_t flat = 0; flat < table.size(); ++flat) {
        const double a = std::abs(table.value(flat));
        if (a >= cut && a > 0.0) {
            cells_.push_back(flat);
            acc += a;
            cdf_.push_back(acc);
        }
    }
    require(!cells_.empty(), "phase-space sampler has empty support (all |A0| below threshold)");
}

SamplePoint PhaseSpaceSampler::draw() {
    const double u = rng_.next() * cdf_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const std::size_t k = std::min<std::size_t>(it - cdf_.begin(), cells_.size() - 1);
    SamplePoint s;
    s.cell = cells_[k];
    table_->point(s.cell, s.q0, s.p0);
    s.a0 = table_->value(s.cell);
    return s;
}

double PhaseSpaceSampler::cell_probability(std::size_t supportIndex) const {
    const double prev = supportIndex == 0 ? 0.0 : cdf_[supportIndex - 1];
    return (cdf_[supportIndex] - prev) / cdf_.back();
}

PhaseSpaceSampler build_sampler(const AmplitudeTable& table, std::uint64_t seed) {
    return PhaseSpaceSampler(table, seed);
}

} // namespace fgash::initial
