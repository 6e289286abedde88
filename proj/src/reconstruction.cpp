#include "fgash/reconstruction.hpp"

#include <cmath>

namespace fgash::recon {

TrajectoryWeight trajectory_weight(const TrajectoryRecord& record, double delta, double eps) {
    require(eps > 0.0, "trajectory_weight: eps must be positive");
    const double a0 = std::abs(record.initialA);
    require(a0 > 0.0, "degenerate trajectory weight: |A0| = 0 (such samples cannot be drawn)");

    TrajectoryWeight w;
    w.parity = static_cast<int>(record.hops.size() % 2);
    Complex value = record.finalState.A / a0 * std::exp(record.rateIntegral);
    const Complex minusI(0.0, -1.0);
    for (const traj::HopEvent& hop : record.hops) {
        value *= minusI * hop.couplingValue * (delta / eps) / hop.rateValue;
    }
    w.value = value;
    return w;
}

Accumulator::Accumulator(int m, double a, double b, int n, double eps)
    : geom_(wf::make_grid(m, a, b, n, eps)) {
    for (int c = 0; c < 2; ++c) {
        sum_[c].assign(geom_.size(), Complex(0, 0));
        sumSq_[c].assign(geom_.size(), 0.0);
    }
}

void deposit_bump(const WaveFunctionGrid& geom, std::vector<Complex>& target, Complex value,
                  const Eigen::VectorXd& Q, const Eigen::VectorXd& P, double S, double eps,
                  std::vector<double>* sumSq) {
    const int m = geom.m;
    const int n = geom.n;
    const double dx = geom.dx();
    const double radius = 8.0 * std::sqrt(eps);

    if (m == 1) {
        const int lo1 = std::max(0, static_cast<int>(std::ceil((Q[0] - radius - geom.a) / dx)));
        const int hi1 =
            std::min(n - 1, static_cast<int>(std::floor((Q[0] + radius - geom.a) / dx)));
        if (lo1 > hi1) return;
        // Both the plane-wave phase and the Gaussian advance multiplicatively
        // from point to point; the recurrences replace per-point
        // transcendentals (drift ~ points * ulp, far below the estimator's
        // tolerances).
        const double pd = P[0] * dx / eps;
        const Complex phaseMul(std::cos(pd), std::sin(pd));
        const double bRatio = std::exp(-dx * dx / eps);
        Complex cur = 0.0;
        double b = 0.0;
        for (int j = lo1; j <= hi1; ++j) {
            if (((j - lo1) & 63) == 0) { // re-anchor to cap recurrence drift
                const double d = geom.a + j * dx - Q[0];
                const double phase = (S + P[0] * d) / eps;
                cur = value * std::exp(-0.5 * d * d / eps) *
                      Complex(std::cos(phase), std::sin(phase));
                b = std::exp(-(d * dx + 0.5 * dx * dx) / eps);
            }
            target[j] += cur;
            if (sumSq) (*sumSq)[j] += std::norm(cur);
            cur *= phaseMul * b;
            b *= bRatio;
        }
        return;
    }

    // Per-axis index window around the bump center.
    std::vector<int> lo(m), hi(m), idx(m);
    for (int d = 0; d < m; ++d) {
        lo[d] = std::max(0, static_cast<int>(std::ceil((Q[d] - radius - geom.a) / dx)));
        hi[d] = std::min(n - 1, static_cast<int>(std::floor((Q[d] + radius - geom.a) / dx)));
        if (lo[d] > hi[d]) return; // bump entirely off-grid
        idx[d] = lo[d];
    }

    while (true) {
        std::size_t flat = 0;
        double dist2 = 0.0;
        double pdot = 0.0;
        for (int d = 0; d < m; ++d) {
            flat = flat * n + idx[d];
            const double dxd = geom.a + idx[d] * dx - Q[d];
            dist2 += dxd * dxd;
            pdot += P[d] * dxd;
        }
        const double phase = (S + pdot) / eps;
        const double gauss = std::exp(-0.5 * dist2 / eps);
        const Complex contrib = value * gauss * Complex(std::cos(phase), std::sin(phase));
        target[flat] += contrib;
        if (sumSq) (*sumSq)[flat] += std::norm(contrib);

        int d = m - 1;
        while (d >= 0 && ++idx[d] > hi[d]) idx[d] = lo[d], --d;
        if (d < 0) break;
    }
}

void Accumulator::add(const TrajectoryRecord& record, double delta, double eps, int maxHops) {
    ++count_;
    if (maxHops >= 0 && static_cast<int>(record.hops.size()) > maxHops) return;

    const TrajectoryWeight w = trajectory_weight(record, delta, eps);
    const traj::TrajectoryState& fs = record.finalState;
    require(fs.dimension() == geom_.m, "record dimension does not match the grid");
    deposit_bump(geom_, sum_[w.parity], w.value, fs.Q, fs.P, fs.S, eps, &sumSq_[w.parity]);
}

void Accumulator::merge(const Accumulator& other) {
    require(geom_.m == other.geom_.m && geom_.n == other.geom_.n && geom_.a == other.geom_.a &&
                geom_.b == other.geom_.b,
            "accumulator grids do not match");
    count_ += other.count_;
    for (int c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < sum_[c].size(); ++i) {
            sum_[c][i] += other.sum_[c][i];
            sumSq_[c][i] += other.sumSq_[c][i];
        }
    }
}

WaveFunctionGrid Accumulator::finalize(double cn) const {
    require(count_ > 0, "cannot finalize an empty ensemble");
    WaveFunctionGrid g = geom_;
    g.stderr0.assign(g.size(), 0.0);
    g.stderr1.assign(g.size(), 0.0);
    const double N = static_cast<double>(count_);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.u0[i] = cn * sum_[0][i] / N;
        g.u1[i] = cn * sum_[1][i] / N;
        if (count_ > 1) {
            const double var0 =
                std::max(0.0, (sumSq_[0][i] - std::norm(sum_[0][i]) / N) / (N - 1.0));
            const double var1 =
                std::max(0.0, (sumSq_[1][i] - std::norm(sum_[1][i]) / N) / (N - 1.0));
            g.stderr0[i] = cn * std::sqrt(var0 / N);
            g.stderr1[i] = cn * std::sqrt(var1 / N);
        }
    }
    return g;
}

WaveFunctionGrid reconstruct(const std::vector<TrajectoryRecord>& records, int m, double a,
                             double b, int n, double cn, double delta, double eps, int maxHops) {
    require(!records.empty(), "reconstruct: empty trajectory ensemble");
    const double t = records.front().finalState.t;
    for (const TrajectoryRecord& r : records)
        require(std::abs(r.finalState.t - t) <= 1e-12 * std::max(1.0, std::abs(t)),
                "reconstruct: records do not share a final time");
    Accumulator acc(m, a, b, n, eps);
    for (const TrajectoryRecord& r : records) acc.add(r, delta, eps, maxHops);
    return acc.finalize(cn);
}

double stderr_l2(const WaveFunctionGrid& grid, wf::Component c) {
    double acc = 0.0;
    if (c != wf::Component::One)
        for (double e : grid.stderr0) acc += e * e;
    if (c != wf::Component::Zero)
        for (double e : grid.stderr1) acc += e * e;
    return std::sqrt(acc * std::pow(grid.dx(), grid.m));
}

} // namespace fgash::recon
