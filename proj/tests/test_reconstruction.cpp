#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fgash/reconstruction.hpp"
#include "support.hpp"

using namespace fgash;
using namespace fgash::recon;
using fgash::wf::Component;
using fgash::wf::WaveFunctionGrid;

namespace {

Eigen::VectorXd x1(double v) { return Eigen::VectorXd::Constant(1, v); }

traj::TrajectoryRecord make_record(double Q, double P, double S, Complex A, Complex initialA,
                                   double rateIntegral, int hops, double delta, double eps) {
    traj::TrajectoryRecord rec;
    rec.finalState = traj::initial_state(x1(Q), x1(P), A);
    rec.finalState.S = S;
    rec.finalState.t = 1.0;
    rec.initialA = initialA;
    rec.rateIntegral = rateIntegral;
    for (int j = 0; j < hops; ++j) {
        traj::HopEvent h;
        h.time = 0.1 * (j + 1);
        h.fromSurface = j % 2;
        h.toSurface = 1 - j % 2;
        h.couplingValue = 1.0;
        h.couplingMagnitude = 1.0;
        h.rateValue = delta / eps; // standard rate with |V01| = 1
        rec.hops.push_back(h);
    }
    rec.finalState.l = hops % 2;
    return rec;
}

} // namespace

TEST_CASE("trajectory weight: no hops") {
    const auto rec = make_record(0.0, 1.0, 0.2, Complex(1.0, 0.0), Complex(1.0, 0.0), 0.0, 0,
                                 0.04, 0.04);
    const TrajectoryWeight w = trajectory_weight(rec, 0.04, 0.04);
    CHECK(w.parity == 0);
    CHECK(std::abs(w.value - Complex(1.0, 0.0)) <= 1e-15);
}

TEST_CASE("trajectory weight: one hop with a real negative coupling gives +i") {
    auto rec = make_record(0.0, 1.0, 0.0, Complex(1.0, 0.0), Complex(1.0, 0.0), 0.0, 1, 0.04,
                           0.04);
    rec.hops[0].couplingValue = -1.0;
    rec.hops[0].couplingMagnitude = 1.0;
    const TrajectoryWeight w = trajectory_weight(rec, 0.04, 0.04);
    CHECK(w.parity == 1);
    CHECK(std::abs(w.value - Complex(0.0, 1.0)) <= 1e-15);
}

TEST_CASE("trajectory weight: two hops carry (-i)^2 = -1 and the rate exponential") {
    const double r = 0.7;
    auto rec = make_record(0.0, 1.0, 0.0, Complex(0.5, 0.0), Complex(1.0, 0.0), r, 2, 0.04, 0.04);
    const TrajectoryWeight w = trajectory_weight(rec, 0.04, 0.04);
    CHECK(w.parity == 0);
    const Complex expected = -std::exp(r) * Complex(0.5, 0.0);
    CHECK(std::abs(w.value - expected) <= 1e-14 * std::abs(expected));
}

TEST_CASE("trajectory weight: unit modulus of the per-hop phase factor") {
    // |value| = (|A_t|/|A0|) e^{rateIntegral} regardless of hop count
    auto rec = make_record(0.0, 1.0, 0.0, Complex(0.3, 0.4), Complex(0.0, 2.0), 0.9, 3, 0.01,
                           0.04);
    const TrajectoryWeight w = trajectory_weight(rec, 0.01, 0.04);
    CHECK(std::abs(w.value) ==
          doctest::Approx(0.5 / 2.0 * std::exp(0.9)).epsilon(1e-12)); // |A_t| = 0.5, |A0| = 2
    CHECK(w.parity == 1);
}

TEST_CASE("degenerate |A0| = 0 raises") {
    const auto rec = make_record(0.0, 1.0, 0.0, Complex(1.0, 0.0), Complex(0.0, 0.0), 0.0, 0,
                                 0.04, 0.04);
    CHECK_THROWS_AS(trajectory_weight(rec, 0.04, 0.04), ContractError);
}

TEST_CASE("single record paints one frozen Gaussian on component 0 only") {
    const double eps = 0.04, cn = 2.5, delta = 0.0;
    const double Q = 0.3, P = 1.2, S = 0.15;
    const Complex A(0.8, -0.1), A0(0.5, 0.5);
    const auto rec = make_record(Q, P, S, A, A0, 0.0, 0, delta, eps);
    const WaveFunctionGrid g = reconstruct({rec}, 1, -2.0, 2.0, 512, cn, delta, eps);

    const Complex upsilon = A / std::abs(A0);
    for (int i = 0; i < g.n; ++i) {
        const double x = g.coord(i);
        CHECK(std::abs(g.u1[i]) == 0.0);
        if (std::abs(x - Q) <= 8.0 * std::sqrt(eps)) {
            const Complex theta(S + P * (x - Q), 0.5 * (x - Q) * (x - Q));
            const Complex expected = cn * upsilon * std::exp(Complex(0.0, 1.0) * theta / eps);
            CHECK(std::abs(g.u0[i] - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
        } else {
            CHECK(std::abs(g.u0[i]) == 0.0); // truncated bump
        }
    }
}

TEST_CASE("l2 norm examples") {
    WaveFunctionGrid zero = wf::make_grid(1, -1.0, 1.0, 64, 0.04);
    CHECK(wf::l2_norm(zero) == 0.0);

    WaveFunctionGrid ones = wf::make_grid(1, 0.0, 1.0, 128, 0.04);
    for (int i = 0; i < ones.n; ++i) {
        ones.u0[i] = 1.0;
        ones.u1[i] = 1.0;
    }
    CHECK(wf::l2_norm(ones, Component::Zero) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(wf::l2_norm(ones, Component::One) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(wf::l2_norm(ones, Component::Both) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    // Gaussian: ||e^{-x^2}||_2 = (pi/2)^{1/4}
    WaveFunctionGrid gauss = wf::make_grid(1, -12.0, 12.0, 4096, 0.04);
    for (int i = 0; i < gauss.n; ++i) {
        const double x = gauss.coord(i);
        gauss.u0[i] = std::exp(-x * x);
    }
    CHECK(wf::l2_norm(gauss, Component::Zero) ==
          doctest::Approx(std::pow(M_PI / 2.0, 0.25)).epsilon(1e-6));
}

TEST_CASE("l2 error examples") {
    WaveFunctionGrid a = wf::make_grid(1, -1.0, 1.0, 64, 0.04);
    for (int i = 0; i < a.n; ++i) a.u0[i] = Complex(0.3, -0.2);
    CHECK(wf::l2_error(a, a, false) == 0.0);
    CHECK(wf::l2_error(a, a, true) == 0.0);

    WaveFunctionGrid zero = wf::make_grid(1, -1.0, 1.0, 64, 0.04);
    CHECK_THROWS_AS(wf::l2_error(a, zero, true), ContractError);

    WaveFunctionGrid twice = a;
    for (int i = 0; i < a.n; ++i) twice.u0[i] *= 2.0;
    CHECK(wf::l2_error(twice, a, true) == doctest::Approx(1.0).epsilon(1e-12));

    WaveFunctionGrid other = wf::make_grid(1, -1.0, 1.0, 128, 0.04);
    CHECK_THROWS_AS(wf::l2_error(a, other, false), ContractError);
}

TEST_CASE("transition rate examples") {
    WaveFunctionGrid g = wf::make_grid(1, -1.0, 1.0, 64, 0.04);
    CHECK(wf::transition_rate(g, 1.0) == 0.0);

    for (int i = 0; i < g.n; ++i) g.u1[i] = Complex(0.4, 0.1);
    const double r = wf::transition_rate(g, 2.0);
    WaveFunctionGrid phased = g;
    const Complex phase = std::exp(Complex(0.0, 1.234));
    for (int i = 0; i < g.n; ++i) phased.u1[i] *= phase;
    CHECK(wf::transition_rate(phased, 2.0) == r); // global phase leaves R unchanged
    CHECK_THROWS_AS(wf::transition_rate(g, 0.0), ContractError);
}

TEST_CASE("reconstruct is linear under ensemble concatenation") {
    const double eps = 0.04, delta = 0.04, cn = 1.3;
    std::vector<traj::TrajectoryRecord> r1, r2, all;
    for (int i = 0; i < 5; ++i) {
        auto rec = make_record(-0.5 + 0.2 * i, 1.0 + 0.1 * i, 0.05 * i, Complex(0.9, 0.1 * i),
                               Complex(1.0, 0.0), 0.1 * i, i % 3, delta, eps);
        (i % 2 == 0 ? r1 : r2).push_back(rec);
        all.push_back(rec);
    }
    const WaveFunctionGrid gAll = reconstruct(all, 1, -2.0, 2.0, 256, cn, delta, eps);
    const WaveFunctionGrid g1 = reconstruct(r1, 1, -2.0, 2.0, 256, cn, delta, eps);
    const WaveFunctionGrid g2 = reconstruct(r2, 1, -2.0, 2.0, 256, cn, delta, eps);
    const double w1 = double(r1.size()) / all.size();
    const double w2 = double(r2.size()) / all.size();
    for (int i = 0; i < gAll.n; ++i) {
        CHECK(std::abs(gAll.u0[i] - (w1 * g1.u0[i] + w2 * g2.u0[i])) <= 1e-12);
        CHECK(std::abs(gAll.u1[i] - (w1 * g1.u1[i] + w2 * g2.u1[i])) <= 1e-12);
    }
}

TEST_CASE("parity routing is structural") {
    const double eps = 0.04, delta = 0.04;
    for (int hops = 0; hops < 4; ++hops) {
        const auto rec = make_record(0.0, 1.0, 0.0, Complex(1.0, 0.0), Complex(1.0, 0.0), 0.0,
                                     hops, delta, eps);
        const WaveFunctionGrid g = reconstruct({rec}, 1, -2.0, 2.0, 128, 1.0, delta, eps);
        const double n0 = wf::l2_norm(g, Component::Zero);
        const double n1 = wf::l2_norm(g, Component::One);
        if (hops % 2 == 0) {
            CHECK(n0 > 0.0);
            CHECK(n1 == 0.0);
        } else {
            CHECK(n0 == 0.0);
            CHECK(n1 > 0.0);
        }
    }
}

TEST_CASE("hop-count filter keeps filtered records in the sample count") {
    const double eps = 0.04, delta = 0.04, cn = 1.0;
    const auto even = make_record(0.0, 1.0, 0.0, Complex(1.0, 0.0), Complex(1.0, 0.0), 0.0, 0,
                                  delta, eps);
    const auto twoHops = make_record(0.1, 1.0, 0.0, Complex(1.0, 0.0), Complex(1.0, 0.0), 0.0, 2,
                                     delta, eps);

    Accumulator acc(1, -2.0, 2.0, 128, eps);
    acc.add(even, delta, eps, 1);    // kept (0 hops <= 1)
    acc.add(twoHops, delta, eps, 1); // filtered, still counted
    CHECK(acc.count() == 2);
    const WaveFunctionGrid g = acc.finalize(cn);

    const WaveFunctionGrid gKept = reconstruct({even}, 1, -2.0, 2.0, 128, cn, delta, eps);
    for (int i = 0; i < g.n; ++i)
        CHECK(std::abs(g.u0[i] - 0.5 * gKept.u0[i]) <= 1e-14); // mean over N = 2
}

TEST_CASE("accumulator moments match a direct computation") {
    const double eps = 0.04, delta = 0.0, cn = 2.0;
    std::vector<traj::TrajectoryRecord> recs;
    for (int i = 0; i < 4; ++i)
        recs.push_back(make_record(0.05 * i, 1.0, 0.02 * i, Complex(1.0, 0.1 * i),
                                   Complex(1.0, 0.0), 0.0, 0, delta, eps));
    const WaveFunctionGrid g = reconstruct(recs, 1, -1.0, 1.0, 64, cn, delta, eps);

    // direct mean and standard error at one grid point
    const int idx = 40;
    const double x = g.coord(idx);
    Complex sum = 0.0;
    double sumSq = 0.0;
    for (const auto& rec : recs) {
        const double dxq = x - rec.finalState.Q[0];
        const Complex theta(rec.finalState.S + rec.finalState.P[0] * dxq, 0.5 * dxq * dxq);
        const Complex contrib = (rec.finalState.A / std::abs(rec.initialA)) *
                                std::exp(Complex(0.0, 1.0) * theta / eps);
        sum += contrib;
        sumSq += std::norm(contrib);
    }
    const double n = recs.size();
    const Complex mean = sum / n;
    const double var = (sumSq - std::norm(sum) / n) / (n - 1.0);
    CHECK(std::abs(g.u0[idx] - cn * mean) <= 1e-13);
    CHECK(g.stderr0[idx] == doctest::Approx(cn * std::sqrt(var / n)).epsilon(1e-10));
}

TEST_CASE("off-grid bump is dropped without touching the grid") {
    const auto rec = make_record(50.0, 1.0, 0.0, Complex(1.0, 0.0), Complex(1.0, 0.0), 0.0, 0,
                                 0.0, 0.04);
    const WaveFunctionGrid g = reconstruct({rec}, 1, -2.0, 2.0, 64, 1.0, 0.0, 0.04);
    CHECK(wf::l2_norm(g) == 0.0);
}

TEST_CASE("reconstruct contract checks") {
    CHECK_THROWS_AS(reconstruct({}, 1, -1.0, 1.0, 64, 1.0, 0.0, 0.04), ContractError);
    auto r1 = make_record(0.0, 1.0, 0.0, Complex(1.0, 0.0), Complex(1.0, 0.0), 0.0, 0, 0.0, 0.04);
    auto r2 = r1;
    r2.finalState.t = 2.0;
    CHECK_THROWS_AS(reconstruct({r1, r2}, 1, -1.0, 1.0, 64, 1.0, 0.0, 0.04), ContractError);
}

TEST_CASE("csv round trip preserves values exactly") {
    WaveFunctionGrid g = wf::make_grid(1, -1.0, 1.0, 32, 0.04);
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    g.stderr0.assign(g.size(), 0.0);
    g.stderr1.assign(g.size(), 0.0);
    for (int i = 0; i < g.n; ++i) {
        g.u0[i] = Complex(u(gen), u(gen));
        g.u1[i] = Complex(u(gen), u(gen));
        g.stderr0[i] = std::abs(u(gen));
        g.stderr1[i] = std::abs(u(gen));
    }
    std::istringstream in(wf::to_csv(g));
    const WaveFunctionGrid h = wf::read_csv(in);
    REQUIRE(h.n == g.n);
    for (int i = 0; i < g.n; ++i) {
        CHECK(h.u0[i] == g.u0[i]);
        CHECK(h.u1[i] == g.u1[i]);
        CHECK(h.stderr0[i] == g.stderr0[i]);
    }
    CHECK(h.dx() == doctest::Approx(g.dx()).epsilon(1e-14));

    std::istringstream bad("x,re_u0\n0,1\n");
    CHECK_THROWS_AS(wf::read_csv(bad), ContractError);
}
