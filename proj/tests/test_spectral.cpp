#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "fgash/spectral.hpp"
#include "support.hpp"

using namespace fgash;
using namespace fgash::spectral;
using fgash::testsupport::ConstantPotential;
using fgash::wf::WaveFunctionGrid;

namespace {

initial::GaussianWavePacket example1_packet() {
    initial::GaussianWavePacket p;
    p.alpha = 12.5;
    p.center = Eigen::VectorXd::Constant(1, -1.5);
    p.momentum = Eigen::VectorXd::Constant(1, 2.0);
    return p;
}

// Eigendecomposition-based 2x2 exponential, the independent oracle for the
// Pauli closed form used in the implementation.
Eigen::Matrix2cd expm_oracle(double v00, double v11, Complex c, double tau, double eps) {
    Eigen::Matrix2cd H;
    H << Complex(v00, 0), c, std::conj(c), Complex(v11, 0);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(H);
    Eigen::Vector2cd phases;
    for (int k = 0; k < 2; ++k)
        phases[k] = std::exp(Complex(0.0, -tau * es.eigenvalues()[k] / eps));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace

TEST_CASE("potential step with V = 0 is the identity") {
    ConstantPotential zero(0.0, 0.0, 0.0);
    WaveFunctionGrid u = wf::make_grid(1, -4.0, 4.0, 64, 0.04);
    for (int i = 0; i < u.n; ++i) u.u0[i] = Complex(std::sin(0.1 * i), std::cos(0.2 * i));
    const WaveFunctionGrid v = potential_step(u, zero, 1.0, 0.3, 0.04);
    for (int i = 0; i < u.n; ++i) {
        CHECK(std::abs(v.u0[i] - u.u0[i]) == 0.0);
        CHECK(std::abs(v.u1[i]) == 0.0);
    }
}

TEST_CASE("diagonal potential applies pure phases") {
    ConstantPotential diag(1.0, -1.0, 0.0);
    const double eps = 0.05, tau = 0.02, theta = tau / eps;
    WaveFunctionGrid u = wf::make_grid(1, -1.0, 1.0, 32, eps);
    for (int i = 0; i < u.n; ++i) {
        u.u0[i] = Complex(1.0, 0.5);
        u.u1[i] = Complex(-0.3, 0.8);
    }
    const WaveFunctionGrid v = potential_step(u, diag, 1.0, tau, eps);
    const Complex f0 = std::exp(Complex(0.0, -theta));
    const Complex f1 = std::exp(Complex(0.0, theta));
    for (int i = 0; i < u.n; ++i) {
        CHECK(std::abs(v.u0[i] - f0 * u.u0[i]) <= 1e-15);
        CHECK(std::abs(v.u1[i] - f1 * u.u1[i]) <= 1e-15);
    }
}

TEST_CASE("matrix exponential matches the eigendecomposition oracle to 1e-12") {
    std::mt19937_64 gen(29);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 200; ++trial) {
        const double v00 = u(gen), v11 = u(gen), tau = 0.1 * u(gen) + 0.2;
        const Complex c(u(gen), u(gen));
        const double eps = 0.04;

        ConstantPotential pot(v00, v11, c);
        WaveFunctionGrid g = wf::make_grid(1, 0.0, 1.0, 2, eps);
        const Complex a0(0.7, -0.1), a1(0.2, 0.4);
        g.u0[0] = a0;
        g.u1[0] = a1;
        const WaveFunctionGrid stepped = potential_step(g, pot, 1.0, tau, eps);

        const Eigen::Matrix2cd U = expm_oracle(v00, v11, c, tau, eps);
        const Complex b0 = U(0, 0) * a0 + U(0, 1) * a1;
        const Complex b1 = U(1, 0) * a0 + U(1, 1) * a1;
        CHECK(std::abs(stepped.u0[0] - b0) <= 1e-12);
        CHECK(std::abs(stepped.u1[0] - b1) <= 1e-12);
    }

    // near-degenerate branch: |d| tau/eps below the series threshold
    ConstantPotential tiny(0.3, 0.3, 1e-13);
    WaveFunctionGrid g = wf::make_grid(1, 0.0, 1.0, 2, 0.04);
    g.u0[0] = Complex(1.0, 0.0);
    g.u1[0] = Complex(0.0, 1.0);
    const WaveFunctionGrid stepped = potential_step(g, tiny, 1.0, 0.01, 0.04);
    const Eigen::Matrix2cd U = expm_oracle(0.3, 0.3, 1e-13, 0.01, 0.04);
    CHECK(std::abs(stepped.u0[0] - (U(0, 0) * g.u0[0] + U(0, 1) * g.u1[0])) <= 1e-12);
}

TEST_CASE("kinetic step with tau = 0 is the identity up to FFT roundoff") {
    WaveFunctionGrid u = wf::make_grid(1, -2.0, 2.0, 128, 0.04);
    for (int i = 0; i < u.n; ++i) u.u0[i] = Complex(std::sin(0.3 * i), std::exp(-0.01 * i));
    const WaveFunctionGrid v = kinetic_step(u, 0.0, 0.04);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < u.n; ++i) {
        num += std::norm(v.u0[i] - u.u0[i]);
        den += std::norm(u.u0[i]);
    }
    CHECK(std::sqrt(num / den) <= 1e-13);
}

TEST_CASE("kinetic step multiplies a single Fourier mode by its exact phase") {
    const double a = -3.0, b = 5.0, eps = 0.04, tau = 0.37;
    const int n = 64;
    WaveFunctionGrid u = wf::make_grid(1, a, b, n, eps);
    const double k = 2.0 * M_PI * 5 / (b - a);
    for (int i = 0; i < n; ++i) {
        const double x = u.coord(i);
        u.u0[i] = std::exp(Complex(0.0, k * x));
    }
    const WaveFunctionGrid v = kinetic_step(u, tau, eps);
    const Complex phase = std::exp(Complex(0.0, -0.5 * tau * eps * k * k));
    for (int i = 0; i < n; ++i) CHECK(std::abs(v.u0[i] - phase * u.u0[i]) <= 1e-12);
}

TEST_CASE("free Gaussian dispersion matches the closed form to 1e-8 in L2") {
    const double eps = 0.04, T = 1.0, alpha = 12.5, mu = -1.5, pbar = 2.0;
    const int n = 4096;
    const double a = -12.0, b = 12.0;
    const initial::GaussianWavePacket packet = example1_packet();
    WaveFunctionGrid u = wf::sample_packet(packet, a, b, n, eps);
    const WaveFunctionGrid v = kinetic_step(u, T, eps);

    // Fourier evaluation of the free evolution of exp(-alpha xi^2 + i pbar xi/eps):
    //   u(T, x) = sqrt(1/(4 alpha c)) exp((bb/(2 alpha) + i xi)^2/(4 c) - bb^2/(4 alpha)),
    //   c = 1/(4 alpha) + i T eps/2, bb = pbar/eps, xi = x - mu.
    const double bb = pbar / eps;
    const Complex c(1.0 / (4.0 * alpha), 0.5 * T * eps);
    double err2 = 0.0, ref2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double xi = v.coord(i) - mu;
        const Complex z = Complex(bb / (2.0 * alpha), xi);
        const Complex exact = std::sqrt(Complex(1.0, 0.0) / (4.0 * alpha * c)) *
                              std::exp(z * z / (4.0 * c) - bb * bb / (4.0 * alpha));
        err2 += std::norm(v.u0[i] - exact);
        ref2 += std::norm(exact);
    }
    CHECK(std::sqrt(err2 / ref2) <= 1e-8);
}

TEST_CASE("decoupled system keeps u1 identically zero") {
    potentials::SimpleCrossing pot;
    const double eps = 0.04;
    WaveFunctionGrid u = wf::sample_packet(example1_packet(), -8.0, 8.0, 1024, eps);
    const WaveFunctionGrid v = solve(u, pot, 0.0, 0.4, eps / 32.0, eps);
    for (int i = 0; i < v.n; ++i) CHECK(v.u1[i] == Complex(0.0, 0.0));
}

TEST_CASE("norm is conserved to 1e-10 over the simple-crossing run") {
    potentials::SimpleCrossing pot;
    const double eps = 0.04;
    WaveFunctionGrid u = wf::sample_packet(example1_packet(), -8.0, 8.0, 2048, eps);
    const double n0 = wf::l2_norm(u, wf::Component::Both);
    const WaveFunctionGrid v = solve(u, pot, 0.04, 1.2, eps / 32.0, eps);
    const double n1 = wf::l2_norm(v, wf::Component::Both);
    CHECK(std::abs(n1 - n0) <= 1e-10 * n0);
}

TEST_CASE("Strang self-convergence: halving dt gains a factor of about 4") {
    potentials::SimpleCrossing pot;
    const double eps = 0.04, T = 0.3;
    WaveFunctionGrid u = wf::sample_packet(example1_packet(), -8.0, 8.0, 2048, eps);
    const WaveFunctionGrid fine = solve(u, pot, 0.04, T, eps / 64.0, eps);
    const WaveFunctionGrid c1 = solve(u, pot, 0.04, T, eps / 8.0, eps);
    const WaveFunctionGrid c2 = solve(u, pot, 0.04, T, eps / 16.0, eps);
    const double e1 = wf::l2_error(c1, fine, false);
    const double e2 = wf::l2_error(c2, fine, false);
    CHECK(e1 / e2 >= 3.4);
    CHECK(e1 / e2 <= 4.6);
}

TEST_CASE("time reversal returns the initial state to 1e-8") {
    potentials::SimpleCrossing pot;
    const double eps = 0.04, T = 0.5;
    WaveFunctionGrid u = wf::sample_packet(example1_packet(), -8.0, 8.0, 2048, eps);
    const WaveFunctionGrid fwd = solve(u, pot, 0.04, T, eps / 32.0, eps);
    const WaveFunctionGrid back = solve(fwd, pot, 0.04, -T, -eps / 32.0, eps);
    CHECK(wf::l2_error(back, u, true) <= 1e-8);
}

TEST_CASE("doubling the grid leaves a resolved solution unchanged to 1e-8") {
    potentials::SimpleCrossing pot;
    const double eps = 0.04, T = 0.4;
    WaveFunctionGrid u1g = wf::sample_packet(example1_packet(), -8.0, 8.0, 2048, eps);
    WaveFunctionGrid u2g = wf::sample_packet(example1_packet(), -8.0, 8.0, 4096, eps);
    const WaveFunctionGrid s1 = solve(u1g, pot, 0.04, T, eps / 32.0, eps);
    const WaveFunctionGrid s2 = solve(u2g, pot, 0.04, T, eps / 32.0, eps);
    double err2 = 0.0;
    for (int i = 0; i < s1.n; ++i) {
        err2 += std::norm(s1.u0[i] - s2.u0[2 * i]) + std::norm(s1.u1[i] - s2.u1[2 * i]);
    }
    CHECK(std::sqrt(err2 * s1.dx()) <= 1e-8);
}

TEST_CASE("aliasing guard flags boundary contamination") {
    potentials::SimpleCrossing pot;
    const double eps = 0.04;
    initial::GaussianWavePacket p = example1_packet();
    p.center = Eigen::VectorXd::Constant(1, 1.0); // close to the right edge
    WaveFunctionGrid u = wf::sample_packet(p, -3.0, 3.0, 512, eps);
    CHECK_THROWS_AS(solve(u, pot, 0.04, 1.5, eps / 32.0, eps), NumericalError);
}

TEST_CASE("grid contracts") {
    WaveFunctionGrid u = wf::make_grid(1, -1.0, 1.0, 300, 0.04); // not a power of two
    CHECK_THROWS_AS(kinetic_step(u, 0.1, 0.04), ContractError);
    WaveFunctionGrid ok = wf::make_grid(1, -1.0, 1.0, 256, 0.04);
    CHECK_THROWS_AS(solve(ok, potentials::SimpleCrossing(), 0.0, 1.0, -0.01, 0.04),
                    ContractError);
}

TEST_CASE("suggested grid size grows with momentum and shrinks with eps") {
    const int n1 = suggest_grid_size(-8.0, 8.0, 0.04, 4.0, 12.5);
    const int n2 = suggest_grid_size(-8.0, 8.0, 0.01, 4.0, 12.5);
    CHECK(n1 >= 1024);
    CHECK(n2 > n1);
    CHECK((n1 & (n1 - 1)) == 0);
}
