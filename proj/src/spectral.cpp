#include "fgash/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace fgash::spectral {

namespace {

const Complex kI(0.0, 1.0);

// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    FftPair(std::vector<Complex>& buf, int n) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        auto* p = reinterpret_cast<fftw_complex*>(buf.data());
        fwd = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftPair() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    FftPair(const FftPair&) = delete;
    FftPair& operator=(const FftPair&) = delete;
};

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_1d_pow2(const WaveFunctionGrid& u) {
    require(u.m == 1, "spectral solver supports 1-D grids only");
    require(is_pow2(u.n), "spectral grid size must be a power of two");
}

// 2x2 unitary exp(-i tau V/eps) at one point, applied in place to (a0, a1).
struct MatrixExp {
    Complex u00, u01, u10, u11;

    MatrixExp(double v00, double v11, Complex coupling, double tau, double eps) {
        const double c = 0.5 * (v00 + v11);
        const double d3 = 0.5 * (v00 - v11);
        const double dnorm = std::sqrt(d3 * d3 + std::norm(coupling));
        const double theta = tau * dnorm / eps;
        const Complex phase = std::exp(-kI * (tau * c / eps));
        double s; // sin(theta)/dnorm, with the small-|d| series branch
        if (std::abs(theta) < 1e-8) {
            s = (tau / eps) * (1.0 - theta * theta / 6.0);
        } else {
            s = std::sin(theta) / dnorm;
        }
        const double ct = std::cos(theta);
        u00 = phase * Complex(ct, -s * d3);
        u11 = phase * Complex(ct, s * d3);
        u01 = phase * (-kI * s * coupling);
        u10 = phase * (-kI * s * std::conj(coupling));
    }

    void apply(Complex& a0, Complex& a1) const {
        const Complex b0 = u00 * a0 + u01 * a1;
        const Complex b1 = u10 * a0 + u11 * a1;
        a0 = b0;
        a1 = b1;
    }
};

// Wavenumbers in FFT ordering for the periodic grid [a,b).
double wavenumber(int j, int n, double length) {
    const int jj = (j <= n / 2) ? j : j - n;
    return 2.0 * M_PI * jj / length;
}

struct Solver {
    WaveFunctionGrid u;
    const DiabaticPotential& V;
    double delta;
    double eps;
    FftPair fft0, fft1;
    std::vector<double> kineticPhase; // eps k^2 / 2 per mode
    std::vector<MatrixExp> potFactors;
    double potTau = 0.0;
    bool potValid = false;

    Solver(const WaveFunctionGrid& u_in, const DiabaticPotential& V_, double delta_, double eps_)
        : u(u_in), V(V_), delta(delta_), eps(eps_), fft0(u.u0, u.n), fft1(u.u1, u.n) {
        kineticPhase.resize(u.n);
        const double length = u.b - u.a;
        for (int j = 0; j < u.n; ++j) {
            const double k = wavenumber(j, u.n, length);
            kineticPhase[j] = 0.5 * eps * k * k;
        }
    }

    void kinetic(double tau) {
        fftw_execute(fft0.fwd);
        fftw_execute(fft1.fwd);
        const double invN = 1.0 / u.n;
        for (int j = 0; j < u.n; ++j) {
            const double ph = -tau * kineticPhase[j];
            const Complex f = Complex(std::cos(ph), std::sin(ph)) * invN;
            u.u0[j] *= f;
            u.u1[j] *= f;
        }
        fftw_execute(fft0.bwd);
        fftw_execute(fft1.bwd);
    }

    void potential(double tau) {
        if (!potValid || potTau != tau) {
            potFactors.clear();
            potFactors.reserve(u.n);
            Eigen::VectorXd x(1);
            for (int j = 0; j < u.n; ++j) {
                x[0] = u.coord(j);
                potFactors.emplace_back(V.v00(x), V.v11(x), delta * V.v01(x), tau, eps);
            }
            potTau = tau;
            potValid = true;
        }
        for (int j = 0; j < u.n; ++j) potFactors[j].apply(u.u0[j], u.u1[j]);
    }

    void check_boundary() const {
        const double strip = 10.0 * std::sqrt(eps);
        double edge = 0.0, total = 0.0;
        for (int j = 0; j < u.n; ++j) {
            const double x = u.coord(j);
            const double mass = std::norm(u.u0[j]) + std::norm(u.u1[j]);
            total += mass;
            if (x < u.a + strip || x >= u.b - strip) edge += mass;
        }
        if (total > 0.0 && edge / total > 1e-8) {
            throw NumericalError("boundary contamination: " + std::to_string(edge / total) +
                                 " of the mass sits within 10 sqrt(eps) of the domain edge; "
                                 "enlarge the domain");
        }
    }
};

} // namespace

WaveFunctionGrid potential_step(const WaveFunctionGrid& u, const DiabaticPotential& V,
                                double delta, double tau, double eps) {
    require(u.m == 1, "spectral solver supports 1-D grids only");
    require(eps > 0.0, "potential_step: eps must be positive");
    WaveFunctionGrid out = u;
    Eigen::VectorXd x(1);
    for (int j = 0; j < u.n; ++j) {
        x[0] = u.coord(j);
        MatrixExp me(V.v00(x), V.v11(x), delta * V.v01(x), tau, eps);
        me.apply(out.u0[j], out.u1[j]);
    }
    return out;
}

WaveFunctionGrid kinetic_step(const WaveFunctionGrid& u, double tau, double eps) {
    check_1d_pow2(u);
    require(eps > 0.0, "kinetic_step: eps must be positive");
    WaveFunctionGrid out = u;
    FftPair fft0(out.u0, out.n), fft1(out.u1, out.n);
    fftw_execute(fft0.fwd);
    fftw_execute(fft1.fwd);
    const double length = out.b - out.a;
    const double invN = 1.0 / out.n;
    for (int j = 0; j < out.n; ++j) {
        const double k = wavenumber(j, out.n, length);
        const double ph = -0.5 * tau * eps * k * k;
        const Complex f = Complex(std::cos(ph), std::sin(ph)) * invN;
        out.u0[j] *= f;
        out.u1[j] *= f;
    }
    fftw_execute(fft0.bwd);
    fftw_execute(fft1.bwd);
    return out;
}

WaveFunctionGrid solve(const WaveFunctionGrid& u_in, const DiabaticPotential& V, double delta,
                       double T, double dt, double eps) {
    check_1d_pow2(u_in);
    require(eps > 0.0, "solve: eps must be positive");
    require(T != 0.0 && dt != 0.0 && (T > 0) == (dt > 0), "solve: T and dt must share a sign");

    Solver s(u_in, V, delta, eps);
    const long nSteps = std::max<long>(1, static_cast<long>(std::ceil(T / dt - 1e-9)));
    for (long k = 0; k < nSteps; ++k) {
        const double h = (k == nSteps - 1) ? T - k * dt : dt;
        s.kinetic(0.5 * h);
        s.potential(h);
        s.kinetic(0.5 * h);
        s.check_boundary();
    }
    return std::move(s.u);
}

int suggest_grid_size(double a, double b, double eps, double pmax, double packetAlpha) {
    require(b > a && eps > 0.0, "suggest_grid_size: bad domain or eps");
    const double kmax =
        1.4 * std::abs(pmax) / eps + 12.0 * std::max(std::sqrt(2.0 * packetAlpha), 1.0 / std::sqrt(eps));
    int n = 256;
    while (n < (b - a) * kmax / M_PI && n < (1 << 22)) n *= 2;
    return n;
}

} // namespace fgash::spectral
