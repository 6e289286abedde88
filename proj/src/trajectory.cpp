#include "fgash/trajectory.hpp"

#include <cmath>

namespace fgash::traj {

namespace {

const Complex kI(0.0, 1.0);

void resize_like(TrajectoryDerivative& d, int m) {
    d.dQ.resize(m);
    d.dP.resize(m);
    d.dDzQ.resize(m, m);
    d.dDzP.resize(m, m);
}

void add_scaled(TrajectoryState& s, const TrajectoryDerivative& d, double c) {
    if (s.Q.size() == 1) {
        s.Q[0] += c * d.dQ[0];
        s.P[0] += c * d.dP[0];
        s.S += c * d.dS;
        s.A += c * d.dA;
        s.dzQ(0, 0) += c * d.dDzQ(0, 0);
        s.dzP(0, 0) += c * d.dDzP(0, 0);
        return;
    }
    s.Q += c * d.dQ;
    s.P += c * d.dP;
    s.S += c * d.dS;
    s.A += c * d.dA;
    s.dzQ += c * d.dDzQ;
    s.dzP += c * d.dDzP;
}

} // namespace

TrajectoryState initial_state(const Eigen::VectorXd& q0, const Eigen::VectorXd& p0, Complex a0) {
    require(q0.size() == p0.size(), "initial_state: position/momentum dimension mismatch");
    const int m = static_cast<int>(q0.size());
    TrajectoryState s;
    s.t = 0.0;
    s.l = 0;
    s.Q = q0;
    s.P = p0;
    s.S = 0.0;
    s.A = a0;
    s.dzQ = Eigen::MatrixXcd::Identity(m, m);
    s.dzP = -kI * Eigen::MatrixXcd::Identity(m, m);
    return s;
}

double hop_rate(const TrajectoryState& state, const DiabaticPotential& potential, double delta,
                double eps, RateModel model) {
    require(eps > 0.0, "hop_rate: eps must be positive");
    require(delta >= 0.0, "hop_rate: delta must be nonnegative");
    if (delta == 0.0) return 0.0;
    const double coupling = std::abs(potential.v01(state.Q));
    if (model == RateModel::GapModified) {
        const double gap = std::abs(potential.v00(state.Q) - potential.v11(state.Q));
        if (gap > 1.0) return delta / eps * coupling / gap;
    }
    return delta / eps * coupling;
}

TrajectoryIntegrator::TrajectoryIntegrator(const DiabaticPotential& potential)
    : pot_(&potential), m_(potential.dimension()), lu_(m_) {
    resize_like(k1_, m_);
    resize_like(k2_, m_);
    resize_like(k3_, m_);
    resize_like(k4_, m_);
    grad_.resize(m_);
    hess_.resize(m_, m_);
    hessC_.resize(m_, m_);
    Z_.resize(m_, m_);
    QH_.resize(m_, m_);
    trArg_.resize(m_, m_);
    solveBuf_.resize(m_, m_);
}

void TrajectoryIntegrator::rhs(const TrajectoryState& state, TrajectoryDerivative& d) {
    const int l = state.l;
    double v;
    pot_->diag_pack(l, state.Q, v, grad_, hess_);

    if (m_ == 1) {
        // Scalar path: Z and the trace collapse to complex arithmetic.
        const Complex dzQ = state.dzQ(0, 0);
        const Complex dzP = state.dzP(0, 0);
        const Complex z = dzQ + kI * dzP;
        if (std::abs(z) <= 1e-12) {
            throw NumericalError("singular variational matrix Z (|det Z| = " +
                                 std::to_string(std::abs(z)) + " at t = " +
                                 std::to_string(state.t) + ")");
        }
        const double p = state.P[0];
        d.dQ[0] = p;
        d.dP[0] = -grad_[0];
        d.dS = 0.5 * p * p - v;
        d.dDzQ(0, 0) = dzP;
        d.dDzP(0, 0) = -hess_(0, 0) * dzQ;
        d.dA = 0.5 * state.A * (dzP - kI * dzQ * hess_(0, 0)) / z;
        return;
    }

    d.dQ = state.P;
    d.dP = -grad_;
    d.dS = 0.5 * state.P.squaredNorm() - v;

    // Variational system: the linearization of the classical flow.
    d.dDzQ = state.dzP;
    hessC_ = hess_.cast<Complex>();
    d.dDzP.noalias() = -hessC_ * state.dzQ;

    // dA/dt = (A/2) tr( Z^{-1} (dzP - i dzQ Hess) ),  Z = dzQ + i dzP.
    Z_ = state.dzQ + kI * state.dzP;
    lu_.compute(Z_);
    const Complex detZ = lu_.determinant();
    if (std::abs(detZ) <= 1e-12) {
        throw NumericalError("singular variational matrix Z (|det Z| = " +
                             std::to_string(std::abs(detZ)) + " at t = " +
                             std::to_string(state.t) + ")");
    }
    QH_.noalias() = state.dzQ * hessC_;
    trArg_ = state.dzP - kI * QH_;
    solveBuf_ = lu_.solve(trArg_);
    d.dA = 0.5 * state.A * solveBuf_.trace();
}

void TrajectoryIntegrator::step(TrajectoryState& state, double dt) {
    require(dt > 0.0, "rk4 step size must be positive");
    rhs(state, k1_);
    tmp_ = state;
    add_scaled(tmp_, k1_, 0.5 * dt);
    rhs(tmp_, k2_);
    tmp_ = state;
    add_scaled(tmp_, k2_, 0.5 * dt);
    rhs(tmp_, k3_);
    tmp_ = state;
    add_scaled(tmp_, k3_, dt);
    rhs(tmp_, k4_);

    add_scaled(state, k1_, dt / 6.0);
    add_scaled(state, k2_, dt / 3.0);
    add_scaled(state, k3_, dt / 3.0);
    add_scaled(state, k4_, dt / 6.0);
    state.t += dt;
}

TrajectoryDerivative ode_rhs(const TrajectoryState& state, const DiabaticPotential& potential) {
    require(state.dimension() == potential.dimension(), "ode_rhs: dimension mismatch");
    TrajectoryIntegrator integ(potential);
    TrajectoryDerivative d;
    resize_like(d, state.dimension());
    integ.rhs(state, d);
    return d;
}

TrajectoryState rk4_step(const TrajectoryState& state, double dt,
                         const DiabaticPotential& potential) {
    require(state.dimension() == potential.dimension(), "rk4_step: dimension mismatch");
    TrajectoryIntegrator integ(potential);
    TrajectoryState s = state;
    integ.step(s, dt);
    return s;
}

TrajectoryRecord evolve_trajectory(const TrajectoryState& init, const EngineParams& params,
                                   const DiabaticPotential& potential, UniformStream& rng,
                                   std::uint64_t seedTag) {
    require(params.finalTime > 0.0, "evolve_trajectory: final time must be positive");
    require(params.dt > 0.0, "evolve_trajectory: dt must be positive");
    require(params.eps > 0.0, "evolve_trajectory: eps must be positive");
    require(params.delta >= 0.0, "evolve_trajectory: delta must be nonnegative");
    require(params.probabilityCap > 0.0 && params.probabilityCap <= 1.0,
            "evolve_trajectory: probability cap must lie in (0,1]");
    require(init.dimension() == potential.dimension(), "evolve_trajectory: dimension mismatch");

    TrajectoryRecord rec;
    rec.initialA = init.A;
    rec.seedTag = seedTag;
    TrajectoryState state = init;
    TrajectoryIntegrator integ(potential);

    const double T = params.finalTime;
    const long nSteps = std::max<long>(1, static_cast<long>(std::ceil(T / params.dt - 1e-9)));
    for (long k = 0; k < nSteps; ++k) {
        const double h = (k == nSteps - 1) ? T - k * params.dt : params.dt;
        const double lambda = hop_rate(state, potential, params.delta, params.eps,
                                       params.rateModel);
        const double p = h * lambda;
        if (p > params.probabilityCap) {
            throw NumericalError(
                "per-step hop probability " + std::to_string(p) + " exceeds cap " +
                std::to_string(params.probabilityCap) + " (lambda = " + std::to_string(lambda) +
                ", dt = " + std::to_string(h) + "); reduce dt");
        }
        rec.rateIntegral += p;
        if (rng.next() < p) {
            HopEvent hop;
            hop.time = state.t;
            hop.fromSurface = state.l;
            hop.toSurface = 1 - state.l;
            hop.couplingValue = potential.coupling_element(hop.toSurface, hop.fromSurface, state.Q);
            hop.couplingMagnitude = std::abs(hop.couplingValue);
            hop.rateValue = lambda;
            rec.hops.push_back(hop);
            state.l = hop.toSurface;
        }
        integ.step(state, h);
    }
    state.t = T; // kill accumulated roundoff in the time stamp
    rec.finalState = std::move(state);
    return rec;
}

} // namespace fgash::traj
