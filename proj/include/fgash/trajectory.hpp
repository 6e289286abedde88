#ifndef FGASH_TRAJECTORY_HPP
#define FGASH_TRAJECTORY_HPP

#include <Eigen/Dense>
#include <vector>

#include "fgash/core.hpp"
#include "fgash/potentials.hpp"

namespace fgash::traj {

using potentials::DiabaticPotential;

/// Extended phase-space state of one surface-hopping trajectory. The
/// variational matrices dzQ, dzP are the derivatives (d/dq0 - i d/dp0) of the
/// flow; Z = dzQ + i dzP enters the amplitude ODE and must stay invertible.
struct TrajectoryState {
    double t = 0.0;
    int l = 0; // current surface index, 0 or 1
    Eigen::VectorXd Q;
    Eigen::VectorXd P;
    double S = 0.0;
    Complex A = 1.0;
    Eigen::MatrixXcd dzQ;
    Eigen::MatrixXcd dzP;

    int dimension() const { return static_cast<int>(Q.size()); }
};

/// Time derivative of the continuous fields (t advances at rate 1, l is
/// piecewise constant).
struct TrajectoryDerivative {
    Eigen::VectorXd dQ;
    Eigen::VectorXd dP;
    double dS = 0.0;
    Complex dA = 0.0;
    Eigen::MatrixXcd dDzQ;
    Eigen::MatrixXcd dDzP;
};

struct HopEvent {
    double time = 0.0;
    int fromSurface = 0;
    int toSurface = 1;
    Complex couplingValue = 0.0; // V_{to,from}(Q) at the hop
    double couplingMagnitude = 0.0;
    double rateValue = 0.0; // lambda(Q) at the hop, under the rate model in force
};

enum class RateModel { Standard, GapModified };

struct TrajectoryRecord {
    TrajectoryState finalState;
    std::vector<HopEvent> hops;
    double rateIntegral = 0.0; // int_0^T lambda(Q_s) ds, accumulated per step
    Complex initialA = 0.0;
    std::uint64_t seedTag = 0;
};

struct EngineParams {
    double finalTime = 1.0;
    double dt = 1e-3;
    double eps = 0.1;
    double delta = 0.0;
    RateModel rateModel = RateModel::Standard;
    double probabilityCap = 0.1;
};

/// State at time 0 for a sampled phase-space point: S = 0, dzQ = I,
/// dzP = -iI (so Z(0) = 2I), surface 0.
TrajectoryState initial_state(const Eigen::VectorXd& q0, const Eigen::VectorXd& p0, Complex a0);

/// Off-diagonal jump rate at the state's position. Standard:
/// (delta/eps)|V01|. GapModified: (delta/eps)|V01/(V00-V11)| where the gap
/// exceeds 1, else the standard rate.
double hop_rate(const TrajectoryState& state, const DiabaticPotential& potential, double delta,
                double eps, RateModel model);

/// Reusable integrator holding all scratch buffers, so stepping allocates
/// nothing. One instance per worker thread.
class TrajectoryIntegrator {
public:
    explicit TrajectoryIntegrator(const DiabaticPotential& potential);

    /// Right-hand side of the coupled (Q,P,S,A,dzQ,dzP) system on the current
    /// surface. Throws NumericalError if |det Z| <= 1e-12.
    void rhs(const TrajectoryState& state, TrajectoryDerivative& d);

    /// Classical RK4 update of the continuous fields; l unchanged.
    void step(TrajectoryState& state, double dt);

private:
    const DiabaticPotential* pot_;
    int m_;
    TrajectoryDerivative k1_, k2_, k3_, k4_;
    TrajectoryState tmp_;
    Eigen::VectorXd grad_;
    Eigen::MatrixXd hess_;
    Eigen::MatrixXcd hessC_, Z_, QH_, trArg_, solveBuf_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
};

/// Allocating conveniences around TrajectoryIntegrator.
TrajectoryDerivative ode_rhs(const TrajectoryState& state, const DiabaticPotential& potential);
TrajectoryState rk4_step(const TrajectoryState& state, double dt,
                         const DiabaticPotential& potential);

/// Marches RK4 steps to finalTime. Each step consumes one uniform variate;
/// a hop fires when u < dt*lambda(Q) with lambda evaluated at the step-start
/// position, flips l at the step boundary, and leaves every other field
/// continuous. Throws NumericalError if a step's hop probability exceeds the
/// cap or Z becomes singular.
TrajectoryRecord evolve_trajectory(const TrajectoryState& init, const EngineParams& params,
                                   const DiabaticPotential& potential, UniformStream& rng,
                                   std::uint64_t seedTag = 0);

} // namespace fgash::traj

#endif
