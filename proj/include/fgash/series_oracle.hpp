#ifndef FGASH_SERIES_ORACLE_HPP
#define FGASH_SERIES_ORACLE_HPP

#include "fgash/initial_data.hpp"
#include "fgash/potentials.hpp"
#include "fgash/wavefunction.hpp"

namespace fgash::oracle {

using initial::AmplitudeTable;
using potentials::DiabaticPotential;
using wf::WaveFunctionGrid;

struct QuadratureSpec {
    int t1Nodes = 64; // minimum composite-trapezoid nodes for the hop time
    int workers = 0;  // 0 -> hardware concurrency
};

/// Deterministic quadrature term of the surface-hopping ansatz for hop count
/// n in {0,1}:
///   (-i delta/eps)^n (2 pi eps)^{-3m/2} \int dq0 dp0 \int_{t1} V_{10}(Q_{t1})
///       A_T exp(i Theta_T/eps),
/// with the trajectory re-integrated deterministically (surface 0 on [0,t1],
/// continuity across the hop, surface 1 on [t1,T]); n = 0 carries no time
/// integral and lands on component 0, n = 1 on component 1. The table supplies
/// both the A0 values and the phase-space quadrature; dt is snapped so the
/// hop-time nodes align with the RK4 steps (same integrator as the engine).
struct AnsatzTerm {
    int hopCount = 0;
    WaveFunctionGrid grid;
};

AnsatzTerm fga_term(int n, const AmplitudeTable& table, const DiabaticPotential& potential,
                    double delta, double eps, double T, double dt, double a, double b,
                    int gridPoints, const QuadratureSpec& spec = {});

} // namespace fgash::oracle

#endif
