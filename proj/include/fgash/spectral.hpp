#ifndef FGASH_SPECTRAL_HPP
#define FGASH_SPECTRAL_HPP

#include "fgash/potentials.hpp"
#include "fgash/wavefunction.hpp"

namespace fgash::spectral {

using potentials::DiabaticPotential;
using wf::WaveFunctionGrid;

/// Applies exp(-i tau V(x)/eps) pointwise, with V(x) the full 2x2 Hermitian
/// matrix including delta*V01. Exact per point via the trace/traceless
/// decomposition H = c I + d.sigma:
///   exp(-i tau H/eps) = e^{-i tau c/eps} (cos(theta) I - i sin(theta) d.sigma/|d|),
/// theta = tau |d|/eps, with a series branch for |d| -> 0.
WaveFunctionGrid potential_step(const WaveFunctionGrid& u, const DiabaticPotential& V,
                                double delta, double tau, double eps);

/// Multiplies each Fourier mode by exp(-i tau eps k^2 / 2) (exact free
/// evolution on the periodic grid). n must be a power of two.
WaveFunctionGrid kinetic_step(const WaveFunctionGrid& u, double tau, double eps);

/// Strang composition (half kinetic, full potential, half kinetic) iterated
/// to T; a final partial step is allowed, and T < 0 with dt < 0 runs the
/// dynamics backward. Throws NumericalError if the solution mass within
/// 10 sqrt(eps) of the boundary exceeds 1e-8 of the total (aliasing guard).
WaveFunctionGrid solve(const WaveFunctionGrid& u_in, const DiabaticPotential& V, double delta,
                       double T, double dt, double eps);

/// Power-of-two grid size that resolves phase oscillations up to momentum
/// pmax at the given eps on [a,b], with safety margin.
int suggest_grid_size(double a, double b, double eps, double pmax, double packetAlpha);

} // namespace fgash::spectral

#endif
