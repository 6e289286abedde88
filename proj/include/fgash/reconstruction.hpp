#ifndef FGASH_RECONSTRUCTION_HPP
#define FGASH_RECONSTRUCTION_HPP

#include <vector>

#include "fgash/trajectory.hpp"
#include "fgash/wavefunction.hpp"

namespace fgash::recon {

using traj::TrajectoryRecord;
using wf::WaveFunctionGrid;

/// x-independent part of the estimator integrand Upsilon: the full per-record
/// contribution to component `parity` is value * exp(i Theta_T(x)/eps).
struct TrajectoryWeight {
    Complex value = 0.0;
    int parity = 0; // hop count mod 2; even -> component 0, odd -> component 1
};

/// Importance-sampling weight of one completed trajectory,
///   (-i)^n prod_j [ V_{l l'}(Q_{t_j}) (delta/eps) / lambda(Q_{t_j}) ]
///        * (A_T / |A0|) * exp(rateIntegral),
/// which reduces to the unit-phase per-hop factor V/|V| under the standard
/// rate and keeps the estimator unbiased under the gap-modified rate.
TrajectoryWeight trajectory_weight(const TrajectoryRecord& record, double delta, double eps);

/// Streaming per-grid-point first/second moments of the estimator, mergeable
/// across workers. Every added record counts toward N; records routed to the
/// other component (or filtered by maxHops) contribute zero samples, which is
/// exactly what the indicator in the trajectory average prescribes.
class Accumulator {
public:
    Accumulator(int m, double a, double b, int n, double eps);

    /// Deposits one record's Gaussian bump, truncated at radius 8 sqrt(eps).
    /// maxHops >= 0 restricts deposits to records with at most that many hops
    /// (the hop-truncated estimator); others still count toward N.
    void add(const TrajectoryRecord& record, double delta, double eps, int maxHops = -1);

    void merge(const Accumulator& other);

    /// Monte Carlo estimate C_N * mean with per-point standard errors.
    WaveFunctionGrid finalize(double cn) const;

    long count() const { return count_; }

private:
    WaveFunctionGrid geom_;
    long count_ = 0;
    std::vector<Complex> sum_[2];
    std::vector<double> sumSq_[2];
};

/// One-call reconstruction over a record ensemble (all records must share the
/// final time). Errors on an empty ensemble.
WaveFunctionGrid reconstruct(const std::vector<TrajectoryRecord>& records, int m, double a,
                             double b, int n, double cn, double delta, double eps,
                             int maxHops = -1);

/// Aggregate standard error: L2 norm of the per-point stderr field of one
/// component (empty stderr -> 0).
double stderr_l2(const WaveFunctionGrid& grid, wf::Component c);

/// Adds value * exp(i Theta/eps) to `target` on the grid points within
/// radius 8 sqrt(eps) of Q, where Theta = S + P.(x-Q) + (i/2)|x-Q|^2.
/// When sumSq is given, |contribution|^2 is accumulated alongside.
void deposit_bump(const WaveFunctionGrid& geom, std::vector<Complex>& target, Complex value,
                  const Eigen::VectorXd& Q, const Eigen::VectorXd& P, double S, double eps,
                  std::vector<double>* sumSq = nullptr);

} // namespace fgash::recon

#endif
