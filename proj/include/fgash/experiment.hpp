#ifndef FGASH_EXPERIMENT_HPP
#define FGASH_EXPERIMENT_HPP

#include <json.hpp>
#include <optional>

#include "fgash/config.hpp"
#include "fgash/reconstruction.hpp"
#include "fgash/spectral.hpp"

namespace fgash::harness {

using config::SimulationConfig;

/// Worker-count resolution: explicit request, else FGASH_WORKERS, else
/// hardware concurrency.
int resolve_workers(int requested = 0);

/// Hop bookkeeping aggregated over an ensemble.
struct HopStats {
    long totalHops = 0;
    long maxHops = 0;
    std::vector<long> histogram; // histogram[k] = #trajectories with k hops

    void add(std::size_t hops);
    void merge(const HopStats& other);
};

struct EnsembleResult {
    recon::Accumulator acc;
    HopStats hops;
};

/// Samples `n` initial points from the table and evolves them concurrently
/// (static index ranges, per-trajectory derived RNG streams, associative
/// merge in worker order). maxHops passes through to the estimator filter.
EnsembleResult run_ensemble(const SimulationConfig& cfg,
                            const potentials::DiabaticPotential& pot,
                            const initial::AmplitudeTable& table, long n, std::uint64_t seed,
                            int workers, int maxHops = -1);

/// Spectral reference for the config's experiment, cached on disk when
/// cacheDir is nonempty (key: model+params, packet, eps, delta, T, dt, grid).
wf::WaveFunctionGrid reference_solution(const SimulationConfig& cfg,
                                        const potentials::DiabaticPotential& pot,
                                        const std::string& cacheDir = "");

struct RunArtifacts {
    SimulationConfig cfg; // with auto fields filled in
    wf::WaveFunctionGrid mc;
    std::optional<wf::WaveFunctionGrid> reference;
    HopStats hops;
    double cn = 0.0;
    double u0NormInitial = 0.0;
    nlohmann::json summary;
};

/// Full experiment: table, sampling, parallel trajectories, reconstruction,
/// optional reference + errors; writes wavefunction.csv / reference.csv /
/// summary.json when cfg.outputDir is set.
RunArtifacts run_experiment(SimulationConfig cfg, int workers = 0);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slopeStdErr = 0.0;
    double residual = 0.0; // sqrt(sum of squared residuals / dof)
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct StudyResult {
    std::vector<double> sweep;
    std::vector<double> metric;
    std::vector<int> exceeded; // per-point cap marker (ntraj/avoided studies)
    double slope = 0.0;
    double intercept = 0.0;
    double slopeHalfWidth = 0.0; // bootstrap or least-squares CI half-width
    double residual = 0.0;
    nlohmann::json detail;
};

/// Monte Carlo error vs trajectory count: slope of log error against log N,
/// errors averaged over seed replicates, CI via bootstrap over replicates.
/// selfReference=false compares against the spectral solution.
StudyResult study_convergence(const SimulationConfig& base, const std::vector<long>& Ns,
                              int replicates, int workers = 0, bool selfReference = false,
                              const std::string& cacheDir = "");

/// Transition rate R vs delta (weak-coupling regime): slope of log R against
/// log delta over at least a decade.
StudyResult study_marcus(const SimulationConfig& base, const std::vector<double>& deltas,
                         long trajectoriesPerPoint = 0, int workers = 0,
                         const std::string& cacheDir = "");

/// Smallest trajectory count reaching the error threshold, per delta
/// (doubling + geometric bisection, median over seed replicates).
StudyResult study_trajectory_scaling(const SimulationConfig& base,
                                     const std::vector<double>& deltas, double errorThreshold,
                                     long nCap = 1000000, int replicates = 3, int workers = 0,
                                     const std::string& cacheDir = "");

/// Landau-Zener stress sweep: delta = sqrt(eps), packet width sqrt(eps),
/// T = 3 sqrt(eps); reports N-to-threshold per eps.
StudyResult study_avoided_crossing(const SimulationConfig& base,
                                   const std::vector<double>& epsValues, double errorThreshold,
                                   long nCap = 1000000, int replicates = 3, int workers = 0,
                                   const std::string& cacheDir = "");

/// Per-eps config used by the avoided-crossing study (exposed for tests).
SimulationConfig make_avoided_config(const SimulationConfig& base, double eps);

/// ||u_c||^2 with the Monte Carlo variance bias removed:
/// sum (|u|^2 - stderr^2) dx, clamped at zero.
double norm2_debiased(const wf::WaveFunctionGrid& grid, wf::Component c);

} // namespace fgash::harness

#endif
