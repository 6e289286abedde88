#ifndef FGASH_CONFIG_HPP
#define FGASH_CONFIG_HPP

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <string>

#include "fgash/core.hpp"
#include "fgash/initial_data.hpp"
#include "fgash/potentials.hpp"
#include "fgash/trajectory.hpp"

namespace fgash::config {

/// Flat key-value run description, sections [potential], [packet], [run],
/// [grid]. Parsed, validated, and serialized back in canonical form.
struct SimulationConfig {
    // [potential]
    std::string model = "simple";
    std::map<std::string, double> potentialParams;

    // [packet]
    double alpha = 12.5;
    Eigen::VectorXd center = Eigen::VectorXd::Constant(1, -1.5);
    Eigen::VectorXd momentum = Eigen::VectorXd::Constant(1, 2.0);

    // [run]
    double eps = 0.04;
    double delta = 0.04;
    double finalTime = 1.2;
    double dt = 0.0; // 0 -> auto: min(eps/10, cap-limited)
    long trajectories = 5000;
    std::uint64_t masterSeed = 1;
    traj::RateModel rateModel = traj::RateModel::Standard;
    double probabilityCap = 0.1;
    bool computeReference = true;
    double referenceDt = 0.0; // 0 -> eps/32

    // [grid]
    double xmin = -8.0;
    double xmax = 8.0;
    int points = 0;      // 0 -> auto (power of two, dx <= sqrt(eps)/8 and
                         //            spectral resolution)
    int phasePoints = 64; // amplitude-table points per phase-space axis
    double qHalfWidth = 0.0; // 0 -> adaptive box
    double pHalfWidth = 0.0;

    std::string outputDir;

    int dimension() const { return static_cast<int>(center.size()); }
};

SimulationConfig parse_config(const std::string& text);
SimulationConfig parse_config_file(const std::string& path);
std::string serialize_config(const SimulationConfig& cfg);

/// Fills the auto fields (dt, points, referenceDt) and checks the invariants:
/// positivity, probability-cap feasibility over a probe grid, and grid
/// resolution dx <= sqrt(eps)/8. Throws ContractError with a remediation hint.
void validate_config(SimulationConfig& cfg);

std::unique_ptr<potentials::DiabaticPotential> make_potential(const SimulationConfig& cfg);
initial::GaussianWavePacket make_packet(const SimulationConfig& cfg);
initial::TableSpec make_table_spec(const SimulationConfig& cfg);

/// Rate-model-aware jump rate at a bare position (used for cap feasibility
/// probing and by the engine through hop_rate).
double rate_at(const potentials::DiabaticPotential& pot, const Eigen::VectorXd& q, double delta,
               double eps, traj::RateModel model);

} // namespace fgash::config

#endif
