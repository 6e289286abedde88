#ifndef FGASH_INITIAL_DATA_HPP
#define FGASH_INITIAL_DATA_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "fgash/core.hpp"

namespace fgash::initial {

/// Gaussian wave packet  u0(x) = prefactor * exp(-alpha |x-center|^2)
///                                          * exp((i/eps) momentum.(x-center)).
struct GaussianWavePacket {
    double alpha = 1.0;
    Eigen::VectorXd center;
    Eigen::VectorXd momentum;
    Complex prefactor = 1.0;

    int dimension() const { return static_cast<int>(center.size()); }
    Complex evaluate(const Eigen::VectorXd& x, double eps) const;
};

/// Initial trajectory amplitude (the FBI-type transform of u0):
///   A0(q0,p0) = 2^{m/2} \int u0(y) exp((i/eps)(-p0.(y-q0) + (i/2)|y-q0|^2)) dy.
/// Tensor-product trapezoid over the window where the Gaussian kernel factor
/// exp(-|y-q0|^2/(2 eps)) exceeds 1e-16, with nodesPerSqrtEps nodes per
/// sqrt(eps) of window length (>= 16).
Complex compute_a0_quadrature(const std::function<Complex(const Eigen::VectorXd&)>& u0, int m,
                              const Eigen::VectorXd& q0, const Eigen::VectorXd& p0, double eps,
                              int nodesPerSqrtEps = 16);

/// Closed form of the same integral for a Gaussian packet
/// (Gaussian x Gaussian x plane wave).
Complex analytic_a0_gaussian(const GaussianWavePacket& packet, const Eigen::VectorXd& q0,
                             const Eigen::VectorXd& p0, double eps);

/// Phase-space box and resolution for the amplitude table. Empty half-width
/// vectors request the adaptive box (boundary |A0| < 1e-6 max; Gaussian
/// packets only).
struct TableSpec {
    int pointsPerAxis = 64;
    Eigen::VectorXd qHalfWidth; // size m, or empty for adaptive
    Eigen::VectorXd pHalfWidth;
    double supportCut = 1e-6; // sampler support threshold, relative to max|A0|
};

/// A0 tabulated on a cell-centered tensor grid over the (q0,p0) box.
/// Immutable after construction.
class AmplitudeTable {
public:
    int dimension() const { return m_; }
    int points_per_axis() const { return n_; }
    std::size_t size() const { return values_.size(); }
    double cell_volume() const { return cellVolume_; }
    double max_abs() const { return maxAbs_; }
    double support_cut() const { return supportCut_; }
    /// C_N = (2 pi eps)^{-3m/2} sum |A0| cellVolume, cached at build time.
    double normalization() const { return cn_; }
    double eps() const { return eps_; }

    Complex value(std::size_t flat) const { return values_[flat]; }
    const std::vector<Complex>& values() const { return values_; }

    /// Cell-center coordinates of a flat index.
    void point(std::size_t flat, Eigen::VectorXd& q0, Eigen::VectorXd& p0) const;

    const Eigen::VectorXd& q_center() const { return qCenter_; }
    const Eigen::VectorXd& p_center() const { return pCenter_; }
    const Eigen::VectorXd& q_half() const { return qHalf_; }
    const Eigen::VectorXd& p_half() const { return pHalf_; }

    friend AmplitudeTable build_amplitude_table(const GaussianWavePacket&, double,
                                                const TableSpec&);
    friend AmplitudeTable
    build_amplitude_table_quadrature(const std::function<Complex(const Eigen::VectorXd&)>&, int,
                                     double, const Eigen::VectorXd&, const Eigen::VectorXd&,
                                     const Eigen::VectorXd&, const Eigen::VectorXd&,
                                     const TableSpec&);

private:
    AmplitudeTable() = default;
    static AmplitudeTable make_shell(int m, double eps, const Eigen::VectorXd& qCenter,
                                     const Eigen::VectorXd& pCenter, const Eigen::VectorXd& qHalf,
                                     const Eigen::VectorXd& pHalf, const TableSpec& spec);
    void finalize(double eps);

    int m_ = 0;
    int n_ = 0;
    double eps_ = 0.0;
    Eigen::VectorXd qCenter_, pCenter_, qHalf_, pHalf_;
    Eigen::VectorXd qMin_, pMin_, qStep_, pStep_;
    std::vector<Complex> values_;
    double cellVolume_ = 0.0;
    double maxAbs_ = 0.0;
    double supportCut_ = 1e-6;
    double cn_ = 0.0;
};

/// Analytic-A0 table for a Gaussian packet; box adaptive unless spec'd.
AmplitudeTable build_amplitude_table(const GaussianWavePacket& packet, double eps,
                                     const TableSpec& spec = {});

/// Quadrature-A0 table for arbitrary initial data; box must be given.
AmplitudeTable build_amplitude_table_quadrature(
    const std::function<Complex(const Eigen::VectorXd&)>& u0, int m, double eps,
    const Eigen::VectorXd& qCenter, const Eigen::VectorXd& pCenter, const Eigen::VectorXd& qHalf,
    const Eigen::VectorXd& pHalf, const TableSpec& spec = {});

/// Recompute C_N from the table entries (discretization of the phase-space
/// integral of |A0|).
double normalization_constant(const AmplitudeTable& table, double eps);

struct SamplePoint {
    Eigen::VectorXd q0;
    Eigen::VectorXd p0;
    Complex a0;
    std::size_t cell;
};

/// Discrete inverse-CDF sampler over cells with probability proportional to
/// |A0| cellVolume. Cells below supportCut * max|A0| are excluded. Holds its
/// own RNG; not shareable across concurrent workers.
class PhaseSpaceSampler {
public:
    PhaseSpaceSampler(const AmplitudeTable& table, std::uint64_t seed);
    SamplePoint draw();
    std::size_t support_size() const { return cells_.size(); }
    /// Probability of drawing a given support cell (for goodness-of-fit tests).
    double cell_probability(std::size_t supportIndex) const;
    std::size_t support_cell(std::size_t supportIndex) const { return cells_[supportIndex]; }

private:
    const AmplitudeTable* table_;
    std::vector<std::size_t> cells_; // support cell flat indices
    std::vector<double> cdf_;        // cumulative |A0| weights over support
    SeededStream rng_;
};

PhaseSpaceSampler build_sampler(const AmplitudeTable& table, std::uint64_t seed);

} // namespace fgash::initial

#endif
