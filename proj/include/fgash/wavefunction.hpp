#ifndef FGASH_WAVEFUNCTION_HPP
#define FGASH_WAVEFUNCTION_HPP

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "fgash/core.hpp"
#include "fgash/initial_data.hpp"

namespace fgash::wf {

/// Uniform tensor grid on [a,b)^m (periodic convention: x_i = a + i dx with
/// dx = (b-a)/n, endpoint excluded) holding the two complex components.
/// stderr0/stderr1 carry per-point Monte Carlo standard errors when the grid
/// came out of the estimator; they are empty for deterministic solutions.
struct WaveFunctionGrid {
    int m = 1;
    double a = -1.0;
    double b = 1.0;
    int n = 0; // points per axis
    double eps = 0.0;
    std::vector<Complex> u0, u1;
    std::vector<double> stderr0, stderr1;

    double dx() const { return (b - a) / n; }
    std::size_t size() const { return u0.size(); }
    double coord(int i) const { return a + i * dx(); }
    /// Coordinates of a flat row-major index.
    void point(std::size_t flat, Eigen::VectorXd& x) const;
};

WaveFunctionGrid make_grid(int m, double a, double b, int n, double eps);

enum class Component { Zero, One, Both };

/// Discrete L2 norm, weighted by dx^m.
double l2_norm(const WaveFunctionGrid& grid, Component c = Component::Both);

/// ||a - b||_2 over both components; with relative=true divided by ||b||_2.
double l2_error(const WaveFunctionGrid& a, const WaveFunctionGrid& b, bool relative);
double l2_error_component(const WaveFunctionGrid& a, const WaveFunctionGrid& b, Component c,
                          bool relative);

/// R = ||u1(T)||^2 / u0norm^2 where u0norm is the L2 norm of the initial
/// first component.
double transition_rate(const WaveFunctionGrid& uT, double u0norm);

/// Samples the packet into component 0 (component 1 zero), as initial data
/// for the reference solver.
WaveFunctionGrid sample_packet(const initial::GaussianWavePacket& packet, double a, double b,
                               int n, double eps);

/// CSV with columns x, re_u0, im_u0, re_u1, im_u1, stderr0, stderr1
/// (x0..x{m-1} for m > 1). Deterministic %.17g formatting.
void write_csv(const WaveFunctionGrid& grid, std::ostream& out);
std::string to_csv(const WaveFunctionGrid& grid);
void write_csv_file(const WaveFunctionGrid& grid, const std::string& path);

/// Reads the 1-D CSV format back (stderr columns optional).
WaveFunctionGrid read_csv(std::istream& in);
WaveFunctionGrid read_csv_file(const std::string& path);

} // namespace fgash::wf

#endif
