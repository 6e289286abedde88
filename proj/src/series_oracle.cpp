#include "fgash/series_oracle.hpp"

#include <cmath>
#include <thread>

#include "fgash/reconstruction.hpp"
#include "fgash/trajectory.hpp"

namespace fgash::oracle {

namespace {

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace

AnsatzTerm fga_term(int n, const AmplitudeTable& table, const DiabaticPotential& potential,
                    double delta, double eps, double T, double dt, double a, double b,
                    int gridPoints, const QuadratureSpec& spec) {
    require(n == 0 || n == 1, "fga_term supports hop counts 0 and 1 only");
    require(eps > 0.0 && T > 0.0 && dt > 0.0, "fga_term: eps, T, dt must be positive");
    require(table.dimension() == potential.dimension(), "fga_term: dimension mismatch");

    const int m = table.dimension();
    AnsatzTerm term;
    term.hopCount = n;
    term.grid = wf::make_grid(m, a, b, gridPoints, eps);
    if (n == 1 && delta == 0.0) return term; // prefactor delta kills the term

    // Snap dt so the final time is an exact number of RK4 steps, then place
    // the hop-time quadrature nodes on step boundaries.
    const long steps = std::max<long>(1, static_cast<long>(std::llround(T / dt)));
    const double h = T / steps;

    std::vector<long> nodes;
    if (n == 1) {
        const long stride = std::max<long>(1, steps / spec.t1Nodes);
        for (long k = 0; k <= steps; k += stride) nodes.push_back(k);
        if (nodes.back() != steps) nodes.push_back(steps);
    }
    std::vector<double> nodeWeight(nodes.size(), 0.0);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double prev = (j == 0) ? nodes[0] * h : nodes[j - 1] * h;
        const double next = (j + 1 == nodes.size()) ? nodes[j] * h : nodes[j + 1] * h;
        nodeWeight[j] = 0.5 * (next - prev);
    }

    const double prefactor = std::pow(2.0 * M_PI * eps, -1.5 * m) * table.cell_volume();
    const Complex hopFactor = Complex(0.0, -delta / eps); // (-i delta/eps) per hop

    const int workers = resolve_workers(spec.workers);
    const std::size_t cells = table.size();
    std::vector<std::vector<Complex>> partial0(workers), partial1(workers);

    auto worker = [&](int w) {
        partial0[w].assign(term.grid.size(), Complex(0, 0));
        partial1[w].assign(term.grid.size(), Complex(0, 0));
        const std::size_t lo = cells * w / workers;
        const std::size_t hi = cells * (w + 1) / workers;

        traj::TrajectoryIntegrator integ(potential);
        Eigen::VectorXd q0(m), p0(m);
        for (std::size_t cell = lo; cell < hi; ++cell) {
            const Complex a0 = table.value(cell);
            if (a0 == Complex(0.0, 0.0)) continue;
            table.point(cell, q0, p0);
            traj::TrajectoryState state = traj::initial_state(q0, p0, a0);

            if (n == 0) {
                for (long k = 0; k < steps; ++k) integ.step(state, h);
                recon::deposit_bump(term.grid, partial0[w], prefactor * state.A, state.Q, state.P,
                                    state.S, eps);
                continue;
            }

            // March on surface 0; at each node, branch to surface 1 with the
            // hop coefficient V_{10}(Q_{t1}) and continue to T.
            std::size_t nodeIdx = 0;
            for (long k = 0; k <= steps; ++k) {
                if (nodeIdx < nodes.size() && nodes[nodeIdx] == k) {
                    traj::TrajectoryState branch = state;
                    branch.l = 1;
                    const Complex coupling = potential.coupling_element(1, 0, branch.Q);
                    for (long kk = k; kk < steps; ++kk) integ.step(branch, h);
                    const Complex value =
                        hopFactor * coupling * nodeWeight[nodeIdx] * prefactor * branch.A;
                    recon::deposit_bump(term.grid, partial1[w], value, branch.Q, branch.P,
                                        branch.S, eps);
                    ++nodeIdx;
                }
                if (k < steps) integ.step(state, h);
            }
        }
    };

    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker, w);
    worker(0);
    for (std::thread& t : pool) t.join();

    std::vector<Complex>& target = (n == 0) ? term.grid.u0 : term.grid.u1;
    for (int w = 0; w < workers; ++w) {
        const std::vector<Complex>& part = (n == 0) ? partial0[w] : partial1[w];
        for (std::size_t i = 0; i < target.size(); ++i) target[i] += part[i];
    }
    return term;
}

} // namespace fgash::oracle
