#include "fgash/wavefunction.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fgash::wf {

namespace {

std::size_t total_points(int m, int n) {
    double p = std::pow(double(n), m);
    require(p >= 1 && p <= 5e8, "wave-function grid size out of range");
    return static_cast<std::size_t>(p);
}

void check_same_grid(const WaveFunctionGrid& a, const WaveFunctionGrid& b) {
    require(a.m == b.m && a.n == b.n && std::abs(a.a - b.a) < 1e-12 &&
                std::abs(a.b - b.b) < 1e-12,
            "wave-function grids do not match");
}

} // namespace

void WaveFunctionGrid::point(std::size_t flat, Eigen::VectorXd& x) const {
    x.resize(m);
    std::size_t rest = flat;
    for (int d = m - 1; d >= 0; --d) {
        x[d] = coord(static_cast<int>(rest % n));
        rest /= n;
    }
}

WaveFunctionGrid make_grid(int m, double a, double b, int n, double eps) {
    require(m >= 1, "grid dimension must be >= 1");
    require(n >= 2, "grid needs >= 2 points per axis");
    require(b > a, "grid interval must be nonempty");
    WaveFunctionGrid g;
    g.m = m;
    g.a = a;
    g.b = b;
    g.n = n;
    g.eps = eps;
    const std::size_t total = total_points(m, n);
    g.u0.assign(total, Complex(0, 0));
    g.u1.assign(total, Complex(0, 0));
    return g;
}

double l2_norm(const WaveFunctionGrid& grid, Component c) {
    double acc = 0.0;
    if (c != Component::One)
        for (const Complex& v : grid.u0) acc += std::norm(v);
    if (c != Component::Zero)
        for (const Complex& v : grid.u1) acc += std::norm(v);
    return std::sqrt(acc * std::pow(grid.dx(), grid.m));
}

double l2_error_component(const WaveFunctionGrid& a, const WaveFunctionGrid& b, Component c,
                          bool relative) {
    check_same_grid(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (c != Component::One) acc += std::norm(a.u0[i] - b.u0[i]);
        if (c != Component::Zero) acc += std::norm(a.u1[i] - b.u1[i]);
    }
    double err = std::sqrt(acc * std::pow(a.dx(), a.m));
    if (relative) {
        const double ref = l2_norm(b, c);
        require(ref > 0.0, "relative L2 error against a zero reference");
        err /= ref;
    }
    return err;
}

double l2_error(const WaveFunctionGrid& a, const WaveFunctionGrid& b, bool relative) {
    return l2_error_component(a, b, Component::Both, relative);
}

double transition_rate(const WaveFunctionGrid& uT, double u0norm) {
    require(u0norm > 0.0, "transition_rate: u0norm must be positive");
    const double n1 = l2_norm(uT, Component::One);
    return n1 * n1 / (u0norm * u0norm);
}

WaveFunctionGrid sample_packet(const initial::GaussianWavePacket& packet, double a, double b,
                               int n, double eps) {
    require(packet.dimension() == 1, "sample_packet supports 1-D grids");
    WaveFunctionGrid g = make_grid(1, a, b, n, eps);
    Eigen::VectorXd x(1);
    for (int i = 0; i < n; ++i) {
        x[0] = g.coord(i);
        g.u0[i] = packet.evaluate(x, eps);
    }
    return g;
}

namespace {

void append_num(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

} // namespace

std::string to_csv(const WaveFunctionGrid& grid) {
    std::string out;
    if (grid.m == 1) {
        out += "x,re_u0,im_u0,re_u1,im_u1,stderr0,stderr1\n";
    } else {
        for (int d = 0; d < grid.m; ++d) out += "x" + std::to_string(d) + ",";
        out += "re_u0,im_u0,re_u1,im_u1,stderr0,stderr1\n";
    }
    Eigen::VectorXd x;
    const bool haveErr = grid.stderr0.size() == grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.point(i, x);
        for (int d = 0; d < grid.m; ++d) {
            append_num(out, x[d]);
            out += ',';
        }
        append_num(out, grid.u0[i].real());
        out += ',';
        append_num(out, grid.u0[i].imag());
        out += ',';
        append_num(out, grid.u1[i].real());
        out += ',';
        append_num(out, grid.u1[i].imag());
        out += ',';
        append_num(out, haveErr ? grid.stderr0[i] : 0.0);
        out += ',';
        append_num(out, haveErr ? grid.stderr1[i] : 0.0);
        out += '\n';
    }
    return out;
}

void write_csv(const WaveFunctionGrid& grid, std::ostream& out) { out << to_csv(grid); }

void write_csv_file(const WaveFunctionGrid& grid, const std::string& path) {
    std::ofstream f(path);
    require(f.good(), "cannot open '" + path + "' for writing");
    f << to_csv(grid);
}

WaveFunctionGrid read_csv(std::istream& in) {
    std::string line;
    // '#' lines carry provenance (reference cache); skip them.
    do {
        require(static_cast<bool>(std::getline(in, line)), "empty CSV");
    } while (!line.empty() && line.front() == '#');
    require(line.rfind("x,", 0) == 0, "unsupported CSV header (expected 1-D wave-function file)");

    std::vector<double> xs;
    std::vector<Complex> u0, u1;
    std::vector<double> e0, e1;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        std::istringstream row(line);
        double vals[7] = {0, 0, 0, 0, 0, 0, 0};
        char comma;
        for (int k = 0; k < 7; ++k) {
            row >> vals[k];
            if (k < 6) row >> comma;
        }
        require(!row.fail(), "malformed CSV row: " + line);
        xs.push_back(vals[0]);
        u0.emplace_back(vals[1], vals[2]);
        u1.emplace_back(vals[3], vals[4]);
        e0.push_back(vals[5]);
        e1.push_back(vals[6]);
    }
    require(xs.size() >= 2, "CSV holds fewer than two grid points");
    const double dx = xs[1] - xs[0];
    require(dx > 0, "CSV grid is not increasing");
    for (std::size_t i = 1; i < xs.size(); ++i)
        require(std::abs(xs[i] - xs[0] - double(i) * dx) < 1e-9 * std::max(1.0, std::abs(xs[i])),
                "CSV grid is not uniform");

    WaveFunctionGrid g;
    g.m = 1;
    g.a = xs[0];
    g.n = static_cast<int>(xs.size());
    g.b = xs[0] + g.n * dx;
    g.u0 = std::move(u0);
    g.u1 = std::move(u1);
    g.stderr0 = std::move(e0);
    g.stderr1 = std::move(e1);
    return g;
}

WaveFunctionGrid read_csv_file(const std::string& path) {
    std::ifstream f(path);
    require(f.good(), "cannot open '" + path + "' for reading");
    return read_csv(f);
}

} // namespace fgash::wf
