#include "fgash/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fgash/spectral.hpp"

namespace fgash::config {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        require(pos == v.size(), "trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ContractError("config key '" + key + "': cannot parse number from '" + v + "'");
    }
}

long to_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        require(pos == v.size(), "trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ContractError("config key '" + key + "': cannot parse integer from '" + v + "'");
    }
}

Eigen::VectorXd to_vector(const std::string& key, const std::string& v) {
    std::istringstream in(v);
    std::vector<double> vals;
    double x;
    while (in >> x) vals.push_back(x);
    require(!vals.empty() && in.eof(), "config key '" + key + "': expected numbers, got '" + v + "'");
    return Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
}

std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_vector(const Eigen::VectorXd& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += fmt_num(v[i]);
    }
    return out;
}

bool next_pow2_ge(int& n, double target) {
    while (n < target) {
        if (n >= (1 << 24)) return false;
        n *= 2;
    }
    return true;
}

} // namespace

SimulationConfig parse_config(const std::string& text) {
    SimulationConfig cfg;
    cfg.potentialParams.clear();

    std::istringstream in(text);
    std::string line, section;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            require(line.back() == ']', "config line " + std::to_string(lineNo) +
                                            ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            require(section == "potential" || section == "packet" || section == "run" ||
                        section == "grid",
                    "config line " + std::to_string(lineNo) + ": unknown section [" + section +
                        "]");
            continue;
        }
        const auto eq = line.find('=');
        require(eq != std::string::npos,
                "config line " + std::to_string(lineNo) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        require(!key.empty() && !value.empty(),
                "config line " + std::to_string(lineNo) + ": empty key or value");

        if (section == "potential") {
            if (key == "model")
                cfg.model = value;
            else
                cfg.potentialParams[key] = to_double(key, value);
        } else if (section == "packet") {
            if (key == "alpha")
                cfg.alpha = to_double(key, value);
            else if (key == "center")
                cfg.center = to_vector(key, value);
            else if (key == "momentum")
                cfg.momentum = to_vector(key, value);
            else
                throw ContractError("unknown [packet] key '" + key + "'");
        } else if (section == "run") {
            if (key == "epsilon")
                cfg.eps = to_double(key, value);
            else if (key == "delta")
                cfg.delta = to_double(key, value);
            else if (key == "final_time")
                cfg.finalTime = to_double(key, value);
            else if (key == "dt")
                cfg.dt = to_double(key, value);
            else if (key == "trajectories")
                cfg.trajectories = to_long(key, value);
            else if (key == "master_seed")
                cfg.masterSeed = static_cast<std::uint64_t>(to_long(key, value));
            else if (key == "rate_model") {
                if (value == "standard")
                    cfg.rateModel = traj::RateModel::Standard;
                else if (value == "gap_modified")
                    cfg.rateModel = traj::RateModel::GapModified;
                else
                    throw ContractError("rate_model must be standard|gap_modified, got '" +
                                        value + "'");
            } else if (key == "probability_cap")
                cfg.probabilityCap = to_double(key, value);
            else if (key == "compute_reference")
                cfg.computeReference = (value == "true" || value == "1");
            else if (key == "reference_dt")
                cfg.referenceDt = to_double(key, value);
            else if (key == "output_dir")
                cfg.outputDir = value;
            else
                throw ContractError("unknown [run] key '" + key + "'");
        } else if (section == "grid") {
            if (key == "xmin")
                cfg.xmin = to_double(key, value);
            else if (key == "xmax")
                cfg.xmax = to_double(key, value);
            else if (key == "points")
                cfg.points = static_cast<int>(to_long(key, value));
            else if (key == "phase_points")
                cfg.phasePoints = static_cast<int>(to_long(key, value));
            else if (key == "q_halfwidth")
                cfg.qHalfWidth = to_double(key, value);
            else if (key == "p_halfwidth")
                cfg.pHalfWidth = to_double(key, value);
            else
                throw ContractError("unknown [grid] key '" + key + "'");
        } else {
            throw ContractError("config line " + std::to_string(lineNo) +
                                ": key outside any section");
        }
    }
    return cfg;
}

SimulationConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    require(f.good(), "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const SimulationConfig& cfg) {
    std::string out;
    out += "[potential]\n";
    out += "model = " + cfg.model + "\n";
    for (const auto& [k, v] : cfg.potentialParams) out += k + " = " + fmt_num(v) + "\n";
    out += "\n[packet]\n";
    out += "alpha = " + fmt_num(cfg.alpha) + "\n";
    out += "center = " + fmt_vector(cfg.center) + "\n";
    out += "momentum = " + fmt_vector(cfg.momentum) + "\n";
    out += "\n[run]\n";
    out += "epsilon = " + fmt_num(cfg.eps) + "\n";
    out += "delta = " + fmt_num(cfg.delta) + "\n";
    out += "final_time = " + fmt_num(cfg.finalTime) + "\n";
    if (cfg.dt > 0.0) out += "dt = " + fmt_num(cfg.dt) + "\n";
    out += "trajectories = " + std::to_string(cfg.trajectories) + "\n";
    out += "master_seed = " + std::to_string(cfg.masterSeed) + "\n";
    out += std::string("rate_model = ") +
           (cfg.rateModel == traj::RateModel::Standard ? "standard" : "gap_modified") + "\n";
    out += "probability_cap = " + fmt_num(cfg.probabilityCap) + "\n";
    out += std::string("compute_reference = ") + (cfg.computeReference ? "true" : "false") + "\n";
    if (cfg.referenceDt > 0.0) out += "reference_dt = " + fmt_num(cfg.referenceDt) + "\n";
    if (!cfg.outputDir.empty()) out += "output_dir = " + cfg.outputDir + "\n";
    out += "\n[grid]\n";
    out += "xmin = " + fmt_num(cfg.xmin) + "\n";
    out += "xmax = " + fmt_num(cfg.xmax) + "\n";
    if (cfg.points > 0) out += "points = " + std::to_string(cfg.points) + "\n";
    out += "phase_points = " + std::to_string(cfg.phasePoints) + "\n";
    if (cfg.qHalfWidth > 0.0) out += "q_halfwidth = " + fmt_num(cfg.qHalfWidth) + "\n";
    if (cfg.pHalfWidth > 0.0) out += "p_halfwidth = " + fmt_num(cfg.pHalfWidth) + "\n";
    return out;
}

std::unique_ptr<potentials::DiabaticPotential> make_potential(const SimulationConfig& cfg) {
    auto pot = potentials::make_potential(cfg.model, cfg.potentialParams);
    require(pot->dimension() == cfg.dimension(),
            "potential dimension " + std::to_string(pot->dimension()) +
                " does not match packet dimension " + std::to_string(cfg.dimension()));
    return pot;
}

initial::GaussianWavePacket make_packet(const SimulationConfig& cfg) {
    initial::GaussianWavePacket p;
    p.alpha = cfg.alpha;
    p.center = cfg.center;
    p.momentum = cfg.momentum;
    return p;
}

initial::TableSpec make_table_spec(const SimulationConfig& cfg) {
    initial::TableSpec spec;
    spec.pointsPerAxis = cfg.phasePoints;
    if (cfg.qHalfWidth > 0.0 && cfg.pHalfWidth > 0.0) {
        spec.qHalfWidth = Eigen::VectorXd::Constant(cfg.dimension(), cfg.qHalfWidth);
        spec.pHalfWidth = Eigen::VectorXd::Constant(cfg.dimension(), cfg.pHalfWidth);
    }
    return spec;
}

double rate_at(const potentials::DiabaticPotential& pot, const Eigen::VectorXd& q, double delta,
               double eps, traj::RateModel model) {
    if (delta == 0.0) return 0.0;
    const double coupling = std::abs(pot.v01(q));
    if (model == traj::RateModel::GapModified) {
        const double gap = std::abs(pot.v00(q) - pot.v11(q));
        if (gap > 1.0) return delta / eps * coupling / gap;
    }
    return delta / eps * coupling;
}

void validate_config(SimulationConfig& cfg) {
    require(cfg.eps > 0.0, "config: epsilon must be positive");
    require(cfg.delta >= 0.0, "config: delta must be nonnegative");
    require(cfg.finalTime > 0.0, "config: final_time must be positive");
    require(cfg.trajectories >= 1, "config: trajectories must be >= 1");
    require(cfg.alpha > 0.0, "config: packet alpha must be positive");
    require(cfg.dimension() >= 1, "config: packet center must have >= 1 entry");
    require(cfg.momentum.size() == cfg.center.size(),
            "config: packet momentum/center dimension mismatch");
    require(cfg.xmax > cfg.xmin, "config: grid interval is empty");
    require(cfg.probabilityCap > 0.0 && cfg.probabilityCap <= 1.0,
            "config: probability_cap must lie in (0,1]");
    require(cfg.phasePoints >= 2, "config: phase_points must be >= 2");

    auto pot = make_potential(cfg);

    // Probability-cap feasibility over a probe grid.
    double maxRate = 0.0;
    Eigen::VectorXd q = Eigen::VectorXd::Zero(cfg.dimension());
    const int probes = 4096;
    for (int i = 0; i < probes; ++i) {
        q[0] = cfg.xmin + (cfg.xmax - cfg.xmin) * (i + 0.5) / probes;
        maxRate = std::max(maxRate, rate_at(*pot, q, cfg.delta, cfg.eps, cfg.rateModel));
    }

    if (cfg.dt <= 0.0) {
        cfg.dt = cfg.eps / 10.0;
        if (maxRate > 0.0) cfg.dt = std::min(cfg.dt, 0.5 * cfg.probabilityCap / maxRate);
        const long steps = std::max<long>(1, static_cast<long>(std::ceil(cfg.finalTime / cfg.dt)));
        cfg.dt = cfg.finalTime / steps;
    }
    require(cfg.dt > 0.0, "config: dt must be positive");
    if (cfg.dt * maxRate > cfg.probabilityCap + 1e-12) {
        throw ContractError("config: per-step hop probability dt*lambda = " +
                            std::to_string(cfg.dt * maxRate) + " exceeds the cap " +
                            std::to_string(cfg.probabilityCap) +
                            "; reduce dt below " + std::to_string(cfg.probabilityCap / maxRate));
    }

    if (cfg.referenceDt <= 0.0) cfg.referenceDt = cfg.eps / 32.0;

    // Output grid: power of two, dx <= sqrt(eps)/8, and fine enough for the
    // spectral reference when one is requested.
    const double dxMax = std::sqrt(cfg.eps) / 8.0;
    if (cfg.points == 0) {
        int n = 256;
        require(next_pow2_ge(n, (cfg.xmax - cfg.xmin) / dxMax), "config: grid would be too large");
        if (cfg.computeReference) {
            // Momentum reach: sampled p0 spread plus energy gained from the
            // potential range over the domain.
            const double ap = 1.0 / (4.0 * cfg.eps * cfg.eps * cfg.alpha + 2.0 * cfg.eps);
            const double pSpread =
                cfg.pHalfWidth > 0.0 ? cfg.pHalfWidth : 1.05 * std::sqrt(13.8155 / ap);
            double vmin = 1e300, vmax = -1e300;
            for (int i = 0; i < probes; ++i) {
                q[0] = cfg.xmin + (cfg.xmax - cfg.xmin) * (i + 0.5) / probes;
                for (int l = 0; l < 2; ++l) {
                    const double v = pot->diag(l, q);
                    vmin = std::min(vmin, v);
                    vmax = std::max(vmax, v);
                }
            }
            const double p0max = cfg.momentum.cwiseAbs().maxCoeff() + pSpread;
            const double pmax = std::sqrt(p0max * p0max + 2.0 * std::max(0.0, vmax - vmin));
            const int ns =
                spectral::suggest_grid_size(cfg.xmin, cfg.xmax, cfg.eps, pmax, cfg.alpha);
            n = std::max(n, ns);
        }
        cfg.points = n;
    }
    require(cfg.points >= 2, "config: points must be >= 2");
    const double dx = (cfg.xmax - cfg.xmin) / cfg.points;
    if (dx > dxMax + 1e-15) {
        throw ContractError("config: grid spacing " + std::to_string(dx) +
                            " exceeds sqrt(eps)/8 = " + std::to_string(dxMax) +
                            "; increase points");
    }
}

} // namespace fgash::config
