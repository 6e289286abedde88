#include "fgash/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace fgash::harness {

namespace fs = std::filesystem;
using json = nlohmann::json;

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("FGASH_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void HopStats::add(std::size_t hops) {
    totalHops += static_cast<long>(hops);
    maxHops = std::max(maxHops, static_cast<long>(hops));
    if (histogram.size() <= hops) histogram.resize(hops + 1, 0);
    ++histogram[hops];
}

void HopStats::merge(const HopStats& other) {
    totalHops += other.totalHops;
    maxHops = std::max(maxHops, other.maxHops);
    if (histogram.size() < other.histogram.size()) histogram.resize(other.histogram.size(), 0);
    for (std::size_t k = 0; k < other.histogram.size(); ++k) histogram[k] += other.histogram[k];
}

EnsembleResult run_ensemble(const SimulationConfig& cfg,
                            const potentials::DiabaticPotential& pot,
                            const initial::AmplitudeTable& table, long n, std::uint64_t seed,
                            int workers, int maxHops) {
    require(n >= 1, "ensemble needs at least one trajectory");
    const int m = cfg.dimension();
    const int W = static_cast<int>(std::max<long>(1, std::min<long>(resolve_workers(workers), n)));

    // Draw every initial point up front from one sampler stream, so the
    // ensemble is identical no matter how it is later partitioned.
    std::vector<double> q0s(static_cast<std::size_t>(n) * m);
    std::vector<double> p0s(static_cast<std::size_t>(n) * m);
    std::vector<Complex> a0s(n);
    {
        initial::PhaseSpaceSampler sampler(table, splitmix64(seed ^ 0xC001D00Dull));
        for (long i = 0; i < n; ++i) {
            const initial::SamplePoint s = sampler.draw();
            for (int d = 0; d < m; ++d) {
                q0s[i * m + d] = s.q0[d];
                p0s[i * m + d] = s.p0[d];
            }
            a0s[i] = s.a0;
        }
    }

    traj::EngineParams params;
    params.finalTime = cfg.finalTime;
    params.dt = cfg.dt;
    params.eps = cfg.eps;
    params.delta = cfg.delta;
    params.rateModel = cfg.rateModel;
    params.probabilityCap = cfg.probabilityCap;

    std::vector<std::unique_ptr<recon::Accumulator>> accs(W);
    std::vector<HopStats> stats(W);
    std::exception_ptr firstError;
    std::mutex errorMutex;

    auto worker = [&](int w) {
        try {
            accs[w] = std::make_unique<recon::Accumulator>(m, cfg.xmin, cfg.xmax, cfg.points,
                                                           cfg.eps);
            const long lo = n * static_cast<long>(w) / W;
            const long hi = n * static_cast<long>(w + 1) / W;
            Eigen::VectorXd q0(m), p0(m);
            for (long i = lo; i < hi; ++i) {
                for (int d = 0; d < m; ++d) {
                    q0[d] = q0s[i * m + d];
                    p0[d] = p0s[i * m + d];
                }
                SeededStream rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
                const traj::TrajectoryRecord rec = traj::evolve_trajectory(
                    traj::initial_state(q0, p0, a0s[i]), params, pot, rng,
                    static_cast<std::uint64_t>(i));
                accs[w]->add(rec, cfg.delta, cfg.eps, maxHops);
                stats[w].add(rec.hops.size());
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(errorMutex);
            if (!firstError) firstError = std::current_exception();
        }
    };

    std::vector<std::thread> pool;
    for (int w = 1; w < W; ++w) pool.emplace_back(worker, w);
    worker(0);
    for (std::thread& t : pool) t.join();
    if (firstError) std::rethrow_exception(firstError);

    EnsembleResult out{std::move(*accs[0]), std::move(stats[0])};
    for (int w = 1; w < W; ++w) {
        out.acc.merge(*accs[w]);
        out.hops.merge(stats[w]);
    }
    return out;
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string reference_key(const SimulationConfig& cfg) {
    std::ostringstream key;
    key.precision(17);
    key << "model=" << cfg.model;
    for (const auto& [k, v] : cfg.potentialParams) key << "," << k << "=" << v;
    key << ";alpha=" << cfg.alpha << ";center=";
    for (Eigen::Index i = 0; i < cfg.center.size(); ++i) key << cfg.center[i] << " ";
    key << ";momentum=";
    for (Eigen::Index i = 0; i < cfg.momentum.size(); ++i) key << cfg.momentum[i] << " ";
    key << ";eps=" << cfg.eps << ";delta=" << cfg.delta << ";T=" << cfg.finalTime
        << ";dt=" << cfg.referenceDt << ";a=" << cfg.xmin << ";b=" << cfg.xmax
        << ";n=" << cfg.points;
    return key.str();
}

} // namespace

wf::WaveFunctionGrid reference_solution(const SimulationConfig& cfg,
                                        const potentials::DiabaticPotential& pot,
                                        const std::string& cacheDir) {
    require(cfg.dimension() == 1, "the spectral reference is 1-D");
    const std::string key = reference_key(cfg);
    fs::path cachePath;
    if (!cacheDir.empty()) {
        char name[64];
        std::snprintf(name, sizeof name, "ref_%016llx.csv",
                      static_cast<unsigned long long>(fnv1a(key)));
        cachePath = fs::path(cacheDir) / name;
        if (fs::exists(cachePath)) {
            std::ifstream f(cachePath);
            std::string l1, l2;
            std::getline(f, l1);
            std::getline(f, l2);
            if (l2 == "# key: " + key) {
                wf::WaveFunctionGrid g = wf::read_csv(f);
                g.eps = cfg.eps;
                return g;
            }
        }
    }

    const initial::GaussianWavePacket packet = config::make_packet(cfg);
    wf::WaveFunctionGrid u0 = wf::sample_packet(packet, cfg.xmin, cfg.xmax, cfg.points, cfg.eps);
    wf::WaveFunctionGrid ref =
        spectral::solve(u0, pot, cfg.delta, cfg.finalTime, cfg.referenceDt, cfg.eps);

    if (!cachePath.empty()) {
        fs::create_directories(cachePath.parent_path());
        std::ofstream f(cachePath);
        f << "# fgash reference cache v1\n# key: " << key << "\n";
        wf::write_csv(ref, f);
    }
    return ref;
}

double norm2_debiased(const wf::WaveFunctionGrid& grid, wf::Component c) {
    double acc = 0.0;
    const bool haveErr = grid.stderr0.size() == grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (c != wf::Component::One)
            acc += std::norm(grid.u0[i]) - (haveErr ? grid.stderr0[i] * grid.stderr0[i] : 0.0);
        if (c != wf::Component::Zero)
            acc += std::norm(grid.u1[i]) - (haveErr ? grid.stderr1[i] * grid.stderr1[i] : 0.0);
    }
    return std::max(0.0, acc * std::pow(grid.dx(), grid.m));
}

RunArtifacts run_experiment(SimulationConfig cfg, int workers) {
    const auto wallStart = std::chrono::steady_clock::now();
    config::validate_config(cfg);
    auto pot = config::make_potential(cfg);
    const initial::GaussianWavePacket packet = config::make_packet(cfg);
    const initial::AmplitudeTable table =
        initial::build_amplitude_table(packet, cfg.eps, config::make_table_spec(cfg));

    RunArtifacts art;
    art.cfg = cfg;
    art.cn = table.normalization();

    EnsembleResult ens =
        run_ensemble(cfg, *pot, table, cfg.trajectories, cfg.masterSeed, workers);
    art.mc = ens.acc.finalize(art.cn);
    art.hops = std::move(ens.hops);

    const wf::WaveFunctionGrid initialGrid =
        wf::sample_packet(packet, cfg.xmin, cfg.xmax, cfg.points, cfg.eps);
    art.u0NormInitial = wf::l2_norm(initialGrid, wf::Component::Zero);

    json summary;
    summary["config"]["model"] = cfg.model;
    summary["config"]["epsilon"] = cfg.eps;
    summary["config"]["delta"] = cfg.delta;
    summary["config"]["final_time"] = cfg.finalTime;
    summary["config"]["dt"] = cfg.dt;
    summary["config"]["trajectories"] = cfg.trajectories;
    summary["config"]["master_seed"] = cfg.masterSeed;
    summary["config"]["rate_model"] =
        cfg.rateModel == traj::RateModel::Standard ? "standard" : "gap_modified";
    summary["config"]["grid_points"] = cfg.points;
    summary["config"]["phase_points"] = cfg.phasePoints;
    summary["normalization_constant"] = art.cn;
    summary["hops"]["total"] = art.hops.totalHops;
    summary["hops"]["max"] = art.hops.maxHops;
    summary["hops"]["histogram"] = art.hops.histogram;
    summary["norms"]["initial_u0"] = art.u0NormInitial;
    summary["norms"]["mc_u0"] = wf::l2_norm(art.mc, wf::Component::Zero);
    summary["norms"]["mc_u1"] = wf::l2_norm(art.mc, wf::Component::One);
    summary["norms"]["mc_both"] = wf::l2_norm(art.mc, wf::Component::Both);
    summary["stderr_l2"]["u0"] = recon::stderr_l2(art.mc, wf::Component::Zero);
    summary["stderr_l2"]["u1"] = recon::stderr_l2(art.mc, wf::Component::One);
    summary["transition_rate"] = wf::transition_rate(art.mc, art.u0NormInitial);
    summary["transition_rate_debiased"] =
        norm2_debiased(art.mc, wf::Component::One) / (art.u0NormInitial * art.u0NormInitial);

    if (cfg.computeReference) {
        const std::string cacheDir =
            cfg.outputDir.empty() ? std::string() : cfg.outputDir + "/ref_cache";
        art.reference = reference_solution(cfg, *pot, cacheDir);
        summary["reference"]["u0"] = wf::l2_norm(*art.reference, wf::Component::Zero);
        summary["reference"]["u1"] = wf::l2_norm(*art.reference, wf::Component::One);
        summary["reference"]["transition_rate"] =
            wf::transition_rate(*art.reference, art.u0NormInitial);
        summary["errors"]["l2_abs"] = wf::l2_error(art.mc, *art.reference, false);
        summary["errors"]["l2_rel"] = wf::l2_error(art.mc, *art.reference, true);
        summary["errors"]["u0_rel"] =
            wf::l2_error_component(art.mc, *art.reference, wf::Component::Zero, true);
        const double refU1 = wf::l2_norm(*art.reference, wf::Component::One);
        if (refU1 > 0.0)
            summary["errors"]["u1_rel"] =
                wf::l2_error_component(art.mc, *art.reference, wf::Component::One, true);
    }

    const auto wallEnd = std::chrono::steady_clock::now();
    summary["runtime_seconds"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(wallEnd - wallStart).count() /
        1000.0;
    art.summary = summary;

    if (!cfg.outputDir.empty()) {
        fs::create_directories(cfg.outputDir);
        wf::write_csv_file(art.mc, cfg.outputDir + "/wavefunction.csv");
        if (art.reference) wf::write_csv_file(*art.reference, cfg.outputDir + "/reference.csv");
        std::ofstream sf(cfg.outputDir + "/summary.json");
        sf << summary.dump(2) << "\n";
        std::ofstream cf(cfg.outputDir + "/effective_config.cfg");
        cf << config::serialize_config(cfg);
    }
    return art;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "fit_line needs >= 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    require(sxx > 0, "fit_line: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    const double dof = std::max(1.0, n - 2.0);
    f.residual = std::sqrt(ss / dof);
    f.slopeStdErr = std::sqrt(ss / dof / sxx);
    return f;
}

StudyResult study_convergence(const SimulationConfig& base, const std::vector<long>& Ns,
                              int replicates, int workers, bool selfReference,
                              const std::string& cacheDir) {
    require(Ns.size() >= 4, "convergence study needs >= 4 trajectory counts");
    require(replicates >= 2, "convergence study needs >= 2 seed replicates");

    SimulationConfig cfg = base;
    config::validate_config(cfg);
    auto pot = config::make_potential(cfg);
    const initial::AmplitudeTable table = initial::build_amplitude_table(
        config::make_packet(cfg), cfg.eps, config::make_table_spec(cfg));
    const double cn = table.normalization();

    wf::WaveFunctionGrid ref;
    if (selfReference) {
        const long nRef = 16 * *std::max_element(Ns.begin(), Ns.end());
        ref = run_ensemble(cfg, *pot, table, nRef, cfg.masterSeed + 424243, workers)
                  .acc.finalize(cn);
    } else {
        ref = reference_solution(cfg, *pot, cacheDir);
    }

    // errs[r][i]: relative L2 error of replicate r at Ns[i].
    std::vector<std::vector<double>> errs(replicates, std::vector<double>(Ns.size(), 0.0));
    for (int r = 0; r < replicates; ++r) {
        const std::uint64_t seed = cfg.masterSeed + 7919ull * (r + 1);
        for (std::size_t i = 0; i < Ns.size(); ++i) {
            wf::WaveFunctionGrid mc =
                run_ensemble(cfg, *pot, table, Ns[i], seed, workers).acc.finalize(cn);
            errs[r][i] = wf::l2_error(mc, ref, true);
        }
    }

    std::vector<double> logN, logErrMean(Ns.size(), 0.0), errMean(Ns.size(), 0.0);
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        logN.push_back(std::log(static_cast<double>(Ns[i])));
        for (int r = 0; r < replicates; ++r) errMean[i] += errs[r][i];
        errMean[i] /= replicates;
        logErrMean[i] = std::log(errMean[i]);
    }
    const LineFit fit = fit_line(logN, logErrMean);

    // Paired bootstrap over seed replicates.
    SeededStream boot(987654321);
    std::vector<double> slopes;
    const int B = 200;
    for (int b = 0; b < B; ++b) {
        std::vector<double> ym(Ns.size(), 0.0);
        for (int k = 0; k < replicates; ++k) {
            const int r = static_cast<int>(boot.next() * replicates);
            for (std::size_t i = 0; i < Ns.size(); ++i) ym[i] += errs[r][i];
        }
        std::vector<double> ylog(Ns.size());
        for (std::size_t i = 0; i < Ns.size(); ++i) ylog[i] = std::log(ym[i] / replicates);
        slopes.push_back(fit_line(logN, ylog).slope);
    }
    std::sort(slopes.begin(), slopes.end());
    const double qlo = slopes[static_cast<std::size_t>(0.025 * (B - 1))];
    const double qhi = slopes[static_cast<std::size_t>(0.975 * (B - 1))];

    StudyResult out;
    for (long N : Ns) out.sweep.push_back(static_cast<double>(N));
    out.metric = errMean;
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.residual = fit.residual;
    out.slopeHalfWidth = 0.5 * (qhi - qlo);
    out.detail["reference"] = selfReference ? "self" : "spectral";
    out.detail["replicates"] = replicates;
    out.detail["errors"] = errs;
    out.detail["slope_bootstrap_lo"] = qlo;
    out.detail["slope_bootstrap_hi"] = qhi;
    return out;
}

StudyResult study_marcus(const SimulationConfig& base, const std::vector<double>& deltas,
                         long trajectoriesPerPoint, int workers, const std::string& cacheDir) {
    require(deltas.size() >= 4, "Marcus study needs >= 4 delta values");
    const auto [lo, hi] = std::minmax_element(deltas.begin(), deltas.end());
    require(*lo > 0.0, "Marcus study needs positive deltas");
    require(*hi / *lo >= 9.999, "Marcus study needs deltas spanning at least a decade");

    StudyResult out;
    std::vector<double> logDelta, logR;
    json points = json::array();
    for (double delta : deltas) {
        SimulationConfig cfg = base;
        cfg.delta = delta;
        cfg.dt = 0.0;    // re-derive against the cap for this delta
        cfg.points = 0;
        if (trajectoriesPerPoint > 0) cfg.trajectories = trajectoriesPerPoint;
        config::validate_config(cfg);
        auto pot = config::make_potential(cfg);
        const initial::AmplitudeTable table = initial::build_amplitude_table(
            config::make_packet(cfg), cfg.eps, config::make_table_spec(cfg));

        wf::WaveFunctionGrid mc =
            run_ensemble(cfg, *pot, table, cfg.trajectories, cfg.masterSeed, workers)
                .acc.finalize(table.normalization());
        const wf::WaveFunctionGrid initGrid = wf::sample_packet(
            config::make_packet(cfg), cfg.xmin, cfg.xmax, cfg.points, cfg.eps);
        const double u0n = wf::l2_norm(initGrid, wf::Component::Zero);
        const double R = norm2_debiased(mc, wf::Component::One) / (u0n * u0n);
        require(R > 0.0, "Marcus study: transition rate vanished; increase trajectories");

        const wf::WaveFunctionGrid ref = reference_solution(cfg, *pot, cacheDir);
        const double Rref = wf::transition_rate(ref, u0n);

        out.sweep.push_back(delta);
        out.metric.push_back(R);
        logDelta.push_back(std::log(delta));
        logR.push_back(std::log(R));
        points.push_back({{"delta", delta},
                          {"R", R},
                          {"R_reference", Rref},
                          {"trajectories", cfg.trajectories}});
    }
    const LineFit fit = fit_line(logDelta, logR);
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.residual = fit.residual;
    out.slopeHalfWidth = 2.0 * fit.slopeStdErr;
    out.detail["points"] = points;
    return out;
}

namespace {

// Median relative L2 error over seed replicates at trajectory count n.
double median_error(const SimulationConfig& cfg, const potentials::DiabaticPotential& pot,
                    const initial::AmplitudeTable& table, const wf::WaveFunctionGrid& ref,
                    long n, int replicates, int workers) {
    std::vector<double> errs;
    for (int r = 0; r < replicates; ++r) {
        const std::uint64_t seed = cfg.masterSeed + 7919ull * (r + 1);
        wf::WaveFunctionGrid mc =
            run_ensemble(cfg, pot, table, n, seed, workers).acc.finalize(table.normalization());
        errs.push_back(wf::l2_error(mc, ref, true));
    }
    std::sort(errs.begin(), errs.end());
    return errs[errs.size() / 2];
}

// Smallest trajectory count whose median error meets the threshold
// (doubling then geometric bisection). Returns nCap+1 when the cap is hit.
long n_to_threshold(const SimulationConfig& cfg, const potentials::DiabaticPotential& pot,
                    const initial::AmplitudeTable& table, const wf::WaveFunctionGrid& ref,
                    double threshold, long nMin, long nCap, int replicates, int workers) {
    long lo = 0, hi = nMin;
    while (median_error(cfg, pot, table, ref, hi, replicates, workers) > threshold) {
        lo = hi;
        hi *= 2;
        if (hi > nCap) return nCap + 1;
    }
    if (lo == 0) return hi; // threshold met already at nMin
    for (int iter = 0; iter < 3 && hi > lo + 1; ++iter) {
        const long mid = std::max(
            lo + 1, static_cast<long>(std::llround(std::sqrt(double(lo) * double(hi)))));
        if (mid >= hi) break;
        if (median_error(cfg, pot, table, ref, mid, replicates, workers) <= threshold)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

} // namespace

StudyResult study_trajectory_scaling(const SimulationConfig& base,
                                     const std::vector<double>& deltas, double errorThreshold,
                                     long nCap, int replicates, int workers,
                                     const std::string& cacheDir) {
    require(!deltas.empty(), "trajectory-scaling study needs at least one delta");
    require(errorThreshold > 0.0 && errorThreshold < 1.0,
            "trajectory-scaling threshold must lie in (0,1)");
    require(replicates >= 1, "trajectory-scaling study needs >= 1 replicate");

    StudyResult out;
    json points = json::array();
    for (double delta : deltas) {
        SimulationConfig cfg = base;
        cfg.delta = delta;
        cfg.dt = 0.0;
        cfg.points = 0;
        config::validate_config(cfg);
        auto pot = config::make_potential(cfg);
        const initial::AmplitudeTable table = initial::build_amplitude_table(
            config::make_packet(cfg), cfg.eps, config::make_table_spec(cfg));
        const wf::WaveFunctionGrid ref = reference_solution(cfg, *pot, cacheDir);

        const long n = n_to_threshold(cfg, *pot, table, ref, errorThreshold, 64, nCap,
                                      replicates, workers);
        const bool capped = n > nCap;
        out.sweep.push_back(delta);
        out.metric.push_back(static_cast<double>(n));
        out.exceeded.push_back(capped ? 1 : 0);
        points.push_back({{"delta", delta}, {"n", n}, {"exceeded", capped}});
    }

    // Semi-log fit: log N against delta (exponential growth shows as a line).
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < out.sweep.size(); ++i) {
        if (!out.exceeded[i]) {
            xs.push_back(out.sweep[i]);
            ys.push_back(std::log(out.metric[i]));
        }
    }
    if (xs.size() >= 2) {
        const LineFit fit = fit_line(xs, ys);
        out.slope = fit.slope;
        out.intercept = fit.intercept;
        out.residual = fit.residual;
        out.slopeHalfWidth = 2.0 * fit.slopeStdErr;
    }
    out.detail["points"] = points;
    out.detail["threshold"] = errorThreshold;
    out.detail["cap"] = nCap;
    return out;
}

SimulationConfig make_avoided_config(const SimulationConfig& base, double eps) {
    require(eps > 0.0, "avoided-crossing config: eps must be positive");
    const double se = std::sqrt(eps);
    SimulationConfig cfg = base;
    cfg.model = "simple";
    cfg.potentialParams.clear();
    cfg.eps = eps;
    cfg.delta = se;
    cfg.alpha = 1.0 / (2.0 * eps);
    cfg.center = Eigen::VectorXd::Constant(1, -2.0 * se);
    cfg.momentum = Eigen::VectorXd::Constant(1, 2.0);
    cfg.finalTime = 3.0 * se;
    // 150 steps and per-step hop probability 0.02 across the whole eps sweep
    cfg.dt = 0.02 * se;
    cfg.points = 0;
    cfg.qHalfWidth = 0.0;
    cfg.pHalfWidth = 0.0;
    // Domain: packet travels from -2 sqrt(eps) to about 4 sqrt(eps); leave
    // room for the 10 sqrt(eps) aliasing strips.
    cfg.xmin = -2.0 * se - 16.0 * se - 0.3;
    cfg.xmax = 4.0 * se + 16.0 * se + 0.3;
    return cfg;
}

StudyResult study_avoided_crossing(const SimulationConfig& base,
                                   const std::vector<double>& epsValues, double errorThreshold,
                                   long nCap, int replicates, int workers,
                                   const std::string& cacheDir) {
    require(!epsValues.empty(), "avoided-crossing study needs at least one eps");
    require(errorThreshold > 0.0 && errorThreshold < 1.0,
            "avoided-crossing threshold must lie in (0,1)");

    StudyResult out;
    json points = json::array();
    for (double eps : epsValues) {
        SimulationConfig cfg = make_avoided_config(base, eps);
        config::validate_config(cfg);
        auto pot = config::make_potential(cfg);
        const initial::AmplitudeTable table = initial::build_amplitude_table(
            config::make_packet(cfg), cfg.eps, config::make_table_spec(cfg));
        const wf::WaveFunctionGrid ref = reference_solution(cfg, *pot, cacheDir);

        const long n = n_to_threshold(cfg, *pot, table, ref, errorThreshold, 64, nCap,
                                      replicates, workers);
        out.sweep.push_back(eps);
        out.metric.push_back(static_cast<double>(n));
        out.exceeded.push_back(n > nCap ? 1 : 0);
        points.push_back({{"eps", eps}, {"delta", cfg.delta}, {"n", n}, {"T", cfg.finalTime}});
    }
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = 0; i < out.metric.size(); ++i) {
        if (!out.exceeded[i]) {
            lo = std::min(lo, out.metric[i]);
            hi = std::max(hi, out.metric[i]);
        }
    }
    out.detail["points"] = points;
    out.detail["threshold"] = errorThreshold;
    out.detail["n_ratio_max_over_min"] = (lo > 0.0 && hi > 0.0) ? hi / lo : 0.0;
    return out;
}

} // namespace fgash::harness
