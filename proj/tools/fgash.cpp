// Command-line front end: run experiments, produce reference solutions,
// evaluate the deterministic series oracle, compare CSV wave functions, and
// drive the parameter studies.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "fgash/experiment.hpp"
#include "fgash/series_oracle.hpp"

using namespace fgash;
using json = nlohmann::json;

namespace {

std::vector<double> split_doubles(const std::string& csv) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(csv);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    require(!out.empty(), "expected a comma-separated list of numbers, got '" + csv + "'");
    return out;
}

std::vector<long> split_longs(const std::string& csv) {
    std::vector<long> out;
    for (double v : split_doubles(csv)) out.push_back(static_cast<long>(std::llround(v)));
    return out;
}

void emit_grid(const wf::WaveFunctionGrid& grid, const std::string& path) {
    if (path.empty())
        wf::write_csv(grid, std::cout);
    else
        wf::write_csv_file(grid, path);
}

json study_json(const harness::StudyResult& r, const std::string& sweepName) {
    json j;
    j[sweepName] = r.sweep;
    j["metric"] = r.metric;
    if (!r.exceeded.empty()) j["exceeded"] = r.exceeded;
    j["slope"] = r.slope;
    j["intercept"] = r.intercept;
    j["slope_half_width"] = r.slopeHalfWidth;
    j["residual"] = r.residual;
    j["detail"] = r.detail;
    return j;
}

void emit_study(const harness::StudyResult& r, const std::string& sweepName,
                const std::string& name, const std::string& outDir) {
    const json j = study_json(r, sweepName);
    std::cout << j.dump(2) << "\n";
    if (!outDir.empty()) {
        std::filesystem::create_directories(outDir);
        std::ofstream jf(outDir + "/study_" + name + ".json");
        jf << j.dump(2) << "\n";
        std::ofstream cf(outDir + "/study_" + name + ".csv");
        cf << sweepName << ",metric,exceeded\n";
        for (std::size_t i = 0; i < r.sweep.size(); ++i) {
            cf << r.sweep[i] << "," << r.metric[i] << ","
               << (i < r.exceeded.size() ? r.exceeded[i] : 0) << "\n";
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diabatic surface-hopping simulator (frozen Gaussian trajectories with a "
                 "stochastic jump process) plus a time-splitting spectral reference solver"};
    app.require_subcommand(1);

    int workers = 0;
    app.add_option("--workers", workers, "worker threads (default: FGASH_WORKERS or all cores)");

    // ---- run ----
    auto* runCmd = app.add_subcommand("run", "run a surface-hopping experiment from a config");
    std::string runConfig, runOutput;
    long runTrajectories = 0;
    long long runSeed = -1;
    bool runNoReference = false;
    runCmd->add_option("config", runConfig, "config file")->required();
    runCmd->add_option("--output", runOutput, "output directory (CSV + summary.json)");
    runCmd->add_option("--trajectories", runTrajectories, "override trajectory count");
    runCmd->add_option("--seed", runSeed, "override master seed");
    runCmd->add_flag("--no-reference", runNoReference, "skip the spectral reference");

    // ---- reference ----
    auto* refCmd = app.add_subcommand("reference", "time-splitting spectral reference solution");
    std::string refModel = "simple", refOutput;
    double refEps = 0.04, refDelta = 0.04, refT = 1.2, refDt = 0.0;
    double refAlpha = 12.5, refCenter = -1.5, refMomentum = 2.0;
    int refGridN = 0;
    std::vector<double> refDomain{-8.0, 8.0};
    refCmd->add_option("--model", refModel, "potential tag: simple|dual|extended");
    refCmd->add_option("--epsilon", refEps, "semiclassical parameter");
    refCmd->add_option("--delta", refDelta, "coupling scale");
    refCmd->add_option("--T", refT, "final time");
    refCmd->add_option("--dt", refDt, "time step (default eps/32)");
    refCmd->add_option("--grid-n", refGridN, "grid points (power of two; default auto)");
    refCmd->add_option("--domain", refDomain, "domain endpoints a b")->expected(2);
    refCmd->add_option("--alpha", refAlpha, "packet width exponent");
    refCmd->add_option("--center", refCenter, "packet center");
    refCmd->add_option("--momentum", refMomentum, "packet momentum");
    refCmd->add_option("--output", refOutput, "CSV path (default: stdout)");

    // ---- oracle ----
    auto* oracleCmd =
        app.add_subcommand("oracle", "deterministic quadrature of the hop-series terms");
    std::string oracleConfig, oracleOutput;
    int oracleMaxHops = 1, oracleT1Nodes = 64;
    oracleCmd->add_option("config", oracleConfig, "config file")->required();
    oracleCmd->add_option("--max-hops", oracleMaxHops, "series truncation, 0 or 1")
        ->check(CLI::Range(0, 1));
    oracleCmd->add_option("--t1-nodes", oracleT1Nodes, "hop-time quadrature nodes (>= 64)");
    oracleCmd->add_option("--output", oracleOutput, "CSV path (default: stdout)");

    // ---- compare ----
    auto* cmpCmd = app.add_subcommand("compare", "L2 differences between two wave-function CSVs");
    std::string cmpA, cmpB;
    cmpCmd->add_option("csvA", cmpA, "first CSV")->required();
    cmpCmd->add_option("csvB", cmpB, "second CSV (reference for relative errors)")->required();

    // ---- study ----
    auto* studyCmd = app.add_subcommand("study", "parameter studies (conv|marcus|ntraj|avoided)");
    std::string studyKind, studyConfig, studyOutput, studyCache;
    std::string studyNs = "100,200,400,800,1600";
    std::string studyDeltas, studyEpsValues = "0.04,0.01,0.0025,0.00125";
    int studyReplicates = 0;
    long studyCap = 1000000;
    double studyThreshold = 0.08;
    long studyTrajectories = 0;
    bool studySelfRef = false;
    studyCmd->add_option("kind", studyKind, "conv|marcus|ntraj|avoided")->required();
    studyCmd->add_option("config", studyConfig, "base config file")->required();
    studyCmd->add_option("--output", studyOutput, "output directory");
    studyCmd->add_option("--cache", studyCache, "reference cache directory");
    studyCmd->add_option("--ns", studyNs, "trajectory counts for conv");
    studyCmd->add_option("--deltas", studyDeltas, "delta sweep for marcus/ntraj");
    studyCmd->add_option("--eps-values", studyEpsValues, "eps sweep for avoided");
    studyCmd->add_option("--replicates", studyReplicates, "seed replicates");
    studyCmd->add_option("--threshold", studyThreshold, "relative L2 threshold (ntraj/avoided)");
    studyCmd->add_option("--cap", studyCap, "trajectory-count cap");
    studyCmd->add_option("--trajectories", studyTrajectories, "per-point count (marcus)");
    studyCmd->add_flag("--self-reference", studySelfRef,
                       "conv: compare against a converged surface-hopping run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*runCmd) {
            config::SimulationConfig cfg = config::parse_config_file(runConfig);
            if (!runOutput.empty()) cfg.outputDir = runOutput;
            if (runTrajectories > 0) cfg.trajectories = runTrajectories;
            if (runSeed >= 0) cfg.masterSeed = static_cast<std::uint64_t>(runSeed);
            if (runNoReference) cfg.computeReference = false;
            harness::RunArtifacts art = harness::run_experiment(cfg, workers);
            std::cout << art.summary.dump(2) << "\n";
        } else if (*refCmd) {
            config::SimulationConfig cfg;
            cfg.model = refModel;
            cfg.eps = refEps;
            cfg.delta = refDelta;
            cfg.finalTime = refT;
            cfg.referenceDt = refDt;
            cfg.alpha = refAlpha;
            cfg.center = Eigen::VectorXd::Constant(1, refCenter);
            cfg.momentum = Eigen::VectorXd::Constant(1, refMomentum);
            cfg.xmin = refDomain[0];
            cfg.xmax = refDomain[1];
            cfg.points = refGridN;
            config::validate_config(cfg);
            auto pot = config::make_potential(cfg);
            emit_grid(harness::reference_solution(cfg, *pot), refOutput);
        } else if (*oracleCmd) {
            config::SimulationConfig cfg = config::parse_config_file(oracleConfig);
            config::validate_config(cfg);
            auto pot = config::make_potential(cfg);
            const initial::AmplitudeTable table = initial::build_amplitude_table(
                config::make_packet(cfg), cfg.eps, config::make_table_spec(cfg));
            oracle::QuadratureSpec spec;
            spec.t1Nodes = oracleT1Nodes;
            spec.workers = workers;
            wf::WaveFunctionGrid total = wf::make_grid(cfg.dimension(), cfg.xmin, cfg.xmax,
                                                       cfg.points, cfg.eps);
            for (int n = 0; n <= oracleMaxHops; ++n) {
                const oracle::AnsatzTerm term =
                    oracle::fga_term(n, table, *pot, cfg.delta, cfg.eps, cfg.finalTime, cfg.dt,
                                     cfg.xmin, cfg.xmax, cfg.points, spec);
                for (std::size_t i = 0; i < total.size(); ++i) {
                    total.u0[i] += term.grid.u0[i];
                    total.u1[i] += term.grid.u1[i];
                }
            }
            emit_grid(total, oracleOutput);
        } else if (*cmpCmd) {
            const wf::WaveFunctionGrid a = wf::read_csv_file(cmpA);
            const wf::WaveFunctionGrid b = wf::read_csv_file(cmpB);
            json j;
            j["points"] = a.n;
            j["l2_abs"] = wf::l2_error(a, b, false);
            j["l2_rel"] = wf::l2_error(a, b, true);
            const double b0 = wf::l2_norm(b, wf::Component::Zero);
            const double b1 = wf::l2_norm(b, wf::Component::One);
            if (b0 > 0)
                j["u0_rel"] = wf::l2_error_component(a, b, wf::Component::Zero, true);
            if (b1 > 0)
                j["u1_rel"] = wf::l2_error_component(a, b, wf::Component::One, true);
            std::cout << j.dump(2) << "\n";
        } else if (*studyCmd) {
            const config::SimulationConfig base = config::parse_config_file(studyConfig);
            const std::string cache = studyCache.empty()
                                          ? (studyOutput.empty() ? "" : studyOutput + "/ref_cache")
                                          : studyCache;
            if (studyKind == "conv") {
                const int reps = studyReplicates > 0 ? studyReplicates : 20;
                emit_study(harness::study_convergence(base, split_longs(studyNs), reps, workers,
                                                      studySelfRef, cache),
                           "trajectories", "conv", studyOutput);
            } else if (studyKind == "marcus") {
                const std::string deltas =
                    studyDeltas.empty() ? "0.004,0.008,0.012,0.02,0.04" : studyDeltas;
                emit_study(harness::study_marcus(base, split_doubles(deltas), studyTrajectories,
                                                 workers, cache),
                           "delta", "marcus", studyOutput);
            } else if (studyKind == "ntraj") {
                const std::string deltas =
                    studyDeltas.empty() ? "0.001,0.005,0.01,0.02,0.04,0.06,0.08,0.1,0.12"
                                        : studyDeltas;
                const int reps = studyReplicates > 0 ? studyReplicates : 3;
                emit_study(harness::study_trajectory_scaling(base, split_doubles(deltas),
                                                             studyThreshold, studyCap, reps,
                                                             workers, cache),
                           "delta", "ntraj", studyOutput);
            } else if (studyKind == "avoided") {
                const int reps = studyReplicates > 0 ? studyReplicates : 3;
                emit_study(harness::study_avoided_crossing(base, split_doubles(studyEpsValues),
                                                           studyThreshold, studyCap, reps,
                                                           workers, cache),
                           "eps", "avoided", studyOutput);
            } else {
                throw ContractError("unknown study kind '" + studyKind +
                                    "' (expected conv|marcus|ntraj|avoided)");
            }
        }
    } catch (const ContractError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
