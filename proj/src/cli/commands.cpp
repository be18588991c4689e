#include "dosc/cli/commands.hpp"

#include "dosc/backaction.hpp"
#include "dosc/cli/csv.hpp"
#include "dosc/cli/worker_pool.hpp"
#include "dosc/dirac_oscillator.hpp"
#include "dosc/errors.hpp"
#include "dosc/foldy_wouthuysen.hpp"
#include "dosc/soc_mapping.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <tuple>

namespace dosc::cli {

namespace fs = std::filesystem;

std::string version() { return DOSC_VERSION; }

namespace {

std::string numbered(const std::string& stem, std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%03zu.csv", index);
    return stem + buf;
}

Json base_meta(const RunConfig& rc, const CommandOptions& opt, const Json& job) {
    return {{"command", rc.command},
            {"version", version()},
            {"seed", opt.seed},
            {"config_path", opt.config_path},
            {"run_config", rc.document},
            {"job", job}};
}

Json hilbert_tolerances() {
    return {{"hermiticity", 1e-12},
            {"norm_drift", 1e-10},
            {"eigen_residual", 1e-9},
            {"leakage_gate", 1e-8},
            {"leakage_top_fraction", 0.1},
            {"dropped_weight_bound", 1e-28}};
}

HamiltonianKind hamiltonian_kind(const Json& job) {
    return job.at("hamiltonian").get<std::string>() == "nonrelativistic" ? HamiltonianKind::nonrelativistic
                                                                         : HamiltonianKind::full_dirac;
}

CsvTable trajectory_table(const Trajectory& traj) {
    CsvTable table({"t", "expX_dimensionless", "varX", "expSigmaZ", "expPi", "leakage"});
    for (std::size_t i = 0; i < traj.size(); ++i) {
        table.add_row({traj.t[i], traj.expX[i], traj.varX[i], traj.expSigmaZ[i], traj.expPi[i], traj.leakage[i]});
    }
    return table;
}

Json trajectory_diagnostics(const Trajectory& traj) {
    double leak = 0.0;
    for (double v : traj.leakage) {
        leak = std::max(leak, v);
    }
    const double margin = min_uncertainty_margin(traj);
    return {{"samples", traj.size()},
            {"max_leakage", leak},
            {"min_uncertainty_margin", margin},
            {"uncertainty_relation_holds", margin >= -1e-12}};
}

struct Output {
    std::string name;
    CsvTable table;
    Json meta;
};

void emit(const fs::path& dir, RunSummary& summary, std::vector<Output>& outputs) {
    for (Output& o : outputs) {
        write_table(dir / o.name, o.table, std::move(o.meta));
        summary.outputs.push_back(o.name);
    }
}

RunSummary run_spectrum(const RunConfig& rc, const CommandOptions& opt) {
    const Json& job = rc.jobs.front();
    const std::vector<double> grid = log_grid(job["epsilon_min"], job["epsilon_max"], job["epsilon_points"]);

    CsvTable energies({"epsilon", "n", "E_plus_over_rest", "E_minus_over_rest"});
    for (const EnergyCurvePoint& p : energy_curves(grid, job["curve_n_max"])) {
        energies.add_row({p.epsilon, std::int64_t{p.n}, p.e_plus_over_rest, p.e_minus_over_rest});
    }
    CsvTable weights({"epsilon", "n", "A_squared", "B_squared", "normalization_defect"});
    double worst_norm = 0.0;
    for (const WeightCurvePoint& p : weight_curves(grid, job["weight_n_max"])) {
        const double defect = std::abs(p.a_squared + p.b_squared - 1.0);
        worst_norm = std::max(worst_norm, defect);
        weights.add_row({p.epsilon, std::int64_t{p.n}, p.a_squared, p.b_squared, defect});
    }

    const std::vector<double> eps = job["validate_epsilon"].get<std::vector<double>>();
    const BasisSpec basis(job["fock_cutoff"].get<int>());
    const int n_max = job["n_max"];
    const auto reports = parallel_map<SpectrumReport>(eps.size(), opt.workers, [&](std::size_t i) {
        return validate_spectrum(DiracParams(eps[i], basis), n_max);
    });
    CsvTable check({"epsilon", "n", "branch", "numeric_energy", "analytic_energy", "abs_error_over_rest",
                    "overlap_defect"});
    Json per_eps = Json::array();
    for (const SpectrumReport& r : reports) {
        double worst = 0.0;
        for (const SpectrumRow& row : r.rows) {
            const double rel = row.abs_error * r.epsilon;
            worst = std::max(worst, rel);
            check.add_row({r.epsilon, std::int64_t{row.n},
                           std::string(row.branch == Branch::positive ? "positive" : "negative"), row.numeric_energy,
                           row.analytic_energy, rel, 1.0 - row.overlap});
        }
        per_eps.push_back({{"epsilon", r.epsilon},
                           {"passed", r.passed()},
                           {"max_abs_error_over_rest", worst},
                           {"window_numeric_count", r.window_numeric_count},
                           {"window_analytic_count", r.window_analytic_count},
                           {"min_gap", r.min_gap}});
    }

    Json tol = {{"energy_over_rest", 1e-9}, {"overlap_defect", SpectrumReport::overlap_tolerance},
                {"degeneracy_gap", 1e-8}, {"hilbert", hilbert_tolerances()}};
    std::vector<Output> outputs;
    Json m = base_meta(rc, opt, job);
    m["tolerances"] = tol;
    outputs.push_back({"energy_curves.csv", std::move(energies), m});
    m["diagnostics"] = {{"max_normalization_defect", worst_norm}};
    outputs.push_back({"weight_curves.csv", std::move(weights), m});
    m["diagnostics"] = {{"validation", per_eps}};
    outputs.push_back({"spectrum_check.csv", std::move(check), m});

    RunSummary summary;
    summary.diagnostics = {{"validation", per_eps}, {"max_normalization_defect", worst_norm}};
    emit(opt.out_dir, summary, outputs);
    return summary;
}

RunSummary run_evolve(const RunConfig& rc, const CommandOptions& opt) {
    auto results = parallel_map<Trajectory>(rc.jobs.size(), opt.workers, [&](std::size_t j) {
        const Json& job = rc.jobs[j];
        const BasisSpec basis(job["fock_cutoff"].get<int>());
        const double eps = job["epsilon"];
        const int n = job["n"];
        const Operator h = build_H_sector(eps, job["g_times_nb"], job["f"], basis, hamiltonian_kind(job));
        const std::string initial = job["initial"];
        const QuantumState psi0 =
            initial == "balanced"
                ? balanced_initial_state(basis, n)
                : analytic_eigenstate(n, initial == "positive" ? Branch::positive : Branch::negative,
                                      DiracParams(eps, basis));
        const int points = job["points"];
        if (points < 2) {
            throw InvalidArgument("evolve needs points >= 2");
        }
        return evolve_state(h, psi0, basis, uniform_time_grid(0.0, job["t_end"], static_cast<std::size_t>(points)));
    });
    RunSummary summary;
    summary.diagnostics["jobs"] = Json::array();
    std::vector<Output> outputs;
    for (std::size_t j = 0; j < results.size(); ++j) {
        Json m = base_meta(rc, opt, rc.jobs[j]);
        m["tolerances"] = hilbert_tolerances();
        m["diagnostics"] = trajectory_diagnostics(results[j]);
        summary.diagnostics["jobs"].push_back(m["diagnostics"]);
        outputs.push_back({numbered("evolve", j), trajectory_table(results[j]), std::move(m)});
    }
    emit(opt.out_dir, summary, outputs);
    return summary;
}

MeasurementConfig measurement_config(const Json& job) {
    MeasurementConfig cfg;
    cfg.epsilon = job["epsilon"];
    cfg.n = job["n"];
    cfg.G = job["G"];
    cfg.f = job["f"];
    if (job.contains("omega_b")) {
        cfg.omega_b = job["omega_b"];
    }
    if (job.contains("apparatus") && !job["apparatus"].is_null()) {
        cfg.apparatus.clear();
        for (const Json& e : job["apparatus"]) {
            cfg.apparatus.push_back({e["n_b"].get<int>(), e["weight"].get<double>()});
        }
    }
    cfg.basis = BasisSpec(job["fock_cutoff"].get<int>());
    const int ppp = job["points_per_period"];
    if (ppp <= 4) {
        throw InvalidArgument("points_per_period must exceed 4 to resolve the Zitterbewegung line");
    }
    cfg.times = zitterbewegung_time_grid(cfg.epsilon, job["t_end"], ppp);
    cfg.validate();
    return cfg;
}

const std::vector<std::string> smearing_columns{
    "epsilon", "n", "G", "f", "delta_fitted", "delta_analytic", "ratio", "zb_frequency_fitted",
    "zb_frequency_fft", "zb_frequency_exact", "residual", "regime_breakdown"};

std::vector<CsvCell> smearing_row(const MeasurementConfig& cfg, const SmearingEstimate& s) {
    const double ratio = s.delta_analytic > 0.0 ? s.delta_fitted / s.delta_analytic : std::nan("");
    return {cfg.epsilon, std::int64_t{cfg.n}, cfg.G, cfg.f, s.delta_fitted, s.delta_analytic, ratio,
            s.zb_frequency_fitted, s.zb_frequency_fft, s.zb_frequency_exact, s.residual,
            std::int64_t{s.regime_breakdown ? 1 : 0}};
}

RunSummary run_backaction_command(const RunConfig& rc, const CommandOptions& opt) {
    struct Result {
        MeasurementConfig cfg;
        Trajectory traj;
        std::optional<SmearingEstimate> fit;
    };
    auto results = parallel_map<Result>(rc.jobs.size(), opt.workers, [&](std::size_t j) {
        const Json& job = rc.jobs[j];
        Result r{measurement_config(job), {}, std::nullopt};
        r.traj = run_backaction(r.cfg, hamiltonian_kind(job));
        if (job["fit"].get<bool>()) {
            r.fit = estimate_smearing(r.traj, r.cfg, {job["residual_threshold"].get<double>()});
        }
        return r;
    });

    RunSummary summary;
    summary.diagnostics["jobs"] = Json::array();
    std::vector<Output> outputs;
    CsvTable fits(smearing_columns);
    for (std::size_t j = 0; j < results.size(); ++j) {
        Json m = base_meta(rc, opt, rc.jobs[j]);
        m["tolerances"] = hilbert_tolerances();
        m["diagnostics"] = trajectory_diagnostics(results[j].traj);
        if (results[j].fit) {
            fits.add_row(smearing_row(results[j].cfg, *results[j].fit));
        }
        summary.diagnostics["jobs"].push_back(m["diagnostics"]);
        outputs.push_back({numbered("backaction", j), trajectory_table(results[j].traj), std::move(m)});
    }
    if (fits.rows() > 0) {
        Json m = base_meta(rc, opt, rc.document);
        m["tolerances"] = {{"residual_threshold", rc.document["residual_threshold"]}};
        outputs.push_back({"smearing.csv", std::move(fits), std::move(m)});
    }
    emit(opt.out_dir, summary, outputs);
    return summary;
}

RunSummary run_sweep(const RunConfig& rc, const CommandOptions& opt) {
    struct Result {
        MeasurementConfig cfg;
        SmearingEstimate fit;
    };
    auto results = parallel_map<Result>(rc.jobs.size(), opt.workers, [&](std::size_t j) {
        const Json& job = rc.jobs[j];
        MeasurementConfig cfg = measurement_config(job);
        const Trajectory traj = run_backaction(cfg, HamiltonianKind::full_dirac, TrajectoryFields::position_only);
        SmearingEstimate fit = estimate_smearing(traj, cfg, {job["residual_threshold"].get<double>()});
        cfg.times.clear();
        return Result{std::move(cfg), fit};
    });

    CsvTable table(smearing_columns);
    std::map<std::tuple<int, double, double>, std::vector<std::pair<double, double>>> groups;
    for (const Result& r : results) {
        table.add_row(smearing_row(r.cfg, r.fit));
        if (r.cfg.G > 0.0 && r.fit.delta_fitted > 0.0) {
            groups[{r.cfg.n, r.cfg.G, r.cfg.f}].push_back(
                {std::log(r.cfg.epsilon), std::log(r.fit.delta_fitted / r.cfg.G)});
        }
    }
    CsvTable slopes({"n", "G", "f", "points", "slope"});
    for (const auto& [key, pts] : groups) {
        if (pts.size() < 2) {
            continue;
        }
        double mx = 0.0, my = 0.0;
        for (const auto& [x, y] : pts) {
            mx += x;
            my += y;
        }
        mx /= pts.size();
        my /= pts.size();
        double sxy = 0.0, sxx = 0.0;
        for (const auto& [x, y] : pts) {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
        }
        const double slope = sxx > 0.0 ? sxy / sxx : std::nan("");
        slopes.add_row({std::int64_t{std::get<0>(key)}, std::get<1>(key), std::get<2>(key),
                        static_cast<std::int64_t>(pts.size()), slope});
    }

    Json m = base_meta(rc, opt, rc.document);
    m["tolerances"] = {{"residual_threshold", rc.document["residual_threshold"]}, {"hilbert", hilbert_tolerances()}};
    std::vector<Output> outputs;
    outputs.push_back({"smearing.csv", std::move(table), m});
    outputs.push_back({"smearing_slopes.csv", std::move(slopes), m});
    RunSummary summary;
    emit(opt.out_dir, summary, outputs);
    return summary;
}

RunSummary run_fw_check(const RunConfig& rc, const CommandOptions& opt) {
    auto results = parallel_map<std::vector<FWResidualRow>>(rc.jobs.size(), opt.workers, [&](std::size_t j) {
        const Json& job = rc.jobs[j];
        FWCheckOptions o;
        o.interior_fraction = job["interior_fraction"];
        o.nw_levels = job["nw_levels"];
        o.g_times_nb = job["g_times_nb"];
        o.f = job["f"];
        return fw_residual_report(DiracParams(job["epsilon"], BasisSpec(job["fock_cutoff"].get<int>())), o);
    });
    CsvTable table({"quantity", "epsilon", "N", "interior_fraction", "residual"});
    for (const auto& rows : results) {
        for (const FWResidualRow& r : rows) {
            table.add_row({r.quantity, r.epsilon, std::int64_t{r.N}, r.interior_fraction, r.residual});
        }
    }
    Json m = base_meta(rc, opt, rc.document);
    m["tolerances"] = {{"unitarity", 1e-10}, {"diagonalization", 1e-6}, {"commutator_relative", 1e-6},
                       {"nw_ratio_target", 2.0}};
    std::vector<Output> outputs;
    outputs.push_back({"fw_check.csv", std::move(table), std::move(m)});
    RunSummary summary;
    emit(opt.out_dir, summary, outputs);
    return summary;
}

RunSummary run_soc_map(const RunConfig& rc, const CommandOptions& opt) {
    struct Result {
        SOCParams params;
        ComparisonReport report;
    };
    auto results = parallel_map<Result>(rc.jobs.size(), opt.workers, [&](std::size_t j) {
        const Json& job = rc.jobs[j];
        SOCParams p;
        p.k_r = job["k_r"];
        p.chi = job["chi"];
        p.m_a = job["m_a"];
        p.delta = job["delta"];
        p.sigma_slope = job["sigma_slope"].is_null() ? slope_for_epsilon(job["epsilon_target"], p.k_r, p.chi, p.m_a)
                                                     : job["sigma_slope"].get<double>();
        return Result{p, compare_soc_vs_do(p, default_grid(p, job["grid_lengths"], job["grid_points"]),
                                           job["n_levels"])};
    });

    Json table_ref = Json::array();
    for (const PlatformScale& s : table_reference_scales()) {
        table_ref.push_back({{"platform", s.platform},
                             {"light_speed_m_per_s", s.light_speed},
                             {"rest_mass_kg", s.rest_mass},
                             {"compton_m", s.compton},
                             {"zb_frequency_2pi_hz", s.zb_frequency_hz},
                             {"oscillator_frequency_2pi_hz", std::isnan(s.oscillator_frequency_hz)
                                                                  ? Json()
                                                                  : Json(s.oscillator_frequency_hz)},
                             {"epsilon", std::isnan(s.epsilon) ? Json() : Json(s.epsilon)}});
    }
    const PlatformScale& soc_ref = table_reference_scales()[1];

    std::vector<Output> outputs;
    RunSummary summary;
    summary.diagnostics["jobs"] = Json::array();
    for (std::size_t j = 0; j < results.size(); ++j) {
        const EffectiveParams& e = results[j].report.mapped;
        const double two_pi = 2.0 * std::numbers::pi;
        CsvTable eff({"quantity", "value", "unit"});
        eff.add_row({std::string("c_eff"), e.c_eff, std::string("m/s")});
        eff.add_row({std::string("m_eff"), e.m_eff, std::string("kg")});
        eff.add_row({std::string("compton_eff"), e.compton_eff, std::string("m")});
        eff.add_row({std::string("zb_freq"), e.zb_freq, std::string("rad/s")});
        eff.add_row({std::string("omega_eff"), e.omega_eff, std::string("rad/s")});
        eff.add_row({std::string("epsilon_eff"), e.epsilon_eff, std::string("1")});
        eff.add_row({std::string("epsilon_from_energies"), e.epsilon_from_energies(), std::string("1")});
        eff.add_row({std::string("oscillator_length"), e.oscillator_length(), std::string("m")});
        eff.add_row({std::string("sigma_slope"), results[j].params.sigma_slope, std::string("rad/(s m)")});

        const ComparisonReport& rep = results[j].report;
        CsvTable cmp({"level", "soc_kinetic", "soc_no_kinetic", "mapped_do", "rel_err_no_kinetic", "rel_dev_kinetic",
                      "k_rms_over_k_r"});
        for (const ComparisonRow& r : rep.rows) {
            cmp.add_row({std::int64_t{r.level}, r.soc_kinetic, r.soc_no_kinetic, r.mapped_do, r.rel_err_no_kinetic,
                         r.rel_dev_kinetic, r.k_rms_over_k_r});
        }
        const Json diag = {
            {"epsilon_identity_defect", std::abs(e.epsilon_eff - e.epsilon_from_energies())},
            {"operator_identity_residual", rep.operator_identity_residual},
            {"max_rel_err_no_kinetic", rep.max_rel_err_no_kinetic},
            {"kinetic_deviation_monotone", rep.kinetic_deviation_monotone},
            {"valid_k_much_less_than_k_r", rep.valid_k_much_less_than_k_r},
            {"grid", {{"x_min", rep.grid.x_min}, {"x_max", rep.grid.x_max}, {"points", rep.grid.points}}},
            {"table_order_of_magnitude",
             {{"c_eff", same_order_of_magnitude(e.c_eff, soc_ref.light_speed)},
              {"m_eff", same_order_of_magnitude(e.m_eff, soc_ref.rest_mass)},
              {"compton_eff", same_order_of_magnitude(e.compton_eff, soc_ref.compton)},
              {"zb_freq", same_order_of_magnitude(e.zb_freq / two_pi, soc_ref.zb_frequency_hz)}}}};
        Json m = base_meta(rc, opt, rc.jobs[j]);
        m["tolerances"] = {{"edge_weight", 1e-8}, {"alias_weight", 1e-8}, {"k_over_k_r_validity", 0.1}};
        m["diagnostics"] = diag;
        m["table_reference"] = table_ref;
        summary.diagnostics["jobs"].push_back(diag);
        outputs.push_back({numbered("soc_effective", j), std::move(eff), m});
        outputs.push_back({numbered("soc_comparison", j), std::move(cmp), std::move(m)});
    }
    emit(opt.out_dir, summary, outputs);
    return summary;
}

}  // namespace

RunSummary run(const RunConfig& config, const CommandOptions& options) {
    fs::create_directories(options.out_dir);
    if (config.command == "spectrum") {
        return run_spectrum(config, options);
    }
    if (config.command == "evolve") {
        return run_evolve(config, options);
    }
    if (config.command == "backaction") {
        return run_backaction_command(config, options);
    }
    if (config.command == "sweep") {
        return run_sweep(config, options);
    }
    if (config.command == "fw-check") {
        return run_fw_check(config, options);
    }
    if (config.command == "soc-map") {
        return run_soc_map(config, options);
    }
    throw ConfigError("unknown command '" + config.command + "'");
}

int exit_code_for(const std::exception_ptr& error) {
    if (!error) {
        return 0;
    }
    try {
        std::rethrow_exception(error);
    } catch (const ConfigError&) {
        return 2;
    } catch (const InvalidArgument&) {
        return 2;
    } catch (const Json::exception&) {
        return 2;
    } catch (const fs::filesystem_error&) {
        return 2;
    } catch (const PhysicsGateError&) {
        return 3;
    } catch (const NumericalError&) {
        return 4;
    } catch (...) {
        return 4;
    }
}

int main_entry(int argc, char** argv) {
    CLI::App app{"Dirac oscillator measurement-backaction toolkit"};
    std::string config_path;
    std::string out_dir = ".";
    unsigned workers = 1;
    std::int64_t seed = 0;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--workers", workers, "worker threads for sweep points")->check(CLI::Range(1u, 1024u));
    app.add_option("--seed", seed, "reserved; all computations are deterministic");
    app.set_version_flag("--version", version());
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const CommandOptions options{out_dir, workers, seed, config_path};
    Json record = {{"version", version()}, {"config_path", config_path}, {"workers", workers}, {"seed", seed}};
    std::exception_ptr error;
    try {
        const RunConfig rc = load_config(config_path);
        record["command"] = rc.command;
        record["config"] = rc.document;
        record["jobs"] = rc.jobs.size();
        const RunSummary summary = run(rc, options);
        record["outputs"] = summary.outputs;
        record["diagnostics"] = summary.diagnostics;
    } catch (...) {
        error = std::current_exception();
        try {
            std::rethrow_exception(error);
        } catch (const std::exception& e) {
            record["error"] = e.what();
        } catch (...) {
            record["error"] = "unknown error";
        }
    }
    const int code = exit_code_for(error);
    record["status"] = code == 0 ? "ok" : "error";
    record["exit_code"] = code;
    try {
        fs::create_directories(out_dir);
        std::ofstream(fs::path(out_dir) / "run.json") << record.dump(2) << '\n';
    } catch (const std::exception& e) {
        std::cerr << "cannot write run.json: " << e.what() << '\n';
    }
    if (code != 0) {
        std::cerr << "error: " << record["error"].get<std::string>() << '\n';
    }
    return code;
}

}  // namespace dosc::cli
