// Acceptance gate. Prints one PASS/FAIL line per criterion; with an argument
// (AC1 .. AC10) runs only that criterion. Exit status is non-zero if any
// selected criterion fails.

#include "dosc/backaction.hpp"
#include "dosc/cli/commands.hpp"
#include "dosc/cli/config.hpp"
#include "dosc/cli/worker_pool.hpp"
#include "dosc/dirac_oscillator.hpp"
#include "dosc/foldy_wouthuysen.hpp"
#include "dosc/soc_mapping.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace dosc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

const fs::path config_dir{DOSC_CONFIG_DIR};

cli::RunConfig shipped(const std::string& name) { return cli::load_config((config_dir / name).string()); }

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("dosc_acceptance_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

MeasurementConfig from_job(const cli::Json& job) {
    MeasurementConfig cfg;
    cfg.epsilon = job["epsilon"];
    cfg.n = job["n"];
    cfg.G = job["G"];
    cfg.f = job["f"];
    cfg.basis = BasisSpec(job["fock_cutoff"].get<int>());
    cfg.times = zitterbewegung_time_grid(cfg.epsilon, job["t_end"], job["points_per_period"]);
    cfg.validate();
    return cfg;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

// Spectrum oracle.
Outcome ac1() {
    Outcome o;
    const Stopwatch clock;
    double worst_energy = 0.0;
    double worst_overlap = 0.0;
    for (double eps : {0.01, 0.1, 1.0, 10.0}) {
        const SpectrumReport r = validate_spectrum(DiracParams(eps, BasisSpec(128)), 10);
        for (const SpectrumRow& row : r.rows) {
            worst_energy = std::max(worst_energy, row.abs_error * eps);  // in units of mc^2
            worst_overlap = std::max(worst_overlap, 1.0 - row.overlap);
        }
        o.require(r.rows.size() == 22, "row count at eps=" + std::to_string(eps));
    }
    const double t = clock.seconds();
    o.detail << "max|dE|/mc2=" << worst_energy << " max(1-overlap)=" << worst_overlap << " runtime=" << t << "s";
    o.require(worst_energy <= 1e-9, "energy tolerance 1e-9 mc^2");
    o.require(worst_overlap <= 1e-9, "overlap tolerance 1e-9");
    o.require(t < 5.0, "runtime < 5 s");
    return o;
}

// Energy and weight curves emitted as data.
Outcome ac2() {
    Outcome o;
    const fs::path out = scratch("ac2");
    cli::run(shipped("spectrum_curves.json"), {out, 1, 0, "spectrum_curves.json"});

    const auto energies = read_csv(out / "energy_curves.csv");
    const auto weights = read_csv(out / "weight_curves.csv");
    std::map<int, int> e_levels, w_levels;
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = 1; i < energies.size(); ++i) {
        ++e_levels[std::stoi(energies[i][1])];
        lo = std::min(lo, std::stod(energies[i][0]));
        hi = std::max(hi, std::stod(energies[i][0]));
    }
    double defect = 0.0;
    for (std::size_t i = 1; i < weights.size(); ++i) {
        ++w_levels[std::stoi(weights[i][1])];
        defect = std::max(defect, std::abs(std::stod(weights[i][2]) + std::stod(weights[i][3]) - 1.0));
    }
    o.require(e_levels.size() == 5 && e_levels.begin()->first == 0 && e_levels.rbegin()->first == 4,
              "energy curves for n = 0..4");
    o.require(w_levels.size() == 4 && w_levels.begin()->first == 0 && w_levels.rbegin()->first == 3,
              "weight curves for n = 0..3");
    o.require(std::abs(lo - 1e-2) < 1e-15 && std::abs(hi - 10.0) < 1e-12, "epsilon range [1e-2, 1e1]");

    // B_0 vanishes identically (|E_0^+> = |0,up>), so the equal-weight limit
    // concerns n >= 1.
    double limit = 0.0;
    for (const WeightCurvePoint& w : weight_curves({1e4}, 3)) {
        if (w.n >= 1) {
            limit = std::max({limit, std::abs(w.a_squared - 0.5), std::abs(w.b_squared - 0.5)});
        }
    }
    o.detail << "rows=" << energies.size() - 1 << "+" << weights.size() - 1
             << " max|A2+B2-1|=" << defect << " max|w-1/2|(eps=1e4, n=1..3)=" << limit;
    o.require(defect <= 2.0 * std::numeric_limits<double>::epsilon(), "normalization at machine precision");
    o.require(limit <= 1e-2, "weights within 1e-2 of 1/2 at eps = 1e4");
    return o;
}

// Non-relativistic backaction-free mean.
Outcome ac3() {
    Outcome o;
    const Stopwatch clock;
    const cli::RunConfig rc = shipped("nonrelativistic_backaction.json");
    std::vector<Trajectory> runs;
    double width = 0.0;
    for (const cli::Json& job : rc.jobs) {
        MeasurementConfig cfg = from_job(job);
        runs.push_back(run_backaction(cfg, HamiltonianKind::nonrelativistic));
        cfg.times = {std::numbers::pi};
        const Trajectory at_pi = run_backaction(cfg, HamiltonianKind::nonrelativistic);
        const double expected = ModelUnits(1.0).x_zpt() * std::sqrt(2.0 * cfg.n + 8.0 * cfg.G * cfg.G);
        width = std::max(width, std::abs(std::sqrt(at_pi.varX[0]) - expected));
    }
    double mean = 0.0;
    for (std::size_t k = 1; k < runs.size(); ++k) {
        for (std::size_t i = 0; i < runs[0].size(); ++i) {
            mean = std::max(mean, std::abs(runs[k].expX[i] - runs[0].expX[i]));
        }
    }
    const double t = clock.seconds();
    o.detail << "G in {0,0.05,0.25}: max|<X>_G-<X>_0|=" << mean << " max|DeltaX(pi)-x_zpt sqrt(2n+8G^2)|=" << width
             << " runtime=" << t << "s";
    o.require(rc.jobs.size() == 3, "three G values");
    o.require(mean <= 1e-8, "mean independent of G to 1e-8");
    o.require(width <= 1e-8, "width formula to 1e-8");
    o.require(t < 30.0, "runtime < 30 s");
    return o;
}

// Full Dirac oscillator trajectories across the three regimes.
Outcome ac4() {
    Outcome o;
    const Stopwatch clock;
    const cli::RunConfig rc = shipped("backaction_regimes.json");
    struct Row {
        MeasurementConfig cfg;
        double deviation;
        double dip;
        SmearingEstimate fit;
    };
    const auto rows = cli::parallel_map<Row>(rc.jobs.size(), workers(), [&](std::size_t j) {
        MeasurementConfig cfg = from_job(rc.jobs[j]);
        const Trajectory tr = run_backaction(cfg, HamiltonianKind::full_dirac, TrajectoryFields::position_only);
        double dev = 0.0, dip = 0.0, best = 1e300;
        for (std::size_t i = 0; i < tr.size(); ++i) {
            dev = std::max(dev, std::abs(tr.expX[i] - analytic_X_corrected(tr.t[i], cfg.f, cfg.n, cfg.epsilon, cfg.G)));
            if (std::abs(tr.t[i] - std::numbers::pi) < best) {
                best = std::abs(tr.t[i] - std::numbers::pi);
                dip = tr.expX[i];
            }
        }
        const SmearingEstimate fit = estimate_smearing(tr, cfg, {rc.jobs[j]["residual_threshold"].get<double>()});
        cfg.times.clear();
        return Row{cfg, dev, dip, fit};
    });
    for (const Row& r : rows) {
        o.detail << " eps=" << r.cfg.epsilon << ",G=" << r.cfg.G << ":";
        if (r.cfg.epsilon == 1e-4) {
            o.detail << " dev=" << r.deviation << " X(pi)=" << r.dip;
            o.require(r.deviation < 1e-2, "eps=1e-4 trajectory within 1e-2 of the closed form");
            o.require(std::abs(r.dip + 2.0 * r.cfg.f) < 1e-2, "dip to -0.2 at t = pi");
        } else if (r.cfg.epsilon == 1e-2) {
            const double df = std::abs(r.fit.zb_frequency_fitted / r.fit.zb_frequency_exact - 1.0);
            o.detail << " residual=" << r.fit.residual << " |W/2E-1|=" << df;
            o.require(r.fit.residual < 0.05, "eps=1e-2 fit residual < 5%");
            o.require(df < 0.02, "eps=1e-2 fast frequency within 2% of 2E_1");
        } else {
            o.detail << " residual=" << r.fit.residual << " breakdown=" << r.fit.regime_breakdown;
            o.require(r.fit.regime_breakdown, "eps=0.1 regime-breakdown flag");
        }
    }
    const double t = clock.seconds();
    o.detail << " runtime=" << t << "s";
    o.require(rows.size() == 6, "six trajectories");
    o.require(t < 600.0, "runtime < 10 min");
    return o;
}

// Smearing law.
Outcome ac5() {
    Outcome o;
    const cli::RunConfig rc = shipped("smearing_sweep.json");
    struct Row {
        MeasurementConfig cfg;
        SmearingEstimate fit;
    };
    const auto rows = cli::parallel_map<Row>(rc.jobs.size(), workers(), [&](std::size_t j) {
        MeasurementConfig cfg = from_job(rc.jobs[j]);
        const Trajectory tr = run_backaction(cfg, HamiltonianKind::full_dirac, TrajectoryFields::position_only);
        const SmearingEstimate fit = estimate_smearing(tr, cfg);
        cfg.times.clear();
        return Row{cfg, fit};
    });
    double worst = 0.0, lo = 1e300, hi = 0.0;
    std::map<std::pair<int, double>, std::vector<std::pair<double, double>>> groups;
    for (const Row& r : rows) {
        const double ratio = r.fit.delta_fitted / r.fit.delta_analytic;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        worst = std::max(worst, std::abs(ratio - 1.0));
        groups[{r.cfg.n, r.cfg.G}].push_back({std::log(r.cfg.epsilon), std::log(r.fit.delta_fitted)});
    }
    double slope_dev = 0.0;
    o.detail << "delta_fitted/delta_analytic in [" << lo << ", " << hi << "]; slopes:";
    for (const auto& [key, pts] : groups) {
        double mx = 0.0, my = 0.0;
        for (const auto& [x, y] : pts) {
            mx += x / pts.size();
            my += y / pts.size();
        }
        double sxy = 0.0, sxx = 0.0;
        for (const auto& [x, y] : pts) {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
        }
        const double slope = sxy / sxx;
        slope_dev = std::max(slope_dev, std::abs(slope - 0.5));
        o.detail << " (n=" << key.first << ",G=" << key.second << ")=" << slope;
    }
    o.require(rows.size() == 20, "20 sweep points");
    o.require(worst <= 0.1, "delta_fitted within 10% of sqrt(2 n eps) G");
    o.require(slope_dev <= 0.05, "log-log slope 0.5 +- 0.05");
    return o;
}

// Exact <sigma_z(t)> of the free oscillator.
Outcome ac6() {
    Outcome o;
    double worst = 0.0, worst_oracle = 0.0;
    for (double eps : {1e-3, 1e-2}) {
        for (int n : {1, 2}) {
            MeasurementConfig cfg;
            cfg.epsilon = eps;
            cfg.n = n;
            cfg.G = 0.0;
            cfg.f = 0.0;
            cfg.basis = BasisSpec(32);
            cfg.times = zitterbewegung_time_grid(eps, 2.0 * std::numbers::pi, 8);
            const Trajectory tr = run_backaction(cfg);
            for (std::size_t i = 0; i < tr.size(); ++i) {
                worst = std::max(worst, std::abs(tr.expSigmaZ[i] - analytic_sigma_z(tr.t[i], n, eps)));
                if (i % 97 == 0) {
                    worst_oracle = std::max(worst_oracle, std::abs(analytic_sigma_z(tr.t[i], n, eps) -
                                                                   oracle::two_level_sigma_z(n, eps, tr.t[i])));
                }
            }
        }
    }
    o.detail << "t in [0, 2pi]: max|<sz>-sqrt(2n eps/(1+2n eps)) sin(2E t)|=" << worst
             << " closed form vs 2x2 exponential=" << worst_oracle;
    o.require(worst <= 1e-8, "trajectory matches the sine form to 1e-8");
    o.require(worst_oracle <= 1e-8, "sine form matches the independent two-level exponential");
    return o;
}

// Sector decomposition versus the full tensor-product space.
Outcome ac7() {
    Outcome o;
    const int N = 16, app_dim = 4;
    const double eps = 0.05, f = 0.1, g = 0.15, omega_b = 0.8;
    double worst_x = 0.0, worst_nb = 0.0;
    const std::vector<std::vector<std::pair<int, double>>> distributions{{{1, 1.0}}, {{1, 0.25}, {3, 0.75}}};
    for (const auto& dist : distributions) {
        MeasurementConfig cfg;
        cfg.epsilon = eps;
        cfg.n = 1;
        cfg.f = f;
        cfg.omega_b = omega_b;
        cfg.basis = BasisSpec(N);
        cfg.apparatus.clear();
        for (const auto& [k, w] : dist) {
            cfg.apparatus.push_back({k, w});
        }
        cfg.G = g * cfg.mean_photon_number();
        cfg.times = uniform_time_grid(0.0, 2.0 * std::numbers::pi, 41);
        cfg.leakage_gate = 1.0;  // both sides share the same truncation
        const Trajectory tr = run_backaction(cfg);
        const auto ref = oracle::composite_evolution(N, app_dim, eps, g, f, omega_b, 1, dist, cfg.times);
        for (std::size_t i = 0; i < tr.size(); ++i) {
            worst_x = std::max(worst_x, std::abs(tr.expX[i] - ref[i].x));
            worst_nb = std::max(worst_nb, std::abs(ref[i].photons - cfg.mean_photon_number()));
        }
    }
    o.detail << "N=16, apparatus dim 4: max|<X>_sectors-<X>_full|=" << worst_x << " max|<b+b>(t)-<b+b>(0)|=" << worst_nb;
    o.require(worst_x <= 1e-10, "<X> to 1e-10");
    o.require(worst_nb <= 1e-10, "<b^dagger b> constant to 1e-10");
    return o;
}

// Foldy-Wouthuysen suite.
Outcome ac8() {
    Outcome o;
    const cli::RunConfig rc = shipped("fw_check.json");
    double diag = 0.0;
    double comm = 0.0;
    for (const cli::Json& job : rc.jobs) {
        const double eps = job["epsilon"];
        const DiracParams p(eps, BasisSpec(job["fock_cutoff"].get<int>()));
        FWCheckOptions opt;
        opt.interior_fraction = job["interior_fraction"];
        for (const FWResidualRow& r : fw_residual_report(p, opt)) {
            if (r.quantity == "diagonalization") {
                diag = std::max(diag, r.residual);
            }
            if (r.quantity.rfind("commutator_", 0) == 0) {
                comm = std::max(comm, r.residual);
                o.detail << " " << r.quantity.substr(11) << "(eps=" << eps << ")=" << r.residual;
            }
        }
    }
    std::vector<double> nw;
    for (double eps : {0.04, 0.02, 0.01}) {
        const DiracParams p(eps, BasisSpec(128));
        const FWPair fw = build_FW_pair(p);
        nw.push_back(low_block_norm(nw_position_exact(p, fw.U) - nw_position_first_order(p), p.basis, 10));
    }
    const double r1 = nw[0] / nw[1];
    const double r2 = nw[1] / nw[2];
    o.detail << " | diag_max=" << diag << " NW ratios=" << r1 << "," << r2 << " max commutator residual=" << comm;
    o.require(diag < 1e-6, "U H U^dagger = H_FW on the interior to 1e-6");
    o.require(std::abs(r1 - 2.0) <= 0.2 && std::abs(r2 - 2.0) <= 0.2, "NW residual ratio 2 +- 0.2");
    // Odd powers hold only to leading order in eps; report how they behave deep
    // in the non-relativistic regime without letting that decide the verdict.
    double small = 0.0;
    for (const CommutatorResidual& r : fw_commutator_residuals(DiracParams(1e-6, BasisSpec(256)))) {
        small = std::max({small, r.position, r.momentum});
    }
    o.detail << " (info: max commutator residual at eps=1e-6 is " << small << ")";
    o.require(comm <= 1e-6, "commutator identities n = 1, 2, 3 to 1e-6 relative");
    return o;
}

// Operator identities and the uncertainty relation on shipped runs.
Outcome ac9() {
    Outcome o;
    const BasisSpec basis(64);
    const CompositeObservables ops = build_composite_observables(basis);
    const Operator P = build_fock_projector(basis, 0, basis.fock_cutoff - 1);
    const double x2 = (ops.X * ops.X - ops.Phi * ops.Phi).max_abs();
    const double p2 = (ops.P * ops.P - ops.Pi * ops.Pi).max_abs();
    const double xpi =
        (P * (commutator(ops.X, ops.Pi) - Complex(0.0, 1.0) * build_spin(basis, Axis::z)) * P).max_abs();
    o.detail << "X2-Phi2=" << x2 << " P2-Pi2=" << p2 << " [X,Pi]-i sz (interior)=" << xpi;
    o.require(x2 <= 1e-12 && p2 <= 1e-12 && xpi <= 1e-12, "entrywise operator identities");

    int runs = 0;
    double margin = std::numeric_limits<double>::infinity();
    std::vector<fs::path> configs;
    for (const auto& entry : fs::directory_iterator(config_dir)) {
        if (entry.path().extension() == ".json") {
            configs.push_back(entry.path());
        }
    }
    std::sort(configs.begin(), configs.end());
    for (const fs::path& path : configs) {
        const cli::RunConfig rc = cli::load_config(path.string());
        if (rc.command != "evolve" && rc.command != "backaction") {
            continue;  // no trajectories
        }
        const fs::path out = scratch("ac9_" + path.stem().string());
        const cli::RunSummary s = cli::run(rc, {out, workers(), 0, path.string()});
        for (const cli::Json& job : s.diagnostics["jobs"]) {
            ++runs;
            margin = std::min(margin, job["min_uncertainty_margin"].get<double>());
        }
        fs::remove_all(out);
    }
    o.detail << " shipped trajectory runs=" << runs << " min(DX DPi - |<sz>|/2)=" << margin;
    o.require(runs > 0, "at least one shipped trajectory");
    o.require(margin >= 0.0, "uncertainty relation at every sampled point");
    return o;
}

// Condensate mapping.
Outcome ac10() {
    Outcome o;
    const fs::path out = scratch("ac10");
    const cli::RunConfig rc = shipped("soc_map.json");
    const cli::RunSummary s = cli::run(rc, {out, workers(), 0, "soc_map.json"});
    for (std::size_t j = 0; j < rc.jobs.size(); ++j) {
        const cli::Json& d = s.diagnostics["jobs"][j];
        const double eps = rc.jobs[j]["epsilon_target"];
        const double defect = d["epsilon_identity_defect"];
        const double err = d["max_rel_err_no_kinetic"];
        const bool monotone = d["kinetic_deviation_monotone"];
        bool table = true;
        for (const auto& [k, v] : d["table_order_of_magnitude"].items()) {
            table = table && v.get<bool>();
        }
        o.detail << " eps=" << eps << ": |eps-hbar w/mc2|=" << defect << " rel_err(10 levels)=" << err
                 << " monotone=" << monotone << " table_rows=" << table;
        o.require(defect <= 2.0 * std::numeric_limits<double>::epsilon() * eps, "epsilon identity at machine precision");
        o.require(err <= 1e-6, "kinetic-free spectrum to 1e-6 relative");
        o.require(monotone, "kinetic deviation monotone in level");
        o.require(table, "order-of-magnitude table rows");
        const auto cmp = read_csv(out / ("soc_comparison_00" + std::to_string(j) + ".csv"));
        o.require(cmp.size() == 11, "ten compared levels");
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
        {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}};
    const std::string only = argc > 1 ? argv[1] : "";
    bool all_pass = true;
    bool matched = false;
    for (const auto& [name, fn] : criteria) {
        if (!only.empty() && only != name) {
            continue;
        }
        matched = true;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [error: " << e.what() << "]";
        }
        std::cout << name << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << o.detail.str() << std::endl;
        all_pass = all_pass && o.pass;
    }
    if (!matched) {
        std::cerr << "unknown criterion '" << only << "'\n";
        return 2;
    }
    return all_pass ? 0 : 1;
}
