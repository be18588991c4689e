#pragma once

// Dirac oscillator coupled to a bosonic measuring mode b:
//     H_total = H + hbar omega_b b^dagger b + (g b^dagger b + f sigma_z) x.
// b^dagger b commutes with H_total, so each photon-number sector n_b evolves
// under H + (g n_b) x + f sigma_z x and system observables are a classical
// mixture over sectors weighted by the apparatus photon distribution.

#include "dosc/dirac_oscillator.hpp"
#include "dosc/hilbert.hpp"

#include <cstddef>
#include <vector>

namespace dosc {

enum class HamiltonianKind { full_dirac, nonrelativistic };

struct PhotonWeight {
    int n_b;
    double weight;
};

struct MeasurementConfig {
    double epsilon = 1e-4;
    int n = 1;              // initial state |Psi_n> = (|n,up> + |n-1,down>)/sqrt 2
    double G = 0.0;         // dimensionless measurement strength, = g <b^dagger b> in model units
    double f = 0.0;         // perturbation, units hbar omega / (sqrt 2 x_zpt)
    std::vector<PhotonWeight> apparatus{{1, 1.0}};
    double omega_b = 0.0;
    std::vector<double> times;
    BasisSpec basis{};
    double leakage_gate = 1e-8;
    double leakage_top_fraction = 0.1;

    // Throws InvalidArgument on any violated invariant.
    void validate() const;
    double mean_photon_number() const;
    // Bare coupling g fixed by G = g <b^dagger b>.
    double coupling() const;
};

// Observables and the per-time record of one backaction run. Positions are
// reported as <X>/(sqrt 2 x_zpt); all other columns in model units.
struct Trajectory {
    std::vector<double> t;
    std::vector<double> expX;
    std::vector<double> varX;
    std::vector<double> expSigmaZ;
    std::vector<double> expPi;
    std::vector<double> varPi;
    std::vector<double> leakage;

    std::size_t size() const { return t.size(); }
    void reserve(std::size_t n);
};

// X = x I, Pi = p sigma_z, Phi = x sigma_z, P = p I.
struct CompositeObservables {
    Operator X;
    Operator Pi;
    Operator Phi;
    Operator P;
};

CompositeObservables build_composite_observables(const BasisSpec& basis);

// |Psi_n> = (|n,up> + |n-1,down>)/sqrt 2, n >= 1.
QuantumState balanced_initial_state(const BasisSpec& basis, int n);

Operator build_H_sector(double epsilon, double g_times_nb, double f, const BasisSpec& basis,
                        HamiltonianKind kind = HamiltonianKind::full_dirac);

enum class TrajectoryFields { all, position_only };

// Evolves |Psi_n> in every photon sector and mixes the results. Throws
// PhysicsGateError ("raise cutoff") as soon as any sector's leakage reaches
// the gate at a sampled time.
Trajectory run_backaction(const MeasurementConfig& cfg, HamiltonianKind kind = HamiltonianKind::full_dirac,
                          TrajectoryFields fields = TrajectoryFields::all);

// Pure-state evolution under a single Hamiltonian with the same observables
// and leakage gate as run_backaction.
Trajectory evolve_state(const Operator& H, const QuantumState& psi0, const BasisSpec& basis,
                        const std::vector<double>& times, double leakage_gate = 1e-8,
                        double leakage_top_fraction = 0.1);

// Uniform grid with `points_per_period` samples per Zitterbewegung period
// pi*eps over [0, t_end].
std::vector<double> zitterbewegung_time_grid(double epsilon, double t_end, int points_per_period);
std::vector<double> uniform_time_grid(double t_start, double t_end, std::size_t points);

// Closed forms, model units, positions dimensionless.
double analytic_X_nr(double t, double f);
double analytic_DeltaX_nr(double t, int n, double G);
double analytic_X_corrected(double t, double f, int n, double epsilon, double G);
// Exact two-level result for G = f = 0:
//     <sigma_z(t)> = sqrt(2 n eps / (1 + 2 n eps)) sin(2 E_n^+ t).
double analytic_sigma_z(double t, int n, double epsilon);
double smearing_delta(int n, double epsilon, double G);

struct QmfsPoint {
    double X;
    double DeltaX;
};
// Two oscillators of opposite mass, both initially in the vacuum: the mean
// follows -2 f sin^2(t/2) and the width sqrt 2 x_zpt is untouched by G.
QmfsPoint qmfs_reference(double t, double f, double G);

// Smallest value of Delta X Delta Pi - |<sigma_z>|/2 along the trajectory.
double min_uncertainty_margin(const Trajectory& traj);

// Fit of <X(t)> to a slow oscillation plus the fast Zitterbewegung line.
struct SmearingEstimate {
    double delta_fitted = 0.0;
    double delta_analytic = 0.0;
    double zb_frequency_fitted = 0.0;
    double zb_frequency_fft = 0.0;
    double zb_frequency_exact = 0.0;  // 2 E_n^+
    double residual = 0.0;            // ||X - fit|| / ||X||
    bool regime_breakdown = false;    // residual above the threshold
};

struct SmearingFitOptions {
    double residual_threshold = 0.05;
    // Search half-width around the FFT peak, in FFT bins.
    double search_bins = 2.0;
};

SmearingEstimate estimate_smearing(const Trajectory& traj, const MeasurementConfig& cfg,
                                   const SmearingFitOptions& options = {});

}  // namespace dosc
