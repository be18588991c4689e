#pragma once

// The one-dimensional Dirac oscillator
//     H_DO = c sigma_x p - m c omega sigma_y x + m c^2 sigma_z
// and its limits, together with the closed-form spectrum
//     E_n^+ = m c^2 sqrt(1 + 2 n eps),   E_n^- = -E_{n+1}^+
// and eigenstates
//     |E_n^+> = A_n |n,up> - i B_n |n-1,down>
//     |E_n^-> = B_{n+1} |n+1,up> + i A_{n+1} |n,down>.

#include "dosc/hilbert.hpp"

#include <vector>

namespace dosc {

enum class Branch { positive, negative };

struct DiracParams {
    double epsilon;
    BasisSpec basis;

    DiracParams(double eps, BasisSpec b = BasisSpec{});

    ModelUnits units() const { return ModelUnits(epsilon); }
    bool non_relativistic() const { return epsilon < 1.0; }
};

struct EigenCoefficients {
    double a;  // amplitude on |n,up>
    double b;  // amplitude on |n-1,down>
};

// Energies in units of hbar*omega.
double analytic_energy(int n, Branch branch, double epsilon);
EigenCoefficients analytic_coefficients(int n, double epsilon);
QuantumState analytic_eigenstate(int n, Branch branch, const DiracParams& p);

Operator build_H_DO(const DiracParams& p);
// (m c^2 + p^2/2m + m omega^2 x^2/2) sigma_z - hbar omega / 2
Operator build_H_nr(const DiracParams& p);
// Mass-free limit c sigma_x p - c m omega sigma_y x.
Operator build_H_weyl(const DiracParams& p);

struct SpectrumRow {
    int n;
    Branch branch;
    double numeric_energy;
    double analytic_energy;
    double overlap;  // |<numeric|analytic>|^2 after phase alignment
    double abs_error;
};

struct SpectrumReport {
    double epsilon;
    int fock_cutoff;
    int n_max;
    std::vector<SpectrumRow> rows;
    // Interior-supported numeric levels with |E| <= E_{n_max}^+ versus the
    // analytic count in the same window.
    int window_numeric_count;
    int window_analytic_count;
    double min_gap;

    double energy_tolerance() const { return 1e-9 / epsilon; }
    static constexpr double overlap_tolerance = 1e-9;
    bool passed() const;
};

// Diagonalises H_DO and checks every level n <= n_max of both branches
// against the closed forms. Throws PhysicsGateError when n_max > N/4, when
// a matched eigenvector leaks into the top 10% of the cutoff, or when two
// numeric levels come closer than 1e-8.
SpectrumReport validate_spectrum(const DiracParams& p, int n_max = 10);

// Energy and eigenstate-weight curves over a grid of epsilon values.
struct EnergyCurvePoint {
    double epsilon;
    int n;
    double e_plus_over_rest;   // E_n^+ / m c^2
    double e_minus_over_rest;  // E_n^- / m c^2
};

struct WeightCurvePoint {
    double epsilon;
    int n;
    double a_squared;
    double b_squared;
};

std::vector<EnergyCurvePoint> energy_curves(const std::vector<double>& epsilons, int n_max);
std::vector<WeightCurvePoint> weight_curves(const std::vector<double>& epsilons, int n_max);
// n_points values spaced uniformly in log10 between lo and hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n_points);

// Multiplies `numeric` by exp(-i arg <reference|numeric>).
Vector phase_align(const Vector& numeric, const Vector& reference);

}  // namespace dosc
