#pragma once

// Spin-orbit-coupled condensate as a Dirac oscillator analog. After the
// pseudo-spin rotation the single-atom Hamiltonian reads
//     H_s / hbar = hbar k_r^2/2m_a + (hbar k_r/m_a) k sigma_x - varsigma x sigma_y + chi sigma_z
//                  [+ hbar k^2/2m_a] [+ (delta/2) sigma_x]
// which is H_DO/hbar with c -> hbar k_r/m_a and m c^2 -> hbar chi.
// Everything here is SI; grid Hamiltonians are in angular frequency units.

#include "dosc/hilbert.hpp"

#include <string>
#include <vector>

namespace dosc {

namespace si {
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double rb87_mass = 1.443160648e-25;  // kg
}  // namespace si

struct SOCParams {
    double k_r = 0.0;          // 1/m
    double chi = 0.0;          // rad/s
    double sigma_slope = 0.0;  // varsigma, rad/(s m)
    double m_a = 0.0;          // kg
    double delta = 0.0;        // rad/s

    void validate() const;
};

struct EffectiveParams {
    double c_eff;        // m/s
    double m_eff;        // kg
    double compton_eff;  // reduced Compton wavelength, m
    double zb_freq;      // rad/s
    double omega_eff;    // rad/s
    double epsilon_eff;

    // hbar omega / m c^2 from the other fields.
    double epsilon_from_energies() const;
    // sqrt(hbar / m omega), m. Infinite for omega = 0.
    double oscillator_length() const;
};

// Throws InvalidArgument for chi = 0 or delta != 0.
EffectiveParams map_parameters(const SOCParams& p);

// varsigma giving the requested epsilon for fixed k_r, chi, m_a.
double slope_for_epsilon(double epsilon, double k_r, double chi, double m_a);

struct PositionGrid {
    double x_min;
    double x_max;
    int points;

    // Periodic grid: x_j = x_min + j dx, dx = (x_max - x_min)/points.
    double spacing() const;
    std::vector<double> positions() const;
    // FFT-ordered wavenumbers, Nyquist entry set to 0.
    std::vector<double> wavenumbers() const;
};

enum class KineticTerm { suppressed, included };

// Basis index 2 j + s. Requires points >= 256.
Operator build_soc_hamiltonian_grid(const SOCParams& p, const PositionGrid& grid, KineticTerm kinetic);

// H_DO of the mapped parameters, divided by hbar, on the same grid.
Operator build_mapped_dirac_grid(const SOCParams& p, const PositionGrid& grid);

// Centered grid of half-width `lengths` oscillator lengths.
PositionGrid default_grid(const SOCParams& p, double lengths = 12.0, int points = 512);

struct ComparisonRow {
    int level;                // n of E_n^+
    double soc_kinetic;       // rad/s
    double soc_no_kinetic;    // rad/s
    double mapped_do;         // hbar k_r^2/2m_a + chi sqrt(1 + 2 n eps)
    double rel_err_no_kinetic;  // relative to the level above the constant
    double rel_dev_kinetic;
    double k_rms_over_k_r;
};

struct ComparisonReport {
    EffectiveParams mapped;
    PositionGrid grid;
    std::vector<ComparisonRow> rows;
    double operator_identity_residual;  // max |H_no_kinetic - H_mapped - const|
    double max_rel_err_no_kinetic;
    bool kinetic_deviation_monotone;
    bool valid_k_much_less_than_k_r;  // every k_rms / k_r below 0.1
};

// Compares the lowest n_levels positive-branch levels. Throws
// PhysicsGateError when a compared eigenvector puts more than 1e-8 of its
// weight in the outer 10% of the grid or the top 10% of |k| (aliasing).
ComparisonReport compare_soc_vs_do(const SOCParams& p, const PositionGrid& grid, int n_levels);

// Order-of-magnitude entries of the mapping table, used in report footers.
struct PlatformScale {
    std::string platform;
    double light_speed;      // m/s
    double rest_mass;        // kg
    double compton;          // m
    double zb_frequency_hz;  // units of 2 pi Hz
    double oscillator_frequency_hz;
    double epsilon;
};

const std::vector<PlatformScale>& table_reference_scales();

// |log10(value / reference)| <= 1.
bool same_order_of_magnitude(double value, double reference);

}  // namespace dosc
