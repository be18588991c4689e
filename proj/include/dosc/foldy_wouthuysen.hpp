#pragma once

// Foldy-Wouthuysen frame of the Dirac oscillator. The FW unitary maps
// |E_n^+> -> |n,up> and |E_n^-> -> |n,down>, so that
//     H_FW = sigma_z c sqrt((mc)^2 + p^2 + (m omega x)^2 - sigma_z m hbar omega)
// is diagonal in the Fock basis. Newton-Wigner operators are U^dagger A U.

#include "dosc/backaction.hpp"
#include "dosc/dirac_oscillator.hpp"
#include "dosc/hilbert.hpp"

#include <string>
#include <vector>

namespace dosc {

struct FWPair {
    Operator U;
    Operator H_FW_numeric;  // U H_DO U^dagger
    Operator H_FW_analytic;
    Operator interior_projector;
    int interior_levels;
};

// Rows |n,up> <- <E_n^+| for n < N, |n,down> <- <E_n^-| for n < N-1, and the
// unpaired edge state |N-1,down> mapped to itself. Exactly unitary.
Operator build_FW_unitary(const DiracParams& p);

// Spectral square root of the operator under the root. Throws
// PhysicsGateError if that operator is not positive definite.
Operator build_H_FW_analytic(const DiracParams& p);

// Projector on Fock levels n < floor(fraction * N).
int interior_level_count(const BasisSpec& basis, double fraction);
FWPair build_FW_pair(const DiracParams& p, double interior_fraction = 0.6);

// Newton-Wigner position, first order: x - (hbar/2mc) sigma_y.
Operator nw_position_first_order(const DiracParams& p);
Operator nw_position_exact(const DiracParams& p, const Operator& U);

// Sector interaction V = (g n_b + f sigma_z) x in the Newton-Wigner frame.
// The printed first-order form is
//     V - (sqrt(eps)/2) g n_b sigma_y + (sqrt(eps)/2) f (xp + px) sigma_x;
// the complete first-order expansion carries an extra -sqrt(eps) f x^2 sigma_y.
Operator build_sector_interaction(const DiracParams& p, double g_times_nb, double f);
Operator nw_measurement_interaction_first_order(const DiracParams& p, double g_times_nb, double f);
Operator nw_measurement_interaction_complete(const DiracParams& p, double g_times_nb, double f);
Operator nw_measurement_interaction_exact(const DiracParams& p, const Operator& U, double g_times_nb,
                                          double f);

// Spectral norm of A restricted to the lowest `levels` Fock levels.
double low_block_norm(const Operator& A, const BasisSpec& basis, int levels);
// Largest |entry| of P A P.
double interior_max_abs(const Operator& A, const Operator& interior_projector);

// Evolves (|n,up> + |n-1,down>)/sqrt 2 under H_FW_analytic + (g n_b + f sigma_z) x,
// the interaction written directly in FW variables.
Trajectory fw_energy_balanced_evolution(const DiracParams& p, int n, double g_times_nb, double f,
                                        const std::vector<double>& times);

// <x~(t)> = -(2 E_n^+ f/(m omega c)^2) sin^2(m c^2 omega t / 2 E_n^+),
// dimensionless position.
double fw_closed_form_x(double t, int n, double epsilon, double f);

struct CommutatorResidual {
    int power;
    double position;  // ||[x, H^n] - i n c^2 H^{n-2} p|| / ||[x, H^n]||
    double momentum;  // ||[p, H^n] + i n c^2 H^{n-2} x|| / ||[p, H^n]||
};

// Frobenius-norm relative residuals of the FW commutator identities on the
// interior, for powers 1, 2, 3. H^{-1} enters at power 1.
std::vector<CommutatorResidual> fw_commutator_residuals(const DiracParams& p, double interior_fraction = 0.6);

struct FWResidualRow {
    std::string quantity;
    double epsilon;
    int N;
    double interior_fraction;
    double residual;
};

struct FWCheckOptions {
    double interior_fraction = 0.6;
    int nw_levels = 10;
    double g_times_nb = 0.3;
    double f = 0.2;
};

std::vector<FWResidualRow> fw_residual_report(const DiracParams& p, const FWCheckOptions& options = {});

}  // namespace dosc
