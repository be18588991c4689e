#include "dosc/soc_mapping.hpp"

#include "dosc/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace dosc {

void SOCParams::validate() const {
    if (!(k_r > 0.0) || !std::isfinite(k_r)) {
        throw InvalidArgument("k_r must be finite and > 0");
    }
    if (!(chi >= 0.0) || !std::isfinite(chi)) {
        throw InvalidArgument("chi must be finite and >= 0");
    }
    if (!(sigma_slope >= 0.0) || !std::isfinite(sigma_slope)) {
        throw InvalidArgument("sigma_slope must be finite and >= 0");
    }
    if (!(m_a > 0.0) || !std::isfinite(m_a)) {
        throw InvalidArgument("m_a must be finite and > 0");
    }
    if (!std::isfinite(delta)) {
        throw InvalidArgument("delta must be finite");
    }
}

double EffectiveParams::epsilon_from_energies() const {
    return si::hbar * omega_eff / (m_eff * c_eff * c_eff);
}

double EffectiveParams::oscillator_length() const {
    if (omega_eff == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return std::sqrt(si::hbar / (m_eff * omega_eff));
}

EffectiveParams map_parameters(const SOCParams& p) {
    p.validate();
    if (p.chi == 0.0) {
        throw InvalidArgument("chi = 0 makes the mapped rest mass vanish");
    }
    if (p.delta != 0.0) {
        throw InvalidArgument("the Dirac oscillator mapping holds only for delta = 0");
    }
    EffectiveParams e{};
    e.c_eff = si::hbar * p.k_r / p.m_a;
    e.m_eff = si::hbar * p.chi / (e.c_eff * e.c_eff);
    e.compton_eff = si::hbar * p.k_r / (p.chi * p.m_a);
    e.zb_freq = 2.0 * p.chi;
    e.omega_eff = si::hbar * p.k_r * p.sigma_slope / (p.m_a * p.chi);
    e.epsilon_eff = si::hbar * p.k_r * p.sigma_slope / (p.m_a * p.chi * p.chi);
    return e;
}

double slope_for_epsilon(double epsilon, double k_r, double chi, double m_a) {
    if (!(epsilon >= 0.0) || !(k_r > 0.0) || !(chi > 0.0) || !(m_a > 0.0)) {
        throw InvalidArgument("slope_for_epsilon needs epsilon >= 0 and positive k_r, chi, m_a");
    }
    return epsilon * m_a * chi * chi / (si::hbar * k_r);
}

double PositionGrid::spacing() const { return (x_max - x_min) / points; }

std::vector<double> PositionGrid::positions() const {
    std::vector<double> x(static_cast<std::size_t>(points));
    for (int j = 0; j < points; ++j) {
        x[static_cast<std::size_t>(j)] = x_min + j * spacing();
    }
    return x;
}

std::vector<double> PositionGrid::wavenumbers() const {
    const double dk = 2.0 * std::numbers::pi / (x_max - x_min);
    std::vector<double> k(static_cast<std::size_t>(points));
    for (int j = 0; j < points; ++j) {
        const int m = j <= points / 2 ? j : j - points;
        k[static_cast<std::size_t>(j)] = (points % 2 == 0 && j == points / 2) ? 0.0 : m * dk;
    }
    return k;
}

namespace {

void check_grid(const PositionGrid& grid) {
    if (grid.points < 256) {
        throw InvalidArgument("SOC grid needs at least 256 points");
    }
    if (!(grid.x_max > grid.x_min) || !std::isfinite(grid.x_min) || !std::isfinite(grid.x_max)) {
        throw InvalidArgument("SOC grid needs finite x_min < x_max");
    }
}

// Unitary DFT matrix F, F_{kj} = exp(-2 pi i k j / P)/sqrt P.
Matrix dft_matrix(int points) {
    Matrix f(points, points);
    const double scale = 1.0 / std::sqrt(static_cast<double>(points));
    for (int k = 0; k < points; ++k) {
        for (int j = 0; j < points; ++j) {
            const long long kj = (static_cast<long long>(k) * j) % points;
            f(k, j) = std::polar(scale, -2.0 * std::numbers::pi * static_cast<double>(kj) / points);
        }
    }
    return f;
}

// Single-component operator on the grid, lifted to 2x2 spin blocks.
Matrix lift(const Matrix& a, const Eigen::Matrix2cd& s) {
    const Eigen::Index P = a.rows();
    Matrix out(2 * P, 2 * P);
    for (Eigen::Index c = 0; c < P; ++c) {
        for (Eigen::Index r = 0; r < P; ++r) {
            out.block<2, 2>(2 * r, 2 * c) = a(r, c) * s;
        }
    }
    return out;
}

struct GridOperators {
    Matrix F;
    Matrix k;   // spectral derivative -i d/dx
    Matrix k2;  // spectral -d^2/dx^2
    Matrix x;
};

GridOperators grid_operators(const PositionGrid& grid) {
    check_grid(grid);
    GridOperators g;
    g.F = dft_matrix(grid.points);
    const std::vector<double> kv = grid.wavenumbers();
    const Eigen::Map<const RealVector> kvec(kv.data(), grid.points);
    const double dk = 2.0 * std::numbers::pi / (grid.x_max - grid.x_min);
    RealVector k2vec(grid.points);
    for (int j = 0; j < grid.points; ++j) {
        const int m = j <= grid.points / 2 ? j : j - grid.points;
        k2vec(j) = m * dk * m * dk;
    }
    g.k = g.F.adjoint() * kvec.cast<Complex>().asDiagonal() * g.F;
    g.k = 0.5 * (g.k + g.k.adjoint()).eval();
    g.k2 = g.F.adjoint() * k2vec.cast<Complex>().asDiagonal() * g.F;
    g.k2 = 0.5 * (g.k2 + g.k2.adjoint()).eval();
    const std::vector<double> xv = grid.positions();
    g.x = Eigen::Map<const RealVector>(xv.data(), grid.points).cast<Complex>().asDiagonal();
    return g;
}

const Eigen::Matrix2cd& pauli(Axis a) {
    static const Eigen::Matrix2cd sx = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
    static const Eigen::Matrix2cd sy =
        (Eigen::Matrix2cd() << 0, Complex(0, -1), Complex(0, 1), 0).finished();
    static const Eigen::Matrix2cd sz = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
    return a == Axis::x ? sx : (a == Axis::y ? sy : sz);
}

Matrix soc_matrix(const SOCParams& p, const GridOperators& g, int points, KineticTerm kinetic) {
    const double recoil_velocity = si::hbar * p.k_r / p.m_a;
    const Matrix id = Matrix::Identity(points, points);
    Matrix h = lift(recoil_velocity * g.k, pauli(Axis::x)) - lift(p.sigma_slope * g.x, pauli(Axis::y)) +
               lift(p.chi * id, pauli(Axis::z)) + lift(0.5 * p.delta * id, pauli(Axis::x));
    h.diagonal().array() += 0.5 * recoil_velocity * p.k_r;
    if (kinetic == KineticTerm::included) {
        h += lift(si::hbar / (2.0 * p.m_a) * g.k2, Eigen::Matrix2cd::Identity());
    }
    return 0.5 * (h + h.adjoint());
}

}  // namespace

Operator build_soc_hamiltonian_grid(const SOCParams& p, const PositionGrid& grid, KineticTerm kinetic) {
    p.validate();
    return Operator(soc_matrix(p, grid_operators(grid), grid.points, kinetic));
}

Operator build_mapped_dirac_grid(const SOCParams& p, const PositionGrid& grid) {
    const EffectiveParams e = map_parameters(p);
    const GridOperators g = grid_operators(grid);
    const Matrix id = Matrix::Identity(grid.points, grid.points);
    // H_DO/hbar = c sigma_x k - (m c omega/hbar) x sigma_y + (m c^2/hbar) sigma_z
    const Matrix h = lift(e.c_eff * g.k, pauli(Axis::x)) -
                     lift(e.m_eff * e.c_eff * e.omega_eff / si::hbar * g.x, pauli(Axis::y)) +
                     lift(e.m_eff * e.c_eff * e.c_eff / si::hbar * id, pauli(Axis::z));
    return Operator(0.5 * (h + h.adjoint()));
}

PositionGrid default_grid(const SOCParams& p, double lengths, int points) {
    const double ell = map_parameters(p).oscillator_length();
    if (!std::isfinite(ell)) {
        throw InvalidArgument("no oscillator length for sigma_slope = 0; give the grid explicitly");
    }
    return {-lengths * ell, lengths * ell, points};
}

ComparisonReport compare_soc_vs_do(const SOCParams& p, const PositionGrid& grid, int n_levels) {
    if (n_levels < 1) {
        throw InvalidArgument("n_levels must be >= 1");
    }
    const EffectiveParams e = map_parameters(p);
    const GridOperators g = grid_operators(grid);
    const int P = grid.points;
    const double offset = 0.5 * si::hbar * p.k_r * p.k_r / p.m_a;

    const Matrix h_plain = soc_matrix(p, g, P, KineticTerm::suppressed);
    const Matrix h_kin = soc_matrix(p, g, P, KineticTerm::included);
    const Matrix h_map = build_mapped_dirac_grid(p, grid).matrix();

    ComparisonReport report{e, grid, {}, 0.0, 0.0, true, true};
    Matrix shifted = h_map;
    shifted.diagonal().array() += offset;
    report.operator_identity_residual = (h_plain - shifted).cwiseAbs().maxCoeff() / h_map.cwiseAbs().maxCoeff();

    const Eigen::SelfAdjointEigenSolver<Matrix> plain(h_plain);
    const Eigen::SelfAdjointEigenSolver<Matrix> kin(h_kin);
    if (plain.info() != Eigen::Success || kin.info() != Eigen::Success) {
        throw NumericalError("eigensolver failed on the SOC grid Hamiltonian", 0.0);
    }

    // Positive branch: ascending eigenvalues above the constant offset.
    Eigen::Index first = 0;
    while (first < plain.eigenvalues().size() && plain.eigenvalues()(first) <= offset) {
        ++first;
    }
    const std::vector<double> kv = grid.wavenumbers();
    double k_max = 0.0;
    for (double k : kv) {
        k_max = std::max(k_max, std::abs(k));
    }
    const int edge = std::max(1, P / 20);  // 5% per side, 10% total

    auto spatial_and_momentum = [&](const Vector& v, double& edge_weight, double& alias_weight, double& k_rms) {
        edge_weight = alias_weight = 0.0;
        double k2 = 0.0;
        for (int s = 0; s < 2; ++s) {
            Vector comp(P);
            for (int j = 0; j < P; ++j) {
                comp(j) = v(2 * j + s);
                if (j < edge || j >= P - edge) {
                    edge_weight += std::norm(comp(j));
                }
            }
            const Vector phi = g.F * comp;
            for (int j = 0; j < P; ++j) {
                const double w = std::norm(phi(j));
                const double k = kv[static_cast<std::size_t>(j)];
                if (std::abs(k) > 0.9 * k_max || (P % 2 == 0 && j == P / 2)) {
                    alias_weight += w;
                }
                k2 += w * k * k;
            }
        }
        k_rms = std::sqrt(k2);
    };

    // Periodic wrap-around of x leaves a mass-domain-wall at the grid edge
    // whose bound states fall inside the low-energy window; they are skipped.
    std::vector<Eigen::Index> levels;
    for (Eigen::Index idx = first; idx < plain.eigenvalues().size() && static_cast<int>(levels.size()) < n_levels;
         ++idx) {
        double edge_weight = 0.0;
        double alias_weight = 0.0;
        double k_rms = 0.0;
        spatial_and_momentum(plain.eigenvectors().col(idx), edge_weight, alias_weight, k_rms);
        if (edge_weight < 0.5 && alias_weight < 0.5) {
            levels.push_back(idx);
        }
    }
    if (static_cast<int>(levels.size()) < n_levels) {
        throw PhysicsGateError("grid holds fewer than " + std::to_string(n_levels) + " interior levels");
    }

    double prev_dev = -1.0;
    for (int n = 0; n < n_levels; ++n) {
        const Eigen::Index idx = levels[static_cast<std::size_t>(n)];
        const Vector v = plain.eigenvectors().col(idx);
        double edge_weight = 0.0;
        double alias_weight = 0.0;
        double k_rms = 0.0;
        spatial_and_momentum(v, edge_weight, alias_weight, k_rms);
        if (edge_weight > 1e-8 || alias_weight > 1e-8) {
            throw PhysicsGateError("level " + std::to_string(n) + " reaches the grid edge (weight " +
                                   std::to_string(edge_weight) + ") or aliases (weight " +
                                   std::to_string(alias_weight) + "); widen or refine the grid");
        }
        // Continue the level into the kinetic spectrum by maximal overlap.
        Eigen::Index match = 0;
        (kin.eigenvectors().adjoint() * v).cwiseAbs2().maxCoeff(&match);

        const double level_gap = p.chi * std::sqrt(1.0 + 2.0 * n * e.epsilon_eff);
        ComparisonRow row{};
        row.level = n;
        row.soc_no_kinetic = plain.eigenvalues()(idx);
        row.soc_kinetic = kin.eigenvalues()(match);
        row.mapped_do = offset + level_gap;
        row.rel_err_no_kinetic = std::abs(row.soc_no_kinetic - row.mapped_do) / level_gap;
        row.rel_dev_kinetic = std::abs(row.soc_kinetic - row.mapped_do) / level_gap;
        row.k_rms_over_k_r = k_rms / p.k_r;
        report.max_rel_err_no_kinetic = std::max(report.max_rel_err_no_kinetic, row.rel_err_no_kinetic);
        if (row.rel_dev_kinetic <= prev_dev) {
            report.kinetic_deviation_monotone = false;
        }
        prev_dev = row.rel_dev_kinetic;
        if (row.k_rms_over_k_r >= 0.1) {
            report.valid_k_much_less_than_k_r = false;
        }
        report.rows.push_back(row);
    }
    return report;
}

const std::vector<PlatformScale>& table_reference_scales() {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    static const std::vector<PlatformScale> scales{
        {"electron", 1e8, 1e-31, 1e-12, 1e21, nan, nan},
        {"soc_condensate", 1e-2, 1e-27, 1e-5, 1e3, 1e4, 10.0},
        {"cqed", 10.0, 1e-26, 1e-9, 1e10, 1e10, 1.0},
        {"ion", 1e-3, 1e-23, 1e-8, 1e5, 1e6, 10.0},
    };
    return scales;
}

bool same_order_of_magnitude(double value, double reference) {
    if (!(value > 0.0) || !(reference > 0.0)) {
        return false;
    }
    return std::abs(std::log10(value / reference)) <= 1.0;
}

}  // namespace dosc
