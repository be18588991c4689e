#include "dosc/foldy_wouthuysen.hpp"

#include "dosc/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace dosc {

Operator build_FW_unitary(const DiracParams& p) {
    const BasisSpec& basis = p.basis;
    const int N = basis.fock_cutoff;
    const Complex i(0.0, 1.0);
    Matrix u = Matrix::Zero(basis.total_dim(), basis.total_dim());
    for (int n = 0; n < N; ++n) {
        // <E_n^+| = A_n <n,up| + i B_n <n-1,down|
        const auto [a, b] = analytic_coefficients(n, p.epsilon);
        const auto row = basis.index(n, Spin::up);
        u(row, basis.index(n, Spin::up)) = a;
        if (n > 0) {
            u(row, basis.index(n - 1, Spin::down)) = i * b;
        }
    }
    for (int n = 0; n + 1 < N; ++n) {
        // <E_n^-| = B_{n+1} <n+1,up| - i A_{n+1} <n,down|
        const auto [a, b] = analytic_coefficients(n + 1, p.epsilon);
        const auto row = basis.index(n, Spin::down);
        u(row, basis.index(n + 1, Spin::up)) = b;
        u(row, basis.index(n, Spin::down)) = -i * a;
    }
    u(basis.index(N - 1, Spin::down), basis.index(N - 1, Spin::down)) = 1.0;
    return Operator(std::move(u));
}

Operator build_H_FW_analytic(const DiracParams& p) {
    const BasisSpec& basis = p.basis;
    const ModelUnits units = p.units();
    const auto [x, mom] = build_quadratures(basis, units);
    const Operator sz = build_spin(basis, Axis::z);
    const double mc = ModelUnits::mass * units.c();
    const double mw = ModelUnits::mass * ModelUnits::omega;
    const Operator radicand = (mc * mc) * build_identity(basis) + mom * mom + (mw * mw) * (x * x) -
                              (ModelUnits::mass * ModelUnits::hbar * ModelUnits::omega) * sz;

    const Eigen::SelfAdjointEigenSolver<Matrix> eig(radicand.hermitian_part().matrix());
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigensolver failed on the FW radicand", 0.0);
    }
    const double smallest = eig.eigenvalues().minCoeff();
    if (!(smallest > 0.0)) {
        throw PhysicsGateError("FW radicand not positive definite (smallest eigenvalue " +
                               std::to_string(smallest) + "); raise cutoff");
    }
    const Matrix root = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() *
                        eig.eigenvectors().adjoint();
    return (units.c() * (sz * Operator(root))).hermitian_part();
}

int interior_level_count(const BasisSpec& basis, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw InvalidArgument("interior fraction must lie in (0, 1]");
    }
    return std::max(1, static_cast<int>(std::floor(fraction * basis.fock_cutoff + 1e-9)));
}

FWPair build_FW_pair(const DiracParams& p, double interior_fraction) {
    const int levels = interior_level_count(p.basis, interior_fraction);
    Operator u = build_FW_unitary(p);
    Operator numeric = (u * build_H_DO(p) * u.adjoint()).hermitian_part();
    return {std::move(u), std::move(numeric), build_H_FW_analytic(p), build_fock_projector(p.basis, 0, levels),
            levels};
}

Operator nw_position_first_order(const DiracParams& p) {
    const auto [x, mom] = build_quadratures(p.basis, p.units());
    return x - (0.5 * std::sqrt(p.epsilon)) * build_spin(p.basis, Axis::y);
}

Operator nw_position_exact(const DiracParams& p, const Operator& U) {
    const auto [x, mom] = build_quadratures(p.basis, p.units());
    return (U.adjoint() * x * U).hermitian_part();
}

Operator build_sector_interaction(const DiracParams& p, double g_times_nb, double f) {
    const auto [x, mom] = build_quadratures(p.basis, p.units());
    return (g_times_nb * x + f * (build_spin(p.basis, Axis::z) * x)).hermitian_part();
}

Operator nw_measurement_interaction_first_order(const DiracParams& p, double g_times_nb, double f) {
    const auto [x, mom] = build_quadratures(p.basis, p.units());
    const double half = 0.5 * std::sqrt(p.epsilon);
    const Operator v = build_sector_interaction(p, g_times_nb, f) -
                       (half * g_times_nb) * build_spin(p.basis, Axis::y) +
                       (half * f) * ((x * mom + mom * x) * build_spin(p.basis, Axis::x));
    return v.hermitian_part();
}

Operator nw_measurement_interaction_complete(const DiracParams& p, double g_times_nb, double f) {
    const auto [x, mom] = build_quadratures(p.basis, p.units());
    const Operator extra = (std::sqrt(p.epsilon) * f) * ((x * x) * build_spin(p.basis, Axis::y));
    return (nw_measurement_interaction_first_order(p, g_times_nb, f) - extra).hermitian_part();
}

Operator nw_measurement_interaction_exact(const DiracParams& p, const Operator& U, double g_times_nb,
                                          double f) {
    return (U.adjoint() * build_sector_interaction(p, g_times_nb, f) * U).hermitian_part();
}

double low_block_norm(const Operator& A, const BasisSpec& basis, int levels) {
    if (levels < 1 || levels > basis.fock_cutoff) {
        throw InvalidArgument("low block must hold between 1 and N levels");
    }
    const Eigen::Index k = static_cast<Eigen::Index>(levels) * basis.spin_dim;
    const Eigen::JacobiSVD<Matrix> svd(A.matrix().topLeftCorner(k, k));
    return svd.singularValues()(0);
}

double interior_max_abs(const Operator& A, const Operator& interior_projector) {
    return (interior_projector * A * interior_projector).max_abs();
}

Trajectory fw_energy_balanced_evolution(const DiracParams& p, int n, double g_times_nb, double f,
                                        const std::vector<double>& times) {
    const BasisSpec& basis = p.basis;
    const QuantumState psi0 = balanced_initial_state(basis, n);
    const Operator h = (build_H_FW_analytic(p) + build_sector_interaction(p, g_times_nb, f)).hermitian_part();
    return evolve_state(h, psi0, basis, times);
}

double fw_closed_form_x(double t, int n, double epsilon, double f) {
    const double e = analytic_energy(n, Branch::positive, epsilon);
    const double c2 = ModelUnits(epsilon).c() * ModelUnits(epsilon).c();
    const double mwc = ModelUnits::mass * ModelUnits::omega;
    const double s = std::sin(ModelUnits::mass * c2 * ModelUnits::omega * t / (2.0 * e));
    return -2.0 * e * f / (mwc * mwc * c2) * s * s;
}

std::vector<CommutatorResidual> fw_commutator_residuals(const DiracParams& p, double interior_fraction) {
    const BasisSpec& basis = p.basis;
    const Operator h = build_H_FW_analytic(p);
    const auto [x, mom] = build_quadratures(basis, p.units());
    const double c2 = p.units().c() * p.units().c();
    const double mwc2 = ModelUnits::mass * ModelUnits::omega * ModelUnits::mass * ModelUnits::omega * c2;
    const Complex i(0.0, 1.0);

    const Eigen::Index k = static_cast<Eigen::Index>(interior_level_count(basis, interior_fraction)) * basis.spin_dim;
    auto rel = [k](const Operator& lhs, const Operator& rhs) {
        const double denom = lhs.matrix().topLeftCorner(k, k).norm();
        return (lhs - rhs).matrix().topLeftCorner(k, k).norm() / denom;
    };

    const Operator h_inv(h.matrix().inverse());
    const Operator id = build_identity(basis);
    std::array<Operator, 4> powers{h_inv, id, h, h * h};  // H^{-1}, H^0, H^1, H^2
    Operator hn = id;
    std::vector<CommutatorResidual> out;
    for (int n = 1; n <= 3; ++n) {
        hn = hn * h;
        const Operator& lower = powers[static_cast<std::size_t>(n - 1)];  // H^{n-2}
        const Operator rhs_x = (i * static_cast<double>(n) * ModelUnits::hbar * c2) * (lower * mom);
        const Operator rhs_p = (-i * static_cast<double>(n) * ModelUnits::hbar * mwc2) * (lower * x);
        out.push_back({n, rel(commutator(x, hn), rhs_x), rel(commutator(mom, hn), rhs_p)});
    }
    return out;
}

std::vector<FWResidualRow> fw_residual_report(const DiracParams& p, const FWCheckOptions& options) {
    const BasisSpec& basis = p.basis;
    const FWPair fw = build_FW_pair(p, options.interior_fraction);
    const Operator& P = fw.interior_projector;
    const int N = basis.fock_cutoff;
    std::vector<FWResidualRow> rows;
    auto add = [&](std::string name, double value) {
        rows.push_back({std::move(name), p.epsilon, N, options.interior_fraction, value});
    };

    const Operator id = build_identity(basis);
    add("unitarity", std::max(interior_max_abs(fw.U.adjoint() * fw.U - id, P),
                              interior_max_abs(fw.U * fw.U.adjoint() - id, P)));
    add("diagonalization", interior_max_abs(fw.H_FW_numeric - fw.H_FW_analytic, P));
    add("sigma_z_commutator", commutator(build_spin(basis, Axis::z), fw.H_FW_analytic).max_abs());

    const Matrix dense = fw.H_FW_numeric.matrix();
    double offdiag = 0.0;
    const Eigen::Index k = static_cast<Eigen::Index>(fw.interior_levels) * basis.spin_dim;
    for (Eigen::Index c = 0; c < k; ++c) {
        for (Eigen::Index r = 0; r < k; ++r) {
            if (r != c) {
                offdiag = std::max(offdiag, std::abs(dense(r, c)));
            }
        }
    }
    add("offdiagonal", offdiag);

    const int levels = std::min(options.nw_levels, N);
    add("nw_position_first_order",
        low_block_norm(nw_position_exact(p, fw.U) - nw_position_first_order(p), basis, levels));
    const Operator v_exact = nw_measurement_interaction_exact(p, fw.U, options.g_times_nb, options.f);
    add("nw_interaction_first_order",
        low_block_norm(v_exact - nw_measurement_interaction_first_order(p, options.g_times_nb, options.f), basis,
                       levels));
    add("nw_interaction_complete",
        low_block_norm(v_exact - nw_measurement_interaction_complete(p, options.g_times_nb, options.f), basis,
                       levels));

    for (const CommutatorResidual& r : fw_commutator_residuals(p, options.interior_fraction)) {
        add("commutator_x_power_" + std::to_string(r.power), r.position);
        add("commutator_p_power_" + std::to_string(r.power), r.momentum);
    }
    return rows;
}

}  // namespace dosc
