#include "dosc/dirac_oscillator.hpp"

#include "dosc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dosc {

DiracParams::DiracParams(double eps, BasisSpec b) : epsilon(eps), basis(b) {
    if (!std::isfinite(eps) || eps <= 0.0) {
        throw InvalidArgument("epsilon must be finite and > 0");
    }
}

double analytic_energy(int n, Branch branch, double epsilon) {
    if (n < 0) {
        throw InvalidArgument("level index must be >= 0");
    }
    if (branch == Branch::negative) {
        return -analytic_energy(n + 1, Branch::positive, epsilon);
    }
    return std::sqrt(1.0 + 2.0 * n * epsilon) / epsilon;
}

EigenCoefficients analytic_coefficients(int n, double epsilon) {
    if (n < 0) {
        throw InvalidArgument("level index must be >= 0");
    }
    // With s = sqrt(1 + 2 n eps): A^2 = (s + 1)/2s, B^2 = (s - 1)/2s.
    // s - 1 is formed as 2 n eps / (s + 1) to keep B accurate as eps -> 0.
    const double s = std::sqrt(1.0 + 2.0 * n * epsilon);
    const double s_minus_one = 2.0 * n * epsilon / (s + 1.0);
    return {std::sqrt((s + 1.0) / (2.0 * s)), std::sqrt(s_minus_one / (2.0 * s))};
}

QuantumState analytic_eigenstate(int n, Branch branch, const DiracParams& p) {
    const BasisSpec& basis = p.basis;
    const int top = branch == Branch::positive ? n : n + 1;
    if (n < 0 || top >= basis.fock_cutoff) {
        throw PhysicsGateError("cutoff too small for eigenstate n=" + std::to_string(n) +
                               "; raise cutoff");
    }
    Vector v = Vector::Zero(basis.total_dim());
    const Complex i(0.0, 1.0);
    if (branch == Branch::positive) {
        const auto [a, b] = analytic_coefficients(n, p.epsilon);
        v(basis.index(n, Spin::up)) = a;
        if (n > 0) {
            v(basis.index(n - 1, Spin::down)) = -i * b;
        }
    } else {
        const auto [a, b] = analytic_coefficients(n + 1, p.epsilon);
        v(basis.index(n + 1, Spin::up)) = b;
        v(basis.index(n, Spin::down)) = i * a;
    }
    return QuantumState::normalized(std::move(v));
}

Operator build_H_DO(const DiracParams& p) {
    const ModelUnits u = p.units();
    const auto [x, mom] = build_quadratures(p.basis, u);
    const Operator sx = build_spin(p.basis, Axis::x);
    const Operator sy = build_spin(p.basis, Axis::y);
    const Operator sz = build_spin(p.basis, Axis::z);
    const double c = u.c();
    const double m = ModelUnits::mass;
    const Operator h = c * (sx * mom) - (m * c * ModelUnits::omega) * (sy * x) + (m * c * c) * sz;
    return h.hermitian_part();
}

Operator build_H_nr(const DiracParams& p) {
    const ModelUnits u = p.units();
    const auto [x, mom] = build_quadratures(p.basis, u);
    const Operator sz = build_spin(p.basis, Axis::z);
    const Operator id = build_identity(p.basis);
    const double m = ModelUnits::mass;
    const double w = ModelUnits::omega;
    const Operator orbital = u.rest_energy() * id + (0.5 / m) * (mom * mom) + (0.5 * m * w * w) * (x * x);
    const Operator h = orbital * sz - (0.5 * ModelUnits::hbar * w) * id;
    return h.hermitian_part();
}

Operator build_H_weyl(const DiracParams& p) {
    const ModelUnits u = p.units();
    const auto [x, mom] = build_quadratures(p.basis, u);
    const Operator sx = build_spin(p.basis, Axis::x);
    const Operator sy = build_spin(p.basis, Axis::y);
    const double c = u.c();
    const Operator h = c * (sx * mom) - (c * ModelUnits::mass * ModelUnits::omega) * (sy * x);
    return h.hermitian_part();
}

Vector phase_align(const Vector& numeric, const Vector& reference) {
    const Complex ov = reference.dot(numeric);
    if (std::abs(ov) == 0.0) {
        return numeric;
    }
    return numeric * std::polar(1.0, -std::arg(ov));
}

bool SpectrumReport::passed() const {
    if (window_numeric_count != window_analytic_count) {
        return false;
    }
    return std::all_of(rows.begin(), rows.end(), [&](const SpectrumRow& r) {
        return r.abs_error <= energy_tolerance() && r.overlap >= 1.0 - overlap_tolerance;
    });
}

SpectrumReport validate_spectrum(const DiracParams& p, int n_max) {
    const BasisSpec& basis = p.basis;
    if (n_max < 0 || 4 * n_max > basis.fock_cutoff) {
        throw PhysicsGateError("n_max=" + std::to_string(n_max) + " exceeds N/4 for N=" +
                               std::to_string(basis.fock_cutoff) + "; raise cutoff");
    }
    constexpr double gate = 1e-8;
    constexpr double top_fraction = 0.1;

    const SpectralPropagator eig(build_H_DO(p));
    const RealVector& vals = eig.eigenvalues();
    const Matrix& vecs = eig.eigenvectors();

    double min_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 1; k < vals.size(); ++k) {
        min_gap = std::min(min_gap, vals(k) - vals(k - 1));
    }
    if (min_gap <= 1e-8 * ModelUnits::hbar * ModelUnits::omega) {
        throw PhysicsGateError("numeric spectrum has a near-degenerate pair (gap " + std::to_string(min_gap) +
                               "); raise cutoff");
    }

    auto nearest = [&](double e) {
        Eigen::Index best = 0;
        (vals.array() - e).abs().minCoeff(&best);
        return best;
    };

    SpectrumReport report{p.epsilon, basis.fock_cutoff, n_max, {}, 0, 0, min_gap};
    for (Branch br : {Branch::positive, Branch::negative}) {
        for (int n = 0; n <= n_max; ++n) {
            const double e = analytic_energy(n, br, p.epsilon);
            const QuantumState analytic = analytic_eigenstate(n, br, p);
            const Eigen::Index k = nearest(e);
            const Vector aligned = phase_align(vecs.col(k), analytic.amplitudes());
            const QuantumState numeric = QuantumState::normalized(aligned);
            if (leakage(numeric, basis, top_fraction) >= gate) {
                throw PhysicsGateError("eigenvector for n=" + std::to_string(n) +
                                       " reaches the truncation edge; raise cutoff");
            }
            report.rows.push_back(
                {n, br, vals(k), e, overlap_probability(numeric, analytic), std::abs(vals(k) - e)});
        }
    }

    const double window = analytic_energy(n_max, Branch::positive, p.epsilon) * (1.0 + 1e-12);
    for (Eigen::Index k = 0; k < vals.size(); ++k) {
        if (std::abs(vals(k)) > window) {
            continue;
        }
        const QuantumState v = QuantumState::normalized(vecs.col(k));
        if (leakage(v, basis, top_fraction) < gate) {
            ++report.window_numeric_count;
        }
    }
    // E_n^+ for n <= n_max, and E_n^- = -E_{n+1}^+ for n + 1 <= n_max.
    report.window_analytic_count = 2 * n_max + 1;
    return report;
}

std::vector<EnergyCurvePoint> energy_curves(const std::vector<double>& epsilons, int n_max) {
    std::vector<EnergyCurvePoint> out;
    for (double eps : epsilons) {
        for (int n = 0; n <= n_max; ++n) {
            out.push_back({eps, n, analytic_energy(n, Branch::positive, eps) * eps,
                           analytic_energy(n, Branch::negative, eps) * eps});
        }
    }
    return out;
}

std::vector<WeightCurvePoint> weight_curves(const std::vector<double>& epsilons, int n_max) {
    std::vector<WeightCurvePoint> out;
    for (double eps : epsilons) {
        for (int n = 0; n <= n_max; ++n) {
            const auto [a, b] = analytic_coefficients(n, eps);
            out.push_back({eps, n, a * a, b * b});
        }
    }
    return out;
}

std::vector<double> log_grid(double lo, double hi, int n_points) {
    if (!(lo > 0.0 && hi >= lo) || n_points < 1) {
        throw InvalidArgument("log_grid needs 0 < lo <= hi and at least one point");
    }
    std::vector<double> out;
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < n_points; ++i) {
        out.push_back(n_points == 1 ? lo : std::pow(10.0, a + (b - a) * i / (n_points - 1)));
    }
    // Endpoints exactly as given.
    out.front() = lo;
    if (n_points > 1) {
        out.back() = hi;
    }
    return out;
}

}  // namespace dosc
