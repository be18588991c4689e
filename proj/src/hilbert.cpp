#include "dosc/hilbert.hpp"

#include "dosc/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace dosc {

BasisSpec::BasisSpec(int cutoff) : fock_cutoff(cutoff) {
    if (cutoff < 2) {
        throw InvalidArgument("fock cutoff must be >= 2, got " + std::to_string(cutoff));
    }
}

ModelUnits::ModelUnits(double eps) : epsilon(eps) {
    if (!std::isfinite(eps) || eps <= 0.0) {
        throw InvalidArgument("epsilon must be finite and > 0");
    }
}

double ModelUnits::c() const { return 1.0 / std::sqrt(epsilon); }

double ModelUnits::x_zpt() const { return std::sqrt(hbar / (2.0 * mass * omega)); }

Operator Operator::hermitian_part() const {
    Matrix h = 0.5 * (m_ + m_.adjoint());
    return Operator(std::move(h));
}

double Operator::max_abs() const { return m_.size() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff(); }

double Operator::hermiticity_defect() const {
    return m_.size() == 0 ? 0.0 : (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

namespace {

void require_same_dim(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim()) {
        throw InvalidArgument("operator dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                              std::to_string(b.dim()));
    }
}

}  // namespace

Operator operator+(const Operator& a, const Operator& b) {
    require_same_dim(a, b);
    return Operator(a.m_ + b.m_);
}

Operator operator-(const Operator& a, const Operator& b) {
    require_same_dim(a, b);
    return Operator(a.m_ - b.m_);
}

Operator operator*(const Operator& a, const Operator& b) {
    require_same_dim(a, b);
    return Operator(a.m_ * b.m_);
}

Operator operator*(Complex s, const Operator& a) { return Operator(s * a.m_); }
Operator operator*(double s, const Operator& a) { return Operator(s * a.m_); }
Operator operator-(const Operator& a) { return Operator(-a.m_); }

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }
Operator anticommutator(const Operator& a, const Operator& b) { return a * b + b * a; }

QuantumState::QuantumState(Vector amplitudes) : amp_(std::move(amplitudes)) {
    const double norm = amp_.norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > norm_tolerance) {
        throw InvalidArgument("state is not normalized: |psi| = " + std::to_string(norm));
    }
}

QuantumState QuantumState::normalized(Vector amplitudes) {
    const double norm = amplitudes.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw InvalidArgument("cannot normalize a zero or non-finite vector");
    }
    amplitudes /= norm;
    return QuantumState(std::move(amplitudes));
}

QuantumState QuantumState::basis_state(const BasisSpec& basis, int n, Spin s) {
    if (n < 0 || n >= basis.fock_cutoff) {
        throw InvalidArgument("Fock level " + std::to_string(n) + " outside cutoff");
    }
    Vector v = Vector::Zero(basis.total_dim());
    v(basis.index(n, s)) = 1.0;
    return QuantumState(std::move(v));
}

double overlap_probability(const QuantumState& a, const QuantumState& b) {
    if (a.dim() != b.dim()) {
        throw InvalidArgument("state dimension mismatch");
    }
    return std::norm(a.amplitudes().dot(b.amplitudes()));
}

Operator build_ladder(const BasisSpec& basis) {
    Matrix a = Matrix::Zero(basis.total_dim(), basis.total_dim());
    for (int n = 1; n < basis.fock_cutoff; ++n) {
        const double amp = std::sqrt(static_cast<double>(n));
        for (Spin s : {Spin::up, Spin::down}) {
            a(basis.index(n - 1, s), basis.index(n, s)) = amp;
        }
    }
    return Operator(std::move(a));
}

std::pair<Operator, Operator> build_quadratures(const BasisSpec& basis, const ModelUnits& units) {
    const Matrix a = build_ladder(basis).matrix();
    const Matrix ad = a.adjoint();
    Matrix x = units.x_zpt() * (a + ad);
    // p = i sqrt(m hbar omega / 2) (a^dagger - a)
    Matrix p = Complex(0.0, std::sqrt(ModelUnits::mass * ModelUnits::hbar * ModelUnits::omega / 2.0)) * (ad - a);
    return {Operator(std::move(x)), Operator(std::move(p))};
}

Operator build_spin(const BasisSpec& basis, Axis which) {
    Eigen::Matrix2cd pauli;
    switch (which) {
        case Axis::x: pauli << 0.0, 1.0, 1.0, 0.0; break;
        case Axis::y: pauli << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0; break;
        case Axis::z: pauli << 1.0, 0.0, 0.0, -1.0; break;
    }
    Matrix s = Matrix::Zero(basis.total_dim(), basis.total_dim());
    for (int n = 0; n < basis.fock_cutoff; ++n) {
        s.block<2, 2>(basis.index(n, Spin::up), basis.index(n, Spin::up)) = pauli;
    }
    return Operator(std::move(s));
}

Operator build_identity(const BasisSpec& basis) {
    return Operator(Matrix::Identity(basis.total_dim(), basis.total_dim()));
}

Operator build_fock_projector(const BasisSpec& basis, int first, int count) {
    if (first < 0 || count < 0 || first + count > basis.fock_cutoff) {
        throw InvalidArgument("projector range outside cutoff");
    }
    Matrix p = Matrix::Zero(basis.total_dim(), basis.total_dim());
    for (int n = first; n < first + count; ++n) {
        p(basis.index(n, Spin::up), basis.index(n, Spin::up)) = 1.0;
        p(basis.index(n, Spin::down), basis.index(n, Spin::down)) = 1.0;
    }
    return Operator(std::move(p));
}

Complex expectation(const QuantumState& psi, const Operator& a) {
    if (psi.dim() != a.dim()) {
        throw InvalidArgument("expectation: state dim " + std::to_string(psi.dim()) + " vs operator dim " +
                              std::to_string(a.dim()));
    }
    return psi.amplitudes().dot(a.matrix() * psi.amplitudes());
}

double expectation_real(const QuantumState& psi, const Operator& a) {
    const Complex v = expectation(psi, a);
    if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real()))) {
        throw InvalidArgument("expectation has imaginary part " + std::to_string(v.imag()) +
                              "; operator is not Hermitian");
    }
    return v.real();
}

int top_level_count(const BasisSpec& basis, double top_fraction) {
    if (!(top_fraction > 0.0 && top_fraction < 1.0)) {
        throw InvalidArgument("top_fraction must lie in (0, 1)");
    }
    const double raw = top_fraction * basis.fock_cutoff;
    // Guard against 0.1 * 100 evaluating to 10.000000000000002.
    int count = static_cast<int>(std::ceil(raw - 1e-9));
    return std::clamp(count, 1, basis.fock_cutoff);
}

double leakage(const QuantumState& psi, const BasisSpec& basis, double top_fraction) {
    if (psi.dim() != basis.total_dim()) {
        throw InvalidArgument("leakage: state dimension does not match basis");
    }
    const int count = top_level_count(basis, top_fraction);
    const int first = basis.fock_cutoff - count;
    const auto& v = psi.amplitudes();
    double pop = 0.0;
    for (int i = basis.index(first, Spin::up); i < basis.total_dim(); ++i) {
        pop += std::norm(v(i));
    }
    return pop;
}

SpectralPropagator::SpectralPropagator(const Operator& hamiltonian) {
    const double scale = std::max(1.0, hamiltonian.max_abs());
    const double defect = hamiltonian.hermiticity_defect();
    if (defect > 1e-12 * scale) {
        throw InvalidArgument("Hamiltonian is not Hermitian: max|H - H^dagger| = " + std::to_string(defect));
    }
    const Matrix h = hamiltonian.hermitian_part().matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("Hermitian eigensolver did not converge", std::numeric_limits<double>::infinity());
    }
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
    residual_ = (h * eigenvectors_ - eigenvectors_ * eigenvalues_.asDiagonal()).cwiseAbs().maxCoeff();
    if (!(residual_ <= 1e-9 * scale)) {
        throw NumericalError("Hermitian eigendecomposition residual too large", residual_);
    }
}

Vector SpectralPropagator::eigen_coefficients(const QuantumState& psi0) const {
    if (psi0.dim() != dim()) {
        throw InvalidArgument("propagate: state dimension does not match Hamiltonian");
    }
    return eigenvectors_.adjoint() * psi0.amplitudes();
}

namespace {

Vector phase_rotate(const RealVector& energies, const Vector& coeffs, double t) {
    Vector d(coeffs.size());
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
        d(k) = coeffs(k) * std::polar(1.0, -energies(k) * t);
    }
    return d;
}

QuantumState checked_state(Vector v) {
    const double drift = std::abs(v.norm() - 1.0);
    if (drift > QuantumState::norm_tolerance) {
        throw NumericalError("norm drift during propagation", drift);
    }
    return QuantumState(std::move(v));
}

}  // namespace

QuantumState SpectralPropagator::propagate(const QuantumState& psi0, double t) const {
    const Vector c = eigen_coefficients(psi0);
    return checked_state(eigenvectors_ * phase_rotate(eigenvalues_, c, t));
}

std::vector<QuantumState> SpectralPropagator::propagate(const QuantumState& psi0,
                                                        std::span<const double> times) const {
    const Vector c = eigen_coefficients(psi0);
    std::vector<QuantumState> out;
    out.reserve(times.size());
    double previous = -std::numeric_limits<double>::infinity();
    for (double t : times) {
        if (!std::isfinite(t) || t < previous) {
            throw InvalidArgument("propagation times must be finite and ascending");
        }
        previous = t;
        out.push_back(checked_state(eigenvectors_ * phase_rotate(eigenvalues_, c, t)));
    }
    return out;
}

std::vector<QuantumState> evolve(const Operator& hamiltonian, const QuantumState& psi0,
                                 std::span<const double> times) {
    return SpectralPropagator(hamiltonian).propagate(psi0, times);
}

ExpectationSeries::ExpectationSeries(const SpectralPropagator& propagator, const QuantumState& psi0,
                                     std::span<const Operator> observables, double dropped_weight_bound)
    : n_obs_(observables.size()) {
    const Vector c = propagator.eigen_coefficients(psi0);
    const Eigen::Index dim = c.size();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return std::norm(c(a)) < std::norm(c(b)); });
    std::size_t first_kept = 0;
    double dropped = 0.0;
    while (first_kept < order.size() && dropped + std::norm(c(order[first_kept])) <= dropped_weight_bound) {
        dropped += std::norm(c(order[first_kept]));
        ++first_kept;
    }
    dropped_weight_ = dropped;
    std::vector<Eigen::Index> kept(order.begin() + static_cast<std::ptrdiff_t>(first_kept), order.end());
    std::sort(kept.begin(), kept.end());

    const auto k = static_cast<Eigen::Index>(kept.size());
    Matrix basis(dim, k);
    energies_.resize(k);
    coeffs_.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        basis.col(j) = propagator.eigenvectors().col(kept[static_cast<std::size_t>(j)]);
        energies_(j) = propagator.eigenvalues()(kept[static_cast<std::size_t>(j)]);
        coeffs_(j) = c(kept[static_cast<std::size_t>(j)]);
    }

    stacked_.resize(static_cast<Eigen::Index>(n_obs_) * k, k);
    for (std::size_t i = 0; i < n_obs_; ++i) {
        const Operator& a = observables[i];
        if (a.dim() != dim) {
            throw InvalidArgument("observable dimension does not match Hamiltonian");
        }
        stacked_.middleRows(static_cast<Eigen::Index>(i) * k, k) = basis.adjoint() * a.matrix() * basis;
    }
}

void ExpectationSeries::evaluate(double t, std::span<double> out) const {
    if (out.size() < n_obs_) {
        throw InvalidArgument("ExpectationSeries::evaluate: output span too small");
    }
    const Eigen::Index k = coeffs_.size();
    const Vector d = phase_rotate(energies_, coeffs_, t);
    const Vector ad = stacked_ * d;
    for (std::size_t i = 0; i < n_obs_; ++i) {
        out[i] = d.dot(ad.segment(static_cast<Eigen::Index>(i) * k, k)).real();
    }
}

}  // namespace dosc
