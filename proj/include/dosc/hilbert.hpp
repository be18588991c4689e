#pragma once

// Truncated harmonic-oscillator (x) spin-1/2 Hilbert space.
//
// Units: hbar = m = omega = 1 throughout. The only physics knob is the
// relativistic parameter epsilon = hbar*omega / (m c^2), so c = 1/sqrt(eps).
//
// Basis ordering is interleaved and shared by every module:
//     index(n, s) = 2 n + s,   s = 0 for spin up, s = 1 for spin down.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace dosc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

enum class Spin : int { up = 0, down = 1 };
enum class Axis { x, y, z };

struct BasisSpec {
    int fock_cutoff = 128;  // Fock levels 0..N-1

    static constexpr int spin_dim = 2;

    explicit BasisSpec(int cutoff = 128);

    int total_dim() const { return spin_dim * fock_cutoff; }
    int index(int n, Spin s) const { return spin_dim * n + static_cast<int>(s); }
    bool operator==(const BasisSpec&) const = default;
};

struct ModelUnits {
    double epsilon;

    explicit ModelUnits(double eps);

    static constexpr double hbar = 1.0;
    static constexpr double mass = 1.0;
    static constexpr double omega = 1.0;

    double c() const;
    double rest_energy() const { return 1.0 / epsilon; }
    // sqrt(hbar / 2 m omega)
    double x_zpt() const;
    double zitterbewegung_frequency() const { return 2.0 / epsilon; }
};

// Dense complex operator on the truncated space. Immutable once built.
class Operator {
public:
    Operator() = default;
    explicit Operator(Matrix m) : m_(std::move(m)) {}

    const Matrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }
    Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

    Operator adjoint() const { return Operator(m_.adjoint()); }
    // Returns (A + A^dagger)/2; exact Hermitian form of a nearly Hermitian build.
    Operator hermitian_part() const;
    double max_abs() const;
    double hermiticity_defect() const;  // max |A - A^dagger|
    bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() <= tol; }

    friend Operator operator+(const Operator& a, const Operator& b);
    friend Operator operator-(const Operator& a, const Operator& b);
    friend Operator operator*(const Operator& a, const Operator& b);
    friend Operator operator*(Complex s, const Operator& a);
    friend Operator operator*(double s, const Operator& a);
    friend Operator operator-(const Operator& a);

private:
    Matrix m_;
};

Operator commutator(const Operator& a, const Operator& b);
Operator anticommutator(const Operator& a, const Operator& b);

// Normalized state vector. Construction rejects |norm - 1| > 1e-10.
class QuantumState {
public:
    static constexpr double norm_tolerance = 1e-10;

    explicit QuantumState(Vector amplitudes);
    static QuantumState normalized(Vector amplitudes);
    static QuantumState basis_state(const BasisSpec& basis, int n, Spin s);

    const Vector& amplitudes() const { return amp_; }
    Eigen::Index dim() const { return amp_.size(); }

private:
    Vector amp_;
};

// |<a|b>|^2
double overlap_probability(const QuantumState& a, const QuantumState& b);

// a on the Fock factor, identity on spin. The truncated a^dagger has no
// entry mapping level N-1 upward.
Operator build_ladder(const BasisSpec& basis);
// (x, p) with x = x_zpt (a + a^dagger), p = (i/sqrt 2)(a^dagger - a).
std::pair<Operator, Operator> build_quadratures(const BasisSpec& basis, const ModelUnits& units);
Operator build_spin(const BasisSpec& basis, Axis which);
Operator build_identity(const BasisSpec& basis);
// Projector onto Fock levels [first, first + count), both spins.
Operator build_fock_projector(const BasisSpec& basis, int first, int count);

Complex expectation(const QuantumState& psi, const Operator& a);
// Real view of <psi|A|psi> for Hermitian A; throws if Im exceeds 1e-10.
double expectation_real(const QuantumState& psi, const Operator& a);

// Number of Fock levels in the top `top_fraction` of the cutoff, rounded up.
int top_level_count(const BasisSpec& basis, double top_fraction);
// Population in the top ceil(top_fraction N) Fock levels (both spins).
double leakage(const QuantumState& psi, const BasisSpec& basis, double top_fraction);

// Full Hermitian eigendecomposition of a Hamiltonian, reused for every
// propagation time. psi(t) = V exp(-i Lambda t) V^dagger psi0.
class SpectralPropagator {
public:
    explicit SpectralPropagator(const Operator& hamiltonian);

    const RealVector& eigenvalues() const { return eigenvalues_; }
    const Matrix& eigenvectors() const { return eigenvectors_; }
    Eigen::Index dim() const { return eigenvalues_.size(); }
    double residual() const { return residual_; }

    Vector eigen_coefficients(const QuantumState& psi0) const;
    QuantumState propagate(const QuantumState& psi0, double t) const;
    std::vector<QuantumState> propagate(const QuantumState& psi0, std::span<const double> times) const;

private:
    RealVector eigenvalues_;
    Matrix eigenvectors_;
    double residual_ = 0.0;
};

std::vector<QuantumState> evolve(const Operator& hamiltonian, const QuantumState& psi0,
                                 std::span<const double> times);

// Expectation values of a fixed set of Hermitian observables along the exact
// trajectory of one initial state.
//
// Works in the eigenbasis restricted to the components that carry weight:
// eigen-components are dropped smallest first while their accumulated
// weight stays below `dropped_weight_bound` (default 1e-28), so every
// expectation value is exact to 2 sqrt(bound) ||A||. Per time point the
// cost is one stacked (n_obs k) x k matrix-vector product.
class ExpectationSeries {
public:
    ExpectationSeries(const SpectralPropagator& propagator, const QuantumState& psi0,
                      std::span<const Operator> observables, double dropped_weight_bound = 1e-28);

    std::size_t observable_count() const { return n_obs_; }
    Eigen::Index active_dim() const { return coeffs_.size(); }
    double dropped_weight() const { return dropped_weight_; }

    // Writes <A_i>(t) into out[i].
    void evaluate(double t, std::span<double> out) const;

private:
    std::size_t n_obs_ = 0;
    RealVector energies_;
    Vector coeffs_;
    Matrix stacked_;  // rows [i*k, (i+1)*k) hold V_K^dagger A_i V_K
    double dropped_weight_ = 0.0;
};

}  // namespace dosc
