#include "dosc/dirac_oscillator.hpp"
#include "dosc/errors.hpp"
#include "dosc/hilbert.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace dosc;

TEST_SUITE("hilbert") {

TEST_CASE("truncated ladder commutator") {
    const BasisSpec basis(12);
    const Operator a = build_ladder(basis);
    const Operator comm = commutator(a, a.adjoint()) - build_identity(basis);
    const int N = basis.fock_cutoff;
    double interior = 0.0;
    for (int r = 0; r < basis.index(N - 1, Spin::up); ++r) {
        for (int c = 0; c < basis.index(N - 1, Spin::up); ++c) {
            interior = std::max(interior, std::abs(comm(r, c)));
        }
    }
    CHECK(interior <= 8.0 * N * std::numeric_limits<double>::epsilon());  // sqrt(n)^2 rounding
    const Operator raw = commutator(a, a.adjoint());
    CHECK(raw(basis.index(N - 1, Spin::up), basis.index(N - 1, Spin::up)).real() == doctest::Approx(-(N - 1)));
}

TEST_CASE("x squared diagonal follows the ladder algebra") {
    const BasisSpec basis(20);
    const auto [x, p] = build_quadratures(basis, ModelUnits(0.1));
    const Operator x2 = x * x;
    for (int n = 0; n <= basis.fock_cutoff - 2; ++n) {
        CHECK(x2(basis.index(n, Spin::down), basis.index(n, Spin::down)).real() ==
              doctest::Approx((2.0 * n + 1.0) / 2.0).epsilon(1e-14));
    }
}

TEST_CASE("operators agree with the Kronecker-product construction") {
    const int N = 14;
    const BasisSpec basis(N);
    const ModelUnits u(0.3);
    const auto [x, p] = build_quadratures(basis, u);
    CHECK((x.matrix() - oracle::system_op(oracle::position(N), oracle::M::Identity(2, 2))).cwiseAbs().maxCoeff() <
          1e-15);
    CHECK((p.matrix() - oracle::system_op(oracle::momentum(N), oracle::M::Identity(2, 2))).cwiseAbs().maxCoeff() <
          1e-15);
    CHECK((build_spin(basis, Axis::y).matrix() - oracle::system_op(oracle::M::Identity(N, N), oracle::pauli('y')))
              .cwiseAbs()
              .maxCoeff() == 0.0);
    const Operator h = build_H_DO(DiracParams(0.3, basis));
    CHECK((h.matrix() - oracle::dirac_oscillator(N, 0.3)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(h.is_hermitian());
}

TEST_CASE("state normalization is enforced") {
    Vector v = Vector::Zero(4);
    v(0) = 1.0 + 1e-8;
    CHECK_THROWS_AS(QuantumState{v}, InvalidArgument);
    CHECK(QuantumState::normalized(v).amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(QuantumState::normalized(Vector::Zero(4)), InvalidArgument);
}

TEST_CASE("analytic eigenstate is stationary") {
    const DiracParams p(0.1, BasisSpec(128));
    const QuantumState psi = analytic_eigenstate(1, Branch::positive, p);
    const SpectralPropagator prop(build_H_DO(p));
    for (double t = 0.0; t <= 100.0; t += 12.5) {
        CHECK(overlap_probability(psi, prop.propagate(psi, t)) == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("balanced state width and leakage") {
    const BasisSpec basis(128);
    const auto [x, p] = build_quadratures(basis, ModelUnits(0.1));
    const QuantumState psi1 = QuantumState::normalized(
        QuantumState::basis_state(basis, 1, Spin::up).amplitudes() + QuantumState::basis_state(basis, 0, Spin::down).amplitudes());
    CHECK(expectation_real(psi1, x * x) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(leakage(analytic_eigenstate(5, Branch::positive, DiracParams(0.1, basis)), basis, 0.1) < 1e-12);
    CHECK(top_level_count(basis, 0.1) == 13);
}

TEST_CASE("propagation preserves the norm and matches the matrix exponential") {
    const int N = 16;
    const BasisSpec basis(N);
    const Operator h = build_H_DO(DiracParams(0.05, basis));
    const QuantumState psi0 = QuantumState::normalized(
        QuantumState::basis_state(basis, 2, Spin::up).amplitudes() + QuantumState::basis_state(basis, 4, Spin::down).amplitudes());
    const SpectralPropagator prop(h);
    CHECK(prop.residual() < 1e-9);
    for (double t : {0.01, 0.3, 2.0}) {
        const QuantumState out = prop.propagate(psi0, t);
        const oracle::V ref = oracle::propagate(oracle::dirac_oscillator(N, 0.05), psi0.amplitudes(), t);
        CHECK((out.amplitudes() - ref).norm() < 1e-10);
        CHECK(out.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("expectation series equals direct propagation") {
    const BasisSpec basis(24);
    const Operator h = build_H_DO(DiracParams(0.2, basis));
    const auto [x, p] = build_quadratures(basis, ModelUnits(0.2));
    const QuantumState psi0 = QuantumState::basis_state(basis, 3, Spin::up);
    const SpectralPropagator prop(h);
    const std::vector<Operator> obs{x, p * p, build_spin(basis, Axis::z)};
    const ExpectationSeries series(prop, psi0, obs);
    std::vector<double> out(obs.size());
    for (double t : {0.0, 0.7, 3.1}) {
        series.evaluate(t, out);
        const QuantumState psi = prop.propagate(psi0, t);
        for (std::size_t i = 0; i < obs.size(); ++i) {
            CHECK(out[i] == doctest::Approx(expectation_real(psi, obs[i])).epsilon(1e-10).scale(1.0));
        }
    }
}

}
