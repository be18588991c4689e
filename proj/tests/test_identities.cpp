#include "dosc/backaction.hpp"

#include <doctest.h>

#include <complex>

using namespace dosc;

TEST_SUITE("identities") {

TEST_CASE("composite observables obey the operator identities on the interior") {
    const BasisSpec basis(40);
    const CompositeObservables o = build_composite_observables(basis);
    const Operator P = build_fock_projector(basis, 0, basis.fock_cutoff - 2);
    const Operator sz = build_spin(basis, Axis::z);
    CHECK((o.X * o.X - o.Phi * o.Phi).max_abs() == 0.0);
    CHECK((o.P * o.P - o.Pi * o.Pi).max_abs() == 0.0);
    const Operator defect = commutator(o.X, o.Pi) - Complex(0.0, 1.0) * sz;
    CHECK((P * defect * P).max_abs() < 1e-12);
    // The truncation shows up only on the top level.
    CHECK(defect.max_abs() > 1.0);
    CHECK(commutator(o.X, o.Phi).max_abs() == 0.0);
}

}
