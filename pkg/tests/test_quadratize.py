"""Order-reduction tests: gadget truth table, substitution, value preservation."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from mdpspin.pseudoboolean import PseudoBooleanPolynomial, all_assignment_energies
from mdpspin.quadratize import (AncillaRegistry, consistency_violations, lift,
                                minimized_over_ancillas, project, quadratize,
                                rosenberg_penalty, to_qubo_text)


@st.composite
def reducible_polynomials(draw):
    n = draw(st.integers(3, 8))
    poly = PseudoBooleanPolynomial(n)
    for _ in range(draw(st.integers(1, 10))):
        size = draw(st.integers(1, min(4, n)))
        mono = draw(st.lists(st.integers(0, n - 1), min_size=size, max_size=size))
        poly.add_term(mono, draw(st.floats(-5, 5, allow_nan=False)))
    return poly, n


def test_gadget_truth_table():
    gadget = rosenberg_penalty(0, 1, 2, 5.0)
    for x, y, z in itertools.product((0, 1), repeat=3):
        value = gadget.evaluate([x, y, z])
        if z == x * y:
            assert value == 0.0
        else:
            assert value >= 5.0


def test_single_cubic_term():
    poly = PseudoBooleanPolynomial(3).add_term([0, 1, 2], 1.0)
    qubo = quadratize(poly, 5.0)
    assert qubo.registry.entries == ((3, 0, 1),)
    assert qubo.polynomial.degree() == 2
    # min over the ancilla reproduces x0*x1*x2 at all 8 original assignments
    mins = minimized_over_ancillas(qubo)
    for i in range(8):
        x = [(i >> v) & 1 for v in range(3)]
        assert mins[i] == pytest.approx(x[0] * x[1] * x[2], abs=1e-12)


def test_quadratic_input_is_identity():
    poly = PseudoBooleanPolynomial(3)
    poly.add_term([0, 1], 2.0)
    poly.add_term([2], -1.0)
    qubo = quadratize(poly, 5.0)
    assert qubo.registry.num_ancillas == 0
    assert qubo.polynomial.terms == poly.terms


def test_pair_selection_prefers_most_frequent_then_lexicographic():
    poly = PseudoBooleanPolynomial(4)
    poly.add_term([0, 1, 2], 1.0)
    poly.add_term([0, 1, 3], 1.0)  # pair (0,1) occurs twice, others once
    qubo = quadratize(poly, 5.0)
    assert qubo.registry.entries[0] == (4, 0, 1)

    tied = PseudoBooleanPolynomial(3).add_term([0, 1, 2], 1.0)
    assert quadratize(tied, 5.0).registry.entries[0] == (3, 0, 1)


def test_determinism():
    rng = np.random.default_rng(0)
    poly = PseudoBooleanPolynomial(6)
    for _ in range(12):
        poly.add_term(rng.integers(0, 6, size=rng.integers(1, 5)), rng.normal())
    a = quadratize(poly, 5.0)
    b = quadratize(poly, 5.0)
    assert a.polynomial.terms == b.polynomial.terms
    assert a.registry == b.registry


class TestLiftProject:
    REG = AncillaRegistry(base_count=3, entries=((3, 0, 1), (4, 3, 2)))

    def test_lift_products(self):
        np.testing.assert_array_equal(lift([1, 1, 0], self.REG), [1, 1, 0, 1, 0])
        np.testing.assert_array_equal(lift([1, 0, 1], self.REG), [1, 0, 1, 0, 0])

    def test_nested_chain(self):
        np.testing.assert_array_equal(lift([1, 1, 1], self.REG), [1, 1, 1, 1, 1])

    def test_lifted_assignment_is_consistent(self):
        for i in range(8):
            x = [(i >> v) & 1 for v in range(3)]
            assert consistency_violations(lift(x, self.REG), self.REG) == 0

    def test_flipped_ancilla_counts_once(self):
        full = lift([1, 1, 1], self.REG)
        full = full.copy()
        full[3] ^= 1
        # flipping z also breaks the nested ancilla's parent product
        assert consistency_violations(full, self.REG) == 2
        full[4] = full[3] & full[2]
        assert consistency_violations(full, self.REG) == 1

    def test_project_truncates(self):
        np.testing.assert_array_equal(project([1, 0, 1, 0, 0], self.REG), [1, 0, 1])


def test_lifted_assignment_has_zero_gadget_penalty():
    poly = PseudoBooleanPolynomial(4)
    poly.add_term([0, 1, 2, 3], 2.0)
    poly.add_term([1, 2, 3], -1.0)
    qubo = quadratize(poly, 5.0)
    for i in range(16):
        x = np.array([(i >> v) & 1 for v in range(4)], dtype=np.int8)
        full = lift(x, qubo.registry)
        assert qubo.polynomial.evaluate(full) == pytest.approx(poly.evaluate(x), abs=1e-12)


def adequate_gadget_strength(poly):
    """Sufficient penalty for exact per-assignment preservation: any set of
    lying ancillas gains at most the substituted coefficients' total mass."""
    return sum(abs(c) for m, c in poly.terms.items() if len(m) >= 3) + 1.0


@given(reducible_polynomials())
@settings(max_examples=60, deadline=None)
def test_value_preservation(poly_n):
    poly, n = poly_n
    qubo = quadratize(poly, adequate_gadget_strength(poly), num_variables=n)
    assert qubo.polynomial.degree() <= 2
    mins = minimized_over_ancillas(qubo)
    direct = all_assignment_energies(poly, n)
    np.testing.assert_allclose(mins, direct, atol=1e-9)


def test_weak_gadget_can_undercut_values_but_dips_stay_above_minimum():
    # with the penalty below a substituted coefficient, an inconsistent
    # ancilla is cheaper at the affected assignments
    poly = PseudoBooleanPolynomial(3).add_term([0, 1, 2], 2.0)
    qubo = quadratize(poly, 1.0)
    mins = minimized_over_ancillas(qubo)
    assert mins[7] == pytest.approx(1.0)  # honest value is 2
    assert mins.min() >= all_assignment_energies(poly, 3).min() - 1e-12


@given(reducible_polynomials())
@settings(max_examples=30, deadline=None)
def test_argmin_preservation_with_large_penalty(poly_n):
    poly, n = poly_n
    direct = all_assignment_energies(poly, n)
    spread = float(direct.max() - direct.min())
    qubo = quadratize(poly, spread + 1.0, num_variables=n)
    energies = all_assignment_energies(qubo.polynomial, qubo.registry.total_variables)
    tol = 1e-9
    qubo_argmins = {int(i) % (1 << n) for i in np.flatnonzero(energies <= energies.min() + tol)}
    original_argmins = {int(i) for i in np.flatnonzero(direct <= direct.min() + tol)}
    assert qubo_argmins == original_argmins


@given(reducible_polynomials())
@settings(max_examples=40, deadline=None)
def test_ancilla_count_bound(poly_n):
    poly, n = poly_n
    qubo = quadratize(poly, 5.0, num_variables=n)
    bound = sum(len(m) - 2 for m in poly.terms if len(m) >= 3)
    assert qubo.registry.num_ancillas <= bound


def test_registry_well_founded():
    poly = PseudoBooleanPolynomial(6)
    rng = np.random.default_rng(5)
    for _ in range(10):
        poly.add_term(rng.integers(0, 6, size=4), rng.normal())
    reg = quadratize(poly, 5.0).registry
    for i, (z, a, b) in enumerate(reg.entries):
        assert z == reg.base_count + i
        for parent in (a, b):
            assert parent < z


def test_every_ancilla_has_gadget_terms():
    poly = PseudoBooleanPolynomial(5)
    poly.add_term([0, 1, 2, 3, 4], 1.0)
    qubo = quadratize(poly, 5.0)
    for z, a, b in qubo.registry.entries:
        assert qubo.polynomial.terms.get(tuple(sorted((a, z)))) is not None
        assert qubo.polynomial.terms.get(tuple(sorted((b, z)))) is not None
        assert qubo.polynomial.terms.get((z,)) is not None


class TestQuboText:
    def test_format(self):
        poly = PseudoBooleanPolynomial(3)
        poly.add_term([0, 1, 2], 1.0)
        poly.add_term([], 2.5)
        qubo = quadratize(poly, 5.0)
        text = to_qubo_text(qubo)
        lines = text.strip().splitlines()
        assert lines[0] == "c constant offset 2.5"
        assert lines[1].startswith("p qubo 0 4 ")
        for line in lines[2:]:
            i, j, _ = line.split()
            assert int(i) <= int(j)

    def test_rejects_higher_degree(self):
        from mdpspin.quadratize import QuboProblem

        poly = PseudoBooleanPolynomial(3).add_term([0, 1, 2], 1.0)
        fake = QuboProblem(poly, AncillaRegistry(3), 5.0)
        with pytest.raises(ValueError):
            to_qubo_text(fake)

    def test_round_trips_through_values(self):
        poly = PseudoBooleanPolynomial(2)
        poly.add_term([0], -1.5)
        poly.add_term([0, 1], 3.0)
        text = to_qubo_text(quadratize(poly, 5.0))
        parsed = {}
        offset = 0.0
        for line in text.splitlines():
            if line.startswith("c constant offset "):
                offset = float(line.rsplit(" ", 1)[1])
            elif not line.startswith(("c", "p")):
                i, j, c = line.split()
                parsed[(int(i), int(j))] = float(c)
        assert offset == 0.0
        assert parsed == {(0, 0): -1.5, (0, 1): 3.0}
