"""Compiler tests: coupling coefficients, walk sums, and the rollout oracle."""

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from mdpspin.compiler import (CompilerConfig, compile_hamiltonian, coupling_coefficient,
                              minimal_truncation_order, truncated_q, truncated_q_table)
from mdpspin.dp import policy_evaluation_exact
from mdpspin.errors import BudgetExceededError, InstanceTooLargeError
from mdpspin.mdp import (Mdp, PolicyAssignment, ValidationError, build_hallway,
                         enumerate_policy_assignments)


def two_state_cycle(reward=5.0, gamma=0.9):
    """Deterministic 2-state, 1-action cycle with a single nonzero reward."""
    P = np.zeros((2, 1, 2))
    P[0, 0, 1] = 1.0
    P[1, 0, 0] = 1.0
    R = np.zeros((2, 1, 2))
    R[1, 0, 0] = reward
    return Mdp(P, R, gamma)


class TestCouplingCoefficient:
    def test_deterministic_cycle_hand_trace(self):
        mdp = two_state_cycle(reward=5.0, gamma=0.9)
        # only state 0 feeds pair (1, 0); closing reward is 5
        assert coupling_coefficient(mdp, [(1, 0)]) == pytest.approx(0.9 * 5.0)
        # two-step chain (0,0) -> (1,0): in-weight of state 0 is P[1,0,0] = 1
        assert coupling_coefficient(mdp, [(0, 0), (1, 0)]) == pytest.approx(0.81 * 5.0)

    def test_broken_walk_is_zero(self):
        mdp = two_state_cycle()
        assert coupling_coefficient(mdp, [(0, 0), (0, 0)]) == 0.0

    def test_order_one_matches_tensor_contraction(self):
        mdp = build_hallway(6, 0.99)
        P, R = mdp.transition, mdp.reward
        for s1 in range(6):
            for a1 in range(2):
                expected = 0.99 * P[:, :, s1].sum() * (P[s1, a1] * R[s1, a1]).sum()
                assert coupling_coefficient(mdp, [(s1, a1)]) == pytest.approx(expected)

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            coupling_coefficient(two_state_cycle(), [(2, 0)])

    def test_empty_chain_rejected(self):
        with pytest.raises(ValueError):
            coupling_coefficient(two_state_cycle(), [])


class TestCompile:
    def test_zero_rewards_leave_only_penalty(self):
        mdp = build_hallway(6, 0.9)
        zero = Mdp(mdp.transition, np.zeros_like(mdp.reward), 0.9)
        ham = compile_hamiltonian(zero, CompilerConfig(3, 3.0))
        assert len(ham.objective) == 0
        assert ham.constant_offset == 0.0
        for pol in enumerate_policy_assignments(6, 2):
            assert ham.polynomial.evaluate(pol.bits) == 0.0

    def test_degree_bounded_by_truncation_order(self):
        mdp = build_hallway(6, 0.99)
        for k in (1, 2, 3, 4):
            ham = compile_hamiltonian(mdp, CompilerConfig(k, 3.0))
            assert ham.objective.degree() <= k
            assert ham.polynomial.degree() == max(2, ham.objective.degree())

    def test_variable_ids_are_flat_pair_ids(self):
        ham = compile_hamiltonian(build_hallway(6, 0.99), CompilerConfig(2, 3.0))
        used = {v for mono in ham.polynomial.terms for v in mono}
        assert used == set(range(12))

    def test_constant_offset_is_expected_reward_sum(self):
        mdp = build_hallway(6, 0.99)
        ham = compile_hamiltonian(mdp, CompilerConfig(1, 3.0))
        assert ham.constant_offset == pytest.approx(-mdp.expected_reward().sum())
        off = compile_hamiltonian(mdp, CompilerConfig(1, 3.0, include_constant=False))
        assert off.constant_offset == 0.0

    def test_budget_exceeded(self):
        with pytest.raises(BudgetExceededError):
            compile_hamiltonian(build_hallway(6, 0.99),
                                CompilerConfig(3, 3.0, term_budget=10))

    def test_invalid_mdp_rejected(self):
        mdp = build_hallway(6, 0.99)
        P = mdp.transition.copy()
        P[0, 0, :] = 0.0
        with pytest.raises(ValidationError):
            compile_hamiltonian(Mdp(P, mdp.reward, 0.99), CompilerConfig(2, 3.0))


@given(bits=st.lists(st.integers(0, 1), min_size=12, max_size=12))
@settings(max_examples=60, deadline=None)
def test_penalty_value_and_feasibility(bits):
    mdp = build_hallway(6, 0.99)
    ham = compile_hamiltonian(mdp, CompilerConfig(1, 3.0))
    x = np.array(bits, dtype=np.int8)
    per_state = x.reshape(6, 2).sum(axis=1)
    expected = 3.0 * ((per_state - 1) ** 2).sum()
    assert ham.penalty.evaluate(x) == pytest.approx(expected, abs=1e-12)
    feasible = PolicyAssignment(x, 6, 2).is_feasible()
    assert (ham.penalty.evaluate(x) == 0.0) == feasible


class TestTruncatedQ:
    def test_order_zero_is_immediate_reward(self):
        mdp = build_hallway(6, 0.99)
        pol = PolicyAssignment.from_actions([1, 0, 0, 0, 1, 0], 2)
        np.testing.assert_allclose(truncated_q_table(mdp, pol, 0),
                                   mdp.expected_reward())

    def test_vanishing_discount_kills_policy_dependence(self):
        mdp = build_hallway(6, 1e-9)
        q_a = truncated_q_table(mdp, PolicyAssignment.from_actions([0] * 6, 2), 3)
        q_b = truncated_q_table(mdp, PolicyAssignment.from_actions([1] * 6, 2), 3)
        np.testing.assert_allclose(q_a, q_b, atol=1e-7)

    def test_infeasible_policy_rejected(self):
        mdp = build_hallway(6, 0.99)
        bad = PolicyAssignment(np.zeros(12, dtype=np.int8), 6, 2)
        with pytest.raises(ValueError):
            truncated_q_table(mdp, bad, 2)

    def test_scalar_accessor(self):
        mdp = build_hallway(6, 0.99)
        pol = PolicyAssignment.from_actions([1, 0, 0, 0, 1, 0], 2)
        table = truncated_q_table(mdp, pol, 3)
        assert truncated_q(mdp, pol, 1, 0, 3) == table[1, 0]

    def test_matches_exact_policy_evaluation_in_the_limit(self):
        mdp = build_hallway(6, 0.99)
        pol = PolicyAssignment.from_actions([1, 0, 0, 0, 1, 0], 2)
        exact = policy_evaluation_exact(mdp, pol)
        k = 40
        bound = (0.99 ** (k + 1)) * 10.0 / (1 - 0.99)
        assert np.abs(truncated_q_table(mdp, pol, k) - exact).max() < bound


def test_oracle_identity_feasible_policies():
    """Compiled objective + offset equals minus the rollout-oracle sum."""
    mdp = build_hallway(6, 0.99)
    for k in (1, 2, 3):
        ham = compile_hamiltonian(mdp, CompilerConfig(k, 3.0))
        for pol in enumerate_policy_assignments(6, 2):
            walk_side = ham.objective.evaluate(pol.bits) + ham.constant_offset
            oracle_side = -truncated_q_table(mdp, pol, k).sum()
            assert walk_side == pytest.approx(oracle_side, abs=1e-9 * (len(ham.objective) + 1))


def test_tail_of_series_is_discount_bounded():
    """Adjacent truncation orders differ by at most the geometric tail bound."""
    mdp = build_hallway(6, 0.5)
    pol = PolicyAssignment.from_actions([1, 0, 0, 0, 1, 0], 2)
    k = 25
    a = truncated_q_table(mdp, pol, k).sum()
    b = truncated_q_table(mdp, pol, k + 1).sum()
    bound = (0.5 ** (k + 1)) * 10.0 * 12 / (1 - 0.5)
    assert abs(b - a) < bound


class TestMinimalTruncationOrder:
    def test_six_states_intermediate_discount(self):
        assert minimal_truncation_order(build_hallway(6, 0.8)) == 3

    def test_four_states(self):
        assert minimal_truncation_order(build_hallway(4, 0.9)) == 2

    def test_none_when_cap_too_small(self):
        assert minimal_truncation_order(build_hallway(6, 0.9), k_max=1) is None

    def test_too_large_instance_rejected(self):
        with pytest.raises(InstanceTooLargeError):
            minimal_truncation_order(build_hallway(13, 0.9))

    def test_degenerate_ties_never_qualify(self):
        # zero rewards: every feasible assignment is a ground state at every K
        mdp = build_hallway(5, 0.9)
        zero = Mdp(mdp.transition, np.zeros_like(mdp.reward), 0.9)
        assert minimal_truncation_order(zero, k_max=3) is None
