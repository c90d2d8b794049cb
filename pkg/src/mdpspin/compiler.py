"""Truncated K-spin cost-function compiler for tabular MDPs.

The action-value function of a fixed policy expands into a series over
probability-weighted walks through state-action space.  Truncating that
series at order K and summing (negated) over every starting pair yields a
degree-K pseudo-Boolean objective in the policy bits; adding a quadratic
one-action-per-state penalty of strength M gives the full cost function
whose feasible ground state encodes the recovered policy.

The order-k coupling coefficient of an ordered chain ((s1,a1),...,(sk,ak))
is

    gamma^k * sum_{s0,a0,s_{k+1}} P[s0,a0,s1] * P[s1,a1,s2] * ...
              * P[s_{k-1},a_{k-1},s_k] * P[sk,ak,s_{k+1}] * R[sk,ak,s_{k+1}]

i.e. all walks that traverse the chain, closing with an expected reward at
the final pair.  Chains visiting a pair twice merge onto a lower-degree
monomial (x^2 = x).  The k = 0 term is policy-independent and is kept as a
separate constant offset.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dp import value_iteration
from .errors import BudgetExceededError, InstanceTooLargeError
from .mdp import (Mdp, PolicyAssignment, ValidationError,
                  enumerate_policy_assignments, flat_index, validate)
from .pseudoboolean import PseudoBooleanPolynomial

UNIQUENESS_GAP = 1e-9


@dataclass(frozen=True)
class CompilerConfig:
    truncation_order: int
    penalty_strength: float = 3.0
    include_constant: bool = True
    term_budget: int = 10_000_000

    def __post_init__(self):
        if self.truncation_order < 1:
            raise ValueError("truncation order must be >= 1")
        if self.penalty_strength <= 0:
            raise ValueError("penalty strength must be positive")


@dataclass(frozen=True)
class CompiledHamiltonian:
    """Compiled cost function over |S x A| policy bits.

    ``objective`` holds the truncated walk-sum terms (orders 1..K),
    ``penalty`` the expanded one-action-per-state terms (including its
    constant), and ``polynomial`` their sum.  ``constant_offset`` is the
    order-0 term, kept out of the polynomial.
    """

    objective: PseudoBooleanPolynomial
    penalty: PseudoBooleanPolynomial
    polynomial: PseudoBooleanPolynomial
    constant_offset: float
    config: CompilerConfig
    num_states: int
    num_actions: int
    discount: float

    @property
    def num_variables(self) -> int:
        return self.num_states * self.num_actions

    def energy(self, assignment) -> float:
        """Polynomial value plus constant offset at a 0/1 assignment."""
        return self.polynomial.evaluate(assignment) + self.constant_offset


def coupling_coefficient(mdp: Mdp, chain: Sequence[tuple[int, int]]) -> float:
    """Ordered-walk weight of a chain of (state, action) pairs, order k = len(chain)."""
    if not chain:
        raise ValueError("chain must contain at least one (state, action) pair")
    P = mdp.transition
    for s, a in chain:
        if not (0 <= s < mdp.num_states and 0 <= a < mdp.num_actions):
            raise IndexError(f"pair ({s}, {a}) out of range")
    in_weight = P.sum(axis=(0, 1))
    er = mdp.expected_reward()
    weight = in_weight[chain[0][0]]
    for (s1, a1), (s2, _) in zip(chain, chain[1:]):
        weight *= P[s1, a1, s2]
        if weight == 0.0:
            return 0.0
    s_k, a_k = chain[-1]
    return (mdp.discount ** len(chain)) * weight * er[s_k, a_k]


def _penalty_polynomial(mdp: Mdp, strength: float) -> PseudoBooleanPolynomial:
    """M * sum_s (sum_a x_sa - 1)^2 expanded to multilinear form."""
    na = mdp.num_actions
    pen = PseudoBooleanPolynomial(mdp.num_pairs)
    for s in range(mdp.num_states):
        pen.add_term((), strength)
        for a in range(na):
            pen.add_term((flat_index(s, a, na),), -strength)
        for a in range(na):
            for a2 in range(a + 1, na):
                pen.add_term((flat_index(s, a, na), flat_index(s, a2, na)), 2.0 * strength)
    return pen


def compile_hamiltonian(mdp: Mdp, config: CompilerConfig) -> CompiledHamiltonian:
    """Enumerate all nonzero walks up to order K and assemble the cost function.

    Depth-first over chains with zero-probability pruning; raises
    BudgetExceededError once the number of term accumulations passes
    ``config.term_budget``.
    """
    violations = validate(mdp)
    if violations:
        raise ValidationError(violations)

    P = mdp.transition
    na = mdp.num_actions
    gamma = mdp.discount
    K = config.truncation_order
    in_weight = P.sum(axis=(0, 1))
    er = mdp.expected_reward()
    gamma_pow = [gamma ** k for k in range(K + 1)]
    # successor lists pruned to nonzero probabilities
    succ = [[(sp, P[s, a, sp]) for sp in range(mdp.num_states) if P[s, a, sp] > 0.0]
            for s in range(mdp.num_states) for a in range(na)]

    objective = PseudoBooleanPolynomial(mdp.num_pairs)
    budget = config.term_budget
    count = 0

    def extend(pair: int, depth: int, weight: float, ids: frozenset[int]) -> None:
        nonlocal count
        s_i, a_i = divmod(pair, na)
        contrib = gamma_pow[depth] * weight * er[s_i, a_i]
        if contrib != 0.0:
            count += 1
            if count > budget:
                raise BudgetExceededError(
                    f"walk enumeration exceeded {budget} accumulations at order {depth}"
                )
            objective.add_term(ids, -contrib)
        if depth == K:
            return
        for sp, p in succ[pair]:
            w = weight * p
            base = sp * na
            for a_next in range(na):
                nxt = base + a_next
                extend(nxt, depth + 1, w, ids | {nxt})

    for s1 in range(mdp.num_states):
        w0 = in_weight[s1]
        if w0 == 0.0:
            continue
        for a1 in range(na):
            pair = flat_index(s1, a1, na)
            extend(pair, 1, w0, frozenset((pair,)))

    penalty = _penalty_polynomial(mdp, config.penalty_strength)
    offset = -float(er.sum()) if config.include_constant else 0.0
    return CompiledHamiltonian(
        objective=objective,
        penalty=penalty,
        polynomial=objective.add(penalty),
        constant_offset=offset,
        config=config,
        num_states=mdp.num_states,
        num_actions=mdp.num_actions,
        discount=gamma,
    )


def truncated_q_table(mdp: Mdp, policy: PolicyAssignment, order: int) -> np.ndarray:
    """Order-K action values under a fixed policy, by K Bellman substitutions.

    Base case is the immediate expected reward; each substitution extends the
    rollout by one step, so the result is the expected discounted return of a
    (K+1)-step rollout.  Serves as the walk-sum oracle: the compiled objective
    at a policy's bit vector equals minus the sum of this table (plus the
    constant offset).
    """
    if not policy.is_feasible():
        raise ValueError("truncated action values require a feasible policy")
    if order < 0:
        raise ValueError("order must be >= 0")
    er = mdp.expected_reward()
    actions = policy.actions()
    q = er.copy()
    idx = np.arange(mdp.num_states)
    for _ in range(order):
        chosen = q[idx, actions]
        q = er + mdp.discount * (mdp.transition * chosen[None, None, :]).sum(axis=2)
    return q


def truncated_q(mdp: Mdp, policy: PolicyAssignment, state: int, action: int,
                order: int) -> float:
    return float(truncated_q_table(mdp, policy, order)[state, action])


def minimal_truncation_order(mdp: Mdp, penalty_strength: float = 3.0,
                             k_max: int = 8) -> int | None:
    """Least K whose compiled ground state recovers the DP-optimal policy.

    Searches feasible assignments exhaustively; a K qualifies when the best
    assignment beats the runner-up by more than the uniqueness gap and its
    interior action bits match value iteration's greedy policy.  Returns
    None when no K <= k_max qualifies.
    """
    if mdp.num_pairs > 24:
        raise InstanceTooLargeError(
            f"{mdp.num_pairs} policy bits exceed the exhaustive-search limit of 24"
        )
    _, greedy = value_iteration(mdp)
    target = greedy.interior_actions()
    policies = list(enumerate_policy_assignments(mdp.num_states, mdp.num_actions))
    for k in range(1, k_max + 1):
        ham = compile_hamiltonian(mdp, CompilerConfig(k, penalty_strength))
        energies = [ham.polynomial.evaluate(p.bits) for p in policies]
        order_idx = np.argsort(energies, kind="stable")
        best, second = order_idx[0], order_idx[1]
        if energies[second] - energies[best] <= UNIQUENESS_GAP:
            continue
        if np.array_equal(policies[best].interior_actions(), target):
            return k
    return None
