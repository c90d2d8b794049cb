"""Experiment runners: the end-to-end solve pipeline and the grid sweeps.

Every runner emits plain data (CSV tables, JSON records) with the full
configuration embedded so a record can be reproduced bit for bit.  Rows are
ordered by instance key (size, then discount) regardless of execution order.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
from dataclasses import dataclass

from .anneal import (AnnealSchedule, default_beta_range, exhaustive_ground_state,
                     simulated_anneal, success_probability, tts_std_error, tts_sweep)
from .compiler import CompilerConfig, compile_hamiltonian, minimal_truncation_order
from .dp import QLearningConfig, best_policy_exhaustive, q_learning, value_iteration
from .errors import InstanceTooLargeError
from .mdp import Mdp, PolicyAssignment, build_hallway, terminal_states
from .pseudoboolean import all_assignment_energies
from .quadratize import consistency_violations, project, quadratize
from .resources import count_resources

EXPERIMENTS = ("solve", "k-heatmap", "tts-sweep", "resources", "oracle-compare")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "solve"
    sizes: tuple[int, ...] = (4, 5, 6, 7, 8)
    gammas: tuple[float, ...] = (0.6, 0.7, 0.8, 0.9)
    slip: float = 0.04
    truncation: int | None = None  # None -> minimal order per instance
    k_max: int = 8
    penalty_strength: float = 3.0
    reduction_penalty: float = 5.0
    num_sweeps: int = 20
    num_reads: int = 1000
    sweep_grid: tuple[int, ...] = (1, 2, 3, 5, 7, 10, 15, 20, 30, 50)
    desired_probability: float = 0.99
    seed: int = 0
    num_qlearning_seeds: int = 20
    qlearning_episodes: int = 20_000
    match_rule: str = "energy"
    out_dir: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; "
                             f"choose from {', '.join(EXPERIMENTS)}")
        if self.match_rule not in ("energy", "policy"):
            raise ValueError("match_rule must be 'energy' or 'policy'")

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def _interior(policy: PolicyAssignment) -> list[int]:
    return [int(a) for a in policy.interior_actions()]


def _resolve_truncation(mdp: Mdp, config: ExperimentConfig) -> int | None:
    if config.truncation is not None:
        return config.truncation
    return minimal_truncation_order(mdp, config.penalty_strength, config.k_max)


def _write(out_dir: str | None, filename: str, text: str) -> None:
    if out_dir is None:
        return
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, filename), "w") as fh:
        fh.write(text)


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def run_solve(config: ExperimentConfig, num_states: int, gamma: float,
              truncation: int | None = None) -> dict:
    """compile -> quadratize -> (exhaustive + SA) -> project -> DP comparison.

    Exhaustive search runs on the unreduced polynomial (policy bits only);
    its minimum also serves as the QUBO ground energy because the reduction
    preserves the minimum.  Agreement requires every exhaustive minimizer to
    be feasible with interior actions equal to value iteration's.
    """
    mdp = build_hallway(num_states, gamma, config.slip)
    k = truncation if truncation is not None else _resolve_truncation(mdp, config)
    if k is None:
        raise ValueError(f"no truncation order <= {config.k_max} recovers the "
                         f"optimal policy for |S|={num_states}, gamma={gamma}")
    ham = compile_hamiltonian(mdp, CompilerConfig(k, config.penalty_strength))
    qubo = quadratize(ham.polynomial, config.reduction_penalty,
                      num_variables=ham.num_variables)
    _, greedy = value_iteration(mdp)
    vi_interior = _interior(greedy)

    minimizers, ground = exhaustive_ground_state(ham.polynomial, ham.num_variables)
    policies = [PolicyAssignment(m, num_states, mdp.num_actions) for m in minimizers]
    all_feasible = all(p.is_feasible() for p in policies)
    agreement = all_feasible and all(_interior(p) == vi_interior for p in policies)

    beta0, beta1 = default_beta_range(qubo.polynomial)
    schedule = AnnealSchedule(config.num_sweeps, beta0, beta1,
                              num_reads=config.num_reads, rng_seed=config.seed)
    reads = simulated_anneal(qubo.polynomial, schedule,
                             num_variables=qubo.num_variables)
    if config.match_rule == "energy":
        p_s, p_err = success_probability(reads, ground)
    else:
        target = minimizers[0] if len(minimizers) == 1 else None
        if target is None:
            p_s, p_err = math.nan, math.nan
        else:
            p_s, p_err = success_probability(reads, ground, match_rule="policy",
                                             target_bits=target,
                                             base_count=ham.num_variables)
    best = min(reads, key=lambda r: r.energy)
    best_policy = PolicyAssignment(project(best.assignment, qubo.registry),
                                   num_states, mdp.num_actions)
    record = {
        "experiment": "solve",
        "config": config.as_dict(),
        "instance": {"num_states": num_states, "gamma": gamma, "slip": config.slip,
                     "truncation": k, "penalty_strength": config.penalty_strength,
                     "reduction_penalty": config.reduction_penalty},
        "compile": {"objective_terms": len(ham.objective), "degree": ham.polynomial.degree(),
                    "constant_offset": ham.constant_offset},
        "qubo": {"variables": qubo.num_variables,
                 "ancillas": qubo.registry.num_ancillas,
                 "terms": len(qubo.polynomial)},
        "oracle": {"vi_interior": vi_interior},
        "exhaustive": {"ground_energy": ground,
                       "num_minimizers": len(minimizers),
                       "all_feasible": all_feasible,
                       "interior": _interior(policies[0]) if policies[0].is_feasible() else None,
                       "agreement": bool(agreement)},
        "sa": {"num_reads": config.num_reads, "num_sweeps": config.num_sweeps,
               "beta_start": beta0, "beta_end": beta1,
               "best_energy": best.energy,
               "best_attains_ground": bool(abs(best.energy - ground) <= 1e-9),
               "best_feasible": best_policy.is_feasible(),
               "best_consistency_violations":
                   consistency_violations(best.assignment, qubo.registry),
               "best_interior": _interior(best_policy) if best_policy.is_feasible() else None,
               "success_probability": p_s,
               "success_std_error": p_err},
    }
    _write(config.out_dir, f"solve_s{num_states}_g{gamma}_k{k}.json",
           json.dumps(record, indent=1))
    return record


def run_k_heatmap(config: ExperimentConfig) -> list[dict]:
    """Minimal truncation order per (|S|, gamma) cell."""
    rows: list[dict] = []
    for size in sorted(config.sizes):
        mdps = {g: build_hallway(size, g, config.slip) for g in config.gammas}
        for gamma in sorted(config.gammas):
            cell: dict = {"num_states": size, "gamma": gamma}
            try:
                k = minimal_truncation_order(mdps[gamma], config.penalty_strength,
                                             config.k_max)
                cell["minimal_k"] = k
                cell["status"] = "ok" if k is not None else "not-found"
            except InstanceTooLargeError as e:
                cell["minimal_k"] = None
                cell["status"] = f"unavailable: {e}"
            rows.append(cell)
    table = _csv_text(
        ["num_states", "gamma", "minimal_k", "status"],
        [[r["num_states"], r["gamma"],
          "" if r["minimal_k"] is None else r["minimal_k"], r["status"]] for r in rows],
    )
    _write(config.out_dir, "k_heatmap.csv", table)
    _write(config.out_dir, "k_heatmap_config.json", json.dumps(config.as_dict(), indent=1))
    return rows


def run_tts_sweep(config: ExperimentConfig) -> list[dict]:
    """Sweep-count scan per instance, reporting TTS rows and the optimum."""
    out: list[dict] = []
    for size in sorted(config.sizes):
        for gamma in sorted(config.gammas):
            mdp = build_hallway(size, gamma, config.slip)
            k = _resolve_truncation(mdp, config)
            if k is None:
                out.append({"num_states": size, "gamma": gamma, "status": "no-truncation"})
                continue
            ham = compile_hamiltonian(mdp, CompilerConfig(k, config.penalty_strength))
            qubo = quadratize(ham.polynomial, config.reduction_penalty,
                              num_variables=ham.num_variables)
            # ground energy of the QUBO equals the unreduced minimum
            ground = float(all_assignment_energies(ham.polynomial,
                                                   ham.num_variables).min())
            result = tts_sweep(qubo.polynomial, ground, config.sweep_grid,
                               config.num_reads, config.desired_probability,
                               rng_seed=config.seed,
                               num_variables=qubo.num_variables)
            out.append({"num_states": size, "gamma": gamma, "truncation": k,
                        "variables": qubo.num_variables, "ground_energy": ground,
                        "result": result, "status": "ok"})
    rows = []
    for item in out:
        if item["status"] != "ok":
            continue
        for row in item["result"].rows:
            est = row.estimate
            rows.append([item["num_states"], item["gamma"], item["truncation"],
                         item["variables"], row.num_sweeps,
                         est.success_probability, est.std_error, est.effort,
                         est.value, tts_std_error(est), est.status])
    table = _csv_text(
        ["num_states", "gamma", "truncation", "variables", "num_sweeps",
         "p_s", "p_s_stderr", "effort", "tts", "tts_stderr", "status"], rows)
    _write(config.out_dir, "tts_sweep.csv", table)
    summary = _csv_text(
        ["num_states", "gamma", "optimal_num_sweeps", "optimal_tts"],
        [[i["num_states"], i["gamma"],
          i["result"].optimal_num_sweeps if i["status"] == "ok" else "",
          i["result"].optimal.estimate.value
          if i["status"] == "ok" and i["result"].optimal else ""]
         for i in out])
    _write(config.out_dir, "tts_sweep_summary.csv", summary)
    _write(config.out_dir, "tts_sweep_config.json", json.dumps(config.as_dict(), indent=1))
    return out


def run_resources(config: ExperimentConfig) -> list[dict]:
    """Counted |V| and |J| per instance, one CSV row each."""
    rows: list[dict] = []
    for size in sorted(config.sizes):
        for gamma in sorted(config.gammas):
            mdp = build_hallway(size, gamma, config.slip)
            k = _resolve_truncation(mdp, config)
            if k is None:
                continue
            ham = compile_hamiltonian(mdp, CompilerConfig(k, config.penalty_strength))
            qubo = quadratize(ham.polynomial, config.reduction_penalty,
                              num_variables=ham.num_variables)
            report = count_resources(qubo, truncation=k, discount=gamma,
                                     num_states=size, num_actions=mdp.num_actions)
            rows.append({"num_states": size, "gamma": gamma, "report": report})
    table = _csv_text(
        ["num_states", "gamma", "truncation", "base_variables",
         "logical_variables", "coefficient_count", "fit_value",
         "qaoa_ancilla", "qaoa_worst_log2"],
        [[r["num_states"], r["gamma"], r["report"].truncation,
          r["report"].base_variables, r["report"].logical_variables,
          r["report"].coefficient_count, r["report"].fit_value,
          r["report"].qaoa_gate_volume_ancilla.value,
          r["report"].qaoa_gate_volume_worst.log2] for r in rows])
    _write(config.out_dir, "resources.csv", table)
    _write(config.out_dir, "resources_config.json", json.dumps(config.as_dict(), indent=1))
    return rows


def run_oracle_compare(config: ExperimentConfig, num_states: int, gamma: float,
                       truncation: int | None = None) -> dict:
    """Pairwise interior-policy agreement across every solver family."""
    mdp = build_hallway(num_states, gamma, config.slip)
    k = truncation if truncation is not None else _resolve_truncation(mdp, config)
    if k is None:
        raise ValueError("no suitable truncation order; pass one explicitly")
    _, greedy = value_iteration(mdp)
    vi = _interior(greedy)
    best_pol, _, _ = best_policy_exhaustive(mdp)
    exhaustive_dp = _interior(best_pol)

    ham = compile_hamiltonian(mdp, CompilerConfig(k, config.penalty_strength))
    minimizers, ground = exhaustive_ground_state(ham.polynomial, ham.num_variables)
    gs_policy = PolicyAssignment(minimizers[0], num_states, mdp.num_actions)
    ham_interior = _interior(gs_policy) if gs_policy.is_feasible() else None

    qubo = quadratize(ham.polynomial, config.reduction_penalty,
                      num_variables=ham.num_variables)
    beta0, beta1 = default_beta_range(qubo.polynomial)
    schedule = AnnealSchedule(config.num_sweeps, beta0, beta1,
                              num_reads=config.num_reads, rng_seed=config.seed)
    reads = simulated_anneal(qubo.polynomial, schedule, num_variables=qubo.num_variables)
    best = min(reads, key=lambda r: r.energy)
    sa_policy = PolicyAssignment(project(best.assignment, qubo.registry),
                                 num_states, mdp.num_actions)
    sa_interior = _interior(sa_policy) if sa_policy.is_feasible() else None

    terminals = terminal_states(mdp)
    q_hits = 0
    for i in range(config.num_qlearning_seeds):
        cfg = QLearningConfig(num_episodes=config.qlearning_episodes,
                              rng_seed=config.seed + i)
        _, q_greedy = q_learning(mdp, cfg, terminal=terminals)
        if _interior(q_greedy) == vi:
            q_hits += 1
    q_rate = q_hits / config.num_qlearning_seeds

    columns = {
        "value_iteration": vi,
        "exhaustive_policy_search": exhaustive_dp,
        "hamiltonian_ground_state": ham_interior,
        "simulated_annealing": sa_interior,
    }
    agreement = {
        f"{a}|{b}": (columns[a] is not None and columns[a] == columns[b])
        for a in columns for b in columns if a < b
    }
    record = {
        "experiment": "oracle-compare",
        "config": config.as_dict(),
        "instance": {"num_states": num_states, "gamma": gamma, "slip": config.slip,
                     "truncation": k},
        "interior_policies": columns,
        "agreement": agreement,
        "qlearning": {"seeds": config.num_qlearning_seeds,
                      "episodes": config.qlearning_episodes,
                      "agreement_rate_vs_vi": q_rate},
        "energies": {"hamiltonian_ground": ground,
                     "sa_best": best.energy},
    }
    _write(config.out_dir, f"oracle_compare_s{num_states}_g{gamma}.json",
           json.dumps(record, indent=1))
    return record


def solve_heatmap_consistency(config: ExperimentConfig, num_states: int,
                              gamma: float) -> dict:
    """Cross-check: solve agreement at K is true exactly when K >= minimal K."""
    mdp = build_hallway(num_states, gamma, config.slip)
    minimal = minimal_truncation_order(mdp, config.penalty_strength, config.k_max)
    per_k = {}
    consistent = True
    for k in range(1, config.k_max + 1):
        record = run_solve(dataclasses.replace(config, out_dir=None),
                           num_states, gamma, truncation=k)
        agree = record["exhaustive"]["agreement"]
        per_k[k] = agree
        if minimal is not None and agree != (k >= minimal):
            consistent = False
    return {"minimal_k": minimal, "agreement_by_k": per_k, "consistent": consistent}
