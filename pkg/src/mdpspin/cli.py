"""Command-line interface.

Subcommands: compile, quadratize, anneal, oracle, validate, resources,
solve, k-heatmap, tts-sweep, oracle-compare.  Options may come from a flat
``key = value`` config file (lists comma-separated); command-line flags
override file values, which override defaults.  Exit codes: 0 success,
2 validation/parse error, 3 budget or size-limit error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .anneal import (AnnealSchedule, default_beta_range, simulated_anneal,
                     success_probability)
from .compiler import CompilerConfig, compile_hamiltonian
from .dp import QLearningConfig, best_policy_exhaustive, q_learning, value_iteration
from .errors import BudgetExceededError, InstanceTooLargeError
from .experiments import (EXPERIMENTS, ExperimentConfig, run_k_heatmap,
                          run_oracle_compare, run_resources, run_solve,
                          run_tts_sweep)
from .mdp import (Mdp, ParseError, PolicyAssignment, ValidationError, build_hallway,
                  load_mdp, terminal_states, validate)
from .pseudoboolean import PseudoBooleanPolynomial, all_assignment_energies
from .quadratize import consistency_violations, project, quadratize, to_qubo_text

_CONFIG_LIST_KEYS = {"sizes": int, "gammas": float, "sweep_grid": int}
_CONFIG_SCALAR_KEYS = {
    "experiment": str, "slip": float, "truncation": int, "k_max": int,
    "penalty_strength": float, "reduction_penalty": float, "num_sweeps": int,
    "num_reads": int, "desired_probability": float, "seed": int,
    "num_qlearning_seeds": int, "qlearning_episodes": int, "match_rule": str,
    "out_dir": str,
}


def parse_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; '#' comments; lists comma-separated."""
    values: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key in _CONFIG_LIST_KEYS:
                cast = _CONFIG_LIST_KEYS[key]
                values[key] = tuple(cast(v.strip()) for v in val.split(",") if v.strip())
            elif key in _CONFIG_SCALAR_KEYS:
                values[key] = _CONFIG_SCALAR_KEYS[key](val)
            else:
                raise ParseError(f"{path}:{lineno}: unknown key {key!r}")
    return values


def _experiment_config(args, experiment: str) -> ExperimentConfig:
    values: dict = {}
    if getattr(args, "config", None):
        values.update(parse_config_file(args.config))
    for key in list(_CONFIG_SCALAR_KEYS) + list(_CONFIG_LIST_KEYS):
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            values[key] = tuple(cli_val) if key in _CONFIG_LIST_KEYS else cli_val
    values["experiment"] = experiment
    if getattr(args, "out", None):
        values["out_dir"] = args.out
    return ExperimentConfig(**values)


def _load_instance(args) -> Mdp:
    if getattr(args, "mdp", None):
        with open(args.mdp) as fh:
            return load_mdp(fh.read())
    if getattr(args, "hallway", None):
        gamma = args.gamma if args.gamma is not None else 0.99
        slip = args.slip if args.slip is not None else 0.04
        return build_hallway(args.hallway, gamma, slip)
    raise ValidationError(["no instance given: pass --mdp FILE or --hallway N"])


def _emit(args, text: str, filename: str) -> None:
    if getattr(args, "out", None):
        import os

        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, filename)
        with open(path, "w") as fh:
            fh.write(text)
        print(f"wrote {path}")
    else:
        sys.stdout.write(text)


def _add_instance_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mdp", help="MDP document (JSON) to load")
    p.add_argument("--hallway", type=int, metavar="N",
                   help="build an N-state hallway instead of loading a document")
    p.add_argument("--gamma", type=float, help="discount factor (hallway)")
    p.add_argument("--slip", type=float, help="slip probability (hallway)")


def _cmd_compile(args) -> int:
    mdp = _load_instance(args)
    config = CompilerConfig(args.truncation, args.penalty)
    ham = compile_hamiltonian(mdp, config)
    print(f"num_terms={len(ham.polynomial)} objective_terms={len(ham.objective)} "
          f"degree={ham.polynomial.degree()} constant_offset={ham.constant_offset!r}")
    _emit(args, ham.polynomial.to_text(), "hamiltonian.txt")
    return 0


def _cmd_quadratize(args) -> int:
    if args.poly:
        with open(args.poly) as fh:
            poly = PseudoBooleanPolynomial.from_text(fh.read())
        base = poly.num_variables
    else:
        mdp = _load_instance(args)
        ham = compile_hamiltonian(mdp, CompilerConfig(args.truncation, args.penalty))
        poly, base = ham.polynomial, ham.num_variables
    qubo = quadratize(poly, args.m_or, num_variables=base)
    print(f"variables={qubo.num_variables} ancillas={qubo.registry.num_ancillas} "
          f"terms={len(qubo.polynomial)}")
    _emit(args, to_qubo_text(qubo), "problem.qubo")
    return 0


def _cmd_anneal(args) -> int:
    mdp = _load_instance(args)
    ham = compile_hamiltonian(mdp, CompilerConfig(args.truncation, args.penalty))
    qubo = quadratize(ham.polynomial, args.m_or, num_variables=ham.num_variables)
    if args.beta_start is not None and args.beta_end is not None:
        beta0, beta1 = args.beta_start, args.beta_end
    else:
        beta0, beta1 = default_beta_range(qubo.polynomial)
    schedule = AnnealSchedule(args.sweeps, beta0, beta1, num_reads=args.reads,
                              rng_seed=args.seed or 0)
    reads = simulated_anneal(qubo.polynomial, schedule,
                             num_variables=qubo.num_variables)
    ground = float(all_assignment_energies(ham.polynomial, ham.num_variables).min())
    p_s, p_err = success_probability(reads, ground)
    lines = ["read,energy,feasible,consistent,policy_bits"]
    for i, read in enumerate(reads):
        pol = PolicyAssignment(project(read.assignment, qubo.registry),
                               mdp.num_states, mdp.num_actions)
        bits = "".join(str(int(b)) for b in pol.bits)
        lines.append(f"{i},{read.energy!r},{int(pol.is_feasible())},"
                     f"{int(consistency_violations(read.assignment, qubo.registry) == 0)},"
                     f"{bits}")
    lines.append(f"# summary: reads={args.reads} sweeps={args.sweeps} "
                 f"beta=[{beta0!r},{beta1!r}] ground_energy={ground!r} "
                 f"p_s={p_s!r} stderr={p_err!r} p_d={args.pd}")
    _emit(args, "\n".join(lines) + "\n", "anneal.csv")
    return 0


def _cmd_oracle(args) -> int:
    mdp = _load_instance(args)
    lines = ["method,state,action,value"]
    q, greedy = value_iteration(mdp)
    for s in range(mdp.num_states):
        for a in range(mdp.num_actions):
            lines.append(f"value_iteration,{s},{a},{q[s, a]!r}")
    if args.exhaustive:
        best, total, ties = best_policy_exhaustive(mdp)
        lines.append(f"# exhaustive best action-value sum: {total!r} ties: {len(ties)}")
        lines.append("# exhaustive policy: " +
                     " ".join(str(int(a)) for a in best.actions()))
    if args.qlearning:
        cfg = QLearningConfig(learning_rate=args.alpha, epsilon=args.epsilon,
                              num_episodes=args.episodes, rng_seed=args.seed or 0)
        ql, ql_greedy = q_learning(mdp, cfg, terminal=terminal_states(mdp))
        for s in range(mdp.num_states):
            for a in range(mdp.num_actions):
                lines.append(f"q_learning,{s},{a},{ql[s, a]!r}")
        lines.append("# q-learning greedy policy: " +
                     " ".join(str(int(a)) for a in ql_greedy.actions()))
    lines.append("# value-iteration greedy policy: " +
                 " ".join(str(int(a)) for a in greedy.actions()))
    _emit(args, "\n".join(lines) + "\n", "oracle.csv")
    return 0


def _cmd_validate(args) -> int:
    mdp = _load_instance(args)
    violations = validate(mdp)
    if violations:
        for v in violations:
            print(v)
        return 2
    print("valid")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="mdpspin",
        description="Compile MDPs to truncated spin cost functions, reduce to "
                    "QUBO, solve, and cross-check against exact DP.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile an MDP to polynomial form")
    _add_instance_flags(p)
    p.add_argument("--truncation", "-K", type=int, required=True)
    p.add_argument("--penalty", "-M", type=float, default=3.0)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("quadratize", help="reduce to QUBO form")
    _add_instance_flags(p)
    p.add_argument("--poly", help="polynomial text file (alternative to an instance)")
    p.add_argument("--truncation", "-K", type=int, default=3)
    p.add_argument("--penalty", "-M", type=float, default=3.0)
    p.add_argument("--m-or", type=float, default=5.0)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=_cmd_quadratize)

    p = sub.add_parser("anneal", help="simulated annealing on the QUBO")
    _add_instance_flags(p)
    p.add_argument("--truncation", "-K", type=int, default=3)
    p.add_argument("--penalty", "-M", type=float, default=3.0)
    p.add_argument("--m-or", type=float, default=5.0)
    p.add_argument("--sweeps", type=int, default=20)
    p.add_argument("--reads", type=int, default=1000)
    p.add_argument("--beta-start", type=float)
    p.add_argument("--beta-end", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--pd", type=float, default=0.99)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=_cmd_anneal)

    p = sub.add_parser("oracle", help="exact DP and Q-learning baselines")
    _add_instance_flags(p)
    p.add_argument("--exhaustive", action="store_true",
                   help="also run exhaustive policy search")
    p.add_argument("--qlearning", action="store_true")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--episodes", type=int, default=20000)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("validate", help="check an MDP document")
    _add_instance_flags(p)
    p.set_defaults(func=_cmd_validate)

    for name in ("solve", "oracle-compare"):
        p = sub.add_parser(name, help=f"run the {name} pipeline on one instance")
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--num-states", type=int, default=6)
        p.add_argument("--gamma", type=float, default=0.99)
        p.add_argument("--truncation", type=int)
        p.add_argument("--penalty-strength", type=float, dest="penalty_strength")
        p.add_argument("--reduction-penalty", type=float, dest="reduction_penalty")
        p.add_argument("--num-sweeps", type=int, dest="num_sweeps")
        p.add_argument("--num-reads", type=int, dest="num_reads")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output directory")
        p.set_defaults(func=_cmd_single, experiment_name=name)

    for name in ("k-heatmap", "tts-sweep", "resources"):
        p = sub.add_parser(name, help=f"run the {name} grid experiment")
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--sizes", type=int, nargs="+")
        p.add_argument("--gammas", type=float, nargs="+")
        p.add_argument("--truncation", type=int)
        p.add_argument("--k-max", type=int, dest="k_max")
        p.add_argument("--penalty-strength", type=float, dest="penalty_strength")
        p.add_argument("--reduction-penalty", type=float, dest="reduction_penalty")
        p.add_argument("--num-reads", type=int, dest="num_reads")
        p.add_argument("--sweep-grid", type=int, nargs="+", dest="sweep_grid")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output directory")
        p.set_defaults(func=_cmd_grid, experiment_name=name)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (BudgetExceededError, InstanceTooLargeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def _cmd_single(args) -> int:
    config = _experiment_config(args, "solve" if args.experiment_name == "solve"
                                else "oracle-compare")
    runner = run_solve if args.experiment_name == "solve" else run_oracle_compare
    record = runner(config, args.num_states, args.gamma, truncation=args.truncation)
    print(json.dumps(record, indent=1, default=str))
    return 0


def _cmd_grid(args) -> int:
    name = args.experiment_name
    config = _experiment_config(args, name)
    if name == "k-heatmap":
        rows = run_k_heatmap(config)
        for r in rows:
            print(f"|S|={r['num_states']} gamma={r['gamma']}: "
                  f"K={r['minimal_k']} ({r['status']})")
    elif name == "tts-sweep":
        items = run_tts_sweep(config)
        for item in items:
            if item["status"] != "ok":
                print(f"|S|={item['num_states']} gamma={item['gamma']}: {item['status']}")
                continue
            opt = item["result"].optimal
            print(f"|S|={item['num_states']} gamma={item['gamma']}: "
                  f"n_s*={item['result'].optimal_num_sweeps} "
                  f"TTS*={opt.estimate.value if opt else math.nan:.6g}")
    else:
        rows = run_resources(config)
        for r in rows:
            rep = r["report"]
            print(f"|S|={r['num_states']} gamma={r['gamma']}: K={rep.truncation} "
                  f"|V|={rep.logical_variables} |J|={rep.coefficient_count}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
