"""Experiment harness: parameter sweeps, cross-checks, and report emission.

Every command is fully determined by its resolved configuration (explicit
seed included), writes one report per requested format into the output
directory, and prints a one-line summary per sweep point.  A flat
``key=value`` config file can supply any flag; command-line flags win on
conflict.  ``SPINGLASS_SEED`` serves as a fallback master seed.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import amp as amp_mod
from . import bp as bp_mod
from . import exact as exact_mod
from . import models as models_mod
from . import oracles as oracles_mod
from . import replica as replica_mod
from . import state_evolution as se_mod
from .errors import NumericFailure
from .numerics import SeedSpec
from .reports import Row, emit_svg, write_csv, write_json

COMMANDS = (
    "se-sweep",
    "amp-run",
    "amp-vs-se",
    "landscape",
    "phases",
    "sbm-bp",
    "popdyn",
    "oracle-check",
)


def _lambda_grid(lo: float, hi: float, step: float) -> np.ndarray:
    count = int(round((hi - lo) / step)) + 1
    return np.linspace(lo, hi, count)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinglass", description=__doc__)
    parser.add_argument("--config", type=str, default=None, help="flat key=value config file")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=None, help="master seed")
        p.add_argument("--out", type=str, default="reports", help="output directory")
        p.add_argument("--formats", type=str, default="csv,json")
        p.add_argument("--store-observation", action="store_true")

    p = sub.add_parser("se-sweep", help="state-evolution fixed points over a lambda grid")
    p.add_argument("--lambda-min", type=float, required=True)
    p.add_argument("--lambda-max", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    common(p)

    p = sub.add_parser("amp-run", help="run AMP on fresh spiked Wigner instances")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--seeds", type=int, default=1)
    common(p)

    p = sub.add_parser("amp-vs-se", help="compare empirical AMP overlap to the prediction")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--seeds", type=int, default=10)
    common(p)

    p = sub.add_parser("landscape", help="replica free-energy curve F(q) at one lambda")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--grid-size", type=int, default=replica_mod.DEFAULT_GRID_SIZE)
    common(p)

    p = sub.add_parser("phases", help="phase labels and thresholds over a lambda grid")
    p.add_argument("--lambda-min", type=float, required=True)
    p.add_argument("--lambda-max", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    common(p)

    p = sub.add_parser("sbm-bp", help="belief propagation on block-model graphs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--mode", choices=["edge-only", "full"], required=True)
    p.add_argument("--seeds", type=int, default=1)
    common(p)

    p = sub.add_parser("popdyn", help="population dynamics for the message distribution")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--pool", type=int, default=bp_mod.DEFAULT_POOL_SIZE)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--init", type=float, default=1e-2)
    common(p)

    p = sub.add_parser("oracle-check", help="small-instance oracle cross-checks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    common(p)
    return parser


def _read_config_file(path: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SystemExit(f"usage error: malformed config line {line!r}")
        key, value = line.split("=", 1)
        entries[key.strip()] = value.strip()
    return entries


def parse_config(argv: list[str]) -> argparse.Namespace:
    """Parse flags, merging in a config file with flag-over-file precedence."""
    parser = build_parser()
    # locate the command and --config by hand: a real pre-parse would reject
    # required flags that the config file is about to supply
    config_path = None
    command = None
    it = iter(range(len(argv)))
    for i in it:
        tok = argv[i]
        if tok == "--config":
            config_path = argv[i + 1] if i + 1 < len(argv) else None
            next(it, None)
        elif tok.startswith("--config="):
            config_path = tok.split("=", 1)[1]
        elif command is None and tok in COMMANDS:
            command = tok
    if config_path:
        if command is None:
            raise SystemExit("usage error: --config requires a command")
        entries = _read_config_file(config_path)
        sub_actions = next(
            a for a in parser._actions if isinstance(a, argparse._SubParsersAction)
        )
        subparser = sub_actions.choices[command]
        known = {
            opt.lstrip("-")
            for action in subparser._actions
            for opt in action.option_strings
        }
        file_args: list[str] = []
        for key, value in entries.items():
            if key not in known:
                raise SystemExit(f"usage error: unknown config key {key!r}")
            if value.lower() in ("true", "false"):
                if value.lower() == "true":
                    file_args.append(f"--{key}")
            else:
                file_args.extend([f"--{key}", value])
        idx = argv.index(command)
        argv = argv[: idx + 1] + file_args + argv[idx + 1 :]
    args = parser.parse_args(argv)
    if args.seed is None:
        args.seed = int(os.environ.get("SPINGLASS_SEED", "0"))
    return args


def resolved_config(args: argparse.Namespace) -> Row:
    cfg = {k: v for k, v in vars(args).items() if k != "config"}
    return {k: v for k, v in sorted(cfg.items())}


# ---------------------------------------------------------------------------
# commands


def _cmd_se_sweep(args) -> tuple[list[str], list[Row], Row, tuple[str, list[str]]]:
    rows = []
    for lam in _lambda_grid(args.lambda_min, args.lambda_max, args.step):
        pred = se_mod.se_predict(float(lam))
        traj = pred.trajectory
        rows.append(
            {
                "lambda": float(lam),
                "gamma_inf": traj.fixed_point,
                "mu_inf": pred.mu_inf,
                "sigma_inf": pred.sigma_inf,
                "q_star": pred.q_star,
                "iterations": len(traj.gammas) - 1,
                "converged": traj.converged,
            }
        )
        print(f"se-sweep lambda={lam:.6g} gamma_inf={traj.fixed_point:.6g}")
    cols = ["lambda", "gamma_inf", "mu_inf", "sigma_inf", "q_star", "iterations", "converged"]
    return cols, rows, {}, ("lambda", ["q_star"])


def _cmd_amp_run(args) -> tuple[list[str], list[Row], Row, tuple[str, list[str]]]:
    master = SeedSpec(args.seed)
    rows = []
    trajectory_rows: list[Row] = []
    for i in range(args.seeds):
        instance = models_mod.gen_spiked_wigner(args.n, args.lam, master.stream(2 * i))
        result = amp_mod.amp_run(instance, seed=master.stream(2 * i + 1))
        rows.append(
            {
                "seed_stream": 2 * i,
                "overlap": float(result.overlap_trajectory[-1]),
                "iterations": result.iterations,
                "converged": result.converged,
            }
        )
        print(
            f"amp-run lambda={args.lam:.6g} stream={2 * i} "
            f"overlap={result.overlap_trajectory[-1]:.6g}"
        )
        if i == 0:
            trajectory_rows = _amp_trajectory(instance, master.stream(1))
            if args.store_observation:
                Path(args.out).mkdir(parents=True, exist_ok=True)
                (Path(args.out) / "amp-run-instance.json").write_text(
                    models_mod.instance_to_json(instance, store_observation=True)
                )
    extra = {"trajectory": trajectory_rows}
    return ["seed_stream", "overlap", "iterations", "converged"], rows, extra, (
        "seed_stream",
        ["overlap"],
    )


def _amp_trajectory(instance, seed: SeedSpec) -> list[Row]:
    """Per-step dump: t, overlap, iterate_rms_change, b_t."""
    rng = seed.generator()
    v0 = amp_mod.DEFAULT_INIT_SCALE * rng.standard_normal(instance.n)
    _, _, _, iterates = amp_mod.iterate_amp(
        instance.observation, instance.lam, v0, amp_mod.DEFAULT_MAX_ITERS, amp_mod.DEFAULT_TOL
    )
    rows = []
    for t, v in enumerate(iterates):
        f = np.tanh(instance.lam * v)
        b_t = instance.lam * (1.0 - float(np.dot(f, f)) / instance.n)
        change = (
            float(np.linalg.norm(v - iterates[t - 1]) / np.sqrt(instance.n)) if t else 0.0
        )
        rows.append(
            {
                "t": t,
                "overlap": models_mod.overlap(f, instance.truth),
                "iterate_rms_change": change,
                "b_t": b_t,
            }
        )
    return rows


def _cmd_amp_vs_se(args) -> tuple[list[str], list[Row], Row, tuple[str, list[str]]]:
    master = SeedSpec(args.seed)
    overlaps = []
    for i in range(args.seeds):
        instance = models_mod.gen_spiked_wigner(args.n, args.lam, master.stream(2 * i))
        result = amp_mod.amp_run(instance, seed=master.stream(2 * i + 1))
        overlaps.append(float(result.overlap_trajectory[-1]))
    q_star = se_mod.se_predict(args.lam).q_star
    mean_overlap = float(np.mean(overlaps))
    row = {
        "lambda": args.lam,
        "n": args.n,
        "seeds": args.seeds,
        "mean_overlap": mean_overlap,
        "q_star": q_star,
        "abs_diff": abs(mean_overlap - q_star),
    }
    print(
        f"amp-vs-se lambda={args.lam:.6g} mean_overlap={mean_overlap:.6g} "
        f"q_star={q_star:.6g}"
    )
    return list(row), [row], {}, ("lambda", ["mean_overlap", "q_star"])


def _cmd_landscape(args) -> tuple[list[str], list[Row], Row, tuple[str, list[str]]]:
    curve = replica_mod.landscape(args.lam, args.grid_size)
    rows = [
        {"lambda": args.lam, "q": float(q), "F": float(f)}
        for q, f in zip(curve.grid_q, curve.grid_f)
    ]
    extra = {
        "summary": {
            "lambda": args.lam,
            "minima": [float(q) for q in curve.minima],
            "global_min_q": curve.global_min_q,
            "phase": curve.phase.value,
        }
    }
    print(
        f"landscape lambda={args.lam:.6g} global_min_q={curve.global_min_q:.6g} "
        f"phase={curve.phase.value}"
    )
    return ["lambda", "q", "F"], rows, extra, ("q", ["F"])


def _cmd_phases(args) -> tuple[list[str], list[Row], Row, tuple[str, list[str]]]:
    grid = _lambda_grid(args.lambda_min, args.lambda_max, args.step)
    curves = [replica_mod.landscape(float(lam)) for lam in grid]
    lam_stat, lam_comp = replica_mod.thresholds_from_curves(grid, curves)
    rows = []
    summaries = []
    for lam, curve in zip(grid, curves):
        rows.append(
            {
                "lambda": float(lam),
                "global_min_q": curve.global_min_q,
                "phase": curve.phase.value,
            }
        )
        summaries.append(
            {
                "lambda": float(lam),
                "minima": [float(q) for q in curve.minima],
                "global_min_q": curve.global_min_q,
                "phase": curve.phase.value,
            }
        )
        print(f"phases lambda={lam:.6g} phase={curve.phase.value}")
    extra = {
        "summary": {
            "phases": summaries,
            "lambda_stat": lam_stat,
            "lambda_comp": lam_comp,
        }
    }
    return ["lambda", "global_min_q", "phase"], rows, extra, ("lambda", ["global_min_q"])


def _cmd_sbm_bp(args) -> tuple[list[str], list[Row], Row, tuple[str, list[str]]]:
    master = SeedSpec(args.seed)
    ks_value, _ = bp_mod.ks_threshold(*bp_mod.sbm_to_ks(args.a, args.b))
    rows = []
    for i in range(args.seeds):
        graph = models_mod.gen_sbm(args.n, args.a, args.b, master.stream(2 * i))
        if i == 0 and args.store_observation:
            Path(args.out).mkdir(parents=True, exist_ok=True)
            (Path(args.out) / "sbm-bp-instance.json").write_text(
                models_mod.instance_to_json(graph, store_observation=True)
            )
        result = bp_mod.bp_run(graph, mode=args.mode, seed=master.stream(2 * i + 1))
        rows.append(
            {
                "a": args.a,
                "b": args.b,
                "n": args.n,
                "mode": args.mode,
                "seed_stream": 2 * i,
                "iterations": result.iterations,
                "converged": result.converged,
                "overlap": result.overlap,
                "ks_value": ks_value,
            }
        )
        print(f"sbm-bp a={args.a:g} b={args.b:g} stream={2 * i} overlap={result.overlap:.6g}")
    cols = ["a", "b", "n", "mode", "seed_stream", "iterations", "converged", "overlap", "ks_value"]
    return cols, rows, {}, ("seed_stream", ["overlap"])


def _cmd_popdyn(args) -> tuple[list[str], list[Row], Row, tuple[str, list[str]]]:
    stats = bp_mod.population_dynamics(
        args.k, args.eps, args.pool, args.iters, init=args.init, seed=SeedSpec(args.seed)
    )
    rows = [
        {"iteration": i, "mean": float(m), "second_moment": float(s)}
        for i, (m, s) in enumerate(stats)
    ]
    print(f"popdyn k={args.k:g} eps={args.eps:g} final_mean={stats[-1, 0]:.6g}")
    return ["iteration", "mean", "second_moment"], rows, {}, ("iteration", ["mean"])


def _cmd_oracle_check(args) -> tuple[list[str], list[Row], Row, tuple[str, list[str]]]:
    master = SeedSpec(args.seed)
    if args.lam is not None:
        instance = models_mod.gen_spiked_wigner(args.n, args.lam, master.stream(0))
        rng = master.stream(1).generator()
        v_cur = rng.standard_normal(args.n)
        v_prev = rng.standard_normal(args.n)
        state = amp_mod.AmpState(v_current=v_cur, v_previous=v_prev, t=1, lam=args.lam)
        fast = amp_mod.amp_step(state, instance).v_current
        naive = oracles_mod.naive_amp_step(v_cur, v_prev, instance.observation, args.lam)
        row: Row = {
            "model": "spiked-wigner",
            "n": args.n,
            "amp_step_max_diff": float(np.max(np.abs(fast - naive))),
        }
        if args.n <= exact_mod.MAX_ENUM_N:
            marg = exact_mod.exact_posterior_marginals(instance)
            row["max_gauge_marginal"] = float(np.max(np.abs(marg)))
    elif args.a is not None and args.b is not None:
        graph = models_mod.gen_sbm(args.n, args.a, args.b, master.stream(0))
        couplings = bp_mod.couplings_from_rates(args.a, args.b, args.n)
        messages = bp_mod.init_messages(graph, init_scale=0.3, seed=master.stream(1))
        beliefs = master.stream(2).generator().uniform(-0.3, 0.3, size=args.n)
        fast_msgs, fast_beliefs = bp_mod.bp_full_step(graph, messages, beliefs, couplings)
        naive_msgs, naive_beliefs = oracles_mod.naive_bp_full_step(
            graph, messages, beliefs, couplings
        )
        msg_diff = max(
            (abs(m - naive_msgs[key]) for key, m in fast_msgs.as_dict().items()),
            default=0.0,
        )
        row = {
            "model": "sbm",
            "n": args.n,
            "bp_full_step_msg_max_diff": float(msg_diff),
            "bp_full_step_belief_max_diff": float(np.max(np.abs(fast_beliefs - naive_beliefs))),
        }
    else:
        raise SystemExit("usage error: oracle-check needs --lambda or both --a and --b")
    print("oracle-check " + " ".join(f"{k}={v}" for k, v in row.items()))
    return list(row), [row], {}, (list(row)[1], [list(row)[2]])


_DISPATCH = {
    "se-sweep": _cmd_se_sweep,
    "amp-run": _cmd_amp_run,
    "amp-vs-se": _cmd_amp_vs_se,
    "landscape": _cmd_landscape,
    "phases": _cmd_phases,
    "sbm-bp": _cmd_sbm_bp,
    "popdyn": _cmd_popdyn,
    "oracle-check": _cmd_oracle_check,
}


def run(args: argparse.Namespace) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    config = resolved_config(args)
    try:
        columns, rows, extra, (svg_x, svg_y) = _DISPATCH[args.command](args)
    except NumericFailure as exc:
        print(f"numeric failure: {exc} (config: {config})", file=sys.stderr)
        return 2
    formats = [f.strip() for f in args.formats.split(",") if f.strip()]
    for fmt in formats:
        path = out_dir / f"{args.command}.{fmt}"
        if fmt == "csv":
            write_csv(path, columns, rows, config)
        elif fmt == "json":
            write_json(path, rows, config, extra or None)
        elif fmt == "svg":
            emit_svg(rows, svg_x, svg_y, path)
        else:
            raise SystemExit(f"usage error: unknown format {fmt!r}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = parse_config(sys.argv[1:] if argv is None else argv)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
