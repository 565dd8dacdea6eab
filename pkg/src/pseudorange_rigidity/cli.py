"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 estimation did not converge,
3 ``--assert-rigid`` failed.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import secrets
import sys
import time
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .combinatorics import DecompositionWitness, find_gnss_decomposition
from .gnss import (
    Scenario,
    asymptotic_savings,
    estimate,
    formation_savings,
    generate_random_scenario,
    is_solvable,
    min_measurements,
    minimal_solvable_scenario,
    position_errors,
    scenario_from_dict,
    scenario_to_dict,
    scene_scale,
    simulate_measurements,
)
from .graphs import GnssGraph, graph_from_dict
from .numeric import as_seed_sequence
from .rigidity import gnss_generic_rank, s_p

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CONVERGED = 2
EXIT_ASSERT = 3

REPORT_SCHEMA = 1


class InputError(Exception):
    """Unreadable or malformed input; maps to exit code 1."""


# --- reports --------------------------------------------------------------


class _Report:
    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, doc: dict):
        names = {f.name for f in fields(cls)}
        unknown = set(doc) - names
        if unknown:
            raise ValueError(f"unknown report fields: {sorted(unknown)}")
        return cls(**doc)


@dataclass
class AnalysisReport(_Report):
    """Result of ``analyze`` or ``decompose``.

    ``witness`` holds the split when the input is rigid; otherwise
    ``deficit`` and ``best_split`` describe the closest split found.
    Vertex ids in edge lists are agent indices; ``agents`` names them for
    scenario inputs.
    """

    command: str
    input_path: str
    input_sha256: str
    kind: str
    dimension: int
    n: int
    rank: int
    bound: int
    flex_dofs: int
    verdict: str
    numeric: dict
    combinatorial: dict | None
    agree: bool
    witness: dict | None
    deficit: int | None
    best_split: dict | None
    agents: list | None
    seeds: dict
    warnings: list = field(default_factory=list)
    timing_s: float = 0.0
    schema: int = REPORT_SCHEMA


@dataclass
class EstimateReport(_Report):
    input_path: str
    input_sha256: str
    converged: bool
    iterations: int
    residual_norm: float
    position_errors: dict
    max_position_error: float
    jacobian_rank: int
    n_unknowns: int
    perturb: float
    scene_scale: float
    diagnostic: str
    seeds: dict
    timing_s: float = 0.0
    command: str = "estimate"
    schema: int = REPORT_SCHEMA


# --- input handling -------------------------------------------------------


def load_input(path: str) -> tuple[str, GnssGraph | Scenario, str]:
    """Read a graph or scenario document; returns ``(kind, object, sha256)``."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    digest = hashlib.sha256(raw).hexdigest()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    except UnicodeDecodeError as exc:
        raise InputError(f"{path}: not UTF-8 text ({exc.reason})") from None
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be a JSON object")
    try:
        if "constellations" in doc or "receivers" in doc or "schema" in doc:
            return "scenario", scenario_from_dict(doc), digest
        if "n" in doc:
            return "graph", graph_from_dict(doc), digest
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    raise InputError(f"{path}: neither a graph (field 'n') nor a scenario (field 'constellations')")


def _resolve_seed(seed: int | None) -> int:
    return secrets.randbits(32) if seed is None else seed


def _edges(g) -> list[list[int]]:
    return [list(e) for e in g.edges]


def _split(w: DecompositionWitness) -> dict:
    return {
        "g_d": _edges(w.decomposition.g_d),
        "g_s": _edges(w.decomposition.g_s),
        "rank_d": w.rank_d,
        "rank_s": w.rank_s,
    }


def _analysis(command: str, path: str, args) -> AnalysisReport:
    kind, obj, digest = load_input(path)
    seed = _resolve_seed(args.seed)
    t0 = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if kind == "scenario":
            if args.dim is not None and args.dim != obj.d:
                raise InputError(f"{path}: --dim {args.dim} disagrees with scenario dimension {obj.d}")
            d = obj.d
            rep = is_solvable(obj, args.trials, seed, args.tol)
            n, rank, bound = obj.n_agents, rep.numeric_rank, rep.bound
            comb_rank, dec = rep.combinatorial_rank, rep.decomposition
            trial_seeds = list(rep.seeds)
            agents = list(obj.index())
            words = ("solvable", "unsolvable")
        else:
            d = 2 if args.dim is None else args.dim
            if d < 2:
                raise InputError("--dim must be at least 2")
            if obj.n < 1:
                raise InputError(f"{path}: graph has no vertices")
            num_seed, comb_seed = as_seed_sequence(seed).spawn(2)
            n, bound = obj.n, s_p(obj.n, d)
            rank, seeds = gnss_generic_rank(obj, d, args.trials, num_seed, tol=args.tol)
            dec = find_gnss_decomposition(obj, d, args.trials, comb_seed)
            comb_rank = dec.rank
            trial_seeds = list(seeds)
            agents = None
            words = ("rigid", "flexible")
    notes = [str(w.message) for w in caught]
    elapsed = time.perf_counter() - t0

    def word(ok):
        return words[0] if ok else words[1]

    num_ok = rank == bound
    combinatorial = None
    witness = best = deficit = None
    if dec is not None:
        comb_ok = isinstance(dec, DecompositionWitness)
        combinatorial = {"rank": comb_rank, "verdict": word(comb_ok)}
        if comb_ok:
            witness = _split(dec)
        else:
            best = _split(dec.best)
    if not num_ok:
        deficit = bound - rank
    agree = combinatorial is None or (combinatorial["rank"] == rank)
    return AnalysisReport(
        command=command,
        input_path=str(path),
        input_sha256=digest,
        kind=kind,
        dimension=d,
        n=n,
        rank=rank,
        bound=bound,
        flex_dofs=bound - rank,
        verdict=word(num_ok),
        numeric={"rank": rank, "verdict": word(num_ok)},
        combinatorial=combinatorial,
        agree=agree,
        witness=witness,
        deficit=deficit,
        best_split=best,
        agents=agents,
        seeds={"master": seed, "trials": trial_seeds},
        warnings=notes,
        timing_s=elapsed,
    )


def _fmt_edges(edges: list, agents: list | None) -> str:
    if not edges:
        return "(none)"
    if agents:
        return " ".join(f"{agents[u]}-{agents[v]}" for u, v in edges)
    return " ".join(f"{u}-{v}" for u, v in edges)


def _print_analysis(r: AnalysisReport) -> None:
    print(f"input: {r.input_path} ({r.kind}, sha256 {r.input_sha256[:16]})")
    print(f"{r.verdict}, rank {r.rank} / {r.bound}")
    comb = r.combinatorial
    comb_txt = f"rank {comb['rank']} ({comb['verdict']})" if comb else "skipped"
    print(
        f"numeric: rank {r.numeric['rank']} ({r.numeric['verdict']}); "
        f"combinatorial: {comb_txt}; {'agree' if r.agree else 'DISAGREE'}"
    )
    print(f"dimension {r.dimension}, {r.n} agents, flex dofs {r.flex_dofs}")
    for note in r.warnings:
        print(f"warning: {note}")
    print(f"seeds: master {r.seeds['master']}, trials {r.seeds['trials']}")
    print(f"time: {r.timing_s:.3f} s")


def _print_decomposition(r: AnalysisReport) -> None:
    print(f"input: {r.input_path} ({r.kind}, sha256 {r.input_sha256[:16]})")
    if r.witness is not None:
        w = r.witness
        print(f"{r.verdict}, rank {r.rank} / {r.bound}")
        print(f"G_D: {_fmt_edges(w['g_d'], r.agents)}")
        print(f"G_S: {_fmt_edges(w['g_s'], r.agents)}")
        print(f"rank_d={w['rank_d']}, rank_s={w['rank_s']}")
    else:
        achieved = r.combinatorial["rank"] if r.combinatorial else r.rank
        deficit = r.bound - achieved
        print(f"{r.verdict}, achieved rank {achieved} / {r.bound}, deficit {deficit}")
        if r.best_split is not None:
            b = r.best_split
            print(f"best split: rank_d={b['rank_d']}, rank_s={b['rank_s']}")
    print(f"seeds: master {r.seeds['master']}, trials {r.seeds['trials']}")


# --- commands -------------------------------------------------------------


def cmd_analyze(args) -> int:
    r = _analysis("analyze", args.path, args)
    if args.json:
        print(r.to_json())
    else:
        _print_analysis(r)
    if args.assert_rigid and r.rank != r.bound:
        return EXIT_ASSERT
    return EXIT_OK


def cmd_decompose(args) -> int:
    r = _analysis("decompose", args.path, args)
    if args.json:
        print(r.to_json())
    else:
        _print_decomposition(r)
    return EXIT_OK


def cmd_estimate(args) -> int:
    kind, s, digest = load_input(args.path)
    if kind != "scenario":
        raise InputError(f"{args.path}: estimate needs a scenario with ground truth, got a graph")
    if args.perturb < 0:
        raise InputError("--perturb must be non-negative")
    if args.max_iter < 1:
        raise InputError("--max-iter must be at least 1")
    seed = _resolve_seed(args.seed)
    noise_seed, init_seed = as_seed_sequence(seed).spawn(2)
    tol = 1e-10 if args.tol is None else args.tol
    t0 = time.perf_counter()
    y = simulate_measurements(s, noise_seed)
    res = estimate(s, y, init=args.perturb, max_iter=args.max_iter, tol=tol, seed=init_seed)
    elapsed = time.perf_counter() - t0
    errs = position_errors(s, res)
    report = EstimateReport(
        input_path=str(args.path),
        input_sha256=digest,
        converged=res.converged,
        iterations=res.iterations,
        residual_norm=res.residual_norm,
        position_errors={r.id: float(e) for r, e in zip(s.receivers, errs)},
        max_position_error=float(errs.max()) if errs.size else 0.0,
        jacobian_rank=res.jacobian_rank,
        n_unknowns=res.n_unknowns,
        perturb=args.perturb,
        scene_scale=scene_scale(s),
        diagnostic=res.diagnostic,
        seeds={"master": seed},
        timing_s=elapsed,
    )
    if args.json:
        print(report.to_json())
    else:
        status = "converged" if res.converged else "NOT converged"
        print(f"{status} after {res.iterations} iterations, residual {res.residual_norm:.3e}")
        for rid, e in report.position_errors.items():
            print(f"  {rid}: position error {e:.3e}")
        print(f"jacobian rank {res.jacobian_rank} / {res.n_unknowns} unknowns")
        if res.diagnostic:
            print(f"diagnostic: {res.diagnostic}")
        print(f"seed: {seed}")
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def cmd_generate(args) -> int:
    d = 3 if args.dim is None else args.dim
    seed = 0 if args.seed is None else args.seed
    try:
        if args.minimal:
            s = minimal_solvable_scenario(args.receivers, args.constellations, d, seed,
                                          use_distances=args.distances > 0)
        else:
            sats = d + 1 if args.satellites is None else args.satellites
            vis = sats if args.visibility is None else args.visibility
            s = generate_random_scenario(args.receivers, args.constellations, sats, d, vis,
                                         args.distances, seed, args.noise)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    text = json.dumps(scenario_to_dict(s), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        if args.json:
            print(json.dumps({"command": "generate", "out": args.out, "seed": seed,
                              "measurements": s.n_measurements}, sort_keys=True))
        else:
            print(f"wrote {args.out}: {len(s.receivers)} receivers, {len(s.constellations)} "
                  f"constellations, {s.n_measurements} measurements (seed {seed})")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_formation(args) -> int:
    dims = [2, 3] if args.dim is None else [args.dim]
    if any(d < 2 for d in dims):
        raise InputError("--dim must be at least 2")
    if args.constellations < 1:
        raise InputError("--constellations must be at least 1")
    tables = []
    for d in dims:
        ns = args.agents or [d + 1, 10, 20, 50, 100]
        bad = [n for n in ns if n < d + 1]
        if bad:
            raise InputError(f"formation in {d}D needs at least {d + 1} agents, got {bad}")
        rows = []
        for n in sorted(set(ns)):
            row = formation_savings(n, d)
            row["gnss_min"] = min_measurements(n, args.constellations, d)
            rows.append(row)
        tables.append({"d": d, "asymptote": asymptotic_savings(d), "rows": rows})
    note = "savings approach 25% (2D) / 33% (3D) for large formations"
    if args.json:
        print(json.dumps({"command": "formation", "constellations": args.constellations,
                          "tables": tables, "note": note}, indent=2, sort_keys=True))
        return EXIT_OK
    for t in tables:
        print(f"d = {t['d']} (limit {100 * t['asymptote']:.2f}%)")
        print(f"n | two-way | pseudorange | saved | GNSS min (C={args.constellations})")
        for r in t["rows"]:
            print(f"{r['n']} | {r['two_way']} | {r['pseudorange']} | "
                  f"{100 * r['ratio']:.2f}% | {r['gnss_min']}")
        print()
    print(note)
    return EXIT_OK


# --- argument parsing -----------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=None, help="master seed (random if omitted)")
    common.add_argument("--dim", type=int, default=None, help="ambient dimension")
    common.add_argument("--trials", type=int, default=5, help="random configurations per rank test")
    common.add_argument(
        "--tol", type=float, default=None,
        help="relative rank tolerance (analyze/decompose) or residual tolerance (estimate)",
    )

    p = argparse.ArgumentParser(prog="pseudorange-rigidity", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="rank and rigidity/solvability verdicts")
    a.add_argument("path")
    a.add_argument("--assert-rigid", action="store_true", help="exit 3 unless rigid/solvable")
    a.set_defaults(func=cmd_analyze)

    dcp = sub.add_parser("decompose", parents=[common], help="witness decomposition or deficit")
    dcp.add_argument("path")
    dcp.set_defaults(func=cmd_decompose)

    e = sub.add_parser("estimate", parents=[common], help="simulate and solve a scenario")
    e.add_argument("path")
    e.add_argument("--perturb", type=float, default=0.1, help="initial error as a fraction of scene scale")
    e.add_argument("--max-iter", type=int, default=50)
    e.set_defaults(func=cmd_estimate)

    g = sub.add_parser("generate", parents=[common], help="write a random scenario")
    g.add_argument("--receivers", type=int, default=2)
    g.add_argument("--constellations", type=int, default=1)
    g.add_argument("--satellites", type=int, default=None, help="per constellation (default dim+1)")
    g.add_argument("--visibility", type=int, default=None, help="satellites seen per receiver and constellation")
    g.add_argument("--distances", type=int, default=0, help="inter-receiver range measurements")
    g.add_argument("--noise", type=float, default=0.0, help="measurement noise sigma")
    g.add_argument("--minimal", action="store_true", help="solvable with the minimum measurement count")
    g.add_argument("--out", default=None, help="output path (stdout if omitted)")
    g.set_defaults(func=cmd_generate)

    f = sub.add_parser("formation", parents=[common], help="measurement savings table")
    f.add_argument("--agents", type=int, nargs="+", default=None)
    f.add_argument("--constellations", type=int, default=1, help="for the GNSS minimum column")
    f.set_defaults(func=cmd_formation)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    if getattr(args, "trials", 1) < 1:
        print("error: --trials must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
