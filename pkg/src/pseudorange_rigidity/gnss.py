"""Cooperative GNSS scenarios: graph construction, solvability, simulation,
Newton estimation and formation-savings counts.

Agents are indexed satellites first (constellation by constellation, in
file order) and receivers after them.
"""
from __future__ import annotations

import json
import logging
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .combinatorics import DecompositionWitness, FlexibleCertificate, find_gnss_decomposition
from .graphs import DirectedPseudorangeGraph, GnssGraph, SimpleGraph
from .numeric import Configuration, as_seed_sequence, least_squares_solve, numeric_rank
from .rigidity import gnss_generic_rank, s_d, s_p

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
_CONSTELLATION_NAMES = "GERCJI"


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario."""


class InfeasibleCountsError(ValueError):
    """Requested more arcs or edges than pairs available."""


@dataclass(frozen=True)
class Satellite:
    id: str
    constellation: str
    position: np.ndarray
    bias: float


@dataclass(frozen=True)
class Constellation:
    id: str
    bias: float
    satellites: tuple[Satellite, ...]


@dataclass(frozen=True)
class Receiver:
    id: str
    position: np.ndarray
    bias: float


@dataclass(frozen=True)
class Scenario:
    """Satellites grouped by constellation, receivers and the measurement lists.

    ``pseudoranges`` holds ``(satellite_id, receiver_id)`` pairs and
    ``distances`` holds ``(receiver_id, receiver_id)`` pairs; their order is
    the measurement order.
    """

    d: int
    constellations: tuple[Constellation, ...]
    receivers: tuple[Receiver, ...]
    pseudoranges: tuple[tuple[str, str], ...] = ()
    distances: tuple[tuple[str, str], ...] = ()
    noise_sigma: float = 0.0

    def __post_init__(self):
        if self.d < 2:
            raise ScenarioError("dimension must be >= 2")
        ids = [s.id for s in self.satellites] + [r.id for r in self.receivers]
        dup = {i for i in ids if ids.count(i) > 1}
        if dup:
            raise ScenarioError(f"duplicate agent ids: {sorted(dup)}")
        if len({c.id for c in self.constellations}) != len(self.constellations):
            raise ScenarioError("duplicate constellation ids")
        for c in self.constellations:
            for s in c.satellites:
                if s.constellation != c.id or s.bias != c.bias:
                    raise ScenarioError(f"satellite {s.id} disagrees with constellation {c.id}")
        for a in list(self.satellites) + list(self.receivers):
            if np.shape(a.position) != (self.d,) or not np.all(np.isfinite(a.position)):
                raise ScenarioError(f"agent {a.id}: position must be {self.d} finite numbers")
        sats = {s.id for s in self.satellites}
        rcvs = {r.id for r in self.receivers}
        seen = set()
        for k, (a, b) in enumerate(self.pseudoranges):
            if a not in sats:
                raise ScenarioError(f"pseudoranges[{k}]: {a!r} is not a satellite id")
            if b not in rcvs:
                raise ScenarioError(f"pseudoranges[{k}]: {b!r} is not a receiver id")
            if (a, b) in seen:
                raise ScenarioError(f"pseudoranges[{k}]: duplicate measurement {a}->{b}")
            seen.add((a, b))
        seen = set()
        for k, (a, b) in enumerate(self.distances):
            if a not in rcvs or b not in rcvs:
                raise ScenarioError(f"distances[{k}]: both ends must be receiver ids")
            if a == b or frozenset((a, b)) in seen:
                raise ScenarioError(f"distances[{k}]: invalid or duplicate pair {a}-{b}")
            seen.add(frozenset((a, b)))
        if self.noise_sigma < 0:
            raise ScenarioError("noise_sigma must be non-negative")

    @property
    def satellites(self) -> list[Satellite]:
        return [s for c in self.constellations for s in c.satellites]

    @property
    def n_agents(self) -> int:
        return len(self.satellites) + len(self.receivers)

    def index(self) -> dict[str, int]:
        ids = [s.id for s in self.satellites] + [r.id for r in self.receivers]
        return {a: k for k, a in enumerate(ids)}

    def config(self) -> Configuration:
        """Ground-truth configuration of all agents."""
        agents = list(self.satellites) + list(self.receivers)
        return Configuration(
            np.array([a.position for a in agents], dtype=float).reshape(len(agents), self.d),
            np.array([a.bias for a in agents], dtype=float),
        )

    @property
    def n_measurements(self) -> int:
        return len(self.pseudoranges) + len(self.distances)


# --- graph and solvability ------------------------------------------------


def build_gnss_graph(s: Scenario) -> GnssGraph:
    """Pseudorange arcs satellite -> receiver; distance edges between
    receivers plus the complete graph on the satellites; one spanning path
    of synchronization edges per constellation."""
    idx = s.index()
    n = s.n_agents
    arcs = tuple((idx[a], idx[b]) for a, b in s.pseudoranges)
    sat_ids = [idx[x.id] for x in s.satellites]
    dist = [(idx[a], idx[b]) for a, b in s.distances]
    dist += [(u, v) for i, u in enumerate(sat_ids) for v in sat_ids[i + 1 :]]
    sync = []
    for c in s.constellations:
        ids = [idx[x.id] for x in c.satellites]
        sync += list(zip(ids, ids[1:]))
    return GnssGraph(DirectedPseudorangeGraph(n, arcs), SimpleGraph(n, tuple(dist)), SimpleGraph(n, tuple(sync)))


def min_measurements(R: int, C: int, d: int) -> int:
    """Fewest pseudorange or distance measurements that can locate ``R``
    receivers against ``C`` constellations."""
    if R < 1 or C < 1:
        raise ValueError("need R >= 1 and C >= 1")
    return R * (d + 1) + C - 1


@dataclass(frozen=True)
class SolvabilityReport:
    solvable: bool
    bound: int
    numeric_rank: int
    numeric_solvable: bool
    combinatorial_rank: int | None
    combinatorial_solvable: bool | None
    decomposition: DecompositionWitness | FlexibleCertificate | None
    seeds: tuple[int, ...]
    warnings: tuple[str, ...] = ()

    @property
    def agree(self) -> bool:
        return self.combinatorial_solvable is None or self.combinatorial_solvable == self.numeric_solvable

    @property
    def deficit(self) -> int:
        return self.bound - self.numeric_rank


def is_solvable(s: Scenario, trials: int = 5, seed=None, tol=None) -> SolvabilityReport:
    """Rigidity of the GNSS graph, decided numerically and by matroid union.

    ``tol`` is the relative rank tolerance of the numeric path.
    """
    gg = build_gnss_graph(s)
    n, d = gg.n, s.d
    bound = s_p(n, d)
    ss = as_seed_sequence(seed)
    num_seed, comb_seed = ss.spawn(2)
    rank, seeds = gnss_generic_rank(gg, d, trials, num_seed, tol=tol)
    notes = []
    comb_rank = comb_ok = dec = None
    if len(s.satellites) < d:
        msg = f"only {len(s.satellites)} satellites for d={d}; combinatorial test skipped"
        notes.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    else:
        dec = find_gnss_decomposition(gg, d, trials, comb_seed)
        comb_rank = dec.rank
        comb_ok = isinstance(dec, DecompositionWitness)
        if comb_ok != (rank == bound):
            msg = f"numeric rank {rank} and combinatorial rank {comb_rank} disagree"
            notes.append(msg)
            log.warning(msg)
    return SolvabilityReport(
        solvable=rank == bound,
        bound=bound,
        numeric_rank=rank,
        numeric_solvable=rank == bound,
        combinatorial_rank=comb_rank,
        combinatorial_solvable=comb_ok,
        decomposition=dec,
        seeds=tuple(seeds),
        warnings=tuple(notes),
    )


# --- measurements and estimation -----------------------------------------


def simulate_measurements(s: Scenario, seed=None, sigma: float | None = None) -> np.ndarray:
    """Pseudoranges (in ``s.pseudoranges`` order) followed by receiver
    distances, each with optional Gaussian noise."""
    idx = s.index()
    c = s.config()
    x, b = c.positions, c.biases
    out = []
    for a, r in s.pseudoranges:
        u, v = idx[a], idx[r]
        dist = np.linalg.norm(x[u] - x[v])
        if dist == 0:
            raise ScenarioError(f"satellite {a} and receiver {r} coincide")
        out.append(dist + b[v] - b[u])
    for a, r in s.distances:
        dist = np.linalg.norm(x[idx[a]] - x[idx[r]])
        if dist == 0:
            raise ScenarioError(f"receivers {a} and {r} coincide")
        out.append(dist)
    y = np.array(out, dtype=float)
    sigma = s.noise_sigma if sigma is None else sigma
    if sigma > 0:
        y = y + np.random.default_rng(seed).normal(0.0, sigma, size=y.shape)
    return y


@dataclass(frozen=True)
class ParameterPartition:
    """Known parameters (satellite positions, reference bias) and unknowns.

    Unknowns are laid out as receiver positions, receiver biases relative to
    the first constellation, then one bias offset per further constellation.
    """

    known: np.ndarray
    unknown: np.ndarray
    known_labels: tuple[str, ...]
    unknown_labels: tuple[str, ...]


def partition_parameters(s: Scenario) -> ParameterPartition:
    if not s.constellations:
        raise ScenarioError("at least one constellation is required")
    ref = s.constellations[0].bias
    known, kl = [], []
    for sat in s.satellites:
        known.extend(sat.position)
        kl.extend(f"{sat.id}.x{i}" for i in range(s.d))
    known.append(0.0)
    kl.append(f"{s.constellations[0].id}.bias")
    unknown, ul = [], []
    for r in s.receivers:
        unknown.extend(r.position)
        ul.extend(f"{r.id}.x{i}" for i in range(s.d))
    for r in s.receivers:
        unknown.append(r.bias - ref)
        ul.append(f"{r.id}.bias")
    for c in s.constellations[1:]:
        unknown.append(c.bias - ref)
        ul.append(f"{c.id}.bias")
    return ParameterPartition(np.array(known, float), np.array(unknown, float), tuple(kl), tuple(ul))


class _Model:
    """Measurement function and Jacobian in the unknown parameters."""

    def __init__(self, s: Scenario):
        self.d, self.R = s.d, len(s.receivers)
        rix = {r.id: k for k, r in enumerate(s.receivers)}
        cix = {c.id: k for k, c in enumerate(s.constellations)}
        sats = {x.id: x for x in s.satellites}
        self.C = len(s.constellations)
        self.pr = [(np.asarray(sats[a].position, float), cix[sats[a].constellation], rix[r])
                   for a, r in s.pseudoranges]
        self.dist = [(rix[a], rix[b]) for a, b in s.distances]
        self.n_unknown = self.R * self.d + self.R + self.C - 1

    def split(self, p):
        R, d = self.R, self.d
        x = p[: R * d].reshape(R, d)
        b = p[R * d : R * d + R]
        off = np.concatenate([[0.0], p[R * d + R :]])
        return x, b, off

    def f(self, p):
        x, b, off = self.split(p)
        out = [np.linalg.norm(sp - x[r]) + b[r] - off[k] for sp, k, r in self.pr]
        out += [np.linalg.norm(x[i] - x[j]) for i, j in self.dist]
        return np.array(out, dtype=float)

    def jac(self, p):
        R, d = self.R, self.d
        x, _, _ = self.split(p)
        J = np.zeros((len(self.pr) + len(self.dist), self.n_unknown))
        for row, (sp, k, r) in enumerate(self.pr):
            diff = x[r] - sp
            J[row, r * d : (r + 1) * d] = diff / np.linalg.norm(diff)
            J[row, R * d + r] = 1.0
            if k > 0:
                J[row, R * d + R + k - 1] = -1.0
        base = len(self.pr)
        for row, (i, j) in enumerate(self.dist, start=base):
            diff = x[i] - x[j]
            unit = diff / np.linalg.norm(diff)
            J[row, i * d : (i + 1) * d] = unit
            J[row, j * d : (j + 1) * d] = -unit
        return J


def measurement_function(s: Scenario, p_u: np.ndarray) -> np.ndarray:
    """Predicted measurements for unknowns ``p_u`` (satellites pinned)."""
    return _Model(s).f(np.asarray(p_u, float))


def measurement_jacobian(s: Scenario, p_u: np.ndarray) -> np.ndarray:
    return _Model(s).jac(np.asarray(p_u, float))


def scene_scale(s: Scenario) -> float:
    """Extent of the receiver network: the largest receiver-receiver
    distance, or for a lone receiver its distance to the nearest satellite.

    Spurious roots of a minimally rigid problem sit roughly one receiver
    baseline away from the truth, so initial perturbations are sized on this
    length rather than on the satellite shell.
    """
    rx = np.array([r.position for r in s.receivers], float).reshape(len(s.receivers), s.d)
    if len(rx) >= 2:
        diff = rx[:, None, :] - rx[None, :, :]
        return float(np.sqrt((diff**2).sum(-1)).max())
    sats = np.array([x.position for x in s.satellites], float).reshape(-1, s.d)
    if len(rx) == 1 and len(sats):
        return float(np.linalg.norm(sats - rx[0], axis=1).min())
    return 1.0


@dataclass(frozen=True)
class EstimationResult:
    positions: np.ndarray  # R x d
    biases: np.ndarray  # R, relative to the first constellation
    constellation_offsets: np.ndarray  # C, first entry 0
    iterations: int
    residual_norm: float
    converged: bool
    jacobian_rank: int
    n_unknowns: int
    diagnostic: str = ""
    history: tuple[float, ...] = field(default=())

    @property
    def rank_deficient(self) -> bool:
        return self.jacobian_rank < self.n_unknowns


def estimate(
    s: Scenario,
    y_m: np.ndarray,
    init: float | np.ndarray = 0.1,
    max_iter: int = 50,
    tol: float = 1e-10,
    seed=None,
) -> EstimationResult:
    """Newton (Gauss-Newton with pseudo-inverse) iterations on the unknowns.

    ``init`` is either an explicit unknown vector or a perturbation size: a
    fraction of :func:`scene_scale` used as the standard deviation of a
    Gaussian offset added to the true unknowns. A rank-deficient Jacobian
    yields minimum-norm steps and a non-converged result. When there are
    exactly as many measurements as unknowns a converged result carries a
    diagnostic, since such systems can have several isolated roots.
    """
    model = _Model(s)
    y_m = np.asarray(y_m, float)
    if y_m.shape != (len(model.pr) + len(model.dist),):
        raise ValueError(f"expected {len(model.pr) + len(model.dist)} measurements, got {y_m.shape}")
    truth = partition_parameters(s).unknown
    if np.ndim(init) == 0:
        rng = np.random.default_rng(seed)
        p = truth + float(init) * scene_scale(s) * rng.standard_normal(truth.shape)
    else:
        p = np.array(init, dtype=float)
        if p.shape != truth.shape:
            raise ValueError(f"initial guess must have {truth.size} entries")

    nu = model.n_unknown
    min_rank = nu
    history = []
    residual = math.inf
    diagnostic = ""
    it = 0
    with np.errstate(all="ignore"):
        for it in range(1, max_iter + 1):
            J = model.jac(p)
            r = model.f(p) - y_m
            if not (np.all(np.isfinite(J)) and np.all(np.isfinite(r))):
                diagnostic = f"non-finite Jacobian or residual at iteration {it}"
                break
            rank = numeric_rank(J) if J.size else 0
            min_rank = min(min_rank, rank)
            p = p - least_squares_solve(J, r)
            r = model.f(p) - y_m
            residual = float(np.linalg.norm(r))
            history.append(residual)
            if not np.isfinite(residual):
                diagnostic = f"diverged at iteration {it}"
                break
            if residual < tol:
                break
    if min_rank < nu:
        diagnostic = (diagnostic + "; " if diagnostic else "") + (
            f"rank-deficient Jacobian: column rank {min_rank} < {nu} unknowns; "
            "solution not unique"
        )
    converged = residual < tol and min_rank == nu
    if converged and len(y_m) == nu:
        diagnostic = (
            "exactly determined system: the root is locally unique but other "
            "discrete roots may exist"
        )
    if not converged and not diagnostic:
        diagnostic = f"residual {residual:.3e} above tolerance after {it} iterations"
    x, b, off = model.split(p)
    return EstimationResult(
        positions=x.copy(),
        biases=b.copy(),
        constellation_offsets=off,
        iterations=it,
        residual_norm=residual,
        converged=converged,
        jacobian_rank=min_rank,
        n_unknowns=nu,
        diagnostic=diagnostic,
        history=tuple(history),
    )


def position_errors(s: Scenario, result: EstimationResult) -> np.ndarray:
    truth = np.array([r.position for r in s.receivers], float).reshape(len(s.receivers), s.d)
    return np.linalg.norm(result.positions - truth, axis=1)


# --- scenario generation --------------------------------------------------


def _constellation_id(k: int) -> str:
    return _CONSTELLATION_NAMES[k] if k < len(_CONSTELLATION_NAMES) else f"K{k}"


def _shell(rng, d, radius=10.0):
    v = rng.standard_normal(d)
    return radius * v / np.linalg.norm(v)


def generate_random_scenario(
    R: int,
    C: int,
    sats_per_constellation: int,
    d: int = 3,
    visibility: int | Sequence[Sequence[int]] = 0,
    inter_receiver_edges: int = 0,
    seed=None,
    noise_sigma: float = 0.0,
) -> Scenario:
    """Random scenario: satellites on a radius-10 shell, receivers in the
    unit box, biases uniform in ``[-1, 1]``.

    ``visibility`` is the number of satellites each receiver observes in each
    constellation, either one int or an ``R x C`` table.
    """
    if min(R, C, sats_per_constellation, inter_receiver_edges) < 0 or d < 2:
        raise InfeasibleCountsError("counts must be non-negative and d >= 2")
    if np.ndim(visibility) == 0:
        vis = np.full((R, C), int(visibility))
    else:
        vis = np.asarray(visibility, dtype=int)
        if vis.shape != (R, C):
            raise InfeasibleCountsError(f"visibility table must be {R} x {C}")
    if vis.size and (vis.max() > sats_per_constellation or vis.min() < 0):
        raise InfeasibleCountsError("visibility exceeds satellites per constellation")
    if inter_receiver_edges > R * (R - 1) // 2:
        raise InfeasibleCountsError("more inter-receiver edges than receiver pairs")

    rng = np.random.default_rng(seed)
    cons = []
    for k in range(C):
        cid = _constellation_id(k)
        bias = float(rng.uniform(-1, 1))
        sats = tuple(
            Satellite(f"{cid}{j + 1}", cid, _shell(rng, d), bias)
            for j in range(sats_per_constellation)
        )
        cons.append(Constellation(cid, bias, sats))
    receivers = tuple(
        Receiver(f"r{i + 1}", rng.uniform(0.0, 1.0, size=d), float(rng.uniform(-1, 1)))
        for i in range(R)
    )
    arcs = []
    for i in range(R):
        for k in range(C):
            chosen = sorted(rng.choice(sats_per_constellation, size=vis[i, k], replace=False))
            arcs += [(cons[k].satellites[j].id, receivers[i].id) for j in chosen]
    pairs = [(i, j) for i in range(R) for j in range(i + 1, R)]
    picked = sorted(rng.choice(len(pairs), size=inter_receiver_edges, replace=False)) if pairs else []
    dists = tuple((receivers[pairs[k][0]].id, receivers[pairs[k][1]].id) for k in picked)
    return Scenario(d, tuple(cons), receivers, tuple(arcs), dists, noise_sigma)


def minimal_solvable_scenario(R: int, C: int, d: int = 3, seed=None, use_distances: bool = False) -> Scenario:
    """Solvable scenario with exactly ``min_measurements(R, C, d)`` measurements.

    Every constellation has ``d + 1`` satellites. The first receiver sees one
    satellite of each constellation plus ``d`` more of the first one; every
    other receiver sees ``d + 1`` satellites of the first constellation, or,
    with ``use_distances``, ``d`` satellites and ranges to the previous
    receiver.
    """
    base = generate_random_scenario(R, C, d + 1, d, 0, 0, seed)
    cons = base.constellations
    rids = [r.id for r in base.receivers]
    arcs = [(cons[k].satellites[0].id, rids[0]) for k in range(C)]
    arcs += [(cons[0].satellites[j].id, rids[0]) for j in range(1, d + 1)]
    dists = []
    for i in range(1, R):
        if use_distances:
            arcs += [(cons[0].satellites[j].id, rids[i]) for j in range(d)]
            dists.append((rids[i - 1], rids[i]))
        else:
            arcs += [(cons[0].satellites[j].id, rids[i]) for j in range(d + 1)]
    return Scenario(d, cons, base.receivers, tuple(arcs), tuple(dists))


# --- formation control ----------------------------------------------------


def formation_savings(n: int, d: int) -> dict:
    """Two-way ranging count ``2 s_d`` against the pseudorange count ``s_p``."""
    if n < d + 1:
        raise ValueError("formation savings need n >= d + 1")
    two_way = 2 * s_d(n, d)
    pr = s_p(n, d)
    saved = two_way - pr
    return {"n": n, "d": d, "two_way": two_way, "pseudorange": pr, "saved": saved, "ratio": saved / two_way}


def asymptotic_savings(d: int) -> float:
    """Limit of the savings ratio for large formations: ``(d - 1) / (2 d)``."""
    return (d - 1) / (2 * d)


def formation_graph(n: int, d: int = 2) -> DirectedPseudorangeGraph:
    """Rigid directed formation: mutual arcs among the first ``d + 1``
    agents, then ``d + 1`` arcs into each later agent from its predecessors."""
    if n < d + 1:
        raise ValueError("need n >= d + 1")
    arcs = [(u, v) for u in range(d + 1) for v in range(d + 1) if u != v]
    for v in range(d + 1, n):
        arcs += [(u, v) for u in range(v - d - 1, v)]
    return DirectedPseudorangeGraph(n, tuple(arcs))


# --- scenario JSON --------------------------------------------------------


def _vector(val, d, where):
    if not (isinstance(val, list) and len(val) == d and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in val)):
        raise ScenarioError(f"{where}: expected a list of {d} numbers")
    return np.array(val, dtype=float)


def _number(val, where):
    if not isinstance(val, (int, float)) or isinstance(val, bool):
        raise ScenarioError(f"{where}: expected a number")
    return float(val)


def _pairs(doc, key):
    raw = doc.get(key, [])
    if not isinstance(raw, list):
        raise ScenarioError(f"{key}: expected a list of id pairs")
    out = []
    for k, p in enumerate(raw):
        if not (isinstance(p, list) and len(p) == 2 and all(isinstance(x, str) for x in p)):
            raise ScenarioError(f"{key}[{k}]: expected a pair of string ids")
        out.append((p[0], p[1]))
    return tuple(out)


def scenario_from_dict(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a JSON object")
    if doc.get("schema") != SCHEMA_VERSION:
        raise ScenarioError(f"schema: expected {SCHEMA_VERSION}, got {doc.get('schema')!r}")
    d = doc.get("dimension")
    if not isinstance(d, int) or d < 2:
        raise ScenarioError("dimension: expected an integer >= 2")
    cons = []
    raw_cons = doc.get("constellations")
    if not isinstance(raw_cons, list):
        raise ScenarioError("constellations: expected a list")
    for i, c in enumerate(raw_cons):
        where = f"constellations[{i}]"
        if not isinstance(c, dict) or not isinstance(c.get("id"), str):
            raise ScenarioError(f"{where}.id: expected a string")
        bias = _number(c.get("bias", 0.0), f"{where}.bias")
        sats = []
        if not isinstance(c.get("satellites"), list):
            raise ScenarioError(f"{where}.satellites: expected a list")
        for j, sdoc in enumerate(c["satellites"]):
            sw = f"{where}.satellites[{j}]"
            if not isinstance(sdoc, dict) or not isinstance(sdoc.get("id"), str):
                raise ScenarioError(f"{sw}.id: expected a string")
            sats.append(Satellite(sdoc["id"], c["id"], _vector(sdoc.get("position"), d, f"{sw}.position"), bias))
        cons.append(Constellation(c["id"], bias, tuple(sats)))
    rcvs = []
    if not isinstance(doc.get("receivers"), list):
        raise ScenarioError("receivers: expected a list")
    for i, r in enumerate(doc["receivers"]):
        where = f"receivers[{i}]"
        if not isinstance(r, dict) or not isinstance(r.get("id"), str):
            raise ScenarioError(f"{where}.id: expected a string")
        rcvs.append(Receiver(r["id"], _vector(r.get("position"), d, f"{where}.position"),
                             _number(r.get("bias", 0.0), f"{where}.bias")))
    return Scenario(
        d, tuple(cons), tuple(rcvs), _pairs(doc, "pseudoranges"), _pairs(doc, "distances"),
        _number(doc.get("noise_sigma", 0.0), "noise_sigma"),
    )


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "dimension": s.d,
        "constellations": [
            {"id": c.id, "bias": float(c.bias),
             "satellites": [{"id": x.id, "position": [float(v) for v in x.position]} for x in c.satellites]}
            for c in s.constellations
        ],
        "receivers": [
            {"id": r.id, "position": [float(v) for v in r.position], "bias": float(r.bias)}
            for r in s.receivers
        ],
        "pseudoranges": [list(p) for p in s.pseudoranges],
        "distances": [list(p) for p in s.distances],
        "noise_sigma": float(s.noise_sigma),
    }


def load_scenario(path: str | Path) -> Scenario:
    with open(path) as fh:
        return scenario_from_dict(json.load(fh))


def dump_scenario(s: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(s), indent=2) + "\n")
