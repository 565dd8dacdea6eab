"""Constraint evaluation, rigidity matrices and infinitesimal rigidity tests.

Matrices are scaled by the arc lengths, so the pseudorange rigidity matrix is
``[R_D | R_S]`` with ``R_D`` the usual distance rigidity matrix and
``R_S = diag(dist) B^T`` the scaled (transposed) incidence matrix.
"""
from __future__ import annotations

import io
import logging
import warnings
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

from .graphs import (
    DirectedPseudorangeGraph,
    GnssGraph,
    SimpleGraph,
    UndirectedMultigraph,
)
from .numeric import (
    Configuration,
    TolerancePolicy,
    as_seed_sequence,
    numeric_rank,
    sample_configuration,
)

__all__ = [
    "Configuration",
    "DegenerateConfigurationError",
    "NonGenericSampleWarning",
    "PseudorangeFramework",
    "RigidityReport",
    "pseudorange",
    "evaluate_constraints",
    "symmetric_pair_resolve",
    "distance_rigidity_matrix",
    "sync_matrix",
    "pseudorange_rigidity_matrix",
    "gnss_rigidity_matrix",
    "s_d",
    "s_p",
    "is_infinitesimally_rigid",
    "generic_rank_numeric",
    "generic_rank_trials",
    "gnss_generic_rank",
    "trivial_motions",
    "matrix_to_csv",
    "trial_seeds",
]

log = logging.getLogger(__name__)


class DegenerateConfigurationError(ValueError):
    """Two agents joined by a constraint share a position."""


class NonGenericSampleWarning(RuntimeWarning):
    """Random rank trials disagreed; some sample was not generic."""


@dataclass(frozen=True)
class PseudorangeFramework:
    graph: DirectedPseudorangeGraph
    config: Configuration

    def __post_init__(self):
        if self.graph.n != self.config.n:
            raise ValueError(
                f"graph has {self.graph.n} vertices but configuration has {self.config.n} agents"
            )


@dataclass(frozen=True)
class RigidityReport:
    rank: int
    bound: int
    rigid: bool
    flex_dofs: int
    seeds: tuple[int, ...] = field(default=())


def _distance(config: Configuration, u: int, v: int) -> float:
    dist = float(np.linalg.norm(config.positions[u] - config.positions[v]))
    if dist == 0.0:
        raise DegenerateConfigurationError(f"agents {u} and {v} are coincident")
    return dist


def pseudorange(config: Configuration, u: int, v: int) -> float:
    """Pseudorange from ``u`` to ``v``: ``|x_u - x_v| + beta_v - beta_u``."""
    return _distance(config, u, v) + config.biases[v] - config.biases[u]


def evaluate_constraints(fw: PseudorangeFramework) -> np.ndarray:
    return np.array([pseudorange(fw.config, u, v) for u, v in fw.graph.arcs], dtype=float)


def symmetric_pair_resolve(rho_uv: float, rho_vu: float) -> tuple[float, float]:
    """Recover ``(distance, beta_u - beta_v)`` from two opposite pseudoranges."""
    total = rho_uv + rho_vu
    if not total > 0:
        raise DegenerateConfigurationError(
            f"opposite pseudoranges {rho_uv}, {rho_vu} imply a non-positive distance"
        )
    return total / 2.0, (rho_vu - rho_uv) / 2.0


def _pairs(rows) -> list[tuple[int, int]]:
    if isinstance(rows, SimpleGraph):
        return list(rows.edges)
    if isinstance(rows, DirectedPseudorangeGraph):
        return list(rows.arcs)
    if isinstance(rows, UndirectedMultigraph):
        return rows.elements()
    return [(int(u), int(v)) for u, v in rows]


def distance_rigidity_matrix(rows, config: Configuration) -> np.ndarray:
    """``m x nd`` matrix; the row of pair ``uv`` holds ``x_u - x_v`` at ``u``
    and ``x_v - x_u`` at ``v``.

    ``rows`` may be a :class:`SimpleGraph`, a directed graph (one row per
    arc), a multigraph (double edges repeated) or a plain pair sequence.
    """
    pairs = _pairs(rows)
    n, d = config.n, config.d
    R = np.zeros((len(pairs), n * d))
    x = config.positions
    for k, (u, v) in enumerate(pairs):
        _distance(config, u, v)
        diff = x[u] - x[v]
        R[k, u * d : (u + 1) * d] = diff
        R[k, v * d : (v + 1) * d] = -diff
    return R


def sync_matrix(rows, config: Configuration) -> np.ndarray:
    """``m x n`` matrix; the row of pair ``u -> v`` has ``-dist`` at ``u`` and
    ``+dist`` at ``v``. Undirected edges are oriented smaller id first."""
    pairs = _pairs(rows)
    R = np.zeros((len(pairs), config.n))
    for k, (u, v) in enumerate(pairs):
        dist = _distance(config, u, v)
        R[k, u] = -dist
        R[k, v] = dist
    return R


def pseudorange_rigidity_matrix(fw: PseudorangeFramework) -> np.ndarray:
    """``[R_D | R_S]``, the Jacobian of the constraints row-scaled by arc lengths."""
    return np.hstack(
        [distance_rigidity_matrix(fw.graph, fw.config), sync_matrix(fw.graph, fw.config)]
    )


def gnss_rigidity_matrix(gg: GnssGraph, config: Configuration) -> np.ndarray:
    """Stack pseudorange rows ``[R_D|R_S]``, distance rows ``[R_D|0]`` and
    synchronization rows ``[0|R_S]``, in that order."""
    if gg.n != config.n:
        raise ValueError("GNSS graph and configuration disagree on the agent count")
    n, d = config.n, config.d
    top = pseudorange_rigidity_matrix(PseudorangeFramework(gg.gamma, config))
    mid = np.hstack([distance_rigidity_matrix(gg.g_d, config), np.zeros((gg.g_d.m, n))])
    bot = np.hstack([np.zeros((gg.g_s.m, n * d)), sync_matrix(gg.g_s, config)])
    return np.vstack([top, mid, bot])


def s_d(n: int, d: int) -> int:
    """Maximal generic rank of a distance rigidity matrix on ``n`` agents in ``R^d``."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    return n * d - comb(d + 1, 2) if n >= d + 1 else comb(n, 2)


def s_p(n: int, d: int) -> int:
    """Maximal rank of a pseudorange rigidity matrix: ``s_d(n, d) + n - 1``."""
    return s_d(n, d) + n - 1


def is_infinitesimally_rigid(
    fw: PseudorangeFramework, tol: TolerancePolicy | float | None = None
) -> RigidityReport:
    rank = numeric_rank(pseudorange_rigidity_matrix(fw), tol) if fw.graph.m else 0
    bound = s_p(fw.config.n, fw.config.d)
    return RigidityReport(rank, bound, rank == bound, bound - rank)


def trial_seeds(seed, trials: int) -> tuple[int, ...]:
    """Independent integer child seeds; ``seed=None`` draws fresh entropy."""
    ss = as_seed_sequence(seed)
    return tuple(int(c.generate_state(1, np.uint64)[0]) for c in ss.spawn(trials))


def _rank_trials(build, n, d, trials, seed, mode, tol):
    seeds = trial_seeds(seed, trials)
    ranks = []
    for s in seeds:
        config = sample_configuration(n, d, seed=s, mode=mode)
        ranks.append(numeric_rank(build(config), tol))
    if len(set(ranks)) > 1:
        msg = f"rank disagreement across random configurations: {ranks}; keeping the maximum"
        log.warning(msg)
        warnings.warn(msg, NonGenericSampleWarning, stacklevel=3)
    return ranks, seeds


def generic_rank_trials(
    graph: DirectedPseudorangeGraph,
    d: int,
    trials: int = 5,
    seed=None,
    mode: str = "real",
    tol: TolerancePolicy | float | None = None,
) -> tuple[list[int], tuple[int, ...]]:
    """Per-trial ranks of ``R_P`` over random configurations, with the seeds used."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if graph.m == 0:
        return [0] * trials, trial_seeds(seed, trials)
    return _rank_trials(
        lambda c: pseudorange_rigidity_matrix(PseudorangeFramework(graph, c)),
        graph.n, d, trials, seed, mode, tol,
    )


def generic_rank_numeric(
    graph: DirectedPseudorangeGraph,
    d: int,
    trials: int = 5,
    seed=None,
    mode: str = "real",
    tol: TolerancePolicy | float | None = None,
) -> int:
    """Generic rank of the pseudorange rigidity matrix, estimated as the
    maximum numeric rank over ``trials`` random configurations."""
    ranks, _ = generic_rank_trials(graph, d, trials, seed, mode, tol)
    return max(ranks)


def gnss_generic_rank(
    gg: GnssGraph,
    d: int,
    trials: int = 5,
    seed=None,
    mode: str = "real",
    tol: TolerancePolicy | float | None = None,
) -> tuple[int, tuple[int, ...]]:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if gg.gamma.m + gg.g_d.m + gg.g_s.m == 0:
        return 0, trial_seeds(seed, trials)
    ranks, seeds = _rank_trials(
        lambda c: gnss_rigidity_matrix(gg, c), gg.n, d, trials, seed, mode, tol
    )
    return max(ranks), seeds


def trivial_motions(config: Configuration) -> np.ndarray:
    """Columns spanning the trivial velocities: translations, infinitesimal
    rotations and the common bias shift, in ``(x, beta)`` coordinates."""
    n, d = config.n, config.d
    x = config.positions
    cols = []
    for i in range(d):
        q = np.zeros((n, d))
        q[:, i] = 1.0
        cols.append(np.concatenate([q.reshape(-1), np.zeros(n)]))
    for i in range(d):
        for j in range(i + 1, d):
            q = np.zeros((n, d))
            q[:, i] = -x[:, j]
            q[:, j] = x[:, i]
            cols.append(np.concatenate([q.reshape(-1), np.zeros(n)]))
    cols.append(np.concatenate([np.zeros(n * d), np.ones(n)]))
    return np.array(cols).T


def matrix_to_csv(m: np.ndarray, labels: Sequence[str] | None = None) -> str:
    """One CSV row per constraint, optionally prefixed with a label."""
    buf = io.StringIO()
    for k, row in enumerate(np.asarray(m)):
        cells = [repr(float(v) + 0.0) for v in row]  # no negative zeros
        if labels is not None:
            cells.insert(0, labels[k])
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()
