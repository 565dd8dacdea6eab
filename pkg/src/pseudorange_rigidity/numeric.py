"""Dense linear algebra kernel: rank, least squares, seeded sampling."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_REL_TOL = 1e-9
INTEGER_RANGE = 2**20


class NumericInputError(ValueError):
    """Non-finite or mis-shaped numeric input."""


@dataclass(frozen=True)
class TolerancePolicy:
    rel_tol: float = DEFAULT_REL_TOL

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")


@dataclass(frozen=True)
class Configuration:
    """Agent positions (``n x d``) and clock biases (``n``), both in meters.

    Biases are clock offsets already multiplied by the signal celerity.
    """

    positions: np.ndarray
    biases: np.ndarray

    def __post_init__(self):
        x = np.array(self.positions, dtype=float)
        b = np.array(self.biases, dtype=float).reshape(-1)
        if x.ndim != 2:
            raise NumericInputError("positions must be an (n, d) array")
        if x.shape[0] != b.shape[0]:
            raise NumericInputError("positions and biases disagree on the agent count")
        if x.shape[0] < 1:
            raise NumericInputError("a configuration needs at least one agent")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(b))):
            raise NumericInputError("configuration entries must be finite")
        x.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "positions", x)
        object.__setattr__(self, "biases", b)

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def d(self) -> int:
        return self.positions.shape[1]

    def as_vector(self) -> np.ndarray:
        """Stacked ``(x_1, ..., x_n, beta_1, ..., beta_n)``."""
        return np.concatenate([self.positions.reshape(-1), self.biases])

    @classmethod
    def from_vector(cls, p: np.ndarray, n: int, d: int) -> "Configuration":
        p = np.asarray(p, dtype=float)
        return cls(p[: n * d].reshape(n, d), p[n * d : n * d + n])


def numeric_rank(m, tol: TolerancePolicy | float | None = None) -> int:
    """Count singular values above ``rel_tol * sigma_max * max(rows, cols)``."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise NumericInputError("rank needs a 2-D matrix")
    if not np.all(np.isfinite(a)):
        raise NumericInputError("matrix has non-finite entries")
    if a.size == 0:
        return 0
    rel = tol.rel_tol if isinstance(tol, TolerancePolicy) else (DEFAULT_REL_TOL if tol is None else tol)
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel * s[0] * max(a.shape)))


def least_squares_solve(m, y, tol: TolerancePolicy | float | None = None) -> np.ndarray:
    """Minimum-norm least-squares solution of ``m @ x ~= y`` (SVD based)."""
    a = np.asarray(m, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    if a.ndim != 2 or a.shape[0] != y.shape[0]:
        raise NumericInputError(f"dimension mismatch: matrix {a.shape}, rhs {y.shape}")
    if a.shape[1] == 0:
        return np.zeros(0)
    if a.shape[0] == 0:
        return np.zeros(a.shape[1])
    rel = tol.rel_tol if isinstance(tol, TolerancePolicy) else (DEFAULT_REL_TOL if tol is None else tol)
    x, *_ = np.linalg.lstsq(a, y, rcond=rel * max(a.shape))
    return x


def as_seed_sequence(seed) -> np.random.SeedSequence:
    """Accept ``None``, an int or an existing ``SeedSequence``."""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def sample_configuration(
    n: int,
    d: int,
    seed=None,
    mode: str = "real",
    range_: float = 1.0,
    int_range: int = INTEGER_RANGE,
) -> Configuration:
    """Random configuration; deterministic for a given seed.

    ``mode="real"`` draws positions uniformly from ``[-range_, range_]^d``;
    ``mode="integer"`` draws integer coordinates from ``[-int_range, int_range]``.
    Biases are uniform in ``[-range_, range_]`` in both modes. ``seed`` may be
    an int, a ``SeedSequence`` or a ``Generator``.
    """
    if n < 1 or d < 2:
        raise ValueError("need n >= 1 and d >= 2")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if mode == "real":
        x = rng.uniform(-range_, range_, size=(n, d))
    elif mode == "integer":
        x = rng.integers(-int_range, int_range, size=(n, d), endpoint=True).astype(float)
    else:
        raise ValueError(f"unknown sampling mode {mode!r}")
    b = rng.uniform(-range_, range_, size=n)
    return Configuration(x, b)
