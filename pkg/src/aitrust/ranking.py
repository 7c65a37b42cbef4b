"""PageRank and TrustRank with per-iteration L1 normalization.

Both algorithms share one synchronous sweep::

    new(p) = teleport(p) + alpha * sum(current(q) / out_degree(q) for q in In(p))
    new    = new / sum(new)

PageRank uses a uniform teleport of ``(1 - alpha) / |P|`` and starts from the
uniform vector. TrustRank uses ``(1 - alpha)`` on trusted seeds (zero
elsewhere) and starts from the seed distribution. Dangling nodes are not
patched: the mass they absorb is restored only by the normalization.

Sums over in-neighbours are accumulated exactly (fixed point, 2**-62 units)
and totals with :func:`math.fsum`, so results do not depend on node order and
relabeling a graph permutes its scores bit for bit.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Literal

import numpy as np
from scipy import sparse

from .graph import NodeNotFoundError, TrustGraph

__all__ = [
    "RankParams",
    "ScoreVector",
    "ConvergenceWarning",
    "iterate_once",
    "pagerank",
    "trustrank",
    "check_convergence",
    "seed_indicator",
]

Normalize = Literal["iteration", "final"]

_FIXED_BITS = 62


class ConvergenceWarning(RuntimeWarning):
    """Emitted when an iteration stops at ``max_iterations`` without converging."""


@dataclass(frozen=True)
class RankParams:
    alpha: float = 0.85
    epsilon: float = 1e-8
    max_iterations: int = 1000

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ValueError(f"max_iterations must be a positive integer, got {self.max_iterations}")


@dataclass(frozen=True, eq=False)
class ScoreVector(Mapping):
    """Scores keyed by node token, plus how the iteration ended.

    ``deltas`` holds the max-norm change of every sweep, in order.
    """

    scores: dict[str, float]
    iterations: int = 0
    converged: bool = True
    deltas: tuple[float, ...] = field(default=(), repr=False)

    def __getitem__(self, key: str) -> float:
        return self.scores[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self.scores)

    def __len__(self) -> int:
        return len(self.scores)

    def __eq__(self, other):
        if isinstance(other, ScoreVector):
            return (
                self.scores == other.scores
                and self.iterations == other.iterations
                and self.converged == other.converged
            )
        return Mapping.__eq__(self, other)

    __hash__ = None

    def values_for(self, tokens: Iterable[str]) -> np.ndarray:
        return np.array([self.scores[t] for t in tokens], dtype=float)

    def support(self) -> set[str]:
        return {k for k, v in self.scores.items() if v > 0.0}


class _Transition:
    """Sparse in-neighbour structure of a graph, built once per analysis."""

    def __init__(self, graph: TrustGraph):
        index = graph.index
        n = len(graph.tokens)
        try:
            src = np.fromiter((index[s] for s, _ in graph.edges), dtype=np.int64, count=len(graph.edges))
            dst = np.fromiter((index[t] for _, t in graph.edges), dtype=np.int64, count=len(graph.edges))
        except KeyError as exc:
            raise NodeNotFoundError(exc.args[0]) from None
        self.size = n
        self.out_degree = np.bincount(src, minlength=n).astype(float)
        self._has_out = self.out_degree > 0
        ones = np.ones(len(src), dtype=np.int64)
        self._incoming = sparse.csr_matrix((ones, (dst, src)), shape=(n, n), dtype=np.int64)

    def propagate(self, x: np.ndarray) -> np.ndarray:
        """Per node, the sum of ``x[q] / out_degree[q]`` over in-neighbours ``q``.

        Shares are rounded up onto a 2**-62 grid and summed as integers, which
        is exact and order independent; rounding up keeps every positive
        share positive, so supports are never lost to underflow.
        """
        share = np.divide(x, self.out_degree, out=np.zeros_like(x), where=self._has_out)
        units = np.ceil(np.ldexp(share, _FIXED_BITS)).astype(np.int64)
        return np.ldexp((self._incoming @ units).astype(float), -_FIXED_BITS)


def _normalized(raw: np.ndarray) -> np.ndarray:
    total = math.fsum(raw.tolist())
    if not total > 0.0:
        raise FloatingPointError("score vector vanished before normalization")
    return raw / total


def _sweep(op: _Transition, current: np.ndarray, teleport: np.ndarray, alpha: float) -> np.ndarray:
    return _normalized(teleport + alpha * op.propagate(current))


def _max_delta(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b))) if len(a) else 0.0


def _run(
    graph: TrustGraph,
    start: np.ndarray,
    teleport: np.ndarray,
    params: RankParams,
    normalize: Normalize,
    what: str,
) -> ScoreVector:
    op = _Transition(graph)
    alpha = params.alpha
    x = start
    # "final" iterates the unnormalized linear recursion; the teleport is
    # rescaled to total (1 - alpha) so every share stays <= 1.
    if normalize == "final":
        teleport = teleport / math.fsum(teleport.tolist()) * (1.0 - alpha)
        y = start
    elif normalize != "iteration":
        raise ValueError(f"normalize must be 'iteration' or 'final', got {normalize!r}")

    deltas: list[float] = []
    converged = False
    for _ in range(params.max_iterations):
        if normalize == "iteration":
            new = _sweep(op, x, teleport, alpha)
        else:
            y = teleport + alpha * op.propagate(y)
            new = _normalized(y)
        delta = _max_delta(new, x)
        deltas.append(delta)
        x = new
        if delta < params.epsilon:
            converged = True
            break
    if not converged:
        warnings.warn(
            f"{what} did not converge within {params.max_iterations} iterations "
            f"(last delta {deltas[-1]:.3g}, epsilon {params.epsilon:g})",
            ConvergenceWarning,
            stacklevel=3,
        )
    return ScoreVector(
        dict(zip(graph.tokens, x.tolist())),
        iterations=len(deltas),
        converged=converged,
        deltas=tuple(deltas),
    )


def pagerank(graph: TrustGraph, params: RankParams | None = None) -> ScoreVector:
    """PageRank from the uniform start with uniform teleport ``(1-alpha)/|P|``."""
    params = params or RankParams()
    n = len(graph.tokens)
    if n == 0:
        raise ValueError("PageRank needs at least one node")
    start = np.full(n, 1.0 / n)
    teleport = np.full(n, (1.0 - params.alpha) / n)
    return _run(graph, start, teleport, params, "iteration", "PageRank")


def seed_indicator(graph: TrustGraph, seeds: Iterable[str]) -> np.ndarray:
    """0/1 vector over ``graph.tokens`` marking trusted seeds."""
    seeds = set(seeds)
    if not seeds:
        raise ValueError("TrustRank requires at least one trusted seed")
    ind = np.zeros(len(graph.tokens))
    for s in seeds:
        if s not in graph:
            raise NodeNotFoundError(s)
        ind[graph.index[s]] = 1.0
    return ind


def trustrank(
    graph: TrustGraph,
    seeds: Iterable[str],
    params: RankParams | None = None,
    *,
    normalize: Normalize = "iteration",
) -> ScoreVector:
    """TrustRank propagated from ``seeds``.

    With ``normalize="iteration"`` (default) the teleport is ``(1-alpha)`` on
    each seed and the vector is renormalized after every sweep. With
    ``normalize="final"`` the plain linear recursion
    ``t = (1-alpha) d + alpha W^T t`` (``d`` the seed distribution) is iterated
    and normalized once for reporting; its fixed point differs whenever
    reachable nodes are dangling.
    """
    params = params or RankParams()
    indicator = seed_indicator(graph, seeds)
    start = indicator / indicator.sum()
    teleport = (1.0 - params.alpha) * indicator
    return _run(graph, start, teleport, params, normalize, "TrustRank")


def _aligned(graph: TrustGraph, values: Mapping[str, float], what: str) -> np.ndarray:
    if set(values) != set(graph.tokens):
        raise ValueError(f"{what} must be keyed by exactly the graph's nodes")
    return np.array([float(values[t]) for t in graph.tokens])


def iterate_once(
    graph: TrustGraph,
    current: Mapping[str, float],
    teleport: Mapping[str, float],
    alpha: float,
) -> ScoreVector:
    """One synchronous sweep followed by L1 normalization."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    x = _aligned(graph, current, "current scores")
    tele = _aligned(graph, teleport, "teleport")
    if np.any(tele < 0) or not np.any(tele > 0):
        raise ValueError("teleport must be non-negative and not all zero")
    if np.any(x < 0):
        raise ValueError("current scores must be non-negative")
    new = _sweep(_Transition(graph), x, tele, alpha)
    return ScoreVector(dict(zip(graph.tokens, new.tolist())), iterations=1, converged=False)


def check_convergence(previous: Mapping[str, float], next: Mapping[str, float], epsilon: float) -> bool:
    """True iff every node moved by strictly less than ``epsilon``."""
    if set(previous) != set(next):
        raise ValueError("score vectors cover different nodes")
    return all(abs(next[k] - previous[k]) < epsilon for k in previous)
