"""Dense reference solver used to cross-check the sparse iteration.

Deliberately shares no code with :mod:`aitrust.ranking`: the transition matrix
is built from the raw edge list and iterated in extended precision until the
max-norm change drops below 1e-14.
"""

from __future__ import annotations

from typing import Literal, Mapping

import numpy as np

from .graph import TrustGraph
from .ranking import ScoreVector

MAX_DENSE_NODES = 1000


def _matrix(graph: TrustGraph) -> tuple[list[str], np.ndarray]:
    tokens = sorted({n.token for n in graph.nodes})
    pos = {t: i for i, t in enumerate(tokens)}
    n = len(tokens)
    adj = np.zeros((n, n), dtype=np.longdouble)
    for s, t in set(graph.edges):
        adj[pos[s], pos[t]] = 1
    outdeg = adj.sum(axis=1)
    for i in range(n):
        if outdeg[i] > 0:
            adj[i] /= outdeg[i]
    return tokens, adj.T.copy()


def solve_fixed_point_dense(
    graph: TrustGraph,
    teleport: Mapping[str, float],
    alpha: float,
    *,
    normalize: Literal["iteration", "final"] = "iteration",
    epsilon: float = 1e-14,
    max_iterations: int = 1_000_000,
) -> ScoreVector:
    """Fixed point of ``lam * x = teleport + alpha * W^T x`` with ``sum(x) == 1``.

    With ``normalize="final"`` the linear system ``(I - alpha W^T) y = teleport``
    is solved directly instead and ``y`` is scaled to sum to one.
    """
    tokens, wt = _matrix(graph)
    n = len(tokens)
    if n > MAX_DENSE_NODES:
        raise ValueError(f"dense solver limited to {MAX_DENSE_NODES} nodes, got {n}")
    tele = np.array([teleport[t] for t in tokens], dtype=np.longdouble)
    if np.any(tele < 0) or tele.sum() <= 0:
        raise ValueError("teleport must be non-negative and not all zero")

    if normalize == "final":
        y = np.linalg.solve(np.eye(n) - float(alpha) * wt.astype(float), tele.astype(float))
        y = np.clip(y, 0.0, None)
        return ScoreVector(dict(zip(tokens, (y / y.sum()).tolist())), iterations=1, converged=True)

    a = np.longdouble(alpha)
    x = tele / tele.sum()
    for it in range(1, max_iterations + 1):
        raw = tele + a * (wt @ x)
        new = raw / raw.sum()
        delta = np.max(np.abs(new - x))
        x = new
        if delta < epsilon:
            break
    else:
        return ScoreVector(dict(zip(tokens, x.astype(float).tolist())), iterations=it, converged=False)
    return ScoreVector(dict(zip(tokens, x.astype(float).tolist())), iterations=it, converged=True)
