"""Directed social networks with mandatory self-loops.

An edge ``(j, i)`` means agent ``i`` observes agent ``j``.  ``adjacency``
follows the convention ``A[i, j] = 1`` iff ``(j, i)`` is an edge between
*distinct* agents; self-loops live in the identity part of
``closed_adjacency = I + A``.
"""

from __future__ import annotations

from collections import deque
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .errors import DomainError, ValidationError


class DiGraph:
    """Immutable directed graph on agents ``0..n-1``; self-loops always present."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if int(n) != n or n < 1:
            raise DomainError(f"agent count must be a positive integer, got {n}")
        self._n = int(n)
        edge_set = {(i, i) for i in range(self._n)}
        for j, i in edges:
            if not (0 <= j < self._n and 0 <= i < self._n):
                raise DomainError(f"edge ({j}, {i}) out of range for n={self._n}")
            edge_set.add((int(j), int(i)))
        self._edges = frozenset(edge_set)
        closed = np.zeros((self._n, self._n), dtype=np.int64)
        for j, i in self._edges:
            closed[i, j] = 1
        closed.setflags(write=False)
        self._closed = closed

    @property
    def n(self) -> int:
        return self._n

    @property
    def edges(self) -> frozenset:
        return self._edges

    @property
    def closed_adjacency(self) -> np.ndarray:
        """``I + A`` as a read-only 0/1 integer matrix."""
        return self._closed

    @cached_property
    def adjacency(self) -> np.ndarray:
        a = self._closed - np.eye(self._n, dtype=np.int64)
        a.setflags(write=False)
        return a

    def __repr__(self):
        return f"DiGraph(n={self._n}, edges={len(self._edges) - self._n} non-loop)"

    def __eq__(self, other):
        return isinstance(other, DiGraph) and self._n == other._n and self._edges == other._edges

    def __hash__(self):
        return hash((self._n, self._edges))

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_adjacency(cls, matrix) -> "DiGraph":
        m = np.asarray(matrix)
        n = m.shape[0]
        return cls(n, [(j, i) for i in range(n) for j in range(n) if m[i, j]])

    @classmethod
    def cycle(cls, n: int) -> "DiGraph":
        """Directed cycle ``0 -> 1 -> ... -> n-1 -> 0``."""
        return cls(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def complete(cls, n: int) -> "DiGraph":
        return cls(n, [(j, i) for i in range(n) for j in range(n)])

    @classmethod
    def star(cls, n_leaves: int) -> "DiGraph":
        """Hub ``0`` linked both ways to leaves ``1..n_leaves``."""
        edges = [(0, k) for k in range(1, n_leaves + 1)] + [(k, 0) for k in range(1, n_leaves + 1)]
        return cls(n_leaves + 1, edges)

    @classmethod
    def undirected(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "DiGraph":
        pairs = list(pairs)
        return cls(n, pairs + [(b, a) for a, b in pairs])

    @classmethod
    def path(cls, n: int) -> "DiGraph":
        return cls.undirected(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def regular(cls, n: int, d: int) -> "DiGraph":
        """Circulant digraph where ``i`` observes ``i-1, ..., i-(d-1)``.

        In- and out-degree (self-loop included) equal ``d`` at every node.
        """
        if not 1 <= d <= n:
            raise DomainError(f"regular degree must lie in [1, {n}], got {d}")
        return cls(n, [((i - s) % n, i) for i in range(n) for s in range(1, d)])

    @classmethod
    def read_edge_list(cls, path, n: Optional[int] = None) -> "DiGraph":
        """Parse ``j i`` lines (0-indexed, ``#`` comments allowed)."""
        edges = []
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                if len(parts) != 2:
                    raise ValueError
                j, i = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValidationError(f"expected 'j i' integer pair, got {raw!r}", field=f"{path}:{lineno}") from None
            if j < 0 or i < 0:
                raise ValidationError("agent ids must be non-negative", field=f"{path}:{lineno}")
            edges.append((j, i))
        inferred = 1 + max((max(e) for e in edges), default=0)
        if n is None:
            n = inferred
        elif inferred > n:
            raise ValidationError(f"edge list references agent {inferred - 1} but n={n}", field=str(path))
        return cls(n, edges)

    def write_edge_list(self, path) -> None:
        lines = [f"{j} {i}" for j, i in sorted(self._edges) if j != i]
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def _check_id(g: DiGraph, i: int) -> None:
    if not 0 <= i < g.n:
        raise DomainError(f"agent id {i} out of range for n={g.n}")


def in_neighborhood(g: DiGraph, i: int) -> frozenset:
    """Agents that ``i`` observes, including ``i`` itself."""
    _check_id(g, i)
    return frozenset(np.flatnonzero(g.closed_adjacency[i]).tolist())


def out_neighborhood(g: DiGraph, j: int) -> frozenset:
    """Agents that observe ``j``, including ``j`` itself."""
    _check_id(g, j)
    return frozenset(np.flatnonzero(g.closed_adjacency[:, j]).tolist())


def _reachable(succ: list[list[int]], start: int) -> set:
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in succ[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def is_strongly_connected(g: DiGraph) -> bool:
    forward = [[] for _ in range(g.n)]
    backward = [[] for _ in range(g.n)]
    for j, i in g.edges:
        forward[j].append(i)
        backward[i].append(j)
    return len(_reachable(forward, 0)) == g.n and len(_reachable(backward, 0)) == g.n


def is_balanced_regular(g: DiGraph) -> Optional[int]:
    """Common in/out degree ``d`` (self-loop counted) or ``None``."""
    indeg = g.closed_adjacency.sum(axis=1)
    outdeg = g.closed_adjacency.sum(axis=0)
    d = int(indeg[0])
    if np.all(indeg == d) and np.all(outdeg == d):
        return d
    return None
