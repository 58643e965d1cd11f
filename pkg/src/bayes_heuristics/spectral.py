"""Dominant eigenpairs of non-negative matrices by power iteration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError, PreconditionError
from .network import DiGraph, is_strongly_connected

POWER_TOL = 1e-13
POWER_MAX_ITER = 100_000


@dataclass(frozen=True, eq=False)
class PerronPair:
    """Perron root with unit-norm, strictly positive left/right eigenvectors."""

    rho: float
    left: np.ndarray
    right: np.ndarray

    @property
    def projector(self) -> np.ndarray:
        """Rank-one spectral projector ``r l^T / (l^T r)``."""
        return np.outer(self.right, self.left) / float(self.left @ self.right)

    def biorthonormal(self) -> tuple[np.ndarray, np.ndarray]:
        """``(left, right)`` with unit-norm ``left`` rescaled so ``left @ right == 1``."""
        return self.left / float(self.left @ self.right), self.right


def _power_iterate(m: np.ndarray, tol: float, max_iter: int) -> np.ndarray:
    n = m.shape[0]
    v = np.full(n, 1.0 / np.sqrt(n))
    for _ in range(max_iter):
        w = m @ v
        norm = np.linalg.norm(w)
        if norm == 0 or not np.isfinite(norm):
            raise NumericalError("power iteration collapsed to zero or overflowed")
        w /= norm
        if np.max(np.abs(w - v)) < tol:
            return w
        v = w
    raise NumericalError(f"power iteration did not converge in {max_iter} iterations")


def perron_pair(m, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER) -> PerronPair:
    """Perron-Frobenius eigenpair of a primitive non-negative matrix."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError("expected a square matrix")
    if np.any(m < 0):
        raise DomainError("matrix has negative entries")
    right = _power_iterate(m, tol, max_iter)
    left = _power_iterate(m.T, tol, max_iter)
    if np.any(right <= 0) or np.any(left <= 0):
        raise NumericalError("Perron vectors are not strictly positive; matrix is not primitive")
    rho = float(left @ m @ right) / float(left @ right)
    return PerronPair(rho, left, right)


def spectral_radius(m) -> float:
    """Largest eigenvalue modulus (dense solver; any square matrix)."""
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(m))))


@dataclass(frozen=True, eq=False)
class Centrality:
    alpha: np.ndarray
    rho: float  # spectral radius of A; I + A has Perron root 1 + rho
    right: np.ndarray  # right Perron vector of I + A scaled so alpha @ right == 1

    def __len__(self):
        return len(self.alpha)


def centrality(g: DiGraph) -> Centrality:
    """Normalized left Perron vector of ``I + A``.

    Satisfies ``alpha^T (I + A) = (1 + rho) alpha^T`` with ``sum(alpha) == 1``.
    """
    if not is_strongly_connected(g):
        raise PreconditionError("centrality requires a strongly connected graph")
    pair = perron_pair(g.closed_adjacency)
    alpha = pair.left / pair.left.sum()
    right = pair.right / float(alpha @ pair.right)
    return Centrality(alpha, pair.rho - 1.0, right)


def stationary_distribution(t, row_tol: float = 1e-10) -> np.ndarray:
    """Stationary law ``s`` of a primitive row-stochastic matrix: ``s^T T = s^T``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("transition matrix has negative entries")
    if np.max(np.abs(t.sum(axis=1) - 1.0)) > row_tol:
        raise DomainError("rows do not sum to one")
    s = _power_iterate(t.T, POWER_TOL, POWER_MAX_ITER)
    if np.any(s <= 0):
        raise NumericalError("stationary vector is not strictly positive")
    return s / s.sum()
