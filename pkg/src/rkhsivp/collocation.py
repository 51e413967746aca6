"""Collocation points, operator-image basis and its orthonormalization.

For nodes ``x_1 < ... < x_n`` inside ``(a, T]`` the basis functions are the
operator images ``psi_i(x) = d2/dy2 R_x(y) + (k/x_i) d/dy R_x(y)`` at
``y = x_i``, where ``R`` is the piecewise-quintic kernel.  Each ``psi_i`` is
itself a member of the kernel space, so Gram entries are obtained by applying
the same operator in the base-point slot: with ``c, c', c''`` the kernel
coefficient vector at ``x_i`` and its exact x-derivatives,

    G[i, j] = w(x_j) . (c'' + (k/x_i) c')        (branch by x_j <= x_i)

where ``w(x_j)`` collects the quintic derivative weights of node ``j``.  No
quadrature and no finite differences enter; the quadrature inner product
exists only as an independent oracle in the tests.

Orthonormalization uses the Cholesky factor of the Gram matrix, ``beta =
C^{-1}``, which agrees with the classical Gram-Schmidt recurrence exactly but
stays stable at the node counts the benchmark tables need.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import DomainError, NumericError, SingularityError
from .kernel_space import Interval, W23Kernel, eval_kernel, quintic_derivative_weights

__all__ = [
    "PointSet",
    "CollocationBasis",
    "uniform_points",
    "psi_eval",
    "gram_matrix",
    "orthonormalize",
    "build_basis",
]


@dataclass(frozen=True)
class PointSet:
    """Strictly increasing, finite collocation nodes."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float).copy()
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("point set must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(arr)):
            raise ValueError("point set must be finite")
        if not np.all(np.diff(arr) > 0):
            raise ValueError("point set must be strictly increasing")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]


def uniform_points(interval: Interval, n: int) -> PointSet:
    """``x_i = a + i (T - a) / n`` for ``i = 1..n``; never includes ``a``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a, T = interval.a, interval.T
    i = np.arange(1, n + 1, dtype=float)
    return PointSet(a + i * (T - a) / n)


def _require_inside(points: PointSet, interval: Interval) -> None:
    if points.values[0] <= interval.a or points.values[-1] > interval.T:
        raise DomainError(
            f"collocation nodes must lie in ({interval.a}, {interval.T}]"
        )


def _psi_weights(points: np.ndarray, k: float) -> np.ndarray:
    """Row ``i`` dots a coefficient block into ``psi_i``'s defining operator."""
    n = points.size
    W = np.empty((n, 6))
    for i, xi in enumerate(points):
        W[i] = quintic_derivative_weights(xi, 2) + (k / xi) * quintic_derivative_weights(xi, 1)
    return W


def psi_eval(kernel: W23Kernel, k: float, x_i: float, x: float) -> float:
    """Evaluate ``psi`` for node ``x_i`` at the point ``x``."""
    if x_i <= kernel.interval.a:
        raise SingularityError(
            f"node {x_i} must be strictly greater than a = {kernel.interval.a}"
        )
    d2 = eval_kernel(kernel, x, x_i, 2)
    d1 = eval_kernel(kernel, x, x_i, 1)
    return d2 + (k / x_i) * d1


def gram_matrix(kernel: W23Kernel, k: float, points: PointSet) -> np.ndarray:
    """Pairwise inner products of the basis functions, symmetrized."""
    _require_inside(points, kernel.interval)
    pts = points.values
    n = pts.size
    G = np.empty((n, n))
    # The finiteness check below is the contract for bad inputs (such as an
    # infinite k), so intermediate overflow warnings carry no information.
    with np.errstate(invalid="ignore", over="ignore"):
        W = _psi_weights(pts, k)
        for i, xi in enumerate(pts):
            rows = kernel.coefficient_derivatives(xi)
            gvec = rows[2] + (k / xi) * rows[1]
            split = int(np.searchsorted(pts, xi, side="right"))
            G[i, :split] = W[:split] @ gvec[:6]
            G[i, split:] = W[split:] @ gvec[6:]
    if not np.all(np.isfinite(G)):
        i, j = np.argwhere(~np.isfinite(G))[0]
        raise NumericError(f"non-finite Gram entry at ({int(i) + 1}, {int(j) + 1})")
    return 0.5 * (G + G.T)


def orthonormalize(gram: np.ndarray) -> np.ndarray:
    """Lower-triangular ``beta`` with ``beta @ gram @ beta.T = I``.

    Computed as the inverse Cholesky factor; the diagonal is positive.
    """
    gram = np.asarray(gram, dtype=float)
    try:
        chol = scipy.linalg.cholesky(gram, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise NumericError(
            f"Gram matrix is not positive definite ({exc}); "
            "reduce the node count or check for repeated nodes"
        ) from exc
    beta = scipy.linalg.solve_triangular(chol, np.eye(gram.shape[0]), lower=True)
    return beta


class CollocationBasis:
    """Kernel, nodes, Gram matrix and orthonormalizing coefficients.

    Immutable after construction; all returned arrays are read-only views of
    internal state.  ``psi_values`` supports derivative orders 0..3 in the
    evaluation variable (order 3 exists for the quadrature oracles; the
    public solution interface stops at 2).
    """

    def __init__(
        self,
        kernel: W23Kernel,
        k: float,
        points: PointSet,
        gram: np.ndarray,
        beta: np.ndarray,
    ):
        self.kernel = kernel
        self.k = float(k)
        self.points = points
        gram = np.asarray(gram, dtype=float).copy()
        beta = np.asarray(beta, dtype=float).copy()
        gram.setflags(write=False)
        beta.setflags(write=False)
        self.gram = gram
        self.beta = beta
        self._wpsi = _psi_weights(points.values, self.k)
        self._wpsi.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.points)

    def psi_values(self, x: float, order: int = 0) -> np.ndarray:
        """Values of every ``psi_i`` (or an x-derivative) at ``x``."""
        if order not in (0, 1, 2, 3):
            raise ValueError(f"order must be in 0..3, got {order}")
        cvec = self.kernel.coefficient_derivatives(x)[order]
        pts = self.points.values
        split = int(np.searchsorted(pts, x, side="right"))
        out = np.empty(self.n)
        out[:split] = self._wpsi[:split] @ cvec[:6]
        out[split:] = self._wpsi[split:] @ cvec[6:]
        return out

    def psibar_values(self, x: float, order: int = 0) -> np.ndarray:
        """Values of the orthonormalized functions at ``x``."""
        return self.beta @ self.psi_values(x, order)

    @cached_property
    def node_psi_matrix(self) -> np.ndarray:
        """``Psi[j, i] = psi_i(x_j)``."""
        out = np.vstack([self.psi_values(xj) for xj in self.points])
        out.setflags(write=False)
        return out

    @cached_property
    def node_psibar_matrix(self) -> np.ndarray:
        """``S[j, i] = psibar_i(x_j)``."""
        out = self.node_psi_matrix @ self.beta.T
        out.setflags(write=False)
        return out


def build_basis(kernel: W23Kernel, k: float, points: PointSet) -> CollocationBasis:
    """Assemble Gram matrix and orthonormalization for the given nodes."""
    gram = gram_matrix(kernel, k, points)
    beta = orthonormalize(gram)
    return CollocationBasis(kernel, k, points, gram, beta)
