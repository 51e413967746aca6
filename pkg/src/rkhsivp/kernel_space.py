"""Reproducing kernels of the Sobolev-type spaces behind the collocation solver.

Two spaces appear in the method.  The working space ``W23`` on an interval
``[a, T]`` consists of functions with absolutely continuous second derivative,
third derivative in ``L2``, and ``u(a) = u'(a) = 0``; its inner product is

    <u, v> = sum_{i=0..2} u^(i)(a) v^(i)(a) + integral_a^T u'''(s) v'''(s) ds.

Its reproducing kernel section ``R_x(y)`` is a piecewise quintic in ``y`` with
a seam at ``y = x``.  The twelve monomial coefficients (six per branch) are
recovered for each base point ``x`` from a 12x12 linear system expressing the
boundary conditions at ``a``, the natural conditions at ``T``, continuity of
orders 0..4 across the seam and a unit jump of the fifth derivative.  Solves
are LRU-cached per base point, and the first three derivatives of the
coefficient vector with respect to ``x`` are obtained exactly by
differentiating the same linear system, which is what the Gram-matrix
assembly and solution-derivative evaluations rely on.

The auxiliary first-order space ``W21`` has the closed-form hyperbolic kernel
``G_x(y) = [cosh(x+y-(a+T)) + cosh(|x-y|+a-T)] / (2 sinh(T-a))``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .errors import DomainError, NumericError, ToleranceError

__all__ = [
    "Interval",
    "W23Kernel",
    "W21Kernel",
    "build_w23_kernel",
    "build_w21_kernel",
    "eval_kernel",
    "eval_w21_kernel",
    "w23_inner_product",
    "kernel_section",
    "quintic_derivative_weights",
]

# FALL[m][j] = j (j-1) ... (j-m+1), the falling factorial entering the m-th
# derivative of y^j.
_FALL = np.zeros((6, 6))
for _j in range(6):
    _FALL[0, _j] = 1.0
    for _m in range(1, 6):
        _FALL[_m, _j] = _FALL[_m - 1, _j] * (_j - _m + 1)


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[a, T]`` with ``a < T``, both finite."""

    a: float
    T: float

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "T", float(self.T))
        if not (math.isfinite(self.a) and math.isfinite(self.T)):
            raise ValueError("interval endpoints must be finite")
        if not self.a < self.T:
            raise ValueError(f"interval requires a < T, got [{self.a}, {self.T}]")

    @property
    def length(self) -> float:
        return self.T - self.a

    def contains(self, x: float) -> bool:
        return self.a <= x <= self.T

    def require(self, x: float, what: str = "point") -> None:
        if not self.contains(x):
            raise DomainError(f"{what} {x} outside [{self.a}, {self.T}]")


def quintic_derivative_weights(y: float, order: int) -> np.ndarray:
    """Weights of the ``order``-th derivative of ``sum_j c_j y^j`` (j = 0..5).

    Returns the length-6 vector ``w`` with ``w[j] = fall(j, order) *
    y**(j-order)``, so that ``w @ c`` is the derivative value.
    """
    w = np.zeros(6)
    for j in range(order, 6):
        w[j] = _FALL[order, j] * y ** (j - order)
    return w


class W23Kernel:
    """Reproducing kernel of the third-order space on an interval.

    Instances are immutable after construction and safe to share across
    threads: the per-base-point coefficient cache is the internally
    synchronized :func:`functools.lru_cache`.

    Parameters
    ----------
    interval : Interval
        Domain ``[a, T]`` of the space.
    cache_size : int
        Number of base points whose coefficient solves are retained.
    """

    def __init__(self, interval: Interval, cache_size: int = 512):
        self.interval = interval
        a, T = interval.a, interval.T
        rows = np.zeros((6, 12))
        # Boundary conditions at a act on the left branch (columns 0..5):
        # value, first derivative, and d2 - d3 all vanish.
        rows[0, :6] = quintic_derivative_weights(a, 0)
        rows[1, :6] = quintic_derivative_weights(a, 1)
        rows[2, :6] = quintic_derivative_weights(a, 2) - quintic_derivative_weights(a, 3)
        # Natural conditions at T act on the right branch (columns 6..11):
        # derivatives of orders 3, 4, 5 vanish.
        rows[3, 6:] = quintic_derivative_weights(T, 3)
        rows[4, 6:] = quintic_derivative_weights(T, 4)
        rows[5, 6:] = quintic_derivative_weights(T, 5)
        self._boundary_rows = rows
        self._rhs = np.zeros(12)
        self._rhs[11] = -1.0  # fifth-derivative jump (right minus left) at the seam
        self._coeffs = lru_cache(maxsize=cache_size)(self._solve_at)

    # -- coefficient access ------------------------------------------------

    def coefficients(self, x: float) -> np.ndarray:
        """Monomial coefficients ``[a1..a6, b1..b6]`` of the section at ``x``."""
        return self.coefficient_derivatives(x)[0]

    def coefficient_derivatives(self, x: float) -> np.ndarray:
        """Coefficients and their first three x-derivatives, shape (4, 12).

        Row ``r`` holds ``d^r c / dx^r``.  The rows beyond the zeroth feed the
        application of the differential operator in the base-point slot
        (Gram assembly, solution derivatives).
        """
        self.interval.require(x, "base point")
        return self._coeffs(float(x))

    # -- internals ---------------------------------------------------------

    def _condition_matrix(self, x: float) -> np.ndarray:
        A = np.zeros((12, 12))
        A[:6] = self._boundary_rows
        for m in range(5):
            w = quintic_derivative_weights(x, m)
            A[6 + m, :6] = w
            A[6 + m, 6:] = -w
        w5 = quintic_derivative_weights(x, 5)
        A[11, :6] = -w5
        A[11, 6:] = w5
        return A

    def _seam_derivative(self, x: float, r: int) -> np.ndarray:
        """r-th x-derivative of the condition matrix.

        Only the seam rows move with x; differentiating the order-m
        continuity row once yields the order-(m+1) seam pattern, and rows
        pushed past order 5 vanish because the branches are quintics.
        """
        D = np.zeros((12, 12))
        for m in range(5):
            if m + r <= 5:
                w = quintic_derivative_weights(x, m + r)
                D[6 + m, :6] = w
                D[6 + m, 6:] = -w
        return D

    def _solve_at(self, x: float) -> np.ndarray:
        A = self._condition_matrix(x)
        with warnings.catch_warnings():
            warnings.simplefilter("error", LinAlgWarning)
            try:
                lu = lu_factor(A)
            except (LinAlgWarning, np.linalg.LinAlgError) as exc:
                raise NumericError(
                    f"singular kernel condition system at x={x}"
                ) from exc
        c0 = lu_solve(lu, self._rhs)
        d1 = self._seam_derivative(x, 1)
        d2 = self._seam_derivative(x, 2)
        d3 = self._seam_derivative(x, 3)
        c1 = lu_solve(lu, -(d1 @ c0))
        c2 = lu_solve(lu, -(d2 @ c0 + 2.0 * (d1 @ c1)))
        c3 = lu_solve(lu, -(d3 @ c0 + 3.0 * (d2 @ c1) + 3.0 * (d1 @ c2)))
        out = np.vstack([c0, c1, c2, c3])
        if not np.all(np.isfinite(out)):
            raise NumericError(f"kernel coefficient solve produced non-finite values at x={x}")
        out.setflags(write=False)
        return out


def build_w23_kernel(interval: Interval, cache_size: int = 512) -> W23Kernel:
    """Construct the piecewise-quintic kernel for ``interval``."""
    return W23Kernel(interval, cache_size=cache_size)


def eval_kernel(
    kernel: W23Kernel,
    x: float,
    y: float,
    dy_order: int = 0,
    *,
    branch: str | None = None,
) -> float:
    """Evaluate ``d^m/dy^m R_x(y)`` for ``m = dy_order`` in 0..5.

    Ties at the seam ``y == x`` use the left (``y <= x``) branch.  ``branch``
    may force ``"left"`` or ``"right"`` regardless of the tie-break, which the
    test suite uses to probe seam continuity and the fifth-derivative jump.
    """
    if dy_order not in (0, 1, 2, 3, 4, 5):
        raise ValueError(f"dy_order must be in 0..5, got {dy_order}")
    kernel.interval.require(x, "base point")
    kernel.interval.require(y, "evaluation point")
    if branch is None:
        use_left = y <= x
    elif branch == "left":
        use_left = True
    elif branch == "right":
        use_left = False
    else:
        raise ValueError(f"branch must be None, 'left' or 'right', got {branch!r}")
    c = kernel.coefficients(x)
    block = c[:6] if use_left else c[6:]
    return float(quintic_derivative_weights(y, dy_order) @ block)


@dataclass(frozen=True)
class W21Kernel:
    """Closed-form hyperbolic kernel of the first-order space on an interval."""

    interval: Interval


def build_w21_kernel(interval: Interval) -> W21Kernel:
    return W21Kernel(interval)


def eval_w21_kernel(kernel: W21Kernel, x: float, y: float) -> float:
    """Evaluate ``G_x(y)``; symmetric and positive on the interval."""
    a, T = kernel.interval.a, kernel.interval.T
    kernel.interval.require(x, "base point")
    kernel.interval.require(y, "evaluation point")
    return (math.cosh(x + y - (a + T)) + math.cosh(abs(x - y) + a - T)) / (
        2.0 * math.sinh(T - a)
    )


def kernel_section(kernel: W23Kernel, x: float) -> Callable[[float, int], float]:
    """The section ``R_x`` as a ``(y, order)`` callable with orders 0..3.

    Suitable as an argument to :func:`w23_inner_product`; pass ``x`` as a
    breakpoint there so the quadrature respects the seam.
    """
    kernel.interval.require(x, "base point")

    def section(y: float, order: int = 0) -> float:
        return eval_kernel(kernel, x, y, order)

    return section


def w23_inner_product(
    u: Callable[[float, int], float],
    v: Callable[[float, int], float],
    interval: Interval,
    tol: float = 1e-12,
    breakpoints: Iterable[float] = (),
) -> float:
    """Inner product of the third-order space, by adaptive quadrature.

    ``u`` and ``v`` are ``(y, order)`` callables supplying derivatives up to
    order 3 (analytically, or by finite differences with a stated step).
    Interior ``breakpoints`` (kernel seams, collocation nodes) are forwarded
    to the quadrature so piecewise integrands do not degrade convergence.
    This routine is a test-suite oracle; the solver itself never integrates.
    """
    a, T = interval.a, interval.T
    head = sum(u(a, i) * v(a, i) for i in range(3))

    def integrand(s: float) -> float:
        return u(s, 3) * v(s, 3)

    pts = sorted({float(p) for p in breakpoints if a < p < T})
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            tail, _ = quad(
                integrand,
                a,
                T,
                points=pts or None,
                epsabs=tol,
                epsrel=1e-11,
                limit=200,
            )
        except IntegrationWarning as exc:
            raise ToleranceError(
                f"inner-product quadrature did not reach tolerance {tol}: {exc}"
            ) from exc
    return head + tail
