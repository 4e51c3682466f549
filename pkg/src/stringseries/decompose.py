"""Boundary-matching polynomial decomposition f = f1 + f2.

f1 is the unique polynomial of degree <= 4n+1 that

* vanishes at 0 and L,
* has zero odd-order derivatives 1, 3, ..., 2n-1 at both ends,
* copies f's even-order derivatives 2, 4, ..., 2n at both ends,

so that the remainder f2 = f - f1 has vanishing even orders 0..2n at both
ends. The even extension of f1 plus the odd extension of f2 is then C^{2n}
across every seam of [-L, L].

The linear algebra lives in two independent forms: the full 2(2n+1) system
(``method="full"``) and a reduced form that fixes the Taylor coefficients
at 0 first and solves only the (2n+1)-square kernel system at L
(``method="reduced"``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .extend import (MAX_SEAM_ORDER, SEAM_TOL, ExtensionResult, add_branches, even_extend,
                     odd_extend)
from .fnspace import BoundaryData, FunctionSpec, one_sided_derivative

__all__ = [
    "SingularSystemError",
    "BoundaryMatrix",
    "DecompositionResult",
    "InfluenceTable",
    "build_boundary_matrix",
    "boundary_conditions_matrix",
    "boundary_polynomial",
    "decompose",
    "influence_coefficients",
    "compose_extension",
]

MAX_ORDER = 4
SINGULAR_RTOL = 1e-12


class SingularSystemError(np.linalg.LinAlgError):
    pass


def _falling(p: int, j: int) -> float:
    """p! / (p - j)!, zero when j > p."""
    if j > p:
        return 0.0
    return float(math.perm(p, j))


@dataclass(frozen=True, eq=False)
class BoundaryMatrix:
    n: int
    L: float
    entries: np.ndarray
    determinant: float
    condition: float  # of the row/column-equilibrated matrix


def build_boundary_matrix(n: int, L: float) -> BoundaryMatrix:
    """Kernel matrix of the boundary map restricted to x^{2n+1} .. x^{4n+1}.

    Row j holds the j-th derivative at L (j = 0..2n) of each monomial, with
    the common factor L^{2n+1-j} divided out, so for n = 1 the matrix is
    [[1, L, L^2], [3, 4L, 5L^2], [6, 12L, 20L^2]] with determinant 2 L^3.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not L > 0:
        raise ValueError("L must be positive")
    size = 2 * n + 1
    A = np.empty((size, size))
    for j in range(size):
        for i in range(size):
            A[j, i] = _falling(2 * n + 1 + i, j) * L ** i
    det = float(np.linalg.det(A))
    # row/column equilibration keeps the test blind to the factorial scales
    Ae = A / np.abs(A).max(axis=1, keepdims=True)
    Ae = Ae / np.abs(Ae).max(axis=0, keepdims=True)
    cond = float(np.linalg.cond(Ae))
    if not (det != 0.0 and 1.0 / cond > SINGULAR_RTOL):
        raise SingularSystemError(
            f"boundary matrix numerically singular for n={n}, L={L} "
            f"(det={det:.3g}, cond={cond:.3g})")
    return BoundaryMatrix(n, L, A, det, cond)


def boundary_conditions_matrix(n: int, L: float) -> np.ndarray:
    """The full 2(2n+1)-square map from coefficients to boundary data.

    Rows alternate endpoints: row 2j is the j-th derivative at 0, row 2j+1
    the j-th derivative at L, for j = 0..2n.
    """
    size = 2 * (2 * n + 1)
    T = np.zeros((size, size))
    for j in range(2 * n + 1):
        T[2 * j, j] = float(math.factorial(j))
        for p in range(j, size):
            T[2 * j + 1, p] = _falling(p, j) * L ** (p - j)
    return T


def _targets(data, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Even-order targets (orders 2..2n) at each endpoint from boundary data."""
    left = np.zeros(n)
    right = np.zeros(n)
    for d in data:
        if d.order == 0 or d.order % 2:
            if d.value != 0.0:
                raise ValueError(f"order {d.order} targets are fixed at zero")
            continue
        k = d.order // 2
        if k > n:
            raise ValueError(f"order {d.order} exceeds 2n={2 * n}")
        (left if d.endpoint == "left" else right)[k - 1] = d.value
    return left, right


def _solve_full(left: np.ndarray, right: np.ndarray, n: int, L: float) -> np.ndarray:
    T = boundary_conditions_matrix(n, L)
    rhs = np.zeros(T.shape[0])
    for k in range(1, n + 1):
        rhs[2 * (2 * k)] = left[k - 1]
        rhs[2 * (2 * k) + 1] = right[k - 1]
    return np.linalg.solve(T, rhs)  # LU with partial pivoting


def _solve_reduced(left: np.ndarray, right: np.ndarray, n: int, L: float) -> np.ndarray:
    size = 2 * (2 * n + 1)
    coef = np.zeros(size)
    for k in range(1, n + 1):
        coef[2 * k] = left[k - 1] / math.factorial(2 * k)
    head = Polynomial(coef[:2 * n + 1])
    B = build_boundary_matrix(n, L)
    rhs = np.zeros(2 * n + 1)
    for j in range(2 * n + 1):
        target = right[j // 2 - 1] if (j > 0 and j % 2 == 0) else 0.0
        rhs[j] = (target - head.deriv(j)(L)) / L ** (2 * n + 1 - j)
    coef[2 * n + 1:] = np.linalg.solve(B.entries, rhs)
    return coef


def boundary_polynomial(data, n: int, L: float, method: str = "full") -> Polynomial:
    """The polynomial of degree <= 4n+1 meeting the boundary conditions.

    Args:
        data: :class:`BoundaryData` items giving even-order targets 2..2n.
            Orders 0 and odd orders are implicitly zero; missing even orders
            default to zero.
        n: half the highest matched order.
        L: interval length.
        method: ``"full"`` or ``"reduced"`` (see module docstring).
    """
    if not 1 <= n <= MAX_ORDER:
        raise ValueError(f"supported n is 1..{MAX_ORDER}")
    build_boundary_matrix(n, L)  # raises on singular systems
    left, right = _targets(data, n)
    if method == "full":
        coef = _solve_full(left, right, n, L)
    elif method == "reduced":
        coef = _solve_reduced(left, right, n, L)
    else:
        raise ValueError(f"unknown method {method!r}")
    return Polynomial(coef).trim()


@dataclass(frozen=True, eq=False)
class DecompositionResult:
    f1: Polynomial
    f2: FunctionSpec
    matched_orders: list[BoundaryData]
    n: int
    L: float

    @property
    def f1_spec(self) -> FunctionSpec:
        return FunctionSpec.from_polynomial(self.f1, self.f2.domain, label="f1")

    def residuals(self) -> list[tuple[str, int, float]]:
        """(endpoint, order, f1 derivative minus target) for every condition."""
        out = []
        for end, x in (("left", 0.0), ("right", self.L)):
            for j in range(2 * self.n + 1):
                target = next((d.value for d in self.matched_orders
                               if d.endpoint == end and d.order == j), 0.0)
                out.append((end, j, float(self.f1.deriv(j)(x)) - target))
        return out


def decompose(f: FunctionSpec, n: int, method: str = "full") -> DecompositionResult:
    """Split f into a boundary polynomial f1 and a remainder f2.

    Raises:
        UnreliableDerivativeError: if a boundary derivative of f cannot be
            estimated; the exception carries the failing order.
    """
    if f.domain.left != 0.0:
        raise ValueError("decompose expects a function on [0, L]")
    if not 1 <= n <= MAX_SEAM_ORDER // 2:
        raise ValueError(f"decompose supports n in 1..{MAX_SEAM_ORDER // 2}; boundary "
                         "derivatives are estimated only through order 4")
    if f.claimed_smoothness < 2 * n:
        raise ValueError(f"f is only claimed C^{f.claimed_smoothness}; need C^{2 * n}")
    L = f.domain.right
    data = []
    for k in range(1, n + 1):
        for end in ("left", "right"):
            data.append(BoundaryData(end, 2 * k, one_sided_derivative(f, end, 2 * k)))
    f1 = boundary_polynomial(data, n, L, method)
    if f.is_sampled:
        f2 = FunctionSpec.from_samples(f.values - f1(f.grid), f.domain,
                                       f.claimed_smoothness, label=f"f2({f.label})")
    else:
        func = f.func
        poly = None if f.polynomial is None else (f.polynomial - f1).trim()
        f2 = FunctionSpec(f.domain, func=lambda x: func(x) - f1(x),
                          claimed_smoothness=f.claimed_smoothness, polynomial=poly,
                          label=f"f2({f.label})")
    return DecompositionResult(f1, f2, data, n, L)


@dataclass(frozen=True, eq=False)
class InfluenceTable:
    """Coefficient responses to unit even-order boundary targets.

    ``lam[i, k-1]`` is the x^i coefficient produced by a unit 2k-th
    derivative target at 0; ``mu`` likewise for a target at L.
    """

    n: int
    L: float
    lam: np.ndarray
    mu: np.ndarray

    def coefficients(self, left, right) -> np.ndarray:
        """Polynomial coefficients for targets; trailing axes may index time.

        ``left`` and ``right`` have shape (n,) or (n, ...) and hold the
        orders 2, 4, ..., 2n in that order.
        """
        left = np.asarray(left, dtype=float)
        right = np.asarray(right, dtype=float)
        return np.tensordot(self.lam, left, axes=(1, 0)) + np.tensordot(self.mu, right, axes=(1, 0))

    def reconstruct(self, left, right) -> Polynomial:
        return Polynomial(self.coefficients(left, right)).trim()


def influence_coefficients(n: int, L: float) -> InfluenceTable:
    size = 2 * (2 * n + 1)
    lam = np.zeros((size, n))
    mu = np.zeros((size, n))
    for k in range(1, n + 1):
        for end, table in (("left", lam), ("right", mu)):
            p = boundary_polynomial([BoundaryData(end, 2 * k, 1.0)], n, L)
            table[:p.coef.size, k - 1] = p.coef
    lam.setflags(write=False)
    mu.setflags(write=False)
    return InfluenceTable(n, L, lam, mu)


def compose_extension(f: FunctionSpec, n: int, tol: float = SEAM_TOL) -> ExtensionResult:
    """even_extend(f1) + odd_extend(f2): a C^{2n} function on [-L, L] equal to f on [0, L].

    On [0, L] the sum is f1 + f2 = f, so f itself is kept as the right branch
    and the restriction is exact; only the left branch is assembled.
    """
    parts = decompose(f, n)
    g1 = even_extend(parts.f1_spec)
    g2 = odd_extend(parts.f2)
    ext = ExtensionResult(f, add_branches(g1.left, g2.left), "mixed")
    return ext.with_seams(min(2 * n, MAX_SEAM_ORDER), tol)
