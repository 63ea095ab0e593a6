"""1-D collocation grids and differential-quadrature weighting matrices.

A derivative at a grid point is approximated as a weighted sum of the
function values at every point of the line.  The first-order weights come
from the Lagrange interpolation polynomial in closed form; orders 2..4 are
generated by the standard recursion, with every diagonal entry set to the
negative sum of its row (exact differentiation of constants).

Grids live on [0, 1].  Physical scaling by the plate dimensions is applied
by the assembly layer, never here.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)

UNIFORM = "uniform"
CHEBYSHEV = "chebyshev_mapped"

GRID_KINDS = (UNIFORM, CHEBYSHEV)

# Condition numbers of 4th-order weighting matrices grow fast with N;
# beyond ~31 points double precision is not trustworthy.
MAX_POINTS = 31

MIN_NODE_GAP = 1e-12


class DegenerateGridError(ValueError):
    """Grid nodes coincide (or nearly so); weights are not computable."""


def chebyshev_roots(n: int) -> np.ndarray:
    """Roots of the degree-n first-kind Chebyshev polynomial, decreasing order.

    r_i = cos((2i - 1)pi / 2n), i = 1..n.  All roots lie strictly inside
    (-1, 1); for n = 1 the single root is 0.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    i = np.arange(1, n + 1)
    return np.cos((2 * i - 1) * np.pi / (2 * n))


@dataclass(frozen=True)
class Grid1D:
    """Ordered collocation nodes on [0, 1].

    ``cheb_roots`` keeps the unmapped Chebyshev roots (aligned index-wise
    with ``nodes``) so the closed-form weight formula can be applied later.
    """

    nodes: np.ndarray
    kind: str
    cheb_roots: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("grid needs at least two nodes")
        if nodes[0] != 0.0 or nodes[-1] != 1.0:
            raise ValueError("grid must span [0, 1] with exact endpoints")
        gaps = np.diff(nodes)
        if np.any(gaps <= MIN_NODE_GAP):
            raise DegenerateGridError(
                f"nodes not strictly increasing (min gap {gaps.min():.3e})"
            )

    @property
    def n(self) -> int:
        return self.nodes.size


def make_grid(n: int, kind: str = CHEBYSHEV) -> Grid1D:
    """Build an n-point grid of the requested kind.

    ``uniform`` gives equally spaced nodes.  ``chebyshev_mapped`` takes the
    roots of the degree-n Chebyshev polynomial and maps them affinely onto
    [0, 1]; the map x = (r - r_1)/(r_n - r_1) sends the extreme roots to the
    interval endpoints exactly, which the boundary treatment requires.
    """
    if n < 2:
        raise ValueError(f"need n >= 2 grid points, got {n}")
    if n > MAX_POINTS:
        raise ValueError(f"n = {n} exceeds supported maximum {MAX_POINTS}")
    if kind == UNIFORM:
        nodes = np.arange(n) / (n - 1)
        nodes[-1] = 1.0
        return Grid1D(nodes, UNIFORM)
    if kind == CHEBYSHEV:
        r = chebyshev_roots(n)
        # r is decreasing, so the mapped nodes come out increasing and the
        # index pairing between nodes and roots is preserved.
        nodes = (r - r[0]) / (r[-1] - r[0])
        nodes[0] = 0.0
        nodes[-1] = 1.0
        return Grid1D(nodes, CHEBYSHEV, cheb_roots=r)
    raise ValueError(f"unknown grid kind {kind!r}; expected one of {GRID_KINDS}")


def diff_matrix_first(grid: Grid1D) -> np.ndarray:
    """First-derivative weighting matrix from the Lagrange closed form.

    Off-diagonal: a_ij = c_i / (c_j (x_i - x_j)) with c_i the product of
    (x_i - x_k) over k != i.  Diagonal: negative row sum, which makes every
    row annihilate constants regardless of rounding.
    """
    x = grid.nodes
    n = x.size
    dx = x[:, None] - x[None, :]
    if np.any(np.abs(dx[~np.eye(n, dtype=bool)]) <= MIN_NODE_GAP):
        raise DegenerateGridError("coincident nodes")
    np.fill_diagonal(dx, 1.0)
    # log-free product; N <= 31 keeps these well inside double range
    c = np.prod(dx, axis=1)
    a = c[:, None] / (c[None, :] * dx)
    np.fill_diagonal(a, 0.0)
    np.fill_diagonal(a, -a.sum(axis=1))
    return a


@dataclass(frozen=True)
class DiffMatrices:
    """Weighting matrices for derivative orders 1..4 on one grid."""

    first: np.ndarray
    second: np.ndarray
    third: np.ndarray
    fourth: np.ndarray
    grid: Grid1D

    @property
    def n(self) -> int:
        return self.grid.n


def diff_matrices_higher(first: np.ndarray, grid: Grid1D) -> DiffMatrices:
    """Orders 2..4 from the first-order matrix by the weight recursion.

    w_ij^(m) = m (w_ij^(1) w_ii^(m-1) - w_ij^(m-1) / (x_i - x_j)) for i != j,
    with m the order being produced and the diagonal again by negative row
    sum.  Equivalent to matrix powers of the first-order matrix but
    numerically cleaner.
    """
    x = grid.nodes
    n = x.size
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)

    mats = [first]
    w = first
    for m in (2, 3, 4):
        nxt = m * (first * np.diag(w)[:, None] - w / dx)
        np.fill_diagonal(nxt, 0.0)
        np.fill_diagonal(nxt, -nxt.sum(axis=1))
        mats.append(nxt)
        w = nxt
    return DiffMatrices(mats[0], mats[1], mats[2], mats[3], grid)


def diff_matrices(grid: Grid1D) -> DiffMatrices:
    """Convenience: first-order weights plus the recursion in one call."""
    return diff_matrices_higher(diff_matrix_first(grid), grid)


def chebyshev_fast_weights(grid: Grid1D, check_tol: float = 1e-10) -> np.ndarray:
    """First-derivative weights from the Chebyshev-root closed form.

    On mapped Chebyshev-root grids the Lagrange products collapse to

        a_ij = (-1)^(i-j) (r_n - r_1) / (r_i - r_j) * sqrt((1-r_j^2)/(1-r_i^2))

    for i != j, diagonal by negative row sum.  The generic Lagrange path is
    authoritative: if the fast form drifts past ``check_tol`` (relative to
    the matrix max-norm) a diagnostic is logged and the generic values are
    returned instead.
    """
    if grid.kind != CHEBYSHEV or grid.cheb_roots is None:
        raise ValueError("fast weights require a chebyshev_mapped grid")
    r = grid.cheb_roots
    n = r.size
    dr = r[:, None] - r[None, :]
    np.fill_diagonal(dr, 1.0)
    i = np.arange(n)
    sign = np.where((i[:, None] - i[None, :]) % 2 == 0, 1.0, -1.0)
    s = np.sqrt(1.0 - r**2)
    a = sign * (r[-1] - r[0]) / dr * (s[None, :] / s[:, None])
    np.fill_diagonal(a, 0.0)
    np.fill_diagonal(a, -a.sum(axis=1))

    generic = diff_matrix_first(grid)
    scale = np.abs(generic).max()
    err = np.abs(a - generic).max()
    if err > check_tol * scale:
        log.warning(
            "chebyshev fast weights off by %.3e (relative %.3e); "
            "falling back to the Lagrange form",
            err,
            err / scale,
        )
        return generic
    return a
