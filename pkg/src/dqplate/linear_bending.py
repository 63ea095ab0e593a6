"""Classical small-deflection references and the auxiliary-point comparison.

Two independent center-deflection references for uniformly loaded isotropic
plates (center w = coefficient * q a^4 / D):

* simply supported: Navier double sine series, summed directly;
* clamped: Ritz minimization over the cosine basis
  (1 - cos 2pi m X)(1 - cos 2pi n Y), every term of which satisfies the
  clamped conditions exactly; all energy integrals are closed-form.

Both serve as oracles for the linear limit of the collocation solver and
as the error reference in boundary-treatment comparison runs.  The module
also solves the linear bending problem with the auxiliary-point (delta)
row-replacement treatment so it can be compared against the built-in
boundary reductions.
"""

from __future__ import annotations

import numpy as np

from . import bc_builder, dq_core, plate_model
from .bc_builder import CLAMPED, SIMPLY_SUPPORTED
from .plate_model import PlateSpec
from .tensor_ops import kron


def navier_ss_coefficient(aspect: float = 1.0, terms: int = 120) -> float:
    """Center-deflection coefficient of a simply supported plate.

    Sums the double sine series for uniform load on an a x b plate with
    aspect = a/b; the coefficient multiplies q a^4 / D.  Only odd harmonics
    contribute; 120 terms leaves the tail far below 1e-10.
    """
    m = np.arange(1, 2 * terms, 2, dtype=float)
    sm = np.where(((m - 1) / 2) % 2 == 0, 1.0, -1.0)  # sin(m pi / 2)
    msq = m**2
    denom = (msq[:, None] + aspect**2 * msq[None, :]) ** 2
    terms_mn = (sm[:, None] * sm[None, :]) / (m[:, None] * m[None, :] * denom)
    return float(16.0 / np.pi**6 * terms_mn.sum())


def clamped_ritz_coefficient(aspect: float = 1.0, modes: int = 24) -> float:
    """Center-deflection coefficient of a clamped plate by the cosine Ritz.

    Minimizes the bending energy of w = sum A_mn phi_mn with
    phi_mn = (1 - cos 2pi m X)(1 - cos 2pi n Y) against the uniform load.
    For clamped edges the energy reduces to the square of the Laplacian-type
    form with aspect-ratio weights, and the cosine orthogonality makes all
    entries explicit.  Returns the coefficient on q a^4 / D.
    """
    g2 = aspect**2
    mm = np.arange(1, modes + 1, dtype=float)
    cm2 = (2.0 * np.pi * mm) ** 2
    idx = [(i, j) for i in range(modes) for j in range(modes)]
    ndof = len(idx)
    k = np.empty((ndof, ndof))
    for p, (i, j) in enumerate(idx):
        for r, (s, t) in enumerate(idx):
            d_ms = 1.0 if i == s else 0.0
            d_nt = 1.0 if j == t else 0.0
            xx = cm2[i] * cm2[s] * (0.5 * d_ms) * (1.0 + 0.5 * d_nt)
            yy = g2**2 * cm2[j] * cm2[t] * (1.0 + 0.5 * d_ms) * (0.5 * d_nt)
            cross = g2 * (cm2[i] * cm2[t] + cm2[s] * cm2[j]) * 0.25 * d_ms * d_nt
            k[p, r] = xx + yy + cross
    f = np.ones(ndof)  # integral of each basis function over the unit square
    coeffs = np.linalg.solve(k, f)
    center = sum(
        c * (1.0 - (-1.0) ** (i + 1)) * (1.0 - (-1.0) ** (j + 1))
        for c, (i, j) in zip(coeffs, idx)
    )
    return float(center)


def series_coefficient(bc_kind: str, aspect: float = 1.0) -> float:
    """Classical center coefficient for the supported kinds."""
    if bc_kind == SIMPLY_SUPPORTED:
        return navier_ss_coefficient(aspect)
    if bc_kind == CLAMPED:
        return clamped_ritz_coefficient(aspect)
    raise ValueError(f"no classical reference for bc kind {bc_kind!r}")


def _require_isotropic(spec: PlateSpec) -> None:
    # the series references assume one bending rigidity: d1 = d2 = d3
    mat = plate_model.derive_material(spec)
    if abs(mat.d2 - mat.d1) > 1e-9 * mat.d1 or abs(mat.d3 - mat.d1) > 1e-9 * mat.d1:
        raise ValueError("linear comparison references require an isotropic spec")


def linear_reference_center(spec: PlateSpec) -> float:
    """Series-based center w/h in the linear limit of an isotropic spec."""
    _require_isotropic(spec)
    mat = plate_model.derive_material(spec)
    scale = spec.q * spec.a**4 / (mat.d1 * spec.h)
    return series_coefficient(spec.bc, spec.a / spec.b) * scale


def linear_center_builtin(spec: PlateSpec) -> float:
    """Linear-limit center w/h using the built-in boundary reduction."""
    sys = plate_model.build_system(spec)
    w = plate_model.linear_solve(sys)
    u, v = plate_model.recover_inplane(sys, w)
    return plate_model.recover_fields(sys, w, u, v).center_deflection_ratio


def linear_center_delta(spec: PlateSpec, delta: float = 1e-5) -> float:
    """Linear-limit center w/h using the auxiliary-point row replacement.

    Assembles the bending operator on the full (moved) grid and replaces
    the rows of boundary and auxiliary nodes by the value and derivative
    conditions.  Rows on the auxiliary x-lines take the x-derivative
    condition; remaining auxiliary y-line rows take the y-derivative one.
    """
    mat = plate_model.derive_material(spec)
    gx0 = dq_core.make_grid(spec.nx, spec.grid_kind)
    gy0 = dq_core.make_grid(spec.ny, spec.grid_kind)
    planx = bc_builder.build_delta_rows(gx0, delta, spec.bc)
    plany = bc_builder.build_delta_rows(gy0, delta, spec.bc)
    dmx = dq_core.diff_matrices(planx.grid)
    dmy = dq_core.diff_matrices(plany.grid)
    nx, ny = spec.nx, spec.ny
    rab = spec.a / spec.b

    op = (
        kron(dmx.fourth, np.eye(ny))
        + (2.0 * mat.d3 / mat.d1) * rab**2 * kron(dmx.second, dmy.second)
        + (mat.d2 / mat.d1) * rab**4 * kron(np.eye(nx), dmy.fourth)
    )
    rhs = np.full(nx * ny, spec.q * spec.a**4 / (mat.d1 * spec.h))

    deriv_x = dmx.first if planx.derivative_order == 1 else dmx.second
    deriv_y = dmy.first if plany.derivative_order == 1 else dmy.second
    slope_x = kron(deriv_x, np.eye(ny))
    slope_y = kron(np.eye(nx), deriv_y)

    for i in range(nx):
        for j in range(ny):
            row = i * ny + j
            if i in (0, nx - 1) or j in (0, ny - 1):
                op[row] = 0.0
                op[row, row] = 1.0
                rhs[row] = 0.0
            elif i in planx.delta_rows:
                op[row] = slope_x[row]
                rhs[row] = 0.0
            elif j in plany.delta_rows:
                op[row] = slope_y[row]
                rhs[row] = 0.0
    w = np.linalg.solve(op, rhs).reshape(nx, ny)
    return plate_model._interp_center(w, planx.grid.nodes, plany.grid.nodes)
