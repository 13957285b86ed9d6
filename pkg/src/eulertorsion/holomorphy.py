"""Numerical Cauchy-Riemann certification of torsion ratios on chart grids."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .detline import TOL_PIVOT
from .errors import IllConditioned, InputError, SignDiscontinuity, ZeroDenominator
from .euler import Spider
from .turaev import farber_turaev
from .twisted import AnalyticFamily, TwistedComplexPresentation, twisted_data

EXCLUSION_RADIUS = 0.1

ChartFunction = Callable[[Sequence[complex]], complex]


def ratio_function(P: TwistedComplexPresentation, fam: AnalyticFamily, eps: Spider,
                   kind: str = "ratio") -> ChartFunction:
    """Chart point -> coordinate.

    ``kind="ratio"`` gives ``rho_eps / sigma``; ``"torsion"`` the coordinate of
    ``rho_eps`` and ``"sigma"`` that of ``sigma``.  The last two are only
    frame-independent where the family is acyclic.
    """
    if kind not in ("ratio", "torsion", "sigma"):
        raise ValueError(f"unknown kind {kind!r}")

    def f(point: Sequence[complex]) -> complex:
        alpha = fam.evaluate(np.atleast_1d(point))
        try:
            data = twisted_data(P, alpha)
        except IllConditioned as err:
            # a collapsing fused determinant is sigma going to zero
            raise ZeroDenominator(f"sigma vanishes numerically at {point}: {err}") from err
        sigma = data.sigma
        if abs(sigma.coordinate) <= TOL_PIVOT:
            raise ZeroDenominator(f"sigma vanishes numerically at {point}")
        if kind == "sigma":
            return sigma.coordinate
        rho = farber_turaev(P, alpha, eps, data=data)
        return rho.coordinate if kind == "torsion" else rho.ratio(sigma)

    return f


@dataclass(frozen=True)
class Grid:
    """Chart points laid out row-major on a ``rows x cols`` lattice; masked points are skipped."""

    points: np.ndarray  # (rows, cols, r) complex
    mask: np.ndarray  # (rows, cols) bool, True = included
    description: str

    @property
    def shape(self) -> tuple[int, int]:
        return self.mask.shape

    def included(self) -> list[tuple[int, int]]:
        return [tuple(ix) for ix in np.argwhere(self.mask)]


def annulus_grid(r_min: float, r_max: float, n: int,
                 exclusions: Sequence[tuple[complex, float]] = ((1.0, EXCLUSION_RADIUS),)) -> Grid:
    """Polar ``n x n`` grid: rows are radii, columns are angles; points near exclusions are masked."""
    radii = np.linspace(r_min, r_max, n)
    angles = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
    z = radii[:, None] * np.exp(1j * angles[None, :])
    mask = np.ones(z.shape, dtype=bool)
    for c, rad in exclusions:
        mask &= np.abs(z - c) >= rad
    desc = f"annulus {r_min}<=|z|<={r_max}, {n}x{n} polar" + "".join(
        f", excluding |z-({complex(c):g})|<{rad}" for c, rad in exclusions)
    return Grid(z[..., None], mask, desc)


def box_grid(x0: float, x1: float, y0: float, y1: float, n: int,
             exclusions: Sequence[tuple[complex, float]] = ()) -> Grid:
    xs, ys = np.linspace(x0, x1, n), np.linspace(y0, y1, n)
    z = xs[None, :] + 1j * ys[:, None]
    mask = np.ones(z.shape, dtype=bool)
    for c, rad in exclusions:
        mask &= np.abs(z - c) >= rad
    return Grid(z[..., None], mask, f"box [{x0},{x1}]x[{y0},{y1}], {n}x{n}")


def diagonal_grid(base: Grid, variables: int, offsets: Sequence[complex] | None = None) -> Grid:
    """Lift a one-variable grid to ``variables`` coordinates ``z_k = z * offsets[k]``."""
    offs = np.asarray(offsets if offsets is not None else [1.0] * variables, dtype=complex)
    pts = base.points[..., :1] * offs[None, None, :]
    return Grid(pts, base.mask, base.description + f", lifted to {variables} variables")


def parse_grid(spec: str) -> Grid:
    """``annulus:RMIN:RMAX:N[:EXCL]`` or ``box:X0:X1:Y0:Y1:N``."""
    kind, *args = spec.split(":")
    try:
        if kind == "annulus" and len(args) in (3, 4):
            excl = float(args[3]) if len(args) == 4 else EXCLUSION_RADIUS
            return annulus_grid(float(args[0]), float(args[1]), int(args[2]), ((1.0, excl),) if excl else ())
        if kind == "box" and len(args) == 5:
            return box_grid(*map(float, args[:4]), int(args[4]), ((1.0, EXCLUSION_RADIUS),))
    except ValueError as exc:
        raise InputError(f"bad grid spec {spec!r}: {exc}", None) from exc
    raise InputError(f"bad grid spec {spec!r}; expected annulus:RMIN:RMAX:N[:EXCL] or box:X0:X1:Y0:Y1:N",
                     None)


def cr_tol(step: float) -> float:
    """Default pass threshold: the central stencil's truncation scale ``h^2``, floored at 1e-10."""
    return max(step * step, 1e-10)


def _align(value: complex, reference: complex) -> complex:
    return value if abs(value - reference) <= abs(value + reference) else -value


def evaluate_on_grid(f: ChartFunction, grid: Grid, jump_tol: float = 1.0) -> np.ndarray:
    """Row-major sweep; each value's sign is chosen closest to the mean of its left/up neighbors."""
    out = np.full(grid.shape, np.nan + 0j)
    rows, cols = grid.shape
    for i in range(rows):
        for j in range(cols):
            if not grid.mask[i, j]:
                continue
            v = f(grid.points[i, j])
            refs = [out[a, b] for a, b in ((i, j - 1), (i - 1, j)) if a >= 0 and b >= 0 and grid.mask[a, b]]
            if refs:
                ref = np.mean(refs)
                v = _align(v, ref)
                if abs(v - ref) > jump_tol * max(abs(ref), abs(v)):
                    raise SignDiscontinuity(f"jump at grid point {(i, j)}: {v} vs neighbours {ref}")
            out[i, j] = v
    return out


@dataclass
class CRResidualReport:
    grid: str
    step: float
    residuals: np.ndarray  # (npoints, r)
    points: np.ndarray  # (npoints, r)
    tolerance: float
    extras: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if self.residuals.size else 0.0

    @property
    def median_residual(self) -> float:
        return float(np.median(self.residuals)) if self.residuals.size else 0.0

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_json(self) -> dict:
        return {"grid": self.grid, "step": self.step, "points": int(self.residuals.shape[0]),
                "max_residual": self.max_residual, "median_residual": self.median_residual,
                "tolerance": self.tolerance, "verdict": self.verdict}


def cr_residual(f: ChartFunction, grid: Grid, step: float = 1e-3, tol: float | None = None,
                resolve_sign: bool = True) -> CRResidualReport:
    """Wirtinger residual ``|d f / d conj(z_k)|`` by central differences, per point and variable.

    ``(1/2) * [(f(z+h) - f(z-h)) / 2h + i (f(z+ih) - f(z-ih)) / 2h]``, scaled by
    ``1 / max(1, |f(z)|)``.  Stencil values are sign-aligned with ``f(z)``.
    """
    pts = [grid.points[ix] for ix in grid.included()]
    r = grid.points.shape[-1]
    res = np.zeros((len(pts), r))
    for p, z in enumerate(pts):
        z = np.asarray(z, dtype=complex)
        center = f(z)
        for k in range(r):
            e = np.zeros(r, dtype=complex)
            e[k] = step
            vals = [f(z + e), f(z - e), f(z + 1j * e), f(z - 1j * e)]
            if resolve_sign:
                vals = [_align(v, center) for v in vals]
            dx = (vals[0] - vals[1]) / (2 * step)
            dy = (vals[2] - vals[3]) / (2 * step)
            res[p, k] = abs(0.5 * (dx + 1j * dy)) / max(1.0, abs(center))
    return CRResidualReport(grid.description, step, res, np.array(pts),
                            cr_tol(step) if tol is None else tol)
