"""Chain-level Poincare duality on determinant lines (acyclic case)."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .detline import CANONICAL_TAG, TOL_PIVOT, BasedComplex, DetLineElement, torsion_acyclic
from .errors import InputError, NoConsistentClass, NoDualData, NotSupported
from .euler import (
    HomologyClass,
    Spider,
    characteristic_class_candidate,
    dual_spider,
    representative_word,
)
from .report import Check
from .turaev import dual_representation, farber_turaev
from .twisted import (
    Cell,
    Representation,
    TwistedComplexPresentation,
    assemble_boundary,
    evaluate_word,
)

TOL_DUALITY = 1e-8


@dataclass(frozen=True)
class ChainDualityData:
    """Dual presentation, dual-cell table and pairings ``C^k(P) x C^{m-k}(P*) -> C``.

    ``pairings[k]`` is a ``k_k x k_k`` cell-level matrix ``M_k`` (rows: dual
    cells, columns: cells of ``P``); on fibers it acts as ``M_k (x) I_n`` and the
    pairing is sesquilinear, ``<u, w> = w^H M_k u``.
    """

    dual: TwistedComplexPresentation
    correspondence: tuple[tuple[Cell, Cell], ...]
    pairings: tuple[np.ndarray, ...]
    dual_base: Cell | None = None

    def __init__(self, dual: TwistedComplexPresentation, correspondence: Mapping[Cell, Cell],
                 pairings: Sequence, dual_base: Cell | None = None):
        mats = []
        for k, m in enumerate(pairings):
            a = np.atleast_2d(np.array(m, dtype=complex))
            if a.size and abs(np.linalg.det(a)) <= TOL_PIVOT:
                raise InputError(f"pairing in degree {k} is degenerate", f"/dual/pairings/{k}")
            a.setflags(write=False)
            mats.append(a)
        object.__setattr__(self, "dual", dual)
        object.__setattr__(self, "correspondence",
                           tuple(sorted((tuple(a), tuple(b)) for a, b in correspondence.items())))
        object.__setattr__(self, "pairings", tuple(mats))
        object.__setattr__(self, "dual_base", tuple(dual_base) if dual_base else dual.base)

    def table(self) -> dict[Cell, Cell]:
        return dict(self.correspondence)

    def validate(self, P: TwistedComplexPresentation) -> None:
        m = P.top
        if tuple(reversed(P.cell_counts)) != self.dual.cell_counts:
            raise InputError("dual presentation must have the reversed cell counts", "/dual")
        if len(self.pairings) != m + 1:
            raise InputError(f"need {m + 1} pairing matrices", "/dual/pairings")
        for k, M in enumerate(self.pairings):
            if M.shape != (P.cell_counts[k], P.cell_counts[k]):
                raise InputError(f"pairing {k} has shape {M.shape}", f"/dual/pairings/{k}")
        table = self.table()
        if set(table) != set(P.cells()):
            raise InputError("correspondence must cover every cell", "/dual/correspondence")
        for (d, i), (e, j) in table.items():
            if e != m - d or not 0 <= j < self.dual.cell_counts[e]:
                raise InputError(f"cell {(d, i)} must correspond to a {m - d}-cell", "/dual/correspondence")

    def reversed(self, P: TwistedComplexPresentation) -> "ChainDualityData":
        """Duality data going back from ``P*`` to ``P``."""
        m = P.top
        back = {b: a for a, b in self.correspondence}
        pairings = [self.pairings[m - k].conj().T for k in range(m + 1)]
        return ChainDualityData(P, back, pairings, P.base)


def adjoint_presentation(P: TwistedComplexPresentation,
                         name: str | None = None) -> tuple[TwistedComplexPresentation, ChainDualityData]:
    """Dual cell structure whose twisted complex at ``alpha'`` is the adjoint of ``C(P, alpha)``.

    Cell ``(k, i)`` of ``P`` corresponds to ``(m - k, i)``; boundary words are
    inverted and blocks transposed, so ``d*_{m-1-k}(alpha') = d_k(alpha)^H``
    and the pairings are identities.
    """
    m = P.top
    blocks = []
    for j in range(m):
        src = P.boundaries[m - 1 - j]
        rows, cols = P.cell_counts[m - j], P.cell_counts[m - 1 - j]
        blocks.append(tuple(
            tuple(tuple((c, w.inverse()) for c, w in src[b][a]) for b in range(rows))
            for a in range(cols)))
    dual = TwistedComplexPresentation(
        name or f"{P.name}*", tuple(reversed(P.cell_counts)), P.generators, tuple(blocks),
        P.relators, P.abelianization, P.torsion_orders, 0, P.sampler,
        f"adjoint cell structure of {P.name}")
    table = {(d, i): (m - d, i) for d, i in P.cells()}
    pairings = [np.eye(k) for k in P.cell_counts]
    return dual, ChainDualityData(dual, table, pairings, dual.base)


def _fiber(M: np.ndarray, n: int) -> np.ndarray:
    return np.kron(M, np.eye(n))


def adjoint_complex(C: BasedComplex, data: ChainDualityData, n: int) -> BasedComplex:
    """Dual complex determined by ``C`` and the pairings: ``d*_{m-1-k} = M_k^{-H} d_k^H M_{k+1}^H``."""
    m = C.top
    M = [_fiber(p, n) for p in data.pairings]
    diffs = []
    for i in range(m):
        k = m - 1 - i
        d = C.differentials[k]
        diffs.append(np.linalg.solve(M[k].conj().T, d.conj().T @ M[k + 1].conj().T))
    return BasedComplex(list(reversed(C.dims)), diffs)


def compatibility_gap(P: TwistedComplexPresentation, alpha: Representation,
                      data: ChainDualityData) -> float:
    """Largest relative mismatch (up to sign, per degree) between literal and adjoint dual differentials."""
    C = assemble_boundary(P, alpha)
    lit = assemble_boundary(data.dual, dual_representation(alpha))
    adj = adjoint_complex(C, data, alpha.rank)
    worst = 0.0
    for a, b in zip(lit.differentials, adj.differentials):
        if a.size == 0:
            continue
        scale = max(1.0, float(np.linalg.norm(b)))
        worst = max(worst, min(float(np.linalg.norm(a - b)), float(np.linalg.norm(a + b))) / scale)
    return worst


def _pairing_factor(data: ChainDualityData, n: int) -> complex:
    f = 1.0 + 0.0j
    for k, M in enumerate(data.pairings):
        if M.size == 0:
            continue
        d = np.conj(np.linalg.det(_fiber(M, n)))
        f = f * d if k % 2 == 0 else f / d
    return f


def d_operator(e: DetLineElement, P: TwistedComplexPresentation, alpha: Representation,
               data: ChainDualityData | None, route: str = "pairing") -> DetLineElement:
    """Anti-linear ``D: Det H(alpha) -> Det H(alpha')`` for acyclic ``alpha`` and odd ``m``.

    ``route="pairing"`` builds the dual complex from ``C(P, alpha)`` and the
    pairings; ``route="literal"`` assembles the dual presentation at ``alpha'``.
    """
    if data is None:
        raise NoDualData(f"{P.name} has no duality data")
    if P.top % 2 == 0:
        raise NotSupported("duality operator implemented for odd-dimensional presentations only")
    if e.basis_tag != CANONICAL_TAG:
        raise NotSupported("duality operator needs an acyclic representation (canonical frame)")
    n = alpha.rank
    C = assemble_boundary(P, alpha)
    tau = torsion_acyclic(C)
    if route == "pairing":
        tau_dual = torsion_acyclic(adjoint_complex(C, data, n))
    elif route == "literal":
        tau_dual = torsion_acyclic(assemble_boundary(data.dual, dual_representation(alpha)))
    else:
        raise ValueError(f"unknown route {route!r}")
    coord = np.conj(e.coordinate / tau) * tau_dual * _pairing_factor(data, n)
    return DetLineElement(complex(coord), CANONICAL_TAG, e.grading)


def homology_box(P: TwistedComplexPresentation, radius: int = 4):
    ranges = [range(o) if o else range(-radius, radius + 1) for o in P.torsion_orders]
    for coords in itertools.product(*ranges):
        yield HomologyClass.of(P, coords)


def det_of_class(h: HomologyClass, alpha: Representation, P: TwistedComplexPresentation) -> complex:
    return complex(np.linalg.det(evaluate_word(representative_word(h, P), alpha)))


@dataclass
class DualityFit:
    fitted: HomologyClass | None
    ratios: list[complex]
    gaps: list[float]
    candidate: HomologyClass
    checks: list[Check] = field(default_factory=list)

    @property
    def agrees_with_candidate(self) -> bool:
        return self.fitted is not None and self.fitted == self.candidate

    def to_json(self) -> dict:
        return {"fitted_class": list(self.fitted.coords) if self.fitted else None,
                "candidate_class": list(self.candidate.coords),
                "agrees_with_candidate": self.agrees_with_candidate,
                "ratios": [[r.real, r.imag] for r in self.ratios], "gaps": self.gaps}


def dual_torsion_ratio(P: TwistedComplexPresentation, data: ChainDualityData, eps: Spider,
                       alpha: Representation) -> complex:
    """``D rho_eps(alpha) / rho_eps(alpha')``."""
    rho = farber_turaev(P, alpha, eps)
    dual = dual_representation(alpha)
    rho_dual = farber_turaev(P, dual, eps)
    return d_operator(rho, P, alpha, data).ratio(rho_dual)


def verify_dual_torsion(P: TwistedComplexPresentation, data: ChainDualityData, eps: Spider,
                        samples: Sequence[Representation], tol: float = TOL_DUALITY,
                        radius: int = 4, raise_on_failure: bool = False) -> DualityFit:
    """Fit one class ``h`` with ``D rho_eps(alpha) / rho_eps(alpha') = +-det alpha'(h)`` for all samples."""
    if len(samples) < 3:
        raise InputError("need at least three sample representations")
    ratios = [dual_torsion_ratio(P, data, eps, a) for a in samples]
    duals = [dual_representation(a) for a in samples]
    best, best_gaps = None, None
    for h in homology_box(P, radius):
        gaps = []
        for r, d in zip(ratios, duals):
            target = det_of_class(h, d, P)
            gaps.append(min(abs(r - target), abs(r + target)) / abs(r))
        if max(gaps) <= tol and (best_gaps is None or max(gaps) < max(best_gaps) - 1e-15):
            best, best_gaps = h, gaps
    eps_dual = dual_spider(eps, data.table(), data.dual_base)
    candidate = characteristic_class_candidate(eps, eps_dual, P)
    if best is None and raise_on_failure:
        raise NoConsistentClass(f"{P.name}: no class in the search box fits all samples")
    fit = DualityFit(best, ratios, best_gaps or [float("inf")] * len(ratios), candidate)
    for i, (r, g) in enumerate(zip(ratios, fit.gaps)):
        target = det_of_class(best, duals[i], P) if best is not None else float("nan")
        fit.checks.append(Check("duality-fit", r, target, g, tol, {"sample": i}))
    return fit
