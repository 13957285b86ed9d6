"""Seeded verification suites shared by the CLI and the acceptance tests."""
from __future__ import annotations

import itertools
from typing import Callable

import numpy as np

from .document import TwistedComplexDocument
from .duality import TOL_DUALITY, compatibility_gap, d_operator, det_of_class, verify_dual_torsion
from .euler import HomologyClass, Spider, act, chain_class
from .holomorphy import (
    annulus_grid,
    cr_residual,
    diagonal_grid,
    ratio_function,
)
from .metrics import HermitianMetricAssignment, kt_integral, milnor_norm, random_metric
from .report import Check
from .turaev import dual_representation, farber_turaev, verify_milnor_identity
from .twisted import GroupWord, evaluate_word, random_representation, twisted_data

SUITES = ("milnor", "unitary", "h1", "spider", "vstar", "loop", "holomorphy", "duality")


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def milnor_suite(doc: TwistedComplexDocument, samples: int = 50, seed: int = 0, rank: int = 1,
                 tol: float = 1e-9, spider: Spider | None = None) -> list[Check]:
    """Milnor norm of the torsion against ``exp(1/2 int_c theta)`` on random ``(alpha, H)``."""
    P, rng = doc.presentation, _rng(seed)
    eps = spider or doc.spider(None)
    out = []
    for i in range(samples):
        alpha = random_representation(P, rank, rng)
        H = random_metric(P, rank, rng)
        out.append(verify_milnor_identity(P, alpha, eps, H, tol, name=f"milnor[{i}]"))
    return out


def unitary_suite(doc: TwistedComplexDocument, samples: int = 20, seed: int = 0, rank: int = 1,
                  tol: float = 1e-10) -> list[Check]:
    P, rng = doc.presentation, _rng(seed)
    eps = doc.spider(None)
    out = []
    for i in range(samples):
        alpha = random_representation(P, rank, rng, unitary=True)
        H = HermitianMetricAssignment.flat(rank)
        data = twisted_data(P, alpha)
        rho = farber_turaev(P, alpha, eps, H, data=data)
        out.append(Check.relative(f"unitary[{i}]", milnor_norm(rho, P, alpha, H, data), 1.0, tol))
    return out


def h1_box(P, radius: int = 3):
    ranges = [range(o) if o else range(-radius, radius + 1) for o in P.torsion_orders]
    for coords in itertools.product(*ranges):
        yield HomologyClass.of(P, coords)


def h1_suite(doc: TwistedComplexDocument, samples: int = 2, seed: int = 0, rank: int = 1,
             tol: float = 1e-9, radius: int = 3) -> list[Check]:
    """``rho_{h eps} = det alpha(h) rho_eps`` for every ``h`` in the lattice box."""
    P, rng = doc.presentation, _rng(seed)
    eps = doc.spider(None)
    out = []
    for i in range(samples):
        alpha = random_representation(P, rank, rng)
        data = twisted_data(P, alpha)
        rho = farber_turaev(P, alpha, eps, data=data)
        worst, worst_h = 0.0, None
        for h in h1_box(P, radius):
            moved = farber_turaev(P, alpha, act(h, eps, P), data=data)
            target = rho.scaled(det_of_class(h, alpha, P))
            chk = Check.up_to_sign("", moved.coordinate, target.coordinate, tol)
            gap = chk.gap * abs(target.coordinate) / abs(rho.coordinate)
            if gap >= worst:
                worst, worst_h = gap, h.coords
        out.append(Check(f"h1[{i}]", worst, 0.0, worst, tol, {"worst_class": list(worst_h or ())}))
    return out


def _random_word(P, rng: np.random.Generator, max_len: int = 6) -> GroupWord:
    n = int(rng.integers(0, max_len + 1))
    return GroupWord(tuple((int(rng.integers(P.ngens)), int(rng.choice([-1, 1]))) for _ in range(n)))


def spider_suite(doc: TwistedComplexDocument, samples: int = 10, seed: int = 0, rank: int = 1,
                 tol: float = 1e-9) -> list[Check]:
    """Spiders whose legs differ by letter permutations share a chain class and a torsion."""
    P, rng = doc.presentation, _rng(seed)
    out = []
    for i in range(samples):
        legs = {c: _random_word(P, rng) for c in P.cells()}
        shuffled = {c: GroupWord(tuple(w.letters[k] for k in rng.permutation(len(w)))) for c, w in legs.items()}
        e1, e2 = Spider(P.base, legs), Spider(P.base, shuffled)
        alpha = random_representation(P, rank, rng)
        data = twisted_data(P, alpha)
        r1 = farber_turaev(P, alpha, e1, data=data).coordinate
        r2 = farber_turaev(P, alpha, e2, data=data).coordinate
        cls = chain_class(e1, e2, P)
        out.append(Check.up_to_sign(f"spider[{i}]", r1, r2, tol, chain_class=list(cls.coords)))
        out.append(Check.bound(f"spider-class[{i}]", float(not cls.is_zero()), 0.0))
    return out


def vstar_suite(doc: TwistedComplexDocument, samples: int = 5, seed: int = 0, rank: int = 1,
                tol: float = 1e-12) -> list[Check]:
    P, rng = doc.presentation, _rng(seed)
    eps = doc.spider(None)
    out = []
    for i in range(samples):
        alpha = random_representation(P, rank, rng)
        H = random_metric(P, rank, rng)
        data = twisted_data(P, alpha)
        ref = farber_turaev(P, alpha, eps, H, data=data).coordinate
        for lam in (2.0, 1j, 0.1):
            got = farber_turaev(P, alpha, eps, H, base_scale=lam, data=data).coordinate
            out.append(Check.relative(f"vstar[{i}, {lam}]", got, ref, tol))
    return out


def loop_suite(doc: TwistedComplexDocument, samples: int = 100, seed: int = 0, rank: int = 1,
               tol: float = 1e-10) -> list[Check]:
    """``|det alpha(w)| = exp(1/2 int_w theta)`` for random loops at the base cell."""
    P, rng = doc.presentation, _rng(seed)
    alpha = random_representation(P, rank, rng)
    H = random_metric(P, rank, rng)
    out = []
    for i in range(samples):
        w = _random_word(P, rng, 12)
        lhs = abs(np.linalg.det(evaluate_word(w, alpha)))
        rhs = float(np.exp(0.5 * kt_integral(w, alpha, H, P.base, P.base)))
        out.append(Check.relative(f"loop[{i}]", lhs, rhs, tol, length=len(w)))
    return out


def holomorphy_suite(doc: TwistedComplexDocument, family: str | None = None, grid=None,
                     step: float = 1e-3, tol: float = 1e-6, spider: str | None = None,
                     control: str = "none") -> list[Check]:
    """Cauchy-Riemann residuals of ``rho / sigma`` plus positive and convergence controls.

    ``control="conj"`` replaces the ratio by its conjugate; that run must FAIL.
    """
    P = doc.presentation
    fam = doc.family(family or next(iter(doc.families)))
    eps = doc.spider(spider if spider else ("shifted" if "shifted" in doc.spiders else None))
    if grid is None:
        grid = annulus_grid(0.5, 2.0, 21)
    if grid.points.shape[-1] != fam.variables:
        grid = diagonal_grid(grid, fam.variables, np.exp(0.3j * np.arange(fam.variables)))
    f = ratio_function(P, fam, eps)
    target: Callable = (lambda z: np.conj(f(z))) if control == "conj" else f
    rep = cr_residual(target, grid, step, tol)
    out = [Check.bound(f"cr-residual[{control}]", rep.max_residual, tol,
                       median=rep.median_residual, points=int(rep.residuals.shape[0]))]
    if control == "none":
        anti = cr_residual(lambda z: np.conj(np.sum(z)), grid, step, tol, resolve_sign=False)
        out.append(Check.at_least("conj-control", anti.max_residual, 0.5))
        out.extend(convergence_checks(grid, step))
    return out


def convergence_checks(grid, step: float) -> list[Check]:
    """Halving the step cuts the residual of truncation-dominated polynomial controls by >= 3x."""
    out = []
    for name, poly in (("z^3", lambda z: np.prod(z) ** 3), ("z^4", lambda z: np.prod(z) ** 4)):
        coarse = cr_residual(poly, grid, step, resolve_sign=False).max_residual
        fine = cr_residual(poly, grid, step / 2, resolve_sign=False).max_residual
        out.append(Check.at_least(f"halving[{name}]", coarse / fine, 3.0, coarse=coarse, fine=fine))
    return out


def duality_suite(doc: TwistedComplexDocument, samples: int = 5, seed: int = 0, rank: int = 1,
                  tol: float = TOL_DUALITY) -> list[Check]:
    P, rng = doc.presentation, _rng(seed)
    data = doc.duality
    eps = doc.spider(None)
    alphas = []
    while len(alphas) < max(samples, 3):
        a = random_representation(P, rank, rng)
        if twisted_data(P, a).basis.is_acyclic and twisted_data(P, dual_representation(a)).basis.is_acyclic:
            alphas.append(a)
    fit = verify_dual_torsion(P, data, eps, alphas, tol)
    out = list(fit.checks)
    out.append(Check("duality-class", fit.to_json()["fitted_class"], fit.to_json()["candidate_class"],
                     0.0 if fit.fitted is not None else float("inf"), 0.0,
                     {"agrees_with_candidate": fit.agrees_with_candidate}))
    for i, a in enumerate(alphas):
        rho = farber_turaev(P, a, eps)
        lam = complex(rng.normal(), rng.normal())
        lhs = d_operator(rho.scaled(lam), P, a, data).coordinate
        rhs = np.conj(lam) * d_operator(rho, P, a, data).coordinate
        out.append(Check.relative(f"antilinear[{i}]", lhs, rhs, 1e-9))
        once = d_operator(rho, P, a, data)
        back = d_operator(once, data.dual, dual_representation(a), data.reversed(P))
        out.append(Check.up_to_sign(f"involution[{i}]", back.coordinate, rho.coordinate, 1e-9))
        lit = d_operator(rho, P, a, data, route="literal").coordinate
        out.append(Check.up_to_sign(f"two-routes[{i}]", once.coordinate, lit, 1e-9))
        out.append(Check.bound(f"adjointness[{i}]", compatibility_gap(P, a, data), 1e-9))
    return out


def run_suite(name: str, doc: TwistedComplexDocument, samples: int | None, seed: int, rank: int = 1,
              tol: float | None = None, **kw) -> list[Check]:
    table = {"milnor": (milnor_suite, 50), "unitary": (unitary_suite, 20), "h1": (h1_suite, 2),
             "spider": (spider_suite, 10), "vstar": (vstar_suite, 5), "loop": (loop_suite, 100),
             "duality": (duality_suite, 5)}
    if name == "holomorphy":
        return holomorphy_suite(doc, tol=tol if tol is not None else 1e-6, **kw)
    if name not in table:
        raise KeyError(name)
    fn, default = table[name]
    extra = {"tol": tol} if tol is not None else {}
    return fn(doc, samples if samples is not None else default, seed, rank, **extra)
