"""The Farber-Turaev torsion built from a Turaev spider."""
from __future__ import annotations

import warnings

import numpy as np

from .detline import STANDARD_TAG, DetLineElement, Grading, dual_pairing, standard_element
from .errors import ChiNonzeroWarning
from .euler import Spider, sign
from .metrics import HermitianMetricAssignment, kt_integral_chain, milnor_norm
from .report import Check
from .twisted import (
    Representation,
    TwistedComplexPresentation,
    TwistedData,
    evaluate_word,
    twisted_data,
)

TOL_IDENTITY = 1e-9


def dual_representation(alpha: Representation) -> Representation:
    """``alpha'(g) = (alpha(g)^*)^{-1}``, dual with respect to the standard Hermitian product."""
    return Representation([np.linalg.inv(a.conj().T) for a in alpha.matrices], alpha.tol_relator)


def spider_frame(P: TwistedComplexPresentation, alpha: Representation, eps: Spider,
                 H: HermitianMetricAssignment | None = None, base_scale: complex = 1.0) -> complex:
    """Coordinate of ``v = prod v_x^{(-1)^dim x}`` in the standard frame of ``Det C_.(K, alpha')``.

    ``v_x`` is the transport of ``v_*`` along the leg ``gamma_x`` in ``Det E_{alpha'}``;
    ``v_*`` has unit norm for the metric dual to ``H`` at the base cell, times ``base_scale``.
    """
    eps.validate(P)
    dual = dual_representation(alpha)
    v_star = complex(base_scale)
    if H is not None:
        v_star *= np.exp(0.5 * H.logdet(eps.base))
    coord = 1.0 + 0.0j
    for cell, w in eps.legs:
        v_x = v_star * np.linalg.det(evaluate_word(w, dual))
        coord = coord * v_x if sign(cell) > 0 else coord / v_x
    return coord


def farber_turaev(P: TwistedComplexPresentation, alpha: Representation, eps: Spider,
                  H: HermitianMetricAssignment | None = None, base_scale: complex = 1.0,
                  data: TwistedData | None = None) -> DetLineElement:
    """``phi(nu)`` with ``<nu, v> = 1``, defined up to sign.

    The chain complex of ``alpha'`` is identified with the dual of the cochain
    complex of ``alpha`` through the standard Hermitian product, which is
    anti-linear; hence ``v`` enters the bilinear pairing conjugated.
    """
    if P.euler_characteristic != 0:
        warnings.warn(f"{P.name}: Euler characteristic {P.euler_characteristic} != 0, "
                      "the result depends on the base frame", ChiNonzeroWarning, stacklevel=2)
    if data is None:
        data = twisted_data(P, alpha)
    C = data.complex
    v_coord = spider_frame(P, alpha, eps, H, base_scale)
    v = DetLineElement(np.conj(v_coord), STANDARD_TAG + "*", Grading(C.dims, C.dims, dual=True))
    nu = 1.0 / dual_pairing(standard_element(C), v)
    return data.sigma.scaled(nu)


def verify_milnor_identity(P: TwistedComplexPresentation, alpha: Representation, eps: Spider,
                           H: HermitianMetricAssignment, tol: float = TOL_IDENTITY,
                           name: str = "milnor") -> Check:
    """Compare ``||rho||^M`` with ``exp(1/2 * int_c theta)``."""
    data = twisted_data(P, alpha)
    rho = farber_turaev(P, alpha, eps, H, data=data)
    lhs = milnor_norm(rho, P, alpha, H, data)
    rhs = float(np.exp(0.5 * kt_integral_chain(eps, alpha, H)))
    return Check.relative(name, lhs, rhs, tol)
