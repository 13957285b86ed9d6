"""Hermitian fiber metrics, discrete Kamber-Tondeur integrals and the Milnor metric."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .detline import DetLineElement
from .errors import GradingMismatch, InputError, NonPositiveMetric
from .euler import Spider, sign
from .twisted import (
    Cell,
    GroupWord,
    Representation,
    TwistedComplexPresentation,
    TwistedData,
    evaluate_word,
    twisted_data,
)


@dataclass(frozen=True)
class HermitianMetricAssignment:
    """Positive definite ``H_x`` per cell basepoint; cells not listed get the identity."""

    rank: int
    matrices: tuple[tuple[Cell, np.ndarray], ...] = field(default=())

    def __init__(self, rank: int, matrices: Mapping[Cell, np.ndarray] | None = None):
        items = []
        for cell, m in sorted((matrices or {}).items()):
            a = np.atleast_2d(np.array(m, dtype=complex))
            if a.shape != (rank, rank):
                raise InputError(f"metric at {cell} has shape {a.shape}, expected {(rank, rank)}")
            if not np.allclose(a, a.conj().T, atol=1e-12 * max(1.0, np.abs(a).max())):
                raise NonPositiveMetric(f"metric at {cell} is not Hermitian")
            if np.linalg.eigvalsh(a).min() <= 0:
                raise NonPositiveMetric(f"metric at {cell} is not positive definite")
            a.setflags(write=False)
            items.append((tuple(cell), a))
        object.__setattr__(self, "rank", int(rank))
        object.__setattr__(self, "matrices", tuple(items))

    @classmethod
    def flat(cls, rank: int) -> "HermitianMetricAssignment":
        return cls(rank)

    def at(self, cell: Cell) -> np.ndarray:
        for c, m in self.matrices:
            if c == tuple(cell):
                return m
        return np.eye(self.rank, dtype=complex)

    def logdet(self, cell: Cell) -> float:
        for c, m in self.matrices:
            if c == tuple(cell):
                return float(np.linalg.slogdet(m)[1])
        return 0.0

    def is_flat(self) -> bool:
        return all(np.allclose(m, np.eye(self.rank)) for _, m in self.matrices)


def random_metric(P: TwistedComplexPresentation, rank: int,
                  rng: np.random.Generator) -> HermitianMetricAssignment:
    mats = {}
    for cell in P.cells():
        g = rng.normal(size=(rank, rank)) + 1j * rng.normal(size=(rank, rank))
        mats[cell] = g @ g.conj().T / rank + 0.25 * np.eye(rank)
    return HermitianMetricAssignment(rank, mats)


def kt_integral(w: GroupWord, alpha: Representation, H: HermitianMetricAssignment,
                end: Cell, start: Cell) -> float:
    """Integral of the Kamber-Tondeur form along the edge path ``w`` from ``start`` to ``end``.

    Discretized as ``log(|det alpha(w)|**2 * det H_end / det H_start)``; for a
    closed loop this is ``2 log |det alpha(w)|``.
    """
    if H.rank != alpha.rank:
        raise InputError(f"metric rank {H.rank} differs from representation rank {alpha.rank}")
    _, logabs = np.linalg.slogdet(evaluate_word(w, alpha))
    return float(2.0 * logabs + H.logdet(end) - H.logdet(start))


def kt_integral_chain(chain: Spider | Iterable[tuple[int, GroupWord, Cell, Cell]],
                      alpha: Representation, H: HermitianMetricAssignment) -> float:
    """Signed sum of leg integrals.

    ``chain`` is a spider (leg signs ``(-1)**dim x``) or an iterable of
    ``(coefficient, word, start, end)`` terms.
    """
    if isinstance(chain, Spider):
        terms = [(sign(c), w, chain.base, c) for c, w in chain.legs]
    else:
        terms = list(chain)
    return float(sum(k * kt_integral(w, alpha, H, end, start) for k, w, start, end in terms))


def standard_log_norm(P: TwistedComplexPresentation, H: HermitianMetricAssignment) -> float:
    """``log`` of the norm of the standard element of ``Det C(K, alpha)`` under ``H``."""
    return 0.5 * sum(sign(c) * H.logdet(c) for c in P.cells())


def milnor_norm(e: DetLineElement, P: TwistedComplexPresentation, alpha: Representation,
                H: HermitianMetricAssignment, data: TwistedData | None = None) -> float:
    """Milnor norm of ``e``: ``phi`` is declared an isometry from ``Det C`` with the ``H`` metric."""
    if data is None:
        data = twisted_data(P, alpha)
    if e.basis_tag != data.sigma.basis_tag:
        raise GradingMismatch(f"element is in frame {e.basis_tag!r}, expected {data.sigma.basis_tag!r}")
    return float(abs(e.ratio(data.sigma)) * np.exp(standard_log_norm(P, H)))
