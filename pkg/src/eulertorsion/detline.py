"""Determinant lines of based cochain complexes.

Conventions used throughout the package:

* ``Det(C) = Det(C^0) (x) Det(C^1)^{-1} (x) Det(C^2) (x) ...``, i.e. degree ``j``
  enters with exponent ``(-1)**j``.
* For a two-term complex ``0 -> C^0 --A--> C^1 -> 0`` the torsion is ``det(A)``.
  In general the torsion is ``prod_j d_j ** (-1)**(j+1)`` where ``d_j`` is the
  determinant of the fused basis ``[image of lifts from j-1 | cohomology
  representatives | lifts in degree j]`` of ``C^j`` against the standard
  basis.  Replacing the preferred basis of ``C^j`` by the columns of ``T``
  divides each ``d_j`` by ``det(T)``, so the torsion picks up ``det(T) ** (-1)**j``.

Everything is double precision complex; ranks are decided by singular value
thresholding.
"""
from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    BorderlineRankWarning,
    ComplexViolation,
    GradingMismatch,
    IllConditioned,
    NotAcyclic,
    RankMismatch,
    SingularChange,
)

TOL_RANK = 1e-8
TOL_PIVOT = 1e-12
TOL_COMPLEX = 1e-9

#: exponent offset in ``det(T) ** (-1)**(j + GRADING_SHIFT)`` for basis changes (see ``BasedComplex.rebased``)
GRADING_SHIFT = 0

STANDARD_TAG = "std"
CANONICAL_TAG = "canonical"


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BasedComplex:
    """Cochain complex ``C^0 -> ... -> C^m`` with standard bases.

    ``differentials[j]`` has shape ``(dims[j+1], dims[j])``.
    """

    dims: tuple[int, ...]
    differentials: tuple[np.ndarray, ...]

    def __init__(self, dims: Sequence[int], differentials: Sequence) -> None:
        dims = tuple(int(d) for d in dims)
        if not dims or any(d < 0 for d in dims):
            raise ValueError("dims must be a nonempty list of nonnegative integers")
        if len(differentials) != len(dims) - 1:
            raise ValueError(f"expected {len(dims) - 1} differentials, got {len(differentials)}")
        diffs = []
        for j, d in enumerate(differentials):
            arr = _frozen(d).reshape(dims[j + 1], dims[j]) if np.size(d) == 0 else _frozen(d)
            if arr.shape != (dims[j + 1], dims[j]):
                raise ValueError(f"differential {j} has shape {arr.shape}, expected {(dims[j + 1], dims[j])}")
            diffs.append(arr)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "differentials", tuple(diffs))

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** j * k for j, k in enumerate(self.dims))

    def scale(self) -> float:
        """Largest singular value over all differentials (at least 1)."""
        s = [np.linalg.norm(d, 2) for d in self.differentials if d.size]
        return max([1.0, *s])

    def composite_defect(self) -> float:
        defect = 0.0
        for j in range(len(self.differentials) - 1):
            a, b = self.differentials[j], self.differentials[j + 1]
            if a.size and b.size:
                defect = max(defect, float(np.linalg.norm(b @ a, 2)))
        return defect

    def check(self, tol: float = TOL_COMPLEX) -> None:
        bound = tol * (1.0 + self.scale() ** 2)
        defect = self.composite_defect()
        if defect > bound:
            raise ComplexViolation(f"|dd| = {defect:.3e} exceeds {bound:.3e}")

    def direct_sum(self, other: "BasedComplex") -> "BasedComplex":
        if self.top != other.top:
            raise ValueError("direct sum needs complexes of equal length")
        diffs = []
        for a, b in zip(self.differentials, other.differentials):
            m = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]), dtype=complex)
            m[: a.shape[0], : a.shape[1]] = a
            m[a.shape[0]:, a.shape[1]:] = b
            diffs.append(m)
        return BasedComplex([p + q for p, q in zip(self.dims, other.dims)], diffs)

    def rebased(self, transforms: Sequence) -> "BasedComplex":
        """Complex written in new bases; ``transforms[j]`` has the new basis as columns."""
        T = [_frozen(t) for t in transforms]
        diffs = [np.linalg.solve(T[j + 1], d @ T[j]) for j, d in enumerate(self.differentials)]
        return BasedComplex(self.dims, diffs)


@dataclass(frozen=True)
class Grading:
    dims: tuple[int, ...]
    cohomology: tuple[int, ...]
    dual: bool = False

    def dualized(self) -> "Grading":
        return Grading(self.dims, self.cohomology, not self.dual)


def dual_tag(tag: str) -> str:
    return tag[:-1] if tag.endswith("*") else tag + "*"


@dataclass(frozen=True)
class DetLineElement:
    """A determinant line element, stored as a coordinate in a named frame."""

    coordinate: complex
    basis_tag: str
    grading: Grading

    def scaled(self, lam: complex) -> "DetLineElement":
        return DetLineElement(complex(lam) * self.coordinate, self.basis_tag, self.grading)

    def ratio(self, other: "DetLineElement") -> complex:
        """``self / other``; both must live in the same frame."""
        if self.basis_tag != other.basis_tag:
            raise GradingMismatch(f"frames differ: {self.basis_tag!r} vs {other.basis_tag!r}")
        if other.coordinate == 0:
            raise ZeroDivisionError("division by the zero element")
        return self.coordinate / other.coordinate


@dataclass(frozen=True)
class CohomologyBasis:
    """Representative cocycles per degree plus bases of the coboundary spaces.

    ``representatives[j]`` is ``dims[j] x h_j``; ``coboundaries[j]`` is an
    orthonormal basis of ``im d_{j-1}`` inside ``C^j``.
    """

    representatives: tuple[np.ndarray, ...]
    coboundaries: tuple[np.ndarray, ...]
    borderline: tuple[float, ...] = field(default=(), compare=False)

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(r.shape[1] for r in self.representatives)

    @property
    def differential_ranks(self) -> tuple[int, ...]:
        return tuple(b.shape[1] for b in self.coboundaries[1:])

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(r.shape[0] for r in self.representatives)

    @property
    def is_acyclic(self) -> bool:
        return not any(self.ranks)

    @property
    def tag(self) -> str:
        if self.is_acyclic:
            return CANONICAL_TAG
        h = hashlib.sha1()
        for r in self.representatives:
            h.update(str(r.shape).encode())
            h.update(np.ascontiguousarray(r).tobytes())
        return "H:" + h.hexdigest()[:16]

    def grading(self) -> Grading:
        return Grading(self.dims, self.ranks)

    def with_representatives(self, reps: Sequence) -> "CohomologyBasis":
        return CohomologyBasis(tuple(_frozen(r) for r in reps), self.coboundaries)


def rank_threshold(C: BasedComplex, tol_rank: float = TOL_RANK) -> float:
    return tol_rank * C.scale()


def _svd_rank(s: np.ndarray, threshold: float, borderline: list) -> int:
    for v in s:
        if threshold / 10 < v < threshold * 10:
            borderline.append(float(v))
    return int(np.sum(s > threshold))


def cohomology(C: BasedComplex, tol_rank: float = TOL_RANK) -> CohomologyBasis:
    """Harmonic representatives of ``H^j`` via singular value thresholding."""
    thr = rank_threshold(C, tol_rank)
    borderline: list[float] = []
    m = C.top
    images = [np.zeros((C.dims[0], 0), dtype=complex)]
    kernels = []
    for j, d in enumerate(C.differentials):
        if d.size:
            u, s, vh = np.linalg.svd(d)
            r = _svd_rank(s, thr, borderline)
        else:
            u = np.eye(d.shape[0], dtype=complex)
            vh = np.eye(d.shape[1], dtype=complex)
            r = 0
        images.append(u[:, :r])
        kernels.append(vh[r:].conj().T)
    kernels.append(np.eye(C.dims[m], dtype=complex))
    reps = []
    for j in range(m + 1):
        K, B = kernels[j], images[j]
        h = K.shape[1] - B.shape[1]
        if h < 0:
            raise RankMismatch(f"degree {j}: coboundary rank exceeds cocycle rank")
        if h == 0:
            reps.append(np.zeros((C.dims[j], 0), dtype=complex))
            continue
        P = K - B @ (B.conj().T @ K)
        u, _, _ = np.linalg.svd(P)
        reps.append(u[:, :h])
    if borderline:
        warnings.warn(f"singular values near the rank threshold {thr:.2e}: {borderline}",
                      BorderlineRankWarning, stacklevel=2)
    return CohomologyBasis(tuple(_frozen(r) for r in reps), tuple(_frozen(b) for b in images),
                           tuple(borderline))


def differential_ranks(C: BasedComplex, tol_rank: float = TOL_RANK) -> tuple[int, ...]:
    thr = rank_threshold(C, tol_rank)
    out = []
    for d in C.differentials:
        out.append(int(np.sum(np.linalg.svd(d, compute_uv=False) > thr)) if d.size else 0)
    return tuple(out)


def pivot_columns(A: np.ndarray, r: int, tol_pivot: float = TOL_PIVOT) -> list[int]:
    """Greedy column-pivoted Gram-Schmidt; returns ``r`` sorted column indices."""
    if r == 0:
        return []
    R = np.array(A, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(R)))) if R.size else 1.0
    chosen: list[int] = []
    for _ in range(r):
        norms = np.linalg.norm(R, axis=0)
        norms[chosen] = -1.0
        k = int(np.argmax(norms))
        if norms[k] <= tol_pivot * scale:
            raise IllConditioned(f"no pivot column left above {tol_pivot:g} (best {norms[k]:.3e})")
        q = R[:, k] / norms[k]
        R = R - np.outer(q, q.conj() @ R)
        chosen.append(k)
    return sorted(chosen)


def _fused_coordinate(C: BasedComplex, reps: Sequence[np.ndarray], ranks: Sequence[int],
                      tol_pivot: float = TOL_PIVOT) -> complex:
    m = C.top
    lifts = [pivot_columns(C.differentials[j], ranks[j], tol_pivot) for j in range(m)]
    coord = 1.0 + 0.0j
    for j in range(m + 1):
        blocks = []
        if j > 0:
            blocks.append(C.differentials[j - 1][:, lifts[j - 1]])
        rep = np.asarray(reps[j], dtype=complex)
        blocks.append(rep.reshape(C.dims[j], rep.size // C.dims[j] if C.dims[j] else 0))
        if j < m:
            blocks.append(np.eye(C.dims[j], dtype=complex)[:, lifts[j]])
        M = np.hstack(blocks)
        if M.shape[0] != M.shape[1]:
            raise RankMismatch(f"degree {j}: fused basis has shape {M.shape}")
        if M.shape[0] == 0:
            continue
        d = np.linalg.det(M)
        if abs(d) <= tol_pivot:
            raise IllConditioned(f"degree {j}: fused basis determinant {abs(d):.3e}")
        coord = coord * d if j % 2 == 1 else coord / d
    return coord


def torsion_acyclic(C: BasedComplex, tol_rank: float = TOL_RANK,
                    tol_pivot: float = TOL_PIVOT) -> complex:
    """Torsion of an acyclic based complex (``det(A)`` for ``0 -> C^0 -A-> C^1 -> 0``)."""
    ranks = differential_ranks(C, tol_rank)
    full = (0, *ranks, 0)
    for j, k in enumerate(C.dims):
        if full[j] + full[j + 1] != k:
            raise NotAcyclic(f"H^{j} has dimension {k - full[j] - full[j + 1]}")
    empty = [np.zeros((k, 0), dtype=complex) for k in C.dims]
    return _fused_coordinate(C, empty, ranks, tol_pivot)


def phi_map(C: BasedComplex, H: CohomologyBasis, tol_rank: float = TOL_RANK,
            tol_pivot: float = TOL_PIVOT) -> DetLineElement:
    """Image of the standard element of ``Det(C)`` in ``Det(H)``, in the frame of ``H``."""
    if H.dims != C.dims:
        raise RankMismatch(f"cohomology basis dims {H.dims} do not match complex dims {C.dims}")
    ranks = differential_ranks(C, tol_rank)
    if ranks != H.differential_ranks:
        raise RankMismatch(f"differential ranks {ranks} vs basis {H.differential_ranks}")
    thr = TOL_COMPLEX * C.scale()
    for j, rep in enumerate(H.representatives):
        if j < C.top and rep.shape[1]:
            defect = float(np.linalg.norm(C.differentials[j] @ rep, 2))
            if defect > thr * max(1.0, float(np.linalg.norm(rep, 2))):
                raise RankMismatch(f"degree {j} representative is not a cocycle ({defect:.2e})")
    coord = _fused_coordinate(C, H.representatives, ranks, tol_pivot)
    return DetLineElement(coord, H.tag, H.grading())


def change_of_basis_scalar(H1: CohomologyBasis, H2: CohomologyBasis,
                           tol_pivot: float = TOL_PIVOT) -> complex:
    """``lam`` with (coordinate in ``H1``) = ``lam`` * (coordinate in ``H2``)."""
    if H1.ranks != H2.ranks or H1.dims != H2.dims:
        raise RankMismatch(f"ranks {H1.ranks} vs {H2.ranks}")
    lam = 1.0 + 0.0j
    for j, (a, b) in enumerate(zip(H1.representatives, H2.representatives)):
        h = a.shape[1]
        if h == 0:
            continue
        basis = np.hstack([a, H1.coboundaries[j]])
        sol, *_ = np.linalg.lstsq(basis, b, rcond=None)
        d = np.linalg.det(sol[:h])
        if abs(d) <= tol_pivot:
            raise SingularChange(f"degree {j}: change of basis is singular")
        lam = lam * d if j % 2 == 0 else lam / d
    return lam


def element_from_bases(bases: Sequence, tag: str = STANDARD_TAG, dual: bool = False,
                       cohomology: Sequence[int] | None = None) -> DetLineElement:
    """Element ``(x)_j (b_j)^{(-1)^j}`` for square basis matrices, against the standard frame."""
    coord = 1.0 + 0.0j
    dims = []
    for j, b in enumerate(bases):
        b = np.asarray(b, dtype=complex)
        dims.append(b.shape[0])
        if b.size == 0:
            continue
        d = np.linalg.det(b)
        coord = coord * d if j % 2 == 0 else coord / d
    coh = tuple(cohomology) if cohomology is not None else tuple(dims)
    return DetLineElement(coord, dual_tag(tag) if dual else tag, Grading(tuple(dims), coh, dual))


def dual_pairing(e: DetLineElement, f: DetLineElement) -> complex:
    """Canonical bilinear pairing between a determinant line and its dual."""
    if e.grading.dims != f.grading.dims or e.grading.cohomology != f.grading.cohomology:
        raise GradingMismatch(f"gradings {e.grading} and {f.grading} are not dual")
    if e.grading.dual == f.grading.dual:
        raise GradingMismatch("both elements live on the same side of the pairing")
    if dual_tag(e.basis_tag) != f.basis_tag:
        raise GradingMismatch(f"frames {e.basis_tag!r} and {f.basis_tag!r} are not dual")
    return e.coordinate * f.coordinate


def standard_element(C: BasedComplex) -> DetLineElement:
    return DetLineElement(1.0 + 0.0j, STANDARD_TAG, Grading(C.dims, C.dims))
