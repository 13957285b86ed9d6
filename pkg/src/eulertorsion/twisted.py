"""Twisted cochain complexes ``C(K, alpha)`` of CW presentations."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .detline import (
    TOL_COMPLEX,
    TOL_PIVOT,
    TOL_RANK,
    BasedComplex,
    CohomologyBasis,
    DetLineElement,
    cohomology,
    phi_map,
)
from .errors import ComplexViolation, InputError, RelatorViolation, SingularGenerator

TOL_RELATOR = 1e-8

Cell = tuple[int, int]  # (dimension, index within that dimension)


@dataclass(frozen=True)
class GroupWord:
    """A word in the generators; each letter is ``(generator, +1 | -1)``."""

    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        for g, e in self.letters:
            if e not in (1, -1):
                raise ValueError(f"letter exponent must be +-1, got {e}")

    @classmethod
    def from_powers(cls, powers: Iterable[tuple[int, int]]) -> "GroupWord":
        letters = []
        for g, k in powers:
            letters.extend([(int(g), 1 if k > 0 else -1)] * abs(int(k)))
        return cls(tuple(letters))

    @classmethod
    def power(cls, g: int, k: int) -> "GroupWord":
        return cls.from_powers([(g, k)])

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        return GroupWord(self.letters + other.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def inverse(self) -> "GroupWord":
        return GroupWord(tuple((g, -e) for g, e in reversed(self.letters)))

    def reduced(self) -> "GroupWord":
        out: list[tuple[int, int]] = []
        for g, e in self.letters:
            if out and out[-1] == (g, -e):
                out.pop()
            else:
                out.append((g, e))
        return GroupWord(tuple(out))

    def exponent_sums(self, ngens: int) -> np.ndarray:
        v = np.zeros(ngens, dtype=np.int64)
        for g, e in self.letters:
            v[g] += e
        return v

    def to_json(self) -> list:
        return [[g, e] for g, e in self.letters]


IDENTITY_WORD = GroupWord()

Entry = tuple[tuple[int, GroupWord], ...]


@dataclass(frozen=True)
class TwistedComplexPresentation:
    """Cells per dimension and boundary entries in the group ring.

    ``boundaries[j][a][b]`` is the formal sum ``((coeff, word), ...)`` giving the
    block of ``d_j`` from cell ``(j, b)`` to cell ``(j+1, a)``.  The lift of every
    cell is implicit in these words.
    """

    name: str
    cell_counts: tuple[int, ...]
    generators: tuple[str, ...]
    boundaries: tuple[tuple[tuple[Entry, ...], ...], ...]
    relators: tuple[GroupWord, ...] = ()
    abelianization: tuple[tuple[int, ...], ...] = ()
    torsion_orders: tuple[int, ...] = ()
    base_cell: int = 0
    sampler: str = "free"
    provenance: str = ""

    def __post_init__(self):
        m = len(self.cell_counts) - 1
        if m < 0:
            raise InputError("presentation has no cells", "/cells")
        if len(self.boundaries) != m:
            raise InputError(f"expected {m} boundary blocks, got {len(self.boundaries)}", "/boundaries")
        ngens = len(self.generators)
        for j, block in enumerate(self.boundaries):
            if len(block) != self.cell_counts[j + 1]:
                raise InputError(f"degree {j}: expected {self.cell_counts[j + 1]} rows", f"/boundaries/{j}")
            for a, row in enumerate(block):
                if len(row) != self.cell_counts[j]:
                    raise InputError(f"expected {self.cell_counts[j]} columns", f"/boundaries/{j}/{a}")
                for b, entry in enumerate(row):
                    for t, (_, w) in enumerate(entry):
                        self._check_word(w, f"/boundaries/{j}/{a}/{b}/{t}")
        for i, w in enumerate(self.relators):
            self._check_word(w, f"/relators/{i}")
        if self.abelianization:
            if any(len(row) != ngens for row in self.abelianization):
                raise InputError("abelianization must have one column per generator", "/abelianization/matrix")
            if len(self.torsion_orders) != len(self.abelianization):
                raise InputError("need one torsion order per H1 coordinate", "/abelianization/torsion_orders")
        if not self.cell_counts[0] or not 0 <= self.base_cell < self.cell_counts[0]:
            raise InputError("base cell must index a 0-cell", "/base_cell")

    def _check_word(self, w: GroupWord, pointer: str) -> None:
        for g, _ in w.letters:
            if not 0 <= g < len(self.generators):
                raise InputError(f"generator index {g} out of range", pointer)

    @property
    def top(self) -> int:
        return len(self.cell_counts) - 1

    @property
    def ngens(self) -> int:
        return len(self.generators)

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** j * k for j, k in enumerate(self.cell_counts))

    @property
    def h1_rank(self) -> int:
        return len(self.abelianization)

    def cells(self) -> list[Cell]:
        return [(d, i) for d, k in enumerate(self.cell_counts) for i in range(k)]

    @property
    def base(self) -> Cell:
        return (0, self.base_cell)

    def permuted(self, dim: int, perm: Sequence[int]) -> "TwistedComplexPresentation":
        """Same complex with the cells of dimension ``dim`` reordered (new cell i = old perm[i])."""
        blocks = [list(map(list, b)) for b in self.boundaries]
        if dim < self.top:
            blocks[dim] = [[row[p] for p in perm] for row in blocks[dim]]
        if dim > 0:
            blocks[dim - 1] = [blocks[dim - 1][p] for p in perm]
        base = self.base_cell if dim else list(perm).index(self.base_cell)
        return TwistedComplexPresentation(
            self.name, self.cell_counts, self.generators,
            tuple(tuple(tuple(r) for r in b) for b in blocks),
            self.relators, self.abelianization, self.torsion_orders, base, self.sampler,
            self.provenance)


@dataclass(frozen=True)
class Representation:
    """One invertible ``n x n`` complex matrix per generator."""

    matrices: tuple[np.ndarray, ...]
    tol_relator: float = TOL_RELATOR
    _inverses: tuple[np.ndarray, ...] = field(default=(), repr=False, compare=False)

    def __init__(self, matrices: Sequence, tol_relator: float = TOL_RELATOR):
        mats = []
        for i, m in enumerate(matrices):
            a = np.atleast_2d(np.array(m, dtype=complex))
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise InputError(f"generator {i}: matrix must be square", f"/matrices/{i}")
            a.setflags(write=False)
            mats.append(a)
        if mats and len({a.shape for a in mats}) != 1:
            raise InputError("all generator matrices must have the same size", "/matrices")
        invs = []
        for i, a in enumerate(mats):
            if abs(np.linalg.det(a)) <= TOL_PIVOT:
                raise SingularGenerator(f"generator {i} is singular")
            inv = np.linalg.inv(a)
            inv.setflags(write=False)
            invs.append(inv)
        object.__setattr__(self, "matrices", tuple(mats))
        object.__setattr__(self, "tol_relator", tol_relator)
        object.__setattr__(self, "_inverses", tuple(invs))

    @property
    def rank(self) -> int:
        return self.matrices[0].shape[0] if self.matrices else 1

    def letter(self, g: int, e: int) -> np.ndarray:
        return self.matrices[g] if e > 0 else self._inverses[g]

    def direct_sum(self, other: "Representation") -> "Representation":
        out = []
        for a, b in zip(self.matrices, other.matrices):
            m = np.zeros((a.shape[0] + b.shape[0],) * 2, dtype=complex)
            m[: a.shape[0], : a.shape[0]] = a
            m[a.shape[0]:, a.shape[0]:] = b
            out.append(m)
        return Representation(out, self.tol_relator)

    def is_unitary(self, tol: float = 1e-12) -> bool:
        return all(np.allclose(a.conj().T @ a, np.eye(a.shape[0]), atol=tol) for a in self.matrices)

    def validate(self, P: TwistedComplexPresentation) -> None:
        if len(self.matrices) != P.ngens:
            raise InputError(f"{P.name} has {P.ngens} generators, representation has {len(self.matrices)}")
        eye = np.eye(self.rank)
        for i, w in enumerate(P.relators):
            gap = float(np.linalg.norm(evaluate_word(w, self) - eye, 2))
            if gap > self.tol_relator:
                raise RelatorViolation(f"relator {i} evaluates {gap:.2e} away from the identity")

    @classmethod
    def trivial(cls, ngens: int, rank: int = 1) -> "Representation":
        return cls([np.eye(rank)] * ngens)


def evaluate_word(w: GroupWord, alpha: Representation) -> np.ndarray:
    """Ordered product of generator matrices (inverses for negative letters)."""
    n = alpha.rank
    out = np.eye(n, dtype=complex)
    for g, e in w.letters:
        if not 0 <= g < len(alpha.matrices):
            raise InputError(f"generator index {g} out of range")
        out = out @ alpha.letter(g, e)
    return out


Monomial = tuple[complex, tuple[int, ...]]


@dataclass(frozen=True)
class AnalyticFamily:
    """Representations with polynomial entries in chart variables ``z_1..z_r``.

    ``entries[g][a][b]`` is a tuple of monomials ``(coeff, exponents)``.
    """

    name: str
    variables: int
    entries: tuple[tuple[tuple[tuple[Monomial, ...], ...], ...], ...]
    real_locus: str | None = None

    @property
    def rank(self) -> int:
        return len(self.entries[0]) if self.entries else 1

    def evaluate(self, point: Sequence[complex]) -> Representation:
        z = np.asarray(point, dtype=complex).reshape(-1)
        if z.size != self.variables:
            raise InputError(f"family {self.name} takes {self.variables} variables, got {z.size}")
        mats = []
        for gen in self.entries:
            m = np.zeros((len(gen), len(gen)), dtype=complex)
            for a, row in enumerate(gen):
                for b, poly in enumerate(row):
                    m[a, b] = sum(c * np.prod(z ** np.asarray(ex)) for c, ex in poly) if poly else 0
            mats.append(m)
        return Representation(mats)

    @classmethod
    def scalar(cls, name: str, exponents: Sequence[Sequence[int]],
               real_locus: str | None = None) -> "AnalyticFamily":
        """Rank-one family sending generator ``g`` to the monomial ``z ** exponents[g]``."""
        r = len(exponents[0]) if exponents else 0
        entries = tuple(((((1.0 + 0j, tuple(ex)),),),) for ex in exponents)
        return cls(name, r, entries, real_locus)


def assemble_boundary(P: TwistedComplexPresentation, alpha: Representation,
                      tol: float = TOL_COMPLEX, check: bool = True) -> BasedComplex:
    """Block matrices ``d_j(alpha)`` with block ``(a, b)`` equal to ``sum coeff * alpha(word)``."""
    n = alpha.rank
    cache: dict[GroupWord, np.ndarray] = {}

    def ev(w: GroupWord) -> np.ndarray:
        if w not in cache:
            cache[w] = evaluate_word(w, alpha)
        return cache[w]

    diffs = []
    for j, block in enumerate(P.boundaries):
        d = np.zeros((n * P.cell_counts[j + 1], n * P.cell_counts[j]), dtype=complex)
        for a, row in enumerate(block):
            for b, entry in enumerate(row):
                if entry:
                    d[a * n:(a + 1) * n, b * n:(b + 1) * n] = sum(c * ev(w) for c, w in entry)
        diffs.append(d)
    C = BasedComplex([n * k for k in P.cell_counts], diffs)
    if check:
        bound = tol * (1.0 + max(1.0, max((np.linalg.norm(d, 2) for d in diffs if d.size), default=1.0)) ** 2)
        defect = C.composite_defect()
        if defect > bound:
            raise ComplexViolation(f"{P.name}: |dd| = {defect:.3e} exceeds {bound:.3e}")
    return C


@dataclass(frozen=True)
class TwistedData:
    complex: BasedComplex
    basis: CohomologyBasis
    sigma: DetLineElement


def twisted_data(P: TwistedComplexPresentation, alpha: Representation,
                 tol_rank: float = TOL_RANK) -> TwistedData:
    C = assemble_boundary(P, alpha)
    H = cohomology(C, tol_rank)
    return TwistedData(C, H, phi_map(C, H, tol_rank))


def sigma_section(P: TwistedComplexPresentation, alpha: Representation,
                  tol_rank: float = TOL_RANK) -> DetLineElement:
    """``phi`` applied to the standard element of ``Det C(K, alpha)``."""
    return twisted_data(P, alpha, tol_rank).sigma


def abelianize(w: GroupWord, P: TwistedComplexPresentation) -> tuple[int, ...]:
    """Image of ``w`` in ``H_1`` coordinates, finite coordinates reduced mod their order."""
    sums = w.exponent_sums(P.ngens)
    A = np.array(P.abelianization, dtype=np.int64).reshape(P.h1_rank, P.ngens)
    v = A @ sums
    return tuple(int(x % o) if o else int(x) for x, o in zip(v, P.torsion_orders))


def _random_invertible(rng: np.random.Generator, n: int, unitary: bool) -> np.ndarray:
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    if unitary:
        q, r = np.linalg.qr(g)
        return q * (np.diag(r) / np.abs(np.diag(r)))
    return g / np.sqrt(n) + np.eye(n)


def _random_eigenvalues(rng: np.random.Generator, n: int, unitary: bool) -> np.ndarray:
    phases = np.exp(2j * np.pi * rng.random(n))
    if unitary:
        return phases
    return phases * np.exp(rng.uniform(np.log(0.5), np.log(2.0), n))


def random_representation(P: TwistedComplexPresentation, rank: int, rng: np.random.Generator,
                          unitary: bool = False, max_tries: int = 100) -> Representation:
    """Draw a random representation adapted to the presentation's group.

    ``sampler`` is ``free`` (no relators), ``abelian`` (commuting generators,
    simultaneously diagonalizable) or ``cyclic:p`` (single generator of order p).
    Every draw is validated against the relators.
    """
    kind, _, arg = P.sampler.partition(":")
    for _ in range(max_tries):
        if kind == "free":
            mats = [_random_invertible(rng, rank, unitary) for _ in range(P.ngens)]
        elif kind == "abelian":
            Q = _random_invertible(rng, rank, unitary)
            Qi = np.linalg.inv(Q)
            mats = [Q @ np.diag(_random_eigenvalues(rng, rank, unitary)) @ Qi for _ in range(P.ngens)]
        elif kind == "cyclic":
            p = int(arg)
            Q = _random_invertible(rng, rank, unitary)
            ks = rng.integers(0, p, size=rank)
            mats = [Q @ np.diag(np.exp(2j * np.pi * ks / p)) @ np.linalg.inv(Q)]
        else:
            raise InputError(f"unknown sampler {P.sampler!r}", "/sampler")
        try:
            alpha = Representation(mats)
            alpha.validate(P)
            return alpha
        except (RelatorViolation, SingularGenerator):
            continue
    raise RelatorViolation(f"could not sample a representation of {P.name} in {max_tries} tries")
