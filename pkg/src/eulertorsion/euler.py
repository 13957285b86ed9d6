"""Euler structures as Turaev spiders and the action of ``H_1``."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import BaseMismatch, InputError, NoDualData, UnrepresentableClass
from .twisted import Cell, GroupWord, TwistedComplexPresentation, abelianize


@dataclass(frozen=True)
class HomologyClass:
    """Element of ``H_1`` in presentation coordinates.

    ``orders[i] == 0`` marks a free coordinate; otherwise the coordinate is a
    residue modulo ``orders[i]``.
    """

    coords: tuple[int, ...]
    orders: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != len(self.orders):
            raise ValueError("coords and orders differ in length")
        norm = tuple(int(c) % o if o else int(c) for c, o in zip(self.coords, self.orders))
        object.__setattr__(self, "coords", norm)

    @classmethod
    def zero(cls, P: TwistedComplexPresentation) -> "HomologyClass":
        return cls((0,) * P.h1_rank, tuple(P.torsion_orders))

    @classmethod
    def of(cls, P: TwistedComplexPresentation, coords) -> "HomologyClass":
        coords = tuple(int(c) for c in coords)
        if len(coords) != P.h1_rank:
            raise InputError(f"{P.name}: H_1 has {P.h1_rank} coordinates, got {len(coords)}")
        return cls(coords, tuple(P.torsion_orders))

    def _check(self, other: "HomologyClass") -> None:
        if self.orders != other.orders:
            raise ValueError("homology classes of different groups")

    def __add__(self, other: "HomologyClass") -> "HomologyClass":
        self._check(other)
        return HomologyClass(tuple(a + b for a, b in zip(self.coords, other.coords)), self.orders)

    def __neg__(self) -> "HomologyClass":
        return HomologyClass(tuple(-a for a in self.coords), self.orders)

    def __sub__(self, other: "HomologyClass") -> "HomologyClass":
        return self + (-other)

    def is_zero(self) -> bool:
        return not any(self.coords)


def sign(cell: Cell) -> int:
    return -1 if cell[0] % 2 else 1


@dataclass(frozen=True)
class Spider:
    """Base 0-cell plus one path word per cell; the leg of ``x`` carries sign ``(-1)**dim x``."""

    base: Cell
    legs: tuple[tuple[Cell, GroupWord], ...]

    def __init__(self, base: Cell, legs: Mapping[Cell, GroupWord]):
        object.__setattr__(self, "base", tuple(base))
        object.__setattr__(self, "legs", tuple(sorted((tuple(c), w) for c, w in legs.items())))

    @classmethod
    def straight(cls, P: TwistedComplexPresentation) -> "Spider":
        return cls(P.base, {c: GroupWord() for c in P.cells()})

    def leg(self, cell: Cell) -> GroupWord:
        for c, w in self.legs:
            if c == tuple(cell):
                return w
        raise KeyError(f"spider has no leg at cell {cell}")

    def leg_map(self) -> dict[Cell, GroupWord]:
        return dict(self.legs)

    def with_leg(self, cell: Cell, word: GroupWord) -> "Spider":
        legs = self.leg_map()
        legs[tuple(cell)] = word
        return Spider(self.base, legs)

    def validate(self, P: TwistedComplexPresentation) -> None:
        cells = set(P.cells())
        have = {c for c, _ in self.legs}
        if have != cells:
            missing = sorted(cells - have)
            extra = sorted(have - cells)
            raise InputError(f"spider legs do not match cells (missing {missing}, extra {extra})", "/legs")
        if self.base[0] != 0 or self.base not in cells:
            raise InputError("spider base must be a 0-cell", "/base_cell")
        for _, w in self.legs:
            P._check_word(w, "/legs")

    def chain(self, P: TwistedComplexPresentation) -> HomologyClass:
        """Abelianized 1-chain ``c = sum (-1)**dim x * gamma_x`` (a class once legs are closed up)."""
        total = HomologyClass.zero(P)
        for c, w in self.legs:
            part = HomologyClass.of(P, abelianize(w, P))
            total = total + part if sign(c) > 0 else total - part
        return total

    def chain_boundary(self) -> dict[Cell, int]:
        """Boundary of ``c`` as a 0-chain: each leg contributes ``(-1)**dim x * (x - x_*)``."""
        out: dict[Cell, int] = {}
        for c, _ in self.legs:
            s = sign(c)
            out[c] = out.get(c, 0) + s
            out[self.base] = out.get(self.base, 0) - s
        return {k: v for k, v in out.items() if v}


def representative_word(h: HomologyClass, P: TwistedComplexPresentation) -> GroupWord:
    """A loop word at the base point with abelianized class ``h``."""
    A = np.array(P.abelianization, dtype=np.int64).reshape(P.h1_rank, P.ngens)
    powers = []
    for i, k in enumerate(h.coords):
        if k == 0:
            continue
        gens = [g for g in range(P.ngens)
                if A[i, g] == 1 and not np.any(np.delete(A[:, g], i))]
        if not gens:
            raise UnrepresentableClass(f"{P.name}: no generator represents H_1 coordinate {i}")
        powers.append((gens[0], k))
    return GroupWord.from_powers(powers)


def act(h: HomologyClass, eps: Spider, P: TwistedComplexPresentation) -> Spider:
    """``h . eps``: the base leg is pre-composed with a loop representing ``h``."""
    if h.is_zero():
        return eps
    loop = representative_word(h, P)
    return eps.with_leg(eps.base, loop * eps.leg(eps.base))


def chain_class(eps1: Spider, eps2: Spider, P: TwistedComplexPresentation) -> HomologyClass:
    """The unique ``h`` with ``eps1 = h . eps2``."""
    if eps1.base != eps2.base:
        raise BaseMismatch(f"spiders based at {eps1.base} and {eps2.base}")
    total = HomologyClass.zero(P)
    legs2 = eps2.leg_map()
    for c, w in eps1.legs:
        if c not in legs2:
            raise InputError(f"second spider has no leg at {c}")
        part = HomologyClass.of(P, abelianize(w * legs2[c].inverse(), P))
        total = total + part if sign(c) > 0 else total - part
    return total


def dual_spider(eps: Spider, correspondence: Mapping[Cell, Cell] | None,
                dual_base: Cell | None = None) -> Spider:
    """Spider for the dual cell structure: legs inverted and moved to the dual cells."""
    if not correspondence:
        raise NoDualData("no dual-cell correspondence available")
    legs = {}
    for c, w in eps.legs:
        if c not in correspondence:
            raise NoDualData(f"cell {c} has no dual cell")
        legs[tuple(correspondence[c])] = w.inverse()
    base = dual_base
    if base is None:
        zero_cells = sorted(c for c in legs if c[0] == 0)
        base = zero_cells[0]
    return Spider(base, legs)


def characteristic_class_candidate(eps: Spider, eps_dual: Spider,
                                   P: TwistedComplexPresentation) -> HomologyClass:
    """Abelianized ``c_eps - c_{eps*}``; the two spiders may live on dual presentations."""
    return eps.chain(P) - eps_dual.chain(P)
