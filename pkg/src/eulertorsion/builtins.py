"""Built-in CW presentations: S^1 (two cell structures), T^3 and lens spaces L(p;q), p <= 7.

Lift conventions.  Cochains are twisted by left multiplication: the block of
``d_j`` from cell ``b`` to cell ``a`` is ``sum coeff * alpha(word)`` and the word
records which translate of the lift of ``b`` lies in the boundary of the lift
of ``a``.  For every built-in the lift of the base 0-cell is the origin of the
universal cover and the remaining lifts are the cells of the standard
fundamental domain, so the "straight" spider (all legs empty) is the natural
one.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from math import gcd

import numpy as np

from .document import TwistedComplexDocument
from .duality import adjoint_presentation
from .euler import Spider
from .metrics import HermitianMetricAssignment
from .twisted import AnalyticFamily, GroupWord, Representation, TwistedComplexPresentation

E = GroupWord()


def _t(k: int, g: int = 0) -> GroupWord:
    return GroupWord.power(g, k)


def circle() -> TwistedComplexPresentation:
    """One vertex ``v`` and one edge from ``v`` to ``t.v``: ``d_0 = t - 1``."""
    return TwistedComplexPresentation(
        "S1", (1, 1), ("t",), (((((1, _t(1)), (-1, E)),),),),
        abelianization=((1,),), torsion_orders=(0,), sampler="free",
        provenance="minimal CW structure of the circle")


def circle_split() -> TwistedComplexPresentation:
    """Two vertices ``v0, v1``; ``e0: v0 -> v1`` and ``e1: v1 -> t.v0``."""
    d0 = (
        (((-1, E),), ((1, E),)),
        (((1, _t(1)),), ((-1, E),)),
    )
    return TwistedComplexPresentation(
        "S1b", (2, 2), ("t",), (d0,),
        abelianization=((1,),), torsion_orders=(0,), sampler="free",
        provenance="circle subdivided into two vertices and two edges")


def torus3() -> TwistedComplexPresentation:
    """Product cell structure of ``T^3``: cells are subsets of ``{1, 2, 3}`` (Koszul complex)."""
    subsets = [list(itertools.combinations(range(3), k)) for k in range(4)]
    blocks = []
    for k in range(3):
        block = []
        for target in subsets[k + 1]:
            row = []
            for source in subsets[k]:
                extra = set(target) - set(source)
                if len(extra) == 1 and set(source) < set(target):
                    i = extra.pop()
                    s = (-1) ** sum(1 for j in source if j < i)
                    row.append(((s, _t(1, i)), (-s, E)))
                else:
                    row.append(())
            block.append(tuple(row))
        blocks.append(tuple(block))
    comm = [GroupWord(((i, 1), (j, 1), (i, -1), (j, -1))) for i, j in itertools.combinations(range(3), 2)]
    return TwistedComplexPresentation(
        "T3", (1, 3, 3, 1), ("t1", "t2", "t3"), tuple(blocks), tuple(comm),
        ((1, 0, 0), (0, 1, 0), (0, 0, 1)), (0, 0, 0), 0, "abelian",
        "product of three circles; cells indexed by subsets of {1,2,3}")


def lens(p: int, q: int) -> TwistedComplexPresentation:
    """``L(p;q)`` with one cell per dimension: ``d = (t - 1, 1 + t + ... + t^{p-1}, t^q - 1)``."""
    if p < 2 or not 0 < q < p or gcd(p, q) != 1:
        raise ValueError(f"L({p};{q}) needs p >= 2, 0 < q < p and gcd(p, q) = 1")
    norm = tuple((1, _t(i)) for i in range(p))
    blocks = (
        ((((1, _t(1)), (-1, E)),),),
        ((norm,),),
        ((((1, _t(q)), (-1, E)),),),
    )
    return TwistedComplexPresentation(
        f"L({p};{q})", (1, 1, 1, 1), ("t",), blocks, (_t(p),), ((1,),), (p,), 0, f"cyclic:{p}",
        f"lens space L({p};{q}), genus-one Heegaard cell structure")


def _doc(P: TwistedComplexPresentation) -> TwistedComplexDocument:
    doc = TwistedComplexDocument(P)
    doc.spiders["straight"] = Spider.straight(P)
    doc.representations["trivial"] = Representation.trivial(P.ngens)
    _, doc.duality = adjoint_presentation(P)
    return doc


@lru_cache(maxsize=None)
def _build(name: str) -> TwistedComplexDocument:
    if name == "S1":
        doc = _doc(circle())
        doc.spiders["shifted"] = Spider.straight(doc.presentation).with_leg((0, 0), _t(1))
        doc.families["circle"] = AnalyticFamily.scalar("circle", [[1]], "unit circle")
        doc.families["diag"] = AnalyticFamily(
            "diag", 2, (((((1 + 0j, (1, 0)),), ()), ((), ((1 + 0j, (0, 1)),))),), "torus |z1| = |z2| = 1")
        doc.representations["z2"] = Representation([[[2.0]]])
        doc.metrics["bumped"] = HermitianMetricAssignment(1, {(0, 0): [[1.0]], (1, 0): [[np.e ** 2]]})
    elif name == "S1b":
        doc = _doc(circle_split())
        doc.families["circle"] = AnalyticFamily.scalar("circle", [[1]], "unit circle")
        doc.representations["z2"] = Representation([[[2.0]]])
    elif name == "T3":
        doc = _doc(torus3())
        doc.families["torus"] = AnalyticFamily.scalar("torus", [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
                                                      "unit torus")
        doc.representations["generic"] = Representation([[[2.0]], [[3j]], [[0.5]]])
    elif name.startswith("L("):
        p, q = (int(x) for x in name[2:-1].split(";"))
        doc = _doc(lens(p, q))
        doc.representations["zeta"] = Representation([[[np.exp(2j * np.pi / p)]]])
    else:
        raise KeyError(name)
    return doc


def builtin_names() -> list[str]:
    names = ["S1", "S1b", "T3"]
    for p in range(2, 8):
        names.extend(f"L({p};{q})" for q in range(1, p) if gcd(p, q) == 1)
    return names


def builtin(name: str) -> TwistedComplexDocument:
    """A fresh copy of the named built-in document."""
    if name not in builtin_names():
        raise KeyError(f"unknown built-in {name!r}")
    doc = _build(name)
    return TwistedComplexDocument(doc.presentation, dict(doc.spiders), dict(doc.metrics),
                                  dict(doc.families), dict(doc.representations), doc.duality)


def listing(pattern: str = "") -> list[dict]:
    out = []
    for n in builtin_names():
        if pattern.lower() not in n.lower():
            continue
        P = builtin(n).presentation
        out.append({"name": n, "dimension": P.top, "cells": list(P.cell_counts),
                    "euler_characteristic": P.euler_characteristic, "provenance": P.provenance})
    return out
