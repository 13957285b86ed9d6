import itertools

import numpy as np
import pytest

from eulertorsion.builtins import builtin, builtin_names
from eulertorsion.errors import BaseMismatch, InputError, NoDualData, UnrepresentableClass
from eulertorsion.euler import (
    HomologyClass,
    Spider,
    act,
    chain_class,
    characteristic_class_candidate,
    dual_spider,
    representative_word,
    sign,
)
from eulertorsion.twisted import GroupWord, TwistedComplexPresentation

S1 = builtin("S1").presentation
T3 = builtin("T3").presentation
L52 = builtin("L(5;2)").presentation


def box(P, radius=3):
    ranges = [range(o) if o else range(-radius, radius + 1) for o in P.torsion_orders]
    return [HomologyClass.of(P, c) for c in itertools.product(*ranges)]


def test_act_zero_is_identity():
    eps = Spider.straight(T3)
    assert act(HomologyClass.zero(T3), eps, T3) is eps


def test_circle_generator_shifts_class_by_one():
    eps = Spider.straight(S1)
    h = HomologyClass.of(S1, [1])
    moved = act(h, eps, S1)
    assert moved.leg(S1.base) == GroupWord(((0, 1),))
    assert chain_class(moved, eps, S1).coords == (1,)


def test_one_cell_leg_shift_has_opposite_sign():
    # a leg at an odd cell enters the chain with sign -1
    eps = Spider.straight(S1)
    moved = eps.with_leg((1, 0), GroupWord(((0, 1),)))
    assert chain_class(moved, eps, S1).coords == (-1,)


def test_action_is_additive_on_torus():
    rng = np.random.default_rng(0)
    eps = Spider.straight(T3)
    for _ in range(25):
        h1 = HomologyClass.of(T3, rng.integers(-3, 4, size=3))
        h2 = HomologyClass.of(T3, rng.integers(-3, 4, size=3))
        two_step = act(h1, act(h2, eps, T3), T3)
        one_step = act(h1 + h2, eps, T3)
        assert chain_class(two_step, one_step, T3).is_zero()
        assert chain_class(two_step, eps, T3) == h1 + h2


@pytest.mark.parametrize("name", builtin_names())
def test_chain_class_round_trip_over_box(name):
    P = builtin(name).presentation
    eps = builtin(name).spider(None)
    for h in box(P, 3 if P.h1_rank < 3 else 2):
        assert chain_class(act(h, eps, P), eps, P) == h


def test_chain_class_of_equal_spiders_is_zero():
    eps = Spider.straight(T3)
    assert chain_class(eps, eps, T3).is_zero()


def test_hand_built_torus_spiders_exponent_sums():
    t1, t2, t3 = (GroupWord(((g, 1),)) for g in range(3))
    legs1 = {c: GroupWord() for c in T3.cells()}
    legs2 = dict(legs1)
    legs1[(0, 0)] = t1 * t1 * t2.inverse()
    legs1[(1, 2)] = t3
    legs2[(2, 0)] = t2 * t3
    legs2[(3, 0)] = t1.inverse()
    e1, e2 = Spider((0, 0), legs1), Spider((0, 0), legs2)
    # exponent sums of sum_x (-1)^dim x (gamma1_x - gamma2_x)
    expected = np.zeros(3, dtype=int)
    for c in T3.cells():
        diff = legs1[c].exponent_sums(3) - legs2[c].exponent_sums(3)
        expected += sign(c) * diff
    assert list(chain_class(e1, e2, T3).coords) == list(expected)
    assert list(expected) == [2 - 1, -1 - 1, -1 - 1]


def test_torsion_coordinates_wrap():
    eps = Spider.straight(L52)
    h = HomologyClass.of(L52, [7])
    assert h.coords == (2,)
    assert chain_class(act(h, eps, L52), eps, L52).coords == (2,)


def test_base_mismatch():
    P = builtin("S1b").presentation
    a = Spider.straight(P)
    b = Spider((0, 1), a.leg_map())
    with pytest.raises(BaseMismatch):
        chain_class(a, b, P)


def test_unrepresentable_class():
    P = TwistedComplexPresentation("twisted-ab", (1, 1), ("t",),
                                   (((((1, GroupWord(((0, 1),))), (-1, GroupWord())),),),),
                                   abelianization=((2,),), torsion_orders=(0,))
    with pytest.raises(UnrepresentableClass):
        representative_word(HomologyClass.of(P, [1]), P)


def test_spider_validation():
    eps = Spider((0, 0), {(0, 0): GroupWord()})
    with pytest.raises(InputError):
        eps.validate(S1)


def test_chain_boundary_when_euler_characteristic_vanishes():
    for name in ("S1", "S1b", "T3", "L(7;3)"):
        P = builtin(name).presentation
        eps = Spider.straight(P)
        # the base picks up -chi(P) * x_*, which vanishes here
        assert eps.chain_boundary() == {c: sign(c) for c in P.cells()}


def test_dual_spider_on_circle_swaps_and_inverts():
    doc = builtin("S1")
    eps = doc.spiders["shifted"].with_leg((1, 0), GroupWord(((0, -1),)))
    table = doc.duality.table()
    assert table == {(0, 0): (1, 0), (1, 0): (0, 0)}
    dual = dual_spider(eps, table, doc.duality.dual_base)
    assert dual.leg((1, 0)) == GroupWord(((0, -1),))
    assert dual.leg((0, 0)) == GroupWord(((0, 1),))


@pytest.mark.parametrize("name", ["S1", "T3", "L(5;1)"])
def test_dual_spider_involution(name):
    doc = builtin(name)
    P, D = doc.presentation, doc.duality
    rng = np.random.default_rng(1)
    legs = {c: GroupWord(tuple((int(rng.integers(P.ngens)), int(rng.choice([-1, 1])))
                               for _ in range(3))) for c in P.cells()}
    eps = Spider(P.base, legs)
    once = dual_spider(eps, D.table(), D.dual_base)
    back = D.reversed(P)
    twice = dual_spider(once, back.table(), back.dual_base)
    assert chain_class(twice, eps, P).is_zero()


def test_dual_spider_needs_data():
    with pytest.raises(NoDualData):
        dual_spider(Spider.straight(S1), None)


def test_characteristic_candidate_reported():
    doc = builtin("S1")
    eps = doc.spider(None)
    dual = dual_spider(eps, doc.duality.table(), doc.duality.dual_base)
    assert characteristic_class_candidate(eps, dual, doc.presentation).coords == (0,)
