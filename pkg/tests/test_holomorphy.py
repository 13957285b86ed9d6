import numpy as np
import pytest

from eulertorsion.builtins import builtin
from eulertorsion.errors import InputError, SignDiscontinuity, ZeroDenominator
from eulertorsion.euler import HomologyClass, act
from eulertorsion.holomorphy import (
    annulus_grid,
    box_grid,
    cr_residual,
    cr_tol,
    diagonal_grid,
    evaluate_on_grid,
    parse_grid,
    ratio_function,
)
from eulertorsion.twisted import AnalyticFamily

S1 = builtin("S1")


def circle_ratio(spider="shifted", kind="ratio"):
    return ratio_function(S1.presentation, S1.families["circle"], S1.spider(spider), kind)


def test_square_is_holomorphic():
    grid = box_grid(-1, 1, -1, 1, 9)
    rep = cr_residual(lambda z: z[0] ** 2, grid, 1e-3, resolve_sign=False)
    assert rep.max_residual <= 1e-6
    assert rep.passed and rep.verdict == "PASS"


def test_conjugate_residual_is_one():
    grid = box_grid(-1, 1, -1, 1, 9)
    rep = cr_residual(lambda z: np.conj(z[0]), grid, 1e-3, resolve_sign=False)
    # normalized by max(1, |f|), so points with |z| > 1 sit below 1
    assert rep.median_residual == pytest.approx(1.0, abs=0.3)
    assert rep.max_residual == pytest.approx(1.0, abs=1e-9)
    assert not rep.passed


def test_residuals_nonnegative_and_verdict_matches():
    grid = annulus_grid(0.5, 2.0, 7)
    rep = cr_residual(circle_ratio(), grid, 1e-3)
    assert np.all(rep.residuals >= 0)
    assert rep.passed == (rep.max_residual <= cr_tol(1e-3))


def test_circle_ratio_finite_and_smooth():
    grid = annulus_grid(0.5, 2.0, 21)
    vals = evaluate_on_grid(circle_ratio(), grid)
    z = grid.points[..., 0]
    ok = grid.mask
    assert np.all(np.isfinite(vals[ok]))
    # shifted spider: ratio is z up to a global sign
    s = vals[ok] / z[ok]
    assert np.allclose(np.abs(s), 1.0) and np.allclose(s, s[0])


def test_circle_ratio_cr_residual_acceptance_grid():
    rep = cr_residual(circle_ratio(), annulus_grid(0.5, 2.0, 21), 1e-3, 1e-6)
    assert rep.max_residual <= 1e-6
    assert rep.residuals.shape[0] == int(annulus_grid(0.5, 2.0, 21).mask.sum())


def test_exclusion_mask_removes_points_near_one():
    grid = annulus_grid(0.5, 2.0, 21)
    z = grid.points[..., 0]
    assert np.all(np.abs(z[grid.mask] - 1) >= 0.1)
    assert not grid.mask.all()


def test_constant_family_constant_ratio():
    fam = AnalyticFamily("const", 1, (((((2.0 + 0j, (0,)),),),),))
    f = ratio_function(S1.presentation, fam, S1.spider("shifted"), "torsion")
    vals = evaluate_on_grid(f, annulus_grid(0.5, 2.0, 5))
    # shifted spider at alpha = 2: det(alpha) * (2 - 1)
    assert np.allclose(vals[~np.isnan(vals)], 2.0)


def test_diagonal_family_factors():
    P = S1.presentation
    f2 = ratio_function(P, S1.families["diag"], S1.spider(None), "torsion")
    f1 = ratio_function(P, S1.families["circle"], S1.spider(None), "torsion")
    rng = np.random.default_rng(0)
    for _ in range(10):
        z, w = rng.normal(size=2) + 1j * rng.normal(size=2) + 2
        prod = f1([z]) * f1([w])
        got = f2([z, w])
        assert min(abs(got - prod), abs(got + prod)) <= 1e-12 * abs(prod)


def test_diagonal_family_is_holomorphic_in_each_variable():
    grid = diagonal_grid(annulus_grid(0.5, 2.0, 9), 2, [1.0, np.exp(0.3j)])
    f = ratio_function(S1.presentation, S1.families["diag"], S1.spider("shifted"))
    assert cr_residual(f, grid, 1e-3, 1e-6).passed


def test_zero_denominator_detected():
    f = ratio_function(S1.presentation, S1.families["diag"], S1.spider(None), "sigma")
    # each factor z - 1 clears the rank threshold, their product does not clear tol_pivot
    with pytest.raises(ZeroDenominator):
        f([1 + 1e-7, 1 + 1e-7])


def test_sign_discontinuity_detected():
    grid = box_grid(-1, 1, -1, 1, 5)
    with pytest.raises(SignDiscontinuity):
        evaluate_on_grid(lambda z: 1j if z[0].real > 0 else 1.0, grid)


def test_halving_step_cuts_residual():
    grid = annulus_grid(0.5, 2.0, 11)
    for k in (3, 4):
        coarse = cr_residual(lambda z: z[0] ** k, grid, 1e-2, resolve_sign=False).max_residual
        fine = cr_residual(lambda z: z[0] ** k, grid, 5e-3, resolve_sign=False).max_residual
        assert coarse / fine >= 3.0


def test_presentations_of_circle_agree_up_to_constant():
    other = builtin("S1b")
    grid = annulus_grid(0.5, 2.0, 21)
    h = HomologyClass.of(S1.presentation, [1])
    for kind in ("ratio", "torsion", "sigma"):
        f1 = ratio_function(S1.presentation, S1.families["circle"],
                            act(h, S1.spider(None), S1.presentation), kind)
        f2 = ratio_function(other.presentation, other.families["circle"],
                            act(h, other.spider(None), other.presentation), kind)
        q = evaluate_on_grid(f1, grid)[grid.mask] / evaluate_on_grid(f2, grid)[grid.mask]
        assert np.max(np.abs(q - q[0])) <= 1e-8 * abs(q[0])


def test_parse_grid_specs():
    g = parse_grid("annulus:0.5:2:21")
    assert g.shape == (21, 21)
    assert parse_grid("annulus:0.5:2:5:0").mask.all()
    assert parse_grid("box:-1:1:-1:1:4").shape == (4, 4)
    for bad in ("annulus:1:2", "disk:1", "box:a:b:c:d:e"):
        with pytest.raises(InputError):
            parse_grid(bad)
