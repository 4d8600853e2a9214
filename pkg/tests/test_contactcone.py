"""Cone classification, Reeb data, induced structures, dilation defect."""

import math
from fractions import Fraction

import numpy as np
import pytest

from toriccut import contactcone as cc
from toriccut import polylattice as pl
from toriccut.errors import (NotACone, NotGood, NotInterior, PointOutside,
                             WeaklyConvex, ZeroPoint)

from conftest import FIXTURES

GOOD_CONES = ["f3", "f4", "lens", "halfspace_r3"]


def unit_f4(phi):
    return (math.cos(phi), math.sin(phi))


def unit_lens(s):
    # between the boundary rays (0, 1) and (2, -1)
    v = np.array([2.0 * s, 1.0 - 2.0 * s])
    return tuple(v / np.linalg.norm(v))


def diag_defect_oracle(x):
    """Closed-form dilation defect for cones whose metric is diagonal:
    the base block contributes c/2 and the angular block
    |c/2/(1+c/2)^2 - 2/(1+c/2)| per coordinate, c = 1/x_i."""
    best = 0.0
    for v in x:
        c = 1.0 / v
        best = max(best, c / 2.0)
        half = c / 2.0
        best = max(best, abs(half / (1.0 + half) ** 2 - 2.0 / (1.0 + half)))
    return best


def test_moment_cone_closure():
    for name in ("f3", "f4", "lens"):
        p = FIXTURES[name]()
        mc = cc.moment_cone(p)
        assert mc.cone is p
        assert mc.includes_apex
    with pytest.raises(NotACone):
        cc.moment_cone(FIXTURES["f2"]())


def test_extreme_rays():
    assert cc.extreme_rays(FIXTURES["f4"]()) == ((0, 1), (1, 0))
    assert cc.extreme_rays(FIXTURES["lens"]()) == ((0, 1), (2, -1))
    half_line = pl.normalize(
        pl.polyhedral_set(1, [((-1,), 0)], kind=pl.CONE))
    assert cc.extreme_rays(half_line) == ((1,),)
    with pytest.raises(WeaklyConvex):
        cc.extreme_rays(FIXTURES["f3"]())


def test_reeb_type_f4():
    res = cc.is_reeb_type(FIXTURES["f4"]())
    assert res.is_reeb_type
    assert res.witness == (1, 1)


def test_reeb_type_lens():
    p = FIXTURES["lens"]()
    res = cc.is_reeb_type(p)
    assert res.is_reeb_type
    for ray in cc.extreme_rays(p):
        assert sum(a * b for a, b in zip(ray, res.witness)) >= 1


def test_reeb_type_negative_certificates():
    res3 = cc.is_reeb_type(FIXTURES["f3"]())
    assert not res3.is_reeb_type
    assert res3.witness == (0, 1)
    res_half = cc.is_reeb_type(FIXTURES["halfspace_r3"]())
    assert not res_half.is_reeb_type
    assert res_half.witness == (0, 1, 0)
    for name, res in (("f3", res3), ("halfspace_r3", res_half)):
        p = FIXTURES[name]()
        for f in p.facets:
            assert sum(a * b for a, b in zip(f.eta, res.witness)) == 0
        assert any(v != 0 for v in res.witness)


def test_reeb_type_requires_good():
    with pytest.raises(NotGood):
        cc.is_reeb_type(FIXTURES["f5_lift"]())


@pytest.mark.parametrize("name", GOOD_CONES)
def test_ray_program_matches_rank(name):
    p = FIXTURES[name]()
    verdict = cc.is_reeb_type(p).is_reeb_type
    assert verdict == (pl.convexity_class(p).k == 0)


def test_reeb_vector_values():
    assert cc.reeb_vector(FIXTURES["f4"]()) == (1, 1)
    assert cc.reeb_vector(FIXTURES["lens"]()) == (2, 2)
    with pytest.raises(WeaklyConvex):
        cc.reeb_vector(FIXTURES["f3"]())


@pytest.mark.parametrize("name", ["f4", "lens"])
def test_reeb_vector_positive_on_rays(name):
    p = FIXTURES[name]()
    vec = cc.reeb_vector(p)
    for ray in cc.extreme_rays(p):
        assert sum(a * b for a, b in zip(ray, vec)) > 0


def test_classify_f4():
    res = cc.classify(FIXTURES["f4"]())
    assert res.good and res.k_contact
    assert res.convexity.label == "strongly_convex"
    assert res.reeb_vector == (1, 1)
    assert res.type_label == cc.SASAKIAN


def test_classify_weakly_convex():
    res = cc.classify(FIXTURES["f3"]())
    assert res.good and not res.k_contact
    assert res.convexity.k == 1
    assert res.reeb_vector is None
    assert res.type_label == cc.NON_SASAKIAN
    half = cc.classify(FIXTURES["halfspace_r3"]())
    assert half.type_label == cc.NON_SASAKIAN
    assert half.convexity.k == 2


def test_classify_lens_and_failures():
    assert cc.classify(FIXTURES["lens"]()).type_label == cc.SASAKIAN
    with pytest.raises(NotGood):
        cc.classify(FIXTURES["f5_lift"]())
    with pytest.raises(NotACone):
        cc.classify(FIXTURES["f2"]())


def test_contact_point_validation():
    p = FIXTURES["f4"]()
    with pytest.raises(ValueError):
        cc.contact_point(p, (1.0, 1.0))
    with pytest.raises(NotInterior):
        cc.contact_point(p, (1.0, 0.0))
    relaxed = cc.contact_point(p, (1.0, 0.0), strict=False)
    assert relaxed.x == (1.0, 0.0) and relaxed.t == 0.0
    with pytest.raises(PointOutside):
        cc.contact_point(p, (0.6, -0.8), strict=False)
    with pytest.raises(ValueError):
        cc.contact_point(p, (1.0,))


def test_canonical_contact_form_components():
    p = FIXTURES["f4"]()
    alpha, xi = cc.canonical_contact_form(
        cc.contact_point(p, (1.0, 0.0), strict=False))
    assert alpha == (0, 0, 1.0, 0.0)
    assert xi == (0, 0, 1.0, 0.0)


def test_canonical_contact_form_exact_pairing():
    cp = cc.contact_point(FIXTURES["f4"](),
                          (Fraction(3, 5), Fraction(4, 5)))
    alpha, xi = cc.canonical_contact_form(cp)
    pairing = sum(a * b for a, b in zip(alpha, xi))
    assert pairing == 1 and isinstance(pairing, Fraction)


def test_moment_pairing_matches_form():
    rng = np.random.default_rng(5)
    cp = cc.contact_point(FIXTURES["f4"](), unit_f4(0.9))
    alpha, _ = cc.canonical_contact_form(cp)
    for _ in range(10):
        torus_vec = rng.uniform(-3, 3, size=2)
        field = np.concatenate([np.zeros(2), torus_vec])
        assert abs(float(np.array(alpha, dtype=float) @ field)
                   - float(np.array(cp.x) @ torus_vec)) < 1e-12


def test_normalize_moment():
    p = FIXTURES["f4"]()
    assert cc.normalize_moment(p, (3, 4)) == (0.6, 0.8)
    assert cc.normalize_moment(FIXTURES["f3"](), (0, 5)) == (0.0, 1.0)
    rng = np.random.default_rng(17)
    for _ in range(100):
        v = rng.uniform(0.1, 5.0, size=2)
        once = cc.normalize_moment(p, v)
        twice = cc.normalize_moment(p, once)
        assert max(abs(a - b) for a, b in zip(once, twice)) < 1e-15
    with pytest.raises(ZeroPoint):
        cc.normalize_moment(p, (0, 0))
    with pytest.raises(PointOutside):
        cc.normalize_moment(p, (-1, 2))


@pytest.mark.parametrize("name,sampler", [
    ("f4", lambda u: unit_f4(0.05 + u * (math.pi / 2 - 0.1))),
    ("lens", lambda u: unit_lens(0.05 + 0.9 * u)),
])
def test_acm_identities_random_points(name, sampler):
    p = FIXTURES[name]()
    rng = np.random.default_rng(29)
    for _ in range(20):
        cp = cc.contact_point(p, sampler(rng.uniform()))
        acm = cc.induced_acm_structure(p, cp)
        dim = 2 * p.n - 1
        assert abs(float(acm.alpha @ acm.xi) - 1.0) <= 1e-9
        assert np.max(np.abs(acm.phi @ acm.xi)) <= 1e-9
        assert np.max(np.abs(acm.phi @ acm.phi + np.eye(dim)
                             - np.outer(acm.xi, acm.alpha))) <= 1e-9
        assert np.max(np.abs(acm.phi.T @ acm.metric @ acm.phi
                             - acm.metric
                             + np.outer(acm.alpha, acm.alpha))) <= 1e-9
        assert np.all(np.linalg.eigvalsh(acm.metric) > 0)


def test_acm_fixture_point_compatibility():
    p = FIXTURES["f4"]()
    root_half = math.sqrt(0.5)
    acm = cc.induced_acm_structure(
        p, cc.contact_point(p, (root_half, root_half)))
    rng = np.random.default_rng(41)
    for _ in range(20):
        vec = rng.uniform(-2, 2, size=3)
        lhs = float(vec @ acm.phi.T @ acm.metric @ acm.phi @ vec)
        rhs = float(vec @ acm.metric @ vec) - float(acm.alpha @ vec) ** 2
        assert abs(lhs - rhs) < 1e-9


def test_acm_needs_interior():
    p = FIXTURES["f4"]()
    cp = cc.contact_point(p, (1.0, 0.0), strict=False)
    with pytest.raises(NotInterior):
        cc.induced_acm_structure(p, cp)
    with pytest.raises(NotInterior):
        cc.cone_metric_defect(p, cp)


def test_reeb_gap_diagnostic():
    p = FIXTURES["f4"]()
    root_half = math.sqrt(0.5)
    gap = cc.induced_vs_canonical_reeb(
        p, cc.contact_point(p, (root_half, root_half)))
    # the angular part of the induced field is -x scaled by cos(pi/8)/x_1,
    # so the gap against +x is cos(pi/8) + sqrt(1/2)
    assert abs(gap - (math.cos(math.pi / 8) + root_half)) < 1e-12
    lens_gap = cc.induced_vs_canonical_reeb(
        FIXTURES["lens"](), cc.contact_point(FIXTURES["lens"](),
                                             unit_lens(0.5)))
    assert math.isfinite(lens_gap) and lens_gap > 0


def test_cone_defect_f4_fixture():
    p = FIXTURES["f4"]()
    root_half = math.sqrt(0.5)
    cp = cc.contact_point(p, (root_half, root_half))
    value = cc.cone_metric_defect(p, cp)
    assert abs(value - 0.9289321881345247) < 1e-8
    assert abs(value - diag_defect_oracle([root_half, root_half])) < 1e-8
    assert value > 0.1


def test_cone_defect_scaled_point_stays_positive():
    p = FIXTURES["f4"]()
    root_half = math.sqrt(0.5)
    cp = cc.contact_point(p, (root_half, root_half), t=0.4)
    value = cc.cone_metric_defect(p, cp)
    scaled = [math.exp(0.4) * root_half] * 2
    assert abs(value - diag_defect_oracle(scaled)) < 1e-8
    assert value > 0


def test_cone_defect_lens_positive():
    p = FIXTURES["lens"]()
    value = cc.cone_metric_defect(p, cc.contact_point(p, unit_lens(0.4)))
    assert value > 0.1
