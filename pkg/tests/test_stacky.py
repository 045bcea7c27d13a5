import random
from fractions import Fraction as Q
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from toricdk.errors import BadInput, InvalidSigns, NotInCone, NotPrimitive, SupportError
from toricdk.stacky import (
    Case,
    MonomialLineBundle,
    StackyFan,
    Verdict,
    build_config,
    chart_lattices,
    cone_index,
    crepancy_compare,
    direction_check,
    discrepancy_of_ray,
    fans_of,
    hj_resolution,
    iso_equivalent,
    log_canonical,
    normal_form,
    orthant_fan,
    pullback_divisor,
    ramified_discrepancy,
    resolution_is_smooth,
    toric_pullback,
    weighted_blowup,
)
from toricdk.suite import random_config


@pytest.fixture
def flop():
    return build_config(Case.FLIP, 3, a=(1, 1, -1), r=(1, 1, 1, 1))


@pytest.fixture
def blowup():
    return build_config(Case.CONTRACTION, 2, a=(1, 1), r=(1, 1, 1))


def test_flip_config_resolution_ray(flop):
    assert flop.lam == 1
    assert flop.v_res == (1, 1, 0)
    assert (flop.n1, flop.n2) == (2, 2)


def test_config_validation():
    with pytest.raises(InvalidSigns):
        build_config(Case.FLIP, 3, a=(1, -1, -1), r=(1, 1, 1, 1))
    with pytest.raises(InvalidSigns):
        build_config(Case.REWEIGHT, 1, r=(2,), s=(3,))
    with pytest.raises(NotPrimitive):
        build_config(Case.CONTRACTION, 2, a=(2, 2), r=(1, 1, 1))


def test_flip_lambda_scales_to_primitive():
    config = build_config(Case.FLIP, 3, a=(2, 4, -1), r=(1, 1, 1, 1))
    assert config.lam == Q(1, 2)
    assert config.v_res == (1, 2, 0)


def test_fans_of_blowup_and_flop(blowup, flop):
    fan_x, fan_y, _ = fans_of(blowup)
    assert sorted(sorted(c) for c in fan_x.max_cones) == [[1, 3], [2, 3]]
    assert sorted(sorted(c) for c in fan_y.max_cones) == [[1, 2]]
    fx, fy, fw = fans_of(flop)
    assert sorted(sorted(c) for c in fx.max_cones) == [[1, 3, 4], [2, 3, 4]]
    assert sorted(sorted(c) for c in fy.max_cones) == [[1, 2, 3], [1, 2, 4]]
    assert len(fw.max_cones) == 4 and all(5 in c for c in fw.max_cones)
    for fan in (fx, fy, fw):
        fan.validate()


def test_reweight_fans_are_orthants():
    config = build_config(Case.REWEIGHT, 2, r=(4, 6), s=(2, 3))
    fan_x, fan_y, fan_w = fans_of(config)
    assert fan_x.rays == fan_y.rays == ((1, 0), (0, 1))
    assert fan_w.mults == (4, 6)
    lats = chart_lattices(config)
    assert lats["W"][None].columns == ((4, 0), (0, 6))


def test_validate_detects_overlap():
    fan = StackyFan((1, 2, 3), ((1, 0), (0, 1), (1, 1)), (1, 1, 1), ({1, 2}, {1, 3}))
    with pytest.raises(BadInput):
        fan.validate()


def test_pullbacks(blowup, flop):
    assert pullback_divisor(blowup, {1: 1}) == {1: 1, 3: 1}
    assert pullback_divisor(flop, {1: 1}, "Y") == {1: 1, 5: 1}
    assert pullback_divisor(flop, {3: 1}, "X") == {3: 1, 5: 1}
    assert pullback_divisor(blowup, {}) == {3: 0}
    with pytest.raises(SupportError):
        pullback_divisor(blowup, {3: 1})


def test_log_canonical():
    assert log_canonical(orthant_fan((1, 1))) == {1: -1, 2: -1}
    assert log_canonical(orthant_fan((2, 3))) == {1: Q(-1, 2), 2: Q(-1, 3)}


def test_crepancy_examples(flop):
    c1 = build_config(Case.CONTRACTION, 2, a=(1, 1), r=(2, 3, 5))
    assert crepancy_compare(c1) == (Verdict.STRICTLY_GREATER, Q(19, 30))
    c2 = build_config(Case.CONTRACTION, 2, a=(1, 1), r=(2, 2, 1))
    assert crepancy_compare(c2) == (Verdict.EQUAL, 0)
    assert crepancy_compare(flop) == (Verdict.EQUAL, 0)


def test_inverse_contraction_bound_reports_both_readings():
    good = direction_check(build_config(Case.INVERSE_CONTRACTION, 2, a=(1, 1), r=(2, 3, 1)))
    assert (good.accepted, good.statistic, good.bound) == (True, Q(5, 6), 1)
    assert (good.alternate_bound, good.alternate_accepted) == (Q(1, 3), False)
    bad = direction_check(build_config(Case.INVERSE_CONTRACTION, 2, a=(1, 1), r=(2, 1, 1)))
    assert (bad.accepted, bad.statistic) == (False, Q(3, 2))


def test_discrepancy_examples():
    plane = orthant_fan((1, 1))
    assert discrepancy_of_ray(plane, (1, 1), {1, 2}) == 1
    assert discrepancy_of_ray(plane, (Q(1, 8), Q(3, 8)), {1, 2}) == Q(-1, 2)
    assert discrepancy_of_ray(orthant_fan((3, 3)), (1, 2), {1, 2}) == 0
    with pytest.raises(NotInCone):
        discrepancy_of_ray(plane, (-1, 1), {1, 2})


def test_weighted_blowup_chart_indices():
    fan = weighted_blowup((1, 2), (3, 3, 1))
    assert cone_index(fan, {1, 3}) == 2
    assert cone_index(fan, {2, 3}) == 1


def test_ramified_discrepancy():
    assert ramified_discrepancy(Q(-1, 2), 2) == 0
    assert ramified_discrepancy(0, 1) == 0
    assert ramified_discrepancy(1, 3) == 5


@settings(max_examples=50, deadline=None)
@given(st.fractions(min_value=-3, max_value=3), st.integers(1, 9))
def test_ramified_discrepancy_scales_log_discrepancy(a, e):
    assert ramified_discrepancy(a, e) + 1 == e * (a + 1)


def test_hj_resolutions():
    led = hj_resolution(8, 3)
    assert [e.ray for e in led.entries] == [(Q(1, 8), Q(3, 8)), (Q(3, 8), Q(1, 8))]
    assert [e.self_intersection for e in led.entries] == [-3, -3]
    assert led.discrepancies == [Q(-1, 2), Q(-1, 2)]
    assert hj_resolution(2, 1).discrepancies == [0]
    assert hj_resolution(3, 1).discrepancies == [Q(-1, 3)]
    with pytest.raises(BadInput):
        hj_resolution(4, 2)


def test_hj_resolutions_are_smooth_and_log_terminal():
    for n in range(2, 25):
        for q in range(1, n):
            if gcd(n, q) != 1:
                continue
            led = hj_resolution(n, q)
            assert resolution_is_smooth(led)
            assert all(a > -1 for a in led.discrepancies)


def test_iso_and_normal_form(flop):
    fan = fans_of(flop)[1]
    one = MonomialLineBundle((1, 1, 1, 1))
    zero = MonomialLineBundle((0, 0, 0, 0))
    d1 = MonomialLineBundle((1, 0, 0, 0))
    assert iso_equivalent(fan, one, zero) == (1, 1, 1)
    assert iso_equivalent(fan, d1, zero) is None
    assert iso_equivalent(fan, d1, d1) == (0, 0, 0)
    assert normal_form(fan, one).k == (0, 0, 0, 0)
    assert normal_form(fan, d1).k == (1, 0, 0, 0)


def test_normal_form_is_a_class_invariant():
    rng = random.Random(5)
    for _ in range(40):
        config = random_config(rng, rng.choice([Case.FLIP, Case.INVERSE_CONTRACTION]))
        fan = fans_of(config)[1 if config.case == Case.FLIP else 0]
        k = MonomialLineBundle(tuple(rng.randint(-5, 5) for _ in fan.labels))
        nf = normal_form(fan, k)
        assert normal_form(fan, nf) == nf
        assert iso_equivalent(fan, k, nf) is not None
        m = [rng.randint(-3, 3) for _ in range(config.n)]
        shift = tuple(r * sum(a * b for a, b in zip(m, v)) for v, r in zip(fan.rays, fan.mults))
        moved = MonomialLineBundle(tuple(a + b for a, b in zip(k.k, shift)))
        assert normal_form(fan, moved) == nf


def test_iso_is_an_equivalence_relation(flop):
    fan = fans_of(flop)[1]
    rng = random.Random(9)
    for _ in range(60):
        a, b, c = (MonomialLineBundle(tuple(rng.randint(-2, 2) for _ in range(4))) for _ in range(3))
        ab, bc = iso_equivalent(fan, a, b), iso_equivalent(fan, b, c)
        assert (ab is None) == (iso_equivalent(fan, b, a) is None)
        if ab is not None and bc is not None:
            assert iso_equivalent(fan, a, c) is not None


def test_crepancy_matches_divisor_arithmetic():
    rng = random.Random(2)
    for _ in range(50):
        config = random_config(rng, Case.FLIP, max_n=5)
        fan_x, fan_y, _ = fans_of(config)
        e = config.n + 2
        mu = pullback_divisor(config, log_canonical(fan_x), "X")[e]
        nu = pullback_divisor(config, log_canonical(fan_y), "Y")[e]
        assert mu - nu == config.lam * crepancy_compare(config)[1]
        assert toric_pullback(fan_x, log_canonical(fan_x), {e: config.v_res})[e] == mu


def test_discrepancy_above_minus_one_for_klt_boundaries():
    rng = random.Random(4)
    for _ in range(100):
        fan = orthant_fan((rng.randint(1, 7), rng.randint(1, 7)))
        w = (rng.randint(1, 9), rng.randint(1, 9))
        assert discrepancy_of_ray(fan, w, {1, 2}) > -1
