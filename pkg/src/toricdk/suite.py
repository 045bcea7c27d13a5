"""Batch verifications: one runner per acceptance criterion.

Each runner returns a :class:`CriterionResult` and never raises on a
failed check; errors inside a runner count as failures with the error code
in ``detail``.  Random inputs come from ``random.Random(seed)`` so a run is
reproducible from its seed.
"""

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from .cohom import rounded_hom_sheaf, verify_vanishing
from .errors import ToricError, ValidationError, WrongDirection
from .fm import (
    HomVerdict,
    apply_functor,
    ceiling_identity_check,
    chart_oracle,
    fm_case4,
    hom_graded_compare,
    range_bound,
    range_check,
    stratum_twist_range_check,
)
from .stacky import (
    Case,
    MonomialLineBundle,
    build_config,
    cone_index,
    direction_check,
    discrepancy_of_ray,
    fans_of,
    hj_resolution,
    log_canonical,
    orthant_fan,
    pullback_divisor,
    toric_pullback,
    weighted_blowup,
)
from .tilting import build_tilting, enumerate_range_classes

TIME_LIMITS = {1: 1.0, 2: 1.0, 3: 30.0, 4: 120.0, 5: 10.0, 6: 10.0, 7: 60.0, 8: 10.0, 9: 1.0}


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float
    limit: float

    @property
    def in_time(self):
        return self.seconds <= self.limit

    @property
    def ok(self):
        return self.passed and self.in_time

    def line(self):
        status = "PASS" if self.ok else "FAIL"
        timing = f"{self.seconds:.2f}s/{self.limit:.0f}s"
        return f"[{status}] criterion {self.number}: {self.name} ({timing}) {self.detail}"


# random configurations


def random_config(rng, case, max_n=4, max_a=5, max_r=6):
    """A valid configuration of the given case with the functor's inequality."""
    case = Case(case)
    while True:
        try:
            if case == Case.REWEIGHT:
                n = rng.randint(1, max_n)
                s = [rng.randint(1, max_r) for _ in range(n)]
                r = [x + rng.randint(0, max_r) for x in s]
                return build_config(case, n, r=r, s=s)
            if case == Case.FLIP:
                n = rng.randint(3, max(3, max_n))
                p = rng.randint(2, n - 1)
                q = rng.randint(p, n - 1)
                a = [rng.randint(1, max_a) for _ in range(p)] + [0] * (q - p)
                a += [-rng.randint(1, max_a) for _ in range(n - q)]
            else:
                n = rng.randint(2, max_n)
                p = rng.randint(2, n)
                a = [rng.randint(1, max_a) for _ in range(p)] + [0] * (n - p)
            r = [rng.randint(1, max_r) for _ in range(n + 1)]
            config = build_config(case, n, a=a, r=r)
        except ValidationError:
            continue
        if direction_check(config).accepted:
            return config


def source_length(config):
    return config.n if config.case in (Case.REWEIGHT, Case.CONTRACTION) else config.n + 1


def random_bundle(rng, config, spread=6):
    size = source_length(config)
    while True:
        k = tuple(rng.randint(-spread, spread) for _ in range(size))
        if config.case in (Case.FLIP, Case.INVERSE_CONTRACTION):
            if not range_check(k, config)[0]:
                continue
        return MonomialLineBundle(k)


def _run(number, name, body):
    start = time.perf_counter()
    try:
        passed, detail = body()
    except ToricError as exc:
        passed, detail = False, f"error {exc.code}: {exc}"
    seconds = time.perf_counter() - start
    return CriterionResult(number, name, passed, detail, seconds, TIME_LIMITS[number])


# criteria


def criterion_1():
    def body():
        ledger = hj_resolution(8, 3)
        want = [Fraction(-1, 2), Fraction(-1, 2)]
        got = ledger.discrepancies
        rays = [e.ray for e in ledger.entries]
        ok = got == want and rays == [(Fraction(1, 8), Fraction(3, 8)), (Fraction(3, 8), Fraction(1, 8))]
        return ok, f"discrepancies {[str(x) for x in got]}"

    return _run(1, "Z8(1,3) minimal resolution", body)


def criterion_2():
    def body():
        base = orthant_fan((3, 3))
        a = discrepancy_of_ray(base, (1, 2), {1, 2})
        fan = weighted_blowup((1, 2), (3, 3, 1))
        indices = sorted(cone_index(fan, c) for c in fan.max_cones)
        ok = a == 0 and indices == [1, 2]
        return ok, f"discrepancy {a}, chart indices {indices}"

    return _run(2, "weighted blowup log crepant", body)


def criterion_3(seed=0, instances=200, box=40, backend=None):
    def body():
        failures = 0
        for r in range(1, 13):
            for s in range(1, r + 1):
                up = [-(-(m * r) // s) for m in range(-30, 31)]
                for i, m in enumerate(range(-30, 31)):
                    for j, mp in enumerate(range(-30, 31)):
                        lhs = -(-(m - mp) // s)
                        rhs = -(-(up[i] - up[j]) // r)
                        if lhs != rhs:
                            failures += 1
        # spot-check the exact-fraction predicate against the integer loop
        spot = all(ceiling_identity_check(4, 3, m, mp) for m in range(-5, 6) for mp in range(-5, 6))
        rng = random.Random(seed)
        verdicts = []
        for _ in range(instances):
            config = random_config(rng, Case.REWEIGHT, max_n=3, max_r=6)
            l1 = random_bundle(rng, config, 10)
            l2 = random_bundle(rng, config, 10)
            verdicts.append(hom_graded_compare(l1, l2, config, box, backend).verdict)
        bad = sum(v != HomVerdict.BIJECTIVE for v in verdicts)
        ok = failures == 0 and spot and bad == 0
        return ok, f"identity failures {failures}, non-bijective {bad}/{instances}"

    return _run(3, "reweighting ceiling identity and graded Hom", body)


def criterion_4(seed=0, instances=100, box=48, backend=None, workers=1):
    def body():
        rng = random.Random(seed)
        bad_hom = bad_van = 0
        for _ in range(instances):
            config = random_config(rng, Case.CONTRACTION, max_n=4, max_a=5, max_r=6)
            l1 = random_bundle(rng, config)
            l2 = random_bundle(rng, config)
            if hom_graded_compare(l1, l2, config, box, backend).verdict != HomVerdict.BIJECTIVE:
                bad_hom += 1
            for src, tgt in ((l1, l2), (l2, l1)):
                for side in ("X", "Y"):
                    fan, div = rounded_hom_sheaf(src, tgt, side, config)
                    rep = verify_vanishing(fan, div, box, 1, workers, backend)
                    if not rep.clean:
                        bad_van += 1
        blowup = weighted_blowup((1, 1))
        control = verify_vanishing(blowup, {3: 2}, box, 1, workers, backend)
        detected = any(p == 1 for _, p in control.witnesses)
        ok = bad_hom == 0 and bad_van == 0 and detected
        return ok, (
            f"non-bijective {bad_hom}/{instances}, vanishing failures {bad_van}, "
            f"2E control witness {'found' if detected else 'missing'}"
        )

    return _run(4, "contraction Hom and vanishing", body)


def flop_config():
    return build_config(Case.FLIP, 3, a=(1, 1, -1), r=(1, 1, 1, 1))


def stacky_flip_config():
    return build_config(Case.FLIP, 3, a=(1, 1, -1), r=(1, 1, 1, 2))


def criterion_5(box=48, workers=1, backend=None):
    def body():
        config = flop_config()
        classes = enumerate_range_classes(config)
        data = build_tilting(config, box, workers, backend)
        a01 = sorted(tuple(int(x) for x in g) for g in data.arrows[(0, 1)])
        a10 = sorted(tuple(int(x) for x in g) for g in data.arrows[(1, 0)])
        loops = len(data.arrows[(0, 0)]) + len(data.arrows[(1, 1)])
        ok = (
            [c.k for c in classes] == [(0, 0, 0, 0), (1, 0, 0, 0)]
            and a01 == [(-1, 1, 0), (0, 0, 0)]
            and a10 == [(1, 0, 0), (1, 0, 1)]
            and loops == 0
            and data.clean
        )
        return ok, f"classes {len(classes)}, arrows {a01} / {a10}, loops {loops}, clean {data.clean}"

    return _run(5, "flop tilting quiver", body)


def criterion_6(seed=0, instances=200):
    def body():
        rng = random.Random(seed)
        bad = 0
        for _ in range(instances):
            config = random_config(rng, Case.FLIP, max_n=5)
            fan_x, fan_y, _ = fans_of(config)
            mu = pullback_divisor(config, log_canonical(fan_x), "X")
            nu = pullback_divisor(config, log_canonical(fan_y), "Y")
            e = config.n + 2
            want = config.lam * sum(
                (Fraction(a, r) for a, r in zip(config.a_full, config.r)), Fraction(0)
            )
            # the same coefficients from the support functions of the two fans
            w = {e: config.v_res}
            mu2 = toric_pullback(fan_x, log_canonical(fan_x), w)[e]
            nu2 = toric_pullback(fan_y, log_canonical(fan_y), w)[e]
            if mu[e] - nu[e] != want or mu2 != mu[e] or nu2 != nu[e]:
                bad += 1
        return bad == 0, f"mismatches {bad}/{instances}"

    return _run(6, "flip crepancy consistency", body)


def criterion_7(seed=0, instances=1000):
    def body():
        rng = random.Random(seed)
        bad = 0
        per_case = {c: 0 for c in Case}
        for t in range(instances):
            case = list(Case)[t % 4]
            config = random_config(rng, case)
            bundle = random_bundle(rng, config)
            if apply_functor(bundle, config).charts != chart_oracle(bundle, config):
                bad += 1
            per_case[case] += 1
        counts = ", ".join(f"case {int(c)}: {k}" for c, k in per_case.items())
        return bad == 0, f"mismatches {bad}/{instances} ({counts})"

    return _run(7, "functor formulas match lattice oracle", body)


def _strata(config):
    free = list(range(config.n2 + 1, config.n + 2))
    for t in range(0, config.n - config.n2 + 1):
        yield from combinations(free, t)


def criterion_8(spread=3):
    def body():
        checked = failed = 0
        for config in (flop_config(), stacky_flip_config()):
            bundles = [
                k
                for k in product(range(-spread, spread + 1), repeat=config.n + 1)
                if range_check(k, config)[0]
            ]
            for k in bundles:
                for stratum in _strata(config):
                    for eps in product((0, 1), repeat=len(stratum)):
                        checked += 1
                        if not stratum_twist_range_check(config, stratum, k, eps):
                            failed += 1
        return failed == 0 and checked > 0, f"failures {failed}/{checked}"

    return _run(8, "stratum twists stay in range", body)


def criterion_9():
    def body():
        good = build_config(Case.INVERSE_CONTRACTION, 2, a=(1, 1), r=(2, 3, 1))
        bad = build_config(Case.INVERSE_CONTRACTION, 2, a=(1, 1), r=(2, 1, 1))
        rg, rb = direction_check(good), direction_check(bad)
        try:
            fm_case4(MonomialLineBundle((0, 0, 0)), bad)
            refused = False
        except WrongDirection:
            refused = True
        ok = (
            rg.accepted
            and rg.statistic == Fraction(5, 6)
            and rg.bound == 1
            and not rb.accepted
            and rb.statistic == Fraction(3, 2)
            and rb.bound == 1
            and refused
            and range_bound(good) == Fraction(5, 6)
        )
        return ok, (
            f"accepted {rg.statistic} <= {rg.bound}; rejected {rb.statistic} > {rb.bound}; "
            f"alternate 1/r_n readings {rg.alternate_bound}, {rb.alternate_bound}"
        )

    return _run(9, "inverse contraction bound uses r_(n+1)", body)


RUNNERS = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
}


def run_all(seed=0, box=48, workers=1, backend=None):
    out = []
    for number, runner in RUNNERS.items():
        if number in (3, 6, 7):
            out.append(runner(seed=seed))
        elif number == 4:
            out.append(runner(seed=seed, box=box, workers=workers, backend=backend))
        elif number == 5:
            out.append(runner(box=box, workers=workers, backend=backend))
        else:
            out.append(runner())
    return out

