import math

import pytest

from cubicmaps.core import MonicForm, critical_points
from cubicmaps.errors import MalformedSpec, NewtonDivergence, OverdeterminedSpec
from cubicmaps.hyperbolic import (Chaotic, Converged, Escaped, ItinerarySpec, Relation,
                                  builtin_center_table, classify_behavior, critical_cycle_multipliers,
                                  cycle_from_point, detect_cycle, refine_center, relation_residuals,
                                  verify_center)

TABLE = builtin_center_table()


def direct_residual(A, B, sigma, spec):
    """Worst |f^n(src) - tgt| by plain iteration, best over the two namings of c and c'."""
    m = MonicForm.from_moduli(A, B, sigma)
    a = critical_points(m)[0]
    best = math.inf
    for s in (1, -1):
        pts = {"c": s * a, "c'": -s * a, "cbar": complex(s * a).conjugate()}
        worst = abs(A) if spec.double else 0.0
        for r in spec.relations:
            z = pts[r.src]
            for _ in range(r.n):
                z = m(z)
            worst = max(worst, abs(z - pts[r.tgt]))
        best = min(best, worst)
    return best


def test_parse_chain_and_commas():
    s = ItinerarySpec.parse("c -> c' ->2 c")
    assert s.relations == (Relation("c", 1, "c'"), Relation("c'", 2, "c"))
    assert str(s) == "c -> c', c' ->2 c"
    s = ItinerarySpec.parse("c ->3 c, cbar ->3 cbar")
    assert len(s.relations) == 2 and s.uses_conjugate()
    s = ItinerarySpec.parse("c=c' ->2 c")
    assert s.double and s.relations == (Relation("c", 2, "c"),)
    assert ItinerarySpec.parse(str(ItinerarySpec.parse("c ->2 c' -> c'"))).relations == \
        ItinerarySpec.parse("c ->2 c' -> c'").relations


@pytest.mark.parametrize("text", ["", "c", "c -> d", "c ->0 c", "x ->2 c"])
def test_parse_rejects(text):
    with pytest.raises(MalformedSpec):
        ItinerarySpec.parse(text)


def test_relation_conjugate():
    assert Relation("c", 2, "cbar").conjugate() == Relation("cbar", 2, "c")


def test_table_shape():
    assert len(TABLE) == 20
    assert sum(r.B > 0 for r in TABLE) == 5 and sum(r.B == 0 for r in TABLE) == 5
    exact = [r for r in TABLE if r.exact]
    assert {r.exact for r in exact} >= {"(-3/4, -3/16)", "(1/4, -7/16)", "(0, -1)"}


@pytest.mark.parametrize("rec", TABLE, ids=[f"{r.tag}@{r.A},{r.B}" for r in TABLE])
def test_verify_refine_superattract(rec):
    rep = verify_center(rec, tol=2e-3)
    assert rep.passed
    rc = refine_center(rec.spec, (rec.A, rec.B))
    assert abs(rc.A - rec.A) <= 1e-4 and abs(rc.B - rec.B) <= 1e-4
    # independent check of the relations by plain iteration
    assert direct_residual(rc.A, rc.B, rc.sigma, rec.spec) < 1e-10
    mults = critical_cycle_multipliers(MonicForm.from_moduli(rc.A, rc.B, rc.sigma))
    assert all(x is not None and abs(x) < 1e-8 for x in mults)
    assert rep.to_json()["passed"]


@pytest.mark.parametrize("A,B", [(-0.75, -0.1875), (0.25, -0.4375), (-0.25, -0.5625), (0.0, -1.0),
                                 (0.5, 0.0), (-0.5, 0.0)])
def test_exact_rows_refine_to_exact_values(A, B):
    rec = next(r for r in TABLE if r.A == A and r.B == B)
    rc = refine_center(rec.spec, (A + 3e-4, B - 2e-4), sigma=rec.sigma)
    assert rc.A == pytest.approx(A, abs=1e-11) and rc.B == pytest.approx(B, abs=1e-11)


def test_square_root_rows():
    r2 = math.sqrt(2) / 2
    for A in (r2, -r2):
        rec = next(r for r in TABLE if r.A == A)
        rc = refine_center(rec.spec, (A, 0.0))
        assert rc.A == pytest.approx(A, abs=1e-12) and abs(rc.B) < 1e-20


def test_refine_errors():
    with pytest.raises(OverdeterminedSpec):
        refine_center(ItinerarySpec.parse("c -> c, c' -> c', c ->2 c"), (0.5, 0.1))
    with pytest.raises(MalformedSpec):
        refine_center(ItinerarySpec.parse("c ->2 c"), (0.5, 0.1))
    with pytest.raises(NewtonDivergence):
        # no period-5 / period-5 center anywhere near this seed
        refine_center(ItinerarySpec.parse("c ->5 c, c' ->5 c'"), (3.0, 40.0))


def test_relation_residuals_at_a1():
    m = MonicForm.from_moduli(0.0, 0.0)
    res = relation_residuals(m, ItinerarySpec.parse("c=c' -> c"))
    assert all(abs(x) == 0 for x in res)


def test_detect_cycle_fixed_point():
    cyc = detect_cycle(MonicForm.from_moduli(0.0, 0.0), 0.3)
    assert cyc.period == 1 and abs(cyc.points[0]) < 1e-12 and cyc.attracting and cyc.refined


def test_detect_cycle_period_two():
    rec = next(r for r in TABLE if r.tag == "D2,2" and r.A < 0)
    m = MonicForm.from_moduli(rec.A, rec.B)
    cyc = detect_cycle(m, critical_points(m)[0])
    assert cyc.period == 2 and abs(cyc.multiplier) < 1e-10
    again = cycle_from_point(m, cyc.points[0], 2)
    assert abs(again.points[1] - cyc.points[1]) < 1e-12


def test_detect_cycle_escape_returns_none():
    assert detect_cycle(MonicForm(1, 0.0, 5.0), 0.0) is None


def test_classify_behavior_same_cycle():
    s = classify_behavior(MonicForm.from_moduli(0.0, 0.0))
    assert all(isinstance(v, Converged) for v in s.verdicts)
    assert s.same_cycle and s.periods == (1, 1)


def test_classify_behavior_distinct_periods():
    s = classify_behavior(MonicForm.from_moduli(0.8156, 0.0674))
    assert s.same_cycle is False and sorted(s.periods) == [3, 4]


def test_classify_behavior_chebyshev_is_bounded_but_not_attracted():
    s = classify_behavior(MonicForm.from_moduli(1.0, 0.0))
    assert all(isinstance(v, Chaotic) for v in s.verdicts)
    assert {round(abs(v.landed.points[0]), 12) for v in s.verdicts} == {2.0}
    assert not any(v.landed.attracting for v in s.verdicts)


def test_classify_behavior_escape():
    s = classify_behavior(MonicForm(1, 1.2, 0.1))
    assert all(isinstance(v, Escaped) for v in s.verdicts)
    assert s.same_cycle is None


def test_multipliers_none_when_escaping():
    assert critical_cycle_multipliers(MonicForm(1, 0.0, 5.0)) == [None, None]
