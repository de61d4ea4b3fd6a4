from fractions import Fraction
from itertools import combinations

from hypothesis import given, strategies as st

from cogef.formulation import ExtendedFormulation
from cogef.lp import LpModel, is_member, lp_exact


def polygon(rows, nonneg=False):
    ef = ExtendedFormulation()
    x = ef.add_vars("x", 2, nonneg=nonneg)
    for a, b, h in rows:
        ef.add_row({x[0]: a, x[1]: b}, "<=", h)
    ef.projection = x
    return ef


def vertices(rows):
    out = []
    for (a1, b1, h1), (a2, b2, h2) in combinations(rows, 2):
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        p = (Fraction(h1 * b2 - h2 * b1, det), Fraction(a1 * h2 - a2 * h1, det))
        if all(a * p[0] + b * p[1] <= h for a, b, h in rows):
            out.append(p)
    return out


BOX = [(1, 0, 10), (-1, 0, 10), (0, 1, 10), (0, -1, 10)]
row_st = st.tuples(st.integers(-5, 5), st.integers(-5, 5), st.integers(-8, 8)).filter(lambda r: r[0] or r[1])


@given(st.lists(row_st, min_size=1, max_size=6), st.tuples(st.integers(-4, 4), st.integers(-4, 4)),
       st.sampled_from(["min", "max"]))
def test_lp_matches_vertex_enumeration(rows, c, sense):
    rows = rows + BOX
    verts = vertices(rows)
    res = lp_exact(polygon(rows), c, sense)
    if not verts:
        assert res.status == "infeasible"
        return
    vals = [c[0] * p[0] + c[1] * p[1] for p in verts]
    assert res.status == "optimal"
    assert res.value == (min(vals) if sense == "min" else max(vals))


@given(st.lists(row_st, min_size=1, max_size=5), st.tuples(st.integers(-4, 4), st.integers(-4, 4)))
def test_unbounded_rays_are_certificates(rows, c):
    res = lp_exact(polygon(rows), c, "min")
    if res.status == "unbounded":
        r = res.project([0, 1], "ray")
        assert all(a * r[0] + b * r[1] <= 0 for a, b, _ in rows)
        assert c[0] * r[0] + c[1] * r[1] < 0
    elif res.status == "optimal":
        p = res.project([0, 1])
        assert all(a * p[0] + b * p[1] <= h for a, b, h in rows)


def test_small_examples():
    ef = ExtendedFormulation()
    x = ef.add_var("x")
    ef.add_row({x: 1}, ">=", 1)
    ef.projection = [x]
    assert lp_exact(ef, [1], "min").value == 1
    up = lp_exact(ef, [1], "max")
    assert up.status == "unbounded" and up.ray == (1,)

    ef = ExtendedFormulation()
    x = ef.add_var("x")
    ef.add_row({x: 1}, "<=", 0)
    ef.projection = [x]
    down = lp_exact(ef, [1], "min")
    assert down.status == "unbounded" and down.ray == (-1,)

    ef.add_row({x: 1}, ">=", 1)
    assert lp_exact(ef, [1], "min").status == "infeasible"


def test_equalities_nonnegativity_and_membership():
    # x + y = 3, x - y <= 1, x, y >= 0
    ef = ExtendedFormulation()
    x, y = ef.add_vars("v", 2, nonneg=True)
    ef.add_row({x: 1, y: 1}, "==", 3)
    ef.add_row({x: 1, y: -1}, "<=", 1)
    ef.projection = [x, y]
    assert lp_exact(ef, [1, 0], "max").value == 2
    assert lp_exact(ef, [1, 0], "min").value == 0
    assert is_member(ef, (Fraction(3, 2), Fraction(3, 2)))
    assert not is_member(ef, (3, 0))


def test_warm_model_reuse():
    rows = [(1, 1, 4), (-1, 0, 0), (0, -1, 0)]
    model = LpModel(polygon(rows))
    assert model.status == "feasible"
    assert model.optimize({0: 1, 1: 2}, "max").value == 8
    assert model.optimize({0: 1}, "max").value == 4
    assert model.optimize({0: -1, 1: -1}, "max").value == 0


def test_projection_of_auxiliary_system():
    # x = u - w with u, w >= 0 and u + w <= 5: x ranges over [-5, 5]
    ef = ExtendedFormulation()
    xv = ef.add_var("x")
    u, w = ef.add_vars("aux", 2, nonneg=True)
    ef.add_row({xv: 1, u: -1, w: 1}, "==", 0)
    ef.add_row({u: 1, w: 1}, "<=", 5)
    ef.projection = [xv]
    assert lp_exact(ef, [1], "max").value == 5
    assert lp_exact(ef, [1], "min").value == -5
