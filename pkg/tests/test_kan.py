"""Coend/end engine: hom diagrams, coYoneda, iterated elimination."""

from herdcat.exactlin import (
    FieldSpec, basis_vec, eye, is_invertible, mat_mul,
)
from herdcat._homdiag import hom_bifunctor, module_hom_bifunctor
from herdcat.kan import (
    Factor, Leg, TensorDiagram, check_bifunctor, coend, end, module_coyoneda,
)
from herdcat.lincat import nat_space, representable_module

from test_lincat import codiscrete_cat, cyclic_group_cat, point_cat

GF5 = FieldSpec("gf", 5)


def test_hom_bifunctor_valid():
    for C in (point_cat(), codiscrete_cat(2), cyclic_group_cat(2)):
        assert check_bifunctor(hom_bifunctor(C)) == []


def test_coend_of_hom_point():
    res = coend(hom_bifunctor(point_cat()))
    assert res.dim == 1


def test_coend_of_hom_group_algebra():
    # abelian group algebra: conjugation is trivial, nothing is identified
    res = coend(hom_bifunctor(cyclic_group_cat(2)))
    assert res.total == 2 and res.dim == 2


def test_coend_of_hom_codiscrete():
    # two components glued through the connecting morphism
    res = coend(hom_bifunctor(codiscrete_cat(2)))
    assert res.total == 2 and res.dim == 1


def test_coend_proj_section():
    for C in (codiscrete_cat(3), cyclic_group_cat(3)):
        res = coend(hom_bifunctor(C))
        assert mat_mul(res.proj, res.section) == eye(GF5, res.dim)


def test_end_matches_nat_space():
    for C in (point_cat(), codiscrete_cat(2), cyclic_group_cat(2), cyclic_group_cat(3)):
        for a in range(C.n):
            M = representable_module(C, a)
            dim, incl = end(module_hom_bifunctor(M, M))
            nat_dim, _ = nat_space(M, M)
            assert dim == nat_dim


def test_coyoneda_collapse_point():
    C = point_cat()
    M = representable_module(C, 0)
    res, fwd, bwd = module_coyoneda(M, 0)
    assert res.dim == 1
    assert mat_mul(fwd, bwd) == eye(GF5, 1)
    assert mat_mul(bwd, fwd) == eye(GF5, res.dim)


def test_coyoneda_collapse_group():
    C = cyclic_group_cat(2)
    M = representable_module(C, 0)  # the regular module
    res, fwd, bwd = module_coyoneda(M, 0)
    assert res.dim == 2
    assert mat_mul(fwd, bwd) == eye(GF5, 2)
    assert mat_mul(bwd, fwd) == eye(GF5, res.dim)


def test_coyoneda_collapse_codiscrete():
    C = codiscrete_cat(2)
    for a in range(2):
        M = representable_module(C, a)
        res, fwd, bwd = module_coyoneda(M, a)
        assert res.dim == 1
        assert is_invertible(fwd)
        assert mat_mul(fwd, bwd) == eye(GF5, 1)


def _three_hom_diagram(C, u, v):
    """coend_{x,y} C(u,x) (x) C(x,y) (x) C(y,v) via TensorDiagram."""
    F = C.field
    from herdcat.lincat import postcompose, precompose

    f1 = Factor([Leg("x", +1)],
                lambda vals: C.dim(u, vals[0]),
                lambda pos, vals, new, b: postcompose(
                    C, u, vals[0], new, basis_vec(F, C.dim(vals[0], new), b)))

    def f2_act(pos, vals, new, b):
        x, y = vals
        if pos == 0:   # contravariant x leg: morphism new -> old
            return precompose(C, new, x, y, basis_vec(F, C.dim(new, x), b))
        return postcompose(C, x, y, new, basis_vec(F, C.dim(y, new), b))

    f2 = Factor([Leg("x", -1), Leg("y", +1)],
                lambda vals: C.dim(vals[0], vals[1]), f2_act)
    f3 = Factor([Leg("y", -1)],
                lambda vals: C.dim(vals[0], v),
                lambda pos, vals, new, b: precompose(
                    C, new, vals[0], v, basis_vec(F, C.dim(new, vals[0]), b)))
    return TensorDiagram(F, {"x": C, "y": C}, [f1, f2, f3], ("x", "y"))


def test_tensor_diagram_double_collapse():
    # coend_{x,y} C(u,x) . C(x,y) . C(y,v) has the dimension of C(u,v)
    for C in (point_cat(), codiscrete_cat(2), cyclic_group_cat(2)):
        for u in range(C.n):
            for v in range(C.n):
                td = _three_hom_diagram(C, u, v)
                dim, proj, section = td.eliminate(("x", "y"))
                assert dim == C.dim(u, v)
                dim2, _, _ = td.eliminate(("y", "x"))
                assert dim2 == dim
                assert mat_mul(proj, section) == eye(C.field, dim)
