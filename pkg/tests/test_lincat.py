"""Category/module layer: axiom checkers, opposites, tensors, Yoneda."""

import pytest

from herdcat.exactlin import (
    FieldSpec, ShapeError, basis_vec, col_vec, eye, mat, mat_of_ints, zeros,
)
from herdcat.lincat import (
    FinLinCat, Module, check_category, check_functor, check_module,
    compose_functors, identity_functor, nat_space, opposite, pair_index,
    representable_module, tensor_cat, zero_module,
)

GF5 = FieldSpec("gf", 5)


def point_cat(F=GF5):
    one = F.one
    return FinLinCat(F, ("*",), ((1,),),
                     {(0, 0, 0): mat(F, [[one]])},
                     {0: col_vec(F, [one])})


def codiscrete_cat(n, F=GF5):
    one = F.one
    objects = tuple(str(i) for i in range(n))
    homdim = tuple(tuple(1 for _ in range(n)) for _ in range(n))
    comp = {(a, b, c): mat(F, [[one]]) for a in range(n) for b in range(n) for c in range(n)}
    ident = {a: col_vec(F, [one]) for a in range(n)}
    return FinLinCat(F, objects, homdim, comp, ident)


def cyclic_group_cat(m, F=GF5):
    """One object, hom = k[Z/m], composition = group multiplication."""
    rows = [[F.zero] * (m * m) for _ in range(m)]
    for f in range(m):
        for g in range(m):
            rows[(f + g) % m][f + m * g] = F.one
    return FinLinCat(F, ("*",), ((m,),), {(0, 0, 0): mat(F, rows)},
                     {0: basis_vec(F, m, 0)})


def test_point_passes():
    assert check_category(point_cat()) == []


def test_codiscrete_passes():
    assert check_category(codiscrete_cat(2)) == []
    assert check_category(codiscrete_cat(3)) == []


def test_group_algebra_passes():
    assert check_category(cyclic_group_cat(2)) == []
    assert check_category(cyclic_group_cat(3)) == []


def test_zeroed_identity_fails_unit_law():
    C = codiscrete_cat(2)
    bad = FinLinCat(C.field, C.objects, C.homdim, C.comp,
                    {0: zeros(GF5, 1, 1), 1: C.ident[1]})
    fails = check_category(bad)
    assert any(law.endswith("unit") and "(0," in wit for law, wit in fails)
    assert all("1" != wit for law, wit in fails)


def test_malformed_raises_shape_error():
    C = codiscrete_cat(2)
    bad = FinLinCat(C.field, C.objects, C.homdim,
                    {k: (zeros(GF5, 2, 1) if k == (0, 0, 0) else v)
                     for k, v in C.comp.items()},
                    C.ident)
    with pytest.raises(ShapeError):
        check_category(bad)


def test_opposite_involution():
    for C in (point_cat(), codiscrete_cat(3), cyclic_group_cat(3)):
        assert opposite(opposite(C)) == C
        assert check_category(opposite(C)) == []


def test_tensor_with_point():
    C = cyclic_group_cat(2)
    T = tensor_cat(point_cat(), C)
    assert T.n == C.n
    assert T.homdim == C.homdim
    assert check_category(T) == []
    assert T.comp[(0, 0, 0)] == C.comp[(0, 0, 0)]


def test_tensor_homdims():
    T = tensor_cat(codiscrete_cat(2), cyclic_group_cat(2))
    assert T.n == 2
    assert all(T.dim(a, b) == 2 for a in range(2) for b in range(2))
    assert check_category(T) == []


def test_tensor_pair_order_lexicographic():
    T = tensor_cat(codiscrete_cat(2), codiscrete_cat(3))
    assert T.objects[pair_index(1, 2, 3)] == "(1,2)"
    assert T.objects == ("(0,0)", "(0,1)", "(0,2)", "(1,0)", "(1,1)", "(1,2)")


def test_representable_module_passes():
    for C in (point_cat(), codiscrete_cat(2), cyclic_group_cat(3)):
        for a in range(C.n):
            assert check_module(representable_module(C, a)) == []


def test_zero_module_passes():
    assert check_module(zero_module(cyclic_group_cat(2))) == []


def test_corrupted_module_fails_composition():
    C = codiscrete_cat(2)
    Y = representable_module(C, 0)
    act = dict(Y.act)
    act[(0, 1)] = zeros(GF5, 1, 1)
    fails = check_module(Module(C, Y.valdim, act))
    assert any(law == "module-composition" for law, _ in fails)


def test_nat_space_point():
    C = point_cat()
    Y = representable_module(C, 0)
    dim, basis = nat_space(Y, Y)
    assert dim == 1
    assert basis[0][0] == eye(GF5, 1) or basis[0][0].data[0][0] != 0


def test_yoneda_dimension():
    # Nat(Y_a, M) has dimension valdim M(a), exactly
    for C in (codiscrete_cat(2), cyclic_group_cat(2), cyclic_group_cat(3)):
        for a in range(C.n):
            Y = representable_module(C, a)
            for b in range(C.n):
                M = representable_module(C, b)
                dim, _ = nat_space(Y, M)
                assert dim == M.valdim[a]


def test_nat_space_group_regular():
    # endomorphisms of the regular module of k[Z/2] form a 2-dim space
    C = cyclic_group_cat(2)
    Y = representable_module(C, 0)
    dim, basis = nat_space(Y, Y)
    assert dim == 2


def test_identity_functor_and_composition():
    C = cyclic_group_cat(3)
    I = identity_functor(C)
    assert check_functor(I) == []
    II = compose_functors(I, I)
    assert check_functor(II) == []
    assert II.objmap == I.objmap and II.hommap == I.hommap


def test_functor_detects_broken_hom_map():
    C = cyclic_group_cat(2)
    F = identity_functor(C)
    broken = {k: v for k, v in F.hommap.items()}
    broken[(0, 0)] = mat_of_ints(GF5, [[1, 1], [0, 1]])
    from herdcat.lincat import LinFunctor
    fails = check_functor(LinFunctor(C, C, F.objmap, broken))
    assert fails != []
