"""Pair category, Kleisli functor, antipode, promonoidal data."""

import pytest

from herdcat.exactlin import FieldSpec, basis_vec, eye, mat_mul, mat_of_ints
from herdcat.flock import (
    cyclic_group_table, cyclic_heap, flock_abelian_group_algebra,
    flock_codiscrete, flock_point, flock_product,
)
from herdcat.herdoid import (
    antipode, antipode_involution_failures, build_h, check_promonoidal_actions,
    kleisli, p_dim, unit_collapse_check, unit_module,
)
from herdcat.lincat import check_category, check_functor, check_module

GF5 = FieldSpec("gf", 5)
GF7 = FieldSpec("gf", 7)


def all_flocks():
    c2 = flock_codiscrete(cyclic_heap(2), GF5)
    g2 = flock_abelian_group_algebra(cyclic_group_table(2), GF5)
    return [
        flock_point(FieldSpec("q")),
        c2,
        flock_codiscrete(cyclic_heap(3), GF5),
        g2,
        flock_abelian_group_algebra(cyclic_group_table(3), GF7),
        flock_product(c2, g2),
    ]


def test_build_h_point():
    F = flock_point(GF5)
    H = build_h(F)
    assert H.underlying.n == 1 and H.underlying.dim(0, 0) == 1
    assert check_category(H.underlying) == []


def test_build_h_g2_is_group_multiplication():
    F = flock_abelian_group_algebra(cyclic_group_table(2), GF5)
    H = build_h(F)
    C = H.underlying
    assert C.n == 1 and C.dim(0, 0) == 2
    # tau_hom(f,1,1) = f here, so pair composition is the algebra product
    assert C.comp[(0, 0, 0)] == F.A.comp[(0, 0, 0)]
    assert check_category(C) == []


def test_build_h_c2_dimensions():
    F = flock_codiscrete(cyclic_heap(2), GF5)
    H = build_h(F)
    C = H.underlying
    assert C.n == 4
    assert sum(C.dim(a, b) for a in range(4) for b in range(4)) == 16
    assert check_category(C) == []


def test_build_h_all_instances_pass():
    for F in all_flocks():
        H = build_h(F)
        assert check_category(H.underlying) == [], F.name


def test_kleisli_functor_checks():
    for F in all_flocks():
        H = build_h(F)
        h = kleisli(F, H)
        assert check_functor(h) == [], F.name
        assert h.objmap == tuple(range(H.underlying.n))  # bijective on objects


def test_kleisli_identity_case():
    F = flock_abelian_group_algebra(cyclic_group_table(2), GF5)
    H = build_h(F)
    h = kleisli(F, H)
    # kappa(1 (x) 1) = 1
    v = mat_mul(h.hommap[(0, 0)], mat_of_ints(GF5, [[1], [0], [0], [0]]))
    assert v.column(0) == (1, 0)


def test_kleisli_g3_is_translation_by_inverse():
    table = cyclic_group_table(3)
    F = flock_abelian_group_algebra(table, GF7)
    H = build_h(F)
    h = kleisli(F, H)
    # kappa(u (x) v) = v * u^{-1} on group basis elements
    n = 3
    inv = [0, 2, 1]
    K = h.hommap[(0, 0)]
    for u in range(n):
        for v in range(n):
            col = K.column(u + n * v)
            expect = tuple(1 if g == (v + inv[u]) % 3 else 0 for g in range(3))
            assert col == expect


def test_antipode_point_is_identity():
    F = flock_point(GF5)
    H = build_h(F)
    S = antipode(F, H)
    assert check_functor(S) == []
    assert S.hommap[(0, 0)] == eye(GF5, 1)


def test_antipode_g2_g3_is_inversion():
    for n, field in ((2, GF5), (3, GF7)):
        F = flock_abelian_group_algebra(cyclic_group_table(n), field)
        H = build_h(F)
        S = antipode(F, H)
        assert check_functor(S) == []
        M = S.hommap[(0, 0)]
        for g in range(n):
            col = M.column(g)
            expect = tuple(field.one if i == (-g) % n else field.zero for i in range(n))
            assert col == expect
        assert antipode_involution_failures(H, S) == []


def test_antipode_codiscrete_swaps_objects():
    F = flock_codiscrete(cyclic_heap(2), GF5)
    H = build_h(F)
    S = antipode(F, H)
    assert check_functor(S) == []
    assert S.objmap == (0, 2, 1, 3)
    assert all(S.hommap[k] == eye(GF5, 1) for k in S.hommap)
    assert antipode_involution_failures(H, S) == []


def test_antipode_all_instances():
    for F in all_flocks():
        H = build_h(F)
        S = antipode(F, H)
        assert check_functor(S) == [], F.name
        assert antipode_involution_failures(H, S) == [], F.name


def test_antipode_from_explicit_s_hom():
    from herdcat.flock import FlockDatum
    base = flock_abelian_group_algebra(cyclic_group_table(3), GF7)
    s_mat = base.sigma[(0, 0)]  # inversion permutation in the group basis
    withs = FlockDatum(base.name, base.A, base.tau_obj, base.tau_hom,
                       base.sigma, None, {(0, 0, 0, 0): s_mat})
    H = build_h(withs)
    S = antipode(withs, H)
    assert check_functor(S) == []


def test_unit_module_passes_everywhere():
    for F in all_flocks():
        H = build_h(F)
        j = unit_module(F, H)
        assert check_module(j) == [], F.name


def test_unit_module_g2_is_regular():
    F = flock_abelian_group_algebra(cyclic_group_table(2), GF5)
    H = build_h(F)
    j = unit_module(F, H)
    assert j.valdim == (2,)
    # action of a basis morphism is left multiplication
    for g in range(2):
        Mg = mat_mul(j.act[(0, 0)],
                     __import__("herdcat.exactlin", fromlist=["kron"]).kron(
                         basis_vec(GF5, 2, g), eye(GF5, 2)))
        for m in range(2):
            assert Mg.column(m) == tuple(1 if i == (g + m) % 2 else 0 for i in range(2))


def test_p_dims():
    g2 = flock_abelian_group_algebra(cyclic_group_table(2), GF5)
    assert p_dim(g2, (0,) * 6) == 4
    c2 = flock_codiscrete(cyclic_heap(2), GF5)
    for a in range(2):
        for b in range(2):
            for c in range(2):
                assert p_dim(c2, (a, b, c, 0, 1, 0)) == 1


def test_promonoidal_actions_point_g2():
    assert check_promonoidal_actions(flock_point(GF5)) == []
    assert check_promonoidal_actions(
        flock_abelian_group_algebra(cyclic_group_table(2), GF5)) == []


def test_unit_collapse_g2_c2():
    for F in (flock_abelian_group_algebra(cyclic_group_table(2), GF5),
              flock_codiscrete(cyclic_heap(2), GF5)):
        H = build_h(F)
        for P1 in range(H.underlying.n):
            for P2 in range(H.underlying.n):
                dim_ok, steps_ok = unit_collapse_check(F, H, P1, P2)
                assert dim_ok and steps_ok, (F.name, P1, P2)
