"""Transform, convolution, duality, internal homs, adjunction."""

import pytest

from herdcat.exactlin import FieldSpec, eye, is_invertible, mat_mul
from herdcat.flock import (
    cyclic_group_table, cyclic_heap, flock_abelian_group_algebra,
    flock_codiscrete, flock_point, flock_product,
)
from herdcat.herdoid import antipode, build_h, kleisli, unit_module
from herdcat.fourier import (
    adjunction_failures, associativity_failures, bimodule_compose,
    bimodule_unit, bimodule_unit_law_failures, conservativity_failures,
    convolve, direct_dims_failures, dual_module, duality_preservation_failures,
    fourier_comparison_failures, hmodule_hom_left, hmodule_hom_right,
    internal_hom_right, multiplicativity_failures, restrict,
    right_adjoint, sample_bimodules, sample_hmodules, star_autonomy_failures,
    unit_comparison_failures,
)
from herdcat.lincat import check_module, nat_space, representable_module

GF5 = FieldSpec("gf", 5)
GF7 = FieldSpec("gf", 7)


def setup_instance(F):
    H = build_h(F)
    h = kleisli(F, H)
    j = unit_module(F, H)
    return H, h, j


def small_instances():
    return [
        flock_point(GF5),
        flock_codiscrete(cyclic_heap(2), GF5),
        flock_abelian_group_algebra(cyclic_group_table(2), GF5),
    ]


def test_restrict_unit_values():
    for F in small_instances():
        H, h, j = setup_instance(F)
        res = restrict(H, h, j)
        assert check_module(res) == []
        for B in range(H.bimodule_base.n):
            a, b = H.unpair(B)
            assert res.valdim[B] == F.A.dim(a, b)


def test_restrict_g2_regular_dims():
    F = flock_abelian_group_algebra(cyclic_group_table(2), GF5)
    H, h, j = setup_instance(F)
    assert restrict(H, h, j).valdim == (2,)


def test_fourier_comparison():
    for F in small_instances():
        H, h, j = setup_instance(F)
        assert fourier_comparison_failures(F, H, h, j) == [], F.name
        Y = representable_module(H.underlying, 0)
        assert fourier_comparison_failures(F, H, h, Y) == [], F.name


def test_bimodule_unit_passes():
    for F in small_instances():
        H, h, j = setup_instance(F)
        U = bimodule_unit(F, H)
        assert check_module(U) == [], F.name


def test_bimodule_unit_laws():
    for F in small_instances():
        H, h, j = setup_instance(F)
        U = bimodule_unit(F, H)
        assert bimodule_unit_law_failures(F, H, U) == [], F.name
        assert bimodule_unit_law_failures(F, H, restrict(H, h, j)) == [], F.name


def test_bimodule_compose_regular_g2():
    F = flock_abelian_group_algebra(cyclic_group_table(2), GF5)
    H, h, j = setup_instance(F)
    reg = restrict(H, h, j)
    comp = bimodule_compose(F, H, reg, reg)
    assert comp.module.valdim == (2,)
    assert check_module(comp.module) == []


def test_convolve_unit_dims():
    expected = {"point": 1, "c2": 1, "g2": 2}
    for F in small_instances():
        H, h, j = setup_instance(F)
        conv = convolve(F, H, h, j, j)
        assert check_module(conv.module) == [], F.name
        want = expected[F.name]
        for P in range(H.underlying.n):
            assert conv.module.valdim[P] == want, F.name


def test_convolve_unit_dims_g3():
    F = flock_abelian_group_algebra(cyclic_group_table(3), GF7)
    H, h, j = setup_instance(F)
    conv = convolve(F, H, h, j, j)
    assert conv.module.valdim == (3,)
    assert check_module(conv.module) == []


def test_unit_comparisons():
    for F in small_instances():
        H, h, j = setup_instance(F)
        assert unit_comparison_failures(F, H, h, j, j) == [], F.name
        Y = representable_module(H.underlying, 0)
        assert unit_comparison_failures(F, H, h, j, Y) == [], F.name


def test_unit_comparisons_g3():
    F = flock_abelian_group_algebra(cyclic_group_table(3), GF7)
    H, h, j = setup_instance(F)
    assert unit_comparison_failures(F, H, h, j, j) == []


def test_associativity():
    for F in small_instances():
        H, h, j = setup_instance(F)
        Y = representable_module(H.underlying, 0)
        assert associativity_failures(F, H, h, j, j, j) == [], F.name
        assert associativity_failures(F, H, h, j, Y, j) == [], F.name


def test_direct_dims():
    for F in small_instances():
        H, h, j = setup_instance(F)
        assert direct_dims_failures(F, H, h, j, j) == [], F.name


def test_multiplicativity():
    for F in small_instances():
        H, h, j = setup_instance(F)
        assert multiplicativity_failures(F, H, h, j, j) == [], F.name


def test_dual_module_dims_and_laws():
    for F in small_instances():
        H, h, j = setup_instance(F)
        S = antipode(F, H)
        dj = dual_module(F, H, S, j)
        assert check_module(dj) == [], F.name
        for P in range(H.underlying.n):
            assert dj.valdim[P] == j.valdim[S.objmap[P]]
        assert duality_preservation_failures(F, H, h, S, j) == [], F.name


def test_dual_g2_double_dual():
    F = flock_abelian_group_algebra(cyclic_group_table(2), GF5)
    H, h, j = setup_instance(F)
    S = antipode(F, H)
    dj = dual_module(F, H, S, j)
    assert dj.valdim == (2,)
    assert duality_preservation_failures(F, H, h, S, j) == []


def test_internal_hom_unit_case():
    for F in small_instances():
        H, h, j = setup_instance(F)
        U = bimodule_unit(F, H)
        P = restrict(H, h, j)
        homUP, _ = internal_hom_right(F, H, U, P)
        assert check_module(homUP) == [], F.name
        assert homUP.valdim == P.valdim, F.name


def test_hmodule_homs_pass_and_adjoint_dims():
    for F in small_instances():
        H, h, j = setup_instance(F)
        hr, _ = hmodule_hom_right(F, H, h, j, j)
        assert check_module(hr) == [], F.name
        hl, _ = hmodule_hom_left(F, H, h, j, j)
        assert check_module(hl) == [], F.name
        conv = convolve(F, H, h, j, j)
        lhs, _ = nat_space(conv.module, j)
        rhs, _ = nat_space(j, hr)
        lhs2, _ = nat_space(j, hl)
        assert lhs == rhs == lhs2, F.name


def test_right_adjoint_and_adjunction():
    for F in small_instances():
        H, h, j = setup_instance(F)
        U = bimodule_unit(F, H)
        KU, _ = right_adjoint(F, H, h, U)
        assert check_module(KU) == [], F.name
        assert adjunction_failures(F, H, h, j, U) == [], F.name


def test_adjunction_g2_regular():
    F = flock_abelian_group_algebra(cyclic_group_table(2), GF5)
    H, h, j = setup_instance(F)
    reg = restrict(H, h, j)
    d1, _ = nat_space(reg, reg)
    KP, _ = right_adjoint(F, H, h, reg)
    d2, _ = nat_space(j, KP)
    assert d1 == d2 == 2
    assert adjunction_failures(F, H, h, j, reg) == []


def test_conservativity():
    for F in small_instances():
        H, h, j = setup_instance(F)
        S = antipode(F, H)
        samples = sample_hmodules(F, H, h, S, j, seed=1, count=3)
        assert conservativity_failures(F, H, h, samples, seed=1) == [], F.name


def test_star_autonomy():
    for F in small_instances():
        H, h, j = setup_instance(F)
        S = antipode(F, H)
        samples = sample_hmodules(F, H, h, S, j, seed=1, count=2)
        assert star_autonomy_failures(F, H, h, S, j, samples) == [], F.name
