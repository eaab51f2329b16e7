"""Herd datum: heap laws, transport functoriality, pairings, builders."""

import pytest

from herdcat.exactlin import FieldSpec, ShapeError, eye, mat, mat_of_ints
from herdcat.flock import (
    FlockDatum, check_flock, cyclic_group_table, cyclic_heap,
    flock_abelian_group_algebra, flock_codiscrete, flock_point, flock_product,
    _group_algebra_flock, is_abelian_table, validate_heap_table,
)

GF5 = FieldSpec("gf", 5)
GF7 = FieldSpec("gf", 7)
QQ = FieldSpec("q")


def perm_compose(p, q):
    """(p then q) as a permutation tuple."""
    return tuple(q[p[i]] for i in range(len(p)))


def s3_table():
    """Multiplication table of the symmetric group on 3 letters."""
    elems = [(0, 1, 2), (1, 0, 2), (2, 1, 0), (0, 2, 1), (1, 2, 0), (2, 0, 1)]
    idx = {p: i for i, p in enumerate(elems)}
    return tuple(tuple(idx[perm_compose(elems[b], elems[a])] for b in range(6))
                 for a in range(6))


def test_point_passes():
    for field in (GF5, QQ):
        assert check_flock(flock_point(field)) == []


def test_codiscrete_passes():
    assert check_flock(flock_codiscrete(cyclic_heap(2), GF5)) == []
    assert check_flock(flock_codiscrete(cyclic_heap(3), GF5)) == []


def test_codiscrete_dimensions():
    F = flock_codiscrete(cyclic_heap(2), GF5)
    assert F.A.n == 2 and all(F.A.dim(a, b) == 1 for a in range(2) for b in range(2))


def test_bad_heap_table_rejected():
    table = [[[ (a - b + c) % 2 for c in range(2)] for b in range(2)] for a in range(2)]
    table[0][0][1] = 0  # violates tau(a,a,b) = b
    with pytest.raises(ShapeError) as e:
        validate_heap_table(table)
    assert "heap-left-unit" in str(e.value)


def test_group_algebra_z2_gf5():
    F = flock_abelian_group_algebra(cyclic_group_table(2), GF5)
    assert F.A.dim(0, 0) == 2
    assert check_flock(F) == []


def test_group_algebra_z3_gf7():
    F = flock_abelian_group_algebra(cyclic_group_table(3), GF7)
    assert F.A.dim(0, 0) == 3
    assert check_flock(F) == []


def test_group_algebra_rationals():
    assert check_flock(flock_abelian_group_algebra(cyclic_group_table(2), QQ)) == []


def test_s3_rejected():
    assert not is_abelian_table(s3_table())
    with pytest.raises(ShapeError) as e:
        flock_abelian_group_algebra(s3_table(), GF5)
    assert "abelian" in str(e.value)


def test_s3_forced_fails_functoriality():
    # building x y^-1 z transports from a non-abelian table breaks
    # tau_hom functoriality, and check_flock pins that down
    F = _group_algebra_flock(s3_table(), GF5, "s3", require_abelian=False)
    fails = check_flock(F)
    assert any(law == "tau-hom-composition" for law, _ in fails)


def test_group_order_warning():
    import warnings
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        flock_abelian_group_algebra(cyclic_group_table(5), GF5)
    assert any("not invertible" in str(x.message) for x in w)


def test_product_point_is_identity_like():
    F = flock_abelian_group_algebra(cyclic_group_table(2), GF5)
    P = flock_product(flock_point(GF5), F)
    assert P.A.n == F.A.n
    assert P.A.homdim == F.A.homdim
    assert check_flock(P) == []


def test_product_c2_g2():
    c2 = flock_codiscrete(cyclic_heap(2), GF5)
    g2 = flock_abelian_group_algebra(cyclic_group_table(2), GF5)
    P = flock_product(c2, g2)
    assert P.A.n == 2
    assert all(P.A.dim(a, b) == 2 for a in range(2) for b in range(2))
    assert check_flock(P) == []


def test_corrupted_sigma_detected():
    F = flock_abelian_group_algebra(cyclic_group_table(2), GF5)
    sigma = dict(F.sigma)
    sigma[(0, 0)] = mat_of_ints(GF5, [[1, 1], [1, 1]])
    bad = FlockDatum(F.name, F.A, F.tau_obj, F.tau_hom, sigma, F.rho)
    fails = check_flock(bad)
    assert any(law.startswith("sigma") for law, _ in fails)


def test_sigma_trace_holds_on_builders():
    # the trace form sigma(f,h) agrees with sigma(1, h.f) on the group case
    F = flock_abelian_group_algebra(cyclic_group_table(3), GF7)
    assert all(law != "sigma-trace" for law, _ in check_flock(F))
