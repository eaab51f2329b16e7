"""The herd datum: a finite linear category with a strict ternary object
operation, hom-level transports, and duality pairings.

Strictness: the heap laws hold as equalities of objects,

    tau(a,b,b) = a,   tau(a,a,b) = b,
    tau(tau(a,b,c),d,e) = tau(a,b,tau(c,d,e)),

and the transports along repeated-object slots are identities.  The
hom-level transport tau_hom is a functor A (x) A^op (x) A -> A; its
middle slot is contravariant.  All of this is checked exhaustively by
check_flock, never assumed.

tau_hom[(a,b,c,a2,b2,c2)] is the matrix of

    A(a,a2) (x) A(b2,b) (x) A(c,c2) -> A(tau(a,b,c), tau(a2,b2,c2))

with the column of (f,g,h) at index f + d1*g + d1*d2*h.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .exactlin import (
    ShapeError, basis_vec, col_vec, eye, is_invertible, kron, kron3, mat,
    mat_mul, transpose, zeros,
)
from .lincat import FinLinCat, comp_apply, pair_index, tensor_cat, validate_category_shapes


@dataclass(frozen=True)
class FlockDatum:
    name: str
    A: FinLinCat
    tau_obj: tuple        # tau_obj[a][b][c] = object index
    tau_hom: dict         # (a,b,c,a2,b2,c2) -> Mat
    sigma: dict           # (a,b) -> Gram matrix of A(a,b) (x) A(b,a) -> k
    rho: dict = None      # (a,b,c,d) -> Gram of A(b,tau(a,c,d)) (x) A(a,tau(b,d,c)) -> k
    s_hom: dict = None    # (a,b,c,d) -> antipode matrix, see herdoid

    def tau(self, a, b, c):
        return self.tau_obj[a][b][c]


def tau_apply(F, src, dst, fvec, gvec, hvec):
    """Transport along (f: a->a2, g: b2->b, h: c->c2) as a column vector."""
    key = src + dst
    return mat_mul(F.tau_hom[key], kron3(fvec, gvec, hvec))


def transport_right(F, x, y, c, d):
    """Matrix of A(x,y) -> A(tau(x,c,d), tau(y,c,d)), f |-> tau_hom(f, 1_c, 1_d)."""
    A = F.A
    return mat_mul(F.tau_hom[(x, c, d, y, c, d)],
                   kron3(eye(A.field, A.dim(x, y)), A.ident[c], A.ident[d]))


def transport_left(F, c, d, x, y):
    """Matrix of A(x,y) -> A(tau(c,d,x), tau(c,d,y)), f |-> tau_hom(1_c, 1_d, f)."""
    A = F.A
    P = kron(kron(A.ident[c], A.ident[d]), eye(A.field, A.dim(x, y)))
    return mat_mul(F.tau_hom[(c, d, x, c, d, y)], P)


def transport_middle(F, c, x, y, d):
    """Matrix of A(x,y) -> A(tau(c,y,d), tau(c,x,d)), f |-> tau_hom(1_c, f, 1_d)."""
    A = F.A
    P = kron(kron(A.ident[c], eye(A.field, A.dim(x, y))), A.ident[d])
    return mat_mul(F.tau_hom[(c, y, d, c, x, d)], P)


def validate_flock_shapes(F):
    A = F.A
    validate_category_shapes(A)
    n = A.n
    t = F.tau_obj
    if len(t) != n or any(len(r) != n for r in t) or \
       any(len(rr) != n for r in t for rr in r) or \
       any(not (0 <= x < n) for r in t for rr in r for x in rr):
        raise ShapeError("tau object table is not a valid n x n x n table")
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for a2 in range(n):
                    for b2 in range(n):
                        for c2 in range(n):
                            key = (a, b, c, a2, b2, c2)
                            M = F.tau_hom.get(key)
                            want = (A.dim(F.tau(a, b, c), F.tau(a2, b2, c2)),
                                    A.dim(a, a2) * A.dim(b2, b) * A.dim(c, c2))
                            if want[0] * want[1] == 0 and M is None:
                                continue
                            if M is None or (M.rows, M.cols) != want:
                                raise ShapeError("tau_hom shape at %r" % (key,))
    for a in range(n):
        for b in range(n):
            S = F.sigma.get((a, b))
            want = (A.dim(a, b), A.dim(b, a))
            if S is None or (S.rows, S.cols) != want:
                raise ShapeError("sigma shape at %r" % ((a, b),))
    if F.rho is not None:
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    for d in range(n):
                        R = F.rho.get((a, b, c, d))
                        want = (A.dim(b, F.tau(a, c, d)), A.dim(a, F.tau(b, d, c)))
                        if R is None or (R.rows, R.cols) != want:
                            raise ShapeError("rho shape at %r" % ((a, b, c, d),))
    if F.s_hom is not None:
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    for d in range(n):
                        S = F.s_hom.get((a, b, c, d))
                        want = (A.dim(F.tau(a, b, d), c), A.dim(F.tau(d, c, a), b))
                        if S is None or (S.rows, S.cols) != want:
                            raise ShapeError("s_hom shape at %r" % ((a, b, c, d),))


def _heap_law_failures(tau, n, names):
    fails = []
    for a in range(n):
        for b in range(n):
            if tau[a][b][b] != a:
                fails.append(("heap-right-unit", "tau(%s,%s,%s)" % (names[a], names[b], names[b])))
            if tau[a][a][b] != b:
                fails.append(("heap-left-unit", "tau(%s,%s,%s)" % (names[a], names[a], names[b])))
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    for e in range(n):
                        if tau[tau[a][b][c]][d][e] != tau[a][b][tau[c][d][e]]:
                            fails.append(("heap-para-associativity",
                                          "tau(tau(%s,%s,%s),%s,%s)"
                                          % (names[a], names[b], names[c], names[d], names[e])))
    return fails


def check_flock(F):
    """Every flock invariant, exhaustively; returns (law, witness) failures."""
    validate_flock_shapes(F)
    A = F.A
    k = A.field
    n = A.n
    names = A.objects
    fails = list(_heap_law_failures(F.tau_obj, n, names))
    if fails:
        return fails  # transports below would index through broken laws

    # tau_hom preserves identities
    for a in range(n):
        for b in range(n):
            for c in range(n):
                t = F.tau(a, b, c)
                got = tau_apply(F, (a, b, c), (a, b, c), A.ident[a], A.ident[b], A.ident[c])
                if got != A.ident[t]:
                    fails.append(("tau-hom-identity", "at (%s,%s,%s)" % (names[a], names[b], names[c])))

    # tau_hom preserves composition, elementwise over basis morphisms
    for a in range(n):
     for a1 in range(n):
      for a2 in range(n):
       for b in range(n):
        for b1 in range(n):
         for b2 in range(n):
          for c in range(n):
           for c1 in range(n):
            for c2 in range(n):
                d_f, d_f2 = A.dim(a, a1), A.dim(a1, a2)
                d_g, d_g2 = A.dim(b1, b), A.dim(b2, b1)
                d_h, d_h2 = A.dim(c, c1), A.dim(c1, c2)
                if 0 in (d_f, d_f2, d_g, d_g2, d_h, d_h2):
                    continue
                for f in range(d_f):
                 for f2 in range(d_f2):
                  for g in range(d_g):
                   for g2 in range(d_g2):
                    for h in range(d_h):
                     for h2 in range(d_h2):
                        fv, f2v = basis_vec(k, d_f, f), basis_vec(k, d_f2, f2)
                        gv, g2v = basis_vec(k, d_g, g), basis_vec(k, d_g2, g2)
                        hv, h2v = basis_vec(k, d_h, h), basis_vec(k, d_h2, h2)
                        lhs = tau_apply(F, (a, b, c), (a2, b2, c2),
                                        comp_apply(A, a, a1, a2, fv, f2v),
                                        comp_apply(A, b2, b1, b, g2v, gv),
                                        comp_apply(A, c, c1, c2, hv, h2v))
                        inner = tau_apply(F, (a, b, c), (a1, b1, c1), fv, gv, hv)
                        outer = tau_apply(F, (a1, b1, c1), (a2, b2, c2), f2v, g2v, h2v)
                        rhs = comp_apply(A, F.tau(a, b, c), F.tau(a1, b1, c1),
                                         F.tau(a2, b2, c2), inner, outer)
                        if lhs != rhs:
                            fails.append(("tau-hom-composition",
                                          "at objects (%s,%s,%s)->(%s,%s,%s)->(%s,%s,%s)"
                                          % (names[a], names[b], names[c],
                                             names[a1], names[b1], names[c1],
                                             names[a2], names[b2], names[c2])))

    # transports along repeated-object slots are the identity
    for a in range(n):
        for x in range(n):
            for y in range(n):
                if A.dim(x, y) == 0:
                    continue
                I = eye(k, A.dim(x, y))
                if transport_right(F, x, y, a, a) != I:
                    fails.append(("tau-hom-respects-right-unit",
                                  "tau(-,%s,%s) on A(%s,%s)" % (names[a], names[a], names[x], names[y])))
                if transport_left(F, a, a, x, y) != I:
                    fails.append(("tau-hom-respects-left-unit",
                                  "tau(%s,%s,-) on A(%s,%s)" % (names[a], names[a], names[x], names[y])))

    # paired transports invert each other (strict para-associativity on homs)
    for x in range(n):
        for y in range(n):
            if A.dim(x, y) == 0:
                continue
            I = eye(k, A.dim(x, y))
            for c in range(n):
                for d in range(n):
                    fwd = transport_right(F, x, y, c, d)
                    bwd = transport_right(F, F.tau(x, c, d), F.tau(y, c, d), d, c)
                    if mat_mul(bwd, fwd) != I:
                        fails.append(("tau-hom-transport-inverse",
                                      "right transport by (%s,%s) on A(%s,%s)"
                                      % (names[c], names[d], names[x], names[y])))
                    fwd = transport_left(F, c, d, x, y)
                    bwd = transport_left(F, d, c, F.tau(c, d, x), F.tau(c, d, y))
                    if mat_mul(bwd, fwd) != I:
                        fails.append(("tau-hom-transport-inverse",
                                      "left transport by (%s,%s) on A(%s,%s)"
                                      % (names[c], names[d], names[x], names[y])))

    # sigma: nondegenerate and trace-compatible
    for a in range(n):
        for b in range(n):
            if A.dim(a, b) != A.dim(b, a):
                fails.append(("sigma-nondegenerate", "hom dims at (%s,%s) differ" % (names[a], names[b])))
            elif not is_invertible(F.sigma[(a, b)]):
                fails.append(("sigma-nondegenerate", "at (%s,%s)" % (names[a], names[b])))
    for a in range(n):
        for b in range(n):
            for c in range(n):
                d1, d2, d3 = A.dim(a, b), A.dim(b, c), A.dim(c, a)
                if 0 in (d1, d2, d3):
                    continue
                for f in range(d1):
                    fv = basis_vec(k, d1, f)
                    for g in range(d2):
                        gv = basis_vec(k, d2, g)
                        gf = comp_apply(A, a, b, c, fv, gv)
                        for h in range(d3):
                            hv = basis_vec(k, d3, h)
                            hg = comp_apply(A, b, c, a, gv, hv)
                            lhs = mat_mul(mat_mul(_row(gf), F.sigma[(a, c)]), hv)
                            rhs = mat_mul(mat_mul(_row(fv), F.sigma[(a, b)]), hg)
                            if lhs != rhs:
                                fails.append(("sigma-trace",
                                              "at (%s,%s,%s) basis (%d,%d,%d)"
                                              % (names[a], names[b], names[c], f, g, h)))

    if F.rho is not None:
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    for d in range(n):
                        if not is_invertible(F.rho[(a, b, c, d)]):
                            fails.append(("rho-nondegenerate",
                                          "at (%s,%s,%s,%s)" % (names[a], names[b], names[c], names[d])))
    return fails


def _row(v):
    return transpose(v)


def sigma_pair(F, a, b, fvec, gvec):
    """The scalar sigma_{a,b}(f, g) for f in A(a,b), g in A(b,a)."""
    return mat_mul(mat_mul(_row(fvec), F.sigma[(a, b)]), gvec).data[0][0]


# ---------------------------------------------------------------------------
# instance builders


def flock_point(field, name="point"):
    """One object, hom k, everything trivial."""
    one = field.one
    A = FinLinCat(field, ("*",), ((1,),), {(0, 0, 0): mat(field, [[one]])},
                  {0: col_vec(field, [one])})
    tau_hom = {(0,) * 6: mat(field, [[one]])}
    sigma = {(0, 0): mat(field, [[one]])}
    rho = {(0, 0, 0, 0): mat(field, [[one]])}
    return FlockDatum(name, A, ((((0,),),)), tau_hom, sigma, rho)


def validate_heap_table(table):
    """Raise ShapeError naming the first violated heap law."""
    n = len(table)
    if any(len(r) != n for r in table) or any(len(rr) != n for r in table for rr in r):
        raise ShapeError("heap table is not n x n x n")
    if any(not (0 <= x < n) for r in table for rr in r for x in rr):
        raise ShapeError("heap table entry out of range")
    fails = _heap_law_failures(table, n, tuple(str(i) for i in range(n)))
    if fails:
        law, wit = fails[0]
        raise ShapeError("heap law %s violated at %s" % (law, wit))


def cyclic_heap(n):
    """The heap of the cyclic group: tau(a,b,c) = a - b + c mod n."""
    return tuple(tuple(tuple((a - b + c) % n for c in range(n))
                       for b in range(n)) for a in range(n))


def flock_codiscrete(heap_table, field, name=None):
    """All hom spaces k over a finite strict heap; transports are scalars."""
    validate_heap_table(heap_table)
    n = len(heap_table)
    one = field.one
    objects = tuple(str(i) for i in range(n))
    homdim = tuple(tuple(1 for _ in range(n)) for _ in range(n))
    comp = {(a, b, c): mat(field, [[one]])
            for a in range(n) for b in range(n) for c in range(n)}
    ident = {a: col_vec(field, [one]) for a in range(n)}
    A = FinLinCat(field, objects, homdim, comp, ident)
    tau_obj = tuple(tuple(tuple(heap_table[a][b][c] for c in range(n))
                          for b in range(n)) for a in range(n))
    tau_hom = {}
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for a2 in range(n):
                    for b2 in range(n):
                        for c2 in range(n):
                            tau_hom[(a, b, c, a2, b2, c2)] = mat(field, [[one]])
    sigma = {(a, b): mat(field, [[one]]) for a in range(n) for b in range(n)}
    rho = {(a, b, c, d): mat(field, [[one]])
           for a in range(n) for b in range(n) for c in range(n) for d in range(n)}
    return FlockDatum(name or ("c%d" % n), A, tau_obj, tau_hom, sigma, rho)


def cyclic_group_table(n):
    return tuple(tuple((a + b) % n for b in range(n)) for a in range(n))


def group_table_check(table):
    """Validate a finite group table; returns (identity, inverse list)."""
    n = len(table)
    if any(len(r) != n for r in table) or any(not (0 <= x < n) for r in table for x in r):
        raise ShapeError("group table is not a valid n x n table")
    e = None
    for cand in range(n):
        if all(table[cand][x] == x and table[x][cand] == x for x in range(n)):
            e = cand
            break
    if e is None:
        raise ShapeError("group table has no identity")
    inv = [None] * n
    for x in range(n):
        for y in range(n):
            if table[x][y] == e and table[y][x] == e:
                inv[x] = y
        if inv[x] is None:
            raise ShapeError("group table element %d has no inverse" % x)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if table[table[a][b]][c] != table[a][table[b][c]]:
                    raise ShapeError("group table is not associative at (%d,%d,%d)" % (a, b, c))
    return e, inv


def is_abelian_table(table):
    n = len(table)
    return all(table[a][b] == table[b][a] for a in range(n) for b in range(n))


def _group_algebra_flock(table, field, name, require_abelian=True):
    n = len(table)
    e, inv = group_table_check(table)
    if require_abelian and not is_abelian_table(table):
        wit = next((a, b) for a in range(n) for b in range(n)
                   if table[a][b] != table[b][a])
        raise ShapeError("group is not abelian: %d*%d != %d*%d" % (wit[0], wit[1], wit[1], wit[0]))
    if field.kind == "gf" and n % field.modulus == 0:
        warnings.warn("group order %d is not invertible in GF(%d)" % (n, field.modulus))
    one, zero = field.one, field.zero
    comp_rows = [[zero] * (n * n) for _ in range(n)]
    for f in range(n):
        for g in range(n):
            comp_rows[table[g][f]][f + n * g] = one  # g . f = product g*f
    A = FinLinCat(field, ("*",), ((n,),), {(0, 0, 0): mat(field, comp_rows)},
                  {0: basis_vec(field, n, e)})
    th = [[zero] * (n * n * n) for _ in range(n)]
    for x in range(n):
        for y in range(n):
            for z in range(n):
                th[table[table[x][inv[y]]][z]][x + n * y + n * n * z] = one
    sig = [[one if y == inv[x] else zero for y in range(n)] for x in range(n)]
    return FlockDatum(name, A, ((((0,),),)),
                      {(0,) * 6: mat(field, th)},
                      {(0, 0): mat(field, sig)},
                      {(0, 0, 0, 0): eye(field, n)})


def flock_abelian_group_algebra(table, field, name=None):
    """One object, hom the group algebra, tau(x,y,z) = x y^-1 z on the basis.

    The pairing sigma(x,y) is 1 when y = x^-1 and 0 otherwise; rho is the
    Kronecker pairing in the group basis.  Non-abelian tables are
    rejected: the basis transport x y^-1 z fails functoriality exactly
    when the group is non-abelian.
    """
    return _group_algebra_flock(table, field, name or ("g%d" % len(table)),
                                require_abelian=True)


def flock_product(F1, F2, name=None):
    """Componentwise product: object pairs, tensored homs and pairings."""
    if F1.A.field != F2.A.field:
        raise ShapeError("field mismatch in flock_product")
    field = F1.A.field
    A = tensor_cat(F1.A, F2.A)
    n1, n2 = F1.A.n, F2.A.n

    def pi(i, j):
        return pair_index(i, j, n2)

    def unpack(p):
        return divmod(p, n2)

    n = A.n
    tau_obj = [[[None] * n for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(n):
            for c in range(n):
                a1, a2 = unpack(a)
                b1, b2 = unpack(b)
                c1, c2 = unpack(c)
                tau_obj[a][b][c] = pi(F1.tau(a1, b1, c1), F2.tau(a2, b2, c2))
    tau_obj = tuple(tuple(tuple(r) for r in rr) for rr in tau_obj)

    tau_hom = {}
    for a in range(n):
     for b in range(n):
      for c in range(n):
       for a2 in range(n):
        for b2 in range(n):
         for c2 in range(n):
            ai, aj = unpack(a)
            bi, bj = unpack(b)
            ci, cj = unpack(c)
            a2i, a2j = unpack(a2)
            b2i, b2j = unpack(b2)
            c2i, c2j = unpack(c2)
            dims1 = (F1.A.dim(ai, a2i), F1.A.dim(b2i, bi), F1.A.dim(ci, c2i))
            dims2 = (F2.A.dim(aj, a2j), F2.A.dim(b2j, bj), F2.A.dim(cj, c2j))
            d1 = A.dim(a, a2)
            d2 = A.dim(b2, b)
            d3 = A.dim(c, c2)
            rows_out = A.dim(tau_obj[a][b][c], tau_obj[a2][b2][c2])
            cols = [None] * (d1 * d2 * d3)
            for f1 in range(dims1[0]):
             for f2 in range(dims2[0]):
              for g1 in range(dims1[1]):
               for g2 in range(dims2[1]):
                for h1 in range(dims1[2]):
                 for h2 in range(dims2[2]):
                    v1 = tau_apply(F1, (ai, bi, ci), (a2i, b2i, c2i),
                                   basis_vec(field, dims1[0], f1),
                                   basis_vec(field, dims1[1], g1),
                                   basis_vec(field, dims1[2], h1))
                    v2 = tau_apply(F2, (aj, bj, cj), (a2j, b2j, c2j),
                                   basis_vec(field, dims2[0], f2),
                                   basis_vec(field, dims2[1], g2),
                                   basis_vec(field, dims2[2], h2))
                    fi = f1 + dims1[0] * f2
                    gi = g1 + dims1[1] * g2
                    hi = h1 + dims1[2] * h2
                    cols[fi + d1 * gi + d1 * d2 * hi] = kron(v1, v2).column(0)
            if cols and rows_out:
                tau_hom[(a, b, c, a2, b2, c2)] = transpose(mat(field, cols))
            else:
                tau_hom[(a, b, c, a2, b2, c2)] = zeros(field, rows_out, d1 * d2 * d3)

    sigma = {}
    for a in range(n):
        for b in range(n):
            ai, aj = unpack(a)
            bi, bj = unpack(b)
            sigma[(a, b)] = kron(F1.sigma[(ai, bi)], F2.sigma[(aj, bj)])
    rho = None
    if F1.rho is not None and F2.rho is not None:
        rho = {}
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    for d in range(n):
                        ai, aj = unpack(a)
                        bi, bj = unpack(b)
                        ci, cj = unpack(c)
                        di, dj = unpack(d)
                        rho[(a, b, c, d)] = kron(F1.rho[(ai, bi, ci, di)],
                                                 F2.rho[(aj, bj, cj, dj)])
    return FlockDatum(name or ("%sx%s" % (F1.name, F2.name)), A, tau_obj, tau_hom, sigma, rho)
