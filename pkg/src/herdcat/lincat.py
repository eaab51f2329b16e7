"""Finite Vect_k-enriched categories, functors, and modules.

A FinLinCat stores its composition as explicit matrices: comp[(a,b,c)] is
the map C(a,b) (x) C(b,c) -> C(a,c), (f, g) |-> g . f, with the column of
the pair (f, g) at index  f_idx + homdim(a,b) * g_idx  (first tensor
factor fastest, as everywhere in this package).

Hom convention: C(a,b) is the space of maps a -> b.  Axiom checkers
return a list of (law, witness) failures rather than raising; malformed
tables raise ShapeError instead, so input errors and axiom failures stay
distinguishable.

Object indices: categories are handled through integer object indices;
`objects` holds display names.  Pair categories (tensor products) order
their objects lexicographically in the factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .exactlin import (
    Mat, ShapeError, basis_vec, eye, factor_swap, hstack, kernel_basis,
    kron, mat, mat_mul, transpose, zeros,
)


@dataclass(frozen=True)
class FinLinCat:
    field: object
    objects: tuple          # display names
    homdim: tuple           # homdim[a][b] = dim C(a,b)
    comp: dict              # (a,b,c) -> Mat  C(a,c) x (C(a,b).C(b,c))
    ident: dict             # a -> column Mat in C(a,a)

    @property
    def n(self):
        return len(self.objects)

    def dim(self, a, b):
        return self.homdim[a][b]


def validate_category_shapes(C):
    """Raise ShapeError if the tables do not have coherent shapes."""
    n = C.n
    if len(C.homdim) != n or any(len(row) != n for row in C.homdim):
        raise ShapeError("homdim table is not n x n")
    if any(d < 0 for row in C.homdim for d in row):
        raise ShapeError("negative hom dimension")
    for a in range(n):
        for b in range(n):
            for c in range(n):
                M = C.comp.get((a, b, c))
                if M is None:
                    raise ShapeError("missing composition table at %r" % ((a, b, c),))
                if M.field != C.field:
                    raise ShapeError("composition over wrong field at %r" % ((a, b, c),))
                want = (C.dim(a, c), C.dim(a, b) * C.dim(b, c))
                if (M.rows, M.cols) != want:
                    raise ShapeError("composition shape %r at %r, expected %r"
                                     % ((M.rows, M.cols), (a, b, c), want))
    for a in range(n):
        v = C.ident.get(a)
        if v is None or v.cols != 1 or v.rows != C.dim(a, a) or v.field != C.field:
            raise ShapeError("bad identity vector at object %d" % a)


def comp_apply(C, a, b, c, fvec, gvec):
    """The composite g . f as a column vector in C(a,c)."""
    return mat_mul(C.comp[(a, b, c)], kron(fvec, gvec))


def precompose(C, a, b, c, fvec):
    """Matrix of C(b,c) -> C(a,c), g |-> g . f, for f: a -> b."""
    return mat_mul(C.comp[(a, b, c)], kron(fvec, eye(C.field, C.dim(b, c))))


def postcompose(C, a, b, c, gvec):
    """Matrix of C(a,b) -> C(a,c), f |-> g . f, for g: b -> c."""
    return mat_mul(C.comp[(a, b, c)], kron(eye(C.field, C.dim(a, b)), gvec))


def check_category(C):
    """Exhaustive associativity and unit checks; list of (law, witness)."""
    validate_category_shapes(C)
    F = C.field
    fails = []
    n = C.n
    names = C.objects
    for a in range(n):
        for b in range(n):
            d_ab = C.dim(a, b)
            if d_ab == 0:
                continue
            I = eye(F, d_ab)
            left = mat_mul(C.comp[(a, a, b)], kron(C.ident[a], I))
            if left != I:
                fails.append(("left-unit", "at (%s,%s)" % (names[a], names[b])))
            right = mat_mul(C.comp[(a, b, b)], kron(I, C.ident[b]))
            if right != I:
                fails.append(("right-unit", "at (%s,%s)" % (names[a], names[b])))
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    d1, d2, d3 = C.dim(a, b), C.dim(b, c), C.dim(c, d)
                    if 0 in (d1, d2, d3):
                        continue
                    lhs = mat_mul(C.comp[(a, c, d)], kron(C.comp[(a, b, c)], eye(F, d3)))
                    rhs = mat_mul(C.comp[(a, b, d)], kron(eye(F, d1), C.comp[(b, c, d)]))
                    if lhs != rhs:
                        fails.append(("associativity", "at (%s,%s,%s,%s)"
                                      % (names[a], names[b], names[c], names[d])))
    return fails


def opposite(C):
    """Swap hom spaces and reverse composition order."""
    n = C.n
    homdim = tuple(tuple(C.homdim[b][a] for b in range(n)) for a in range(n))
    comp = {}
    for a in range(n):
        for b in range(n):
            for c in range(n):
                d1, d2 = homdim[a][b], homdim[b][c]
                src = C.comp[(c, b, a)]
                rows = []
                for i in range(homdim[a][c]):
                    row = [None] * (d1 * d2)
                    for f in range(d1):
                        for g in range(d2):
                            row[f + d1 * g] = src.data[i][g + d2 * f]
                    rows.append(row)
                comp[(a, b, c)] = mat(C.field, rows) if rows else zeros(C.field, 0, d1 * d2)
    return FinLinCat(C.field, C.objects, homdim, comp, dict(C.ident))


def pair_index(i, j, n2):
    """Lexicographic index of the pair object (i, j)."""
    return i * n2 + j


def tensor_cat(C, D):
    """Tensor product category: object pairs, hom spaces C(a,b) (x) D(u,v)."""
    if C.field != D.field:
        raise ShapeError("field mismatch in tensor_cat")
    F = C.field
    n1, n2 = C.n, D.n
    objects = tuple("(%s,%s)" % (C.objects[i], D.objects[j])
                    for i in range(n1) for j in range(n2))
    homdim = [[0] * (n1 * n2) for _ in range(n1 * n2)]
    for a in range(n1):
        for u in range(n2):
            for b in range(n1):
                for v in range(n2):
                    homdim[pair_index(a, u, n2)][pair_index(b, v, n2)] = \
                        C.dim(a, b) * D.dim(u, v)
    comp = {}
    for a in range(n1):
     for u in range(n2):
      for b in range(n1):
       for v in range(n2):
        for c in range(n1):
         for w in range(n2):
            A, B, Cc = pair_index(a, u, n2), pair_index(b, v, n2), pair_index(c, w, n2)
            # reorder (C1 . D1) (x) (C2 . D2) -> (C1 . C2) (x) (D1 . D2)
            dC1, dD1 = C.dim(a, b), D.dim(u, v)
            dC2, dD2 = C.dim(b, c), D.dim(v, w)
            cols = []
            for g2 in range(dD2):
                for g1 in range(dC2):
                    for f2 in range(dD1):
                        for f1 in range(dC1):
                            cf = comp_apply(C, a, b, c, basis_vec(F, dC1, f1),
                                            basis_vec(F, dC2, g1))
                            df = comp_apply(D, u, v, w, basis_vec(F, dD1, f2),
                                            basis_vec(F, dD2, g2))
                            cols.append(kron(cf, df).column(0))
            dom = (dC1 * dD1) * (dC2 * dD2)
            if cols:
                comp[(A, B, Cc)] = transpose(mat(F, cols))
            else:
                comp[(A, B, Cc)] = zeros(F, homdim[A][Cc], dom)
    ident = {}
    for a in range(n1):
        for u in range(n2):
            ident[pair_index(a, u, n2)] = kron(C.ident[a], D.ident[u])
    return FinLinCat(F, objects, tuple(tuple(r) for r in homdim), comp, ident)


@dataclass(frozen=True)
class LinFunctor:
    src: FinLinCat
    dst: FinLinCat
    objmap: tuple           # object index map
    hommap: dict            # (a,b) -> Mat  dst-hom x src-hom


def validate_functor_shapes(Fun):
    for a in range(Fun.src.n):
        for b in range(Fun.src.n):
            M = Fun.hommap.get((a, b))
            want = (Fun.dst.dim(Fun.objmap[a], Fun.objmap[b]), Fun.src.dim(a, b))
            if M is None or (M.rows, M.cols) != want:
                raise ShapeError("functor hom map at %r has wrong shape" % ((a, b),))


def check_functor(Fun):
    """Exact identity/composition preservation; list of (law, witness)."""
    validate_functor_shapes(Fun)
    C, D = Fun.src, Fun.dst
    F = C.field
    fails = []
    for a in range(C.n):
        if mat_mul(Fun.hommap[(a, a)], C.ident[a]) != D.ident[Fun.objmap[a]]:
            fails.append(("functor-identity", "at %s" % (C.objects[a],)))
    for a in range(C.n):
        for b in range(C.n):
            for c in range(C.n):
                d1, d2 = C.dim(a, b), C.dim(b, c)
                if 0 in (d1, d2):
                    continue
                fa, fb, fc = Fun.objmap[a], Fun.objmap[b], Fun.objmap[c]
                for f in range(d1):
                    fv = basis_vec(F, d1, f)
                    for g in range(d2):
                        gv = basis_vec(F, d2, g)
                        lhs = mat_mul(Fun.hommap[(a, c)], comp_apply(C, a, b, c, fv, gv))
                        rhs = comp_apply(D, fa, fb, fc,
                                         mat_mul(Fun.hommap[(a, b)], fv),
                                         mat_mul(Fun.hommap[(b, c)], gv))
                        if lhs != rhs:
                            fails.append(("functor-composition",
                                          "at (%s,%s,%s) basis (%d,%d)"
                                          % (C.objects[a], C.objects[b], C.objects[c], f, g)))
    return fails


def identity_functor(C):
    return LinFunctor(C, C, tuple(range(C.n)),
                      {(a, b): eye(C.field, C.dim(a, b))
                       for a in range(C.n) for b in range(C.n)})


def compose_functors(outer, inner):
    """outer . inner (apply inner first)."""
    if inner.dst is not outer.src and inner.dst != outer.src:
        raise ShapeError("functor composition mismatch")
    objmap = tuple(outer.objmap[inner.objmap[a]] for a in range(inner.src.n))
    hommap = {}
    for a in range(inner.src.n):
        for b in range(inner.src.n):
            hommap[(a, b)] = mat_mul(
                outer.hommap[(inner.objmap[a], inner.objmap[b])], inner.hommap[(a, b)])
    return LinFunctor(inner.src, outer.dst, objmap, hommap)


@dataclass(frozen=True)
class Module:
    """An enriched functor base -> Vect_k.

    act[(x,y)] is the matrix of C(x,y) (x) M(x) -> M(y), with the column
    of (phi, m) at index  phi_idx + homdim(x,y) * m_idx.
    """

    base: FinLinCat
    valdim: tuple
    act: dict

    def dim(self, x):
        return self.valdim[x]


def validate_module_shapes(M):
    C = M.base
    if len(M.valdim) != C.n or any(d < 0 for d in M.valdim):
        raise ShapeError("bad value dimension table")
    for x in range(C.n):
        for y in range(C.n):
            A = M.act.get((x, y))
            want = (M.valdim[y], C.dim(x, y) * M.valdim[x])
            if A is None or (A.rows, A.cols) != want or A.field != C.field:
                raise ShapeError("module action at %r has wrong shape" % ((x, y),))


def act_of(M, x, y, phivec):
    """Matrix of M(phi): M(x) -> M(y) for a morphism vector phi in C(x,y)."""
    return mat_mul(M.act[(x, y)], kron(phivec, eye(M.base.field, M.valdim[x])))


def check_module(M):
    """Exact unit and composition compatibility; list of (law, witness)."""
    validate_module_shapes(M)
    C = M.base
    F = C.field
    fails = []
    for x in range(C.n):
        if M.valdim[x] == 0:
            continue
        if act_of(M, x, x, C.ident[x]) != eye(F, M.valdim[x]):
            fails.append(("module-unit", "at %s" % (C.objects[x],)))
    for x in range(C.n):
        for y in range(C.n):
            for z in range(C.n):
                d1, d2 = C.dim(x, y), C.dim(y, z)
                if 0 in (d1, d2) or M.valdim[x] == 0:
                    continue
                for f in range(d1):
                    fv = basis_vec(F, d1, f)
                    Mf = act_of(M, x, y, fv)
                    for g in range(d2):
                        gv = basis_vec(F, d2, g)
                        lhs = act_of(M, x, z, comp_apply(C, x, y, z, fv, gv))
                        rhs = mat_mul(act_of(M, y, z, gv), Mf)
                        if lhs != rhs:
                            fails.append(("module-composition",
                                          "at (%s,%s,%s) basis (%d,%d)"
                                          % (C.objects[x], C.objects[y], C.objects[z], f, g)))
    return fails


def representable_module(C, a):
    """The module x |-> C(a,x) with action by post-composition."""
    F = C.field
    valdim = tuple(C.dim(a, x) for x in range(C.n))
    act = {}
    for x in range(C.n):
        for y in range(C.n):
            # comp(a,x,y) has (m, phi) columns at m + dim(a,x)*phi;
            # module actions want (phi, m) at phi + dim(x,y)*m.
            P = factor_swap(F, C.dim(x, y), C.dim(a, x))
            act[(x, y)] = mat_mul(C.comp[(a, x, y)], P)
    return Module(C, valdim, act)


def zero_module(C):
    F = C.field
    return Module(C, tuple(0 for _ in range(C.n)),
                  {(x, y): zeros(F, 0, 0 * C.dim(x, y))
                   for x in range(C.n) for y in range(C.n)})


def nat_space(M, N):
    """The space of natural transformations M -> N.

    Returns (dim, basis) where each basis element is a dict mapping the
    object index x to the component matrix N(x) x M(x).  Computed as the
    kernel of the difference map out of the product of hom spaces, in a
    canonical coordinate order.
    """
    if M.base != N.base:
        raise ShapeError("nat_space: modules over different categories")
    C = M.base
    F = C.field
    offs = []
    total = 0
    for x in range(C.n):
        offs.append(total)
        total += N.valdim[x] * M.valdim[x]

    def t_index(x, i, j):
        # component T_x[i][j], row-major
        return offs[x] + i * M.valdim[x] + j

    rows = []
    for x in range(C.n):
        for y in range(C.n):
            dh = C.dim(x, y)
            if dh == 0 or M.valdim[x] == 0:
                continue
            for phi in range(dh):
                pv = basis_vec(F, dh, phi)
                Mphi = act_of(M, x, y, pv)
                Nphi = act_of(N, x, y, pv)
                for m in range(M.valdim[x]):
                    for i in range(N.valdim[y]):
                        row = [F.zero] * total
                        # (T_y . M(phi))[i, m]
                        for k in range(M.valdim[y]):
                            row[t_index(y, i, k)] = F.add(
                                row[t_index(y, i, k)], Mphi.data[k][m])
                        # minus (N(phi) . T_x)[i, m]
                        for l in range(N.valdim[x]):
                            row[t_index(x, l, m)] = F.sub(
                                row[t_index(x, l, m)], Nphi.data[i][l])
                        rows.append(row)
    if rows:
        K = kernel_basis(mat(F, rows))
    else:
        K = eye(F, total)
    basis = []
    for c in range(K.cols):
        comp = {}
        for x in range(C.n):
            comp[x] = Mat(F, N.valdim[x], M.valdim[x], tuple(
                tuple(K.data[t_index(x, i, j)][c] for j in range(M.valdim[x]))
                for i in range(N.valdim[x])))
        basis.append(comp)
    return K.cols, basis


def natural_check(M, N, components):
    """Failures of naturality for a given component family {x: Mat}."""
    C = M.base
    F = C.field
    fails = []
    for x in range(C.n):
        for y in range(C.n):
            dh = C.dim(x, y)
            for phi in range(dh):
                pv = basis_vec(F, dh, phi)
                lhs = mat_mul(components[y], act_of(M, x, y, pv))
                rhs = mat_mul(act_of(N, x, y, pv), components[x])
                if lhs != rhs:
                    fails.append(("naturality", "at (%s,%s) basis %d"
                                  % (C.objects[x], C.objects[y], phi)))
    return fails
