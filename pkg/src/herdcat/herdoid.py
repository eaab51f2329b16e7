"""The pair category built from a flock, with its Kleisli functor,
antipode, and promonoidal structure.

Objects of the pair category are ordered pairs (a,b) of flock objects in
lexicographic order; the hom space from (a,b) to (c,d) is the flock's
hom space A(tau(b,a,c), d).  Composition sends (f, g) to
g . tau_hom(f, 1, 1); the identity at (a,b) is the identity of b.  None
of the derived structure is trusted: everything is re-checked by the
generic category/functor/module checkers.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactlin import (
    ShapeError, basis_vec, eye, inverse, is_invertible, kron, mat, mat_mul,
    transpose, zeros,
)
from .flock import tau_apply, transport_left, transport_right
from .kan import Bifunctor, TensorDiagram, Factor, Leg, coend
from .lincat import (
    FinLinCat, LinFunctor, Module, check_category, check_functor,
    check_module, comp_apply, opposite, pair_index, postcompose, precompose,
    tensor_cat,
)


@dataclass(frozen=True)
class HCategory:
    flock: object
    underlying: FinLinCat     # the pair category
    bimodule_base: FinLinCat  # A^op (x) A, same object order

    @property
    def n_src(self):
        return self.flock.A.n

    def pair(self, a, b):
        return pair_index(a, b, self.n_src)

    def unpair(self, P):
        return divmod(P, self.n_src)

    def hom_objects(self, P1, P2):
        """The flock hom space (src, dst) carrying the pair hom P1 -> P2."""
        a, b = self.unpair(P1)
        c, d = self.unpair(P2)
        return self.flock.tau(b, a, c), d


def build_h(F):
    """Construct the pair category; composition is derived, axioms are
    for the caller to verify via check_category."""
    A = F.A
    k = A.field
    n = A.n
    tau = F.tau
    objects = tuple("(%s,%s)" % (A.objects[a], A.objects[b])
                    for a in range(n) for b in range(n))
    N = n * n
    homdim = [[0] * N for _ in range(N)]
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    homdim[pair_index(a, b, n)][pair_index(c, d, n)] = A.dim(tau(b, a, c), d)
    comp = {}
    for a in range(n):
     for b in range(n):
      for c in range(n):
       for d in range(n):
        for u in range(n):
         for v in range(n):
            P1, P2, P3 = pair_index(a, b, n), pair_index(c, d, n), pair_index(u, v, n)
            s1 = tau(b, a, c)
            s2 = tau(d, c, u)
            s_tot = tau(b, a, u)
            if tau(tau(b, a, c), c, u) != s_tot:
                raise ShapeError("strict heap laws broken in composition objects")
            d1 = A.dim(s1, d)
            d2 = A.dim(s2, v)
            # transport f: tau(b,a,c) -> d along (1_c, 1_u) into A(tau(b,a,u), tau(d,c,u))
            T = mat_mul(F.tau_hom[(s1, c, u, d, c, u)],
                        kron(kron(eye(k, d1), A.ident[c]), A.ident[u]))
            cols = []
            for g in range(d2):
                gv = basis_vec(k, d2, g)
                post = postcompose(A, s_tot, s2, v, gv)
                PT = mat_mul(post, T)
                for f in range(d1):
                    cols.append(tuple(PT.data[i][f] for i in range(PT.rows)))
            if cols:
                comp[(P1, P2, P3)] = transpose(mat(k, cols))
            else:
                comp[(P1, P2, P3)] = zeros(k, A.dim(s_tot, v), d1 * d2)
    ident = {}
    for a in range(n):
        for b in range(n):
            ident[pair_index(a, b, n)] = A.ident[b]
    underlying = FinLinCat(k, objects, tuple(tuple(r) for r in homdim), comp, ident)
    bimodule_base = tensor_cat(opposite(A), A)
    return HCategory(F, underlying, bimodule_base)


def kleisli(F, H):
    """The identity-on-objects functor A^op (x) A -> pair category.

    On homs it sends u (x) v to tau_hom(v, u, 1); surjectivity on
    objects is structural (the object map is the identity).
    """
    A = F.A
    k = A.field
    n = A.n
    src = H.bimodule_base
    dst = H.underlying
    hommap = {}
    for a in range(n):
     for b in range(n):
      for c in range(n):
       for d in range(n):
        P1, P2 = pair_index(a, b, n), pair_index(c, d, n)
        dca = A.dim(c, a)
        dbd = A.dim(b, d)
        tgt_rows = dst.dim(P1, P2)
        if F.tau(d, c, c) != d:
            raise ShapeError("strict heap laws broken in kleisli objects")
        cols = []
        for v in range(dbd):
            for u in range(dca):
                w = tau_apply(F, (b, a, c), (d, c, c),
                              basis_vec(k, dbd, v), basis_vec(k, dca, u), A.ident[c])
                cols.append(w.column(0))
        hommap[(P1, P2)] = (transpose(mat(k, cols)) if cols
                            else zeros(k, tgt_rows, dca * dbd))
    return LinFunctor(src, dst, tuple(range(src.n)), hommap)


def antipode(F, H):
    """The contravariant functor swapping pair coordinates.

    If the flock carries explicit antipode matrices they are used;
    otherwise the hom maps are assembled from the pairings in a fixed
    order: transpose through sigma, contract through rho at the index
    (d,b,c,a), then transport with tau_hom(1_a, 1_b, -).  Functoriality
    is verified by the caller, never assumed.
    """
    A = F.A
    k = A.field
    n = A.n
    if F.s_hom is None and F.rho is None:
        raise ShapeError("antipode needs s_hom or rho in the flock datum")
    src = opposite(H.underlying)
    dst = H.underlying
    N = n * n
    objmap = [0] * N
    for a in range(n):
        for b in range(n):
            objmap[pair_index(a, b, n)] = pair_index(b, a, n)
    hommap = {}
    for a in range(n):
     for b in range(n):
      for c in range(n):
       for d in range(n):
        P1, P2 = pair_index(a, b, n), pair_index(c, d, n)
        # the op hom at (P1, P2) is the pair hom (c,d) -> (a,b)
        if F.s_hom is not None:
            S = F.s_hom[(a, b, c, d)]
        else:
            w1 = F.tau(d, c, a)
            w2 = F.tau(b, a, c)
            if F.tau(a, b, w2) != c:
                raise ShapeError("strict heap laws broken in antipode objects")
            G = F.sigma[(b, w1)]
            R = F.rho[(d, b, c, a)]
            Rinv = inverse(R)
            if Rinv is None:
                raise ShapeError("rho pairing at %r is singular" % ((d, b, c, a),))
            L = transport_left(F, a, b, d, w2)
            S = mat_mul(L, mat_mul(Rinv, G))
        want = (dst.dim(objmap[P1], objmap[P2]), src.dim(P1, P2))
        if (S.rows, S.cols) != want:
            raise ShapeError("antipode hom map shape at %r" % ((a, b, c, d),))
        hommap[(P1, P2)] = S
    return LinFunctor(src, dst, tuple(objmap), hommap)


def antipode_involution_failures(H, S):
    """Check S . S^op = identity, pairwise on hom matrices."""
    C = H.underlying
    fails = []
    for P1 in range(C.n):
        for P2 in range(C.n):
            a, b = H.unpair(P1)
            c, d = H.unpair(P2)
            first = S.hommap[(H.pair(c, d), H.pair(a, b))]
            second = S.hommap[(H.pair(b, a), H.pair(d, c))]
            if mat_mul(second, first) != eye(C.field, C.dim(P1, P2)):
                fails.append(("antipode-involution",
                              "at %s -> %s" % (C.objects[P1], C.objects[P2])))
    return fails


# ---------------------------------------------------------------------------
# promonoidal structure

SLOT_VARIANCE = (+1, -1, +1, -1, -1, +1)   # (a, b, c, d, u, v)


def p_dim(F, objs):
    """dim p((a,b),(c,d),(u,v)) = dim A(tau(d,c,b),v) * dim A(u,a)."""
    a, b, c, d, u, v = objs
    return F.A.dim(F.tau(d, c, b), v) * F.A.dim(u, a)


def p_act(F, slot, objs, new, vec):
    """Action of a morphism vector on one slot of the promultiplication.

    Covariant slots take a morphism old -> new, contravariant slots take
    new -> old; the result maps p(objs) to p(objs with slot renamed).
    The first tensor factor of p is A(tau(d,c,b),v), the second A(u,a).
    """
    A = F.A
    k = A.field
    a, b, c, d, u, v = objs
    t = F.tau(d, c, b)
    d_first = A.dim(t, v)
    d_second = A.dim(u, a)
    if slot == 0:    # a, covariant, second factor
        return kron(eye(k, d_first), postcompose(A, u, a, new, vec))
    if slot == 4:    # u, contravariant, second factor
        return kron(eye(k, d_first), precompose(A, new, u, a, vec))
    if slot == 5:    # v, covariant, first factor
        return kron(postcompose(A, t, v, new, vec), eye(k, d_second))
    if slot == 1:    # b, contravariant: transport the third tau slot
        T = mat_mul(F.tau_hom[(d, c, new, d, c, b)],
                    kron(kron(A.ident[d], A.ident[c]), vec))
        return kron(precompose(A, F.tau(d, c, new), t, v, T), eye(k, d_second))
    if slot == 2:    # c, covariant: transport the middle tau slot
        T = mat_mul(F.tau_hom[(d, new, b, d, c, b)],
                    kron(kron(A.ident[d], vec), A.ident[b]))
        return kron(precompose(A, F.tau(d, new, b), t, v, T), eye(k, d_second))
    if slot == 3:    # d, contravariant: transport the first tau slot
        T = mat_mul(F.tau_hom[(new, c, b, d, c, b)],
                    kron(kron(vec, A.ident[c]), A.ident[b]))
        return kron(precompose(A, F.tau(new, c, b), t, v, T), eye(k, d_second))
    raise ShapeError("no such slot %r" % (slot,))


def check_promonoidal_actions(F):
    """Unitality, compositionality and pairwise commutation of the six
    object-slot actions of the promultiplication."""
    A = F.A
    k = A.field
    n = A.n
    fails = []

    def tuples(m):
        if m == 0:
            yield ()
            return
        for rest in tuples(m - 1):
            for x in range(n):
                yield (x,) + rest

    def morph(slot, objs, new, b):
        old = objs[slot]
        if SLOT_VARIANCE[slot] > 0:
            return basis_vec(k, A.dim(old, new), b), A.dim(old, new)
        return basis_vec(k, A.dim(new, old), b), A.dim(new, old)

    for objs in tuples(6):
        dp = p_dim(F, objs)
        if dp == 0:
            continue
        for slot in range(6):
            old = objs[slot]
            if p_act(F, slot, objs, old, A.ident[old]) != eye(k, dp):
                fails.append(("p-slot-unit", "slot %d at %r" % (slot, objs)))
        for slot in range(6):
            old = objs[slot]
            for mid in range(n):
                for new in range(n):
                    if SLOT_VARIANCE[slot] > 0:
                        d1, d2 = A.dim(old, mid), A.dim(mid, new)
                    else:
                        d1, d2 = A.dim(mid, old), A.dim(new, mid)
                    if 0 in (d1, d2):
                        continue
                    for i in range(d1):
                        fv = basis_vec(k, d1, i)
                        step1 = p_act(F, slot, objs, mid, fv)
                        objs_mid = objs[:slot] + (mid,) + objs[slot + 1:]
                        for j in range(d2):
                            gv = basis_vec(k, d2, j)
                            step2 = p_act(F, slot, objs_mid, new, gv)
                            if SLOT_VARIANCE[slot] > 0:
                                comp = comp_apply(A, old, mid, new, fv, gv)
                            else:
                                comp = comp_apply(A, new, mid, old, gv, fv)
                            whole = p_act(F, slot, objs, new, comp)
                            if mat_mul(step2, step1) != whole:
                                fails.append(("p-slot-composition",
                                              "slot %d at %r" % (slot, objs)))
        for s1 in range(6):
            for s2 in range(s1 + 1, 6):
                for n1 in range(n):
                    for n2 in range(n):
                        v1, d1 = morph(s1, objs, n1, 0)
                        v2, d2 = morph(s2, objs, n2, 0)
                        if d1 == 0 or d2 == 0:
                            continue
                        for i in range(d1):
                            v1 = basis_vec(k, d1, i)
                            for j in range(d2):
                                v2 = basis_vec(k, d2, j)
                                objs_1 = objs[:s1] + (n1,) + objs[s1 + 1:]
                                objs_2 = objs[:s2] + (n2,) + objs[s2 + 1:]
                                one = mat_mul(p_act(F, s2, objs_1, n2, v2),
                                              p_act(F, s1, objs, n1, v1))
                                two = mat_mul(p_act(F, s1, objs_2, n1, v1),
                                              p_act(F, s2, objs, n2, v2))
                                if one != two:
                                    fails.append(("p-slot-commute",
                                                  "slots (%d,%d) at %r" % (s1, s2, objs)))
    return fails


def unit_module(F, H):
    """The convolution unit: value A(u,v) at the pair (u,v), acted on
    through the canonical transport."""
    A = F.A
    k = A.field
    n = A.n
    C = H.underlying
    valdim = tuple(A.dim(*H.unpair(P)) for P in range(C.n))
    act = {}
    for P1 in range(C.n):
        for P2 in range(C.n):
            u, v = H.unpair(P1)
            u2, v2 = H.unpair(P2)
            w = F.tau(v, u, u2)
            if F.tau(u, u, u2) != u2:
                raise ShapeError("strict heap laws broken in unit module")
            dh = C.dim(P1, P2)           # = dim A(w, v2)
            dv = A.dim(u, v)
            cols = []
            for m in range(dv):
                T = tau_apply(F, (u, u, u2), (v, u, u2),
                              basis_vec(k, dv, m), A.ident[u], A.ident[u2])
                pre = precompose(A, u2, w, v2, T)   # phi |-> phi . T(m)
                for phi in range(dh):
                    cols.append(pre.column(phi))
            act[(P1, P2)] = (transpose(mat(k, cols)) if cols
                             else zeros(k, A.dim(u2, v2), dh * dv))
    return Module(C, valdim, act)


def unit_collapse_check(F, H, P_cd, P_uv):
    """The two-step collapse of the left unit integral onto a pair hom.

    Returns (dim_ok, steps_invertible): the iterated two-variable coend
    of j (x) p over (x,y) must have the dimension of hom((c,d),(u,v)),
    and each single-variable coYoneda collapse must be invertible.
    """
    A = F.A
    k = A.field
    c, d = H.unpair(P_cd)
    u, v = H.unpair(P_uv)
    n = A.n
    target_dim = A.dim(F.tau(d, c, u), v)

    # joint dimension by iterated elimination (x first, then y)
    fac_j = Factor(
        [Leg("x", -1), Leg("y", +1)],
        lambda vals: A.dim(vals[0], vals[1]),
        lambda pos, vals, new, b: (
            precompose(A, new, vals[0], vals[1], basis_vec(k, A.dim(new, vals[0]), b))
            if pos == 0 else
            postcompose(A, vals[0], vals[1], new, basis_vec(k, A.dim(vals[1], new), b))))
    fac_tau = Factor(
        [Leg("y", -1)],
        lambda vals: A.dim(F.tau(d, c, vals[0]), v),
        lambda pos, vals, new, b: _tau_slot_precompose(F, d, c, vals[0], new, b, v))
    fac_ux = Factor(
        [Leg("x", +1)],
        lambda vals: A.dim(u, vals[0]),
        lambda pos, vals, new, b: postcompose(A, u, vals[0], new,
                                              basis_vec(k, A.dim(vals[0], new), b)))
    td = TensorDiagram(k, {"x": A, "y": A}, [fac_j, fac_tau, fac_ux], ("x", "y"))
    dim, _, _ = td.eliminate(("x", "y"))
    dim_ok = (dim == target_dim)

    # step collapses: coend_x A(u,x) (x) A(x,y) -> A(u,y) by composition
    steps_ok = True
    for y in range(n):
        val = {(xm, xp): A.dim(u, xp) * A.dim(xm, y) for xm in range(n) for xp in range(n)}
        D = Bifunctor(A, val,
                      _ux_xy_lact(F, A, k, u, y, val),
                      _ux_xy_ract(F, A, k, u, y, val))
        res = coend(D)
        fwd_blocks = [A.comp[(u, x, y)] for x in range(n)]
        from .exactlin import hstack
        fwd = mat_mul(hstack(fwd_blocks), res.section)
        if not (res.dim == A.dim(u, y) and is_invertible(fwd)):
            steps_ok = False

    # step 2: coend_y A(u,y) (x) A(tau(d,c,y),v) -> A(tau(d,c,u),v)
    val = {(ym, yp): A.dim(u, yp) * A.dim(F.tau(d, c, ym), v)
           for ym in range(n) for yp in range(n)}
    D = Bifunctor(A, val, _uy_tau_lact(F, A, k, u, d, c, v, val),
                  _uy_tau_ract(F, A, k, u, d, c, v, val))
    res = coend(D)
    cols = []
    for y in range(n):
        dxi = A.dim(u, y)
        dpsi = A.dim(F.tau(d, c, y), v)
        for psi in range(dpsi):
            pv = basis_vec(k, dpsi, psi)
            for xi in range(dxi):
                T = transport_left(F, d, c, u, y)
                tvec = mat_mul(T, basis_vec(k, dxi, xi))
                out = comp_apply(A, F.tau(d, c, u), F.tau(d, c, y), v, tvec, pv)
                cols.append(out.column(0))
    fwd_total = transpose(mat(k, cols)) if cols else zeros(k, target_dim, 0)
    fwd2 = mat_mul(fwd_total, res.section)
    if not (res.dim == target_dim and is_invertible(fwd2)):
        steps_ok = False
    return dim_ok, steps_ok


def _tau_slot_precompose(F, d, c, old, new, b, v):
    A = F.A
    k = A.field
    # contravariant y-leg of A(tau(d,c,y),v): morphism new -> old
    vec = basis_vec(k, A.dim(new, old), b)
    T = mat_mul(F.tau_hom[(d, c, new, d, c, old)],
                kron(kron(A.ident[d], A.ident[c]), vec))
    return precompose(A, F.tau(d, c, new), F.tau(d, c, old), v, T)


def _ux_xy_lact(F, A, k, u, y, val):
    out = {}
    for xm2 in range(A.n):
        for xm in range(A.n):
            for xp in range(A.n):
                dh = A.dim(xm2, xm)
                cols = []
                for w in range(val[(xm, xp)]):
                    dxi = A.dim(u, xp)
                    xi, g = w % dxi, w // dxi
                    for f in range(dh):
                        moved = comp_apply(A, xm2, xm, y, basis_vec(k, dh, f),
                                           basis_vec(k, A.dim(xm, y), g))
                        cols.append(kron(basis_vec(k, dxi, xi), moved).column(0))
                out[(xm2, xm, xp)] = (transpose(mat(k, cols)) if cols
                                      else zeros(k, val[(xm2, xp)], dh * val[(xm, xp)]))
    return out


def _ux_xy_ract(F, A, k, u, y, val):
    out = {}
    for xm in range(A.n):
        for xp in range(A.n):
            for xp2 in range(A.n):
                dh = A.dim(xp, xp2)
                cols = []
                for w in range(val[(xm, xp)]):
                    dxi = A.dim(u, xp)
                    xi, g = w % dxi, w // dxi
                    for f in range(dh):
                        moved = comp_apply(A, u, xp, xp2, basis_vec(k, dxi, xi),
                                           basis_vec(k, dh, f))
                        cols.append(kron(moved, basis_vec(k, A.dim(xm, y), g)).column(0))
                out[(xm, xp, xp2)] = (transpose(mat(k, cols)) if cols
                                      else zeros(k, val[(xm, xp2)], dh * val[(xm, xp)]))
    return out


def _uy_tau_lact(F, A, k, u, d, c, v, val):
    out = {}
    for ym2 in range(A.n):
        for ym in range(A.n):
            for yp in range(A.n):
                dh = A.dim(ym2, ym)
                cols = []
                for w in range(val[(ym, yp)]):
                    dxi = A.dim(u, yp)
                    xi, psi = w % dxi, w // dxi
                    for f in range(dh):
                        P = _tau_slot_precompose(F, d, c, ym, ym2, f, v)
                        moved = mat_mul(P, basis_vec(k, A.dim(F.tau(d, c, ym), v), psi))
                        cols.append(kron(basis_vec(k, dxi, xi), moved).column(0))
                out[(ym2, ym, yp)] = (transpose(mat(k, cols)) if cols
                                      else zeros(k, val[(ym2, yp)], dh * val[(ym, yp)]))
    return out


def _uy_tau_ract(F, A, k, u, d, c, v, val):
    out = {}
    for ym in range(A.n):
        for yp in range(A.n):
            for yp2 in range(A.n):
                dh = A.dim(yp, yp2)
                cols = []
                for w in range(val[(ym, yp)]):
                    dxi = A.dim(u, yp)
                    xi, psi = w % dxi, w // dxi
                    for f in range(dh):
                        moved = comp_apply(A, u, yp, yp2, basis_vec(k, dxi, xi),
                                           basis_vec(k, dh, f))
                        cols.append(kron(moved,
                                         basis_vec(k, A.dim(F.tau(d, c, ym), v), psi)).column(0))
                out[(ym, yp, yp2)] = (transpose(mat(k, cols)) if cols
                                      else zeros(k, val[(ym, yp2)], dh * val[(ym, yp)]))
    return out
