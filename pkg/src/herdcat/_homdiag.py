"""Standard bifunctor builders shared by the kan layer and its users."""

from __future__ import annotations

from .exactlin import basis_vec, eye, kron, mat, mat_mul, transpose, zeros
from .kan import Bifunctor
from .lincat import act_of, comp_apply


def hom_bifunctor(C):
    """D(x,y) = C(x,y) with composition actions."""
    F = C.field
    val = {(x, y): C.dim(x, y) for x in range(C.n) for y in range(C.n)}
    lact = {}
    ract = {}
    for xp in range(C.n):
        for x in range(C.n):
            for y in range(C.n):
                dh = C.dim(xp, x)
                cols = []
                for v in range(C.dim(x, y)):
                    for f in range(dh):
                        cols.append(comp_apply(C, xp, x, y, basis_vec(F, dh, f),
                                               basis_vec(F, C.dim(x, y), v)).column(0))
                lact[(xp, x, y)] = (transpose(mat(F, cols)) if cols
                                    else zeros(F, C.dim(xp, y), dh * C.dim(x, y)))
    for x in range(C.n):
        for y in range(C.n):
            for yp in range(C.n):
                dh = C.dim(y, yp)
                cols = []
                for v in range(C.dim(x, y)):
                    for g in range(dh):
                        cols.append(comp_apply(C, x, y, yp, basis_vec(F, C.dim(x, y), v),
                                               basis_vec(F, dh, g)).column(0))
                ract[(x, y, yp)] = (transpose(mat(F, cols)) if cols
                                    else zeros(F, C.dim(x, yp), dh * C.dim(x, y)))
    return Bifunctor(C, val, lact, ract)


def module_hom_bifunctor(M, N):
    """D(x,y) = hom(M(x), N(y)); lact precomposes M(f), ract postcomposes N(g).

    A linear map T: M(x) -> N(y) is flattened column-major: the entry
    T[i][j] sits at flat index i + dim N(y) * j.
    """
    C = M.base
    F = C.field
    val = {(x, y): N.valdim[y] * M.valdim[x] for x in range(C.n) for y in range(C.n)}

    def flatten(T):
        return [T.data[i][j] for j in range(T.cols) for i in range(T.rows)]

    lact = {}
    ract = {}
    for xp in range(C.n):
        for x in range(C.n):
            for y in range(C.n):
                dh = C.dim(xp, x)
                cols = []
                for j in range(M.valdim[x]):
                    for i in range(N.valdim[y]):
                        for f in range(dh):
                            T = zeros(F, N.valdim[y], M.valdim[x])
                            data = [list(r) for r in T.data]
                            data[i][j] = F.one
                            T = mat(F, data) if data else T
                            Mf = act_of(M, xp, x, basis_vec(F, dh, f))
                            cols.append(flatten(mat_mul(T, Mf)))
                lact[(xp, x, y)] = (transpose(mat(F, cols)) if cols
                                    else zeros(F, val[(xp, y)], dh * val[(x, y)]))
    for x in range(C.n):
        for y in range(C.n):
            for yp in range(C.n):
                dh = C.dim(y, yp)
                cols = []
                for j in range(M.valdim[x]):
                    for i in range(N.valdim[y]):
                        for g in range(dh):
                            T = zeros(F, N.valdim[y], M.valdim[x])
                            data = [list(r) for r in T.data]
                            data[i][j] = F.one
                            T = mat(F, data) if data else T
                            Ng = act_of(N, y, yp, basis_vec(F, dh, g))
                            cols.append(flatten(mat_mul(Ng, T)))
                ract[(x, y, yp)] = (transpose(mat(F, cols)) if cols
                                    else zeros(F, val[(x, yp)], dh * val[(x, y)]))
    return Bifunctor(C, val, lact, ract)
