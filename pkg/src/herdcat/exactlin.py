"""Exact dense linear algebra over GF(p) or the rationals.

This is the only numeric substrate in the package: every hom space,
structure map, coend and end is a Mat over one of these fields, and
every check downstream is an exact equality.  No floating point.

Index convention used for all tensor products (fixed package-wide):
the composite index of a pair (i, j), with i ranging over the FIRST
tensor factor of dimension d1, is ``i + d1*j``.  Triple products
associate to the left, so (i, j, l) maps to ``i + d1*j + d1*d2*l``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class ShapeError(ValueError):
    """Malformed input: bad dimensions, bad field data, bad tables.

    Distinct from an axiom failure, which is never an exception but a
    failed entry in a Report.
    """


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """A prime field GF(p) or the field of rationals.

    Elements are plain ints in 0..p-1 for GF(p) and Fractions for the
    rationals; all operations are exact.
    """

    kind: str  # "gf" or "q"
    modulus: int = 0

    def __post_init__(self):
        if self.kind == "gf":
            if not _is_prime(self.modulus):
                raise ShapeError("modulus %r is not prime" % (self.modulus,))
        elif self.kind == "q":
            if self.modulus != 0:
                raise ShapeError("rationals take no modulus")
        else:
            raise ShapeError("unknown field kind %r" % (self.kind,))

    @property
    def zero(self):
        return 0 if self.kind == "gf" else Fraction(0)

    @property
    def one(self):
        return 1 if self.kind == "gf" else Fraction(1)

    def of_int(self, n):
        return n % self.modulus if self.kind == "gf" else Fraction(n)

    def add(self, a, b):
        return (a + b) % self.modulus if self.kind == "gf" else a + b

    def sub(self, a, b):
        return (a - b) % self.modulus if self.kind == "gf" else a - b

    def mul(self, a, b):
        return (a * b) % self.modulus if self.kind == "gf" else a * b

    def neg(self, a):
        return (-a) % self.modulus if self.kind == "gf" else -a

    def inv(self, a):
        if self.kind == "gf":
            if a % self.modulus == 0:
                raise ZeroDivisionError("inverse of zero in GF(%d)" % self.modulus)
            return pow(a, -1, self.modulus)
        if a == 0:
            raise ZeroDivisionError("inverse of zero rational")
        return 1 / Fraction(a)

    def show(self, a):
        """Serialized form: int for GF(p), "n/d" in lowest terms for Q."""
        if self.kind == "gf":
            return int(a)
        f = Fraction(a)
        return "%d/%d" % (f.numerator, f.denominator)

    def parse(self, s):
        if self.kind == "gf":
            if not isinstance(s, int):
                raise ShapeError("GF element must be an int, got %r" % (s,))
            if not 0 <= s < self.modulus:
                raise ShapeError("GF(%d) element out of range: %r" % (self.modulus, s))
            return s
        if not isinstance(s, str) or "/" not in s:
            raise ShapeError("rational must be a 'n/d' string, got %r" % (s,))
        num, den = s.split("/", 1)
        try:
            f = Fraction(int(num), int(den))
        except (ValueError, ZeroDivisionError) as e:
            raise ShapeError("bad rational %r: %s" % (s, e))
        if self.show(f) != s:
            raise ShapeError("rational %r not in lowest terms with d > 0" % (s,))
        return f

    def describe(self):
        return "gf%d" % self.modulus if self.kind == "gf" else "q"


def field_from_name(name):
    """Parse a field flag: 'gf<p>' or 'q'."""
    if name == "q":
        return FieldSpec("q")
    if name.startswith("gf"):
        try:
            p = int(name[2:])
        except ValueError:
            raise ShapeError("bad field name %r" % (name,))
        return FieldSpec("gf", p)
    raise ShapeError("bad field name %r" % (name,))


class Mat:
    """An immutable dense matrix over a FieldSpec, stored row-major.

    Treated as a value: never mutate `data` after construction.  Kept as
    a plain __slots__ class because matrix construction is the hot path
    of every coend computation.
    """

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field, rows, cols, data):
        self.field = field
        self.rows = rows
        self.cols = cols
        self.data = data

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return (self.rows == other.rows and self.cols == other.cols
                and self.data == other.data and self.field == other.field)

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        return hash((self.field, self.rows, self.cols, self.data))

    def __repr__(self):
        return "Mat(%s, %dx%d)" % (self.field.describe(), self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def entries(self):
        """Row-major flat list, for serialization."""
        return [a for row in self.data for a in row]

    def column(self, j):
        return tuple(self.data[i][j] for i in range(self.rows))

    def is_zero(self):
        z = self.field.zero
        return all(a == z for row in self.data for a in row)


def mat(field, rows):
    """Build a Mat from a list of row lists of already-exact entries.

    The one validating constructor: rows must be rectangular.
    """
    data = tuple(tuple(r) for r in rows)
    ncols = len(data[0]) if data else 0
    if any(len(r) != ncols for r in data):
        raise ShapeError("ragged rows in matrix data")
    return Mat(field, len(data), ncols, data)


def mat_of_ints(field, rows):
    return mat(field, [[field.of_int(a) for a in r] for r in rows])


def zeros(field, rows, cols):
    z = field.zero
    return Mat(field, rows, cols, tuple(tuple(z for _ in range(cols)) for _ in range(rows)))


def eye(field, n):
    z, o = field.zero, field.one
    return Mat(field, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))


def col_vec(field, entries):
    return Mat(field, len(entries), 1, tuple((a,) for a in entries))


_basis_cache = {}


def basis_vec(field, n, i):
    key = (field, n, i)
    v = _basis_cache.get(key)
    if v is None:
        z, o = field.zero, field.one
        v = Mat(field, n, 1, tuple((o if k == i else z,) for k in range(n)))
        _basis_cache[key] = v
    return v


def _same_field(A, B, what):
    if A.field != B.field:
        raise ShapeError("field mismatch in %s" % what)


def mat_mul(A, B):
    """Exact matrix product; dims (A.rows x B.cols)."""
    _same_field(A, B, "mat_mul")
    if A.cols != B.rows:
        raise ShapeError("dimension mismatch: %dx%d times %dx%d"
                         % (A.rows, A.cols, B.rows, B.cols))
    F = A.field
    if F.kind == "gf":
        p = F.modulus
        if B.cols == 1:
            v = tuple(B.data[k][0] for k in range(B.rows))
            data = tuple((sum(map(int.__mul__, Ai, v)) % p,) for Ai in A.data)
            return Mat(F, A.rows, 1, data)
        rows = []
        for i in range(A.rows):
            Ai = A.data[i]
            rows.append(tuple(sum(Ai[k] * B.data[k][j] for k in range(A.cols)) % p
                              for j in range(B.cols)))
        return Mat(F, A.rows, B.cols, tuple(rows))
    rows = []
    zero = F.zero
    for i in range(A.rows):
        Ai = A.data[i]
        rows.append(tuple(sum((Ai[k] * B.data[k][j] for k in range(A.cols)), zero)
                          for j in range(B.cols)))
    return Mat(F, A.rows, B.cols, tuple(rows))


def mat_add(A, B):
    _same_field(A, B, "mat_add")
    if (A.rows, A.cols) != (B.rows, B.cols):
        raise ShapeError("dimension mismatch in mat_add")
    F = A.field
    return Mat(F, A.rows, A.cols,
               tuple(tuple(F.add(A.data[i][j], B.data[i][j]) for j in range(A.cols))
                     for i in range(A.rows)))


def mat_sub(A, B):
    return mat_add(A, mat_scale(B, B.field.neg(B.field.one)))


def mat_scale(A, c):
    F = A.field
    return Mat(F, A.rows, A.cols,
               tuple(tuple(F.mul(c, a) for a in row) for row in A.data))


def transpose(A):
    return Mat(A.field, A.cols, A.rows,
               tuple(tuple(A.data[i][j] for i in range(A.rows)) for j in range(A.cols)))


def kron(A, B):
    """Kronecker product under the first-factor-fastest convention.

    kron(A, B)[i + A.rows*j, k + A.cols*l] = A[i,k] * B[j,l].
    """
    _same_field(A, B, "kron")
    F = A.field
    if A.cols == 1 and B.cols == 1:
        if F.kind == "gf":
            p = F.modulus
            data = tuple((A.data[i][0] * B.data[j][0] % p,)
                         for j in range(B.rows) for i in range(A.rows))
        else:
            data = tuple((A.data[i][0] * B.data[j][0],)
                         for j in range(B.rows) for i in range(A.rows))
        return Mat(F, A.rows * B.rows, 1, data)
    rows = A.rows * B.rows
    cols = A.cols * B.cols
    out = [[F.zero] * cols for _ in range(rows)]
    for j in range(B.rows):
        for i in range(A.rows):
            r = i + A.rows * j
            Ai = A.data[i]
            Bj = B.data[j]
            orow = out[r]
            for l in range(B.cols):
                base = A.cols * l
                bjl = Bj[l]
                for k in range(A.cols):
                    orow[base + k] = F.mul(Ai[k], bjl)
    return Mat(F, rows, cols, tuple(tuple(r) for r in out))


def kron3(A, B, C):
    return kron(kron(A, B), C)


def factor_swap(field, d1, d2):
    """Permutation matrix sending index i + d1*j to j + d2*i.

    Converts coordinates of V1 (x) V2 into coordinates of V2 (x) V1.
    """
    P = [[field.zero] * (d1 * d2) for _ in range(d1 * d2)]
    for i in range(d1):
        for j in range(d2):
            P[j + d2 * i][i + d1 * j] = field.one
    return mat(field, P)


def hstack(mats):
    mats = list(mats)
    if not mats:
        raise ShapeError("hstack of nothing")
    F = mats[0].field
    rows = mats[0].rows
    for M in mats:
        if M.field != F or M.rows != rows:
            raise ShapeError("hstack mismatch")
    data = tuple(tuple(a for M in mats for a in M.data[i]) for i in range(rows))
    return Mat(F, rows, sum(M.cols for M in mats), data)


def vstack(mats):
    mats = list(mats)
    if not mats:
        raise ShapeError("vstack of nothing")
    F = mats[0].field
    cols = mats[0].cols
    for M in mats:
        if M.field != F or M.cols != cols:
            raise ShapeError("vstack mismatch")
    data = tuple(row for M in mats for row in M.data)
    return Mat(F, sum(M.rows for M in mats), cols, data)


def rref(A):
    """Reduced row echelon form.  Returns (R, pivot column list).

    Deterministic: scans columns left to right, takes the first nonzero
    entry at or below the current row as pivot.
    """
    F = A.field
    R = [list(row) for row in A.data]
    pivots = []
    prow = 0
    for col in range(A.cols):
        if prow >= A.rows:
            break
        sel = -1
        for i in range(prow, A.rows):
            if R[i][col] != F.zero:
                sel = i
                break
        if sel < 0:
            continue
        R[prow], R[sel] = R[sel], R[prow]
        inv = F.inv(R[prow][col])
        R[prow] = [F.mul(inv, a) for a in R[prow]]
        for i in range(A.rows):
            if i != prow and R[i][col] != F.zero:
                c = R[i][col]
                R[i] = [F.sub(R[i][j], F.mul(c, R[prow][j])) for j in range(A.cols)]
        pivots.append(col)
        prow += 1
    return mat(F, R), pivots


def rank(A):
    return len(rref(A)[1])


def kernel_basis(A):
    """Columns form the canonical reduced-echelon basis of the null space."""
    F = A.field
    R, pivots = rref(A)
    free = [j for j in range(A.cols) if j not in pivots]
    cols = []
    for j in free:
        v = [F.zero] * A.cols
        v[j] = F.one
        for i, pc in enumerate(pivots):
            v[pc] = F.neg(R.data[i][j])
        cols.append(v)
    if not cols:
        return zeros(F, A.cols, 0)
    return transpose(mat(F, cols))


def cokernel(A):
    """Canonical projection onto the quotient by the column space of A.

    Returns (proj, dim) with proj of shape (rows - rank(A)) x rows,
    proj . A = 0 exactly, and kernel(proj) = column space of A.
    """
    proj = transpose(kernel_basis(transpose(A)))
    return proj, proj.rows


def solve(A, b):
    """One exact solution of A x = b with free variables set to zero.

    Returns a column Mat, or None if the system is inconsistent.
    """
    _same_field(A, b, "solve")
    if b.cols != 1 or b.rows != A.rows:
        raise ShapeError("solve expects a matching column vector")
    F = A.field
    R, pivots = rref(hstack([A, b]))
    if A.cols in pivots:
        return None
    x = [F.zero] * A.cols
    for i, pc in enumerate(pivots):
        x[pc] = R.data[i][A.cols]
    return col_vec(F, x)


def solve_matrix(A, B):
    """Columnwise solve of A X = B; None if any column is inconsistent."""
    cols = []
    for j in range(B.cols):
        x = solve(A, Mat(B.field, B.rows, 1, tuple((B.data[i][j],) for i in range(B.rows))))
        if x is None:
            return None
        cols.append([x.data[i][0] for i in range(A.cols)])
    if not cols:
        return zeros(A.field, A.cols, 0)
    return transpose(mat(A.field, cols))


def cokernel_with_section(A):
    """cokernel plus a canonical section: proj . section = identity."""
    proj, dim = cokernel(A)
    section = solve_matrix(proj, eye(A.field, dim))
    assert section is not None  # proj has full row rank
    return proj, section, dim


def inverse(A):
    """Exact inverse, or None if A is not square or not invertible."""
    if A.rows != A.cols:
        return None
    R, pivots = rref(hstack([A, eye(A.field, A.rows)]))
    if len(pivots) < A.rows or pivots != list(range(A.rows)):
        return None
    data = tuple(tuple(R.data[i][A.cols + j] for j in range(A.rows)) for i in range(A.rows))
    return Mat(A.field, A.rows, A.rows, data)


def is_invertible(A):
    return A.rows == A.cols and rank(A) == A.rows


def columns_in_span(A, B):
    """True iff every column of B lies in the column space of A."""
    return solve_matrix(A, B) is not None
