"""Exact linear algebra over Z, Q, and F_p.

This module is the computational substrate for everything else in the
package: Smith normal form with transforms, column Hermite form, kernels,
cokernels, homology of finitely generated abelian groups, and canonical
submodules of free modules.

Matrices are dense, immutable, and exact.  Integer entries are plain
Python ints (arbitrary precision), rational entries are
:class:`fractions.Fraction`, prime-field entries are ints reduced mod p.
Dense storage keeps the types simple; the elimination kernels skip zero
entries so that the large, very sparse matrices arising from monomial
maps still reduce quickly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import AmbientMismatch, NotAComplex, RingMismatch

# ---------------------------------------------------------------------------
# rings


def _is_probable_prime(n: int) -> bool:
    # deterministic Miller-Rabin for n < 3.3 * 10^24
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Ring:
    """Base ring tag: ``Z``, ``Q``, or ``Fp`` with its prime."""

    tag: str
    p: Optional[int] = None

    def __post_init__(self) -> None:
        if self.tag not in ("Z", "Q", "Fp"):
            raise ValueError(f"unknown ring tag {self.tag!r}")
        if self.tag == "Fp":
            if self.p is None or not _is_probable_prime(self.p):
                raise ValueError(f"Fp needs a prime modulus, got {self.p!r}")
        elif self.p is not None:
            raise ValueError(f"{self.tag} takes no modulus")

    @property
    def is_field(self) -> bool:
        return self.tag != "Z"

    @property
    def zero(self):
        return Fraction(0) if self.tag == "Q" else 0

    @property
    def one(self):
        return Fraction(1) if self.tag == "Q" else 1

    def normalize(self, value):
        """Coerce ``value`` (int, Fraction, or decimal string) into the ring."""
        if self.tag == "Z":
            if isinstance(value, str):
                value = int(value)
            if isinstance(value, Fraction):
                if value.denominator != 1:
                    raise ValueError(f"{value} is not an integer")
                value = value.numerator
            if not isinstance(value, int):
                raise ValueError(f"cannot coerce {value!r} into Z")
            return value
        if self.tag == "Q":
            return Fraction(value)
        if isinstance(value, str):
            value = int(value)
        if isinstance(value, Fraction):
            num, den = value.numerator, value.denominator
            return num * pow(den, -1, self.p) % self.p
        return int(value) % self.p

    def neg(self, a):
        if self.tag == "Fp":
            return (-a) % self.p
        return -a

    def add(self, a, b):
        if self.tag == "Fp":
            return (a + b) % self.p
        return a + b

    def mul(self, a, b):
        if self.tag == "Fp":
            return (a * b) % self.p
        return a * b

    def inv(self, a):
        if self.tag == "Q":
            return Fraction(1) / a
        if self.tag == "Fp":
            return pow(a, -1, self.p)
        if a in (1, -1):
            return a
        raise ValueError(f"{a} is not a unit in Z")

    def to_str(self, a) -> str:
        return str(a)


ZZ = Ring("Z")
QQ = Ring("Q")


def GF(p: int) -> Ring:
    return Ring("Fp", p)


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class Matrix:
    """Immutable dense matrix over one of the supported rings."""

    ring: Ring
    rows: int
    cols: int
    entries: tuple

    @staticmethod
    def from_rows(ring: Ring, rows: Sequence[Sequence]) -> "Matrix":
        data = tuple(tuple(ring.normalize(v) for v in row) for row in rows)
        nrows = len(data)
        ncols = len(data[0]) if data else 0
        for row in data:
            if len(row) != ncols:
                raise ValueError("ragged rows")
        return Matrix(ring, nrows, ncols, data)

    @staticmethod
    def zero(ring: Ring, rows: int, cols: int) -> "Matrix":
        z = ring.zero
        return Matrix(ring, rows, cols, tuple((z,) * cols for _ in range(rows)))

    @staticmethod
    def identity(ring: Ring, n: int) -> "Matrix":
        z, o = ring.zero, ring.one
        return Matrix(
            ring, n, n,
            tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)),
        )

    @staticmethod
    def diagonal(ring: Ring, diag: Sequence, rows: Optional[int] = None,
                 cols: Optional[int] = None) -> "Matrix":
        d = [ring.normalize(v) for v in diag]
        r = rows if rows is not None else len(d)
        c = cols if cols is not None else len(d)
        z = ring.zero
        ent = [[z] * c for _ in range(r)]
        for i, v in enumerate(d):
            if i < r and i < c:
                ent[i][i] = v
        return Matrix(ring, r, c, tuple(tuple(row) for row in ent))

    @staticmethod
    def from_columns(ring: Ring, cols: Sequence[Sequence]) -> "Matrix":
        if not cols:
            return Matrix.zero(ring, 0, 0)
        n = len(cols[0])
        ent = tuple(
            tuple(ring.normalize(col[i]) for col in cols) for i in range(n)
        )
        return Matrix(ring, n, len(cols), ent)

    @staticmethod
    def hstack(ring: Ring, blocks: Sequence["Matrix"], rows: Optional[int] = None) -> "Matrix":
        blocks = [b for b in blocks]
        if not blocks:
            return Matrix.zero(ring, rows or 0, 0)
        r = blocks[0].rows
        for b in blocks:
            if b.rows != r or b.ring != ring:
                raise ValueError("hstack shape or ring mismatch")
        ent = tuple(
            tuple(v for b in blocks for v in b.entries[i]) for i in range(r)
        )
        return Matrix(ring, r, sum(b.cols for b in blocks), ent)

    @staticmethod
    def vstack(ring: Ring, blocks: Sequence["Matrix"]) -> "Matrix":
        if not blocks:
            return Matrix.zero(ring, 0, 0)
        c = blocks[0].cols
        for b in blocks:
            if b.cols != c or b.ring != ring:
                raise ValueError("vstack shape or ring mismatch")
        ent = tuple(row for b in blocks for row in b.entries)
        return Matrix(ring, sum(b.rows for b in blocks), c, ent)

    @staticmethod
    def block_diagonal(ring: Ring, blocks: Sequence["Matrix"]) -> "Matrix":
        r = sum(b.rows for b in blocks)
        c = sum(b.cols for b in blocks)
        z = ring.zero
        ent = [[z] * c for _ in range(r)]
        i0 = j0 = 0
        for b in blocks:
            for i in range(b.rows):
                row = ent[i0 + i]
                brow = b.entries[i]
                for j in range(b.cols):
                    row[j0 + j] = brow[j]
            i0 += b.rows
            j0 += b.cols
        return Matrix(ring, r, c, tuple(tuple(row) for row in ent))

    def column(self, j: int) -> tuple:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def columns(self) -> list:
        return [self.column(j) for j in range(self.cols)]

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "Matrix":
        ent = tuple(
            tuple(self.entries[i][j] for j in col_idx) for i in row_idx
        )
        return Matrix(self.ring, len(row_idx), len(col_idx), ent)

    def transpose(self) -> "Matrix":
        ent = tuple(
            tuple(self.entries[i][j] for i in range(self.rows))
            for j in range(self.cols)
        )
        return Matrix(self.ring, self.cols, self.rows, ent)

    @property
    def is_zero(self) -> bool:
        z = self.ring.zero
        return all(v == z for row in self.entries for v in row)

    def __neg__(self) -> "Matrix":
        neg = self.ring.neg
        return Matrix(
            self.ring, self.rows, self.cols,
            tuple(tuple(neg(v) for v in row) for row in self.entries),
        )

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        add = self.ring.add
        ent = tuple(
            tuple(add(a, b) for a, b in zip(ra, rb))
            for ra, rb in zip(self.entries, other.entries)
        )
        return Matrix(self.ring, self.rows, self.cols, ent)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        c = self.ring.normalize(c)
        mul = self.ring.mul
        return Matrix(
            self.ring, self.rows, self.cols,
            tuple(tuple(mul(c, v) for v in row) for row in self.entries),
        )

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ring != other.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        z = self.ring.zero
        oent = other.entries
        out = []
        if self.ring.tag in ("Z", "Q"):
            for row in self.entries:
                acc = [z] * other.cols
                for k, a in enumerate(row):
                    if a == z:
                        continue
                    brow = oent[k]
                    for j, b in enumerate(brow):
                        if b != z:
                            acc[j] += a * b
                out.append(tuple(acc))
        else:
            p = self.ring.p
            for row in self.entries:
                acc = [0] * other.cols
                for k, a in enumerate(row):
                    if a == 0:
                        continue
                    brow = oent[k]
                    for j, b in enumerate(brow):
                        if b:
                            acc[j] += a * b
                out.append(tuple(v % p for v in acc))
        return Matrix(self.ring, self.rows, other.cols, tuple(out))

    def _check_same_shape(self, other: "Matrix") -> None:
        if self.ring != other.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    """U @ A @ V = D with U, V unimodular and D a nonnegative divisibility chain."""

    U: Matrix
    D: Matrix
    V: Matrix


def _swap_rows(M: list, i: int, j: int) -> None:
    M[i], M[j] = M[j], M[i]


def _swap_cols(M: list, i: int, j: int) -> None:
    for row in M:
        row[i], row[j] = row[j], row[i]


def _add_row(M: list, dst: int, src: int, c: int) -> None:
    # row_dst += c * row_src
    if c == 0:
        return
    rs = M[src]
    rd = M[dst]
    for k, v in enumerate(rs):
        if v:
            rd[k] += c * v


def _add_col(M: list, dst: int, src: int, c: int) -> None:
    if c == 0:
        return
    for row in M:
        v = row[src]
        if v:
            row[dst] += c * v


def smith_normal_form(A: Matrix) -> SmithDecomposition:
    """Smith normal form over Z with unimodular transforms.

    Returns ``SmithDecomposition(U, D, V)`` with ``U @ A @ V == D``,
    ``D`` diagonal, nonnegative, and each diagonal entry dividing the next.
    Raises :class:`RingMismatch` for field matrices; use :func:`rank` and
    :func:`kernel_basis` there instead.
    """
    if A.ring != ZZ:
        raise RingMismatch("Smith normal form is an integer computation")
    r, c = A.rows, A.cols
    M = [list(row) for row in A.entries]
    U = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    V = [[1 if i == j else 0 for j in range(c)] for i in range(c)]

    k = 0
    while k < min(r, c):
        # choose the nonzero entry of smallest magnitude in the remaining block
        piv = None
        best = None
        for i in range(k, r):
            row = M[i]
            for j in range(k, c):
                v = row[j]
                if v:
                    a = abs(v)
                    if best is None or a < best:
                        best = a
                        piv = (i, j)
                        if a == 1:
                            break
            if best == 1:
                break
        if piv is None:
            break
        if piv[0] != k:
            _swap_rows(M, k, piv[0])
            _swap_rows(U, k, piv[0])
        if piv[1] != k:
            _swap_cols(M, k, piv[1])
            _swap_cols(V, k, piv[1])

        while True:
            # clear column k with division steps, keeping the smallest pivot
            again = True
            while again:
                again = False
                for i in range(k + 1, r):
                    v = M[i][k]
                    if v:
                        q = v // M[k][k]
                        _add_row(M, i, k, -q)
                        _add_row(U, i, k, -q)
                        if M[i][k]:
                            _swap_rows(M, k, i)
                            _swap_rows(U, k, i)
                            again = True
                for j in range(k + 1, c):
                    v = M[k][j]
                    if v:
                        q = v // M[k][k]
                        _add_col(M, j, k, -q)
                        _add_col(V, j, k, -q)
                        if M[k][j]:
                            _swap_cols(M, k, j)
                            _swap_cols(V, k, j)
                            again = True
            # divisibility sweep: the pivot must divide the remaining block
            d = M[k][k]
            offender = None
            for i in range(k + 1, r):
                row = M[i]
                for j in range(k + 1, c):
                    if row[j] % d:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            _add_row(M, k, offender, 1)
            _add_row(U, k, offender, 1)
        k += 1

    for i in range(min(r, c)):
        if M[i][i] < 0:
            M[i] = [-v for v in M[i]]
            U[i] = [-v for v in U[i]]

    return SmithDecomposition(
        Matrix(ZZ, r, r, tuple(tuple(row) for row in U)),
        Matrix(ZZ, r, c, tuple(tuple(row) for row in M)),
        Matrix(ZZ, c, c, tuple(tuple(row) for row in V)),
    )


def smith_invariants(A: Matrix) -> list:
    """Diagonal of the Smith form of an integer matrix, without transforms.

    Greedy elimination of unit pivots first (cheap on the sparse monomial
    matrices this package produces), then a dense sweep on whatever small
    block is left.  Returns the nonzero invariant factors as an increasing
    divisibility chain; the number returned is the rank.
    """
    if A.ring != ZZ:
        raise RingMismatch("invariant factors are an integer computation")
    rows: dict = {}
    colidx: dict = {}
    unit_candidates: list = []
    for i, row in enumerate(A.entries):
        r = {}
        for j, v in enumerate(row):
            if v:
                r[j] = v
                colidx.setdefault(j, set()).add(i)
                if v == 1 or v == -1:
                    unit_candidates.append((i, j))
        if r:
            rows[i] = r

    units = 0
    while unit_candidates:
        i, j = unit_candidates.pop()
        if i not in rows or j not in rows[i]:
            continue
        v = rows[i][j]
        if v != 1 and v != -1:
            continue
        pr = rows.pop(i)
        for jj in pr:
            colidx[jj].discard(i)
        for r2 in list(colidx.get(j, ())):
            row2 = rows[r2]
            factor = row2[j] * v  # v is its own inverse
            for jj, w in pr.items():
                nv = row2.get(jj, 0) - factor * w
                if nv:
                    row2[jj] = nv
                    colidx.setdefault(jj, set()).add(r2)
                    if nv == 1 or nv == -1:
                        unit_candidates.append((r2, jj))
                else:
                    if jj in row2:
                        del row2[jj]
                        colidx[jj].discard(r2)
            if not row2:
                del rows[r2]
        colidx.pop(j, None)
        units += 1

    if not rows:
        return [1] * units

    live_rows = sorted(rows)
    live_cols = sorted({j for r in rows.values() for j in r})
    cmap = {j: k for k, j in enumerate(live_cols)}
    dense = [[0] * len(live_cols) for _ in live_rows]
    for a, i in enumerate(live_rows):
        for j, v in rows[i].items():
            dense[a][cmap[j]] = v
    residual = _dense_invariants(dense)
    return [1] * units + residual


def _dense_invariants(M: list) -> list:
    """Nonzero Smith invariants of a dense list-of-lists integer matrix."""
    r = len(M)
    c = len(M[0]) if r else 0
    out = []
    k = 0
    while k < min(r, c):
        piv = None
        best = None
        for i in range(k, r):
            for j in range(k, c):
                v = M[i][j]
                if v:
                    if best is None or abs(v) < best:
                        best = abs(v)
                        piv = (i, j)
        if piv is None:
            break
        _swap_rows(M, k, piv[0])
        _swap_cols(M, k, piv[1])
        while True:
            again = True
            while again:
                again = False
                for i in range(k + 1, r):
                    if M[i][k]:
                        q = M[i][k] // M[k][k]
                        _add_row(M, i, k, -q)
                        if M[i][k]:
                            _swap_rows(M, k, i)
                            again = True
                for j in range(k + 1, c):
                    if M[k][j]:
                        q = M[k][j] // M[k][k]
                        _add_col(M, j, k, -q)
                        if M[k][j]:
                            _swap_cols(M, k, j)
                            again = True
            d = M[k][k]
            offender = None
            for i in range(k + 1, r):
                if any(M[i][j] % d for j in range(k + 1, c)):
                    offender = i
                    break
            if offender is None:
                break
            _add_row(M, k, offender, 1)
        out.append(abs(M[k][k]))
        k += 1
    return out


# ---------------------------------------------------------------------------
# rank, determinant, field elimination


def rank(A: Matrix) -> int:
    if A.ring == ZZ:
        return len(smith_invariants(A))
    return len(_field_echelon([list(r) for r in A.entries], A.ring)[1])


def _field_echelon(M: list, ring: Ring):
    """Row echelon form in place over a field; returns (matrix, pivot column list)."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    z = ring.zero
    pivots = []
    rr = 0
    for j in range(cols):
        sel = None
        for i in range(rr, rows):
            if M[i][j] != z:
                sel = i
                break
        if sel is None:
            continue
        M[rr], M[sel] = M[sel], M[rr]
        inv = ring.inv(M[rr][j])
        M[rr] = [ring.mul(inv, v) for v in M[rr]]
        for i in range(rows):
            if i != rr and M[i][j] != z:
                f = M[i][j]
                M[i] = [ring.add(a, ring.neg(ring.mul(f, b))) for a, b in zip(M[i], M[rr])]
        pivots.append(j)
        rr += 1
        if rr == rows:
            break
    return M, pivots


def determinant(A: Matrix):
    """Exact determinant (Bareiss over Z, Gaussian over fields)."""
    if A.rows != A.cols:
        raise ValueError("determinant of a non-square matrix")
    n = A.rows
    if n == 0:
        return A.ring.one
    M = [list(r) for r in A.entries]
    if A.ring == ZZ:
        sign = 1
        prev = 1
        for k in range(n - 1):
            if M[k][k] == 0:
                sel = next((i for i in range(k + 1, n) if M[i][k]), None)
                if sel is None:
                    return 0
                M[k], M[sel] = M[sel], M[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
                M[i][k] = 0
            prev = M[k][k]
        return sign * M[n - 1][n - 1]
    ring = A.ring
    det = ring.one
    for k in range(n):
        sel = next((i for i in range(k, n) if M[i][k] != ring.zero), None)
        if sel is None:
            return ring.zero
        if sel != k:
            M[k], M[sel] = M[sel], M[k]
            det = ring.neg(det)
        det = ring.mul(det, M[k][k])
        inv = ring.inv(M[k][k])
        for i in range(k + 1, n):
            if M[i][k] != ring.zero:
                f = ring.mul(M[i][k], inv)
                M[i] = [ring.add(a, ring.neg(ring.mul(f, b))) for a, b in zip(M[i], M[k])]
    return det


def is_unimodular(A: Matrix) -> bool:
    if A.rows != A.cols:
        return False
    d = determinant(A)
    if A.ring == ZZ:
        return d in (1, -1)
    return d != A.ring.zero


# ---------------------------------------------------------------------------
# Hermite column form and canonical submodules


def hermite_column_form(A: Matrix) -> Matrix:
    """Canonical column form; columns span the same submodule as ``A``.

    Over Z this is the column Hermite form: pivot rows strictly increase,
    pivots are positive, entries left of a pivot in its row are reduced
    into [0, pivot).  Over a field it is the column-reduced echelon form.
    Zero columns are dropped, so equal spans give equal matrices.
    """
    ring = A.ring
    cols = [list(A.column(j)) for j in range(A.cols)]
    n = A.rows
    z = ring.zero
    npiv = 0
    if ring == ZZ:
        for r in range(n):
            # gather columns with a nonzero entry in row r
            while True:
                idx = [j for j in range(npiv, len(cols)) if cols[j][r]]
                if not idx:
                    break
                if len(idx) == 1 and npiv in idx:
                    jbest = idx[0]
                else:
                    jbest = min(idx, key=lambda j: abs(cols[j][r]))
                cols[npiv], cols[jbest] = cols[jbest], cols[npiv]
                done = True
                for j in range(npiv + 1, len(cols)):
                    v = cols[j][r]
                    if v:
                        q = v // cols[npiv][r]
                        if q:
                            cols[j] = [a - q * b for a, b in zip(cols[j], cols[npiv])]
                        if cols[j][r]:
                            done = False
                if done:
                    break
            if npiv < len(cols) and cols[npiv][r]:
                if cols[npiv][r] < 0:
                    cols[npiv] = [-v for v in cols[npiv]]
                piv = cols[npiv][r]
                for j in range(npiv):
                    q = cols[j][r] // piv
                    if q:
                        cols[j] = [a - q * b for a, b in zip(cols[j], cols[npiv])]
                npiv += 1
        cols = [col for col in cols[:npiv]]
    else:
        for r in range(n):
            sel = next((j for j in range(npiv, len(cols)) if cols[j][r] != z), None)
            if sel is None:
                continue
            cols[npiv], cols[sel] = cols[sel], cols[npiv]
            inv = ring.inv(cols[npiv][r])
            cols[npiv] = [ring.mul(inv, v) for v in cols[npiv]]
            for j in range(len(cols)):
                if j != npiv and cols[j][r] != z:
                    f = cols[j][r]
                    cols[j] = [
                        ring.add(a, ring.neg(ring.mul(f, b)))
                        for a, b in zip(cols[j], cols[npiv])
                    ]
            npiv += 1
        cols = cols[:npiv]
    return Matrix.from_columns(ring, cols) if cols else Matrix.zero(ring, n, 0)


@dataclass(frozen=True)
class Submodule:
    """Submodule of a free module, canonicalized by column Hermite form.

    Equality of values is equality of submodules.  Canonicalization is a
    change of generating set only: the lattice itself is never saturated.
    """

    ring: Ring
    ambient: int
    gens: Matrix

    @staticmethod
    def span(ring: Ring, ambient: int, gens: Matrix) -> "Submodule":
        if gens.rows != ambient:
            raise AmbientMismatch(f"generators live in rank {gens.rows}, ambient is {ambient}")
        return Submodule(ring, ambient, hermite_column_form(gens))

    @staticmethod
    def zero(ring: Ring, ambient: int) -> "Submodule":
        return Submodule(ring, ambient, Matrix.zero(ring, ambient, 0))

    @staticmethod
    def full(ring: Ring, ambient: int) -> "Submodule":
        return Submodule(ring, ambient, Matrix.identity(ring, ambient))

    @property
    def rank(self) -> int:
        return self.gens.cols

    @property
    def is_zero(self) -> bool:
        return self.gens.cols == 0

    @property
    def is_full(self) -> bool:
        return self.gens == Matrix.identity(self.ring, self.ambient)

    def _pivots(self) -> list:
        z = self.ring.zero
        piv = []
        for j in range(self.gens.cols):
            col = self.gens.column(j)
            piv.append(next(i for i, v in enumerate(col) if v != z))
        return piv

    def contains_vector(self, v: Sequence) -> bool:
        ring = self.ring
        res = [ring.normalize(x) for x in v]
        if len(res) != self.ambient:
            raise AmbientMismatch("vector length differs from ambient rank")
        z = ring.zero
        for j, p in enumerate(self._pivots()):
            if res[p] == z:
                continue
            piv = self.gens.entries[p][j]
            if ring == ZZ:
                q, rem = divmod(res[p], piv)
                if rem:
                    return False
            else:
                q = ring.mul(res[p], ring.inv(piv))
            col = self.gens.column(j)
            res = [ring.add(a, ring.neg(ring.mul(q, b))) for a, b in zip(res, col)]
        return all(x == z for x in res)

    def contains_matrix(self, M: Matrix) -> bool:
        return all(self.contains_vector(M.column(j)) for j in range(M.cols))

    def contains(self, other: "Submodule") -> bool:
        if other.ambient != self.ambient:
            raise AmbientMismatch("different ambient ranks")
        return self.contains_matrix(other.gens)

    def add(self, other: "Submodule") -> "Submodule":
        if other.ambient != self.ambient:
            raise AmbientMismatch("different ambient ranks")
        return Submodule.span(
            self.ring, self.ambient,
            Matrix.hstack(self.ring, [self.gens, other.gens], rows=self.ambient),
        )

    def image_under(self, M: Matrix) -> "Submodule":
        if M.cols != self.ambient:
            raise AmbientMismatch("map domain differs from ambient rank")
        return Submodule.span(self.ring, M.rows, M @ self.gens)


def intersect_submodules(A: Submodule, B: Submodule) -> Submodule:
    """Intersection, computed from the kernel of the concatenated generators."""
    if A.ambient != B.ambient:
        raise AmbientMismatch(f"ambient ranks {A.ambient} and {B.ambient}")
    if A.ring != B.ring:
        raise RingMismatch("submodules over different rings")
    if A.is_zero or B.is_zero:
        return Submodule.zero(A.ring, A.ambient)
    combined = Matrix.hstack(A.ring, [A.gens, B.gens], rows=A.ambient)
    K = kernel_basis(combined)
    top = K.submatrix(range(A.gens.cols), range(K.cols))
    return Submodule.span(A.ring, A.ambient, A.gens @ top)


# ---------------------------------------------------------------------------
# kernels, solving, cokernels, homology


def kernel_basis(A: Matrix) -> Matrix:
    """Basis of {v : Av = 0} as matrix columns.

    Over Z the result is a lattice basis of the full kernel (which is
    automatically saturated), canonicalized in Hermite form.
    """
    if A.ring == ZZ:
        snf = smith_normal_form(A)
        rk = sum(
            1 for i in range(min(A.rows, A.cols)) if snf.D.entries[i][i]
        )
        ker = snf.V.submatrix(range(A.cols), range(rk, A.cols))
        return hermite_column_form(ker)
    ring = A.ring
    M, pivots = _field_echelon([list(r) for r in A.entries], ring)
    free = [j for j in range(A.cols) if j not in pivots]
    z, o = ring.zero, ring.one
    cols = []
    for f in free:
        v = [z] * A.cols
        v[f] = o
        for i, pj in enumerate(pivots):
            v[pj] = ring.neg(M[i][f])
        cols.append(v)
    if not cols:
        return Matrix.zero(ring, A.cols, 0)
    return hermite_column_form(Matrix.from_columns(ring, cols))


def kernel_submodule(A: Matrix) -> Submodule:
    return Submodule(A.ring, A.cols, kernel_basis(A))


def solve_columns(A: Matrix, B: Matrix) -> Optional[Matrix]:
    """Exact solution X of A @ X = B, or None when no solution exists."""
    if A.ring != B.ring or A.rows != B.rows:
        raise ValueError("incompatible solve operands")
    ring = A.ring
    if ring == ZZ:
        snf = smith_normal_form(A)
        W = snf.U @ B
        m = min(A.rows, A.cols)
        X = [[0] * B.cols for _ in range(A.cols)]
        for j in range(B.cols):
            for i in range(A.rows):
                w = W.entries[i][j]
                if i < m and snf.D.entries[i][i]:
                    q, rem = divmod(w, snf.D.entries[i][i])
                    if rem:
                        return None
                    X[i][j] = q
                elif w:
                    return None
        return snf.V @ Matrix(ZZ, A.cols, B.cols, tuple(tuple(r) for r in X))
    aug = [list(ra) + list(rb) for ra, rb in zip(A.entries, B.entries)]
    M, pivots = _field_echelon(aug, ring)
    z = ring.zero
    for i in range(len(pivots), A.rows):
        if any(M[i][A.cols + j] != z for j in range(B.cols)):
            return None
    if any(p >= A.cols for p in pivots):
        return None
    X = [[z] * B.cols for _ in range(A.cols)]
    for i, pj in enumerate(pivots):
        for j in range(B.cols):
            X[pj][j] = M[i][A.cols + j]
    return Matrix(ring, A.cols, B.cols, tuple(tuple(r) for r in X))


@dataclass(frozen=True)
class ModulePresentation:
    """A finitely generated module up to isomorphism.

    Over Z: free rank plus invariant factors (each > 1, a divisibility
    chain).  Over a field the invariant factors are empty and the free
    rank is the dimension.
    """

    ring: Ring
    free_rank: int
    invariant_factors: tuple

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    @property
    def dim(self) -> int:
        """Free rank: the additive (Euler characteristic) size."""
        return self.free_rank

    def describe(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        if self.free_rank:
            parts.append(f"free^{self.free_rank}")
        parts.extend(f"/{d}" for d in self.invariant_factors)
        return " + ".join(parts)


def cokernel(A: Matrix) -> ModulePresentation:
    """Presentation of target / column span of ``A``."""
    if A.ring == ZZ:
        inv = smith_invariants(A)
        free = A.rows - len(inv)
        factors = tuple(d for d in inv if d > 1)
        return ModulePresentation(ZZ, free, factors)
    return ModulePresentation(A.ring, A.rows - rank(A), ())


def homology_at(d_out: Matrix, d_in: Matrix) -> ModulePresentation:
    """Ker(d_out)/Im(d_in) for consecutive differentials.

    Uses the saturation of integer kernels: the torsion of the quotient
    equals the torsion of coker(d_in) because any element with a multiple
    in Im(d_in) already lies in Ker(d_out).  Free rank comes from ranks.
    """
    if d_out.ring != d_in.ring:
        raise RingMismatch("differentials over different rings")
    if d_out.cols != d_in.rows:
        raise ValueError("differentials do not share the middle module")
    if not (d_out @ d_in).is_zero:
        raise NotAComplex("d_out @ d_in is nonzero")
    n = d_out.cols
    if d_out.ring == ZZ:
        inv_in = smith_invariants(d_in)
        free = n - rank(d_out) - len(inv_in)
        factors = tuple(d for d in inv_in if d > 1)
        return ModulePresentation(ZZ, free, factors)
    return ModulePresentation(d_out.ring, n - rank(d_out) - rank(d_in), ())


def invert_unimodular(A: Matrix) -> Matrix:
    """Exact inverse of a unimodular integer matrix (or any invertible field matrix)."""
    n = A.rows
    if A.rows != A.cols:
        raise ValueError("inverse of a non-square matrix")
    if A.ring == ZZ:
        aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
               for i, row in enumerate(A.entries)]
        M, pivots = _field_echelon(aug, QQ)
        if len(pivots) != n:
            raise ValueError("matrix is singular")
        ent = []
        for i in range(n):
            row = []
            for j in range(n):
                v = M[i][n + j]
                if v.denominator != 1:
                    raise ValueError("matrix is not unimodular")
                row.append(v.numerator)
            ent.append(tuple(row))
        return Matrix(ZZ, n, n, tuple(ent))
    X = solve_columns(A, Matrix.identity(A.ring, n))
    if X is None:
        raise ValueError("matrix is singular")
    return X
