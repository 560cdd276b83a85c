"""Column-major sparse matrices over an exact field, shape predicates,
permutations, the reversal matrix J and triangular solves.

Indices are 0-based in the Python API.  Text formats use 1-based indices.
"""
from __future__ import annotations

import enum
from typing import Iterable, Sequence

from .errors import (
    DimensionMismatch,
    FieldMismatch,
    Inconsistent,
    NotInvertible,
    NotTriangular,
    ParseError,
)
from .fields import Field, get_field


class SparseMatrix:
    """Immutable (from the caller's point of view) sparse matrix.

    Column ``j`` is a dict ``{row: value}`` holding only nonzero values.
    """

    __slots__ = ("nrows", "ncols", "field", "_cols")

    def __init__(self, nrows: int, ncols: int, field, cols=None):
        if nrows < 0 or ncols < 0:
            raise DimensionMismatch(f"negative shape {nrows}x{ncols}")
        self.nrows = nrows
        self.ncols = ncols
        self.field = get_field(field)
        if cols is None:
            cols = [{} for _ in range(ncols)]
        elif len(cols) != ncols:
            raise DimensionMismatch("column count does not match ncols")
        self._cols = cols

    # construction -------------------------------------------------------
    @classmethod
    def zeros(cls, nrows, ncols, field):
        return cls(nrows, ncols, field)

    @classmethod
    def identity(cls, n, field):
        field = get_field(field)
        return cls(n, n, field, [{j: field.one} for j in range(n)])

    @classmethod
    def from_entries(cls, nrows, ncols, entries, field):
        """Build from ``(i, j, value)`` triples (0-based).  Repeats are summed."""
        field = get_field(field)
        cols = [{} for _ in range(ncols)]
        for i, j, v in entries:
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise DimensionMismatch(f"entry ({i},{j}) outside {nrows}x{ncols}")
            col = cols[j]
            col[i] = field.reduce(col.get(i, 0) + field.coerce(v))
        for col in cols:
            for i in [i for i, v in col.items() if v == 0]:
                del col[i]
        return cls(nrows, ncols, field, cols)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence], field, ncols=None):
        field = get_field(field)
        m = len(rows)
        n = len(rows[0]) if m else (ncols or 0)
        entries = [(i, j, v) for i, row in enumerate(rows) for j, v in enumerate(row) if v != 0]
        if any(len(row) != n for row in rows):
            raise DimensionMismatch("ragged dense input")
        return cls.from_entries(m, n, entries, field)

    @classmethod
    def from_columns(cls, nrows, columns: Iterable[dict], field):
        """Wrap column dicts (no zeros allowed).  The dicts are copied."""
        cols = [dict(c) for c in columns]
        return cls(nrows, len(cols), field, cols)

    # access ---------------------------------------------------------------
    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, key):
        i, j = key
        return self._cols[j].get(i, self.field.zero)

    def col(self, j) -> dict:
        return dict(self._cols[j])

    def col_items(self, j):
        return sorted(self._cols[j].items())

    def rows(self) -> list[dict]:
        out = [{} for _ in range(self.nrows)]
        for j, col in enumerate(self._cols):
            for i, v in col.items():
                out[i][j] = v
        return out

    def entries(self):
        """Nonzero ``(i, j, value)`` triples sorted by row then column."""
        return sorted((i, j, v) for j, col in enumerate(self._cols) for i, v in col.items())

    def nnz(self) -> int:
        return sum(len(c) for c in self._cols)

    def pivot(self, j):
        """Largest row index with a nonzero in column j, or None."""
        col = self._cols[j]
        return max(col) if col else None

    def is_square(self):
        return self.nrows == self.ncols

    def is_zero(self):
        return not any(self._cols)

    def to_dense(self):
        out = [[self.field.zero] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self._cols):
            for i, v in col.items():
                out[i][j] = v
        return out

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, {self.field.tag}, nnz={self.nnz()})"

    def __str__(self):
        return "\n".join(" ".join(self.field.format(v) for v in row) for row in self.to_dense())

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.field == other.field
            and self._cols == other._cols
        )

    __hash__ = None

    def __reduce__(self):
        return (SparseMatrix, (self.nrows, self.ncols, self.field.tag, self._cols))

    # arithmetic ---------------------------------------------------------
    def _same_field(self, other):
        if self.field != other.field:
            raise FieldMismatch(f"{self.field.tag} vs {other.field.tag}")

    def __matmul__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        self._same_field(other)
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        red = self.field.reduce
        acols = self._cols
        out = []
        for bcol in other._cols:
            acc = {}
            get = acc.get
            for k, b in bcol.items():
                for i, a in acols[k].items():
                    acc[i] = get(i, 0) + a * b
            col = {}
            for i, v in acc.items():
                v = red(v)
                if v != 0:
                    col[i] = v
            out.append(col)
        return SparseMatrix(self.nrows, other.ncols, self.field, out)

    def _combine(self, other, sign):
        self._same_field(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} vs {other.shape}")
        red = self.field.reduce
        out = []
        for ca, cb in zip(self._cols, other._cols):
            col = dict(ca)
            for i, v in cb.items():
                w = red(col.get(i, 0) + sign * v)
                if w != 0:
                    col[i] = w
                else:
                    col.pop(i, None)
            out.append(col)
        return SparseMatrix(self.nrows, self.ncols, self.field, out)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        red = self.field.reduce
        c = self.field.coerce(c)
        if c == 0:
            return SparseMatrix.zeros(self.nrows, self.ncols, self.field)
        return SparseMatrix(
            self.nrows, self.ncols, self.field,
            [{i: red(v * c) for i, v in col.items()} for col in self._cols],
        )

    @property
    def T(self):
        return self.transpose()

    def transpose(self):
        out = [{} for _ in range(self.nrows)]
        for j, col in enumerate(self._cols):
            for i, v in col.items():
                out[i][j] = v
        return SparseMatrix(self.ncols, self.nrows, self.field, out)

    # index manipulation -------------------------------------------------------
    def flip_rows(self):
        """J @ self."""
        m = self.nrows - 1
        return SparseMatrix(
            self.nrows, self.ncols, self.field,
            [{m - i: v for i, v in col.items()} for col in self._cols],
        )

    def flip_cols(self):
        """self @ J."""
        return SparseMatrix(self.nrows, self.ncols, self.field, [dict(c) for c in reversed(self._cols)])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]):
        where = {r: k for k, r in enumerate(rows)}
        out = []
        for j in cols:
            out.append({where[i]: v for i, v in self._cols[j].items() if i in where})
        return SparseMatrix(len(rows), len(cols), self.field, out)

    def copy_cols(self) -> list[dict]:
        """Mutable copies of the columns, for use by algorithms."""
        return [dict(c) for c in self._cols]

    def inverse(self):
        """Exact inverse by Gauss-Jordan elimination on rows."""
        if not self.is_square():
            raise NotInvertible(f"{self.shape} is not square")
        n = self.nrows
        f = self.field
        red = f.reduce
        work = self.rows()
        inv = [{i: f.one} for i in range(n)]
        for c in range(n):
            piv = next((r for r in range(c, n) if c in work[r]), None)
            if piv is None:
                raise NotInvertible("matrix is singular")
            work[c], work[piv] = work[piv], work[c]
            inv[c], inv[piv] = inv[piv], inv[c]
            s = f.inv(work[c][c])
            work[c] = {k: red(v * s) for k, v in work[c].items()}
            inv[c] = {k: red(v * s) for k, v in inv[c].items()}
            for r in range(n):
                if r != c and c in work[r]:
                    a = work[r][c]
                    _axpy(work[r], work[c], -a, red)
                    _axpy(inv[r], inv[c], -a, red)
        return SparseMatrix.from_columns(n, inv, f).transpose()


def _axpy(dst: dict, src: dict, a, red):
    """dst += a * src in place, dropping zeros."""
    for i, v in src.items():
        w = red(dst.get(i, 0) + a * v)
        if w != 0:
            dst[i] = w
        else:
            dst.pop(i, None)


def identity(n, field):
    return SparseMatrix.identity(n, field)


def J(n, field):
    """The n x n reversal matrix (ones on the anti-diagonal)."""
    field = get_field(field)
    return SparseMatrix(n, n, field, [{n - 1 - j: field.one} for j in range(n)])


def j_conjugate(A: SparseMatrix) -> SparseMatrix:
    """J A J: entry (i, j) moves to (n-1-i, n-1-j)."""
    if not A.is_square():
        raise DimensionMismatch(f"J-conjugation needs a square matrix, got {A.shape}")
    return j_flip(A)


def j_flip(A: SparseMatrix) -> SparseMatrix:
    """J_m A J_n for any m x n matrix (reverses rows and columns)."""
    return A.flip_rows().flip_cols()


def hstack(blocks: Sequence[SparseMatrix]) -> SparseMatrix:
    if not blocks:
        raise ValueError("nothing to stack")
    m = blocks[0].nrows
    if any(b.nrows != m for b in blocks):
        raise DimensionMismatch("hstack row counts differ")
    cols = [dict(c) for b in blocks for c in b._cols]
    return SparseMatrix(m, len(cols), blocks[0].field, cols)


def vstack(blocks: Sequence[SparseMatrix]) -> SparseMatrix:
    if not blocks:
        raise ValueError("nothing to stack")
    n = blocks[0].ncols
    if any(b.ncols != n for b in blocks):
        raise DimensionMismatch("vstack column counts differ")
    cols = [{} for _ in range(n)]
    off = 0
    for b in blocks:
        for j, col in enumerate(b._cols):
            cols[j].update((i + off, v) for i, v in col.items())
        off += b.nrows
    return SparseMatrix(off, n, blocks[0].field, cols)


def block(rows: Sequence[Sequence[SparseMatrix]]) -> SparseMatrix:
    return vstack([hstack(list(r)) for r in rows])


def block_diag(blocks: Sequence[SparseMatrix], field=None) -> SparseMatrix:
    field = get_field(field) if field is not None else blocks[0].field
    m = sum(b.nrows for b in blocks)
    cols = []
    off = 0
    for b in blocks:
        cols.extend({i + off: v for i, v in c.items()} for c in b._cols)
        off += b.nrows
    return SparseMatrix(m, len(cols), field, cols)


# permutations ----------------------------------------------------------------
def perm_matrix(perm: Sequence[int], field) -> SparseMatrix:
    """Matrix P with P[perm[j], j] = 1."""
    field = get_field(field)
    _check_perm(perm, len(perm))
    return SparseMatrix(len(perm), len(perm), field, [{p: field.one} for p in perm])


def perm_from_matrix(P: SparseMatrix) -> list[int]:
    if not is_perm(P):
        raise ValueError("not a permutation matrix")
    return [next(iter(c)) for c in P._cols]


def invert_perm(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for j, p in enumerate(perm):
        inv[p] = j
    return inv


def _check_perm(perm, n):
    if len(perm) != n or sorted(perm) != list(range(n)):
        raise DimensionMismatch(f"not a permutation of {n} indices: {list(perm)}")


def apply_permutation(perm: Sequence[int], A: SparseMatrix, side: str = "rows") -> SparseMatrix:
    """``P @ A`` for side="rows", ``A @ P`` for side="cols", where P = perm_matrix(perm)."""
    if side == "rows":
        _check_perm(perm, A.nrows)
        return SparseMatrix(
            A.nrows, A.ncols, A.field,
            [{perm[i]: v for i, v in col.items()} for col in A._cols],
        )
    if side == "cols":
        _check_perm(perm, A.ncols)
        return SparseMatrix(A.nrows, A.ncols, A.field, [dict(A._cols[p]) for p in perm])
    raise ValueError(f"side must be 'rows' or 'cols', not {side!r}")


# shapes ------------------------------------------------------------------
class ShapeKind(str, enum.Enum):
    GENERIC = "Generic"
    LOWER = "Lower"
    UPPER = "Upper"
    PERM = "Perm"
    PIVOT = "Pivot"
    EL = "EL"
    EU = "EU"
    ELHAT = "ELhat"
    EUHAT = "EUhat"
    ANTIDIAG_J = "AntiDiagJ"


def is_lower(A: SparseMatrix) -> bool:
    return all(i >= j for j, col in enumerate(A._cols) for i in col)


def is_upper(A: SparseMatrix) -> bool:
    return all(i <= j for j, col in enumerate(A._cols) for i in col)


def is_unit_triangular(A: SparseMatrix, kind: str) -> bool:
    if not A.is_square():
        return False
    tri = is_lower(A) if kind == "lower" else is_upper(A)
    return tri and all(A._cols[j].get(j) == 1 for j in range(A.ncols))


def is_pivot(A: SparseMatrix) -> bool:
    seen = set()
    for col in A._cols:
        if len(col) > 1:
            return False
        for i in col:
            if i in seen:
                return False
            seen.add(i)
    return True


def is_perm(A: SparseMatrix) -> bool:
    return (
        A.is_square()
        and is_pivot(A)
        and all(len(c) == 1 and next(iter(c.values())) == 1 for c in A._cols)
    )


def is_EL(A: SparseMatrix) -> bool:
    """Pivot matrix, pivot rows increase with the column, zero columns trailing."""
    if not is_pivot(A):
        return False
    last = -1
    seen_zero = False
    for col in A._cols:
        if not col:
            seen_zero = True
            continue
        if seen_zero:
            return False
        (i,) = col
        if i <= last:
            return False
        last = i
    return True


def is_EU(A: SparseMatrix) -> bool:
    return is_EL(A.transpose())


def is_EUhat(A: SparseMatrix) -> bool:
    # hatted shapes are the J-conjugates of the plain ones: Ê_U = J E_L J
    return is_EL(j_flip(A))


def is_ELhat(A: SparseMatrix) -> bool:
    return is_EU(j_flip(A))


def is_J(A: SparseMatrix) -> bool:
    n = A.nrows
    return A.is_square() and all(c == {n - 1 - j: 1} for j, c in enumerate(A._cols))


SHAPE_PREDICATES = {
    ShapeKind.LOWER: is_lower,
    ShapeKind.UPPER: is_upper,
    ShapeKind.PERM: is_perm,
    ShapeKind.PIVOT: is_pivot,
    ShapeKind.EL: is_EL,
    ShapeKind.EU: is_EU,
    ShapeKind.ELHAT: is_ELhat,
    ShapeKind.EUHAT: is_EUhat,
    ShapeKind.ANTIDIAG_J: is_J,
}


def classify_shape(A: SparseMatrix) -> set:
    """Every shape the matrix satisfies; ``{GENERIC}`` when none applies."""
    kinds = {k for k, pred in SHAPE_PREDICATES.items() if pred(A)}
    return kinds or {ShapeKind.GENERIC}


def has_shape(A: SparseMatrix, kind) -> bool:
    return SHAPE_PREDICATES[ShapeKind(kind)](A)


# triangular solves ----------------------------------------------------------
def solve_triangular(T: SparseMatrix, b: dict, side: str = "left", kind: str = "lower") -> dict:
    """Solve ``T x = b`` (side="left") or ``x T = b`` (side="right").

    ``b`` and the result are sparse vectors ``{index: value}``.  A zero on the
    diagonal is allowed as long as the system stays consistent.
    """
    kind = kind.lower()
    if kind not in ("lower", "upper"):
        raise ValueError(f"kind must be lower or upper, not {kind!r}")
    if side == "right":
        T = T.transpose()
        kind = "upper" if kind == "lower" else "lower"
    elif side != "left":
        raise ValueError(f"side must be left or right, not {side!r}")
    if not T.is_square():
        raise DimensionMismatch(f"triangular solve needs a square matrix, got {T.shape}")
    if not (is_lower(T) if kind == "lower" else is_upper(T)):
        raise NotTriangular(f"matrix is not {kind} triangular")
    return _substitute(T, b, kind)


def _substitute(T: SparseMatrix, b: dict, kind: str) -> dict:
    n = T.nrows
    f = T.field
    red = f.reduce
    r = {i: red(v) for i, v in b.items() if red(v) != 0}
    if any(not 0 <= i < n for i in r):
        raise DimensionMismatch("right-hand side index out of range")
    x = {}
    order = range(n) if kind == "lower" else range(n - 1, -1, -1)
    cols = T._cols
    for j in order:
        rj = r.get(j, 0)
        if rj == 0:
            continue
        d = cols[j].get(j, 0)
        if d == 0:
            raise Inconsistent("right-hand side is not in the column space")
        xj = red(rj * f.inv(d))
        x[j] = xj
        _axpy(r, cols[j], -xj, red)
    return x


def triangular_inverse(T: SparseMatrix, kind: str) -> SparseMatrix:
    """Inverse of an invertible triangular matrix, column by column."""
    n = T.nrows
    if not T.is_square():
        raise NotInvertible(f"{T.shape} is not square")
    f = T.field
    if not (is_lower(T) if kind == "lower" else is_upper(T)):
        raise NotTriangular(f"matrix is not {kind} triangular")
    try:
        cols = [_substitute(T, {j: f.one}, kind) for j in range(n)]
    except Inconsistent as exc:
        raise NotInvertible("triangular matrix has a zero diagonal entry") from exc
    return SparseMatrix(n, n, f, cols)


# COO text format -------------------------------------------------------------
def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_coo_entries(lines, nrows, ncols, field: Field, start_line=1):
    """Parse ``i j value`` lines (1-based) into a matrix."""
    seen = {}
    for off, raw in enumerate(lines):
        line = _strip(raw)
        if not line:
            continue
        lineno = start_line + off
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected 'i j value', got {line!r}", lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"bad index in {line!r}", lineno) from None
        if not (1 <= i <= nrows and 1 <= j <= ncols):
            raise ParseError(f"entry ({i},{j}) outside {nrows}x{ncols}", lineno)
        if (i, j) in seen:
            raise ParseError(f"duplicate entry ({i},{j})", lineno)
        seen[(i, j)] = field.parse(parts[2])
    return SparseMatrix.from_entries(
        nrows, ncols, [(i - 1, j - 1, v) for (i, j), v in seen.items()], field
    )


def parse_matrix(text: str, field=None) -> SparseMatrix:
    """Parse the COO format; ``field`` overrides the header's field tag."""
    lines = text.splitlines()
    for k, raw in enumerate(lines):
        line = _strip(raw)
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4 or parts[0] != "matrix":
            raise ParseError("expected header 'matrix <nrows> <ncols> <field>'", k + 1)
        try:
            m, n = int(parts[1]), int(parts[2])
        except ValueError:
            raise ParseError("bad matrix dimensions", k + 1) from None
        if m < 0 or n < 0:
            raise ParseError("negative matrix dimensions", k + 1)
        field = get_field(field if field is not None else parts[3])
        return parse_coo_entries(lines[k + 1:], m, n, field, start_line=k + 2)
    raise ParseError("empty matrix file")


def read_matrix(path, field=None) -> SparseMatrix:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read(), field)


def format_coo_entries(A: SparseMatrix) -> list[str]:
    return [f"{i + 1} {j + 1} {A.field.format(v)}" for i, j, v in A.entries()]


def format_matrix(A: SparseMatrix) -> str:
    lines = [f"matrix {A.nrows} {A.ncols} {A.field.tag}"] + format_coo_entries(A)
    return "\n".join(lines) + "\n"
