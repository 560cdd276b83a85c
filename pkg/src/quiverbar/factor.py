"""Triangular factorizations: LEUP and its transpose / reversal variants, LQU,
and the commutation rules that move triangular factors past echelon pivot
matrices."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import BlockStructureViolation, DimensionMismatch, ShapeViolation
from .sparse import (
    SparseMatrix,
    invert_perm,
    is_EL,
    is_ELhat,
    is_EU,
    is_EUhat,
    is_lower,
    is_perm,
    is_pivot,
    is_upper,
    j_conjugate,
    j_flip,
    perm_matrix,
)

# factor order for each kind of triangular factorization
KIND_ORDER = {
    "LEUP": ("L", "E", "U", "P"),
    "PLEU": ("P", "L", "E", "U"),
    "UELP": ("U", "E", "L", "P"),
    "PUEL": ("P", "U", "E", "L"),
}


@dataclass(frozen=True)
class TriangularFactorization:
    kind: str
    factors: tuple

    def _get(self, name):
        return self.factors[KIND_ORDER[self.kind].index(name)]

    @property
    def L(self):
        return self._get("L")

    @property
    def E(self):
        return self._get("E")

    @property
    def U(self):
        return self._get("U")

    @property
    def P(self):
        return self._get("P")

    def product(self) -> SparseMatrix:
        a, b, c, d = self.factors
        return a @ b @ c @ d

    @property
    def rank(self) -> int:
        return self.E.nnz()


@dataclass(frozen=True)
class LquFactorization:
    L: SparseMatrix
    Q: SparseMatrix
    U: SparseMatrix

    def product(self) -> SparseMatrix:
        return self.L @ self.Q @ self.U

    @property
    def rank(self) -> int:
        return self.Q.nnz()


def leup(A: SparseMatrix) -> TriangularFactorization:
    """A = L E U P with L unit lower, E of shape E_L, U unit upper, P a permutation.

    Row i of the active Schur block is searched for its first nonzero in a
    column j' >= j; that column is swapped into position j (which also swaps
    the already-built part of U), and the pivot is eliminated.  Rows without
    an eligible entry leave a zero row in E.
    """
    m, n = A.shape
    f = A.field
    red = f.reduce
    rows = A.rows()
    colperm = list(range(n))
    lcols = [{k: f.one} for k in range(m)]
    urows = []
    pivots = []
    i = j = 0
    while i < m and j < n:
        row = rows[i]
        if not row:
            i += 1
            continue
        jp = min(row)
        if jp != j:
            for r in range(i, m):
                rr = rows[r]
                a = rr.pop(j, None)
                b = rr.pop(jp, None)
                if a is not None:
                    rr[jp] = a
                if b is not None:
                    rr[j] = b
            for ur in urows:
                a = ur.pop(j, None)
                b = ur.pop(jp, None)
                if a is not None:
                    ur[jp] = a
                if b is not None:
                    ur[j] = b
            colperm[j], colperm[jp] = colperm[jp], colperm[j]
        piv = row[j]
        pinv = f.inv(piv)
        pivots.append((i, j, piv))
        urow = {c: red(v * pinv) for c, v in row.items()}
        urow[j] = f.one
        urows.append(urow)
        lcol = lcols[i]
        for r in range(i + 1, m):
            rr = rows[r]
            a = rr.get(j)
            if a is None:
                continue
            mult = red(a * pinv)
            lcol[r] = mult
            for c, v in row.items():
                w = red(rr.get(c, 0) - mult * v)
                if w != 0:
                    rr[c] = w
                else:
                    rr.pop(c, None)
        rows[i] = {}
        i += 1
        j += 1
    L = SparseMatrix(m, m, f, lcols)
    E = SparseMatrix(m, n, f, [{} for _ in range(n)])
    for (pi, pj, v) in pivots:
        E._cols[pj][pi] = v
    ucols = [{} for _ in range(n)]
    for t, ur in enumerate(urows):
        for c, v in ur.items():
            ucols[c][t] = v
    for t in range(len(urows), n):
        ucols[t][t] = f.one
    U = SparseMatrix(n, n, f, ucols)
    P = perm_matrix(invert_perm(colperm), f)
    return TriangularFactorization("LEUP", (L, E, U, P))


def variant_factorization(A: SparseMatrix, kind: str) -> TriangularFactorization:
    """PLEU, UELP or PUEL obtained from LEUP by transposition and J-reversal."""
    kind = kind.upper()
    if kind == "LEUP":
        return leup(A)
    if kind == "PLEU":
        L, E, U, P = leup(A.transpose()).factors
        return TriangularFactorization("PLEU", (P.transpose(), U.transpose(), E.transpose(), L.transpose()))
    if kind == "UELP":
        L, E, U, P = leup(j_flip(A)).factors
        return TriangularFactorization("UELP", (j_conjugate(L), j_flip(E), j_conjugate(U), j_conjugate(P)))
    if kind == "PUEL":
        P, L, E, U = variant_factorization(j_flip(A), "PLEU").factors
        return TriangularFactorization("PUEL", (j_conjugate(P), j_conjugate(L), j_flip(E), j_conjugate(U)))
    raise ValueError(f"unknown factorization kind {kind!r}")


def factorize(A: SparseMatrix, kind: str = "LEUP") -> TriangularFactorization:
    return variant_factorization(A, kind)


def lqu(A: SparseMatrix) -> LquFactorization:
    """A = L Q U with Q a pivot matrix and L, U unit triangular.

    Phase one walks the columns: the first nonzero in a row that is not yet a
    pivot row becomes the pivot and clears the non-pivot rows below it.
    Phase two clears each pivot row to the right of its pivot with column
    operations.  Both phases record their inverse operations exactly.
    """
    m, n = A.shape
    f = A.field
    red = f.reduce
    rows = A.rows()
    lcols = [{k: f.one} for k in range(m)]
    pivot_col = {}  # pivot row -> pivot column
    for j in range(n):
        i = next((r for r in range(m) if r not in pivot_col and j in rows[r]), None)
        if i is None:
            continue
        src = rows[i]
        pinv = f.inv(src[j])
        for r in range(i + 1, m):
            if r in pivot_col:
                continue
            rr = rows[r]
            a = rr.get(j)
            if a is None:
                continue
            mult = red(a * pinv)
            for c, v in src.items():
                w = red(rr.get(c, 0) - mult * v)
                if w != 0:
                    rr[c] = w
                else:
                    rr.pop(c, None)
            # L <- L (I + mult e_r e_i^T): column i of L gains mult * column r
            li = lcols[i]
            for k, v in lcols[r].items():
                w = red(li.get(k, 0) + mult * v)
                if w != 0:
                    li[k] = w
                else:
                    li.pop(k, None)
        pivot_col[i] = j
    # phase two on columns
    qcols = [{} for _ in range(n)]
    for r, row in enumerate(rows):
        for c, v in row.items():
            qcols[c][r] = v
    urows = [{k: f.one} for k in range(n)]
    for i in sorted(pivot_col):
        j = pivot_col[i]
        pcol = qcols[j]
        pinv = f.inv(pcol[i])
        targets = [c for c, col in enumerate(qcols) if c > j and i in col]
        for c in targets:
            col = qcols[c]
            g = red(col[i] * pinv)
            for r, v in pcol.items():
                w = red(col.get(r, 0) - g * v)
                if w != 0:
                    col[r] = w
                else:
                    col.pop(r, None)
            # U <- (I + g e_j e_c^T) U: row j of U gains g * row c
            uj = urows[j]
            for k, v in urows[c].items():
                w = red(uj.get(k, 0) + g * v)
                if w != 0:
                    uj[k] = w
                else:
                    uj.pop(k, None)
    ucols = [{} for _ in range(n)]
    for r, row in enumerate(urows):
        for c, v in row.items():
            ucols[c][r] = v
    return LquFactorization(
        SparseMatrix(m, m, f, lcols),
        SparseMatrix(m, n, f, qcols),
        SparseMatrix(n, n, f, ucols),
    )


# shape commutation -------------------------------------------------------------
def _check_invertible_triangular(T, lower, what):
    if not T.is_square():
        raise ShapeViolation(f"{what} must be square, got {T.shape}")
    if not (is_lower(T) if lower else is_upper(T)):
        raise ShapeViolation(f"{what} must be {'lower' if lower else 'upper'} triangular")
    if any(T._cols[k].get(k, 0) == 0 for k in range(T.ncols)):
        raise ShapeViolation(f"{what} has a zero on the diagonal")


def _commute_EL_L(E: SparseMatrix, T: SparseMatrix) -> SparseMatrix:
    """T~ with E T = T~ E for E of shape E_L and T invertible lower triangular."""
    f = E.field
    red = f.reduce
    row_of = {}
    val = {}
    for c, col in enumerate(E._cols):
        for i, v in col.items():
            row_of[c] = i
            val[c] = v
    m = E.nrows
    out = [{} for _ in range(m)]
    pivot_rows = set(row_of.values())
    for k in range(m):
        if k not in pivot_rows:
            out[k][k] = f.one
    for b, col in enumerate(T._cols):
        if b not in row_of:
            continue
        scale = f.inv(val[b])
        rb = row_of[b]
        for a, t in col.items():
            if a in row_of:
                w = red(val[a] * t * scale)
                if w != 0:
                    out[rb][row_of[a]] = w
    return SparseMatrix(m, m, f, out)


RELATIONS = ("EL_L", "L_ELhat", "U_EU", "EUhat_U")


def commute_shape(E: SparseMatrix, T: SparseMatrix, relation: str):
    """Move a triangular factor across an echelon pivot matrix.

    ========  ===============  ======================
    relation  identity         shapes
    ========  ===============  ======================
    EL_L      E T = T~ E       E in E_L, T lower
    L_ELhat   T E = E T~       E in Ê_L, T lower
    U_EU      T E = E T~       E in E_U, T upper
    EUhat_U   E T = T~ E       E in Ê_U, T upper
    ========  ===============  ======================

    Returns ``(T~, E)``; E is never modified.
    """
    if E.field != T.field:
        from .errors import FieldMismatch

        raise FieldMismatch(f"{E.field.tag} vs {T.field.tag}")
    if relation == "EL_L":
        if not is_EL(E):
            raise ShapeViolation("E is not of shape E_L")
        _check_invertible_triangular(T, True, "T")
        if E.ncols != T.nrows:
            raise DimensionMismatch(f"E {E.shape} times T {T.shape}")
        return _commute_EL_L(E, T), E
    if relation == "U_EU":
        if not is_EU(E):
            raise ShapeViolation("E is not of shape E_U")
        _check_invertible_triangular(T, False, "T")
        if T.ncols != E.nrows:
            raise DimensionMismatch(f"T {T.shape} times E {E.shape}")
        return _commute_EL_L(E.transpose(), T.transpose()).transpose(), E
    if relation == "EUhat_U":
        if not is_EUhat(E):
            raise ShapeViolation("E is not of shape Ê_U")
        _check_invertible_triangular(T, False, "T")
        if E.ncols != T.nrows:
            raise DimensionMismatch(f"E {E.shape} times T {T.shape}")
        return j_conjugate(_commute_EL_L(j_flip(E), j_conjugate(T))), E
    if relation == "L_ELhat":
        if not is_ELhat(E):
            raise ShapeViolation("E is not of shape Ê_L")
        _check_invertible_triangular(T, True, "T")
        if T.ncols != E.nrows:
            raise DimensionMismatch(f"T {T.shape} times E {E.shape}")
        Et = E.transpose()
        Tt = T.transpose()
        return j_conjugate(_commute_EL_L(j_flip(Et), j_conjugate(Tt))).transpose(), E
    raise ValueError(f"unknown relation {relation!r}")


# pivot matrices to echelon form ------------------------------------------------
_TARGETS = {
    "EL_P": ("LEUP", ("E", "P")),
    "P_EU": ("PLEU", ("P", "E")),
    "EUhat_P": ("UELP", ("E", "P")),
    "P_ELhat": ("PUEL", ("P", "E")),
}


def pivot_to_echelon(Q: SparseMatrix, target: str):
    """Split a pivot matrix into an echelon factor and a permutation.

    Runs the matching triangular factorization; on a pivot matrix its
    triangular factors come out as identities.  The pair is returned in
    product order, e.g. ``(E, P)`` for ``EL_P``.
    """
    if target not in _TARGETS:
        raise ValueError(f"unknown target {target!r}")
    if not is_pivot(Q):
        raise ShapeViolation("input is not a pivot matrix")
    kind, names = _TARGETS[target]
    fac = variant_factorization(Q, kind)
    return tuple(fac._get(name) for name in names)


def commute_perm_blocktri(P_block: SparseMatrix, T_block: SparseMatrix):
    """diag(I, P) T = T' diag(I, P) for T = [[U11, U12], [0, I]].

    Only the off-diagonal block changes (U12 becomes U12 P^T).  Returns
    ``(T', diag(I, P))``.
    """
    k = P_block.nrows
    n = T_block.nrows
    if not is_perm(P_block):
        raise BlockStructureViolation("leading factor is not a permutation")
    if not T_block.is_square() or k > n:
        raise BlockStructureViolation(f"incompatible blocks {P_block.shape} and {T_block.shape}")
    n1 = n - k
    f = T_block.field
    for j in range(n1, n):
        if {i: v for i, v in T_block._cols[j].items() if i >= n1} != {j: 1}:
            raise BlockStructureViolation("trailing block of T is not the identity")
    for j in range(n1):
        if any(i >= n1 for i in T_block._cols[j]):
            raise BlockStructureViolation("lower-left block of T is not zero")
    perm = [next(iter(c)) for c in P_block._cols]
    full = list(range(n1)) + [n1 + p for p in perm]
    Pfull = perm_matrix(full, f)
    cols = [dict(c) for c in T_block._cols]
    # U12 P^T permutes the columns of the trailing block
    new = [dict(c) for c in cols]
    for c in range(k):
        u12 = {i: v for i, v in cols[n1 + c].items() if i < n1}
        tgt = n1 + perm[c]
        new[tgt] = {i: v for i, v in new[tgt].items() if i >= n1}
        new[tgt].update(u12)
    return SparseMatrix(n, n, f, new), Pfull
