"""Boundary reduction, homology bases, induced maps and filtration persistence."""
from __future__ import annotations

from dataclasses import dataclass

from .barcode import INF, Bar, Barcode
from .complexes import CellComplex, CellularMap, FilteredComplex
from .errors import ChainMapViolation, DimensionMismatch
from .sparse import SparseMatrix, solve_triangular


@dataclass(frozen=True)
class ReducedBoundary:
    """D U = R with U unit upper triangular and distinct pivots in R."""

    R: SparseMatrix
    U: SparseMatrix
    pivot_lookup: list  # row -> column of R with that pivot, or None

    def zero_columns(self) -> list[int]:
        return [j for j in range(self.R.ncols) if not self.R._cols[j]]

    @property
    def rank(self) -> int:
        return sum(1 for c in self.R._cols if c)


def reduce(D: SparseMatrix) -> ReducedBoundary:
    """Left-to-right column reduction; U records the column operations."""
    m, n = D.shape
    f = D.field
    red = f.reduce
    R = D.copy_cols()
    U = [{j: f.one} for j in range(n)]
    lookup = [None] * m
    for j in range(n):
        col = R[j]
        ucol = U[j]
        while col:
            i = max(col)
            owner = lookup[i]
            if owner is None:
                lookup[i] = j
                break
            other = R[owner]
            alpha = red(col[i] * f.inv(other[i]))
            for r, v in other.items():
                w = red(col.get(r, 0) - alpha * v)
                if w != 0:
                    col[r] = w
                else:
                    col.pop(r, None)
            for r, v in U[owner].items():
                w = red(ucol.get(r, 0) - alpha * v)
                if w != 0:
                    ucol[r] = w
                else:
                    ucol.pop(r, None)
    return ReducedBoundary(SparseMatrix(m, n, f, R), SparseMatrix(n, n, f, U), lookup)


@dataclass(frozen=True)
class HomologyBasis:
    """Per dimension k: the basis U_k of C_k and the index set I_k of
    columns that represent homology classes."""

    complex: CellComplex
    reduced: list  # reduced[k] = ReducedBoundary of d_k, k = 0..max_dim+1
    I: list  # I[k] for k = 0..max_dim

    @property
    def max_dim(self) -> int:
        return len(self.I) - 1

    @property
    def betti(self) -> list[int]:
        return [len(ix) for ix in self.I]

    def U(self, k):
        return self.reduced[k].U

    def representatives(self, k) -> list[dict]:
        U = self.reduced[k].U
        return [U.col(i) for i in self.I[k]]

    def coordinates(self, chain: dict, k: int) -> dict:
        """Homology class of a k-cycle as a sparse vector over I_k."""
        U = self.reduced[k].U
        y = solve_triangular(U, chain, "left", "upper")
        return self._clean(y, k, self._dhat(k))

    def _dhat(self, k):
        """U_k^{-1} R_{k+1} columns keyed by their pivot row."""
        U = self.reduced[k].U
        R = self.reduced[k + 1].R
        out = {}
        for c in range(R.ncols):
            col = R._cols[c]
            if col:
                v = solve_triangular(U, col, "left", "upper")
                out[max(v)] = v
        return out

    def _clean(self, y: dict, k: int, dhat: dict) -> dict:
        f = self.complex.field
        red = f.reduce
        for j in range(self.complex.n(k) - 1, -1, -1):
            a = y.get(j, 0)
            if a == 0 or j not in dhat:
                continue
            col = dhat[j]
            alpha = red(a * f.inv(col[j]))
            for r, v in col.items():
                w = red(y.get(r, 0) - alpha * v)
                if w != 0:
                    y[r] = w
                else:
                    y.pop(r, None)
        pos = {j: p for p, j in enumerate(self.I[k])}
        if any(j not in pos for j in y):
            raise ChainMapViolation(f"chain is not a cycle in dimension {k}")
        return {pos[j]: v for j, v in y.items()}


def homology_basis(complex: CellComplex, max_dim: int | None = None) -> HomologyBasis:
    if max_dim is None:
        max_dim = max(complex.dim, 0)
    reduced = [reduce(complex.d(k)) for k in range(max_dim + 2)]
    I = []
    for k in range(max_dim + 1):
        nxt = reduced[k + 1].pivot_lookup
        R = reduced[k].R
        I.append([j for j in range(R.ncols) if not R._cols[j] and nxt[j] is None])
    return HomologyBasis(complex, reduced, I)


def induced_map(f: CellularMap, k: int, src_basis: HomologyBasis, dst_basis: HomologyBasis) -> SparseMatrix:
    """Matrix of the map on H_k in the two extracted homology bases."""
    if src_basis.complex.n(k) != f.source.n(k) or dst_basis.complex.n(k) != f.target.n(k):
        raise DimensionMismatch("homology bases do not match the map's complexes")
    F = f.chain(k)
    Ud = dst_basis.reduced[k].U
    dhat = dst_basis._dhat(k)
    Uc = src_basis.reduced[k].U
    red = F.field.reduce
    cols = []
    for i in src_basis.I[k]:
        x = Uc._cols[i]
        fx = {}
        for c, v in x.items():
            for r, w in F._cols[c].items():
                fx[r] = fx.get(r, 0) + v * w
        fx = {r: red(v) for r, v in fx.items() if red(v) != 0}
        y = solve_triangular(Ud, fx, "left", "upper")
        cols.append(dst_basis._clean(y, k, dhat))
    return SparseMatrix(len(dst_basis.I[k]), len(cols), F.field, cols)


def persistence_barcode(fc: FilteredComplex, max_dim: int | None = None) -> Barcode:
    """Bars with 1-based filtration indices: birth is the creating cell, death
    the cell whose column kills the class (infinite if none)."""
    cx = fc.complex
    if max_dim is None:
        max_dim = max(cx.dim, 0)
    orders = [fc.ordered_cells(k) for k in range(max_dim + 2)]
    reduced = [reduce(fc.ordered_boundary(k)) for k in range(max_dim + 2)]
    bars = []
    for k in range(max_dim + 1):
        nxt = reduced[k + 1].pivot_lookup
        R = reduced[k].R
        for j in range(R.ncols):
            if R._cols[j]:
                continue
            birth = fc.position[(k, orders[k][j])] + 1
            c = nxt[j]
            death = INF if c is None else fc.position[(k + 1, orders[k + 1][c])] + 1
            bars.append(Bar(k, birth, death))
    return Barcode(bars)


def betti_numbers(complex: CellComplex, max_dim: int | None = None) -> list[int]:
    return homology_basis(complex, max_dim).betti
