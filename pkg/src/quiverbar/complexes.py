"""Cell and simplicial complexes, filtrations, chain maps, mapping cylinders
and telescopes."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .errors import (
    ChainMapViolation,
    DimensionMismatch,
    DuplicateSimplex,
    ImageSimplexMissing,
    NotComposable,
    ParseError,
    ValidationError,
)
from .fields import Field, get_field
from .sparse import SparseMatrix


@dataclass(eq=False)
class CellComplex:
    """Cells per dimension plus boundary matrices.

    ``boundary[k]`` maps k-cells to (k-1)-cells; ``boundary[0]`` is 0 x n_0.
    For simplicial complexes every cell is a sorted vertex tuple.
    """

    field: Field
    cells: list
    boundary: list
    simplicial: bool = False
    index: list = dc_field(init=False, repr=False)

    def __post_init__(self):
        self.field = get_field(self.field)
        self.cells = [list(c) for c in self.cells]
        if len(self.boundary) != len(self.cells):
            raise DimensionMismatch("need one boundary matrix per dimension")
        for k, D in enumerate(self.boundary):
            rows = len(self.cells[k - 1]) if k else 0
            if D.shape != (rows, len(self.cells[k])):
                raise DimensionMismatch(f"boundary {k} has shape {D.shape}")
        self.index = [{c: i for i, c in enumerate(cs)} for cs in self.cells]

    @property
    def dim(self) -> int:
        """Top dimension, -1 for the empty complex."""
        return len(self.cells) - 1

    def n(self, k: int) -> int:
        return len(self.cells[k]) if 0 <= k < len(self.cells) else 0

    def size(self) -> int:
        return sum(len(c) for c in self.cells)

    def d(self, k: int) -> SparseMatrix:
        """Boundary matrix of dimension k, zero-padded outside the stored range."""
        if 0 <= k < len(self.boundary):
            return self.boundary[k]
        return SparseMatrix.zeros(self.n(k - 1), self.n(k), self.field)

    def check_boundary_squared(self) -> bool:
        return all((self.d(k) @ self.d(k + 1)).is_zero() for k in range(1, self.dim + 1))

    def __eq__(self, other):
        if not isinstance(other, CellComplex):
            return NotImplemented
        return (
            self.field == other.field
            and self.cells == other.cells
            and self.boundary == other.boundary
        )

    __hash__ = object.__hash__

    def __repr__(self):
        counts = ",".join(str(len(c)) for c in self.cells)
        return f"CellComplex({self.field.tag}, cells=[{counts}])"


def _canon(simplex) -> tuple:
    s = tuple(sorted(int(v) for v in simplex))
    if any(v < 0 for v in s):
        raise ValidationError(f"negative vertex id in {simplex}")
    if len(set(s)) != len(s):
        raise ValidationError(f"repeated vertex in simplex {simplex}")
    if not s:
        raise ValidationError("empty simplex")
    return s


def _faces(s: tuple):
    return [s[:i] + s[i + 1:] for i in range(len(s))]


def simplicial_complex(cells_by_dim: Sequence[Sequence[tuple]], field) -> CellComplex:
    """Simplicial complex whose per-dimension basis follows the given order.

    Every face must already be listed.
    """
    field = get_field(field)
    cells = [list(cs) for cs in cells_by_dim]
    while cells and not cells[-1]:
        cells.pop()
    index = [{c: i for i, c in enumerate(cs)} for cs in cells]
    boundary = []
    one, neg = field.one, field.neg(field.one)
    for k, cs in enumerate(cells):
        if k == 0:
            boundary.append(SparseMatrix.zeros(0, len(cs), field))
            continue
        cols = []
        below = index[k - 1]
        for s in cs:
            col = {}
            for i, face in enumerate(_faces(s)):
                if face not in below:
                    raise ValidationError(f"face {face} of {s} is missing")
                col[below[face]] = one if i % 2 == 0 else neg
            cols.append(col)
        boundary.append(SparseMatrix(len(cells[k - 1]), len(cs), field, cols))
    return CellComplex(field, cells, boundary, simplicial=True)


def _closure(simplices) -> set:
    seen = set()
    stack = list(simplices)
    while stack:
        s = stack.pop()
        if s in seen:
            continue
        seen.add(s)
        if len(s) > 1:
            stack.extend(_faces(s))
    return seen


def build_simplicial(simplices, field="Q") -> CellComplex:
    """Simplicial complex generated by the given vertex tuples.

    Missing faces are added; each dimension is listed in lexicographic order.
    """
    canon = []
    seen = set()
    for s in simplices:
        c = _canon(s)
        if c in seen:
            raise DuplicateSimplex(f"simplex {c} listed twice")
        seen.add(c)
        canon.append(c)
    closed = _closure(canon)
    top = max((len(s) for s in closed), default=0)
    by_dim = [sorted(s for s in closed if len(s) == k + 1) for k in range(top)]
    return simplicial_complex(by_dim, field)


# filtrations -------------------------------------------------------------------
@dataclass(eq=False)
class FilteredComplex:
    """A complex with a real value per cell.

    ``order`` lists ``(dim, idx)`` pairs sorted by (value, dim, cell id); the
    cell id tie-break is lexicographic for simplicial complexes and the
    per-dimension position otherwise.
    """

    complex: CellComplex
    values: list
    order: list = dc_field(init=False)

    def __post_init__(self):
        cx = self.complex
        if [len(v) for v in self.values] != [len(c) for c in cx.cells]:
            raise DimensionMismatch("need one filtration value per cell")
        if cx.simplicial:
            key = lambda t: (self.values[t[0]][t[1]], t[0], cx.cells[t[0]][t[1]])  # noqa: E731
        else:
            key = lambda t: (self.values[t[0]][t[1]], t[0], t[1])  # noqa: E731
        cells = [(k, i) for k in range(len(cx.cells)) for i in range(len(cx.cells[k]))]
        self.order = sorted(cells, key=key)
        self.position = {t: p for p, t in enumerate(self.order)}
        for k in range(1, len(cx.cells)):
            D = cx.boundary[k]
            for j in range(D.ncols):
                me = self.position[(k, j)]
                for i in D._cols[j]:
                    if self.position[(k - 1, i)] > me:
                        raise ValidationError(
                            f"cell {cx.cells[k][j]!r} enters before its face {cx.cells[k - 1][i]!r}"
                        )

    def __len__(self):
        return len(self.order)

    @property
    def field(self):
        return self.complex.field

    def value_of_index(self, index: int):
        """Filtration value of the cell at 1-based filtration index."""
        k, i = self.order[index - 1]
        return self.values[k][i]

    def cell_of_index(self, index: int):
        k, i = self.order[index - 1]
        return k, self.complex.cells[k][i]

    def ordered_cells(self, k: int) -> list[int]:
        """Per-dimension indices of k-cells in filtration order."""
        return [i for (d, i) in self.order if d == k]

    def ordered_boundary(self, k: int) -> SparseMatrix:
        """Boundary matrix of dimension k with rows and columns in filtration order."""
        return self.complex.d(k).submatrix(self.ordered_cells(k - 1), self.ordered_cells(k))

    def sorted_complex(self) -> CellComplex:
        """The same complex with every dimension's basis in filtration order."""
        cx = self.complex
        ks = range(len(cx.cells))
        orders = [self.ordered_cells(k) for k in ks]
        return CellComplex(
            cx.field,
            [[cx.cells[k][i] for i in orders[k]] for k in ks],
            [self.ordered_boundary(k) for k in ks],
            simplicial=cx.simplicial,
        )

    def prefix(self, count: int) -> CellComplex:
        """Subcomplex of the first ``count`` cells, bases in filtration order."""
        full = self.sorted_complex()
        taken = [0] * len(full.cells)
        for k, _ in self.order[:count]:
            taken[k] += 1
        cells = [full.cells[k][: taken[k]] for k in range(len(full.cells))]
        boundary = [
            full.boundary[k].submatrix(range(taken[k - 1]) if k else [], range(taken[k]))
            for k in range(len(full.cells))
        ]
        return CellComplex(full.field, cells, boundary, simplicial=full.simplicial)


def filtration_from_simplices(items, field="Q") -> FilteredComplex:
    """Filtered simplicial complex from ``(value, simplex)`` pairs.

    A face that is not listed gets the smallest value among its listed
    cofaces; a listed face with a larger value than a coface is rejected.
    """
    given = {}
    for value, s in items:
        c = _canon(s)
        if c in given:
            raise DuplicateSimplex(f"simplex {c} listed twice")
        given[c] = value
    vals = dict(given)
    # propagate values down to unlisted faces, largest simplices first
    closed = _closure(given)
    for s in sorted(closed, key=len, reverse=True):
        v = vals[s]
        for face in _faces(s) if len(s) > 1 else []:
            if face in given:
                if given[face] > v:
                    raise ValidationError(
                        f"simplex {s} has value {v} but its face {face} has larger value {given[face]}"
                    )
            else:
                vals[face] = min(vals.get(face, v), v)
    top = max((len(s) for s in closed), default=0)
    by_dim = [sorted(s for s in closed if len(s) == k + 1) for k in range(top)]
    cx = simplicial_complex(by_dim, field)
    return FilteredComplex(cx, [[vals[s] for s in cs] for cs in cx.cells])


# chain maps ----------------------------------------------------------------------
def _inversions(seq) -> int:
    return sum(1 for a, b in itertools.combinations(seq, 2) if a > b)


@dataclass(eq=False)
class CellularMap:
    """Chain map given by one matrix per dimension (target x source)."""

    source: CellComplex
    target: CellComplex
    matrices: list
    vertex_map: dict | None = None

    def __post_init__(self):
        for k, F in enumerate(self.matrices):
            if F.shape != (self.target.n(k), self.source.n(k)):
                raise DimensionMismatch(f"chain map matrix {k} has shape {F.shape}")
        self.verify()

    def chain(self, k: int) -> SparseMatrix:
        if 0 <= k < len(self.matrices):
            return self.matrices[k]
        return SparseMatrix.zeros(self.target.n(k), self.source.n(k), self.source.field)

    def verify(self):
        top = max(self.source.dim, self.target.dim)
        for k in range(top + 1):
            lhs = self.chain(k) @ self.source.d(k + 1)
            rhs = self.target.d(k + 1) @ self.chain(k + 1)
            if lhs != rhs:
                raise ChainMapViolation(f"chain map square fails in dimension {k}")

    def compose(self, first: "CellularMap") -> "CellularMap":
        """``self ∘ first``."""
        if first.target is not self.source and first.target != self.source:
            raise NotComposable("target of the first map is not the source of the second")
        top = first.source.dim
        mats = [self.chain(k) @ first.chain(k) for k in range(top + 1)]
        vmap = None
        if self.vertex_map is not None and first.vertex_map is not None:
            vmap = {v: self.vertex_map[w] for v, w in first.vertex_map.items()}
        return CellularMap(first.source, self.target, mats, vmap)

    @classmethod
    def identity(cls, cx: CellComplex) -> "CellularMap":
        mats = [SparseMatrix.identity(cx.n(k), cx.field) for k in range(cx.dim + 1)]
        vmap = {s[0]: s[0] for s in cx.cells[0]} if cx.simplicial and cx.cells else None
        return cls(cx, cx, mats, vmap)


def simplicial_map(source: CellComplex, target: CellComplex, vertex_map: dict) -> CellularMap:
    """Chain map induced by a vertex map.

    A simplex goes to ``sgn(sort) * sorted(image)``, or to zero when two of
    its vertices collide.
    """
    if not (source.simplicial and target.simplicial):
        raise ValidationError("vertex maps need simplicial complexes")
    if source.field != target.field:
        from .errors import FieldMismatch

        raise FieldMismatch(f"{source.field.tag} vs {target.field.tag}")
    f = source.field
    vmap = {int(k): int(v) for k, v in vertex_map.items()}
    mats = []
    for k in range(source.dim + 1):
        cols = []
        for s in source.cells[k]:
            try:
                image = [vmap[v] for v in s]
            except KeyError as exc:
                raise ValidationError(f"vertex {exc.args[0]} has no image") from None
            if len(set(image)) < len(image):
                cols.append({})
                continue
            t = tuple(sorted(image))
            row = target.index[k].get(t) if k < len(target.index) else None
            if row is None:
                raise ImageSimplexMissing(f"image {t} of {s} is not in the target")
            cols.append({row: f.one if _inversions(image) % 2 == 0 else f.neg(f.one)})
        mats.append(SparseMatrix(target.n(k), len(source.cells[k]), f, cols))
    return CellularMap(source, target, mats, vmap)


def chain_map(f: CellularMap, k: int) -> SparseMatrix:
    return f.chain(k)


def inclusion_map(sub: CellComplex, full: CellComplex) -> CellularMap:
    """Chain map of a subcomplex whose bases are prefixes of ``full``'s bases."""
    mats = []
    for k in range(sub.dim + 1):
        if full.cells[k][: sub.n(k)] != sub.cells[k]:
            raise ValidationError(f"dimension {k} basis of the subcomplex is not a prefix")
        mats.append(
            SparseMatrix(full.n(k), sub.n(k), full.field, [{i: full.field.one} for i in range(sub.n(k))])
        )
    return CellularMap(sub, full, mats)


# cylinders and telescopes ------------------------------------------------------
def mapping_telescope(maps: Sequence[CellularMap]) -> FilteredComplex:
    """Telescope X_0 -> X_1 -> ... -> X_N as an explicit cell complex.

    Cells: ("X", i, c) for each cell c of X_i at value i, and ("C", i, c) of
    dimension k+1 for each k-cell c of X_i at value i+1.  The boundary of a
    cylinder cell is -c + f_i(c) - C(dc).
    """
    if not maps:
        raise ValueError("need at least one map")
    for a, b in zip(maps, maps[1:]):
        if a.target is not b.source and a.target != b.source:
            raise NotComposable("consecutive maps do not compose")
    spaces = [maps[0].source] + [m.target for m in maps]
    f = spaces[0].field
    top = max(s.dim for s in spaces) + 1
    # per-dimension layout: blocks X_0..X_N then C_0..C_{N-1}
    cells, values, offsets = [], [], []
    for k in range(top + 1):
        ck, vk, off = [], [], {}
        for i, X in enumerate(spaces):
            off[("X", i)] = len(ck)
            ck.extend(("X", i, c) for c in (X.cells[k] if k <= X.dim else []))
            vk.extend([i] * X.n(k))
        for i, X in enumerate(spaces[:-1]):
            off[("C", i)] = len(ck)
            lower = X.cells[k - 1] if 0 <= k - 1 <= X.dim else []
            ck.extend(("C", i, c) for c in lower)
            vk.extend([i + 1] * len(lower))
        cells.append(ck)
        values.append(vk)
        offsets.append(off)
    while cells and not cells[-1]:
        cells.pop()
        values.pop()
        offsets.pop()
    neg1 = f.neg(f.one)
    boundary = []
    for k in range(len(cells)):
        rows = len(cells[k - 1]) if k else 0
        entries = []
        if k > 0:
            ro, co = offsets[k - 1], offsets[k]
            for i, X in enumerate(spaces):
                D = X.d(k)
                for r, c, v in D.entries():
                    entries.append((ro[("X", i)] + r, co[("X", i)] + c, v))
            for i, X in enumerate(spaces[:-1]):
                base = co[("C", i)]
                for c in range(X.n(k - 1)):
                    entries.append((ro[("X", i)] + c, base + c, neg1))
                for r, c, v in maps[i].chain(k - 1).entries():
                    entries.append((ro[("X", i + 1)] + r, base + c, v))
                if k >= 2:
                    for r, c, v in X.d(k - 1).entries():
                        entries.append((ro[("C", i)] + r, base + c, f.neg(v)))
        boundary.append(SparseMatrix.from_entries(rows, len(cells[k]), entries, f))
    cx = CellComplex(f, cells, boundary)
    if not cx.check_boundary_squared():
        raise ChainMapViolation("telescope boundary does not square to zero")
    return FilteredComplex(cx, values)


def mapping_cylinder(f: CellularMap) -> FilteredComplex:
    """Cylinder of one map: X at value 0, Y and X x I at value 1."""
    return mapping_telescope([f])


# text formats ----------------------------------------------------------------------
def _strip(line):
    return line.split("#", 1)[0].strip()


def parse_filtration(text: str, field=None) -> FilteredComplex:
    """``field <tag>`` header, then ``simplex <value> v0 ... vk`` lines."""
    tag = None
    items = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        parts = line.split()
        if parts[0] == "field":
            if len(parts) != 2 or tag is not None:
                raise ParseError("expected a single 'field <tag>' line", lineno)
            tag = parts[1]
        elif parts[0] == "simplex":
            if len(parts) < 3:
                raise ParseError("expected 'simplex <value> v0 ... vk'", lineno)
            try:
                value = float(parts[1])
                verts = [int(v) for v in parts[2:]]
            except ValueError:
                raise ParseError(f"bad simplex line {line!r}", lineno) from None
            if value.is_integer():
                value = int(value)
            items.append((value, tuple(verts)))
        else:
            raise ParseError(f"unknown keyword {parts[0]!r}", lineno)
    if tag is None and field is None:
        raise ParseError("missing 'field <tag>' header")
    return filtration_from_simplices(items, get_field(field if field is not None else tag))


def read_filtration(path, field=None) -> FilteredComplex:
    with open(path, encoding="utf-8") as fh:
        return parse_filtration(fh.read(), field)


def parse_vertex_map(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError("expected 'src_vertex dst_vertex'", lineno)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"bad vertex id in {line!r}", lineno) from None
        if a in out:
            raise ParseError(f"vertex {a} mapped twice", lineno)
        out[a] = b
    return out


def read_vertex_map(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return parse_vertex_map(fh.read())
