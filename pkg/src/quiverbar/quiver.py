"""Type-A quiver representations and their reduction to barcode form.

Conventions (0-based nodes in the API, 1-based nodes in reported bars):

* ``arrows[e]`` is ``"fwd"`` for V_e -> V_{e+1} and ``"bwd"`` for V_{e+1} -> V_e.
* A change of basis by an invertible M at node v replaces every map out of v
  by ``A @ M`` and every map into v by ``M^-1 @ A``.  The accumulated basis
  B_v satisfies ``B_tgt^-1 @ A_original @ B_src = block``.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

from .barcode import Bar, Barcode
from .errors import (
    DimensionMismatch,
    NotBarcodeForm,
    NotPersistenceType,
    ParseError,
    ValidationError,
)
from .factor import commute_shape, leup, lqu, pivot_to_echelon, variant_factorization
from .fields import Field, get_field
from .sparse import (
    SparseMatrix,
    apply_permutation,
    invert_perm,
    is_pivot,
    parse_coo_entries,
    perm_matrix,
    triangular_inverse,
)

FWD = "fwd"
BWD = "bwd"
TASKS_ENV = "QUIVERBAR_TASKS"


def default_tasks() -> int:
    """Task count from $QUIVERBAR_TASKS, else the number of usable CPUs."""
    env = os.environ.get(TASKS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValidationError(f"{TASKS_ENV} must be an integer, got {env!r}") from None
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:  # pragma: no cover - non-Linux
        return os.cpu_count() or 1


@dataclass(frozen=True)
class TypeAQuiverRep:
    dims: tuple
    arrows: tuple
    mats: tuple
    field: Field

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "arrows", tuple(self.arrows))
        object.__setattr__(self, "mats", tuple(self.mats))
        object.__setattr__(self, "field", get_field(self.field))
        n = len(self.dims)
        if n < 1:
            raise ValidationError("a quiver needs at least one node")
        if len(self.arrows) != n - 1 or len(self.mats) != n - 1:
            raise DimensionMismatch("need n-1 arrows and n-1 matrices")
        for e, (a, M) in enumerate(zip(self.arrows, self.mats)):
            if a not in (FWD, BWD):
                raise ValidationError(f"arrow {e} must be fwd or bwd, got {a!r}")
            if M.shape != self.edge_shape(e):
                raise DimensionMismatch(f"matrix {e} has shape {M.shape}, expected {self.edge_shape(e)}")
            if M.field != self.field:
                raise DimensionMismatch(f"matrix {e} is over {M.field.tag}, not {self.field.tag}")

    @property
    def n(self) -> int:
        return len(self.dims)

    def edge_shape(self, e: int):
        if self.arrows[e] == FWD:
            return (self.dims[e + 1], self.dims[e])
        return (self.dims[e], self.dims[e + 1])

    def is_persistence(self) -> bool:
        return all(a == FWD for a in self.arrows)


@dataclass(frozen=True)
class BarcodeForm:
    """A quiver whose blocks are pivot matrices, with the optional bases B_v."""

    quiver: TypeAQuiverRep
    basis_log: tuple | None = None


def _into(arrow: str, e: int, v: int) -> bool:
    """Does edge e (between nodes e and e+1) point into node v?"""
    return (v == e + 1) if arrow == FWD else (v == e)


def pass_through_node(q: TypeAQuiverRep, node: int, M: SparseMatrix) -> TypeAQuiverRep:
    """Change the basis at one node: maps out of it become A M, maps into it M^-1 A."""
    if not 0 <= node < q.n:
        raise DimensionMismatch(f"node {node} outside 0..{q.n - 1}")
    if M.shape != (q.dims[node], q.dims[node]):
        raise DimensionMismatch(f"M has shape {M.shape}, node has dimension {q.dims[node]}")
    Minv = M.inverse()  # raises NotInvertible
    mats = list(q.mats)
    for e in (node - 1, node):
        if 0 <= e < q.n - 1:
            mats[e] = Minv @ mats[e] if _into(q.arrows[e], e, node) else mats[e] @ M
    return TypeAQuiverRep(q.dims, q.arrows, mats, q.field)


# working state --------------------------------------------------------------------
class _Carry:
    """An invertible triangular matrix with a lazily computed inverse."""

    __slots__ = ("M", "Minv", "kind")

    def __init__(self, M, Minv, kind):
        self.M, self.Minv, self.kind = M, Minv, kind

    def mat(self):
        if self.M is None:
            self.M = triangular_inverse(self.Minv, self.kind)
        return self.M

    def inv(self):
        if self.Minv is None:
            self.Minv = triangular_inverse(self.M, self.kind)
        return self.Minv


@dataclass
class _Segment:
    """Nodes lo..lo+len(dims)-1 of a quiver being reduced.

    ``tri[e]`` is a pending triangular factor on one side of block e.  For a
    rightward segment it is lower triangular on the node-e side (block e is
    T @ E for bwd, E @ T for fwd); for a leftward segment it is upper
    triangular on the node-(e+1) side (E @ T for bwd, T @ E for fwd).
    ``left`` is B_lo and ``right`` is B_hi^-1.
    """

    lo: int
    dims: list
    arrows: list
    mats: list
    field: Field
    left: SparseMatrix
    right: SparseMatrix
    basis: list | None
    tri: list = dc_field(default_factory=list)

    @classmethod
    def from_quiver(cls, q: TypeAQuiverRep, lo: int, hi: int, keep_basis: bool):
        f = q.field
        dims = list(q.dims[lo:hi + 1])
        basis = [SparseMatrix.identity(d, f) for d in dims] if keep_basis else None
        return cls(
            lo, dims, list(q.arrows[lo:hi]), list(q.mats[lo:hi]), f,
            SparseMatrix.identity(dims[0], f), SparseMatrix.identity(dims[-1], f),
            basis, [None] * (hi - lo),
        )

    @property
    def last(self):
        return len(self.dims) - 1

    def change_basis(self, v, M, Minv, skip=None, edges=True):
        """Apply a basis change at local node v; slots and basis log included."""
        if edges:
            for e in (v - 1, v):
                if 0 <= e < len(self.mats) and e != skip:
                    if _into(self.arrows[e], e, v):
                        self.mats[e] = Minv @ self.mats[e]
                    else:
                        self.mats[e] = self.mats[e] @ M
        if v == 0:
            self.left = self.left @ M
        if v == self.last:
            self.right = Minv @ self.right
        if self.basis is not None:
            self.basis[v] = self.basis[v] @ M


def _perm_inverse_pair(P: SparseMatrix):
    perm = [next(iter(c)) for c in P._cols]
    return perm, invert_perm(perm)


def _forward_rightward(seg: _Segment):
    """First sweep, left to right: LEUP on backward arrows, PUÊL on forward."""
    for e in range(len(seg.mats)):
        A = seg.mats[e]
        if seg.arrows[e] == BWD:
            L, E, U, P = leup(A).factors
            Uinv = triangular_inverse(U, "upper")
            perm, pinv = _perm_inverse_pair(P)
            # residue U P moves to node e+1 as M = (U P)^-1 = P^-1 U^-1
            M = apply_permutation(pinv, Uinv, "rows")
            Minv = apply_permutation(perm, U, "cols")
        else:
            P, U, E, L = variant_factorization(A, "PUEL").factors
            Uinv = triangular_inverse(U, "upper")
            perm, pinv = _perm_inverse_pair(P)
            # residue P U moves to node e+1 as M = P U
            M = apply_permutation(perm, U, "rows")
            Minv = apply_permutation(pinv, Uinv, "cols")
        seg.mats[e] = E
        seg.tri[e] = L
        seg.change_basis(e + 1, M, Minv, skip=e)


def _forward_leftward(seg: _Segment):
    """First sweep, right to left: PLEU on backward arrows, UÊLP on forward."""
    for e in range(len(seg.mats) - 1, -1, -1):
        A = seg.mats[e]
        if seg.arrows[e] == BWD:
            P, L, E, U = variant_factorization(A, "PLEU").factors
            Linv = triangular_inverse(L, "lower")
            perm, pinv = _perm_inverse_pair(P)
            # residue P L moves to node e as M = P L
            M = apply_permutation(perm, L, "rows")
            Minv = apply_permutation(pinv, Linv, "cols")
        else:
            U, E, L, P = variant_factorization(A, "UELP").factors
            Linv = triangular_inverse(L, "lower")
            perm, pinv = _perm_inverse_pair(P)
            # residue L P moves to node e as M = (L P)^-1 = P^-1 L^-1
            M = apply_permutation(pinv, Linv, "rows")
            Minv = apply_permutation(perm, L, "cols")
        seg.mats[e] = E
        seg.tri[e] = U
        seg.change_basis(e, M, Minv, skip=e)


def _apply_carry_at(seg: _Segment, v: int, carry: _Carry):
    if v == 0:
        seg.left = seg.left @ carry.mat()
    if v == seg.last:
        seg.right = carry.inv() @ seg.right
    if seg.basis is not None:
        seg.basis[v] = seg.basis[v] @ carry.mat()


def _commute_pair(E, carry: _Carry, relation: str, use_inverse: bool):
    """Commute the carry (or its inverse) past E.

    The commuted factor is a rescaled leading block of a triangular matrix,
    so commuting the inverse gives the inverse of the commuted matrix; both
    are returned whenever both sides of the carry are already known.
    """
    first, second = (carry.inv(), carry.M) if use_inverse else (carry.mat(), carry.Minv)
    Kt, _ = commute_shape(E, first, relation)
    Kt_other = commute_shape(E, second, relation)[0] if second is not None else None
    return Kt, Kt_other


def _sweep_lower_full(seg: _Segment, carry: _Carry | None):
    """Second sweep for a rightward segment: move lower factors to the left end.

    ``carry`` is a basis change at the last node already applied everywhere
    except the block to its left.
    """
    for e in range(len(seg.mats) - 1, -1, -1):
        T = seg.tri[e]
        E = seg.mats[e]
        if seg.arrows[e] == BWD:
            # T E K = T K~ E, cleaned by N = T K~ at node e
            if carry is None:
                carry = None if T is None else _Carry(T, None, "lower")
            else:
                Kt, Kt_inv = _commute_pair(E, carry, "EL_L", False)
                if T is None:
                    carry = _Carry(Kt, Kt_inv, "lower")
                else:
                    carry = _Carry(T @ Kt, None, "lower")
        else:
            # K^-1 E T = E K~ T, cleaned by M = (K~ T)^-1 at node e
            if carry is None:
                carry = None if T is None else _Carry(None, T, "lower")
            else:
                Kt, Kt_inv = _commute_pair(E, carry, "L_ELhat", True)
                if T is None:
                    carry = _Carry(Kt_inv, Kt, "lower")
                else:
                    carry = _Carry(None, Kt @ T, "lower")
        seg.tri[e] = None
        if carry is not None and (e == 0 or seg.basis is not None):
            _apply_carry_at(seg, e, carry)


def _sweep_upper_full(seg: _Segment, carry: _Carry | None):
    """Second sweep for a leftward segment: move upper factors to the right end.

    ``carry`` is a basis change at node 0 already applied everywhere except
    the block to its right.
    """
    for e in range(len(seg.mats)):
        T = seg.tri[e]
        E = seg.mats[e]
        if seg.arrows[e] == BWD:
            # K^-1 E T = E K~ T, cleaned by M = (K~ T)^-1 at node e+1
            if carry is None:
                carry = None if T is None else _Carry(None, T, "upper")
            else:
                Kt, Kt_inv = _commute_pair(E, carry, "U_EU", True)
                if T is None:
                    carry = _Carry(Kt_inv, Kt, "upper")
                else:
                    carry = _Carry(None, Kt @ T, "upper")
        else:
            # T E K = T K~ E, cleaned by N = T K~ at node e+1
            if carry is None:
                carry = None if T is None else _Carry(T, None, "upper")
            else:
                Kt, Kt_inv = _commute_pair(E, carry, "EUhat_U", False)
                if T is None:
                    carry = _Carry(Kt, Kt_inv, "upper")
                else:
                    carry = _Carry(T @ Kt, None, "upper")
        seg.tri[e] = None
        if carry is not None and (e + 1 == seg.last or seg.basis is not None):
            _apply_carry_at(seg, e + 1, carry)


def _propagate_perm_right(seg: _Segment, perm: list):
    """A permutation basis change P at node 0 has been applied everywhere but
    block 0; push it through every block, re-echeloning each one."""
    f = seg.field
    for e in range(len(seg.mats)):
        E = seg.mats[e]
        pinv = invert_perm(perm)
        if seg.arrows[e] == BWD:
            # into node e: P^-1 E = E_L P'; clean with M = P'^-1 at node e+1
            Q = apply_permutation(pinv, E, "rows")
            Enew, Pn = pivot_to_echelon(Q, "EL_P")
            pn = [next(iter(c)) for c in Pn._cols]
            perm = invert_perm(pn)
        else:
            # out of node e: E P = P' Ê_L; clean with M = P' at node e+1
            Q = apply_permutation(perm, E, "cols")
            Pn, Enew = pivot_to_echelon(Q, "P_ELhat")
            perm = [next(iter(c)) for c in Pn._cols]
        seg.mats[e] = Enew
        carry = perm_matrix(perm, f)
        seg.change_basis(e + 1, carry, carry.transpose(), edges=False)


def _propagate_perm_left(seg: _Segment, perm: list):
    """Mirror of _propagate_perm_right starting at the last node."""
    f = seg.field
    for e in range(len(seg.mats) - 1, -1, -1):
        E = seg.mats[e]
        pinv = invert_perm(perm)
        if seg.arrows[e] == BWD:
            # out of node e+1: E P = P' E_U; clean with M = P' at node e
            Q = apply_permutation(perm, E, "cols")
            Pn, Enew = pivot_to_echelon(Q, "P_EU")
            perm = [next(iter(c)) for c in Pn._cols]
        else:
            # into node e+1: P^-1 E = Ê_U P'; clean with M = P'^-1 at node e
            Q = apply_permutation(pinv, E, "rows")
            Enew, Pn = pivot_to_echelon(Q, "EUhat_P")
            perm = invert_perm([next(iter(c)) for c in Pn._cols])
        seg.mats[e] = Enew
        carry = perm_matrix(perm, f)
        seg.change_basis(e, carry, carry.transpose(), edges=False)


def _merge(a: _Segment, b: _Segment, orientation: str) -> _Segment:
    """Join a rightward segment ``a`` and a leftward segment ``b`` that share a node."""
    f = a.field
    C = a.right @ b.left
    fac = lqu(C)
    L, Q, U = fac.L, fac.Q, fac.U
    # Q is monomial: Q = P D with D diagonal; fold D into U
    perm = [None] * Q.ncols
    dcols = []
    for j, col in enumerate(Q._cols):
        ((i, v),) = col.items()
        perm[j] = i
        dcols.append({j: v})
    DU = SparseMatrix(Q.ncols, Q.ncols, f, dcols) @ U
    # L goes left through a, (D U) goes right through b
    Lc = _Carry(L, None, "lower")
    _apply_carry_at(a, a.last, Lc)
    _sweep_lower_full(a, Lc)
    Uc = _Carry(None, DU, "upper")
    _apply_carry_at(b, 0, Uc)
    _sweep_upper_full(b, Uc)
    # the shared node now sees the permutation P
    if orientation == "right":
        P = perm_matrix(perm, f)
        b.left = b.left @ P.transpose()
        if b.basis is not None:
            b.basis[0] = b.basis[0] @ P.transpose()
        _propagate_perm_right(b, invert_perm(perm))
    else:
        P = perm_matrix(perm, f)
        a.right = P.transpose() @ a.right
        if a.basis is not None:
            a.basis[a.last] = a.basis[a.last] @ P
        _propagate_perm_left(a, perm)
    basis = None
    if a.basis is not None:
        basis = a.basis + b.basis[1:]
    return _Segment(
        a.lo, a.dims + b.dims[1:], a.arrows + b.arrows, a.mats + b.mats, f,
        a.left, b.right, basis, [None] * (len(a.mats) + len(b.mats)),
    )


def _finish(q: TypeAQuiverRep, seg: _Segment) -> BarcodeForm:
    out = TypeAQuiverRep(q.dims, q.arrows, seg.mats, q.field)
    return BarcodeForm(out, tuple(seg.basis) if seg.basis is not None else None)


def barcode_form_sequential(q: TypeAQuiverRep, initial: str = "right", keep_basis: bool = False,
                            backward: bool = True) -> BarcodeForm:
    """Reduce every block to a pivot matrix in two sweeps.

    ``initial="right"`` factors left to right (LEUP / PUÊL), ``"left"``
    right to left (PLEU / UÊLP).  The second sweep only moves triangular
    factors and never changes a block, so ``backward=False`` gives the same
    blocks; it is required when ``keep_basis`` is set.
    """
    if initial not in ("right", "left"):
        raise ValueError(f"initial must be 'right' or 'left', not {initial!r}")
    seg = _Segment.from_quiver(q, 0, q.n - 1, keep_basis)
    if initial == "right":
        _forward_rightward(seg)
        if backward or keep_basis:
            _sweep_lower_full(seg, None)
    else:
        _forward_leftward(seg)
        if backward or keep_basis:
            _sweep_upper_full(seg, None)
    return _finish(q, seg)


# divide and conquer -------------------------------------------------------------
@dataclass
class _Task:
    lo: int
    hi: int
    orientation: str
    children: tuple = ()
    height: int = 0
    result: object = None


def _plan(lo, hi, orientation, leaf_nodes) -> _Task:
    if hi - lo + 1 <= leaf_nodes:
        return _Task(lo, hi, orientation)
    mid = lo + (hi - lo) // 2
    a = _plan(lo, mid, "right", leaf_nodes)
    b = _plan(mid, hi, "left", leaf_nodes)
    return _Task(lo, hi, orientation, (a, b), 1 + max(a.height, b.height))


def _run_leaf(args):
    q, lo, hi, orientation, keep_basis = args
    seg = _Segment.from_quiver(q, lo, hi, keep_basis)
    if orientation == "right":
        _forward_rightward(seg)
    else:
        _forward_leftward(seg)
    return seg


def _run_merge(args):
    a, b, orientation = args
    return _merge(a, b, orientation)


class _Inline:
    """Executor stand-in that runs everything in the calling thread."""

    def map(self, fn, items):
        return [fn(x) for x in items]

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def barcode_form_parallel(q: TypeAQuiverRep, leaf_size: int = 4, keep_basis: bool = False,
                          tasks: int | None = None, backend: str = "thread",
                          orientation: str = "right") -> BarcodeForm:
    """Divide and conquer: split at the middle node, solve the left part
    rightward-initial and the right part leftward-initial, then join them by
    an LQU factorization of the product of the two residues at the shared
    node.  Leaves run concurrently, then each level of merges.

    ``orientation`` picks the direction in which the final permutation is
    pushed; the default yields blocks shaped like the rightward-initial output.
    """
    if leaf_size < 1:
        raise ValueError("leaf_size must be at least 1")
    if orientation not in ("right", "left"):
        raise ValueError(f"orientation must be 'right' or 'left', not {orientation!r}")
    tasks = default_tasks() if tasks is None else max(1, int(tasks))
    plan = _plan(0, q.n - 1, orientation, max(leaf_size, 2))
    if not plan.children:
        seg = _Segment.from_quiver(q, 0, q.n - 1, keep_basis)
        if orientation == "right":
            _forward_rightward(seg)
            if keep_basis:
                _sweep_lower_full(seg, None)
        else:
            _forward_leftward(seg)
            if keep_basis:
                _sweep_upper_full(seg, None)
        return _finish(q, seg)
    levels: dict[int, list[_Task]] = {}
    stack = [plan]
    while stack:
        t = stack.pop()
        levels.setdefault(t.height, []).append(t)
        stack.extend(t.children)
    if tasks == 1:
        pool = _Inline()
    elif backend == "process":
        pool = ProcessPoolExecutor(max_workers=tasks)
    elif backend == "thread":
        pool = ThreadPoolExecutor(max_workers=tasks)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    with pool:
        leaves = sorted(levels[0], key=lambda t: t.lo)
        for t, seg in zip(leaves, pool.map(_run_leaf, [(q, t.lo, t.hi, t.orientation, keep_basis) for t in leaves])):
            t.result = seg
        for h in sorted(k for k in levels if k > 0):
            batch = sorted(levels[h], key=lambda t: t.lo)
            args = [(t.children[0].result, t.children[1].result, t.orientation) for t in batch]
            for t, seg in zip(batch, pool.map(_run_merge, args)):
                t.result = seg
                t.children[0].result = t.children[1].result = None
    return _finish(q, plan.result)


# barcode extraction ---------------------------------------------------------------
@dataclass(frozen=True)
class Interval:
    birth: int  # 1-based node
    death: int  # 1-based node, inclusive
    members: tuple  # (node, basis index) per node covered, 0-based


def extract_intervals(q: TypeAQuiverRep) -> list[Interval]:
    """Sweep left to right following the single nonzero of each pivot block."""
    for e, M in enumerate(q.mats):
        if not is_pivot(M):
            raise NotBarcodeForm(f"block {e + 1} is not a pivot matrix")
    chains = [[(0, j)] for j in range(q.dims[0])]
    owner = list(range(q.dims[0]))
    for v in range(1, q.n):
        e = v - 1
        M = q.mats[e]
        link = {}
        if q.arrows[e] == FWD:
            # rows of M are basis vectors of node v
            for c, col in enumerate(M._cols):
                for r in col:
                    link[r] = c
        else:
            for c, col in enumerate(M._cols):
                for r in col:
                    link[c] = r
        new_owner = []
        for j in range(q.dims[v]):
            prev = link.get(j)
            if prev is None:
                chains.append([(v, j)])
                new_owner.append(len(chains) - 1)
            else:
                k = owner[prev]
                chains[k].append((v, j))
                new_owner.append(k)
        owner = new_owner
    out = [Interval(ch[0][0] + 1, ch[-1][0] + 1, tuple(ch)) for ch in chains]
    out.sort(key=lambda iv: (iv.birth, iv.death, iv.members[0][1]))
    return out


def extract_barcode(bf, dim: int = 0) -> Barcode:
    """Closed intervals [birth, death] of 1-based nodes, tagged with ``dim``."""
    q = bf.quiver if isinstance(bf, BarcodeForm) else bf
    return Barcode(Bar(dim, iv.birth, iv.death) for iv in extract_intervals(q))


def quiver_barcode(q: TypeAQuiverRep, dim: int = 0, parallel: bool = False, leaf_size: int = 4,
                   initial: str = "right", tasks: int | None = None) -> Barcode:
    if parallel:
        bf = barcode_form_parallel(q, leaf_size=leaf_size, tasks=tasks)
    else:
        bf = barcode_form_sequential(q, initial=initial, backward=False)
    return extract_barcode(bf, dim)


# rank oracle ---------------------------------------------------------------------
def dense_rank(A: SparseMatrix) -> int:
    """Rank by plain Gaussian elimination on a dense copy."""
    f = A.field
    rows = [list(r) for r in A.to_dense()]
    rank = 0
    ncols = A.ncols
    for c in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = f.inv(rows[rank][c])
        for r in range(rank + 1, len(rows)):
            if rows[r][c] != 0:
                a = f.mul(rows[r][c], inv)
                rows[r] = [f.sub(x, f.mul(a, y)) for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def persistence_rank_oracle(q: TypeAQuiverRep, dim: int = 0) -> Barcode:
    """Bars of an all-forward quiver from ranks of composite maps."""
    if not q.is_persistence():
        raise NotPersistenceType("rank oracle needs every arrow forward")
    n = q.n
    r = [[0] * n for _ in range(n)]
    for i in range(n):
        M = SparseMatrix.identity(q.dims[i], q.field)
        r[i][i] = q.dims[i]
        for j in range(i + 1, n):
            M = q.mats[j - 1] @ M
            r[i][j] = dense_rank(M)

    def rank(i, j):
        if i < 0 or j >= n:
            return 0
        return r[i][j]

    bars = []
    for i in range(n):
        for j in range(i, n):
            mult = rank(i, j) - rank(i - 1, j) - rank(i, j + 1) + rank(i - 1, j + 1)
            bars.extend([Bar(dim, i + 1, j + 1)] * mult)
    return Barcode(bars)


# quiver text format ----------------------------------------------------------------
def parse_quiver(text: str, field=None) -> TypeAQuiverRep:
    """Parse the quiver format; ``field`` overrides the header's field tag."""
    lines = text.splitlines()
    n = None
    dims = None
    arrows = {}
    blocks = {}
    current = None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0]
        if key == "quiver":
            if len(parts) != 3 or n is not None:
                raise ParseError("expected a single 'quiver <n> <field>' header", lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise ParseError("bad node count", lineno) from None
            if n < 1:
                raise ParseError("node count must be positive", lineno)
            field = get_field(field if field is not None else parts[2])
            current = None
        elif n is None:
            raise ParseError("file must start with 'quiver <n> <field>'", lineno)
        elif key == "dims":
            try:
                dims = [int(x) for x in parts[1:]]
            except ValueError:
                raise ParseError("bad dimension", lineno) from None
            if len(dims) != n or any(d < 0 for d in dims):
                raise ParseError(f"expected {n} nonnegative dimensions", lineno)
            current = None
        elif key == "arrow":
            if len(parts) != 3 or parts[2] not in (FWD, BWD):
                raise ParseError("expected 'arrow <i> fwd|bwd'", lineno)
            i = _edge_id(parts[1], n, lineno)
            if i in arrows:
                raise ParseError(f"arrow {i} given twice", lineno)
            arrows[i] = parts[2]
            current = None
        elif key == "mat":
            if len(parts) != 2:
                raise ParseError("expected 'mat <i>'", lineno)
            i = _edge_id(parts[1], n, lineno)
            if i in blocks:
                raise ParseError(f"matrix {i} given twice", lineno)
            blocks[i] = (lineno + 1, [])
            current = blocks[i][1]
        elif current is not None:
            current.append((lineno, raw))
        else:
            raise ParseError(f"unexpected line {line!r}", lineno)
    if n is None:
        raise ParseError("empty quiver file")
    if dims is None:
        raise ParseError("missing 'dims' line")
    missing = [i for i in range(1, n) if i not in arrows]
    if missing:
        raise ParseError(f"missing arrow for edge {missing[0]}")
    arrow_list = [arrows[i] for i in range(1, n)]
    mats = []
    for i in range(1, n):
        if arrow_list[i - 1] == FWD:
            shape = (dims[i], dims[i - 1])
        else:
            shape = (dims[i - 1], dims[i])
        if i in blocks:
            _, body = blocks[i]
            mats.append(_parse_block(body, shape, field))
        else:
            mats.append(SparseMatrix.zeros(shape[0], shape[1], field))
    return TypeAQuiverRep(dims, arrow_list, mats, field)


def _parse_block(body, shape, field):
    if not body:
        return SparseMatrix.zeros(shape[0], shape[1], field)
    start = body[0][0]
    # keep line numbers aligned by padding gaps
    lines = []
    for lineno, raw in body:
        while start + len(lines) < lineno:
            lines.append("")
        lines.append(raw)
    return parse_coo_entries(lines, shape[0], shape[1], field, start_line=start)


def _edge_id(text, n, lineno):
    try:
        i = int(text)
    except ValueError:
        raise ParseError(f"bad edge index {text!r}", lineno) from None
    if not 1 <= i <= n - 1:
        raise ParseError(f"edge index {i} outside 1..{n - 1}", lineno)
    return i


def read_quiver(path, field=None) -> TypeAQuiverRep:
    with open(path, encoding="utf-8") as fh:
        return parse_quiver(fh.read(), field)


def format_quiver(q: TypeAQuiverRep) -> str:
    out = [f"quiver {q.n} {q.field.tag}", "dims " + " ".join(str(d) for d in q.dims)]
    out += [f"arrow {e + 1} {a}" for e, a in enumerate(q.arrows)]
    for e, M in enumerate(q.mats):
        out.append(f"mat {e + 1}")
        out += [f"{i + 1} {j + 1} {q.field.format(v)}" for i, j, v in M.entries()]
    return "\n".join(out) + "\n"
