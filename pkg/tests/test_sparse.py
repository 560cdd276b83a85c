import itertools

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from quiverbar.errors import (
    DimensionMismatch,
    Inconsistent,
    NotInvertible,
    NotTriangular,
    ParseError,
)
from quiverbar.factor import lqu
from quiverbar.fields import get_field
from quiverbar.sparse import (
    J,
    ShapeKind,
    SparseMatrix,
    apply_permutation,
    classify_shape,
    format_matrix,
    has_shape,
    is_EL,
    j_conjugate,
    parse_matrix,
    perm_matrix,
    solve_triangular,
    triangular_inverse,
)

F2, F3, F5, Q = (get_field(t) for t in ("F2", "F3", "F5", "Q"))


def M(rows, field=F5):
    return SparseMatrix.from_dense(rows, field)


# products ---------------------------------------------------------------------
def test_identity_times_matrix(rng):
    A = oracles.random_matrix(rng, 3, 5, F5)
    assert SparseMatrix.identity(3, F5) @ A == A


def test_J_is_its_own_inverse():
    for n in range(0, 6):
        assert J(n, F5) @ J(n, F5) == SparseMatrix.identity(n, F5)


def test_product_of_unit_pivots():
    Q2 = M([[0, 0], [1, 0]])
    Q1 = M([[0, 1], [0, 0]])
    prod = Q2 @ Q1
    assert prod == M([[0, 0], [0, 1]])
    assert ShapeKind.PIVOT in classify_shape(prod)


@pytest.mark.parametrize("field", [F2, F3])
def test_matmul_matches_dense(rng, field):
    p = oracles.char_of(field)
    for _ in range(250):
        m, k, n = (rng.randint(0, 8) for _ in range(3))
        A = oracles.random_matrix(rng, m, k, field)
        B = oracles.random_matrix(rng, k, n, field)
        want = oracles.dense_mul(oracles.dense(A), oracles.dense(B), p, n)
        got = A @ B
        assert got.shape == (m, n)
        assert oracles.dense(got) == want


def test_matmul_shape_check():
    with pytest.raises(DimensionMismatch):
        SparseMatrix.zeros(2, 3, F5) @ SparseMatrix.zeros(2, 3, F5)


def test_pivot_matrices_closed_under_products(rng):
    for _ in range(200):
        a, b, c = (rng.randint(1, 20) for _ in range(3))
        Q1 = oracles.random_pivot(rng, b, a, F5)
        Q2 = oracles.random_pivot(rng, c, b, F5)
        assert ShapeKind.PIVOT in classify_shape(Q2 @ Q1)


# J conjugation ------------------------------------------------------------------
def test_conjugating_lower_gives_upper(rng):
    for _ in range(100):
        n = rng.randint(1, 20)
        L = oracles.random_triangular(rng, n, F5, lower=True)
        JLJ = j_conjugate(L)
        assert has_shape(JLJ, "Upper")
        # J L = U' J with U' = J L J
        assert J(n, F5) @ L == JLJ @ J(n, F5)


def test_conjugating_identity():
    assert j_conjugate(SparseMatrix.identity(4, Q)) == SparseMatrix.identity(4, Q)


def test_echelon_shapes_under_J(rng):
    for _ in range(100):
        n = rng.randint(1, 20)
        E = oracles.random_EL(rng, n, n, F5)
        JEJ = j_conjugate(E)
        assert has_shape(JEJ, "EUhat")
        assert J(n, F5) @ E == JEJ @ J(n, F5)
        assert has_shape(j_conjugate(E.T), "ELhat")


def test_j_conjugate_needs_square():
    with pytest.raises(DimensionMismatch):
        j_conjugate(SparseMatrix.zeros(2, 3, F2))


# shape classification -------------------------------------------------------------
def test_identity_has_every_triangular_and_echelon_shape():
    kinds = classify_shape(SparseMatrix.identity(3, F2))
    want = {"Lower", "Upper", "Perm", "Pivot", "EL", "EU", "ELhat", "EUhat"}
    assert want <= {k.value for k in kinds}
    assert ShapeKind.ANTIDIAG_J not in kinds


def test_small_echelon_examples():
    assert {ShapeKind.PIVOT, ShapeKind.EL} <= classify_shape(M([[1, 0], [0, 0]], F2))
    assert ShapeKind.PIVOT in classify_shape(M([[0, 0], [1, 0]], F2))
    assert ShapeKind.EL in classify_shape(M([[0, 0], [1, 0]], F2))
    assert ShapeKind.EL not in classify_shape(M([[0, 1], [0, 0]], F2))
    assert classify_shape(M([[1, 1], [1, 1]], F2)) == {ShapeKind.GENERIC}
    assert ShapeKind.ANTIDIAG_J in classify_shape(J(3, F5))


def _el_by_definition(rows):
    """Echelon lower pivot matrix straight from the definition."""
    m, n = len(rows), len(rows[0])
    cols = [[i for i in range(m) if rows[i][j]] for j in range(n)]
    if any(len(c) > 1 for c in cols):
        return False
    used = [c[0] for c in cols if c]
    if len(set(used)) != len(used):
        return False
    nonzero = [bool(c) for c in cols]
    return nonzero == sorted(nonzero, reverse=True) and used == sorted(used)


def test_el_matches_definition_on_all_01_matrices():
    # frozen from enumerating every 2x2 0/1 matrix against the definition
    frozen = {((0, 0), (0, 0)), ((1, 0), (0, 0)), ((0, 0), (1, 0)), ((1, 0), (0, 1))}
    found = set()
    for bits in itertools.product((0, 1), repeat=4):
        rows = (bits[:2], bits[2:])
        if is_EL(M(rows, F2)):
            found.add(rows)
    assert found == frozen
    for m, n in [(2, 3), (3, 2), (3, 3)]:
        for bits in itertools.product((0, 1), repeat=m * n):
            rows = [bits[i * n:(i + 1) * n] for i in range(m)]
            assert is_EL(M(rows, F2)) == _el_by_definition(rows)


# triangular solves ----------------------------------------------------------------
def test_solve_with_identity():
    b = {0: 3, 2: 1}
    assert solve_triangular(SparseMatrix.identity(3, F5), b) == b


def test_solve_upper_two_by_two():
    T = M([[1, 1], [0, 1]], Q)
    assert solve_triangular(T, {1: 1}, "left", "upper") == {0: -1, 1: 1}


def test_solve_inconsistent():
    T = M([[1, 0], [0, 0]], Q)
    with pytest.raises(Inconsistent):
        solve_triangular(T, {1: 1}, "left", "lower")
    # consistent despite the zero diagonal
    assert solve_triangular(T, {0: 2}, "left", "lower") == {0: 2}


def test_solve_rejects_non_triangular():
    with pytest.raises(NotTriangular):
        solve_triangular(M([[1, 1], [1, 1]]), {0: 1}, "left", "lower")


@pytest.mark.parametrize("side", ["left", "right"])
@pytest.mark.parametrize("kind", ["lower", "upper"])
def test_solve_reconstructs(rng, side, kind):
    for _ in range(100):
        n = rng.randint(1, 12)
        T = oracles.random_triangular(rng, n, F5, lower=kind == "lower")
        b = {i: rng.randrange(1, 5) for i in rng.sample(range(n), rng.randint(0, n))}
        x = solve_triangular(T, b, side, kind)
        xv = SparseMatrix.from_columns(n, [x], F5)
        got = T @ xv if side == "left" else (xv.T @ T).T
        assert got.col(0) == b


def test_triangular_inverse(rng):
    for _ in range(50):
        n = rng.randint(1, 10)
        U = oracles.random_triangular(rng, n, Q, lower=False)
        assert U @ triangular_inverse(U, "upper") == SparseMatrix.identity(n, Q)
    with pytest.raises(NotInvertible):
        triangular_inverse(M([[1, 0], [1, 0]]), "lower")


def test_general_inverse(rng):
    for _ in range(50):
        n = rng.randint(1, 8)
        A = oracles.random_invertible(rng, n, F5)
        assert A @ A.inverse() == SparseMatrix.identity(n, F5)
    with pytest.raises(NotInvertible):
        M([[1, 2], [2, 4]]).inverse()


# permutations ---------------------------------------------------------------------
def test_identity_permutation(rng):
    A = oracles.random_matrix(rng, 4, 4, F5)
    assert apply_permutation([0, 1, 2, 3], A, "rows") == A
    assert apply_permutation([0, 1, 2, 3], A, "cols") == A


def test_row_reversal_is_J(rng):
    L = oracles.random_triangular(rng, 5, F5)
    assert apply_permutation([4, 3, 2, 1, 0], L, "rows") == J(5, F5) @ L


def test_swap_twice(rng):
    A = oracles.random_matrix(rng, 3, 3, F5)
    once = apply_permutation([1, 0, 2], A, "rows")
    assert once != A or A.rows()[0] == A.rows()[1]
    assert apply_permutation([1, 0, 2], once, "rows") == A


def test_permutation_matches_matrix_product(rng):
    for _ in range(50):
        n = rng.randint(1, 7)
        perm = oracles.random_perm(rng, n)
        A = oracles.random_matrix(rng, n, n, F5)
        P = perm_matrix(perm, F5)
        assert apply_permutation(perm, A, "rows") == P @ A
        assert apply_permutation(perm, A, "cols") == A @ P


def test_bad_permutation():
    with pytest.raises(Exception):
        apply_permutation([0, 0], SparseMatrix.identity(2, F2))


# rank-nullity ---------------------------------------------------------------------
def test_rank_nullity(rng):
    for _ in range(100):
        m, n = rng.randint(1, 10), rng.randint(1, 10)
        A = oracles.random_low_rank(rng, m, n, F5, rng.randint(1, min(m, n)))
        r = lqu(A).rank
        kernel = oracles.nullspace(oracles.dense(A), n, 5)
        assert r == oracles.rank(A)
        assert r + len(kernel) == n


# text format ---------------------------------------------------------------------
def test_matrix_round_trip(rng):
    for tag in ("F2", "F5", "Q"):
        A = oracles.random_matrix(rng, 4, 6, tag)
        assert parse_matrix(format_matrix(A)) == A


def test_duplicate_entry_is_rejected():
    with pytest.raises(ParseError) as exc:
        parse_matrix("matrix 2 2 F2\n1 1 1\n1 1 1\n")
    assert exc.value.line == 3


def test_entry_out_of_range():
    with pytest.raises(ParseError):
        parse_matrix("matrix 2 2 F2\n3 1 1\n")


def test_field_override():
    A = parse_matrix("matrix 1 1 F5\n1 1 7\n", field="F3")
    assert A.field == F3 and A[0, 0] == 1


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(-9, 9)), max_size=20))
def test_from_entries_sums_repeats(entries):
    A = SparseMatrix.from_entries(5, 5, entries, F5)
    want = [[0] * 5 for _ in range(5)]
    for i, j, v in entries:
        want[i][j] = (want[i][j] + v) % 5
    assert oracles.dense(A) == want
    assert A.nnz() == sum(1 for r in want for x in r if x)
