import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qldpc_lab.gf2 import BinaryMatrix, PauliOperator, rank, solve_affine, symplectic_product


def test_rank_small_cases():
    assert rank(BinaryMatrix.identity(2)) == 2
    assert rank(BinaryMatrix.zeros(3, 4)) == 0
    h = BinaryMatrix.from_dense([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    before = h.rows
    assert rank(h) == 2
    assert h.rows == before


def test_symplectic_examples():
    P = PauliOperator.from_string
    assert symplectic_product(P("XI"), P("ZI")) == 1
    assert symplectic_product(P("XX"), P("ZZ")) == 0
    assert symplectic_product(P("XZZX"), P("ZXXZ")) == 0
    with pytest.raises(ValueError, match="dimension"):
        symplectic_product(P("X"), P("XX"))


def test_solve_affine_examples():
    x, null = solve_affine(BinaryMatrix.identity(3), 0b101)
    assert x == 0b101 and null == []
    x, null = solve_affine(BinaryMatrix.zeros(2, 3), 0)
    assert x == 0 and len(null) == 3
    h = BinaryMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
    x, null = solve_affine(h, 0b01)  # first check violated
    assert h.mul_vec(x) == 0b01
    # some weight-1 vector satisfies it
    assert any(h.mul_vec(1 << j) == 0b01 for j in range(3))
    assert null == [0b111]
    x, _ = solve_affine(BinaryMatrix.from_dense([[1, 1], [1, 1]]), 0b01)
    assert x is None


def _dense(rows, ncols):
    return np.array([[(r >> j) & 1 for j in range(ncols)] for r in rows], dtype=np.uint8)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7), st.integers(1, 9), st.data())
def test_rank_matches_float_elimination(nr, nc, data):
    rows = data.draw(st.lists(st.integers(0, (1 << nc) - 1), min_size=nr, max_size=nr))
    m = BinaryMatrix(rows, nc)
    r = rank(m)
    assert r <= min(nr, nc)
    # nullity + rank = ncols
    assert len(m.nullspace()) + r == nc
    for v in m.nullspace():
        assert m.mul_vec(v) == 0
    assert np.array_equal(m.to_numpy(), _dense(rows, nc))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.data())
def test_solve_affine_consistency(n, data):
    rows = data.draw(st.lists(st.integers(0, (1 << n) - 1), min_size=1, max_size=6))
    m = BinaryMatrix(rows, n)
    x0 = data.draw(st.integers(0, (1 << n) - 1))
    rhs = m.mul_vec(x0)
    x, null = solve_affine(m, rhs)
    assert x is not None and m.mul_vec(x) == rhs
    assert len(null) == n - rank(m)


def test_matrix_ops_roundtrip():
    a = BinaryMatrix.from_dense([[1, 0, 1], [0, 1, 1]])
    assert (a @ a.T).to_numpy().tolist() == [[0, 1], [1, 0]]
    assert a.T.T.rows == a.rows
    assert BinaryMatrix.from_sparse_text(a.to_sparse_text()).rows == a.rows
    k = a.kron(BinaryMatrix.identity(2))
    assert k.shape == (4, 6)
    assert a.hstack(a).shape == (2, 6) and a.vstack(a).shape == (4, 3)


def test_pauli_algebra():
    p = PauliOperator.from_string("XYZI")
    assert str(p) == "XYZI" and p.weight == 3
    assert (p * p).is_identity()
    assert PauliOperator(4).weight == 0
    assert p.hadamard(0b0011).__str__() == "ZYZI"
    assert str(p.permute([3, 2, 1, 0])) == "IZYX"
    assert PauliOperator.from_symplectic_int(4, p.symplectic_int()) == p
    assert p.commutes_with(PauliOperator.from_string("XXXX")) is True
    assert p.commutes_with(PauliOperator.from_string("IXII")) is False
