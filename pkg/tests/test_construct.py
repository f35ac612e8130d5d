import pytest

from qldpc_lab import code_family, hamming_code, hypergraph_product, random_gallager_ldpc, repetition_code
from qldpc_lab.construct import tanner_girth


@pytest.mark.parametrize("L,n", [(3, 13), (5, 41), (7, 85)])
def test_repetition_products(L, n):
    code = hypergraph_product(repetition_code(L))
    assert (code.n, code.k) == (n, 1)
    assert code.distance_hint == L
    assert (code.hx @ code.hz.T).is_zero()


def test_hamming_product():
    code = hypergraph_product(hamming_code())
    assert (code.n, code.k) == (58, 16)
    rep = code.validate()
    r, c = hamming_code().ldpc_params
    # per-sector weights obey r' <= r + c and c' <= max(r, c)
    for rr, cc in rep.sectors.values():
        assert rr <= r + c and cc <= max(r, c)


def test_rank_deficient_seed_needs_reduce():
    from qldpc_lab import BinaryMatrix
    from qldpc_lab.construct import ClassicalCode

    h = BinaryMatrix.from_dense([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    with pytest.raises(ValueError):
        hypergraph_product(ClassicalCode(h))
    code = hypergraph_product(ClassicalCode(h), reduce=True)
    assert (code.n, code.k) == (13, 1)


def test_gallager_is_deterministic_and_regular():
    a = random_gallager_ldpc(12, 4, 3, seed=7)
    b = random_gallager_ldpc(12, 4, 3, seed=7)
    assert a.h.rows == b.h.rows
    assert a.ldpc_params == (4, 3)
    assert set(a.h.row_weights()) == {4} and set(a.h.col_weights()) == {3}


def test_girth_and_family():
    assert tanner_girth(repetition_code(4).h) is None  # a path has no cycles
    fam = code_family("repetition", [3, 5, 7])
    assert fam.n == [13, 41, 85] and fam.k == [1, 1, 1]
    assert fam.gaps == [28, 44]
    assert fam.beta is not None and fam.beta > 1
