import itertools

import pytest

from qldpc_lab import PauliOperator, StabilizerCode, hypergraph_product, repetition_code
from qldpc_lab.stabilizer import DETECTABLE, LOGICAL, STABILIZER, code_from_json


def _table_ok(code, lx, lz):
    for g in code.generators:
        for l in list(lx) + list(lz):
            if not g.commutes_with(l):
                return False
    for i, a in enumerate(lx):
        for j, b in enumerate(lz):
            if a.commutes_with(b) == (i == j):
                return False
    for a, b in itertools.combinations(lx, 2):
        if not a.commutes_with(b):
            return False
    for a, b in itertools.combinations(lz, 2):
        if not a.commutes_with(b):
            return False
    return True


def test_bitflip_canonical_and_logicals(bitflip):
    cf = bitflip.canonical_form()
    # the canonical generators have the (A I | B C) shape: X part of row j ends in e_j
    for j, g in enumerate(cf.code.generators):
        assert g.x >> (3 - 2) == 1 << j
    lx, lz = bitflip.derive_logicals()
    assert [str(p) for p in lx] == ["XXX"]
    assert [str(p) for p in lz] == ["IIZ"]
    assert _table_ok(bitflip, lx, lz)


def test_code13_logicals_and_classify(code13):
    lx, lz = code13.derive_logicals()
    assert len(lx) == len(lz) == 1
    assert _table_ok(code13, lx, lz)
    assert code13.classify(lx[0]) == LOGICAL
    assert code13.classify(code13.generators[0]) == STABILIZER
    assert code13.classify(PauliOperator.single(13, 0, "X")) == DETECTABLE
    for g in code13.generators:
        assert code13.syndrome(g) == 0


def test_validate_reports(code13):
    rep = code13.validate()
    assert rep.valid and rep.rank == 12
    assert (rep.r, rep.c) == (4, 4)
    assert rep.sectors == {"x": (4, 2), "z": (4, 2)}
    bad = StabilizerCode(2, [PauliOperator.from_string("XI"), PauliOperator.from_string("ZI")])
    rb = bad.validate()
    assert not rb.valid and rb.anticommuting_pairs == [(0, 1)]
    dup = StabilizerCode(2, [PauliOperator.from_string("ZZ"), PauliOperator.from_string("ZZ")])
    assert dup.validate().dependent_generators


def test_distance_and_json(code13, bitflip):
    assert code13.sector_distances() == (3, 3)
    assert bitflip.distance() == 1
    back = code_from_json(code13.to_json())
    assert back.n == 13 and [g.symplectic_int() for g in back.generators] == [
        g.symplectic_int() for g in code13.generators
    ]


def test_syndrome_dimension_check(code13):
    with pytest.raises(ValueError):
        code13.syndrome(PauliOperator.from_string("X"))
