"""Build the small hypergraph-product codes and poke at their structure.

    python demos/01_codes_and_logicals.py
"""

from qldpc_lab import PauliOperator, hamming_code, hypergraph_product, repetition_code
from qldpc_lab.decoders import decode_static, syndrome_table


def show(code):
    rep = code.validate()
    print(f"{code.name}: n={code.n} k={code.k} rank={rep.rank} r={rep.r} c={rep.c} per sector {rep.sectors}")


small = hypergraph_product(repetition_code(3))
show(small)
show(hypergraph_product(hamming_code()))

print("\nsector distances of the small code:", small.sector_distances())
lx, lz = small.derive_logicals()
print("logical X:", lx[0], " logical Z:", lz[0])
print("they anticommute:", not lx[0].commutes_with(lz[0]))

# every single-qubit error is corrected
tab = syndrome_table(small)
print(f"\nsyndrome table: {len(tab.weights)} entries, heaviest coset leader weight {tab.max_weight}")
bad = 0
for q in range(small.n):
    for kind in "XYZ":
        e = PauliOperator.single(small.n, q, kind)
        corr = decode_static(small, small.syndrome(e))
        bad += small.classify(e * corr) != "stabilizer"
print("weight-1 errors left uncorrected:", bad)

# two X errors on a logical's support push the decoder the wrong way
bits = lx[0].support[:2]
e = PauliOperator(small.n, (1 << bits[0]) | (1 << bits[1]), 0)
corr = decode_static(small, small.syndrome(e))
print(f"\nerror {e}\ncorrection {corr}\nresult is {small.classify(e * corr)}")
