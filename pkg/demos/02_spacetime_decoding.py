"""Repeated noisy syndrome measurement on the [[13,1]] code.

Samples a few fault paths, decodes them with the exact space-time decoder and
the cluster decoder, and shows the cluster diagnostics for a failure.

    python demos/02_spacetime_decoding.py
"""

from qldpc_lab import hypergraph_product, repetition_code
from qldpc_lab.decoders import decode_spacetime, failure_diagnostics, greedy_cluster_decode
from qldpc_lab.noise import PhenomenologicalParams, observed_syndromes, sample_iid

code = hypergraph_product(repetition_code(3))
T = 3
params = PhenomenologicalParams(p_init=0.0, p_data=0.03, q_synd=0.03, T=T)

shown_failure = False
for seed in range(40):
    fp = sample_iid(params, code, seed)
    if fp.is_empty():
        continue
    deltas = observed_syndromes(code, fp)
    ex = decode_spacetime(code, deltas, truth=fp)
    cl = greedy_cluster_decode(code, deltas, truth=fp)
    print(f"seed {seed:2d}: fault weight {fp.weight}  exact w={ex.weight} {ex.status:<26} cluster w={cl.weight} {cl.status}")
    if ex.status != "success" and not shown_failure:
        shown_failure = True
        rep = failure_diagnostics(code, fp, ex)
        print("   clusters (size, actual errors):", [(c.size, c.errors) for c in rep.clusters])
        print("   some cluster of size >= d has >= s/4 errors:", rep.witness_quarter)

# the sum of the difference syndromes telescopes
fp = sample_iid(params, code, 3)
acc = 0
for d in observed_syndromes(code, fp):
    acc ^= d
print("\nXOR of deltas == last syndrome error ^ syndrome of cumulative error:",
      acc == fp.synd_errors[-1] ^ code.syndrome(fp.cumulative_error()))
