"""Closed-form overhead numbers for the [[13,1]] extraction circuit.

    python demos/05_overhead.py
"""

import json

from qldpc_lab import hypergraph_product, repetition_code
from qldpc_lab.overhead import ProtocolParams, overhead_report, overhead_table
from qldpc_lab.shor import ShorRound, schedule_generators

code = hypergraph_product(repetition_code(3))
rnd = ShorRound(code, schedule_generators(code))
rep = code.validate()
params = ProtocolParams(r=rep.r, c=rep.c, A=max(rnd.A.values()), l=rnd.depth, p=1e-10, R=1 / 13)
print("params:", json.dumps(params.to_dict()))

report = overhead_report(params, 13, 1, 3, family=[(13, 1), (41, 1), (85, 1)], k=30)
d = report.to_dict()
print("\nrates:", {k: f"{v:.3e}" for k, v in d["rates"].items()})
print("p0 (repeated):", f"{report.constants.p0:.3e}", " p1:", f"{report.constants.p1:.3e}")
for name, chk in report.threshold_checks.items():
    print(f"  {name:<14} {chk.expr:<22} {'holds' if chk.holds else 'fails'}  ({chk.lhs:.3e} vs {chk.rhs:.3e})")
print("locations per cycle:", report.locations_per_cycle)
plan = report.block_plan
print(f"\nblock plan: n_i={plan.n_i} M={plan.M} total qubits {plan.qubit_total:.3g} vs budget {plan.budget:.3g}")
print("violated:", plan.violated)

print("\n" + overhead_table(params, "s", [1, 2, 4, 8], 13, 1, 3))
