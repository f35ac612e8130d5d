"""Memory experiments: second-order scaling, a small threshold scan, staggering.

Trial counts are small so this finishes in about a minute; the acceptance
suite runs the same experiments at full size.

    python demos/04_memory_experiments.py
"""

from qldpc_lab import ExperimentConfig, run_memory_experiment, threshold_scan
from qldpc_lab.harness import staggered_ec_experiment, write_csv
from qldpc_lab.stats import loglog_slope

ps = [3e-3, 6e-3, 1e-2]
cells = [
    run_memory_experiment(ExperimentConfig(code="rep3", p=p, q=0.0, p_init=0.0, T=1, trials=300_000, seed=i))
    for i, p in enumerate(ps)
]
print(write_csv(cells))
print("log-log slope:", round(loglog_slope(ps, [c.rate for c in cells]), 3))

# too few trials at the low point leaves the intervals overlapping and the verdict inconclusive
scan = threshold_scan(["rep3", "rep5"], [3e-3, 0.15], ExperimentConfig(seed=5), trials_per_p={3e-3: 60_000, 0.15: 40})
for cid, row in zip(scan.codes, scan.matrix()):
    print(cid, ["%.3g" % r for r in row])
print("low p:", scan.low_verdict, " high p:", scan.high_verdict, " thin cells:", scan.wide)

base = ExperimentConfig(code="rep3", p=0.01, T=3, trials=5000, seed=2)
for s in (1, 2, 4):
    st = staggered_ec_experiment(4, s, base)
    print(f"M=4 s={s}: block failure rate {st.cell.rate:.4f}, idle rounds per block {st.idle_rounds_per_block}")

circ = run_memory_experiment(ExperimentConfig(code="rep3", p=2e-4, noise="circuit", trials=200, seed=3))
print(f"\ncircuit-level p=2e-4: {circ.failures}/{circ.trials} failures, {circ.extra['cat_retries']} cat retries")
