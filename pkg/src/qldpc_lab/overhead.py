"""Closed-form resource and threshold accounting for Shor-style LDPC error correction.

Everything here is plain arithmetic on a handful of constants.  Logs are
natural.  Bounds that come out above 1 (or whose series diverges) are
reported with ``vacuous=True`` rather than clamped.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field, replace
from math import ceil, e, log, sqrt
from typing import Callable, Iterable, Sequence

__all__ = [
    "Bound",
    "BlockPlan",
    "Check",
    "EffectiveRates",
    "LocationBudget",
    "OverheadReport",
    "ProtocolParams",
    "ThresholdConstants",
    "effective_rates",
    "failure_bounds",
    "location_budget",
    "logical_gate_threshold_checks",
    "overhead_report",
    "overhead_table",
    "plan_blocks",
    "threshold_constants",
]


class DivergenceError(ValueError):
    """Raised when p*A >= 1, where post-selected cat preparation never succeeds."""


@dataclass(frozen=True)
class ProtocolParams:
    r: int
    c: int
    A: int  # fallible locations per cat preparation
    l: int  # time steps per syndrome measurement
    p: float
    r_prime: int = 0  # cat + test qubits per generator (defaults to r + 1)
    s: int = 1
    B: float = 0.0
    R: float = 1.0
    eta: float = 2.0
    eps: float = 1e-3
    alpha: float = 0.5
    beta: float = 0.5
    a: float = 3.0  # polylog exponent of the gate-ancilla footprint, a free choice
    C: float = 100.0  # its prefactor (also a free choice)
    omega: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("s must be >= 1")
        if not self.eta > 1:
            raise ValueError("eta must exceed 1")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0 <= self.p <= 1 or not 0 < self.eps <= 1:
            raise ValueError("p and eps must be probabilities")
        if self.r < 1 or self.c < 1:
            raise ValueError("r and c must be positive")

    @property
    def z(self) -> int:
        return (self.r - 1) * self.c

    @property
    def z_prime(self) -> int:
        return self.z + 2 * self.c

    @property
    def cat_qubits(self) -> int:
        return self.r_prime or self.r + 1

    @classmethod
    def from_dict(cls, d: dict) -> "ProtocolParams":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown parameters: {sorted(extra)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


def _post_selection(p: float, A: float) -> float:
    pa = p * A
    if pa >= 1:
        raise DivergenceError(f"p*A = {pa} >= 1: cat preparation never passes")
    return 1.0 - pa


# -- effective rates ---------------------------------------------------------------


@dataclass(frozen=True)
class EffectiveRates:
    p_P: float
    p_B: float
    p_D: float
    q: float

    def out_of_range(self) -> list[str]:
        return [k for k, v in asdict(self).items() if not 0 <= v <= 1]


def effective_rates(params: ProtocolParams) -> EffectiveRates:
    """Per-qubit data, direct syndrome, and phenomenological rates for Shor EC."""
    p, A, c, r = params.p, params.A, params.c, params.r
    ok = _post_selection(p, A)
    p_P = (c * A / ok + c + params.s * params.l) * p
    p_B = (A / ok + 3 * r) * p
    if p_B >= 1:
        p_D = float("inf")
        q = float("inf")
    else:
        p_D = sqrt(p_P) / (1 - p_B)
        q = max(2 * p_P ** (1 / (c + 1)), 2 * p_B / (1 - p_B))
    return EffectiveRates(p_P, p_B, p_D, q)


# -- thresholds ----------------------------------------------------------------------


@dataclass(frozen=True)
class ThresholdConstants:
    r: int
    c: int
    z: int
    z_prime: int
    p0_static: float  # single-shot decoding threshold
    p_f: float  # p0 for repeated measurement
    p_i: float  # threshold for clusters with initialization errors
    p1: float
    p2: float

    @property
    def p0(self) -> float:
        return self.p_f


def threshold_constants(r: int, c: int) -> ThresholdConstants:
    if r < 2 or c < 1:
        raise ValueError("need r >= 2 and c >= 1")
    z = (r - 1) * c
    zp = z + 2 * c
    p1 = (192 * zp**5 * e**6) ** -2
    return ThresholdConstants(
        r=r,
        c=c,
        z=z,
        z_prime=zp,
        p0_static=(2 * z * e) ** -2,
        p_f=(2 * zp * e) ** -4,
        p_i=(2 * zp * e) ** -2,
        p1=p1,
        p2=p1,
    )


@dataclass(frozen=True)
class Bound:
    value: float
    vacuous: bool
    formula: str

    def to_dict(self) -> dict:
        return {"value": self.value, "vacuous": self.vacuous, "formula": self.formula}


def _geometric(prefactor: float, ratio_root: float, ratio: float, power: float, formula: str) -> Bound:
    # prefactor / (1 - ratio_root) * ratio**power, valid only when ratio_root < 1
    if ratio_root >= 1:
        return Bound(float("inf"), True, formula)
    val = prefactor / (1 - ratio_root) * ratio**power
    return Bound(val, val > 1, formula)


def failure_bounds(
    n: int,
    d: int,
    p: float,
    constants: ThresholdConstants,
    *,
    q: float | None = None,
    p_init: float | None = None,
    T: int | None = None,
    k: int = 0,
) -> dict[str, Bound]:
    """Cluster-counting bounds on the logical failure probability.

    ``static`` is the single-shot bound.  The four ``st_*`` entries cover
    the repeated-measurement cases: clusters that stay inside the run
    (``interior``), reach the final layer (``final``), contain
    initialization errors (``init``), or span from initialization to the
    final layer (``spanning``).  ``output_rate`` is the per-qubit residual
    rate after a successful cycle.
    """
    q = p if q is None else q
    p_init = p if p_init is None else p_init
    T = d if T is None else T
    z, zp = constants.z, constants.z_prime
    pp = max(p, q)  # p'
    ppp = max(p_init, p, q)  # p''
    n_inner = n * (T - 1) + (n - k) * T
    out = {
        "static": _geometric(
            n / (z * e), 2 * z * e * sqrt(p), p / constants.p0_static, d / 2,
            "n/(ze(1-2ze*sqrt(p))) * (p/p0s)^(d/2)",
        ),
        "st_interior": _geometric(
            n_inner / (zp * e), 2 * zp * e * sqrt(pp), pp / constants.p_i, d / 2,
            "n'/(z'e(1-2z'e*sqrt(p'))) * (p'/p_i)^(d/2), n'=n(T-1)+(n-k)T",
        ),
        "st_final": _geometric(
            n / (zp * e), 2 * zp * e * pp**0.25, pp / constants.p_f, d / 4,
            "n/(z'e(1-2z'e*p'^(1/4))) * (p'/p_f)^(d/4)",
        ),
        "st_init": _geometric(
            n / (zp * e), 2 * zp * e * sqrt(ppp), ppp / constants.p_i, d / 2,
            "n/(z'e(1-2z'e*sqrt(p''))) * (p''/p_i)^(d/2)",
        ),
        "st_spanning": _geometric(
            n * (ppp / constants.p_f) ** 0.25 / (zp * e), 2 * zp * e * ppp**0.25, ppp / constants.p_f, T / 2,
            "n(p''/p_f)^(1/4)/(z'e(1-2z'e*p''^(1/4))) * (p''/p_f)^(T/2)",
        ),
    }
    out_rate = 4 * zp * e**2 * sqrt(pp)
    out["output_rate"] = Bound(out_rate, out_rate >= constants.p_f / 3, "4z'e^2*sqrt(p') vs p0/3")
    return out


@dataclass(frozen=True)
class Check:
    holds: bool
    lhs: float
    rhs: float
    expr: str

    def to_dict(self) -> dict:
        return asdict(self)


def logical_gate_threshold_checks(
    p: float,
    p0: float,
    B: float,
    rates: EffectiveRates | None = None,
    constants: ThresholdConstants | None = None,
) -> dict[str, Check]:
    """Strict inequalities a physical rate must satisfy for logical gates
    (and, when rates and constants are given, for the EC inputs)."""
    cnot = 2 * p0 / 3 + (B + 4) * p
    magic = p0 / 3 + 2 * (B + 4) * p
    out = {
        "cnot": Check(cnot < p0, cnot, p0, "2p0/3 + (B+4)p < p0"),
        "pi8": Check(magic < p0, magic, p0, "p0/3 + 2(B+4)p < p0"),
    }
    if rates is not None and constants is not None:
        out["data_rate"] = Check(rates.p_D < constants.p1, rates.p_D, constants.p1, "p_D < p1")
        out["syndrome_rate"] = Check(rates.q < constants.p2, rates.q, constants.p2, "q < p2")
    return out


# -- locations ---------------------------------------------------------------------


@dataclass(frozen=True)
class LocationBudget:
    per_cycle: float
    T: int
    gate_ancilla_term: str  # order term only; its coefficient is a free choice
    per_logical_location: str


def location_budget(params: ProtocolParams, n_i: int, k_i: int, T: int) -> LocationBudget:
    """Locations per EC cycle: T[s l n + (n-k)(A/(1-Ap) + 2r)]."""
    ok = _post_selection(params.p, params.A)
    per = T * (params.s * params.l * n_i + (n_i - k_i) * (params.A / ok + 2 * params.r))
    return LocationBudget(
        per_cycle=per,
        T=T,
        gate_ancilla_term=f"O({n_i} polylog({n_i}/eps0))",
        per_logical_location=f"O(s*T*n + n polylog(n f(k)/eps)) with s={params.s}, T={T}, n={n_i}",
    )


# -- block planning ----------------------------------------------------------------


@dataclass
class BlockPlan:
    feasible: bool
    i: int | None = None
    n_i: int | None = None
    k_i: int | None = None
    M: int | None = None
    lower_bound: float = 0.0  # k^alpha
    upper_bound: float = 0.0  # (k/R) log(3kf/(R eps))^-(a+1)
    in_window: dict = field(default_factory=dict)
    data_qubits: float = 0.0
    ec_qubits: float = 0.0
    gate_qubits: float = 0.0
    qubit_total: float = 0.0
    budget: float = 0.0  # eta k / R
    overhead: float = 0.0
    violated: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _family_members(family) -> list[tuple[int, int]]:
    if hasattr(family, "n") and hasattr(family, "k") and not isinstance(family, (list, tuple)):
        return list(zip(family.n, family.k))
    return [(int(a), int(b)) for a, b in family]


def plan_blocks(
    k: int,
    family,
    f_locations: float | Callable[[int], float],
    eps: float,
    alpha: float,
    params: ProtocolParams,
) -> BlockPlan:
    """Pick the block size: the first family member with n_i > k^alpha.

    ``family`` is a sequence of ``(n_i, k_i)`` pairs (or an object with
    ``n`` and ``k`` lists) in increasing size.  The plan reports the
    window test, the realized qubit count (data, EC ancillas staggered over
    s, and the gate-ancilla footprint ``C n (log(n/eps0))^a``), and which
    named bounds fail.
    """
    members = _family_members(family)
    if not members:
        raise ValueError("empty code family")
    f = f_locations(k) if callable(f_locations) else float(f_locations)
    R, a = params.R, params.a
    lower = k**alpha
    upper = (k / R) * log(3 * k * f / (R * eps)) ** (-(a + 1))
    budget = params.eta * k / R
    plan = BlockPlan(False, lower_bound=lower, upper_bound=upper, budget=budget)
    idx = next((i for i, (n, _) in enumerate(members) if n > lower), None)
    if idx is None:
        plan.violated.append("lower_window: no n_i > k^alpha")
        return plan
    n_i, k_i = members[idx]
    if k_i < 1:
        plan.violated.append("k_i >= 1")
        return plan
    M = ceil(k / k_i)
    ok = _post_selection(params.p, params.A)
    eps0 = eps / (3 * f)
    plan.i, plan.n_i, plan.k_i, plan.M = idx, n_i, k_i, M
    plan.in_window = {"lower": n_i > lower, "upper": n_i < upper}
    plan.data_qubits = M * n_i
    plan.ec_qubits = M * (n_i - k_i) * params.cat_qubits / (params.s * ok)
    plan.gate_qubits = params.C * n_i * log(n_i / eps0) ** a
    plan.qubit_total = plan.data_qubits + plan.ec_qubits + plan.gate_qubits
    plan.overhead = plan.qubit_total / k
    if not plan.in_window["upper"]:
        plan.violated.append("upper_window: n_i < (k/R) log(3kf/(R eps))^-(a+1)")
    if M * k_i > k * (1 + params.lam):
        plan.violated.append("packing: M k_i <= k(1+lambda)")
    if plan.qubit_total > budget:
        plan.violated.append("total_qubits: total <= eta k / R")
    plan.feasible = not plan.violated
    return plan


# -- report ------------------------------------------------------------------------


@dataclass
class OverheadReport:
    rates: EffectiveRates
    constants: ThresholdConstants
    threshold_checks: dict
    locations_per_cycle: float
    locations_total: str
    qubit_total: float | None
    block_plan: BlockPlan | None
    out_of_range: list

    def to_dict(self) -> dict:
        return {
            "rates": asdict(self.rates),
            "constants": asdict(self.constants),
            "threshold_checks": {k: v.to_dict() for k, v in self.threshold_checks.items()},
            "locations_per_cycle": self.locations_per_cycle,
            "locations_total": self.locations_total,
            "qubit_total": self.qubit_total,
            "block_plan": self.block_plan.to_dict() if self.block_plan else None,
            "out_of_range": self.out_of_range,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=float)


def overhead_report(
    params: ProtocolParams,
    n_i: int,
    k_i: int,
    T: int | None = None,
    family: Sequence | None = None,
    k: int | None = None,
    f_locations: float = 1e6,
) -> OverheadReport:
    rates = effective_rates(params)
    const = threshold_constants(params.r, params.c)
    checks = logical_gate_threshold_checks(params.p, const.p0, params.B, rates, const)
    T = T or 1
    budget = location_budget(params, n_i, k_i, T)
    plan = None
    if family is not None and k is not None:
        plan = plan_blocks(k, family, f_locations, params.eps, params.alpha, params)
    total = f"O(f(k) * {budget.per_cycle:.4g} + f(k) n polylog) with f(k)={f_locations:g}"
    return OverheadReport(
        rates=rates,
        constants=const,
        threshold_checks=checks,
        locations_per_cycle=budget.per_cycle,
        locations_total=total,
        qubit_total=plan.qubit_total if plan else None,
        block_plan=plan,
        out_of_range=rates.out_of_range(),
    )


def overhead_table(params: ProtocolParams, over: str, values: Iterable[float], n_i: int, k_i: int, T: int = 1) -> str:
    """CSV sweep of rates, checks and the cycle budget over ``p`` or ``s``."""
    if over not in ("p", "s"):
        raise ValueError("sweep over 'p' or 's'")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([over, "p_P", "p_B", "p_D", "q", "cnot_ok", "pi8_ok", "p_D_ok", "q_ok", "locations_per_cycle"])
    for v in values:
        pv = replace(params, **{over: int(v) if over == "s" else float(v)})
        try:
            rep = overhead_report(pv, n_i, k_i, T)
        except DivergenceError:
            w.writerow([pv.s if over == "s" else v] + ["diverges"] * 9)
            continue
        ch = rep.threshold_checks
        w.writerow(
            [pv.s if over == "s" else v, *(f"{x:.10g}" for x in asdict(rep.rates).values()),
             ch["cnot"].holds, ch["pi8"].holds, ch["data_rate"].holds, ch["syndrome_rate"].holds,
             f"{rep.locations_per_cycle:.10g}"]
        )
    return buf.getvalue()
