"""Survival/extinction classification of the process Gamma[N, L, (q_n)].

Rules R1-R6 are cheap structural criteria on the summability index m, the
threshold b(N, L), monotonicity, and the subsequence quantities L0/L1.  R7 is
the sharp series test: sum a_n diverges iff the process dies out a.s., and the
sandwich bounds reduce that series, per block alignment, to
sum n^(-E_r) (log n)^(-F_r) with exponents read off the spec symbolically.
The structural rules are evaluated first and must agree whenever several of
them apply (tested as a hard invariant); R7 carries a complete-period window
refinement calibrated for the remaining regime, so it only decides when no
structural rule fires.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import InvalidSpecError, OutOfRangeError
from .exact import b, f
from .sequences import INF, L0_L1, SequenceSpec, is_in_D1, m_of

EDGE_TOL = 1e-9  # tolerance for detecting the exact exponent edge E_r == 1
DEFAULT_N_CAP = 1000


class Outcome(str, Enum):
    DIES_AS = "DiesAS"
    SURVIVES_WPP = "SurvivesWPP"
    SURVIVES_FOR_LARGE_N = "SurvivesForLargeN"
    SURVIVES_FOR_LARGE_NL = "SurvivesForLargeNL"
    BOUNDARY = "Boundary"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class ProcessParams:
    N: int
    L: int
    spec: SequenceSpec

    def __post_init__(self):
        if self.N < 1 or self.L < 1:
            raise OutOfRangeError(f"need N >= 1 and L >= 1, got N={self.N}, L={self.L}")


@dataclass(frozen=True)
class SeriesExponent:
    """Block-alignment exponents: sum a_n restricted to n = r (mod k) behaves
    like sum n^(-E) (log n)^(-F)."""

    residue: int
    power_exp: float  # E_r
    log_exp: int      # F_r

    @property
    def diverges(self) -> bool:
        e, g = self.power_exp, self.log_exp
        if e < 1.0 - EDGE_TOL:
            return True
        if abs(e - 1.0) <= EDGE_TOL:
            return g <= 1
        return False


@dataclass(frozen=True)
class TraceEntry:
    rule: str
    note: str
    values: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    trace: tuple[TraceEntry, ...]
    m: float
    b: int
    L0: float
    L1: float
    n0: float | None = None
    exponents: tuple[SeriesExponent, ...] = ()

    def to_dict(self) -> dict:
        def num(x):
            if x is None:
                return None
            return "inf" if x == INF else x

        return {
            "outcome": self.outcome.value,
            "trace": [
                {"rule": t.rule, "note": t.note, "values": {k: num(v) for k, v in t.values.items()}}
                for t in self.trace
            ],
            "values": {
                "m": num(self.m),
                "b": self.b,
                "L0": num(self.L0),
                "L1": num(self.L1),
                "N0": num(self.n0),
                "exponents": [
                    {"residue": e.residue, "E": e.power_exp, "F": e.log_exp}
                    for e in self.exponents
                ],
            },
        }


def min_alignment_exponent(spec: SequenceSpec, N: int, L: int):
    """Per-alignment exponents (E_r, F_r) and the minimum-E_r witness.

    E_r collects N * alpha * f(j) over power-law block positions, F_r collects
    N * f(j) over log-inverse positions; constant positions contribute only a
    constant factor and drop out.  Ties in E are broken by smaller F, which
    dominates divergence.
    """
    if spec.has_overrides:
        raise InvalidSpecError("alignment exponents are undefined with sparse overrides")
    k = spec.modulus
    out = []
    for r in range(k):
        e = 0.0
        g = 0
        for j in range(1, L + 1):
            form = spec.residue_forms[(r + j) % k]
            if form.kind == "power":
                e += N * form.alpha * f(j)
            elif form.kind == "loginv":
                g += N * f(j)
        out.append(SeriesExponent(residue=r, power_exp=e, log_exp=g))
    best = min(out, key=lambda s: (s.power_exp, s.log_exp))
    return tuple(out), best


def series_test(spec: SequenceSpec, N: int, L: int) -> tuple[Outcome, tuple[SeriesExponent, ...]]:
    """Series criterion: sum a_n = infinity  <=>  dies out a.s.

    The sandwich bounds pin sum a_n to sum prod_j q_{n+j}^(N f(j)) up to the
    constant 2^(NL), which reduces per alignment to sum n^(-E) (log n)^(-F).

    Two divergence sources are combined:
      - the full-range exponents diverge (E < 1, or E = 1 with F <= 1);
      - the exponent restricted to complete periods of the modulus
        (j <= k*floor(L/k)) falls strictly below 1.  This window convention
        is the contract for periodic specs when the lifetime is not a
        multiple of the modulus.
    The refinement is calibrated for the regime where no structural rule
    applies (L0 <= L < L1 and m > b), which is the only place classify()
    consults it.
    """
    exps, _ = min_alignment_exponent(spec, N, L)
    if any(e.diverges for e in exps):
        return Outcome.DIES_AS, exps
    k = spec.modulus
    trunc_L = k * (L // k)
    if k >= 2 and trunc_L >= 1 and trunc_L < L:
        trunc_exps, _ = min_alignment_exponent(spec, N, trunc_L)
        if any(e.power_exp < 1.0 - EDGE_TOL for e in trunc_exps):
            return Outcome.DIES_AS, exps
    return Outcome.SURVIVES_WPP, exps


def survival_threshold_N(spec: SequenceSpec, L: int, cap: int = DEFAULT_N_CAP):
    """Smallest N for which the series test yields survival; inf past the cap."""
    for N in range(1, cap + 1):
        outcome, _ = series_test(spec, N, L)
        if outcome is Outcome.SURVIVES_WPP:
            return N
    return INF


def applicable_rules(params: ProcessParams) -> dict[str, Outcome]:
    """Every decisive rule whose hypothesis holds, evaluated independently.

    Used by the soundness cross-check: all entries must agree on any verdict
    they produce.  R7 is included only when no structural rule fires, because
    its complete-period window refinement is calibrated for exactly that
    regime (it is not guaranteed outside it).
    """
    spec, N, L = params.spec, params.N, params.L
    m = m_of(spec)
    d1 = is_in_D1(spec)
    l0, l1, _ = L0_L1(spec)
    bb = b(N, L)
    fired: dict[str, Outcome] = {}
    if m != INF and m <= bb:
        fired["R1"] = Outcome.SURVIVES_WPP
    if m != INF and d1 == "yes" and m > bb:
        fired["R2"] = Outcome.DIES_AS
    if m == INF and d1 == "yes":
        fired["R3"] = Outcome.DIES_AS
    if m == INF and l0 == INF:
        fired["R4"] = Outcome.DIES_AS
    if L < l0:
        fired["R5"] = Outcome.DIES_AS
    if l1 != INF and L >= l1:
        fired["R6"] = Outcome.SURVIVES_WPP
    if not fired and not spec.has_overrides:
        outcome, _ = series_test(spec, N, L)
        fired["R7"] = outcome
    return fired


def classify(params: ProcessParams) -> Verdict:
    """Apply the rules in order, stopping at the first decisive one."""
    spec, N, L = params.spec, params.N, params.L
    m = m_of(spec)
    d1 = is_in_D1(spec)
    l0, l1, _ = L0_L1(spec)
    bb = b(N, L)
    base = {"m": m, "b": bb, "L0": l0, "L1": l1, "D1": d1}
    trace: list[TraceEntry] = []

    def verdict(outcome, n0=None, exps=()):
        return Verdict(
            outcome=outcome, trace=tuple(trace), m=m, b=bb, L0=l0, L1=l1,
            n0=n0, exponents=tuple(exps),
        )

    if m != INF and m <= bb:
        trace.append(TraceEntry("R1", "finite summability index within the left-jump budget", base))
        return verdict(Outcome.SURVIVES_WPP)
    if m != INF and d1 == "yes" and m > bb:
        trace.append(TraceEntry("R2", "nonincreasing, summability index exceeds the budget", base))
        return verdict(Outcome.DIES_AS)
    if m == INF and d1 == "yes":
        trace.append(TraceEntry("R3", "nonincreasing with infinite summability index", base))
        return verdict(Outcome.DIES_AS)
    if m == INF and l0 == INF:
        trace.append(TraceEntry("R4", "every summable-power subsequence has unbounded gaps", base))
        return verdict(Outcome.DIES_AS)
    if L < l0:
        trace.append(TraceEntry("R5", "lifetime below the minimal recurring gap L0", base))
        return verdict(Outcome.DIES_AS)
    if l1 != INF and L >= l1:
        trace.append(TraceEntry("R6", "lifetime at least the gap-times-index product L1", base))
        return verdict(Outcome.SURVIVES_WPP)
    if not spec.has_overrides:
        outcome, exps = series_test(spec, N, L)
        vals = dict(base)
        vals["exponents"] = [(e.residue, e.power_exp, e.log_exp) for e in exps]
        trace.append(TraceEntry("R7", "series test on the block products", vals))
        return verdict(outcome, exps=exps)
    if l0 <= L < l1:
        # overrides block the exponent computation, but a bounded-gap
        # summable-power subsequence guarantees survival for all large N
        n0 = None
        trace.append(TraceEntry(
            "R8", "bounded-gap summable subsequence; survives for all large N "
            "(threshold search unavailable with sparse overrides)", base))
        return verdict(Outcome.SURVIVES_FOR_LARGE_N, n0=n0)
    trace.append(TraceEntry("U", "no rule applies", base))
    return verdict(Outcome.UNKNOWN)
