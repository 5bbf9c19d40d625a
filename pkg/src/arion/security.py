"""Closed-form security estimates for Arion and ArionHash.

Every estimator returns a real number of bits; reports floor it. ``N`` is the
bit size lower bound of the prime (p >= 2**N) and hull or data budgets ``M``,
``D`` are given in bits unless stated otherwise.

Polynomial models count nv = r(n + 1) variables: the n state variables plus one
auxiliary variable per round. Complexities keep only the dominant term.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

from .params import ArionParameters

OMEGA_RANGE = (2.0, 2.3727)
TARGET_BITS = 128
# exact binomials up to this top argument, entropy approximation beyond
EXACT_BINOMIAL_LIMIT = 10 ** 6


class ProbabilityExceedsOne(ValueError):
    """The bound is vacuous for these inputs (e.g. the input weight is too small)."""


class Kind(str, enum.Enum):
    DIFF_TRAIL = "diff_trail"
    DIFF_FULL_HULL = "diff_full_hull"
    DIFF_RESTRICTED_HULL = "diff_restricted_hull"
    TRUNCATED_FIRST_ROUND = "truncated_first_round"
    TRUNCATED_TWO_ROUND = "truncated_two_round"
    LINEAR_TRAIL = "linear_trail"
    LINEAR_RESTRICTED_HULL = "linear_restricted_hull"
    GB_MIN = "gb_min"
    GB_MACAULAY = "gb_macaulay"
    GB_SOLVE_DET = "gb_solve_det"
    GB_SOLVE_PROB = "gb_solve_prob"
    COLLISION_GB = "collision_gb"


def _omega(omega: float) -> float:
    if not OMEGA_RANGE[0] <= omega <= OMEGA_RANGE[1]:
        raise ValueError(f"omega must lie in {OMEGA_RANGE}, got {omega}")
    return omega


def d2_bits(d2: int) -> int:
    """Smallest b with d2 <= 2**b."""
    return (d2 - 1).bit_length()


# --- statistical attacks -----------------------------------------------------------

def kappa_diff_trail(N: float, bits: float, r: int) -> float:
    return r * (N - bits)


def kappa_diff_full_hull(N: float, n: int, r: int, d2: int, wt: int = 1) -> float:
    k = wt * (N - math.log2(d2)) - (r - 1) * math.log2((d2 + 1) ** n - 1)
    if k <= 0:
        raise ProbabilityExceedsOne(f"hull bound exceeds 1 at input weight {wt}")
    return k


def diff_full_hull_min_weight(N: float, n: int, r: int, d2: int) -> tuple[int, float]:
    """Smallest input weight for which the hull bound is below 1, with its level."""
    for wt in range(1, n + 1):
        try:
            return wt, kappa_diff_full_hull(N, n, r, d2, wt)
        except ProbabilityExceedsOne:
            continue
    raise ProbabilityExceedsOne(f"hull bound exceeds 1 for every weight up to {n}")


def kappa_diff_restricted(N: float, r: int, d2: int, M: float) -> float:
    return r * (N - math.log2(d2)) - (r - 1) * M


def kappa_truncated_first_round(N: float, n: int, d2: int, M: float) -> float:
    return n * (N - math.log2(d2)) - M


def kappa_truncated_two_round(N: float, r: int, d2: int, M: float) -> float:
    return (r - 2) * (N - math.log2(d2) - M)


def kappa_linear_trail(N: float, bits: float, r: int, D: float) -> float:
    """``bits`` bounds log2(d2); ``D`` is log2 of the data amount."""
    return 2 + r * (N - 2 * bits) - D


def kappa_linear_restricted(N: float, r: int, d2: int, M: float) -> float:
    return r * (N - 2 * math.log2(d2 - 1)) - (r - 1) * M


# --- algebraic attacks ---------------------------------------------------------------

def macaulay_bound(n: int, r: int, d1: int, d2: int) -> int:
    return r * (d2 + 2 * (d1 + 1) * (2 ** (n - 1) - 1) - (n - 1) * d1 - n) + 1


def min_solving_degree(n: int, d1: int, d2: int) -> int:
    return max(d2, 2 ** (n - 1) * (d1 + 1) - d1)


def quotient_dim(model: str, n: int, r: int, d1: int, d2: int) -> int:
    if model == "arion":
        return (d2 * (d1 + 2) ** (n - 1)) ** r
    if model == "arionhash":
        return (2 ** (n - 1) * d2 * (d1 + 1) - d1 * d2) ** r
    if model == "collision":
        return quotient_dim("arionhash", n, r, d1, d2) ** 2
    raise ValueError(f"unknown model {model!r}")


def num_variables(model: str, n: int, r: int) -> int:
    nv = r * (n + 1)
    # two preimage systems are glued together for a collision
    return 2 * nv if model == "collision" else nv


def gb_solving_bits(model: str, n: int, r: int, d1: int, d2: int, omega: float = 2.0,
                    flavor: str = "probabilistic") -> float:
    omega = _omega(omega)
    nv = num_variables(model, n, r)
    logd = math.log2(quotient_dim(model, n, r, d1, d2))
    if flavor == "probabilistic":
        return math.log2(nv) + omega * logd
    if flavor == "deterministic":
        return 0.5 * math.log2(nv) + (2 + (nv - 1) / nv) * logd
    raise ValueError(f"unknown flavor {flavor!r}")


def binary_entropy(x: float) -> float:
    if x <= 0 or x >= 1:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def log2_binomial_entropy(n: int, k: int) -> float:
    """log2 C(n, k) from the entropy approximation with its square-root prefactor."""
    if k == 0 or k == n:
        return 0.0
    return 0.5 * math.log2(n / (math.pi * k * (n - k))) + n * binary_entropy(k / n)


def log2_binomial(n: int, k: int) -> float:
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    if n <= EXACT_BINOMIAL_LIMIT:
        return math.log2(math.comb(n, k))
    return log2_binomial_entropy(n, k)


def gb_groebner_bits(n: int, r: int, d1: int, d2: int, omega: float = 2.0, which: str = "min") -> float:
    omega = _omega(omega)
    nv = num_variables("arion", n, r)
    if which == "min":
        d = min_solving_degree(n, d1, d2)
    elif which == "macaulay":
        d = macaulay_bound(n, r, d1, d2)
    else:
        raise ValueError(f"unknown degree choice {which!r}")
    return omega * log2_binomial(nv + d - 1, d)


# --- report ---------------------------------------------------------------------------

@dataclass
class Estimate:
    kind: Kind
    kappa: float
    formula: str
    flags: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def bits(self) -> int:
        return math.floor(self.kappa)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "kappa_bits": self.bits, "kappa": self.kappa,
                "formula_ref": self.formula, "flags": list(self.flags), "notes": list(self.notes)}


@dataclass
class SecurityReport:
    n: int
    r: int
    d1: int
    d2: int
    N: int
    omega: float
    mode: str
    estimates: list[Estimate]

    def __getitem__(self, kind) -> Estimate:
        kind = Kind(kind)
        return next(e for e in self.estimates if e.kind is kind)

    def flagged(self) -> list[Estimate]:
        return [e for e in self.estimates if e.flags]

    def to_dict(self) -> dict:
        return {"n": self.n, "r": self.r, "d1": self.d1, "d2": self.d2, "N": self.N, "omega": self.omega,
                "mode": self.mode, "estimates": [e.to_dict() for e in self.estimates]}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def full_report(params: ArionParameters, omega: float = 2.0, N: int | None = None,
                model: str = "arionhash", target: int = TARGET_BITS) -> SecurityReport:
    """Evaluate every estimator for one parameter set and flag levels below ``target``."""
    omega = _omega(omega)
    n, r, d1, d2 = params.n, params.r, params.d1, params.d2
    N = params.p.bit_length() - 1 if N is None else N
    b = d2_bits(d2)
    half = N / 2
    out: list[Estimate] = []

    def add(kind, fn, formula, notes=()):
        try:
            k, extra = fn(), []
        except ProbabilityExceedsOne as exc:
            k, extra = 0.0, ["probability-exceeds-one", str(exc)]
        notes = list(notes)
        if k < 0:
            # the attack covers every round, or the data budget exceeds the bound
            notes.append(f"raw bound {k:.2f} clamped to 0")
            k = 0.0
        out.append(Estimate(kind, k, formula, extra, notes))

    add(Kind.DIFF_TRAIL, lambda: kappa_diff_trail(N, b, r), "r*(N-ceil(log2 d2))")
    wt_box = {}

    def full_hull():
        wt, k = diff_full_hull_min_weight(N, n, r, d2)
        wt_box["wt"] = wt
        return k

    add(Kind.DIFF_FULL_HULL, full_hull, "wt*(N-log2 d2)-(r-1)*log2((d2+1)^n-1)")
    if "wt" in wt_box:
        out[-1].notes.append(f"input weight {wt_box['wt']}")
    add(Kind.DIFF_RESTRICTED_HULL, lambda: kappa_diff_restricted(N, r, d2, half),
        "r*(N-log2 d2)-(r-1)*M, M=N/2")
    add(Kind.TRUNCATED_FIRST_ROUND, lambda: kappa_truncated_first_round(N, n, d2, N),
        "n*(N-log2 d2)-M, M=N")
    add(Kind.TRUNCATED_TWO_ROUND, lambda: kappa_truncated_two_round(N, r, d2, half),
        "(r-2)*(N-log2 d2-M), M=N/2")
    add(Kind.LINEAR_TRAIL, lambda: kappa_linear_trail(N, b, r, N), "2+r*(N-2*ceil(log2 d2))-log2 D, D=2^N")
    add(Kind.LINEAR_RESTRICTED_HULL, lambda: kappa_linear_restricted(N, r, d2, half),
        "r*(N-2*log2(d2-1))-(r-1)*M, M=N/2")
    convention = "variable and degree convention for this column is unverified"
    add(Kind.GB_MIN, lambda: gb_groebner_bits(n, r, d1, d2, omega, "min"),
        "omega*log2 C(nv+d-1,d), d=max(d2,2^(n-1)(d1+1)-d1)", [convention])
    add(Kind.GB_MACAULAY, lambda: gb_groebner_bits(n, r, d1, d2, omega, "macaulay"),
        "omega*log2 C(nv+d-1,d), d=Macaulay bound", [convention])
    add(Kind.GB_SOLVE_DET, lambda: gb_solving_bits(model, n, r, d1, d2, omega, "deterministic"),
        f"0.5*log2 nv+(2+(nv-1)/nv)*log2 dim [{model}]")
    add(Kind.GB_SOLVE_PROB, lambda: gb_solving_bits(model, n, r, d1, d2, omega, "probabilistic"),
        f"log2 nv+omega*log2 dim [{model}]")
    add(Kind.COLLISION_GB, lambda: gb_solving_bits("collision", n, r, d1, d2, omega, "probabilistic"),
        "log2 nv+omega*log2 dim [collision]")
    for e in out:
        if e.kappa < target:
            e.flags.append(f"below-{target}")
    return SecurityReport(n, r, d1, d2, N, omega, params.mode.value, out)


__all__ = [
    "Kind", "Estimate", "SecurityReport", "ProbabilityExceedsOne", "kappa_diff_trail", "kappa_diff_full_hull",
    "diff_full_hull_min_weight", "kappa_diff_restricted", "kappa_truncated_first_round",
    "kappa_truncated_two_round", "kappa_linear_trail", "kappa_linear_restricted", "macaulay_bound",
    "min_solving_degree", "quotient_dim", "gb_solving_bits", "gb_groebner_bits", "log2_binomial",
    "log2_binomial_entropy", "binary_entropy", "full_report", "d2_bits",
]
