"""Parameter sets for the Arion permutation and its sponge.

Constants are derived from a seed with SHAKE-256 in counter mode. The
derivation is versioned (``CONSTANTS_VERSION``); changing any label or the
sampling rule must bump it, otherwise published test vectors silently break.

Transcript, version 1
---------------------
prefix  = b"arion-constants/v1" | u32(len(seed)) | seed | p (big-endian, field width) | u16(n) | u16(r)
chunk_k = SHAKE256(prefix | u16(len(label)) | label | u32(k)).digest(W + 8)   with W = field byte width

A draw for ``label`` takes k = 0, 1, ... until int(chunk_k) < floor(256**(W+8) / p) * p
and returns int(chunk_k) mod p. Labels, in generation order, with ``R`` the
round index (``*`` when coefficients are shared by every round):

* ``alpha1/R/i/a``, ``alpha2/R/i/a`` for branch i = 0..n-2 and attempt a = 0, 1, ...;
  the first attempt whose discriminant alpha1^2 - 4 alpha2 is a non-residue wins
* ``beta/R/i``
* ``rc/R/j`` for round R = 0..r-1 and j = 0..n-1
* ``iv/<name>/j`` for auxiliary capacity vectors (see :func:`derive_vector`)
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, replace
from functools import cached_property
from math import gcd, log2

from .field import BUILTIN_PRIMES, FieldError, NotInvertible, PrimeField, inv_mod

CONSTANTS_VERSION = 1
ALLOWED_D2 = (121, 123, 125, 129, 161, 193, 195, 257)
DEFAULT_SEED = b"ArionHash"
MAX_DRAWS = 1000

# (n, d1) -> (standard, aggressive) rounds for p >= 2**250 at 128-bit security
ROUNDS = {
    (3, 3): (6, 5), (4, 3): (6, 4), (5, 3): (5, 4), (6, 3): (5, 4), (8, 3): (4, 4),
    (3, 5): (6, 4), (4, 5): (5, 4), (5, 5): (5, 4), (6, 5): (5, 4), (8, 5): (4, 4),
}
# the round-number comparison table in the performance section lists 4 here
ROUNDS_HASH_TABLE_OVERRIDES = {(5, 3, "standard"): 4}


class ParameterError(ValueError):
    pass


class ConstantGenerationError(ParameterError):
    pass


class Mode(str, enum.Enum):
    STANDARD = "standard"
    AGGRESSIVE = "aggressive"


class Violation(str, enum.Enum):
    SHAPE = "Shape"
    GCD_D1 = "Gcd(d1)"
    D1_NOT_MINIMAL = "D1NotMinimal"
    GCD_D2 = "Gcd(d2)"
    D2_NOT_ALLOWED = "D2NotAllowed"
    EXPONENT = "Exponent"
    DISCRIMINANT = "Discriminant"
    ROUNDS = "Rounds"
    LINEAR_LAYER = "Singular(L)"

    def __repr__(self):
        return self.value


def select_d1(p: int) -> int:
    if p <= 4:
        raise ParameterError("p must exceed 4")
    d = 2
    while gcd(d, p - 1) != 1:
        d += 1
    return d


def compute_e(d2: int, p: int) -> int:
    return inv_mod(d2, p - 1)


def degree_overflow_factor(p: int, d2: int) -> int:
    """Smallest m with m * e >= p."""
    e = compute_e(d2, p)
    return -(-p // e)


def rounds_for(n: int, d1: int, mode: Mode | str = Mode.STANDARD) -> int:
    try:
        standard, aggressive = ROUNDS[(n, d1)]
    except KeyError:
        raise ParameterError(f"no round number tabulated for n={n}, d1={d1}") from None
    return aggressive if Mode(mode) is Mode.AGGRESSIVE else standard


class _Drawer:
    def __init__(self, p: int, n: int, r: int, seed: bytes):
        self.p = p
        width = (p.bit_length() + 7) // 8
        self.chunk = width + 8
        self.bound = (256 ** self.chunk // p) * p
        self.prefix = (b"arion-constants/v%d" % CONSTANTS_VERSION + len(seed).to_bytes(4, "big") + seed
                       + p.to_bytes(width, "big") + n.to_bytes(2, "big") + r.to_bytes(2, "big"))

    def draw(self, label: str) -> int:
        lab = label.encode()
        head = self.prefix + len(lab).to_bytes(2, "big") + lab
        for k in range(MAX_DRAWS):
            v = int.from_bytes(hashlib.shake_256(head + k.to_bytes(4, "big")).digest(self.chunk), "big")
            if v < self.bound:
                return v % self.p
        raise ConstantGenerationError(f"rejection sampling for {label!r} exceeded {MAX_DRAWS} draws")

    def qnr_pair(self, tag: str) -> tuple[int, int]:
        for a in range(MAX_DRAWS):
            a1 = self.draw(f"alpha1/{tag}/{a}")
            a2 = self.draw(f"alpha2/{tag}/{a}")
            disc = (a1 * a1 - 4 * a2) % self.p
            if disc and pow(disc, (self.p - 1) // 2, self.p) == self.p - 1:
                return a1, a2
        raise ConstantGenerationError(f"no non-residue discriminant for {tag} after {MAX_DRAWS} attempts")


def generate_constants(p: int, n: int, r: int, seed: bytes = DEFAULT_SEED, fresh_per_round: bool = False):
    """Return ``(alpha1, alpha2, beta, round_constants)``, each indexed by round first.

    With shared coefficients every round row of alpha1/alpha2/beta is the same tuple.
    """
    drawer = _Drawer(p, n, r, seed)
    rows = range(r) if fresh_per_round else ["*"]
    a1_rows, a2_rows, b_rows = [], [], []
    for R in rows:
        pairs = [drawer.qnr_pair(f"{R}/{i}") for i in range(n - 1)]
        a1_rows.append(tuple(a for a, _ in pairs))
        a2_rows.append(tuple(b for _, b in pairs))
        b_rows.append(tuple(drawer.draw(f"beta/{R}/{i}") for i in range(n - 1)))
    if not fresh_per_round:
        a1_rows, a2_rows, b_rows = a1_rows * r, a2_rows * r, b_rows * r
    rc = tuple(tuple(drawer.draw(f"rc/{R}/{j}") for j in range(n)) for R in range(r))
    return tuple(a1_rows), tuple(a2_rows), tuple(b_rows), rc


def derive_vector(p: int, n: int, r: int, seed: bytes, name: str, length: int) -> tuple[int, ...]:
    """Auxiliary constant vector (e.g. a domain-separated IV), same transcript as the constants."""
    drawer = _Drawer(p, n, r, seed)
    return tuple(drawer.draw(f"iv/{name}/{j}") for j in range(length))


@dataclass(frozen=True)
class ArionParameters:
    field: PrimeField
    n: int
    r: int
    d1: int
    d2: int
    e: int
    alpha1: tuple[tuple[int, ...], ...]
    alpha2: tuple[tuple[int, ...], ...]
    beta: tuple[tuple[int, ...], ...]
    round_constants: tuple[tuple[int, ...], ...]
    mode: Mode = Mode.STANDARD
    seed: bytes = DEFAULT_SEED
    fresh_per_round: bool = False
    # admits d2 outside ALLOWED_D2, non-minimal d1 and untabulated round numbers (lab use)
    unsafe: bool = False
    profile128: bool = True

    @property
    def p(self) -> int:
        return self.field.p

    @cached_property
    def d1_inv(self) -> int:
        return inv_mod(self.d1, self.p - 1)

    @classmethod
    def generate(cls, p: int | str | PrimeField, n: int, d2: int = 257, r: int | None = None,
                 d1: int | None = None, mode: Mode | str = Mode.STANDARD, seed: bytes = DEFAULT_SEED,
                 fresh_per_round: bool = False, unsafe: bool = False, profile128: bool = True,
                 check: bool = True) -> ArionParameters:
        fld = as_field(p)
        mode = Mode(mode)
        if n < 2:
            raise ParameterError("n must be at least 2")
        d1 = select_d1(fld.p) if d1 is None else d1
        if r is None:
            r = rounds_for(n, d1, mode)
        if r < 1:
            raise ParameterError("need at least one round")
        try:
            e = compute_e(d2, fld.p)
        except NotInvertible:
            raise ParameterError(f"gcd(d2={d2}, p-1) != 1") from None
        a1, a2, b, rc = generate_constants(fld.p, n, r, seed, fresh_per_round)
        params = cls(fld, n, r, d1, d2, e, a1, a2, b, rc, mode, seed, fresh_per_round, unsafe, profile128)
        if check:
            params.check()
        return params

    def check(self) -> ArionParameters:
        problems = validate(self)
        if problems:
            raise ParameterError("invalid parameters: " + ", ".join(v.value for v in problems))
        return self

    def gtds_coefficients(self, round_index: int):
        return self.alpha1[round_index], self.alpha2[round_index], self.beta[round_index]

    def truncated(self, rounds: int) -> ArionParameters:
        """The first ``rounds`` rounds of this exact parameter set."""
        if not 0 <= rounds <= self.r:
            raise ParameterError("cannot truncate beyond the round count")
        return replace(self, r=rounds, alpha1=self.alpha1[:rounds], alpha2=self.alpha2[:rounds],
                       beta=self.beta[:rounds], round_constants=self.round_constants[:rounds])

    # serialization

    def to_dict(self) -> dict:
        fld = self.field
        hx = fld.to_hex
        return {
            "version": CONSTANTS_VERSION,
            "prime": format(self.p, "x"),
            "n": self.n,
            "r": self.r,
            "d1": self.d1,
            "d2": self.d2,
            "e": format(self.e, "x"),
            "mode": self.mode.value,
            "seed": self.seed.hex(),
            "fresh_per_round": self.fresh_per_round,
            "unsafe": self.unsafe,
            "profile128": self.profile128,
            "alpha1": [[hx(v) for v in row] for row in self.alpha1],
            "alpha2": [[hx(v) for v in row] for row in self.alpha2],
            "beta": [[hx(v) for v in row] for row in self.beta],
            "round_constants": [[hx(v) for v in row] for row in self.round_constants],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict, check: bool = True) -> ArionParameters:
        p = int(d["prime"], 16)
        fld = PrimeField(p, check=p not in BUILTIN_PRIMES.values())

        def table(key):
            return tuple(tuple(int(v, 16) for v in row) for row in d[key])

        params = cls(fld, int(d["n"]), int(d["r"]), int(d["d1"]), int(d["d2"]), int(d["e"], 16),
                     table("alpha1"), table("alpha2"), table("beta"), table("round_constants"),
                     Mode(d.get("mode", "standard")), bytes.fromhex(d.get("seed", "")),
                     bool(d.get("fresh_per_round", False)), bool(d.get("unsafe", False)),
                     bool(d.get("profile128", True)))
        if check:
            params.check()
        return params

    @classmethod
    def from_json(cls, text: str, check: bool = True) -> ArionParameters:
        return cls.from_dict(json.loads(text), check)

    @cached_property
    def params_id(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def as_field(p) -> PrimeField:
    if isinstance(p, PrimeField):
        return p
    if isinstance(p, str):
        if p.lower() in BUILTIN_PRIMES:
            return PrimeField.named(p)
        p = int(p, 16)
    return PrimeField(p, check=p not in BUILTIN_PRIMES.values())


def validate(params: ArionParameters) -> list[Violation]:
    out: list[Violation] = []
    p, n = params.p, params.n
    rows_ok = (n >= 2 and params.r >= 1
               and all(len(t) == params.r for t in (params.alpha1, params.alpha2, params.beta, params.round_constants))
               and all(len(row) == n - 1 for t in (params.alpha1, params.alpha2, params.beta) for row in t)
               and all(len(row) == n for row in params.round_constants))
    if not rows_ok:
        out.append(Violation.SHAPE)
    # circ(1..n) is invertible iff p divides neither n nor n(n+1)/2
    if n % p == 0 or (n * (n + 1) // 2) % p == 0:
        out.append(Violation.LINEAR_LAYER)
    if gcd(params.d1, p - 1) != 1 or params.d1 < 2:
        out.append(Violation.GCD_D1)
    elif params.d1 != select_d1(p) and not params.unsafe:
        out.append(Violation.D1_NOT_MINIMAL)
    d2_coprime = gcd(params.d2, p - 1) == 1 and params.d2 >= 2
    if not d2_coprime:
        out.append(Violation.GCD_D2)
    if params.d2 not in ALLOWED_D2 and not params.unsafe:
        out.append(Violation.D2_NOT_ALLOWED)
    # with gcd(d2, p-1) > 1 no exponent can work, and Gcd(d2) already says so
    if d2_coprime and (params.e * params.d2) % (p - 1) != 1:
        out.append(Violation.EXPONENT)
    if rows_ok:
        for a1_row, a2_row in zip(params.alpha1, params.alpha2):
            bad = False
            for a1, a2 in zip(a1_row, a2_row):
                disc = (a1 * a1 - 4 * a2) % p
                if disc == 0 or pow(disc, (p - 1) // 2, p) != p - 1:
                    bad = True
            if bad:
                out.append(Violation.DISCRIMINANT)
                break
    if params.profile128 and not params.unsafe and p >= 2 ** 250 and (n, params.d1) in ROUNDS:
        if params.r < rounds_for(n, params.d1, params.mode):
            out.append(Violation.ROUNDS)
    return out


@dataclass(frozen=True)
class SpongeParameters:
    rate: int
    capacity: int
    output_len: int = 1
    iv: tuple[int, ...] | None = None
    # replaces the tail of the IV when the message had to be padded
    iv_prime: tuple[int, ...] | None = None
    kappa: int = 128

    @property
    def width(self) -> int:
        return self.rate + self.capacity

    def initial_value(self) -> tuple[int, ...]:
        return tuple(self.iv) if self.iv is not None else (0,) * self.capacity

    def padded_tail(self) -> tuple[int, ...]:
        return tuple(self.iv_prime) if self.iv_prime is not None else (0,) * (self.capacity - 1)


# the sponge bound reads p**(c/2) >= 2**kappa; a 254-bit prime with c = 1 gives
# 2**127, which the parameter tables treat as meeting 128 bits
SPONGE_TOLERANCE_BITS = 3


def validate_sponge(p: int, sponge: SpongeParameters, n: int | None = None,
                    tolerance_bits: float = SPONGE_TOLERANCE_BITS) -> list[str]:
    out = []
    if sponge.rate < 1 or sponge.capacity < 1:
        out.append("rate and capacity must be positive")
    if n is not None and sponge.width != n:
        out.append(f"rate + capacity = {sponge.width} != n = {n}")
    if sponge.output_len < 1 or sponge.output_len > max(sponge.rate, 1):
        out.append("output length must lie in [1, rate]")
    if sponge.iv is not None and len(sponge.iv) != sponge.capacity:
        out.append("IV length must equal the capacity")
    if sponge.iv_prime is not None and len(sponge.iv_prime) != sponge.capacity - 1:
        out.append("IV' length must equal capacity - 1")
    bits = log2(p)
    target = sponge.kappa - tolerance_bits
    if sponge.rate * bits < target:
        out.append(f"rate too small for {sponge.kappa}-bit security")
    if sponge.capacity * bits / 2 < target:
        out.append(f"capacity too small for {sponge.kappa}-bit security")
    return out


# Built-in profiles used by the vector bundle and the command line
PROFILES = {
    "bn254_n3_d1-5_d2-257": dict(p="bn254", n=3, d2=257),
    "bls12_n3_d1-5_d2-257": dict(p="bls12", n=3, d2=257),
    "bn254_n5_d1-5_d2-257": dict(p="bn254", n=5, d2=257),
    "bls12_n4_d1-5_d2-257_aggressive": dict(p="bls12", n=4, d2=257, mode="aggressive"),
}


def profile(name: str) -> ArionParameters:
    try:
        kw = PROFILES[name]
    except KeyError:
        raise ParameterError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}") from None
    return ArionParameters.generate(**kw)


def default_sponge(params: ArionParameters, capacity: int = 1, output_len: int = 1) -> SpongeParameters:
    return SpongeParameters(rate=params.n - capacity, capacity=capacity, output_len=output_len)


__all__ = [
    "ALLOWED_D2", "ROUNDS", "ArionParameters", "SpongeParameters", "Mode", "Violation", "ParameterError",
    "ConstantGenerationError", "select_d1", "compute_e", "degree_overflow_factor", "rounds_for",
    "generate_constants", "derive_vector", "validate", "validate_sponge", "profile", "PROFILES",
    "default_sponge", "FieldError",
]
