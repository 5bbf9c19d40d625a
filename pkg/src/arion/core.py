"""The Arion round structure: power-map chains, the triangular GTDS layer, the
circulant affine layer and the keyed permutation built from them.

States are sequences of canonical ints modulo ``params.p``. Every function
returns a fresh list and never mutates its input.
"""

from __future__ import annotations

import enum
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache, partial
from typing import Sequence

from .field import FieldElement, inv_mod
from .params import ArionParameters

try:
    import gmpy2

    def _powmod(b: int, k: int, m: int) -> int:
        return int(gmpy2.powmod(b, k, m))

    def _inv(a: int, m: int) -> int:
        return int(gmpy2.invert(a, m))
except ImportError:  # pragma: no cover
    _powmod = pow
    _inv = inv_mod


class Direction(enum.Enum):
    FORWARD = "forward"
    INVERSE = "inverse"


class InternalInvariant(RuntimeError):
    """Raised when a state is inconsistent with supposedly valid parameters."""


# --- exponent chains ---------------------------------------------------------

@dataclass(frozen=True)
class ExponentChain:
    """Straight-line program computing x**d.

    ``steps`` are ``(dst, a, b)`` triples meaning ``dst = a * b`` over named
    registers; ``"x"`` holds the input and the last ``dst`` is the result.
    """

    d: int
    steps: tuple[tuple[str, str, str], ...]

    @property
    def multiplications(self) -> int:
        return len(self.steps)

    @property
    def output(self) -> str:
        return self.steps[-1][0] if self.steps else "x"

    def exponent(self) -> int:
        """Evaluate the chain on exponents, i.e. symbolically on x."""
        reg = {"x": 1}
        for dst, a, b in self.steps:
            reg[dst] = reg[a] + reg[b]
        return reg[self.output]

    def __post_init__(self):
        if self.exponent() != self.d:
            raise ValueError(f"chain computes x^{self.exponent()}, not x^{self.d}")


def _chain(d: int, spec: str) -> ExponentChain:
    # compact notation: "dst=a*b; ..."
    steps = []
    for part in spec.split(";"):
        dst, rhs = part.strip().split("=")
        a, b = rhs.split("*")
        steps.append((dst.strip(), a.strip(), b.strip()))
    return ExponentChain(d, tuple(steps))


CHAINS = {
    121: _chain(121, "t=x*x; y=t*t; u=y*y; v=u*y; z=v*v; w=z*z; w2=w*w; w3=w2*z; o=w3*x"),
    123: _chain(123, "t=x*x; y=t*x; u=y*y; u2=u*u; z=u2*u2; w=z*z; w2=w*w; w3=w2*z; o=w3*y"),
    125: _chain(125, "t=x*x; t2=t*t; y=t2*x; u=y*y; u2=u*u; z=u2*u2; w=z*z; w2=w*z; o=w2*y"),
    129: _chain(129, "t=x*x; t2=t*t; t3=t2*t2; y=t3*t3; u=y*y; u2=u*u; z=u2*u2; o=z*x"),
    161: _chain(161, "t=x*x; t2=t*t; y=t2*x; u=y*y; u2=u*u; z=u2*u2; w=z*z; w2=w*w; o=w2*x"),
    193: _chain(193, "t=x*x; y=t*x; u=y*y; u2=u*u; u3=u2*u2; z=u3*u3; w=z*z; w2=w*w; o=w2*x"),
    195: _chain(195, "t=x*x; y=t*x; u=y*y; u2=u*u; u3=u2*u2; z=u3*u3; w=z*z; w2=w*w; o=w2*y"),
    257: _chain(257, "t=x*x; t2=t*t; t3=t2*t2; y=t3*t3; u=y*y; u2=u*u; u3=u2*u2; z=u3*u3; o=z*x"),
}


@lru_cache(maxsize=None)
def binary_chain(d: int) -> ExponentChain:
    """Left-to-right square-and-multiply chain for any d >= 1."""
    if d < 1:
        raise ValueError("exponent must be positive")
    steps = []
    cur = "x"
    for k, bit in enumerate(bin(d)[3:]):
        sq = f"s{k}"
        steps.append((sq, cur, cur))
        cur = sq
        if bit == "1":
            m = f"m{k}"
            steps.append((m, cur, "x"))
            cur = m
    return ExponentChain(d, tuple(steps))


def chain_for(d: int) -> ExponentChain:
    """Tabulated chain when there is one, else the binary chain."""
    return CHAINS.get(d) or binary_chain(d)


def chain_pow(x, chain: ExponentChain, p: int | None = None, counter: Counter | None = None):
    """Evaluate ``chain`` at ``x``; ``counter['mul']`` is bumped once per multiplication."""
    if isinstance(x, FieldElement):
        return x.field(chain_pow(x.value, chain, x.field.p, counter))
    reg = {"x": x % p}
    for dst, a, b in chain.steps:
        reg[dst] = reg[a] * reg[b] % p
        if counter is not None:
            counter["mul"] += 1
    return reg[chain.output]


# --- GTDS --------------------------------------------------------------------

def gtds_forward(x: Sequence[int], params: ArionParameters, round_index: int = 0) -> list[int]:
    p, n, d1 = params.p, params.n, params.d1
    a1, a2, b = params.gtds_coefficients(round_index)
    out = [0] * n
    out[-1] = _powmod(x[-1], params.e, p)
    s = (x[-1] + out[-1]) % p
    for i in range(n - 2, -1, -1):
        ss = s * s
        g = ss + a1[i] * s + a2[i]
        h = ss + b[i] * s
        out[i] = (pow(x[i], d1, p) * g + h) % p
        s = (s + x[i] + out[i]) % p
    return out


def gtds_inverse(y: Sequence[int], params: ArionParameters, round_index: int = 0) -> list[int]:
    p, n = params.p, params.n
    a1, a2, b = params.gtds_coefficients(round_index)
    x = [0] * n
    x[-1] = pow(y[-1], params.d2, p)
    s = (x[-1] + y[-1]) % p
    for i in range(n - 2, -1, -1):
        ss = s * s
        g = (ss + a1[i] * s + a2[i]) % p
        if g == 0:
            raise InternalInvariant(f"g_{i + 1} vanished; discriminant is not a non-residue")
        h = ss + b[i] * s
        x[i] = _powmod((y[i] - h) * _inv(g, p) % p, params.d1_inv, p)
        s = (s + x[i] + y[i]) % p
    return x


def gtds_ccz(x: Sequence[int], params: ArionParameters, round_index: int = 0) -> list[int]:
    """The low-degree GTDS whose graph is an affine image of the GTDS graph.

    ``gtds_forward(x) == y`` iff ``gtds_ccz(x[:-1] + [y[-1]]) == y[:-1] + [x[-1]]``.
    """
    p, n, d1 = params.p, params.n, params.d1
    a1, a2, b = params.gtds_coefficients(round_index)
    out = [0] * n
    out[-1] = pow(x[-1], params.d2, p)
    t = (x[-1] + out[-1]) % p
    for i in range(n - 2, -1, -1):
        tt = t * t
        out[i] = (pow(x[i], d1, p) * (tt + a1[i] * t + a2[i]) + tt + b[i] * t) % p
        t = (t + x[i] + out[i]) % p
    return out


def gtds_degrees(n: int, d1: int, e: int) -> list[int]:
    return [2 ** (n - i) * (d1 + e) - d1 for i in range(1, n + 1)]


# --- affine layer ------------------------------------------------------------

def circulant(row: Sequence[int]) -> list[list[int]]:
    n = len(row)
    return [[row[(j - i) % n] for j in range(n)] for i in range(n)]


def affine_layer(v: Sequence[int], c: Sequence[int] | None, p: int) -> list[int]:
    """circ(1, ..., n) v + c with O(n) work."""
    n = len(v)
    sigma = sum(v)
    w = [0] * n
    w[0] = sigma + sum(i * vi for i, vi in enumerate(v))
    for i in range(1, n):
        w[i] = w[i - 1] - sigma + n * v[i - 1]
    if c is None:
        return [wi % p for wi in w]
    return [(wi + ci) % p for wi, ci in zip(w, c)]


def affine_layer_inverse(w: Sequence[int], c: Sequence[int] | None, p: int) -> list[int]:
    """Solve circ(1, ..., n) v + c = w.

    Row sums of the circulant are n(n+1)/2, so sigma = sum(w - c) / (n(n+1)/2);
    consecutive rows then differ by -sigma + n v_{i-1}.
    """
    n = len(w)
    u = list(w) if c is None else [wi - ci for wi, ci in zip(w, c)]
    sigma = sum(u) * inv_mod(n * (n + 1) // 2, p) % p
    n_inv = inv_mod(n, p)
    v = [0] * n
    for i in range(1, n):
        v[i - 1] = (u[i] - u[i - 1] + sigma) * n_inv % p
    v[-1] = (sigma - sum(v[:-1])) % p
    return v


# --- keyed permutation -------------------------------------------------------

def _add(a, b, p):
    return [(x + y) % p for x, y in zip(a, b)]


def _sub(a, b, p):
    return [(x - y) % p for x, y in zip(a, b)]


def _state(x, params):
    if len(x) != params.n:
        raise ValueError(f"state has length {len(x)}, expected {params.n}")
    return [int(v) % params.p for v in x]


def round_function(x: Sequence[int], params: ArionParameters, round_index: int,
                   key: Sequence[int] | None = None) -> list[int]:
    p = params.p
    s = affine_layer(gtds_forward(x, params, round_index), params.round_constants[round_index], p)
    return s if key is None else _add(s, key, p)


def round_inverse(y: Sequence[int], params: ArionParameters, round_index: int,
                  key: Sequence[int] | None = None) -> list[int]:
    p = params.p
    s = list(y) if key is None else _sub(y, key, p)
    return gtds_inverse(affine_layer_inverse(s, params.round_constants[round_index], p), params, round_index)


def arion_permute(x: Sequence, params: ArionParameters, key: Sequence | None = None,
                  direction: Direction = Direction.FORWARD) -> list[int]:
    """Arion with the same key in every round; ``key=None`` gives the unkeyed permutation."""
    p = params.p
    s = _state(x, params)
    k = None if key is None else _state(key, params)
    if Direction(direction) is Direction.FORWARD:
        if k is not None:
            s = _add(s, k, p)
        s = affine_layer(s, None, p)
        for i in range(params.r):
            s = round_function(s, params, i, k)
        return s
    for i in reversed(range(params.r)):
        s = round_inverse(s, params, i, k)
    s = affine_layer_inverse(s, None, p)
    return s if k is None else _sub(s, k, p)


def arion_pi(x: Sequence, params: ArionParameters) -> list[int]:
    return arion_permute(x, params)


def permute_batch(states: Sequence[Sequence], params: ArionParameters, key: Sequence | None = None,
                  direction: Direction = Direction.FORWARD, workers: int | None = None) -> list[list[int]]:
    """Apply the permutation to many states; ``workers > 1`` fans out over processes."""
    fn = partial(arion_permute, params=params, key=key, direction=direction)
    if not workers or workers <= 1 or len(states) < 2:
        return [fn(s) for s in states]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, states, chunksize=max(1, len(states) // (4 * workers))))
