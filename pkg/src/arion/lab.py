"""Brute-force experiments over small primes.

Any map F_p^n -> F_p is a unique polynomial in F_p[x_1..x_n]/(x_i^p - x_i).
Its coefficients are recovered from the full value table by applying the
inverse of the p x p Vandermonde matrix along every axis in turn.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .core import arion_pi, circulant
from .field import inv_mod
from .params import ArionParameters

GRID_LIMIT = 10 ** 6
DENSITY_PRIMES = (11, 13, 17, 19, 23)
# observed minimum 2-round density for n = 3 per prime
DENSITY_BOUNDS = {11: 0.82, 13: 0.91, 17: 0.91, 19: 0.92, 23: 0.90}


class GridTooLarge(ValueError):
    pass


def _guard(p: int, n: int):
    if p ** n > GRID_LIMIT:
        raise GridTooLarge(f"p^n = {p ** n} exceeds {GRID_LIMIT}")


def evaluate_grid(params: ArionParameters, rounds: int | None = None) -> np.ndarray:
    """Values of Arion-pi on all of F_p^n; shape (n, p, ..., p), axis k+1 indexed by x_{k+1}."""
    p, n = params.p, params.n
    _guard(p, n)
    prm = params if rounds is None else params.truncated(rounds)
    out = np.empty((p ** n, n), dtype=np.int64)
    for idx, x in enumerate(itertools.product(range(p), repeat=n)):
        out[idx] = arion_pi(list(x), prm)
    return out.T.reshape((n,) + (p,) * n)


def vandermonde_inverse(p: int) -> np.ndarray:
    """V^{-1} mod p for V[a, k] = a^k, a, k = 0..p-1 (with 0^0 = 1)."""
    # Gauss-Jordan on [V | I]
    m = [[pow(a, k, p) for k in range(p)] + [int(a == j) for j in range(p)] for a in range(p)]
    for col in range(p):
        piv = next(r for r in range(col, p) if m[r][col])
        m[col], m[piv] = m[piv], m[col]
        inv = inv_mod(m[col][col], p)
        m[col] = [v * inv % p for v in m[col]]
        for r in range(p):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [(a - f * b) % p for a, b in zip(m[r], m[col])]
    return np.array([row[p:] for row in m], dtype=np.int64)


def interpolate_values(values: np.ndarray, p: int) -> np.ndarray:
    """Coefficient tensor: ``out[k1, ..., kn]`` multiplies x1^k1 ... xn^kn."""
    vinv = vandermonde_inverse(p)
    dtype = np.int64 if p ** 3 < 2 ** 62 else object
    c = values.astype(dtype)
    vinv = vinv.astype(dtype)
    for axis in range(c.ndim):
        c = np.moveaxis(np.tensordot(vinv, c, axes=([1], [axis])) % p, 0, axis)
    return c


def evaluate_coefficients(coeffs: np.ndarray, p: int) -> np.ndarray:
    """Inverse transform: coefficient tensor back to the value table."""
    dtype = np.int64 if p ** 3 < 2 ** 62 else object
    v = np.array([[pow(a, k, p) for k in range(p)] for a in range(p)], dtype=dtype)
    out = coeffs.astype(dtype)
    for axis in range(out.ndim):
        out = np.moveaxis(np.tensordot(v, out, axes=([1], [axis])) % p, 0, axis)
    return out


def interpolate_pi(params: ArionParameters, rounds: int | None = None) -> list[np.ndarray]:
    """One coefficient tensor per output component of Arion-pi (optionally truncated)."""
    grid = evaluate_grid(params, rounds)
    return [interpolate_values(grid[i], params.p) for i in range(params.n)]


def density(coeffs: np.ndarray) -> float:
    return float(np.count_nonzero(coeffs)) / coeffs.size


def total_degree(coeffs: np.ndarray) -> int:
    nz = np.argwhere(coeffs != 0)
    return int(nz.sum(axis=1).max()) if len(nz) else -1


def univariate_degree(coeffs: np.ndarray) -> int:
    """Largest exponent of any single variable."""
    nz = np.argwhere(coeffs != 0)
    return int(nz.max()) if len(nz) else -1


@dataclass
class DensityReport:
    p: int
    n: int
    d1: int
    d2: int
    rounds_evaluated: int
    rounds_built: int
    seeds: list[str]
    densities: list[list[float]] = field(default_factory=list)
    total_degrees: list[list[int]] = field(default_factory=list)
    univariate_degrees: list[list[int]] = field(default_factory=list)

    @property
    def min_density(self) -> float:
        return min(min(row) for row in self.densities)

    @property
    def degrees(self) -> list[int]:
        """Degree of the polynomial vector (largest component degree), per seed."""
        return [max(row) for row in self.total_degrees]

    @property
    def univariate(self) -> list[int]:
        return [max(row) for row in self.univariate_degrees]

    def to_dict(self) -> dict:
        return {"p": self.p, "n": self.n, "d1": self.d1, "d2": self.d2,
                "rounds_evaluated": self.rounds_evaluated, "rounds_built": self.rounds_built,
                "seeds": self.seeds, "min_density": self.min_density, "degrees": self.degrees,
                "univariate": self.univariate, "densities": self.densities,
                "total_degrees": self.total_degrees, "univariate_degrees": self.univariate_degrees}


def valid_pairs(p: int, exps=(3, 5)) -> list[tuple[int, int]]:
    return [(a, b) for a in exps for b in exps if gcd(a, p - 1) == 1 and gcd(b, p - 1) == 1]


def lab_params(p: int, n: int, d1: int, d2: int, r: int = 6, seed: bytes = b"lab") -> ArionParameters:
    """Small-prime parameters; the d1/d2 tables and round minima do not apply here."""
    return ArionParameters.generate(p, n, d2=d2, r=r, d1=d1, seed=seed, unsafe=True, profile128=False)


def _density_case(p, n, d1, d2, seeds, rounds, build_rounds) -> DensityReport:
    labels = [f"density/{s}" for s in range(seeds)]
    rep = DensityReport(p, n, d1, d2, rounds, build_rounds, labels)
    for label in labels:
        prm = lab_params(p, n, d1, d2, build_rounds, label.encode())
        comps = interpolate_pi(prm, rounds)
        rep.densities.append([density(c) for c in comps])
        rep.total_degrees.append([total_degree(c) for c in comps])
        rep.univariate_degrees.append([univariate_degree(c) for c in comps])
    return rep


def density_experiment(primes=DENSITY_PRIMES, ns=(3,), pairs=None, seeds: int = 5, rounds: int = 2,
                       build_rounds: int = 6, workers: int | None = None) -> list[DensityReport]:
    """Density and degrees of the ``rounds``-round prefix of parameters built for ``build_rounds``.

    Seeds are the fixed labels ``density/0`` ... ``density/{seeds-1}``.
    """
    cases = [(p, n, d1, d2, seeds, rounds, build_rounds)
             for p in primes for n in ns for d1, d2 in (pairs or valid_pairs(p))
             if gcd(d1, p - 1) == 1 and gcd(d2, p - 1) == 1]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_density_case, *zip(*cases)))
    return [_density_case(*c) for c in cases]


def exhaustive_bijection_check(params: ArionParameters, rounds: int | None = None) -> bool:
    p, n = params.p, params.n
    _guard(p, n)
    prm = params if rounds is None else params.truncated(rounds)
    seen = {tuple(arion_pi(list(x), prm)) for x in itertools.product(range(p), repeat=n)}
    return len(seen) == p ** n


def _det(m: list[list[int]]) -> int:
    # Laplace expansion; only used for k <= 4
    if len(m) == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _det([row[:j] + row[j + 1:] for row in m[1:]]) for j in range(len(m)))


def mds_check(n: int, p: int) -> bool:
    """Whether every square submatrix of circ(1, ..., n) is nonsingular mod p."""
    if n not in (2, 3, 4):
        raise ValueError("the minor enumeration supports n in {2, 3, 4}")
    if p <= 130:
        raise ValueError("the check is only meaningful for p > 130")
    mat = circulant(list(range(1, n + 1)))
    for k in range(1, n + 1):
        for rows in itertools.combinations(range(n), k):
            for cols in itertools.combinations(range(n), k):
                if _det([[mat[i][j] for j in cols] for i in rows]) % p == 0:
                    return False
    return True


__all__ = [
    "evaluate_grid", "interpolate_values", "evaluate_coefficients", "interpolate_pi", "density", "total_degree",
    "univariate_degree", "DensityReport", "density_experiment", "exhaustive_bijection_check", "mds_check",
    "valid_pairs", "lab_params", "GridTooLarge", "DENSITY_BOUNDS", "DENSITY_PRIMES", "vandermonde_inverse",
]
