import itertools
import json
import math
import random
import time
from pathlib import Path

import pytest

from arion.constraints import (
    build_r1cs, count_plonk, count_r1cs, count_report, generate_witness, is_satisfied, output_values, unsatisfied,
)
from arion.core import (
    CHAINS, Direction, affine_layer, arion_permute, chain_pow, gtds_ccz, gtds_forward,
)
from arion.field import BLS12, BN254
from arion.lab import DENSITY_BOUNDS, DENSITY_PRIMES, density_experiment, exhaustive_bijection_check, lab_params, mds_check
from arion.params import ArionParameters
from arion.security import (
    diff_full_hull_min_weight, gb_solving_bits, kappa_diff_restricted, kappa_diff_trail, kappa_linear_restricted,
    kappa_linear_trail, kappa_truncated_first_round, kappa_truncated_two_round, quotient_dim,
)
from arion.sponge import MerkleTree, arion_hash, merkle_verify, pad

from oracles import naive_matvec

SNAPSHOT = Path(__file__).parent / "snapshots" / "count_flags.json"
floor = math.floor


def _round_trips(p, n, d1, r, count, rng):
    prm = ArionParameters.generate(p, n, d1=d1, r=r)
    assert prm.d2 == 257
    for _ in range(count):
        x = [rng.randrange(p) for _ in range(n)]
        k = [rng.randrange(p) for _ in range(n)]
        assert arion_permute(arion_permute(x, prm, k), prm, k, Direction.INVERSE) == x


# --- 1 -------------------------------------------------------------------------------

@pytest.mark.acceptance(1)
@pytest.mark.parametrize("p", [BLS12, BN254], ids=["bls12", "bn254"])
def test_c1_round_trip_n3_d1_3(p, rng):
    # 3 divides p - 1 for both curves, so x^3 is not a permutation there
    start = time.perf_counter()
    _round_trips(p, 3, 3, 6, 1000, rng)
    assert time.perf_counter() - start < 5


@pytest.mark.acceptance(1)
def test_c1_round_trip_n8_and_bijectivity(rng):
    start = time.perf_counter()
    for p in (BLS12, BN254):
        _round_trips(p, 8, 5, 4, 1000, rng)
    assert exhaustive_bijection_check(lab_params(11, 2, 3, 3, r=3))
    assert time.perf_counter() - start < 10


# --- 2 -------------------------------------------------------------------------------

@pytest.mark.acceptance(2)
@pytest.mark.parametrize("p", [BLS12, BN254], ids=["bls12", "bn254"])
def test_c2_addition_chains(p, rng):
    costs = {d: ch.multiplications for d, ch in CHAINS.items()}
    assert costs == {121: 9, 123: 9, 125: 9, 129: 8, 161: 9, 193: 9, 195: 9, 257: 9}
    for d, ch in CHAINS.items():
        for _ in range(1000):
            x = rng.randrange(p)
            assert chain_pow(x, ch, p) == pow(x, d, p)


# --- 3 -------------------------------------------------------------------------------

@pytest.mark.acceptance(3)
def test_c3_affine_layer_and_mds(rng):
    for n in range(2, 9):
        m = [[(j - i) % n + 1 for j in range(n)] for i in range(n)]
        for _ in range(1000):
            v = [rng.randrange(BN254) for _ in range(n)]
            assert affine_layer(v, None, BN254) == naive_matvec(m, v, BN254)
    for n in (2, 3, 4):
        for p in (131, 10007, BN254):
            assert mds_check(n, p)


# --- 4 -------------------------------------------------------------------------------

def _ccz_holds(x, prm):
    y = gtds_forward(list(x), prm)
    return gtds_ccz(list(x[:-1]) + [y[-1]], prm) == y[:-1] + [x[-1]]


@pytest.mark.acceptance(4)
def test_c4_ccz(bn254_n3, rng):
    for n in (2, 3):
        prm = lab_params(11, n, 3, 3, r=1)
        assert all(_ccz_holds(x, prm) for x in itertools.product(range(11), repeat=n))
    for _ in range(10 ** 4):
        assert _ccz_holds([rng.randrange(BN254) for _ in range(3)], bn254_n3)


# --- 5 -------------------------------------------------------------------------------

@pytest.mark.acceptance(5)
def test_c5_r1cs(p_d1_3, bn254_n3, rng):
    cells = [("arion", 3, 3, 102), ("arion", 4, 3, 126), ("arion", 8, 3, 148), ("poseidon", 3, 3, 216),
             ("poseidon", 3, 5, 240), ("griffin", 3, 3, 96), ("anemoi", 4, 3, 96)]
    for h, n, d, expected in cells:
        assert count_r1cs(h, n, d) == expected
    for n in (3, 4, 8):
        assert len(build_r1cs(ArionParameters.generate(p_d1_3, n))) == count_r1cs("arion", n, 3)
    prm = ArionParameters.generate(p_d1_3, 3)
    for params in (prm, bn254_n3):
        cs = build_r1cs(params)
        assert len(cs) == count_r1cs("arion", 3, params.d1)
        w = generate_witness(cs, [11, 22], params)
        assert is_satisfied(cs, w)
        assert output_values(cs, w) == [arion_hash([11, 22], params)]
        for _ in range(100):
            k = rng.randrange(1, cs.num_vars)
            bad = list(w.assignment)
            bad[k] = (bad[k] + rng.randrange(1, params.p)) % params.p
            assert unsatisfied(cs, bad)


# --- 6 -------------------------------------------------------------------------------

@pytest.mark.acceptance(6)
def test_c6_plonk():
    assert count_plonk("arion", 3, 3, 3) == 147
    assert count_plonk("arion", 3, 4, 5) == 192
    snap = json.loads(SNAPSHOT.read_text())
    assert count_report(snap["d2"]).flags() == snap["flags"]


# --- 7 -------------------------------------------------------------------------------

def _security_cells():
    cells = {}
    for r, N, k in [(3, 60, 153), (2, 120, 222), (1, 250, 241)]:
        cells[f"trail N={N}"] = (floor(kappa_diff_trail(N, 9, r)), k)
    for N, n, r, k in [(250, 3, 6, 121), (250, 4, 5, 113), (250, 6, 5, 49), (60, 3, 6, 35), (60, 6, 5, 15)]:
        cells[f"full hull N={N} n={n}"] = (floor(diff_full_hull_min_weight(N, n, r, 257)[1]), k)
    for r, N, k in [(5, 60, 139), (4, 120, 267), (3, 250, 475)]:
        cells[f"diff restricted N={N}"] = (floor(kappa_diff_restricted(N, r, 257, N / 2)), k)
        cells[f"linear restricted N={N}"] = (floor(kappa_linear_restricted(N, r, 257, N / 2)), k)
    for N, n, M, k in [(250, 3, 250, 475), (120, 3, 120, 215), (60, 4, 100, 107)]:
        cells[f"truncated first N={N}"] = (floor(kappa_truncated_first_round(N, n, 257, M)), k)
    for N, r2, k in [(250, 2, 233), (120, 3, 155), (60, 4, 87)]:
        cells[f"truncated two N={N}"] = (floor(kappa_truncated_two_round(N, r2 + 2, 257, N / 2)), k)
    for N, r, M, k in [(250, 2, 250, 216), (250, 3, 500, 198), (60, 5, 60, 152)]:
        cells[f"linear trail N={N} r={r}"] = (floor(kappa_linear_trail(N, 9, r, M)), k)
    return cells


@pytest.mark.acceptance(7)
def test_c7_security_estimators():
    start = time.perf_counter()
    cells = _security_cells()
    solving = [("arion", 6, 143, 207), ("arionhash", 5, 110, 158)]
    near = [(gb_solving_bits(model, 3, r, 3, 121, 2.0, "probabilistic"), prob,
             gb_solving_bits(model, 3, r, 3, 121, 2.0, "deterministic"), det) for model, r, prob, det in solving]
    elapsed = time.perf_counter() - start
    wrong = {name: v for name, v in cells.items() if v[0] != v[1]}
    assert not wrong, f"cells off: {wrong}"
    for prob, prob_ref, det, det_ref in near:
        assert abs(prob - prob_ref) <= 1 and abs(det - det_ref) <= 1
    assert elapsed < 1


# --- 8 -------------------------------------------------------------------------------

@pytest.mark.acceptance(8)
def test_c8_quotient_dimensions():
    cipher = {35: (2, 3, 7), 49: (2, 5, 7), 175: (3, 3, 7), 343: (3, 5, 7), 875: (4, 3, 7), 1285: (2, 3, 257),
              1799: (2, 5, 257)}
    hashes = {91: (3, 3, 7), 133: (3, 5, 7), 203: (4, 3, 7), 301: (4, 5, 7), 427: (5, 3, 7), 637: (5, 5, 7),
              3341: (3, 3, 257), 4833: (3, 5, 257)}
    collision = {225: (2, 1, 3, 3), 1225: (2, 1, 5, 5), 2401: (2, 1, 5, 7), 8281: (3, 1, 3, 7),
                 17689: (3, 1, 5, 7), 50625: (2, 2, 3, 3), 1521: (3, 1, 3, 3), 9025: (3, 1, 5, 5),
                 7569: (4, 1, 3, 3), 41209: (4, 1, 3, 7)}
    wrong = {}
    for v, (n, d1, d2) in cipher.items():
        if quotient_dim("arion", n, 1, d1, d2) != v:
            wrong[("arion", v)] = quotient_dim("arion", n, 1, d1, d2)
    for v, (n, d1, d2) in hashes.items():
        if quotient_dim("arionhash", n, 1, d1, d2) != v:
            wrong[("arionhash", v)] = quotient_dim("arionhash", n, 1, d1, d2)
    for v, (n, r, d1, d2) in collision.items():
        if quotient_dim("collision", n, r, d1, d2) != v:
            wrong[("collision", v)] = quotient_dim("collision", n, r, d1, d2)
    assert not wrong, f"cells off: {wrong}"


# --- 9 -------------------------------------------------------------------------------

@pytest.mark.acceptance(9)
def test_c9_density_experiment():
    start = time.perf_counter()
    reports = density_experiment(DENSITY_PRIMES, (3,), seeds=5, rounds=2, build_rounds=6)
    assert {r.p for r in reports} == set(DENSITY_PRIMES)
    for rep in reports:
        assert len(rep.seeds) >= 5
        assert rep.min_density >= DENSITY_BOUNDS[rep.p], (rep.p, rep.d1, rep.d2, rep.min_density)
        assert rep.degrees == [3 * (rep.p - 1) - 1] * 5
        assert rep.univariate == [rep.p - 1] * 5
    assert time.perf_counter() - start < 300


# --- 10 ------------------------------------------------------------------------------

@pytest.mark.acceptance(10)
def test_c10_sponge_and_merkle(bn254_n3, rng):
    assert pad([1, 2, 3, 4], 2) == ([1, 2, 3, 4], None)
    assert pad([1, 2, 3], 2) == ([1, 2, 3, 0], 3)
    for length in range(6):
        m = [rng.randrange(BN254) for _ in range(length)]
        assert arion_hash(m, bn254_n3) != arion_hash(m + [0], bn254_n3)

    leaves = [rng.randrange(BN254) for _ in range(8)]
    tree = MerkleTree(leaves, bn254_n3)
    for i, leaf in enumerate(leaves):
        assert merkle_verify(leaf, i, tree.path(i), tree.root, bn254_n3)
    for _ in range(100):
        i = rng.randrange(8)
        leaf, path, root, idx = leaves[i], [list(s) for s in tree.path(i)], tree.root, i
        what = rng.randrange(4)
        delta = rng.randrange(1, BN254)
        if what == 0:
            leaf = (leaf + delta) % BN254
        elif what == 1:
            lvl = rng.randrange(len(path))
            pos = rng.randrange(len(path[lvl]))
            path[lvl][pos] = (path[lvl][pos] + delta) % BN254
        elif what == 2:
            root = (root + delta) % BN254
        else:
            idx = (i + rng.randrange(1, 8)) % 8
        assert not merkle_verify(leaf, idx, path, root, bn254_n3)
