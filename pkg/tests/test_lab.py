import itertools
from dataclasses import replace

import numpy as np
import pytest

from arion.core import arion_pi, circulant
from arion.field import BN254
from arion.lab import (
    DENSITY_BOUNDS, GridTooLarge, density, density_experiment, evaluate_coefficients, evaluate_grid,
    exhaustive_bijection_check, interpolate_pi, interpolate_values, lab_params, mds_check, total_degree,
    univariate_degree, valid_pairs, vandermonde_inverse,
)


@pytest.mark.parametrize("p", [5, 7, 11])
def test_vandermonde_inverse(p):
    v = np.array([[pow(a, k, p) for k in range(p)] for a in range(p)], dtype=np.int64)
    assert ((vandermonde_inverse(p) @ v) % p == np.eye(p, dtype=np.int64)).all()


def test_identity_map_is_monomials():
    p, n = 7, 3
    grid = np.array(list(itertools.product(range(p), repeat=n)), dtype=np.int64).T.reshape((n,) + (p,) * n)
    for i in range(n):
        c = interpolate_values(grid[i], p)
        assert np.count_nonzero(c) == 1 and density(c) == 1 / p ** n
        e = [0] * n
        e[i] = 1
        assert c[tuple(e)] == 1


def test_zero_rounds_is_the_affine_layer():
    prm = lab_params(11, 3, 3, 3, r=2)
    comps = interpolate_pi(prm, 0)
    mat = circulant([1, 2, 3])
    for i, c in enumerate(comps):
        assert np.count_nonzero(c) == 3
        assert [int(c[tuple(int(k == j) for k in range(3))]) for j in range(3)] == mat[i]


@pytest.mark.parametrize("r", [1, 2])
def test_interpolation_reevaluates(r):
    prm = lab_params(11, 2, 3, 3, r=r)
    grid = evaluate_grid(prm)
    for i, c in enumerate(interpolate_pi(prm)):
        assert (evaluate_coefficients(c, 11) == grid[i]).all()
    for x in [(0, 0), (3, 7), (10, 10)]:
        assert [int(grid[i][x]) for i in range(2)] == arion_pi(list(x), prm)


def test_p11_example():
    prm = lab_params(11, 3, 3, 3, r=6)
    comps = interpolate_pi(prm, 2)
    assert min(density(c) for c in comps) >= DENSITY_BOUNDS[11]
    assert max(total_degree(c) for c in comps) == 3 * 10 - 1
    assert max(univariate_degree(c) for c in comps) == 10


def test_degree_bounds_hold():
    prm = lab_params(13, 3, 5, 5, r=6)
    for c in interpolate_pi(prm, 2):
        assert 0 <= density(c) <= 1
        assert total_degree(c) <= 3 * 12 and univariate_degree(c) <= 12


def test_single_component_may_fall_short():
    # the vector degree is a max over components; one component can sit one below
    rep, = density_experiment(primes=(17,), pairs=[(5, 5)])
    assert rep.degrees == [47] * 5
    assert min(min(row) for row in rep.total_degrees) == 46


@pytest.mark.parametrize("p", [13, 19])
def test_density_examples(p):
    for rep in density_experiment(primes=(p,), seeds=2):
        assert rep.min_density >= DENSITY_BOUNDS[p]
        assert rep.degrees == [3 * (p - 1) - 1] * 2


def test_valid_pairs():
    assert valid_pairs(11) == [(3, 3)]
    assert valid_pairs(13) == [(5, 5)]
    assert valid_pairs(17) == [(3, 3), (3, 5), (5, 3), (5, 5)]


def test_report_dict():
    rep, = density_experiment(primes=(11,), pairs=[(3, 3)], seeds=1)
    d = rep.to_dict()
    assert d["rounds_evaluated"] == 2 and d["rounds_built"] == 6 and d["seeds"] == ["density/0"]


def test_grid_guard():
    with pytest.raises(GridTooLarge):
        interpolate_pi(lab_params(1033, 2, 5, 5, r=1))
    with pytest.raises(GridTooLarge):
        exhaustive_bijection_check(lab_params(10007, 2, 5, 5, r=1))


# --- bijection -------------------------------------------------------------------

def test_bijection_p11():
    assert exhaustive_bijection_check(lab_params(11, 2, 3, 3, r=3))


def test_bijection_p5_small_exponents():
    prm = lab_params(5, 2, 3, 3, r=3)
    assert prm.e == 3
    assert exhaustive_bijection_check(prm)


def test_residue_discriminant_breaks_bijection():
    prm = lab_params(11, 2, 3, 3, r=1)
    # g(s) = s^2 - 1 has roots, so distinct inputs can collide
    bad = replace(prm, alpha1=((0,),), alpha2=((10,),))
    assert not exhaustive_bijection_check(bad)


# --- MDS -------------------------------------------------------------------------

@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("p", [131, 10007, BN254])
def test_mds(n, p):
    assert mds_check(n, p)


def test_mds_out_of_range():
    with pytest.raises(ValueError):
        mds_check(5, 10007)
    with pytest.raises(ValueError):
        mds_check(3, 127)
