import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsplit.ising import IsingModel, energy
from qsplit.instances import reg_ground_state, reg_instance
from qsplit.subsolver import (
    BruteForceSampler,
    SimulatedAnnealingSampler,
    SolverConfig,
    brute_force_solve,
    masked_couplings,
    read_seeds,
    restricted_sa_solve,
    sa_solve,
    sign_solve,
)
from qsplit.topology import complete_mask, empty_mask, pegasus_mask

from conftest import exhaustive_min, random_model

FAST = SolverConfig(num_reads=20, sweeps=200)


def test_config_validation():
    for kw in ({"num_reads": 0}, {"sweeps": 0}, {"beta_start": 5.0, "beta_end": 1.0}, {"schedule": "cubic"}):
        with pytest.raises(ValueError):
            SolverConfig(**kw)
    b = SolverConfig(sweeps=5).betas()
    assert b[0] == pytest.approx(0.1) and b[-1] == pytest.approx(10.0) and np.all(np.diff(b) > 0)


def test_decoupled_signs():
    np.testing.assert_array_equal(sa_solve(np.zeros((2, 2)), [3.0, -2.0], FAST), [-1, 1])
    np.testing.assert_array_equal(sign_solve([0.0, 1.0, -1.0]), [1, -1, 1])


def test_ferromagnet():
    B = np.array([[0.0, -1.0], [-1.0, 0.0]])
    s = sa_solve(B, np.zeros(2), FAST)
    assert tuple(s) in {(1.0, 1.0), (-1.0, -1.0)}
    assert s @ B @ s == -2
    s_bf, e_bf = brute_force_solve(B, np.zeros(2))
    np.testing.assert_array_equal(s_bf, [-1, -1])
    assert e_bf == -2


def test_brute_force_single_spin():
    s, e = brute_force_solve(np.zeros((1, 1)), [1.0])
    np.testing.assert_array_equal(s, [-1])
    assert e == -1


def test_brute_force_matches_loop_oracle(rng):
    for n in range(1, 9):
        m = random_model(rng, n, diag=True)
        s, e = brute_force_solve(m.A, m.b)
        s_ref, e_ref = exhaustive_min(m.A, m.b)
        assert e == pytest.approx(e_ref, abs=1e-12)
        np.testing.assert_array_equal(s, s_ref)


def test_brute_force_chunked_path(rng):
    # n > 16 spans several enumeration chunks
    m = random_model(rng, 18)
    s, e = brute_force_solve(m.A, m.b)
    assert e == pytest.approx(s @ m.A @ s + m.b @ s)
    for i in range(18):
        t = s.copy()
        t[i] = -t[i]
        assert t @ m.A @ t + m.b @ t >= e - 1e-12


def test_brute_force_limit():
    with pytest.raises(ValueError):
        brute_force_solve(np.zeros((27, 27)), np.zeros(27))


def test_brute_force_reg10_matches_candidate_scan():
    m = reg_instance(10).model
    s, e = brute_force_solve(m.A, m.b)
    s_ref, e_ref = reg_ground_state(10)
    assert e == pytest.approx(e_ref, abs=1e-12)
    np.testing.assert_array_equal(s, s_ref)


def test_sa_matches_brute_force_on_random_12_spin():
    rng = np.random.default_rng(7)
    cfg = SolverConfig(num_reads=100, sweeps=2000)
    hits = 0
    for seed in range(100):
        m = random_model(rng, 12)
        s = sa_solve(m.A, m.b, SolverConfig(num_reads=cfg.num_reads, sweeps=cfg.sweeps, seed=seed))
        _, e_opt = brute_force_solve(m.A, m.b)
        hits += (s @ m.A @ s + m.b @ s) <= e_opt + 1e-9
    assert hits >= 95


def test_sa_seed_determinism(rng):
    m = random_model(rng, 15)
    a = sa_solve(m.A, m.b, SolverConfig(num_reads=5, sweeps=50, seed=3))
    b = sa_solve(m.A, m.b, SolverConfig(num_reads=5, sweeps=50, seed=3))
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(read_seeds(3, 4), read_seeds(3, 4))
    assert len(set(read_seeds(3, 50).tolist())) == 50


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 20), st.integers(0, 2**32))
def test_sa_spin_domain(n, seed):
    rng = np.random.default_rng(seed)
    m = random_model(rng, n)
    s = sa_solve(m.A, m.b, SolverConfig(num_reads=2, sweeps=10, seed=seed))
    assert s.shape == (n,) and set(np.unique(s)) <= {-1.0, 1.0}


def test_sa_is_single_flip_local_min(rng):
    m = random_model(rng, 30)
    s = sa_solve(m.A, m.b, SolverConfig(num_reads=3, sweeps=20))
    e = energy(m, s)
    for i in range(30):
        t = s.copy()
        t[i] = -t[i]
        assert energy(m, t) >= e - 1e-9


def test_sampler_objects(rng):
    m = random_model(rng, 6)
    np.testing.assert_array_equal(BruteForceSampler().solve(m.A, m.b), brute_force_solve(m.A, m.b)[0])
    sampler = SimulatedAnnealingSampler(FAST)
    np.testing.assert_array_equal(sampler.solve(m.A, m.b, seed=9), sampler.solve(m.A, m.b, seed=9))


def test_shape_errors():
    with pytest.raises(ValueError):
        sa_solve(np.zeros((2, 2)), np.zeros(3))
    with pytest.raises(ValueError):
        brute_force_solve(np.zeros((2, 3)), np.zeros(2))


def test_restricted_complete_mask_equals_full(rng):
    m = random_model(rng, 10)
    s_r, e_r = restricted_sa_solve(m, complete_mask(10), FAST)
    np.testing.assert_array_equal(s_r, sa_solve(m.A, m.b, FAST))
    assert e_r == energy(m, s_r)


def test_restricted_empty_mask_is_sign_rule():
    b = np.array([1.0, -2.0, 0.0, 3.0])
    m = IsingModel(np.ones((4, 4)) - np.eye(4), b)
    s, e = restricted_sa_solve(m, empty_mask(4), FAST)
    np.testing.assert_array_equal(s, [-1, 1, 1, -1])
    assert e == energy(m, s)


def test_restricted_reg48_on_pegasus_bounded_by_oracle():
    m = reg_instance(48).model
    s, e = restricted_sa_solve(m, pegasus_mask(2), SolverConfig(num_reads=10, sweeps=200))
    assert e >= reg_ground_state(48)[1] - 1e-9
    assert e == pytest.approx(energy(m, s))


def test_masked_couplings_support():
    A = np.ones((48, 48))
    M = masked_couplings(A, pegasus_mask(2))
    np.testing.assert_array_equal(M, pegasus_mask(2).dense())
