import itertools

import numpy as np
import pytest

from qsplit.baselines import (
    LnlsConfig,
    flip_deltas,
    k_opt,
    k_opt_run,
    lnls_constant,
    lnls_run,
    lnls_subproblem,
    pair_deltas,
)
from qsplit.ising import IsingModel, energy, flip
from qsplit.instances import reg_ground_state, reg_instance
from qsplit.subsolver import BruteForceSampler, brute_force_solve
from qsplit.trace import is_nonincreasing

from conftest import random_model


def test_lnls_full_set_is_full_problem(rng):
    m = random_model(rng, 6)
    B, c = lnls_subproblem(m, np.ones(6), np.arange(6))
    np.testing.assert_array_equal(B, m.A)
    np.testing.assert_array_equal(c, m.b)


def test_lnls_hand_sum():
    A = np.zeros((3, 3))
    A[0, 1] = A[1, 0] = 1.0
    b = np.array([0.5, 0.0, 0.0])
    _, c = lnls_subproblem(IsingModel(A, b), np.ones(3), [0])
    assert c[0] == 0.5 + 2


def test_lnls_objective_plus_constant_is_energy(rng):
    for _ in range(200):
        n = int(rng.integers(2, 12))
        m = random_model(rng, n, diag=True)
        s_prev = rng.choice([-1.0, 1.0], size=n)
        J = np.sort(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
        B, c = lnls_subproblem(m, s_prev, J)
        sJ = rng.choice([-1.0, 1.0], size=J.size)
        s = s_prev.copy()
        s[J] = sJ
        assert sJ @ B @ sJ + c @ sJ + lnls_constant(m, s_prev, J) == pytest.approx(energy(m, s), abs=1e-9)


def test_lnls_m_equals_n_one_iteration(rng):
    m = random_model(rng, 8)
    state, trace = lnls_run(m, LnlsConfig(m=8, maxiter=1, seed=1), BruteForceSampler())
    assert state.best_energy == pytest.approx(brute_force_solve(m.A, m.b)[1] + m.offset)
    assert trace.solver_calls == 1


def test_lnls_m_one_is_single_variable_argmin(rng):
    m = random_model(rng, 6)
    state, trace = lnls_run(m, LnlsConfig(m=1, maxiter=40, seed=2), BruteForceSampler())
    energies = [r.energy for r in trace]
    assert is_nonincreasing(energies)


def test_lnls_exact_monotone(rng):
    for seed in range(5):
        m = random_model(rng, 10)
        _, trace = lnls_run(m, LnlsConfig(m=4, maxiter=30, seed=seed), BruteForceSampler())
        assert is_nonincreasing([r.energy for r in trace])


def _reg20_lnls_hits():
    m = reg_instance(20).model
    e_opt = reg_ground_state(20)[1]
    return sum(
        lnls_run(m, LnlsConfig(m=10, maxiter=30, seed=seed), BruteForceSampler())[0].best_energy <= e_opt + 1e-9
        for seed in range(10)
    )


def test_lnls_reg20_regression():
    # frozen: the other four seeds end in the mirrored state -s_opt
    assert _reg20_lnls_hits() == 6


@pytest.mark.xfail(strict=True, reason="iterates can lock onto the mirrored ground state -s_opt")
def test_lnls_reg20_reaches_oracle_on_eight_of_ten():
    assert _reg20_lnls_hits() >= 8


def test_reg20_mirror_state_traps_half_subsets():
    m = reg_instance(20).model
    s_opt, _ = reg_ground_state(20)
    rng = np.random.default_rng(0)
    for _ in range(50):
        J = np.sort(rng.choice(20, size=10, replace=False))
        B, c = lnls_subproblem(m, -s_opt, J)
        np.testing.assert_array_equal(brute_force_solve(B, c)[0], -s_opt[J])


def test_lnls_config_errors(rng):
    m = random_model(rng, 4)
    with pytest.raises(ValueError):
        lnls_run(m, LnlsConfig(m=5))
    with pytest.raises(ValueError):
        lnls_run(m, LnlsConfig(m=0))


def test_flip_and_pair_deltas(rng):
    m = random_model(rng, 7, diag=True)
    s = rng.choice([-1.0, 1.0], size=7)
    e = energy(m, s)
    d1 = flip_deltas(m, s)
    d2 = pair_deltas(m, s)
    for i in range(7):
        assert d1[i] == pytest.approx(energy(m, flip(s, i)) - e)
        for j in range(i + 1, 7):
            assert d2[i, j] == pytest.approx(energy(m, flip(flip(s, i), j)) - e)


def test_k_opt_at_optimum_unchanged(rng):
    m = random_model(rng, 8)
    s_opt, _ = brute_force_solve(m.A, m.b)
    for k in (1, 2):
        s, trace = k_opt(m, s_opt, k)
        np.testing.assert_array_equal(s, s_opt)
        assert trace.solver_calls == 0


def test_k_opt_ferromagnet():
    m = IsingModel(np.array([[0.0, -1.0], [-1.0, 0.0]]), np.zeros(2))
    s, _ = k_opt(m, [1, -1], 1)
    assert energy(m, s) == -2


def _no_improving_neighbor(m, s, k):
    e = energy(m, s)
    for r in range(1, k + 1):
        for idx in itertools.combinations(range(m.n), r):
            t = s.copy()
            t[list(idx)] *= -1
            if energy(m, t) < e - 1e-12:
                return False
    return True


def test_k_opt_local_optimality(rng):
    for _ in range(20):
        n = int(rng.integers(2, 11))
        m = random_model(rng, n)
        start = rng.choice([-1.0, 1.0], size=n)
        s1, t1 = k_opt(m, start, 1)
        s2, t2 = k_opt(m, start, 2)
        assert _no_improving_neighbor(m, s1, 1)
        assert _no_improving_neighbor(m, s2, 2)
        assert is_nonincreasing([r.energy for r in t1])
        assert is_nonincreasing([r.energy for r in t2])


def test_k_opt_max_scans_and_errors(rng):
    m = random_model(rng, 30)
    _, trace = k_opt(m, np.ones(30), 1, max_scans=2)
    assert trace.solver_calls <= 2
    with pytest.raises(ValueError):
        k_opt(m, np.ones(30), 3)


def test_k_opt_run_seeded(rng):
    m = random_model(rng, 12)
    a, ta = k_opt_run(m, 2, seed=4)
    b, tb = k_opt_run(m, 2, seed=4)
    np.testing.assert_array_equal(a.s_current, b.s_current)
    assert [r.energy for r in ta] == [r.energy for r in tb]
