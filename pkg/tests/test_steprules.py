import numpy as np
import pytest

from fomcert import engine
from fomcert.engine import PROX_POINT, init, propose
from fomcert.problems import make_instance
from fomcert.steprules import (
    BacktrackFailed,
    BacktrackSmooth,
    BacktrackUniversal,
    _condition_holds,
    amgm_check,
    backtrack,
    cg_theta,
    step_ratio_bound,
    linesearch_cg,
    maximal_t_sequence,
    t_from_theta,
    theta_from_history,
)

from conftest import quadratic_1d


def test_theta_t_correspondence():
    assert theta_from_history(1.0, 0.0) == 1.0
    assert theta_from_history(1.0, 1.0) == 0.5
    assert abs(t_from_theta(0.5, 1.0) - 1.0) <= 1e-15
    assert abs(t_from_theta(2.0 / 3.0, 1.0) - 2.0) <= 1e-15
    rng = np.random.default_rng(0)
    for _ in range(100):
        theta = float(rng.uniform(0.01, 0.99))
        T = float(rng.uniform(0.1, 10.0))
        assert abs(theta_from_history(t_from_theta(theta, T), T)
                   - theta) <= 1e-14
    with pytest.raises(ValueError):
        theta_from_history(0.0, 1.0)
    with pytest.raises(ValueError):
        t_from_theta(1.0, 1.0)
    with pytest.raises(ValueError):
        t_from_theta(0.0, 1.0)


def test_theta_recurrence_for_unit_steps():
    # t = (1,1,1): theta_2/t_2 = (1 - theta_2) theta_1/t_1, i.e. 1/3 = (2/3)(1/2).
    t1 = theta_from_history(1.0, 1.0)
    t2 = theta_from_history(1.0, 2.0)
    assert abs(t2 / 1.0 - (1.0 - t2) * t1 / 1.0) <= 1e-15


def test_cg_theta_examples():
    assert cg_theta(0, 1.0) == 1.0
    assert cg_theta(2, 1.0) == 0.5  # the classic 2/(k+2)
    assert abs(cg_theta(3, 0.5) - 1.0 / 3.0) <= 1e-15


def test_step_ratio_bound_examples():
    assert step_ratio_bound(0, 2.0, 1.0) == 1.0
    assert abs(step_ratio_bound(2, 2.0, 1.0) - 0.25) <= 1e-15


def test_amgm_examples():
    assert amgm_check(1.0, 1.0, 0.3, 0.7)
    # a=1, b=2+nu with nu=1, alpha=1, beta=1: 3 <= (5/2)^2 = 6.25.
    assert amgm_check(1.0, 3.0, 1.0, 1.0)
    assert amgm_check(4.0, 1.0, 1.0, 1.0)
    rng = np.random.default_rng(1)
    for _ in range(200):
        a, b = rng.uniform(0.1, 5.0, 2)
        alpha, beta = rng.uniform(0.0, 3.0, 2)
        if alpha + beta == 0.0:
            continue
        assert amgm_check(a, b, alpha, beta)
    with pytest.raises(ValueError):
        amgm_check(-1.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        amgm_check(1.0, 1.0, 0.0, 0.0)


def test_backtrack_halves_to_inverse_curvature(quad1d):
    # Condition holds iff t <= 1/L = 1; from t_init=4, r=2 the grid accepts 1.
    state = init(quad1d)
    rule = BacktrackSmooth(r=2.0, t_init=4.0)
    trial, probe_failed = backtrack(state, quad1d, PROX_POINT, rule)
    assert abs(trial.t - 1.0) <= 1e-15
    assert probe_failed


def test_backtrack_grows_to_inverse_curvature(quad1d):
    state = init(quad1d)
    rule = BacktrackSmooth(r=2.0, t_init=0.25)
    trial, probe_failed = backtrack(state, quad1d, PROX_POINT, rule)
    assert abs(trial.t - 1.0) <= 1e-15
    assert probe_failed


def test_backtrack_r_large_pair_property():
    # Accepted t passes its condition while t*r fails, re-evaluated explicitly.
    inst = make_instance("lasso", seed=0)
    state = init(inst)
    rule = BacktrackSmooth(r=2.0, t_init=1.0)
    prev_t = None
    for _ in range(10):
        trial, probe_failed = backtrack(state, inst, PROX_POINT, rule,
                                        t_start=prev_t)
        assert _condition_holds(propose(state, inst, PROX_POINT, trial.t), 0.0)
        if probe_failed:
            rejected = propose(state, inst, PROX_POINT, trial.t * rule.r)
            assert not _condition_holds(rejected, 0.0)
        engine.commit(state, inst, trial)
        prev_t = trial.t


def test_universal_large_eps_accepts_without_halving(quad1d):
    state = init(quad1d)
    rule = BacktrackUniversal(eps=100.0, r=2.0, t_init=4.0)
    trial, _ = backtrack(state, quad1d, PROX_POINT, rule)
    assert trial.t >= 4.0  # first candidate passed; only growth from there


def test_backtrack_failure_diagnostic():
    inst = quadratic_1d(curvature=1e12)
    state = init(inst)
    rule = BacktrackSmooth(r=2.0, t_init=1.0, max_halvings=5)
    with pytest.raises(BacktrackFailed):
        backtrack(state, inst, PROX_POINT, rule)


def test_backtrack_survives_domain_failures_on_probes():
    # Entropy prox underflows for huge trial steps; the probe must count as
    # a failed condition instead of aborting the run.
    inst = make_instance("simplex-quadratic", seed=0)
    state = init(inst)
    rule = BacktrackSmooth(r=2.0, t_init=1e6)
    trial, _ = backtrack(state, inst, PROX_POINT, rule)
    assert np.all(trial.s > 0.0)
    assert _condition_holds(trial, 0.0)


def test_backtrack_rejects_bad_ratio(quad1d):
    with pytest.raises(ValueError):
        backtrack(init(quad1d), quad1d, PROX_POINT, BacktrackSmooth(r=1.0))


def test_linesearch_quadratic_example():
    # phi(theta) = (1-theta)*2 + 2 theta^2, minimized at theta = 0.5.
    inst = quadratic_1d()
    from fomcert.oracles import BoxIndicator, ProblemInstance
    from fomcert.reference import ZeroReference
    box = ProblemInstance(
        A=inst.A, f=inst.f,
        psi=BoxIndicator(np.array([-1.0]), np.array([1.0])),
        h=ZeroReference(), feasible_start=np.array([1.0]))
    x = np.array([1.0])
    s = np.array([-1.0])
    g = box.f.subgradient(box.A.apply(x))
    theta = linesearch_cg(box, x, g, s, cggap=2.0)
    assert abs(theta - 0.5) <= 1e-6


def test_linesearch_flat_objective_deterministic(quad1d):
    x = np.array([0.5])
    g = quad1d.f.subgradient(quad1d.A.apply(x))
    a = linesearch_cg(quad1d, x, g, x, cggap=0.0)
    b = linesearch_cg(quad1d, x, g, x, cggap=0.0)
    assert a == b and 0.0 <= a <= 1.0


@pytest.mark.parametrize("gamma,L", [(1.5, 1.0), (2.0, 1.0), (2.0, 10.0)])
def test_maximal_t_sequence_respects_ratio_bound(gamma, L):
    ts, thetas = maximal_t_sequence(gamma, L, 200)
    assert thetas[0] == 1.0
    for k in range(200):
        # The generating equation (theta^(gamma-1) t = 1/L) holds...
        assert abs(thetas[k] ** (gamma - 1.0) * ts[k] - 1.0 / L) \
            <= 1e-10 / L
        # ...and the closed-form ratio bound dominates theta_k/t_k.
        assert thetas[k] / ts[k] <= step_ratio_bound(k, gamma, L) * (1.0 + 1e-12)
    # theta recurrence holds along the generated sequence.
    T = ts[0]
    for k in range(1, 200):
        lhs = thetas[k] / ts[k]
        rhs = (1.0 - thetas[k]) * thetas[k - 1] / ts[k - 1]
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, rhs)
        T += ts[k]
