import numpy as np
import pytest

from pdsplit.core import DimensionError, DualBlock, MatrixOp, ProblemSpec
from pdsplit.metrics import (BoundReport, MissingReferenceError, check_bound_alg2,
                             check_geometric_bound, default_window, fit_rate, rmse)
from pdsplit.prox import make_box
from pdsplit.solvers import ConvergenceLog, SolverConfig, solve


def test_rmse():
    x = np.arange(5.0)
    assert rmse(x, x) == 0.0
    assert rmse(x + 1, x) == pytest.approx(1.0)
    with pytest.raises(DimensionError):
        rmse(np.zeros(2), np.zeros(3))


def test_fit_rate_power_laws():
    n = np.arange(1, 2001)
    assert fit_rate((n, 3.0 / n)).slope == pytest.approx(-1, abs=1e-6)
    assert fit_rate((n, 7.0 / n ** 2)).slope == pytest.approx(-2, abs=1e-6)
    f = fit_rate((n, 0.5 * 0.97 ** n), mode="geometric", window=(10, 500))
    assert f.slope == pytest.approx(np.log(0.97), abs=1e-6)
    assert f.window == (10, 500) and f.samples == 491
    assert "slope=" in f.to_text()


def test_fit_rate_errors():
    n = np.arange(1, 50)
    with pytest.raises(ValueError):
        fit_rate((n, 1.0 / n), window=(1, 5))
    with pytest.raises(ValueError):
        fit_rate((n, np.zeros(n.size)))
    with pytest.raises(ValueError):
        fit_rate((n, 1.0 / n), window=(10, 5))
    with pytest.raises(ValueError):
        fit_rate((n, 1.0 / n), mode="cubic")
    assert default_window(1000) == (100, 1000)


def test_fit_rate_on_log_without_reference():
    log = ConvergenceLog()
    for k in range(1, 30):
        log.append(iter=k)
    with pytest.raises(MissingReferenceError):
        fit_rate(log)


def _scalar_problem():
    # min 1/2 x^2 + |x|, solution (0, 0)
    return ProblemSpec(n=1, prox_f=lambda x, g: np.asarray(x) / (1 + g), rho=1.0,
                       blocks=[DualBlock(make_box(-1.0, 1.0), MatrixOp(np.eye(1)))])


def test_bound_alg2_scalar_instance():
    res = solve(_scalar_problem(), SolverConfig("alg2", max_iters=1000), x0=np.array([2.0]),
                v0=[np.array([0.7])], reference=(np.zeros(1), [np.zeros(1)]))
    rep = check_bound_alg2(res.log, res.steps.gamma0, res.steps.sigma0)
    assert rep.ratios[0] == pytest.approx(1.0, abs=1e-15)
    assert rep.ok and len(rep.violations) == 0
    assert rep.max_ratio <= 1 + 1e-9
    assert "status=OK" in rep.to_text()
    text = rep.to_csv()
    assert text.splitlines()[0] == "iter,lhs,rhs,ratio,holds"
    assert len(text.splitlines()) == 1002


def test_bound_violation_flagged():
    log = ConvergenceLog()
    log.initial.update(dist_x_sq=1.0, dist_v_sq=0.0)
    for k, d in enumerate([0.5, 2.0, 0.1], start=1):
        log.append(iter=k, gamma=0.5, sigma=1.0)
        log.dist_x_sq.append(d)
        log.dist_v_sq.append(0.0)
    rep = check_bound_alg2(log, 1.0, 1.0)
    # rhs = 0.25 at every logged iteration
    np.testing.assert_array_equal(rep.violations, [1, 2])
    assert not rep.ok and "VIOLATED" in rep.to_text()


def test_bound_needs_reference():
    with pytest.raises(MissingReferenceError):
        check_bound_alg2(ConvergenceLog(), 0.5, 0.5)


def test_geometric_bound():
    d = 4.0 * 0.5 ** np.arange(10)
    assert check_geometric_bound(d, 0.5).ok
    assert not check_geometric_bound(d, 0.4).ok
    rep = BoundReport(np.array([0, 1]), np.array([0.0, 1.0]), np.array([0.0, 0.0]))
    assert rep.ratios[0] == 1.0 and rep.ratios[1] == np.inf
