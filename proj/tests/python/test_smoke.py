import math

import numpy as np
import pytest

import fkdv


def test_symbol_and_bifurcation_point():
    m = fkdv.MultiplierSymbol(2.0)
    assert m(1.0) == pytest.approx(0.5, rel=1e-15)
    assert fkdv.bifurcation_point(m, 2) == pytest.approx(0.2, rel=1e-15)
    with pytest.raises(ValueError, match="alpha must exceed 1"):
        fkdv.MultiplierSymbol(0.9)


def test_constant_solution_residual():
    m = fkdv.MultiplierSymbol(2.0)
    mu = 0.37
    phi = fkdv.CosineSeries(1, [4.0 * (mu - 1.0), 0.0, 0.0, 0.0])
    r = fkdv.residual(fkdv.SteadyState(phi, mu), m)
    assert max(abs(c) for c in r.coeffs) <= 1e-13


def test_jacobian_is_numpy_matrix():
    m = fkdv.MultiplierSymbol(3.0)
    state = fkdv.asymptotic_branch(m, 1, 0.05, 16)
    j = fkdv.jacobian_matrix(state, m)
    assert isinstance(j, np.ndarray)
    assert j.shape == (17, 17)


def test_newton_and_mu2_sign():
    m = fkdv.MultiplierSymbol(2.0)
    cfg = fkdv.ContinuationConfig()
    cfg.modes = 32
    guess = fkdv.asymptotic_branch(m, 1, 0.02, 32)
    p = fkdv.newton_correct(guess, 0.02, m, cfg)
    assert p.newton_residual <= cfg.newton_tol
    assert fkdv.mu2_coefficient(m, 1) < 0.0
    assert p.state.mu < fkdv.bifurcation_point(m, 1)


def test_short_branch_and_limit():
    m = fkdv.MultiplierSymbol(2.0)
    cfg = fkdv.ContinuationConfig()
    cfg.modes = 128
    cfg.max_modes = 512
    run = fkdv.continue_branch(m, cfg)
    assert run.stopped_reason == "crest_gap"
    assert not any(p.flagged for p in run.points)
    limit = fkdv.extrapolate_highest(run.points[-3:])
    assert 0.9 <= fkdv.crest_exponent(limit) <= 1.3
    assert limit.phi.value_at_zero() == pytest.approx(limit.mu, abs=1e-14)


def test_kernel_certification():
    m = fkdv.MultiplierSymbol(2.0)
    report = fkdv.certify_kernel_properties(m, 65, 4096)
    assert all(ok for ok, _ in report.values())
    assert fkdv.lambda_constant(m, 65, 4096) > 0.0
    assert math.isfinite(fkdv.kernel_series_tail_bound(m, 100))
