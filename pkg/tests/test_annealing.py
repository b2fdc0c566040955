import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from qfp_sim.annealing import (
    AnnealParams,
    anneal_fidelity,
    beta_schedule,
    fidelity_at_beta,
    minimum_position,
    solve_minimum,
    well_width,
)
from qfp_sim.errors import InvalidTime

FIG2 = AnnealParams(beta_max=1.5, xi=0.4, theta_q=math.atan(4.0))


def test_schedule_endpoints():
    assert beta_schedule(FIG2, 0.0) == 0.0
    assert beta_schedule(FIG2, FIG2.t_qfp) == 1.5
    assert beta_schedule(FIG2, 0.5) == 0.75
    cos = AnnealParams(schedule="cosine")
    assert beta_schedule(cos, 0.0) == 0.0
    assert abs(beta_schedule(cos, 1.0) - cos.beta_max) < 1e-15


@pytest.mark.parametrize("t", [-0.1, 1.0001, math.nan])
def test_schedule_rejects_bad_time(t):
    with pytest.raises(InvalidTime):
        beta_schedule(FIG2, t)


def test_monostable_minimum():
    assert minimum_position(0.5) == 0.0
    assert solve_minimum(0.5).phi_p == 0.0


def test_beta_two_root():
    ref = brentq(lambda x: x - 2 * math.sin(x), 0.5, math.pi, xtol=1e-15)
    assert abs(minimum_position(2.0) - ref) < 1e-10
    assert abs(ref - 1.8955) < 1e-4


def test_pitchfork_taylor():
    beta = 1 + 1e-9
    taylor = math.sqrt(6 * (beta - 1) / beta)
    assert abs(minimum_position(beta) / taylor - 1) < 1e-3


def test_tilted_minimum_residual():
    phi = minimum_position(1.5, lam=0.2)
    assert abs(phi - 1.5 * math.sin(phi) - 0.2) < 1e-10


def test_flux_half_without_bistability():
    for beta in (0.0, 0.3, 1.0):
        assert fidelity_at_beta(beta, FIG2, "flux") == 0.5
        assert fidelity_at_beta(beta, FIG2, "energy") == 0.5


def test_fig2a_end_of_ramp():
    ff = anneal_fidelity(FIG2, FIG2.t_qfp, "flux")
    fe = anneal_fidelity(FIG2, FIG2.t_qfp, "energy")
    assert ff > 0.95 and fe > 0.95
    assert fe >= ff


def test_width_diverges_at_zero_curvature():
    assert well_width(1.0, 0.0, 0.4) == math.inf
    assert isinstance(well_width(1.5, 1.0 + 0.3j, 0.4), complex)


def test_invalid_params():
    with pytest.raises(ValueError):
        AnnealParams(beta_max=0)
    with pytest.raises(ValueError):
        AnnealParams(schedule="quadratic")
    with pytest.raises(ValueError):
        fidelity_at_beta(1.5, FIG2, "dressed")


@given(st.floats(1.2, 10), st.sampled_from(["flux", "energy"]))
@settings(max_examples=30)
def test_monotone_in_time_linear_ramp(beta_max, basis):
    p = AnnealParams(beta_max=beta_max, xi=0.4, theta_q=math.atan(4.0))
    f = [anneal_fidelity(p, t, basis) for t in np.linspace(0, 1, 100)]
    assert all(b >= a - 1e-15 for a, b in zip(f, f[1:]))


@given(st.floats(0.01, 10), st.floats(0.05, 2), st.floats(0, math.pi / 2), st.sampled_from(["flux", "energy"]))
def test_fidelity_range(beta, xi, theta, basis):
    f = fidelity_at_beta(beta, AnnealParams(xi=xi, theta_q=theta), basis)
    assert 0.5 <= f <= 1.0


def test_real_part_mode_can_fall_below_half():
    # the real part of the complex ratio turns negative for strongly tunneling qubits
    p = AnnealParams(energy_mode="real", theta_q=math.atan(4.0))
    assert fidelity_at_beta(1.5, p, "energy") < 0.5
    assert fidelity_at_beta(1.5, AnnealParams(energy_mode="real", theta_q=0.3), "energy") > 0.9


def test_minimum_residual_random_betas():
    rng = np.random.default_rng(7)
    for beta in rng.uniform(1.0, 10.0, 1000):
        if beta == 1.0:
            continue
        phi = minimum_position(beta)
        assert 0 < phi < math.pi
        assert abs(phi - beta * math.sin(phi)) < 1e-10


def test_continuity_at_pitchfork():
    assert abs(minimum_position(1 + 1e-7)) < 1e-3
