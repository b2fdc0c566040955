import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qfp_sim.errors import DegenerateDoublet
from qfp_sim.linalg import I2, tensor
from qfp_sim.presets import get_preset
from qfp_sim.sequential import (
    Couplings,
    SequentialParams,
    crossover_residual,
    dressed_decompose,
    h_seq,
    point_fidelities,
    qubit_block,
    regime_report,
    rwa_validity,
)
from qfp_sim.single import SingleQubitParams, h_energy_basis, h_flux_basis
from qfp_sim.single import point_fidelities as single_point

FIG4 = get_preset("sequential", "4a").params
FIG5 = get_preset("sequential", "5a").params
REPRESENTATIONS = ("flux", "energy_q2", "energy_q1q2")


def _single_twin(p):
    return SingleQubitParams(eps_q=p.eps2, delta_q=p.delta2, eta=p.eta, delta_over_g=p.delta_over_g, n_max=p.n_max, alpha=p.alpha)


def _off_diagonal(h):
    return np.max(np.abs(h - np.diag(np.diag(h))))


def test_decoupled_limit_factorises():
    p = SequentialParams(j_over_gap=0.0, n_max=12)
    s = _single_twin(p)
    assert np.max(np.abs(h_seq(p, "flux") - tensor(I2, h_flux_basis(s)))) < 1e-15
    assert np.max(np.abs(h_seq(p, "energy_q2") - tensor(I2, h_energy_basis(s)))) < 1e-15


def test_zero_mixing_energy_equals_zz():
    # with both angles zero the rotated coupling is pure sz sz
    p = SequentialParams(n_max=8)
    c = Couplings(det2=8.0, chi=0.1, J=0.3, theta1=0.0, theta2=0.0)
    assert np.array_equal(h_seq(p, "energy_q2", c), h_seq(p, "zz_approx", c))


def test_fig4_isospectral():
    spectra = [np.linalg.eigvalsh(h_seq(FIG4, b)) for b in REPRESENTATIONS]
    for s in spectra[1:]:
        assert np.max(np.abs(s - spectra[0])) < 1e-10


def _random_params(rng):
    return SequentialParams(
        eps2=rng.uniform(0.2, 3),
        delta2=rng.uniform(0.1, 10),
        eta=rng.uniform(0, 3),
        eps1=rng.uniform(0.05, 3),
        delta1=rng.uniform(0.05, 3),
        j_over_gap=rng.uniform(0, 0.5),
        delta_over_g=rng.choice([-1, 1]) * rng.uniform(1, 20),
        n_max=int(rng.integers(4, 28)),
    )


def test_isospectral_random_draws(rng):
    for _ in range(200):
        p = _random_params(rng)
        ref = np.linalg.eigvalsh(h_seq(p, "flux"))
        for b in REPRESENTATIONS[1:]:
            assert np.max(np.abs(np.linalg.eigvalsh(h_seq(p, b)) - ref)) < 1e-10


def test_zz_exactly_diagonal(rng):
    for _ in range(50):
        assert _off_diagonal(h_seq(_random_params(rng), "zz_approx")) < 1e-14


def test_decoupled_angles_vanish():
    p = SequentialParams(j_over_gap=0.0)
    for approx in ("full", "xx"):
        dec = dressed_decompose(p, 0, approx)
        assert dec.angles == (0.0, 0.0)
        assert np.array_equal(dec.eigenvectors, np.eye(4))


def test_resonant_xx_doublet():
    p = SequentialParams()
    c = Couplings(det2=-0.3, chi=0.3, J=0.8, theta1=0.6, theta2=0.9)
    assert c.det_n(0) == 0
    dec = dressed_decompose(p, 0, "xx", c)
    assert sorted(dec.angles) == [-math.pi / 2, math.pi / 2]
    assert np.allclose(np.abs(dec.eigenvalues), abs(c.j_xx), atol=1e-15)


def test_degenerate_doublet_warns():
    c = Couplings(det2=0.4, chi=0.1, J=0.25, theta1=0.3, theta2=0.0)
    assert c.det_n(0) / 2 - c.j_zz == 0 and c.j_zx == 0
    with pytest.warns(DegenerateDoublet):
        dec = dressed_decompose(SequentialParams(), 0, "full", c)
    assert dec.angles[0] == 0.0


@pytest.mark.parametrize("n", [0, 1, 4])
def test_full_decomposition_matches_eigensolver(n):
    dec = dressed_decompose(FIG5, n, "full")
    block = qubit_block(FIG5, "energy_q2", n)
    assert np.max(np.abs(np.sort(dec.eigenvalues) - np.linalg.eigvalsh(block))) < 1e-10
    v = dec.eigenvectors
    assert _off_diagonal(v.conj().T @ block @ v) < 1e-10
    assert np.max(np.abs(np.diag(v.conj().T @ block @ v).real - dec.eigenvalues)) < 1e-10


@given(st.floats(-3, 3), st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi), st.floats(-20, 20), st.floats(0.01, 1), st.integers(0, 30), st.sampled_from(["full", "xx"]))
@settings(max_examples=80)
def test_closed_form_dressed_states(J, th1, th2, det2, chi, n, approx):
    c = Couplings(det2=det2, chi=chi, J=J, theta1=th1, theta2=th2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateDoublet)
        dec = dressed_decompose(FIG5, n, approx, c)
    v = dec.eigenvectors
    assert np.max(np.abs(v @ v.conj().T - np.eye(4))) < 1e-10
    block = qubit_block(FIG5, "energy_q2" if approx == "full" else "xx_approx", n, c)
    rotated = v.conj().T @ block @ v
    assert _off_diagonal(rotated) < 1e-10 * max(1, np.max(np.abs(block)))
    assert np.allclose(np.diag(rotated).real, dec.eigenvalues, atol=1e-10 * max(1, np.max(np.abs(block))))


def test_rwa_ratios():
    zero_j = SequentialParams(j_over_gap=0.0)
    for approx in ("full", "xx"):
        for basis in ("bare", "dressed"):
            assert rwa_validity(zero_j, 2, basis, approx) == 0.0
    c = Couplings(det2=8.0, chi=0.1, J=0.3, theta1=0.7, theta2=0.5)
    c0 = Couplings(det2=8.0, chi=0.0, J=0.3, theta1=0.7, theta2=0.5)
    for approx in ("full", "xx"):
        assert rwa_validity(FIG5, 3, "dressed", approx, c0) == 0.0
        assert rwa_validity(FIG5, 3, "bare", approx, c0) == rwa_validity(FIG5, 0, "bare", approx, c0)
        assert rwa_validity(FIG5, 3, "dressed", approx, c) > 0
    resonant = Couplings(det2=-0.1, chi=0.1, J=0.3, theta1=0.7, theta2=0.5)
    assert rwa_validity(FIG5, 0, "bare", "xx", resonant) == math.inf


def test_regime_report_orders_figures():
    zz = regime_report(FIG4)
    xx = regime_report(get_preset("sequential", "xxa").params)
    assert zz["zz_ratio"] < xx["zz_ratio"]
    assert xx["xx_ratio"] < zz["xx_ratio"]


@pytest.mark.parametrize("x", [0.4, 1.0, math.pi / 2])
def test_reduces_to_single_qubit(x):
    p = SequentialParams(eps2=1.0, delta2=4.0, j_over_gap=1e-8, n_max=20)
    seq = point_fidelities(p, ("flux", "energy_q2"), "chi_t", x)
    one = single_point(_single_twin(p), ("flux", "energy"), "chi_t", x)
    assert abs(seq["flux"] - one["flux"]) < 1e-6
    assert abs(seq["energy_q2"] - one["energy"]) < 1e-6


def _locus_scan():
    """Cross the chi (n + 1/2) = dressed-gap locus by lowering the detuning."""
    rows = []
    for dg in np.linspace(0.4, 1.6, 13):
        p = SequentialParams(eps2=1, delta2=3, eta=0.5, eps1=0.2, delta1=2, delta_over_g=dg, j_over_gap=0.05, n_max=16, alpha=1.0)
        f = point_fidelities(p, ("bare", "dressed"), "t_over_td", 1.0)
        rows.append((crossover_residual(p), f["bare"] - f["dressed"]))
    return np.array(rows)


def test_bases_agree_on_crossover_locus():
    rows = _locus_scan()
    k = int(np.flatnonzero(np.diff(np.sign(rows[:, 0])))[0])
    assert max(abs(rows[k, 1]), abs(rows[k + 1, 1])) < 0.02


def test_fidelity_difference_changes_sign_across_locus():
    rows = _locus_scan()
    assert np.any(np.diff(np.sign(rows[:, 0])) != 0)
    assert np.any(np.diff(np.sign(rows[:, 1])) != 0)


def test_invalid():
    with pytest.raises(ValueError):
        SequentialParams(spectator="up")
    with pytest.raises(ValueError):
        SequentialParams(approx="zz")
    with pytest.raises(ValueError):
        dressed_decompose(FIG5, -1)
