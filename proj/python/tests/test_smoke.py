import math

import numpy as np
import pytest

import nmkerr


def fig2():
    return nmkerr.SystemParams(1e-10, nmkerr.KernelModel.friedrich_wintgen(1e-4, 1e-2, 1.01))


def test_fw_loss_vanishes_at_bound_state():
    k = nmkerr.KernelModel.friedrich_wintgen(1e-4, 1e-2, 1.01)
    assert abs(k.loss(1.01).real) < 1e-18
    w = np.linspace(0.9, 1.1, 1001)
    assert nmkerr.kk_residual(k, list(w)) < 1e-14


def test_sum_rule():
    s = nmkerr.SystemParams(0.0, nmkerr.KernelModel.markovian(1e-3))
    assert nmkerr.sum_rule(s) == pytest.approx(1.0, abs=1e-3)


def test_round_trip_through_pump():
    s = fig2()
    flux = nmkerr.pump_for_n(s, 1.02, 1.5e7)
    roots = nmkerr.steady_roots(s, 1.02, flux)
    assert min(abs(r - 1.5e7) for r in roots) < 1e-3 * 1.5e7


def test_flat_loss_large_n_limit():
    g = 1e-4
    s = nmkerr.SystemParams(1e-6, nmkerr.KernelModel.markovian(g))
    r = nmkerr.variance_exact(s, 1.0 + g, 1e3 * g / 1e-6)
    assert r["var_x"] == pytest.approx(2.0 / 3.0, abs=2e-3)


def test_classification_and_errors():
    s = fig2()
    assert nmkerr.classify(s, 1.02, 1.5e7)["cls"] == nmkerr.Stability.Stable
    assert nmkerr.classify(s, 1.02, 4.8e7)["cls"] == nmkerr.Stability.MIUnstable
    with pytest.raises(nmkerr.NumericalError) as err:
        nmkerr.variance_exact(s, 1.02, 8e7)
    assert err.value.kind == "unstable_point"
    with pytest.raises(nmkerr.ConfigError):
        nmkerr.KernelModel.fano_mirror(1e-4, 0.6, 0.7, 1, 30.0)


def test_phase_diagram_shape():
    s = fig2()
    cls, gain = nmkerr.phase_diagram(s, [1.0, 1.01, 1.02], [1e6, 1e7], threads=1)
    assert cls.shape == (2, 3)
    assert gain.shape == (2, 3)


def test_two_mode_relaxes_to_fixed_point():
    tr = nmkerr.simulate_two_mode(fig2(), 1.02, 1.5e7, t_end=3e5, dt=1.0)
    assert tr["n"][-1] == pytest.approx(1.5e7, rel=1e-4)
    assert not math.isnan(tr["alpha"][-1].real)
