"""Tests for baseline/QND/PNRD observables and the PNRD gating probability."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decoy_fsa.model import GYS, poisson_pmf
from decoy_fsa.observables import (
    Baseline,
    DegenerateObservablesError,
    PNRD,
    QND,
    _attack_observables,
    observables_baseline,
    observables_for,
    observables_pnrd,
    observables_qnd,
    p_single,
)

# Frozen with 40-digit arithmetic.
QND_310_300_100 = {
    "q_mu": 2.5122639054993621e-4,
    "q_nu": 4.1656908457993356e-5,
    "emu_qmu": 2.6940966912383044e-6,
    "enu_qnu": 1.1452970325788099e-6,
    "e_mu": 1.0723780592241560e-2,
}
PNRD_1000_900_100 = {
    "q_mu": 3.6788215169136387e-4,
    "q_nu": 4.1519940059223967e-5,
    "emu_qmu": 1.6215331505039340e-6,
    "enu_qnu": 9.3389923884838935e-7,
}
BASE_100 = {"q_mu": 1.7326018056927876e-4, "q_nu": 1.9572225571169981e-5}


class TestPSingle:
    def test_perfect_detector_sees_true_single_fraction(self):
        for mu in (0.1, 0.48, 1.3):
            assert p_single(mu, 1.0) == pytest.approx(poisson_pmf(mu, 1), rel=1e-12)

    def test_vacuum(self):
        assert p_single(0.0, 0.3) == 0.0

    def test_series_identity(self):
        # Thinned-count series: sum_i p(i) * i * eta * (1-eta)^(i-1).
        mu, eta = 0.48, 0.1
        series = sum(
            poisson_pmf(mu, i) * i * eta * (1.0 - eta) ** (i - 1) for i in range(1, 61)
        )
        assert p_single(mu, eta) == pytest.approx(series, abs=1e-10)

    def test_bad_efficiency_rejected(self):
        with pytest.raises(ValueError):
            p_single(0.48, 0.0)
        with pytest.raises(ValueError):
            p_single(0.48, 1.1)


class TestQndObservables:
    def test_degenerate_when_no_light_and_no_darks(self):
        params = GYS.replace(dark_count=0.0)
        with pytest.raises(DegenerateObservablesError):
            observables_qnd(params, QND(mu_prime=0.0, k=310.0))

    def test_perfect_resend_limit(self):
        # Forcing unit arrival and zero error leaves the bare single-photon gain.
        obs = _attack_observables(1.0, 0.0, 0.48 * math.exp(-0.48), 0.05 * math.exp(-0.05), 0.0)
        assert obs.q_mu == pytest.approx(0.48 * math.exp(-0.48), rel=1e-12)
        assert obs.e_mu == 0.0

    def test_frozen_point(self):
        obs = observables_qnd(GYS.replace(distance=100.0), QND(mu_prime=300.0, k=310.0))
        for name, expected in QND_310_300_100.items():
            assert getattr(obs, name) == pytest.approx(expected, rel=1e-9), name

    def test_gain_nondecreasing_in_mu_prime(self):
        params = GYS.replace(distance=100.0)
        gains = [
            observables_qnd(params, QND(mu_prime=mp, k=310.0)).q_mu
            for mp in (0.0, 10.0, 100.0, 300.0, 1000.0, 2000.0)
        ]
        assert all(b >= a - 1e-15 for a, b in zip(gains, gains[1:]))

    def test_dark_dominated_qber_approaches_half(self):
        params = GYS.replace(distance=100.0)
        obs = observables_qnd(params, QND(mu_prime=1e-6, k=310.0))
        assert obs.e_mu == pytest.approx(0.5, abs=1e-3)


class TestPnrdObservables:
    def test_unit_efficiency_reduces_to_ideal_gate(self):
        for distance in (10.0, 60.0, 100.0, 150.0):
            for k, mp in ((1.0, 50.0), (310.0, 300.0), (1000.0, 900.0)):
                params = GYS.replace(distance=distance)
                ideal = observables_qnd(params, QND(mu_prime=mp, k=k))
                gated = observables_pnrd(params, PNRD(mu_prime=mp, k=k, eta_e=1.0))
                for field in ("q_mu", "q_nu", "emu_qmu", "enu_qnu", "e_mu"):
                    assert getattr(gated, field) == pytest.approx(
                        getattr(ideal, field), rel=1e-12
                    ), (field, distance, k)

    def test_vanishing_efficiency_kills_the_gains(self):
        params = GYS.replace(distance=100.0, dark_count=0.0)
        obs = observables_pnrd(params, PNRD(mu_prime=900.0, k=1000.0, eta_e=1e-9))
        assert obs.q_mu == pytest.approx(0.0, abs=1e-9)
        assert obs.q_nu == pytest.approx(0.0, abs=1e-9)

    def test_frozen_point(self):
        obs = observables_pnrd(
            GYS.replace(distance=100.0), PNRD(mu_prime=900.0, k=1000.0, eta_e=0.1)
        )
        for name, expected in PNRD_1000_900_100.items():
            assert getattr(obs, name) == pytest.approx(expected, rel=1e-9), name

    def test_dark_dominated_qber_approaches_half(self):
        params = GYS.replace(distance=100.0)
        obs = observables_pnrd(params, PNRD(mu_prime=1e-6, k=310.0, eta_e=0.1))
        assert obs.e_mu == pytest.approx(0.5, abs=1e-3)


class TestBaselineObservables:
    def test_long_distance_dark_dominated(self):
        obs = observables_baseline(GYS.replace(distance=1000.0))
        assert obs.q_mu == pytest.approx(GYS.dark_count, rel=1e-6)
        assert obs.e_mu == pytest.approx(0.5, abs=1e-6)

    def test_error_free_with_no_darks_and_no_misalignment(self):
        obs = observables_baseline(GYS.replace(dark_count=1e-30))
        assert obs.e_mu == pytest.approx(0.0, abs=1e-15)

    def test_frozen_point(self):
        obs = observables_baseline(GYS.replace(distance=100.0))
        for name, expected in BASE_100.items():
            assert getattr(obs, name) == pytest.approx(expected, rel=1e-9), name
        assert obs.emu_qmu == pytest.approx(0.5 * GYS.dark_count, rel=1e-12)

    def test_misalignment_contributes(self):
        obs = observables_baseline(GYS.replace(distance=100.0, e_detector=0.033))
        expected = 0.5 * GYS.dark_count + 0.033 * (BASE_100["q_mu"] - GYS.dark_count)
        assert obs.emu_qmu == pytest.approx(expected, rel=1e-9)


class TestDispatch:
    def test_dispatch_matches_direct_calls(self):
        params = GYS.replace(distance=80.0)
        assert observables_for(params, Baseline()) == observables_baseline(params)
        qnd = QND(mu_prime=300.0, k=310.0)
        assert observables_for(params, qnd) == observables_qnd(params, qnd)
        pnrd = PNRD(mu_prime=900.0, k=1000.0, eta_e=0.1)
        assert observables_for(params, pnrd) == observables_pnrd(params, pnrd)

    def test_strategy_validation(self):
        with pytest.raises(ValueError):
            QND(mu_prime=-1.0, k=310.0)
        with pytest.raises(ValueError):
            QND(mu_prime=300.0, k=0.9)
        with pytest.raises(ValueError):
            PNRD(mu_prime=900.0, k=1000.0, eta_e=0.0)

    @given(
        k=st.floats(min_value=1.0, max_value=1000.0),
        mu_prime=st.floats(min_value=0.0, max_value=2000.0),
        distance=st.floats(min_value=0.0, max_value=200.0),
    )
    @settings(max_examples=150, deadline=None)
    def test_attack_qber_stays_physical(self, k, mu_prime, distance):
        params = GYS.replace(distance=distance)
        obs = observables_qnd(params, QND(mu_prime=mu_prime, k=k))
        assert 0.0 <= obs.e_mu <= 1.0
