"""Tests for collapse-rate fitting and critical-amplitude bisection."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gclm import collapse as collapse_mod
from gclm.collapse import (
    BadBracketError,
    NoCollapseSignalError,
    blow_up_verdict,
    critical_amplitude,
    fit_collapse,
)
from gclm.dynamics import RunControls, TerminalStatus, TimeSeries
from gclm.spectral import GclmParams


def power_law_series(t_c=1.5, beta=1.0, alpha=1.0, amp=2.0, dx0=0.3,
                     n=120, tau_min=1e-7, status=TerminalStatus.COLLAPSE_DETECTED):
    """Synthetic diagnostics with exact power-law collapse rates."""
    ts = TimeSeries()
    for t in t_c - np.geomspace(0.95 * t_c, tau_min, n):
        tau = t_c - t
        ts.append(t=t, max_abs_omega=amp * tau**-beta, delta_x=dx0 * tau**alpha,
                  p_fit=0.0, l2=1.0, linf=amp * tau**-beta, b0=1.0,
                  energy=1.0, n_modes=1 << 20)
    ts.terminal_status = status
    return ts


def flat_series(amp=1.0, n=40, status=TerminalStatus.REACHED_T_END,
                decreasing=False):
    ts = TimeSeries()
    for i, t in enumerate(np.linspace(0.0, 10.0, n)):
        a = amp * (0.9 ** i if decreasing else 1.0)
        ts.append(t=t, max_abs_omega=a, delta_x=np.nan, p_fit=np.nan,
                  l2=a, linf=a, b0=a, energy=a * a, n_modes=128)
    ts.terminal_status = status
    return ts


class TestFitCollapse:
    def test_recovers_exact_power_law(self):
        fit = fit_collapse(power_law_series())
        assert fit.t_c == pytest.approx(1.5, abs=1e-6)
        assert fit.beta == pytest.approx(1.0, abs=1e-6)
        assert fit.alpha == pytest.approx(1.0, abs=1e-6)
        assert fit.amplitude == pytest.approx(2.0, rel=1e-5)

    @given(st.floats(min_value=0.5, max_value=2.5),
           st.floats(min_value=0.2, max_value=2.0),
           st.floats(min_value=0.25, max_value=4.0))
    @settings(max_examples=20, deadline=None)
    def test_recovery_over_parameter_ranges(self, beta, alpha, t_c):
        # sample deep enough for five decades of amplitude growth while
        # keeping t_c - t representable in double precision
        tau_min = max(0.95 * t_c * 10.0 ** (-5.0 / beta), 1e-11 * t_c)
        fit = fit_collapse(power_law_series(t_c=t_c, beta=beta, alpha=alpha,
                                            tau_min=tau_min))
        assert fit.t_c == pytest.approx(t_c, rel=1e-6)
        assert fit.beta == pytest.approx(beta, abs=1e-5)
        assert fit.alpha == pytest.approx(alpha, abs=1e-5)

    def test_decimating_samples_changes_little(self):
        full = power_law_series(n=240)
        thin = TimeSeries()
        for i in range(0, 240, 3):
            thin.append(**{k: getattr(full, k)[i]
                           for k in ("t", "max_abs_omega", "delta_x", "p_fit",
                                     "l2", "linf", "b0", "energy", "n_modes")})
        thin.terminal_status = full.terminal_status
        f_full, f_thin = fit_collapse(full), fit_collapse(thin)
        assert f_thin.t_c == pytest.approx(f_full.t_c, rel=1e-3)
        assert f_thin.beta == pytest.approx(f_full.beta, abs=1e-3)

    def test_no_growth_raises(self):
        with pytest.raises(NoCollapseSignalError):
            fit_collapse(flat_series())

    def test_insufficient_growth_raises(self):
        # three decades of growth are not enough to trust a rate fit
        series = power_law_series(tau_min=1e-3 * 0.95 * 1.5)
        with pytest.raises(NoCollapseSignalError):
            fit_collapse(series)

    def test_fitted_rates_for_degenerate_two_pair_family(self):
        # K = -2 tangency: amplitude ~ tau^-2 and distance ~ tau^2
        from gclm import exact

        st_ = exact.TwoPairS1State(omega_m1_1_0=-2.0, omega_m1_2_0=2.0,
                                   v_c1_0=0.1, v_c2_0=0.9, nu=1.0)
        cl = st_.classify()
        ts = TimeSeries()
        for t in cl.t_c - np.geomspace(0.9 * cl.t_c, 1e-4, 90):
            adv = st_.advance(t)
            v1 = adv.values_at(t)[2]
            x = cl.x_c + np.linspace(-10, 10, 4001) * max(v1.real, 1e-6)
            amp = np.max(np.abs(adv.evaluate(x)))
            ts.append(t=t, max_abs_omega=amp, delta_x=v1.real, p_fit=0.0,
                      l2=1.0, linf=amp, b0=1.0, energy=1.0, n_modes=1 << 20)
        ts.terminal_status = TerminalStatus.COLLAPSE_DETECTED
        fit = fit_collapse(ts)
        assert fit.t_c == pytest.approx(cl.t_c, abs=1e-3)
        assert fit.beta == pytest.approx(2.0, abs=0.05)
        assert fit.alpha == pytest.approx(2.0, abs=0.05)


class TestBlowUpVerdict:
    def test_collapse_status_is_blow_up(self):
        assert blow_up_verdict(power_law_series())

    def test_decaying_run_is_not(self):
        assert not blow_up_verdict(flat_series(decreasing=True))

    def test_capped_run_with_growth_and_tiny_delta(self):
        ts = TimeSeries()
        n_modes = 1024
        for i, t in enumerate(np.linspace(0.0, 1.0, 30)):
            amp = 10.0 ** (i / 4.0)
            ts.append(t=t, max_abs_omega=amp, delta_x=5.0 * np.pi / n_modes,
                      p_fit=0.0, l2=amp, linf=amp, b0=amp, energy=1.0,
                      n_modes=n_modes)
        ts.terminal_status = TerminalStatus.RESOLUTION_CAP_HIT
        assert blow_up_verdict(ts)


class TestCriticalAmplitude:
    def patch_probe(self, monkeypatch, threshold):
        """Replace the PDE run by a step-function oracle at ``threshold``."""
        calls = []

        def fake_simulate(initial, params, controls):
            a = calls.pop()
            if a >= threshold:
                return power_law_series(), None
            return flat_series(amp=a, decreasing=True), None

        monkeypatch.setattr(collapse_mod, "simulate", fake_simulate)
        return calls

    def make_initial_factory(self, calls):
        def make_initial(a):
            calls.append(a)
            return None
        return make_initial

    def test_bisection_brackets_the_threshold(self, monkeypatch):
        calls = self.patch_probe(monkeypatch, 2.0)
        result = critical_amplitude(self.make_initial_factory(calls),
                                    GclmParams(a=0.0, sigma=1.0, nu=1.0),
                                    bracket=(1.0, 3.0), tol=0.01,
                                    controls=RunControls())
        assert result.a_no_blowup < 2.0 <= result.a_blowup
        assert result.a_blowup - result.a_no_blowup <= 0.01

    def test_probe_count_is_logarithmic(self, monkeypatch):
        calls = self.patch_probe(monkeypatch, 2.0)
        result = critical_amplitude(self.make_initial_factory(calls),
                                    GclmParams(a=0.0, sigma=1.0, nu=1.0),
                                    bracket=(1.0, 3.0), tol=0.01,
                                    controls=RunControls())
        assert result.n_probes <= int(np.ceil(np.log2(2.0 / 0.01))) + 1

    def test_bad_bracket_raises(self, monkeypatch):
        calls = self.patch_probe(monkeypatch, 10.0)  # both endpoints decay
        with pytest.raises(BadBracketError):
            critical_amplitude(self.make_initial_factory(calls),
                               GclmParams(a=0.0, sigma=1.0, nu=1.0),
                               bracket=(1.0, 3.0), tol=0.1,
                               controls=RunControls())

    def test_skipping_validation_runs_midpoints_only(self, monkeypatch):
        calls = self.patch_probe(monkeypatch, 2.0)
        result = critical_amplitude(self.make_initial_factory(calls),
                                    GclmParams(a=0.0, sigma=1.0, nu=1.0),
                                    bracket=(1.0, 3.0), tol=0.5,
                                    controls=RunControls(),
                                    validate_bracket=False)
        assert all(1.0 < p.amplitude < 3.0 for p in result.probes)
        assert result.a_blowup - result.a_no_blowup <= 0.5

    def test_invalid_bracket_order_raises(self):
        with pytest.raises(ValueError):
            critical_amplitude(lambda a: None,
                               GclmParams(a=0.0, sigma=1.0, nu=1.0),
                               bracket=(3.0, 1.0), tol=0.1,
                               controls=RunControls())
