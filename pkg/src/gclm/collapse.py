"""Fitting collapse rates and locating critical amplitudes.

``fit_collapse`` extracts (t_c, alpha, beta) from the sampled diagnostics of
a run approaching a finite-time singularity, assuming
max|w| ~ C (t_c - t)^(-beta) and delta_x ~ (t_c - t)^alpha.
``critical_amplitude`` brackets the smallest initial amplitude that blows up
by bisection over full simulations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from gclm.dynamics import RunControls, TerminalStatus, TimeSeries, simulate
from gclm.spectral import GclmParams

__all__ = [
    "NoCollapseSignalError",
    "BadBracketError",
    "CollapseFit",
    "fit_collapse",
    "ProbeRecord",
    "CriticalAmplitude",
    "blow_up_verdict",
    "critical_amplitude",
]

#: max|w| must rise by this factor before a collapse fit is attempted
MIN_GROWTH_DECADES = 4

#: blow-up verdict: amplification threshold for runs stopped by the
#: resolution cap or the time horizon
BLOWUP_GROWTH = 1e4

#: fraction of the window's log(t_c - t) range, nearest the singularity,
#: excluded from the exponent regressions (see fit_collapse)
EXPONENT_TRIM = 0.25


class NoCollapseSignalError(ValueError):
    """The amplitude never grew enough to justify a collapse-rate fit."""


class BadBracketError(ValueError):
    """Bisection endpoints do not straddle the blow-up threshold."""


@dataclass
class CollapseFit:
    amplitude: float
    t_c: float
    beta: float
    alpha: float
    beta_residual: float
    alpha_residual: float
    n_samples: int
    window_fraction: float = 0.25


def _fit_window(series: TimeSeries, window_fraction: float) -> np.ndarray:
    """Indices of the final window (by count), at least 5 samples."""
    n = len(series)
    lo = min(n - 5, int(n * (1.0 - window_fraction)))
    return np.arange(max(lo, 0), n)


def fit_collapse(series: TimeSeries,
                 window_fraction: float = 0.25) -> CollapseFit:
    """Least-squares (C, t_c, beta) on log max|w|, then alpha from delta_x.

    t_c comes from a nonlinear fit over the final window_fraction of the
    samples.  The exponents are then refit linearly in log-log over the same
    window with the quarter of the log(t_c - t) range nearest the
    singularity excluded: there the singularity distance spans only a few
    grid spacings, so the grid maximum and the fitted delta are
    resolution-limited and would bias the slopes.  Raises
    NoCollapseSignalError unless max|w| grew by at least four decades over
    the series.
    """
    amp = series.max_abs_omega
    if len(series) < 8 or not np.all(amp > 0):
        raise NoCollapseSignalError("too few samples or vanishing amplitude")
    growth = np.max(amp) / amp[0]
    if growth < 10.0**MIN_GROWTH_DECADES:
        raise NoCollapseSignalError(
            f"amplitude grew only {np.log10(growth):.2f} decades")
    idx = _fit_window(series, window_fraction)
    t, y = series.t[idx], np.log(amp[idx])

    # seed t_c by linear extrapolation of the last doubling time
    t_final = series.t[-1]
    half = np.nonzero(amp >= 0.5 * amp[-1])[0][0]
    t_c0 = t_final + max(t_final - series.t[half], 1e-6 * max(t_final, 1.0))

    def resid(p):
        log_c, t_c, beta = p
        return log_c - beta * np.log(np.maximum(t_c - t, 1e-300)) - y

    def jac(p):
        _, t_c, beta = p
        tau = np.maximum(t_c - t, 1e-300)
        cols = [np.ones_like(tau), -beta / tau, -np.log(tau)]
        return np.column_stack(cols)

    beta0 = 1.0
    p0 = [y[-1] + beta0 * np.log(t_c0 - t[-1]), t_c0, beta0]
    sol = least_squares(resid, p0, jac=jac,
                        bounds=([-np.inf, t_final * (1 + 1e-12), 0.0],
                                [np.inf, np.inf, np.inf]),
                        xtol=2.3e-16, ftol=2.3e-16, gtol=2.3e-16,
                        max_nfev=2000)
    log_c, t_c, beta = sol.x

    # exponents: linear log-log fits away from the resolution-limited tail
    log_tau = np.log(np.maximum(t_c - t, 1e-300))
    cut = log_tau.min() + EXPONENT_TRIM * (log_tau.max() - log_tau.min())
    keep = log_tau >= cut
    if np.count_nonzero(keep) < 5:
        keep = np.ones_like(keep)

    def loglog_slope(values):
        ok = keep & np.isfinite(values) & (values > 0)
        if np.count_nonzero(ok) < 3:
            return np.nan, np.nan
        design = np.column_stack([np.ones(np.count_nonzero(ok)),
                                  log_tau[ok]])
        coef, res, _, _ = np.linalg.lstsq(design, np.log(values[ok]),
                                          rcond=None)
        rms = float(np.sqrt(res[0] / np.count_nonzero(ok))) if res.size \
            else 0.0
        return float(coef[1]), rms

    slope, beta_res = loglog_slope(amp[idx])
    if np.isfinite(slope):
        beta = -slope
        log_c = np.mean(y[keep] + beta * log_tau[keep])
    alpha, alpha_res = loglog_slope(series.delta_x[idx])
    return CollapseFit(amplitude=float(np.exp(log_c)), t_c=float(t_c),
                       beta=float(beta), alpha=alpha,
                       beta_residual=beta_res, alpha_residual=alpha_res,
                       n_samples=int(idx.size),
                       window_fraction=window_fraction)


# ---------------------------------------------------------------------------
# critical amplitude by bisection

@dataclass
class ProbeRecord:
    amplitude: float
    blew_up: bool
    status: TerminalStatus
    growth: float


@dataclass
class CriticalAmplitude:
    lower: float
    upper: float
    n_probes: int
    probes: list[ProbeRecord] = field(default_factory=list)
    a_param: float = np.nan
    sigma: float = np.nan
    nu: float = np.nan

    @property
    def a_no_blowup(self) -> float:
        return self.lower

    @property
    def a_blowup(self) -> float:
        return self.upper

    @property
    def estimate(self) -> float:
        return 0.5 * (self.lower + self.upper)


def blow_up_verdict(series: TimeSeries) -> bool:
    """Classify one probe run.

    Blow-up: collapse detected, or four decades of amplification with the
    singularity distance down to a few grid spacings.  No blow-up: the
    amplitude is non-increasing over the second half of the horizon.
    Anything else counts as no blow-up (the horizon is chosen long enough
    that decaying solutions have clearly turned over).
    """
    amp = series.max_abs_omega
    if series.terminal_status is TerminalStatus.COLLAPSE_DETECTED:
        return True
    growth = np.max(amp) / amp[0]
    n_modes = series.n_modes[-1]
    dx_last = series.delta_x[-1]
    if growth >= BLOWUP_GROWTH and np.isfinite(dx_last) and \
            dx_last < 10.0 * np.pi / n_modes:
        return True
    return False


def critical_amplitude(make_initial, params: GclmParams,
                       bracket: tuple[float, float],
                       tol: float,
                       controls: RunControls,
                       validate_bracket: bool = True) -> CriticalAmplitude:
    """Bisect the initial-data amplitude between decay and blow-up.

    ``make_initial(amplitude)`` builds the initial SpectralField.  The
    endpoints must classify as (no blow-up, blow-up), otherwise
    BadBracketError is raised; ``validate_bracket=False`` skips those two
    runs when the endpoints are already known.  Returns the final bracket
    once its width is at most ``tol``; only midpoints count as probes.
    """
    lo, hi = bracket
    if not 0 < lo < hi:
        raise ValueError("bracket must satisfy 0 < lower < upper")
    probes = []

    def probe(a: float) -> bool:
        series, _ = simulate(make_initial(a), params, controls)
        blew = blow_up_verdict(series)
        growth = float(np.max(series.max_abs_omega)
                       / series.max_abs_omega[0])
        probes.append(ProbeRecord(amplitude=a, blew_up=blew,
                                  status=series.terminal_status,
                                  growth=growth))
        return blew

    endpoint_probes = []
    if validate_bracket:
        if probe(lo):
            raise BadBracketError(f"lower endpoint {lo} already blows up")
        if not probe(hi):
            raise BadBracketError(f"upper endpoint {hi} does not blow up")
        endpoint_probes = list(probes)
        probes.clear()
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if probe(mid):
            hi = mid
        else:
            lo = mid
    return CriticalAmplitude(lower=lo, upper=hi, n_probes=len(probes),
                             probes=endpoint_probes + probes,
                             a_param=params.a, sigma=params.sigma,
                             nu=params.nu)
