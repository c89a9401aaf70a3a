"""Exact pole-dynamics solutions of the dissipative gCLM equation.

Six families, used as oracles, initial-data generators and classifiers:

* ``SchochetState``        a = 0,  sigma = 2, real line (two double poles)
* ``DoublePoleState``      a = 1/2, sigma = 1, real line (c.c. double pole)
* ``OnePairS1State``       a = 0,  sigma = 1, real line (c.c. simple poles)
* ``TwoPairS1State``       a = 0,  sigma = 1, real line (two c.c. pairs)
* ``TwoPairDoublePoleLimitState``  degenerate limit of the two-pair family
* ``OnePairS0State``       a = 0,  sigma = 0, real line
* ``PeriodicPoleState``    a = 0,  sigma = 0, circle (pole in tan(x/2))

Each state stores its initial data; ``advance(t)`` returns the state at
absolute time t, ``evaluate(x)`` the real vorticity, ``classify()`` the
global-existence / steady / finite-time-collapse verdict with similarity
exponents, and ``similarity_profile(xi)`` the limiting collapse profile.
"""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, minimize_scalar

from gclm.spectral import Domain, GclmParams, SpectralField

__all__ = [
    "Kind",
    "Classification",
    "PastCollapseError",
    "HigherOrderUnknownError",
    "NotCollapsingError",
    "SchochetState",
    "DoublePoleState",
    "OnePairS1State",
    "TwoPairS1State",
    "TwoPairDoublePoleLimitState",
    "OnePairS0State",
    "PeriodicPoleState",
    "family_from_name",
]


class Kind(enum.Enum):
    GLOBAL = "global"
    STEADY = "steady"
    COLLAPSE = "collapse"


class PastCollapseError(ValueError):
    """Requested time at or beyond the collapse time."""


class HigherOrderUnknownError(ValueError):
    """Both pole pairs reach the axis simultaneously; classification unknown."""


class NotCollapsingError(ValueError):
    """Similarity profile requested for a non-collapsing state."""


@dataclass
class Classification:
    kind: Kind
    t_c: float | None = None
    x_c: float | None = None
    alpha: float | None = None
    beta: float | None = None


def _continuous_sqrt(path: np.ndarray) -> np.ndarray:
    """Square root along a sampled path, principal branch at the start,
    sign-flipped whenever consecutive values would jump branches."""
    s = np.sqrt(path.astype(complex))
    for i in range(1, s.size):
        if abs(s[i] - s[i - 1]) > abs(s[i] + s[i - 1]):
            s[i:] = -s[i:]
    return s


def _sqrt_at(radicand_of_t, t: float, nsteps: int = 64) -> complex:
    """sqrt(radicand(t)) reached continuously from t = 0."""
    ts = np.linspace(0.0, t, nsteps) if t > 0 else np.array([0.0])
    return complex(_continuous_sqrt(radicand_of_t(ts))[-1])


def _first_zero(f, t_hint: float, t_cap: float = 1e6, f_vec=None):
    """First positive root of a scalar function, allowing tangential zeros.

    Returns (t, tangent) or None; ``tangent`` is True when f touches zero
    without changing sign.  ``f_vec``, when given, evaluates f on a whole
    t array at once (used for the scan; f itself serves the root polish).
    """
    scale = max(abs(f(0.0)), 1e-12)
    t_hi = t_hint
    while t_hi <= t_cap:
        ts = np.linspace(0.0, t_hi, 8193)[1:]
        vals = np.asarray(f_vec(ts)) if f_vec is not None \
            else np.array([f(t) for t in ts])
        neg = np.nonzero(vals <= 0)[0]
        if neg.size:
            i = neg[0]
            lo = ts[i - 1] if i > 0 else 0.0
            if vals[i] == 0.0:
                return float(ts[i]), False
            return float(brentq(f, lo, ts[i], xtol=1e-14, rtol=1e-15)), False
        # look for a tangential touch at the interior minimum
        i = int(np.argmin(vals))
        if 0 < i < vals.size - 1:
            res = minimize_scalar(f, bracket=(ts[i - 1], ts[i], ts[i + 1]),
                                  options={"xtol": 1e-14})
            if res.fun <= 1e-9 * scale:
                return float(res.x), True
        t_hi *= 2.0
    return None


def _field_from(state, grid_size: int) -> SpectralField:
    """Sample the family on the collocation grid (q-grid on the line)."""
    if state.domain is Domain.LINE:
        return SpectralField.from_function(
            lambda q: state.evaluate(np.tan(q / 2.0)), grid_size, Domain.LINE)
    return SpectralField.from_function(state.evaluate, grid_size,
                                       Domain.CIRCLE)


# ---------------------------------------------------------------------------
# a = 0, sigma = 2 on the real line (Schochet)

#: corrected amplitude constants K+- = 24(3 +- sqrt(6)); the originally
#: published (erroneous) values 12(6 +- sqrt(6)) are kept for regression
#: demonstration behind corrected=False.
def schochet_k(sign: int, corrected: bool = True) -> float:
    if corrected:
        return 24.0 * (3.0 + sign * np.sqrt(6.0))
    return 12.0 * (6.0 + sign * np.sqrt(6.0))


@dataclass
class SchochetState:
    """Two double poles at x1(t), x2(t) in the lower half-plane."""

    x1_0: complex = -1j
    x2_0: complex = -2j
    nu: float = 1.0
    sign: int = 1
    corrected: bool = True
    t: float = 0.0

    domain = Domain.LINE
    params_a = 0.0
    params_sigma = 2.0

    @property
    def k_const(self) -> float:
        return schochet_k(self.sign, self.corrected)

    def _radicand(self, ts):
        return (self.x1_0 - self.x2_0) ** 2 - (5.0 / 3.0) * self.k_const * self.nu * np.asarray(ts)

    def _sqrt(self, t: float) -> complex:
        return _sqrt_at(self._radicand, t)

    def positions(self, t: float | None = None) -> tuple[complex, complex]:
        t = self.t if t is None else t
        s = self._sqrt(t)
        half_sum = 0.5 * (self.x1_0 + self.x2_0)
        return half_sum + 0.5 * s, half_sum - 0.5 * s

    def amplitude(self, t: float | None = None) -> complex:
        t = self.t if t is None else t
        return -self.k_const * self.nu * 1j / self._sqrt(t)

    def advance(self, t: float) -> "SchochetState":
        cl = self.classify()
        if t >= cl.t_c:
            raise PastCollapseError(f"t={t} >= t_c={cl.t_c}")
        return dataclasses.replace(self, t=t)

    def omega_plus(self, x):
        x = np.asarray(x, dtype=complex)
        x1, x2 = self.positions()
        a = self.amplitude()
        b = -12.0 * self.nu * 1j
        return 0.5 * (a / (x - x1) + b / (x - x1) ** 2
                      - a / (x - x2) + b / (x - x2) ** 2)

    def evaluate(self, x):
        return 2.0 * np.real(self.omega_plus(x))

    def collapse_time(self) -> float:
        tc = -12.0 / 5.0 * self.x1_0 * self.x2_0 / (self.k_const * self.nu)
        return float(np.real(tc))

    def classify(self) -> Classification:
        tc = self.collapse_time()
        x1, x2 = self.positions(tc)
        x_c = x1.real if abs(x1.imag) <= abs(x2.imag) else x2.real
        return Classification(Kind.COLLAPSE, t_c=tc, x_c=x_c, alpha=1.0,
                              beta=2.0)

    def v_tilde(self) -> complex:
        return -5j * self.k_const * self.nu / (12.0 * (self.x1_0 + self.x2_0))

    def similarity_profile(self, xi):
        """Limit of (t_c - t)^2 w at xi = (x - x_c)/(t_c - t)."""
        xi = np.asarray(xi, dtype=float)
        v = self.v_tilde()
        return np.real(-24.0 * v * xi / (xi**2 + v**2) ** 2)

    def field(self, grid_size: int) -> SpectralField:
        return _field_from(self, grid_size)

    def gclm_params(self) -> GclmParams:
        return GclmParams(a=0.0, sigma=2.0, nu=self.nu)


# ---------------------------------------------------------------------------
# a = 1/2, sigma = 1 on the real line (c.c. pair of double poles)

_G_INF = np.pi / (4.0 * np.sqrt(2.0))


def _g_implicit(om: float) -> float:
    """Antiderivative G with G' = 1/(om^2 sqrt(om - 2)); affine in t along
    collapsing trajectories of the amplitude ratio."""
    s = np.sqrt(om - 2.0)
    return s / (2.0 * om) + np.arctan(s / np.sqrt(2.0)) / (2.0 * np.sqrt(2.0))


@dataclass
class DoublePoleState:
    v_c0: float = 1.0
    omega_m2_0: float = 2.0
    x0: float = 0.0
    nu: float = 1.0
    t: float = 0.0
    # values at time t (filled by advance)
    v_c: float = None
    omega_m2: float = None

    domain = Domain.LINE
    params_a = 0.5
    params_sigma = 1.0

    def __post_init__(self):
        if self.v_c0 <= 0:
            raise ValueError("v_c(0) must be positive")
        if self.v_c is None:
            self.v_c = self.v_c0
        if self.omega_m2 is None:
            self.omega_m2 = self.omega_m2_0

    @property
    def omega_ratio0(self) -> float:
        return self.omega_m2_0 / self.v_c0

    def advance(self, t: float) -> "DoublePoleState":
        cl = self.classify()
        if cl.kind is Kind.COLLAPSE and t >= cl.t_c:
            raise PastCollapseError(f"t={t} >= t_c={cl.t_c}")
        if self.omega_ratio0 == 2.0 * self.nu:
            # equilibrium of the amplitude ratio: v_c grows linearly
            v = self.v_c0 + 0.5 * self.nu * t
            return dataclasses.replace(self, t=t, v_c=v,
                                       omega_m2=2.0 * self.nu * v)
        def rhs(_t, y):
            v, om = y
            return [-(om / (4.0 * v) - self.nu), om * om / (4.0 * v * v)]
        sol = solve_ivp(rhs, (0.0, t), [self.v_c0, self.omega_m2_0],
                        method="DOP853", rtol=1e-12, atol=1e-14,
                        dense_output=False)
        if not sol.success:
            raise RuntimeError(f"pole ODE integration failed: {sol.message}")
        v, om = sol.y[:, -1]
        return dataclasses.replace(self, t=t, v_c=float(v), omega_m2=float(om))

    def evaluate(self, x):
        x = np.asarray(x, dtype=complex) - self.x0
        w = 1j * self.omega_m2 * (1.0 / (x - 1j * self.v_c) ** 2
                                  - 1.0 / (x + 1j * self.v_c) ** 2)
        return np.real(w)

    def _scaled_c1(self) -> float:
        om = self.omega_ratio0 / self.nu
        return np.sqrt(om - 2.0) / (2.0 * self.v_c0 * om)

    def collapse_time(self) -> float:
        om = self.omega_ratio0 / self.nu
        return float((_G_INF - _g_implicit(om)) / self._scaled_c1() / self.nu)

    def v_c_tilde(self) -> float:
        c1 = self._scaled_c1()
        return 0.75 * (1.5 * c1) ** (-2.0 / 3.0) * self.nu ** (1.0 / 3.0)

    def classify(self) -> Classification:
        ratio = self.omega_ratio0
        if ratio == 2.0 * self.nu:
            return Classification(Kind.STEADY)
        if ratio < 2.0 * self.nu:
            return Classification(Kind.GLOBAL)
        return Classification(Kind.COLLAPSE, t_c=self.collapse_time(),
                              x_c=self.x0, alpha=1.0 / 3.0, beta=1.0)

    def implicit_invariant(self) -> float:
        """G(omega_m2 / (nu v_c)) at the state's time; affine in nu*t."""
        return _g_implicit(self.omega_m2 / (self.nu * self.v_c))

    def similarity_profile(self, xi):
        if self.classify().kind is not Kind.COLLAPSE:
            raise NotCollapsingError("amplitude ratio <= 2 nu")
        xi = np.asarray(xi, dtype=float)
        v = self.v_c_tilde()
        return -16.0 * v**3 * xi / (3.0 * (xi**2 + v**2) ** 2)

    def norms_closed_form(self) -> dict:
        ratio = self.omega_m2 / self.v_c
        return {
            "linf": 3.0 * np.sqrt(3.0) / 4.0 * abs(ratio) / self.v_c,
            "l2": np.sqrt(np.pi) * abs(ratio) / np.sqrt(self.v_c),
        }

    def field(self, grid_size: int) -> SpectralField:
        return _field_from(self, grid_size)

    def gclm_params(self) -> GclmParams:
        return GclmParams(a=0.5, sigma=1.0, nu=self.nu)


# ---------------------------------------------------------------------------
# a = 0, sigma = 1 on the real line (one c.c. pair of simple poles)

@dataclass
class OnePairS1State:
    omega_m1_0: complex = -2.0
    v_c0: complex = 1.0
    nu: float = 1.0
    t: float = 0.0

    domain = Domain.LINE
    params_a = 0.0
    params_sigma = 1.0

    def __post_init__(self):
        self.omega_m1_0 = complex(self.omega_m1_0)
        self.v_c0 = complex(self.v_c0)
        if self.v_c0.real <= 0:
            raise ValueError("Re v_c(0) must be positive")

    def omega_m1(self, t: float | None = None) -> complex:
        return self.omega_m1_0

    def v_c(self, t: float | None = None) -> complex:
        t = self.t if t is None else t
        return (self.omega_m1_0 + self.nu) * t + self.v_c0

    def advance(self, t: float) -> "OnePairS1State":
        cl = self.classify()
        if cl.kind is Kind.COLLAPSE and t >= cl.t_c:
            raise PastCollapseError(f"t={t} >= t_c={cl.t_c}")
        return dataclasses.replace(self, t=t)

    def evaluate(self, x):
        x = np.asarray(x, dtype=complex)
        om, v = self.omega_m1(), self.v_c()
        return np.real(om / (x - 1j * v) + np.conj(om) / (x + 1j * np.conj(v)))

    def classify(self) -> Classification:
        om, nu = self.omega_m1_0, self.nu
        if om == -nu:
            return Classification(Kind.STEADY)
        if om.real >= -nu:
            return Classification(Kind.GLOBAL)
        t_c = -self.v_c0.real / (om.real + nu)
        x_c = om.imag * self.v_c0.real / (om.real + nu) - self.v_c0.imag
        return Classification(Kind.COLLAPSE, t_c=t_c, x_c=x_c, alpha=1.0,
                              beta=1.0)

    def similarity_profile(self, xi):
        cl = self.classify()
        if cl.kind is not Kind.COLLAPSE:
            raise NotCollapsingError("Re omega_{-1}(0) >= -nu")
        xi = np.asarray(xi, dtype=complex)
        xp = (1j * self.v_c0 - cl.x_c) / cl.t_c
        xm = (-1j * self.v_c0 - cl.x_c) / cl.t_c
        f = 1j * ((xp + 1j * self.nu) / (xi - xp)
                  - (xm - 1j * self.nu) / (xi - xm))
        return np.real(f)

    def norms_closed_form(self) -> dict:
        om, v = self.omega_m1(), self.v_c()
        return {
            "linf": (abs(om) + abs(om.imag)) / v.real,
            "l2": np.sqrt(2.0 * np.pi) * abs(om) / np.sqrt(v.real),
        }

    def field(self, grid_size: int) -> SpectralField:
        return _field_from(self, grid_size)

    def gclm_params(self) -> GclmParams:
        return GclmParams(a=0.0, sigma=1.0, nu=self.nu)


# ---------------------------------------------------------------------------
# a = 0, sigma = 1 on the real line, two c.c. pairs of simple poles

@dataclass
class TwoPairS1State:
    omega_m1_1_0: complex = -2.0
    omega_m1_2_0: complex = 2.0
    v_c1_0: complex = 0.1
    v_c2_0: complex = 0.9
    nu: float = 1.0
    t: float = 0.0

    domain = Domain.LINE
    params_a = 0.0
    params_sigma = 1.0

    def __post_init__(self):
        for name in ("omega_m1_1_0", "omega_m1_2_0", "v_c1_0", "v_c2_0"):
            setattr(self, name, complex(getattr(self, name)))
        if self.v_c1_0.real <= 0 or self.v_c2_0.real <= 0:
            raise ValueError("Re v_cj(0) must be positive")

    @property
    def c0(self) -> complex:
        """Conserved total residue."""
        return self.omega_m1_1_0 + self.omega_m1_2_0

    @property
    def c1(self) -> complex:
        return self.omega_m1_1_0 - self.omega_m1_2_0

    def _root(self, ts):
        dv = self.v_c1_0 - self.v_c2_0
        ts = np.asarray(ts, dtype=float)
        if self.c0 == 0:
            rad = 1.0 + 4.0 * self.omega_m1_1_0 * ts / dv
        else:
            rad = 1.0 + 2.0 * self.c1 * ts / dv + self.c0**2 * ts**2 / dv**2
        return _continuous_sqrt(np.asarray(rad, dtype=complex))

    def values_at(self, t: float):
        """(omega_m1_1, omega_m1_2, v_c1, v_c2) at time t."""
        dv = self.v_c1_0 - self.v_c2_0
        vsum = self.v_c1_0 + self.v_c2_0
        npath = 256
        ts = np.linspace(0.0, t, npath) if t > 0 else np.array([0.0])
        s = self._root(ts)[-1]
        if self.c0 == 0:
            om1 = self.omega_m1_1_0 / s
            v1 = self.nu * t + 0.5 * dv * s + 0.5 * vsum
        else:
            om1 = 0.5 * self.c0 + 0.5 * (self.c1 + self.c0**2 * t / dv) / s
            v1 = (0.5 * self.c0 * t + self.nu * t + 0.5 * dv * s + 0.5 * vsum)
        om2 = self.c0 - om1
        v2 = -v1 + (2.0 * self.nu + self.c0) * t + vsum
        return om1, om2, v1, v2

    def advance(self, t: float) -> "TwoPairS1State":
        cl = self.classify()
        if cl.kind is Kind.COLLAPSE and t >= cl.t_c:
            raise PastCollapseError(f"t={t} >= t_c={cl.t_c}")
        return dataclasses.replace(self, t=t)

    def evaluate(self, x):
        x = np.asarray(x, dtype=complex)
        om1, om2, v1, v2 = self.values_at(self.t)
        out = (om1 / (x - 1j * v1) + np.conj(om1) / (x + 1j * np.conj(v1))
               + om2 / (x - 1j * v2) + np.conj(om2) / (x + 1j * np.conj(v2)))
        return np.real(out)

    def pole_distances(self, t: float) -> tuple[float, float]:
        _, _, v1, v2 = self.values_at(t)
        return v1.real, v2.real

    def _re_v_path(self, ts: np.ndarray, j: int) -> np.ndarray:
        """Re v_cj along a time path from 0 (branch-continuous, vectorized)."""
        ts = np.asarray(ts, dtype=float)
        dv = self.v_c1_0 - self.v_c2_0
        vsum = self.v_c1_0 + self.v_c2_0
        s = self._root(ts)
        drift = self.nu * ts if self.c0 == 0 \
            else (0.5 * self.c0 + self.nu) * ts
        v1 = drift + 0.5 * dv * s + 0.5 * vsum
        if j == 1:
            return np.real(v1)
        return np.real(-v1 + (2.0 * self.nu + self.c0) * ts + vsum)

    def _vdot(self, j: int, t: float) -> complex:
        om1, om2, _, _ = self.values_at(t)
        return self.nu + (om1 if j == 1 else om2)

    def classify(self) -> Classification:
        scale = max(self.v_c1_0.real, self.v_c2_0.real)
        hits = []
        for j in (1, 2):
            res = _first_zero(lambda t, j=j: self.pole_distances(t)[j - 1],
                              t_hint=max(1.0, scale),
                              f_vec=lambda ts, j=j: self._re_v_path(ts, j))
            if res is not None:
                hits.append((res[0], j, res[1]))
        if not hits:
            return Classification(Kind.GLOBAL)
        hits.sort()
        t_c, j, tangent = hits[0]
        if len(hits) == 2 and abs(hits[0][0] - hits[1][0]) < 1e-9 * max(t_c, 1.0):
            _, _, v1, v2 = self.values_at(t_c)
            if abs(v1 - v2) < 1e-9 * max(abs(v1), abs(v2), 1.0):
                raise HigherOrderUnknownError(
                    "both pole pairs reach the axis together")
        _, _, v1, v2 = self.values_at(min(t_c, t_c * (1 - 1e-12)))
        v = v1 if j == 1 else v2
        ab = 2.0 if tangent else 1.0
        return Classification(Kind.COLLAPSE, t_c=t_c, x_c=float(-v.imag),
                              alpha=ab, beta=ab)

    def similarity_profile(self, xi):
        cl = self.classify()
        if cl.kind is not Kind.COLLAPSE:
            raise NotCollapsingError("no pole pair reaches the axis")
        xi = np.asarray(xi, dtype=complex)
        eps = 1e-9 * cl.t_c
        om1, om2, v1, v2 = self.values_at(cl.t_c - eps)
        j = 1 if abs(v1.real) < abs(v2.real) else 2
        om = om1 if j == 1 else om2
        if cl.alpha == 1.0:
            vd = self._vdot(j, cl.t_c - eps)
            f = om / (xi + 1j * vd) + np.conj(om) / (xi - 1j * np.conj(vd))
        else:
            # tangential impact: second-order pole approach
            h = 1e-6 * cl.t_c
            vdd = (self._vdot(j, cl.t_c - eps)
                   - self._vdot(j, cl.t_c - eps - h)) / h
            f = (om / (xi - 0.5j * vdd)
                 + np.conj(om) / (xi + 0.5j * np.conj(vdd)))
        return np.real(f)

    def field(self, grid_size: int) -> SpectralField:
        return _field_from(self, grid_size)

    def gclm_params(self) -> GclmParams:
        return GclmParams(a=0.0, sigma=1.0, nu=self.nu)


@dataclass
class TwoPairDoublePoleLimitState:
    """Two-pair family seeded by a c.c. pair of double poles.

    Initial data w0 = 2iA [ (x - iV_c)^{-2} - (x + iV_c)^{-2} ]; each double
    pole splits into two simple poles at t = 0+.
    """

    amplitude: float = 4.0
    v_c: float = 1.0
    nu: float = 1.0
    t: float = 0.0

    domain = Domain.LINE
    params_a = 0.0
    params_sigma = 1.0

    def values_at(self, t: float):
        if t <= 0:
            raise ValueError("pole split is defined for t > 0")
        a, vc, nu = self.amplitude, self.v_c, self.nu
        om1 = -np.sqrt(a / (2.0 * t))
        v1 = nu * t - np.sqrt(2.0 * a * t) + vc
        v2 = nu * t + np.sqrt(2.0 * a * t) + vc
        return om1, -om1, v1, v2

    def advance(self, t: float) -> "TwoPairDoublePoleLimitState":
        cl = self.classify()
        if cl.kind is Kind.COLLAPSE and t >= cl.t_c:
            raise PastCollapseError(f"t={t} >= t_c={cl.t_c}")
        return dataclasses.replace(self, t=t)

    def evaluate(self, x):
        x = np.asarray(x, dtype=complex)
        if self.t == 0:
            a, vc = self.amplitude, self.v_c
            w = 2j * a * (1.0 / (x - 1j * vc) ** 2 - 1.0 / (x + 1j * vc) ** 2)
            return np.real(w)
        om1, om2, v1, v2 = self.values_at(self.t)
        out = (om1 / (x - 1j * v1) + om1 / (x + 1j * v1)
               + om2 / (x - 1j * v2) + om2 / (x + 1j * v2))
        return np.real(out)

    def classify(self) -> Classification:
        a, vc, nu = self.amplitude, self.v_c, self.nu
        thresh = 2.0 * nu * vc
        if a > thresh:
            d = a - nu * vc
            t_c = (d - np.sqrt(d * d - (nu * vc) ** 2)) / nu**2
            return Classification(Kind.COLLAPSE, t_c=float(t_c), x_c=0.0,
                                  alpha=1.0, beta=1.0)
        if a == thresh:
            return Classification(Kind.COLLAPSE, t_c=a / (2.0 * nu**2),
                                  x_c=0.0, alpha=2.0, beta=2.0)
        return Classification(Kind.GLOBAL)

    def field(self, grid_size: int) -> SpectralField:
        return _field_from(self, grid_size)

    def gclm_params(self) -> GclmParams:
        return GclmParams(a=0.0, sigma=1.0, nu=self.nu)


# ---------------------------------------------------------------------------
# a = 0, sigma = 0 on the real line

@dataclass
class OnePairS0State:
    omega_m1_0: complex = -2.0
    v_c0: complex = 1.0
    nu: float = 1.0
    t: float = 0.0

    domain = Domain.LINE
    params_a = 0.0
    params_sigma = 0.0

    def __post_init__(self):
        self.omega_m1_0 = complex(self.omega_m1_0)
        self.v_c0 = complex(self.v_c0)
        if self.v_c0.real <= 0:
            raise ValueError("Re v_c(0) must be positive")

    def omega_m1(self, t: float | None = None) -> complex:
        t = self.t if t is None else t
        return self.omega_m1_0 * np.exp(-self.nu * t)

    def v_c(self, t: float | None = None) -> complex:
        t = self.t if t is None else t
        if self.nu == 0:
            return self.omega_m1_0 * t + self.v_c0
        return (self.omega_m1_0 / self.nu * (1.0 - np.exp(-self.nu * t))
                + self.v_c0)

    def advance(self, t: float) -> "OnePairS0State":
        cl = self.classify()
        if cl.kind is Kind.COLLAPSE and t >= cl.t_c:
            raise PastCollapseError(f"t={t} >= t_c={cl.t_c}")
        return dataclasses.replace(self, t=t)

    def evaluate(self, x):
        x = np.asarray(x, dtype=complex)
        om, v = self.omega_m1(), self.v_c()
        return np.real(om / (x - 1j * v) + np.conj(om) / (x + 1j * np.conj(v)))

    def classify(self) -> Classification:
        om, v0, nu = self.omega_m1_0, self.v_c0, self.nu
        if nu == 0:
            if om.real >= 0:
                return Classification(Kind.GLOBAL)
            t_c = v0.real / (-om.real)
        else:
            crit = -nu * v0.real
            if om.real > crit:
                return Classification(Kind.GLOBAL)
            if om.real == crit:
                return Classification(Kind.STEADY)
            t_c = -np.log(1.0 + nu * v0.real / om.real) / nu
        x_c = om.imag / om.real * v0.real - v0.imag
        return Classification(Kind.COLLAPSE, t_c=float(t_c), x_c=float(x_c),
                              alpha=1.0, beta=1.0)

    def similarity_profile(self, xi):
        cl = self.classify()
        if cl.kind is not Kind.COLLAPSE:
            raise NotCollapsingError("poles never reach the axis")
        xi = np.asarray(xi, dtype=complex)
        om_c = self.omega_m1(cl.t_c)
        xp, xm = -1j * om_c, 1j * np.conj(om_c)
        f = 1j * (xp / (xi - xp) - xm / (xi - xm))
        return np.real(f)

    def norms_closed_form(self) -> dict:
        om, v = self.omega_m1(), self.v_c()
        return {
            "linf": (abs(om) + abs(om.imag)) / v.real,
            "l2": np.sqrt(2.0 * np.pi) * abs(om) / np.sqrt(v.real),
        }

    def field(self, grid_size: int) -> SpectralField:
        return _field_from(self, grid_size)

    def gclm_params(self) -> GclmParams:
        return GclmParams(a=0.0, sigma=0.0, nu=self.nu)


# ---------------------------------------------------------------------------
# a = 0, sigma = 0 on the circle: pole in tan(x/2)-space

@dataclass
class PeriodicPoleState:
    omega_m1_0: complex = -1.0
    v_c0: complex = 1.0
    nu: float = 1.0
    t: float = 0.0

    domain = Domain.CIRCLE
    params_a = 0.0
    params_sigma = 0.0

    def __post_init__(self):
        self.omega_m1_0 = complex(self.omega_m1_0)
        self.v_c0 = complex(self.v_c0)
        if self.v_c0.real <= 0:
            raise ValueError("Re v_c(0) must be positive")

    def _w(self) -> complex:
        """e^{nu t0} = 1 - nu (1 + v_c(0)) / omega_{-1}(0)."""
        return 1.0 - self.nu * (1.0 + self.v_c0) / self.omega_m1_0

    def omega_m1(self, t: float | None = None) -> complex:
        t = self.t if t is None else t
        if self.nu == 0:
            den = 1.0 - self.omega_m1_0 / (1.0 + self.v_c0) * t
            return self.omega_m1_0 / den**2
        w, e = self._w(), np.exp(-self.nu * t)
        return self.omega_m1_0 * e * ((w - 1.0) / (w - e)) ** 2

    def v_c(self, t: float | None = None) -> complex:
        t = self.t if t is None else t
        if self.nu == 0:
            r = self.omega_m1_0 / (1.0 + self.v_c0) * t
            return (self.v_c0 + r) / (1.0 - r)
        w, e = self._w(), np.exp(-self.nu * t)
        return -(1.0 + self.v_c0) * (1.0 - e) / (w - e) + self.v_c0

    def advance(self, t: float) -> "PeriodicPoleState":
        cl = self.classify()
        if cl.kind is Kind.COLLAPSE and t >= cl.t_c:
            raise PastCollapseError(f"t={t} >= t_c={cl.t_c}")
        return dataclasses.replace(self, t=t)

    def omega_minus(self, x):
        x = np.asarray(x, dtype=complex)
        om, v = self.omega_m1(), self.v_c()
        return om * (1.0 / (np.tan(x / 2.0) - 1j * v) - 1.0 / (-1j - 1j * v))

    def evaluate(self, x):
        return 2.0 * np.real(self.omega_minus(np.asarray(x, dtype=complex)))

    def _is_real_data(self) -> bool:
        return self.omega_m1_0.imag == 0 and self.v_c0.imag == 0

    def classify(self) -> Classification:
        om, v0, nu = self.omega_m1_0, self.v_c0, self.nu
        if om == 0:
            return Classification(Kind.GLOBAL)
        if nu == 0:
            x_big = (om.real * (1.0 + v0.imag**2 - v0.real**2)
                     - 2.0 * om.imag * v0.imag * v0.real)
            disc = (4.0 * abs(om) ** 2 * v0.real
                    * (abs(v0) ** 2 + 1.0 + 2.0 * v0.real) + x_big**2)
            t_c = (x_big + np.sqrt(disc)) / (2.0 * abs(om) ** 2)
            # the pole may instead escape to v_c = infinity (x_c = +-pi)
            # when the denominator 1 - omega_{-1}(0) t / (1 + v_c(0)) of the
            # inviscid solution vanishes first
            den = 1.0 - om * t_c / (1.0 + v0)
            if abs(den) < 1e-8:
                return Classification(Kind.COLLAPSE, t_c=float(t_c),
                                      x_c=np.pi, alpha=1.0, beta=1.0)
            vc = self.v_c(t_c)
            x_c = 2.0 * np.arctan(-vc.imag)
            return Classification(Kind.COLLAPSE, t_c=float(t_c),
                                  x_c=float(x_c), alpha=1.0, beta=1.0)
        if self._is_real_data():
            omr, vr = om.real, v0.real
            lo, hi = -nu * vr * (1.0 + vr), nu * (1.0 + vr)
            if lo < omr < hi:
                return Classification(Kind.GLOBAL)
            if omr == lo or omr == hi:
                return Classification(Kind.STEADY)
            if omr < lo:
                t_c = np.log(omr / (omr + nu * vr * (1.0 + vr))) / nu
                return Classification(Kind.COLLAPSE, t_c=float(t_c), x_c=0.0,
                                      alpha=1.0, beta=1.0)
            t_c = np.log(omr / (omr - nu * (1.0 + vr))) / nu
            return Classification(Kind.COLLAPSE, t_c=float(t_c), x_c=np.pi,
                                  alpha=1.0, beta=1.0)
        # complex data with dissipation: locate the first axis crossing or
        # escape to v_c = infinity numerically
        w = self._w()
        hits = []
        res = _first_zero(lambda t: self.v_c(t).real, t_hint=1.0,
                          f_vec=lambda ts: np.real(self.v_c(np.asarray(ts))))
        if res is not None:
            hits.append((res[0], "zero"))
        if w.imag == 0 and 0.0 < w.real < 1.0:
            hits.append((-np.log(w.real) / nu, "inf"))
        if not hits:
            return Classification(Kind.GLOBAL)
        hits.sort()
        t_c, how = hits[0]
        if how == "inf":
            return Classification(Kind.COLLAPSE, t_c=float(t_c), x_c=np.pi,
                                  alpha=1.0, beta=1.0)
        vc = self.v_c(t_c)
        return Classification(Kind.COLLAPSE, t_c=float(t_c),
                              x_c=float(2.0 * np.arctan(-vc.imag)),
                              alpha=1.0, beta=1.0)

    def similarity_profile(self, xi):
        cl = self.classify()
        if cl.kind is not Kind.COLLAPSE:
            raise NotCollapsingError("no collapse for this data")
        if cl.x_c not in (0.0,):
            raise NotImplementedError(
                "profile implemented for collapse at x_c = 0 only")
        xi = np.asarray(xi, dtype=complex)
        eps = 1e-9 * cl.t_c
        om_c = self.omega_m1(cl.t_c - eps)
        # near x = 0, tan(x/2) ~ x/2, pole velocity d v_c/dt = omega_{-1}
        f = 4.0 * np.real(om_c / (xi + 2j * om_c))
        return f

    def norms_closed_form(self) -> dict:
        om, v = self.omega_m1(), self.v_c()
        vr, vi = v.real, v.imag
        linf = ((abs(om) - om.imag) / vr
                + 2.0 * (om.imag * (1.0 + vr) - vi * om.real)
                / (vi**2 + (1.0 + vr) ** 2))
        l2 = (2.0 * np.sqrt(np.pi) * abs(om)
              / np.sqrt(vr * (vi**2 + (1.0 + vr) ** 2)))
        b0 = (abs(om) / vr
              * (np.sqrt((vi**2 + (1.0 - vr) ** 2)
                         / (vi**2 + (1.0 + vr) ** 2)) + 1.0))
        return {"linf": float(linf), "l2": float(l2), "b0": float(b0)}

    def field(self, grid_size: int) -> SpectralField:
        return _field_from(self, grid_size)

    def gclm_params(self) -> GclmParams:
        return GclmParams(a=0.0, sigma=0.0, nu=self.nu)


_FAMILIES = {
    "schochet": SchochetState,
    "doublepole": DoublePoleState,
    "onepair_s1": OnePairS1State,
    "twopair_s1": TwoPairS1State,
    "twopair_dp": TwoPairDoublePoleLimitState,
    "onepair_s0": OnePairS0State,
    "periodic_s0": PeriodicPoleState,
}


def family_from_name(name: str, **kwargs):
    try:
        cls = _FAMILIES[name.lower()]
    except KeyError:
        raise ValueError(
            f"unknown family {name!r}; choose from {sorted(_FAMILIES)}")
    return cls(**kwargs)
