"""Real periodic fields in Fourier representation and the basic symbols.

A field w(x) is stored through its complex Fourier coefficients w_k for
k = -N..N-1 on the uniform grid x_j = -pi + pi*j/N (2N points). On the
compactified line the same machinery is used in the variable q, with
x = tan(q/2).
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Domain",
    "SpectralField",
    "GclmParams",
    "NormReport",
    "hilbert",
    "lambda_sigma",
    "derivative",
    "velocity_from_omega",
    "velocity_line",
    "c_omega_q",
    "project_zero_mean",
    "norms",
    "write_snapshot",
    "read_snapshot",
]

#: grid points this close to q = +-pi (in 1 + cos q) are treated as singular
EPS_JACOBIAN = 1e-10

#: fraction of the spectrum counted as the "tail" band
TAIL_BAND_FRACTION = 0.125


class Domain(enum.Enum):
    CIRCLE = "circle"
    LINE = "line"


def _check_grid_size(n: int) -> None:
    if n < 8 or (n & (n - 1)) != 0:
        raise ValueError(f"grid_size must be a power of two >= 8, got {n}")


@dataclass
class SpectralField:
    """Fourier representation of a real field on 2N uniform grid points.

    ``coeffs`` is held in FFT ordering (k = 0..N-1, -N..-1). Conjugate
    symmetry w_{-k} = conj(w_k) is an invariant; use :meth:`symmetrize`
    after constructing coefficients by hand.
    """

    coeffs: np.ndarray
    domain: Domain = Domain.CIRCLE

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.ndim != 1 or self.coeffs.size % 2:
            raise ValueError("coeffs must be a 1d array of even length")
        _check_grid_size(self.coeffs.size // 2)

    @property
    def grid_size(self) -> int:
        """N; the field carries 2N modes, k = -N..N-1."""
        return self.coeffs.size // 2

    @property
    def n_points(self) -> int:
        return self.coeffs.size

    def wavenumbers(self) -> np.ndarray:
        m = self.coeffs.size
        return np.fft.fftfreq(m, d=1.0 / m).astype(int)

    def grid(self) -> np.ndarray:
        """Collocation nodes x_j (or q_j on the line) in [-pi, pi)."""
        m = self.coeffs.size
        return -np.pi + 2.0 * np.pi * np.arange(m) / m

    # The grid starts at -pi, so physical<->spectral transforms carry the
    # phase factor e^{-ik pi} = (-1)^k relative to a plain FFT.
    def _phase(self) -> np.ndarray:
        return np.where(self.wavenumbers() % 2 == 0, 1.0, -1.0)

    def values(self) -> np.ndarray:
        m = self.coeffs.size
        v = np.fft.ifft(self.coeffs * self._phase()) * m
        return v.real

    @classmethod
    def from_grid(cls, values, domain: Domain = Domain.CIRCLE) -> "SpectralField":
        values = np.asarray(values, dtype=float)
        m = values.size
        f = cls(np.zeros(m, dtype=complex), domain)
        f.coeffs = np.fft.fft(values) / m * f._phase()
        f.symmetrize()
        return f

    @classmethod
    def from_function(cls, func, grid_size: int,
                      domain: Domain = Domain.CIRCLE) -> "SpectralField":
        _check_grid_size(grid_size)
        x = -np.pi + np.pi * np.arange(2 * grid_size) / grid_size
        return cls.from_grid(func(x), domain)

    def copy(self) -> "SpectralField":
        return SpectralField(self.coeffs.copy(), self.domain)

    def symmetrize(self) -> None:
        """Project onto real fields: w_{-k} <- (w_{-k} + conj(w_k))/2.

        The k = -N mode has no +N partner and must be real; its imaginary
        part is dropped.
        """
        c = self.coeffs
        n = self.grid_size
        ks = np.arange(1, n)
        avg = 0.5 * (c[ks] + np.conj(c[-ks]))
        c[ks] = avg
        c[-ks] = np.conj(avg)
        c[0] = c[0].real
        c[n] = c[n].real

    def conjugate_symmetry_defect(self) -> float:
        """Relative departure from w_{-k} = conj(w_k)."""
        c = self.coeffs
        n = self.grid_size
        ks = np.arange(1, n)
        num = np.max(np.abs(c[ks] - np.conj(c[-ks]))) if n > 1 else 0.0
        num = max(num, abs(c[0].imag), abs(c[n].imag))
        scale = np.max(np.abs(c))
        return num / scale if scale > 0 else 0.0

    def zero_pad(self, factor: int = 2) -> "SpectralField":
        """Double (or more) the resolution by zero padding; grid values are
        unchanged up to round-off (Fourier interpolation)."""
        n = self.grid_size
        n_new = n * factor
        out = np.zeros(2 * n_new, dtype=complex)
        k = self.wavenumbers()
        out[k] = self.coeffs  # integer fancy-indexing respects negative k
        # split the unpaired -N mode between +-N so the result is symmetric
        out[n] = 0.5 * self.coeffs[n].real
        out[-n] = 0.5 * self.coeffs[n].real
        return SpectralField(out, self.domain)

    def tail_magnitude(self) -> float:
        """max |w_k| over the top TAIL_BAND_FRACTION of wavenumbers."""
        k = np.abs(self.wavenumbers())
        band = k >= (1.0 - TAIL_BAND_FRACTION) * self.grid_size
        return float(np.max(np.abs(self.coeffs[band])))


@dataclass
class GclmParams:
    """Equation parameters: w_t = -a u w_x + w H(w) - nu Lambda^sigma w."""

    a: float = 0.0
    sigma: float = 1.0
    nu: float = 1.0
    omega_av: float = 0.0

    def validate(self, domain: Domain) -> None:
        if self.nu < 0:
            raise ValueError("nu must be >= 0")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if domain is Domain.LINE:
            if self.sigma not in (0, 1, 2):
                raise ValueError(
                    "on the compactified line sigma must be one of {0, 1, 2}")
            if self.omega_av != 0.0:
                raise ValueError("omega_av is fixed to 0 on the line")


@dataclass
class NormReport:
    l2: float
    linf: float
    b0: float
    mean: float
    kinetic_energy: float
    b0_tail: float = 0.0
    ek_truncated: bool = False  # line quadrature saw mass near q = +-pi


def _apply_symbol(f: SpectralField, symbol: np.ndarray) -> SpectralField:
    return SpectralField(f.coeffs * symbol, f.domain)


def hilbert(f: SpectralField) -> SpectralField:
    """Hilbert transform: multiply by -i sgn(k); the mean is annihilated."""
    k = f.wavenumbers()
    return _apply_symbol(f, -1j * np.sign(k))


def lambda_sigma(f: SpectralField, sigma: float) -> SpectralField:
    """Fractional dissipation symbol |k|^sigma; Lambda^0 is the identity."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return f.copy()
    k = np.abs(f.wavenumbers()).astype(float)
    return _apply_symbol(f, k**sigma)


def derivative(f: SpectralField, order: int = 1) -> SpectralField:
    k = f.wavenumbers().astype(float)
    return _apply_symbol(f, (1j * k) ** order)


def project_zero_mean(f: SpectralField) -> SpectralField:
    out = f.copy()
    out.coeffs[0] = 0.0
    return out


def velocity_from_omega(f: SpectralField) -> SpectralField:
    """Zero-mean velocity on the circle: u_k = H(w)_k / (ik), u_0 = 0."""
    k = f.wavenumbers().astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        sym = np.where(k != 0, -1.0 / np.abs(k), 0.0)
    return _apply_symbol(f, sym)


def c_omega_q(f: SpectralField) -> float:
    """Constant making H^q w + C vanish at q = +-pi (line velocity recovery).

    Equals -(1/2pi) PV int w(q') tan(q'/2) dq', evaluated spectrally as
    -H^q w (pi) so the grid singularity at q' = +-pi never appears.
    """
    k = f.wavenumbers()
    val = np.sum(-1j * np.sign(k) * f.coeffs * np.where(k % 2 == 0, 1.0, -1.0))
    return float(-val.real)


def _fill_singular_points(values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Replace masked entries by 4th-order symmetric interpolation from
    periodic neighbours (masked points are isolated, at q = +-pi)."""
    out = values.copy()
    m = values.size
    for j in np.nonzero(mask)[0]:
        f1 = values[(j + 1) % m] + values[(j - 1) % m]
        f2 = values[(j + 2) % m] + values[(j - 2) % m]
        out[j] = (4.0 * f1 - f2) / 6.0
    return out


def velocity_line(f: SpectralField) -> SpectralField:
    """Velocity on the compactified line from (1+cos q) u_q = H^q w + C.

    The quotient is formed in physical space away from q = +-pi, the
    isolated singular node is filled by interpolation, and u is obtained
    by spectral integration with the constant fixed so u(+-pi) = 0
    (u vanishes at x = +-infinity, matching the exact solutions).
    """
    q = f.grid()
    jac = 1.0 + np.cos(q)
    num = hilbert(f).values() + c_omega_q(f)
    mask = jac < EPS_JACOBIAN
    uq = np.where(mask, 0.0, num / np.where(mask, 1.0, jac))
    uq = _fill_singular_points(uq, mask)
    g = SpectralField.from_grid(uq, f.domain)
    k = g.wavenumbers().astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        g.coeffs = np.where(k != 0, g.coeffs / (1j * k), 0.0)
    g.symmetrize()
    u = g.values()
    # subtract the value at q = -pi (grid node 0)
    return SpectralField.from_grid(u - u[0], f.domain)


def norms(f: SpectralField) -> NormReport:
    """L2, Linf, Wiener (B0) norm, mean and kinetic energy of the field."""
    c = f.coeffs
    absc = np.abs(c)
    b0 = float(np.sum(absc))
    vals = f.values()
    linf = float(np.max(np.abs(vals)))
    mean = float(c[0].real)
    ek_truncated = False
    if f.domain is Domain.CIRCLE:
        l2 = float(np.sqrt(2.0 * np.pi * np.sum(absc**2)))
        u = velocity_from_omega(f)
        ek = float(np.pi * np.sum(np.abs(u.coeffs) ** 2))
    else:
        # physical (x-space) quadratures: dx = dq / (1 + cos q)
        q = f.grid()
        jac = 1.0 + np.cos(q)
        mask = jac < EPS_JACOBIAN
        dq = 2.0 * np.pi / f.n_points
        safe = np.where(mask, 1.0, jac)

        def x_integral(numer):
            integrand = np.where(mask, 0.0, numer / safe)
            integrand = _fill_singular_points(integrand, mask)
            return float(np.sum(integrand) * dq)

        l2 = float(np.sqrt(x_integral(vals**2)))
        u = velocity_line(f).values()
        ek = 0.5 * x_integral(u**2)
        integrand = _fill_singular_points(
            np.where(mask, 0.0, u**2 / safe), mask)
        # quadrature is untrusted when the integrand has not decayed
        # approaching q = +-pi
        near = np.abs(np.abs(q) - np.pi * (1.0 - 1.0 / f.grid_size)) < dq / 2
        if np.any(near) and np.max(integrand[near]) > 1e-8 * max(
                np.max(integrand), 1e-300):
            ek_truncated = True
    return NormReport(l2=l2, linf=linf, b0=b0, mean=mean, kinetic_energy=ek,
                      b0_tail=f.tail_magnitude(), ek_truncated=ek_truncated)


# ---------------------------------------------------------------------------
# snapshot file format: '# gclm-field v1 domain=<circle|line> t=<...>',
# then time, N, and 2N coefficients for k = -N..N-1 as 're im' lines.

def write_snapshot(f: SpectralField, t: float, fh) -> None:
    own = isinstance(fh, (str, bytes))
    stream = open(fh, "w") if own else fh
    try:
        n = f.grid_size
        stream.write(f"# gclm-field v1 domain={f.domain.value} t={t!r}\n")
        stream.write(f"{t!r}\n{n}\n")
        ordered = f.coeffs[np.arange(-n, n)]
        for z in ordered:
            stream.write(f"{float(z.real)!r} {float(z.imag)!r}\n")
    finally:
        if own:
            stream.close()


def read_snapshot(fh) -> tuple[SpectralField, float]:
    own = isinstance(fh, (str, bytes))
    stream = open(fh, "r") if own else fh
    try:
        header = stream.readline().strip()
        if not header.startswith("# gclm-field v1"):
            raise ValueError(f"not a gclm-field snapshot: {header!r}")
        domain = Domain.CIRCLE if "domain=circle" in header else Domain.LINE
        t = float(stream.readline())
        n = int(stream.readline())
        coeffs = np.zeros(2 * n, dtype=complex)
        ks = np.arange(-n, n)
        for k in ks:
            re, im = stream.readline().split()
            coeffs[k] = float(re) + 1j * float(im)
        return SpectralField(coeffs, domain), t
    finally:
        if own:
            stream.close()
