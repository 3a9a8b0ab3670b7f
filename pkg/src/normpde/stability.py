"""Linear stability of the homogeneous state.

Seeding ``P = P_h + dP(t) sin(omega x + phi)`` and keeping terms linear in
``dP`` gives ``d(dP)/dt = lambda(omega) dP`` with

    lambda = -d omega^2 + c omega^2 P_h Q(omega) + 2k,
    Q(omega) = int sin(omega y)/omega g(y) dy = sin(omega mu) exp(-omega^2 sigma^2/2)/(omega mu).

The ``2k`` term is the potential's contribution close to ``x_target``; the
coupling term proportional to ``(x - x_target) omega`` is neglected, so the
result is only valid where ``|x - x_target| omega << 1``.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import integrate

from .errors import DegenerateKernelError, UnsupportedRegimeError
from .kernel import MOMENT_SIGMAS, kernel_scalar


@dataclass(frozen=True)
class DispersionPoint:
    omega: float
    q_value: float
    growth_rate: float
    unstable: bool
    growth_rate_no_potential: float


@dataclass(frozen=True)
class DispersionScan:
    points: list
    most_unstable: DispersionPoint = None

    @property
    def unstable_points(self):
        return [p for p in self.points if p.unstable]

    def unstable_band(self):
        """``(omega_lo, omega_hi)`` spanning the unstable points, or None."""
        bad = self.unstable_points
        if not bad:
            return None
        return bad[0].omega, bad[-1].omega


def q_closed_form(omega, mu, sigma):
    """Closed-form sine transform of the kernel; vectorised over its arguments."""
    omega = np.asarray(omega, dtype=float)
    if np.any(np.asarray(mu) == 0):
        raise DegenerateKernelError("perception kernel is singular at mu = 0")
    arg = omega * mu
    return np.sin(arg) / arg * np.exp(-0.5 * (omega * sigma) ** 2)


def q_function(omega, params):
    """``Q(omega)`` by oscillatory quadrature over the truncated kernel support."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    mu, sigma = params.mu, params.sigma
    if mu == 0:
        raise DegenerateKernelError("perception kernel is singular at mu = 0")
    half = abs(mu) + MOMENT_SIGMAS * sigma
    # sin(omega y) g(y) is even in y: integrate [0, half] with QAWO
    val, _ = integrate.quad(kernel_scalar, 0.0, half, args=(mu, sigma),
                            weight="sin", wvar=omega, limit=400,
                            epsabs=1e-14, epsrel=1e-12)
    return 2.0 * val / omega


def growth_rate(omega, params, phys, p_h=1.0, k=0.0, q=None):
    """Linear growth rate ``lambda(omega)`` of a sinusoidal perturbation."""
    if q is None:
        q = float(q_closed_form(omega, params.mu, params.sigma))
    return -phys.d * omega**2 + phys.c * omega**2 * p_h * q + 2.0 * k


def instability_condition(omega, params, phys, p_h=1.0, k=0.0, q=None):
    """Pattern-forming inequality ``Q > (d - 2k/omega^2)/(c P_h)``."""
    cp = phys.c * p_h
    if cp <= 0:
        raise UnsupportedRegimeError("instability condition needs c * P_h > 0")
    if q is None:
        q = float(q_closed_form(omega, params.mu, params.sigma))
    return bool(q > (phys.d - 2.0 * k / omega**2) / cp)


def dispersion_scan(omega_range, n_points, params, phys, p_h=1.0, k=0.0, quadrature=False):
    """Evaluate the dispersion relation on ``n_points`` evenly spaced wavenumbers."""
    lo, hi = omega_range
    if not 0 < lo < hi:
        raise ValueError("omega_range must be positive and increasing")
    points = []
    for omega in np.linspace(lo, hi, n_points):
        omega = float(omega)
        q = q_function(omega, params) if quadrature else float(
            q_closed_form(omega, params.mu, params.sigma))
        lam = growth_rate(omega, params, phys, p_h, k, q=q)
        points.append(DispersionPoint(omega, q, lam, lam > 0,
                                      growth_rate(omega, params, phys, p_h, 0.0, q=q)))
    best = max(points, key=lambda p: p.growth_rate)
    return DispersionScan(points, best if best.unstable else None)


def critical_migration(omega, params, d, p_h=1.0, k=0.0):
    """Migration coefficient ``c`` at which ``lambda(omega) = 0``."""
    q = float(q_closed_form(omega, params.mu, params.sigma))
    if q <= 0:
        return math.inf
    return (d - 2.0 * k / omega**2) / (p_h * q)
