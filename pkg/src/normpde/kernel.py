"""Difference-of-Gaussians perception kernel and the nonlocal gradient.

The kernel

    g(y) = 1/(2 mu) * 1/(sqrt(2 pi) sigma) * (exp(-((y-mu)/sigma)^2/2) - exp(-((y+mu)/sigma)^2/2))

is odd in ``y`` and has unit first moment, so ``G(P) = int P(x+y) g(y) dy``
tends to ``dP/dx`` as ``mu, sigma -> 0``.
"""

from dataclasses import dataclass
import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import integrate

from .errors import ConfigurationError, DegenerateKernelError

SUPPORT_SIGMAS = 6.0
MOMENT_SIGMAS = 8.0
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class KernelParams:
    mu: float
    sigma: float
    mu_min: float = -math.inf
    mu_max: float = math.inf
    sigma_min: float = 0.0
    sigma_max: float = math.inf

    def __post_init__(self):
        for name in ("mu", "sigma", "mu_min", "mu_max", "sigma_min", "sigma_max"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma)):
            raise ConfigurationError("kernel mu and sigma must be finite")
        if self.sigma <= 0:
            raise ConfigurationError("sigma: kernel width must be positive")
        if not (self.mu_min <= self.mu_max and 0 <= self.sigma_min <= self.sigma_max):
            raise ConfigurationError("kernel bounds are not well ordered")
        if not self.sigma_min <= self.sigma <= self.sigma_max:
            raise ConfigurationError(
                f"sigma: {self.sigma} outside [{self.sigma_min}, {self.sigma_max}]")
        if not self.mu_min <= self.mu <= self.mu_max:
            raise ConfigurationError(f"mu: {self.mu} outside [{self.mu_min}, {self.mu_max}]")

    @property
    def bounds(self):
        return (self.mu_min, self.mu_max, self.sigma_min, self.sigma_max)

    @property
    def support(self):
        return abs(self.mu) + SUPPORT_SIGMAS * self.sigma

    def replace(self, mu=None, sigma=None):
        return KernelParams(self.mu if mu is None else mu,
                            self.sigma if sigma is None else sigma, *self.bounds)


@dataclass(frozen=True)
class KernelField:
    """One ``(mu_i, sigma_i)`` pair per grid node, sharing a set of bounds."""

    mu: np.ndarray
    sigma: np.ndarray
    mu_min: float = -math.inf
    mu_max: float = math.inf
    sigma_min: float = 0.0
    sigma_max: float = math.inf

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float)
        sigma = np.array(self.sigma, dtype=float)
        if mu.shape != sigma.shape or mu.ndim != 1:
            raise ConfigurationError(
                "kernel field mu and sigma must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(sigma))):
            raise ConfigurationError("kernel field values must be finite")
        if np.any(sigma <= 0):
            raise ConfigurationError("sigma: kernel width must be positive")
        if not (self.mu_min <= self.mu_max and 0 <= self.sigma_min <= self.sigma_max):
            raise ConfigurationError("kernel bounds are not well ordered")
        if np.any(sigma < self.sigma_min) or np.any(sigma > self.sigma_max):
            raise ConfigurationError("sigma: kernel field leaves its bounds")
        if np.any(mu < self.mu_min) or np.any(mu > self.mu_max):
            raise ConfigurationError("mu: kernel field leaves its bounds")
        mu.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def uniform(cls, params, n):
        return cls(np.full(n, params.mu), np.full(n, params.sigma), *params.bounds)

    @property
    def bounds(self):
        return (self.mu_min, self.mu_max, self.sigma_min, self.sigma_max)

    @property
    def support(self):
        return float(np.max(np.abs(self.mu) + SUPPORT_SIGMAS * self.sigma))

    def __len__(self):
        return self.mu.size

    def __getitem__(self, i):
        return KernelParams(self.mu[i], self.sigma[i], *self.bounds)

    def replace(self, mu=None, sigma=None):
        return KernelField(self.mu if mu is None else mu,
                           self.sigma if sigma is None else sigma, *self.bounds)


def _kernel_values(y, mu, sigma):
    if np.any(np.asarray(mu) == 0):
        raise DegenerateKernelError("perception kernel is singular at mu = 0")
    a = (y - mu) / sigma
    b = (y + mu) / sigma
    return (_INV_SQRT_2PI / (2.0 * mu * sigma)) * (np.exp(-0.5 * a * a) - np.exp(-0.5 * b * b))


def kernel_scalar(y, mu, sigma):
    """``g(y)`` for a float ``y``; avoids array overhead inside quadrature loops."""
    a = (y - mu) / sigma
    b = (y + mu) / sigma
    return _INV_SQRT_2PI / (2.0 * mu * sigma) * (math.exp(-0.5 * a * a) - math.exp(-0.5 * b * b))


def eval_kernel(y, params):
    """Kernel value(s) ``g(y)`` for scalar or array ``y``."""
    return _kernel_values(np.asarray(y, dtype=float), params.mu, params.sigma)


def first_moment(params):
    """``int y g(y) dy`` by adaptive quadrature over ``|y| <= |mu| + 8 sigma``."""
    mu, sigma = params.mu, params.sigma
    if mu == 0:
        raise DegenerateKernelError("perception kernel is singular at mu = 0")
    half = abs(mu) + MOMENT_SIGMAS * sigma
    # the integrand is even, so integrate one side around the positive lobe
    val, _ = integrate.quad(lambda y: y * kernel_scalar(y, mu, sigma), 0.0, half,
                            points=[abs(mu)], limit=200, epsabs=1e-13, epsrel=1e-12)
    return 2.0 * val


def _half_width(support, dx):
    return int(math.ceil(support / dx - 1e-9))


def _check_support(support, grid):
    if support > grid.width:
        raise ConfigurationError(
            f"kernel support {support:.6g} exceeds the domain width {grid.width:.6g}")


def kernel_taps(params, dx):
    """Quadrature-weighted taps ``g(j dx) dx`` for ``j = -J..J``."""
    J = _half_width(params.support, dx)
    y = dx * np.arange(-J, J + 1)
    return eval_kernel(y, params) * dx


_PAD_MODES = {"mirror": "reflect", "clamp": "edge"}


def _pad(values, J, grid):
    if grid.periodic:
        return np.pad(values, J, mode="wrap")
    return np.pad(values, J, mode=_PAD_MODES[grid.extension])


def nonlocal_gradient(field, params, method="auto"):
    """Perceived gradient ``G_i = sum_j P(x_i + y_j) g(y_j) dy``.

    Beyond a wall ``P`` is mirrored about the wall node or clamped to its
    boundary value, following ``grid.extension``; periodic grids wrap.
    ``method`` is ``"direct"``, ``"spectral"`` (periodic grids with scalar
    parameters only) or ``"auto"``.
    """
    grid = field.grid
    P = field.values
    _check_support(params.support, grid)
    if isinstance(params, KernelField):
        if method == "spectral":
            raise ConfigurationError("spectral gradient needs scalar kernel parameters")
        return _gradient_per_node(P, params, grid)
    if method == "spectral" and not grid.periodic:
        raise ConfigurationError("spectral gradient requires periodic topology")
    taps = kernel_taps(params, grid.dx)
    if method == "spectral" or (method == "auto" and grid.periodic and taps.size > 64):
        return _gradient_spectral(P, taps)
    if method not in ("direct", "auto", "spectral"):
        raise ConfigurationError(f"unknown gradient method {method!r}")
    J = taps.size // 2
    return np.correlate(_pad(P, J, grid), taps, mode="valid")


def _gradient_spectral(P, taps):
    n = P.size
    J = taps.size // 2
    # G = P (*) h with h[m] = taps[-m], folded onto the period
    h = np.zeros(n)
    offsets = np.arange(-J, J + 1)
    np.add.at(h, (-offsets) % n, taps)
    return np.fft.irfft(np.fft.rfft(P) * np.fft.rfft(h), n)


def per_node_taps(params, dx):
    """Tap matrix of shape ``(n, 2J+1)``; row ``i`` holds node ``i``'s kernel."""
    J = _half_width(params.support, dx)
    y = dx * np.arange(-J, J + 1)
    return _kernel_values(y[None, :], params.mu[:, None], params.sigma[:, None]) * dx


def _gradient_per_node(P, params, grid):
    if len(params) != P.size:
        raise ConfigurationError("kernel field length does not match the grid")
    taps = per_node_taps(params, grid.dx)
    J = taps.shape[1] // 2
    windows = sliding_window_view(_pad(P, J, grid), 2 * J + 1)
    return np.einsum("ij,ij->i", windows, taps)


def gradient_strength(G, dx, periodic=False):
    """L2 norm ``sqrt(int G^2 dx)`` with the grid's quadrature weights."""
    G = np.asarray(G, dtype=float)
    w = np.full(G.size, float(dx))
    if not periodic:
        w[0] = w[-1] = 0.5 * dx
    return float(np.sqrt(np.dot(w, G * G)))
