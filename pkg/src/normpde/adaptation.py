"""Kernel-parameter adaptation regimes.

* target-driven: ``sigma`` and ``mu`` both grow by ``eta * d_avg`` while the
  weighted Wasserstein distance to the target exceeds ``tau``, then clip.
* causal: a net causal drive moves ``mu`` and ``sigma`` every step by
  ``drive * adaptation_factor(|G|) * dt * time_amplification(t_elapsed)``.
"""

import csv
from dataclasses import dataclass, field
import math
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .kernel import KernelParams, gradient_strength

MU_GUARD = 1e-6


@dataclass(frozen=True)
class TargetDrivenConfig:
    eta: float
    tau: float
    activation_time: float = 0.0

    def __post_init__(self):
        if not self.eta > 0:
            raise ConfigurationError("eta: learning rate must be positive")
        if not self.tau >= 0:
            raise ConfigurationError("tau: convergence threshold must be non-negative")


@dataclass(frozen=True)
class CausalFact:
    name: str
    effect_size: float
    causal_effect: float


@dataclass(frozen=True)
class CausalDrive:
    """Net drives for ``mu`` and ``sigma`` per unit time.

    Either ``facts`` are given and ``delta_mu`` is their aggregated impact, or
    ``delta_mu`` is supplied directly.  ``delta_sigma`` is always explicit.
    """

    delta_mu: float
    delta_sigma: float
    facts: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "facts", tuple(self.facts))
        if not (math.isfinite(self.delta_mu) and math.isfinite(self.delta_sigma)):
            raise ConfigurationError("causal drives must be finite")

    @classmethod
    def from_facts(cls, facts, delta_sigma):
        facts = tuple(facts)
        return cls(net_causal_effect(facts), delta_sigma, facts)


def net_causal_effect(facts):
    """Sum of effect size times causal effect over all facts."""
    total = 0.0
    for f in facts:
        if isinstance(f, CausalFact):
            total += f.effect_size * f.causal_effect
        else:
            es, ce = f[-2], f[-1]
            total += es * ce
    return total


def read_facts(path):
    """Facts CSV with columns ``fact, effect_size_value, causal_effect``."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(row for row in fh if not row.lstrip().startswith("#"))
        need = {"fact", "effect_size_value", "causal_effect"}
        if reader.fieldnames is None or not need <= set(reader.fieldnames):
            raise ConfigurationError(f"{path}: header must contain {sorted(need)}")
        facts = []
        for n, row in enumerate(reader, 2):
            try:
                facts.append(CausalFact(row["fact"].strip(), float(row["effect_size_value"]),
                                        float(row["causal_effect"])))
            except (TypeError, ValueError):
                raise ConfigurationError(f"{path}:{n}: malformed fact row") from None
    return facts


def _skip_guard(mu, step):
    """Keep ``mu`` out of ``(-MU_GUARD, MU_GUARD)``, jumping across in the step direction."""
    mu = np.asarray(mu, dtype=float)
    step = np.broadcast_to(np.asarray(step, dtype=float), mu.shape)
    inside = np.abs(mu) < MU_GUARD
    if np.any(inside):
        side = np.where(step > 0, 1.0, np.where(step < 0, -1.0, np.sign(mu)))
        side = np.where(side == 0, 1.0, side)
        mu = np.where(inside, side * MU_GUARD, mu)
    return mu


def _clip_kernel(kernel, mu, sigma):
    mu = np.clip(mu, kernel.mu_min, kernel.mu_max)
    sigma = np.clip(sigma, kernel.sigma_min, kernel.sigma_max)
    if isinstance(kernel, KernelParams):
        return kernel.replace(mu=float(mu), sigma=float(sigma))
    return kernel.replace(mu=mu, sigma=sigma)


def target_driven_update(kernel, d_avg, cfg):
    """One clipped update of both kernel parameters by ``eta * d_avg``."""
    if not d_avg > cfg.tau:
        return kernel
    inc = cfg.eta * d_avg
    mu = _skip_guard(np.asarray(kernel.mu) + inc, inc)
    if isinstance(kernel, KernelParams):
        mu = float(mu)
    return _clip_kernel(kernel, mu, np.asarray(kernel.sigma) + inc)


def adaptation_factor(strength):
    """Maps gradient strength into (0, 1): ``0.5 (1 + tanh(strength - 0.5))``."""
    if strength < 0:
        raise ValueError("gradient strength must be non-negative")
    return 0.5 * (1.0 + math.tanh(strength - 0.5))


def time_amplification(t_elapsed):
    """Linear amplification that doubles every 100 time units."""
    if t_elapsed < 0:
        raise ValueError("elapsed time must be non-negative")
    return 1.0 + 0.01 * t_elapsed


def causal_increment(drive_rate, strength, dt, t_elapsed):
    return drive_rate * adaptation_factor(strength) * dt * time_amplification(t_elapsed)


def causal_update(kernel, drive, G, dt, t_elapsed, dx, periodic=False):
    """Advance kernel parameters under a causal drive over one step ``dt``.

    In per-node mode every node receives the same increment, computed from
    the global gradient strength.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    strength = gradient_strength(G, dx, periodic)
    dmu = causal_increment(drive.delta_mu, strength, dt, t_elapsed)
    dsig = causal_increment(drive.delta_sigma, strength, dt, t_elapsed)
    if dmu == 0 and dsig == 0:
        return kernel
    mu = _skip_guard(np.asarray(kernel.mu) + dmu, dmu)
    sigma = np.asarray(kernel.sigma) + dsig
    if isinstance(kernel, KernelParams):
        mu, sigma = float(mu), float(sigma)
    return _clip_kernel(kernel, mu, sigma)
