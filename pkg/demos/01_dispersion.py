"""Which perturbations of a uniform population grow?

Compares the linear growth rate lambda(omega) with the rate the simulator
actually produces for a seeded sinusoid, then scans the whole band.
"""

import math

from normpde import KernelParams, PhysicsParams, dispersion_scan, growth_rate
from normpde.growth import periodic_growth_rate

kernel = KernelParams(mu=0.5, sigma=1.0)
phys = PhysicsParams(d=0.2, c=1.0)

print("omega   predicted    measured   rel.err")
for omega in (0.2, 0.5, 0.8):
    lam = growth_rate(omega, kernel, phys)
    meas = periodic_growth_rate(omega, kernel, phys, expected_rate=lam).rate
    print(f"{omega:5.2f}  {lam:10.6f}  {meas:10.6f}  {meas / lam - 1:+.2%}")

scan = dispersion_scan((2 * math.pi / 40, 5.0), 500, kernel, phys)
lo, hi = scan.unstable_band()
best = scan.most_unstable
print(f"\nunstable band on a 40-wide domain: omega in [{lo:.4f}, {hi:.4f}]")
print(f"fastest mode: omega = {best.omega:.4f} (wavelength {2 * math.pi / best.omega:.2f}), "
      f"lambda = {best.growth_rate:.4f}")

# strong diffusion and a potential: nothing grows faster than the background
strong = PhysicsParams(d=2.0, c=1.0)
scan = dispersion_scan((2 * math.pi / 40, 5.0), 500, kernel, strong, k=0.01)
print(f"\nd = 2, k = 0.01: unstable band {scan.unstable_band()}")
