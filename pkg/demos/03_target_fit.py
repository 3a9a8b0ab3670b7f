"""Adapting the perception kernel until beliefs match a target norm.

The kernel is held fixed while two camps form, then mu and sigma grow in
proportion to the belief-weighted Wasserstein distance to the target.
The distance trace shows convergence; the final kernel sits inside its
bounds.
"""

from normpde.scenario import load_scenario, run_scenario, shipped_scenario

cfg = load_scenario(shipped_scenario("exp1_synthetic_target_desk"))
report = run_scenario(cfg.with_changes(output={"dir": None}))

print("   t     d_avg")
for t, d in report.d_avg_history[::10]:
    print(f"{t:5.0f}  {d:8.4f}")
d150 = dict(report.d_avg_history)[150.0]
print(f"\nat activation {d150:.4f}, at the end {report.final_d_avg:.4f} "
      f"(ratio {report.final_d_avg / d150:.3f})")
print(f"final kernel: mu = {report.kernel.mu:.3f}, sigma = {report.kernel.sigma:.3f}")
