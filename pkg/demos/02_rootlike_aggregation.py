"""A nearly uniform population splits into opinion clusters.

Runs the root-like baseline at desk resolution and reports how the number
of clusters and the mean opinion evolve.  The weak potential toward x = 5
switches on once two clusters coexist.
"""

from normpde import center_of_mass
from normpde.scenario import desk_scale, load_scenario, run_scenario, shipped_scenario

cfg = desk_scale(load_scenario(shipped_scenario("baseline_rootlike")))
report = run_scenario(cfg.with_changes(output={"dir": None}))

print("   t   clusters   mean opinion")
for snap, rec in zip(report.snapshots[::4], report.records[::4]):
    print(f"{rec.time:5.0f}   {rec.cluster_count:8d}   {center_of_mass(snap):+12.4f}")
print()
print(report.summary())
