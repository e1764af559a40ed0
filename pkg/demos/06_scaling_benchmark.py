"""Per-step wall time across lattice sizes.

One integrator step costs one force assembly, which is linear in the
number of springs, so doubling both grid dimensions should roughly
quadruple the step time.  The GPR surrogate dominates the cost: each
spring evaluates a kernel against all of its training points.
"""

import springlattice as sl

oracle = sl.AnalyticOracle.bistable()
features = sl.sample_features(800, seed=30)
gpr = sl.fit_gpr(features, oracle.energy(features), sl.GprHyperparams(0.672, 0.890, 5e-5))

print("model: GPR with 800 training points\n")
sizes = [(8, 8), (16, 16), (32, 32), (64, 64), (128, 128)]
report = sl.bench_scaling(sizes, gpr, steps=3, repetitions=5)

print(f"{'size':>10s} {'springs':>9s} {'ms/step':>10s} {'+/-':>7s} {'us/spring':>10s}")
for e in report.entries:
    per_edge = e.per_step_mean / e.n_edges * 1e6
    print(
        f"{e.rows:>4d}x{e.cols:<5d} {e.n_edges:>9d} {e.per_step_mean * 1e3:>10.2f} "
        f"{e.per_step_std * 1e3:>7.2f} {per_edge:>10.2f}"
    )

first, last = report.entries[0], report.entries[-1]
edge_ratio = last.n_edges / first.n_edges
time_ratio = last.per_step_mean / first.per_step_mean
print(f"\n{first.rows}x{first.cols} -> {last.rows}x{last.cols}: "
      f"{edge_ratio:.0f}x the springs, {time_ratio:.0f}x the time")
