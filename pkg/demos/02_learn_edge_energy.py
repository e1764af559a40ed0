"""Learning the spring energy from sampled unit-cell data.

The energy of one spring is a function of three invariant features:
the two endpoint rotations relative to the spring axis and the
elongation.  Here the "measurements" come from the bistable analytic
oracle; in production they would be ingested from a CSV of unit-cell
simulations.  A Gaussian process and three reference MLPs are trained
on the same 80/10/10 split and compared by scaled mean squared error.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import springlattice as sl

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)
SEED = 7

oracle = sl.AnalyticOracle.bistable()
features = sl.sample_features(1000, l0=1.0, seed=SEED)
energies = oracle.energy(features)
split = sl.split_dataset(1000, seed=SEED)
bounds = sl.training_bounds(energies[split.train])
print(f"dataset: 1000 samples -> {len(split.train)}/{len(split.validation)}/{len(split.test)} split")

print("\ntraining the GP (hyperparameters by marginal-likelihood search)...")
gpr = sl.train_gpr(
    features[split.train], energies[split.train], restarts=4, seed=0, y_bounds=bounds
)
hp = gpr.hyperparams
print(f"  sigma2 {hp.sigma2:.3g}, length scale {hp.length_scale:.3g}, noise2 {hp.noise2:.3g}")

results = {}
val = lambda m: sl.smse(m.energy(features[split.validation]), energies[split.validation], bounds)
results["gpr"] = (val(gpr), gpr)

for i, arch in enumerate(sl.STANDARD_ARCHITECTURES, start=1):
    print(f"training mlp#{i} ({arch.hidden_layers} hidden layers x {arch.width})...")
    model, history = sl.train_mlp(
        features[split.train], energies[split.train], arch, seed=0,
        val_features=features[split.validation], val_energies=energies[split.validation],
    )
    results[f"mlp#{i}"] = (history.val_smse[history.best_epoch], model)

print("\nvalidation SMSE (scaling frozen from the training targets):")
for name, (err, _) in results.items():
    print(f"  {name:6s} {err:.3e}")

best_name, (_, best) = min(results.items(), key=lambda kv: kv[1][0])
test_err = sl.smse(best.energy(features[split.test]), energies[split.test], bounds)
print(f"\nbest by validation: {best_name}; held-out test SMSE {test_err:.3e}")

# prediction vs truth on the test split
lo, hi = bounds
truth = (energies[split.test] - lo) / (hi - lo)
pred = (np.asarray(best.energy(features[split.test])) - lo) / (hi - lo)
fig, ax = plt.subplots(figsize=(4.5, 4.5))
ax.plot([0, 1], [0, 1], "k--", lw=1)
ax.plot(truth, pred, "r.", ms=4)
ax.set_xlabel("scaled true energy")
ax.set_ylabel("scaled predicted energy")
ax.set_title(f"{best_name} on held-out data")
fig.tight_layout()
fig.savefig(OUT / "prediction_vs_truth.png", dpi=120)

# the landscape the surrogate learned: one well stretched, two compressed
fig, axes = plt.subplots(1, 2, figsize=(9, 4))
for ax, d in zip(axes, (-0.2, 0.2)):
    axis_a, axis_b, grid = sl.contour.energy_grid(best, d, resolution=81)
    c = ax.contourf(axis_a, axis_b, grid.T, levels=30, cmap="viridis")
    ax.set_title(f"d = {d:+.1f} l0: {sl.contour.count_local_minima(grid)} minima")
    ax.set_xlabel("theta_a")
    ax.set_ylabel("theta_b")
    fig.colorbar(c, ax=ax)
fig.tight_layout()
fig.savefig(OUT / "energy_contours.png", dpi=120)
print(f"wrote {OUT / 'prediction_vs_truth.png'} and {OUT / 'energy_contours.png'}")

sl.serialize.save_model(best, OUT / "edge_energy_model.json")
print(f"saved the selected model to {OUT / 'edge_energy_model.json'}")
