"""Tour of the core energy model: problems, energies, flip deltas, samples.

Run: python demos/energy_model_tour.py
"""

import numpy as np

from spinbench import IsingProblem, SampleSet, energy, energy_delta_flip, flip

# A three-spin problem with a field, a coupler, and one cubic term:
#   E(s) = s0 - s0*s1 + 0.5*s0*s1*s2
problem = IsingProblem(
    num_spins=3,
    linear={0: 1.0},
    quadratic={(0, 1): -1.0},
    cubic={(0, 1, 2): 0.5},
)
print(problem)

print("\nAll eight configurations:")
for bits in range(8):
    s = np.array([1 - 2 * ((bits >> i) & 1) for i in range(3)], dtype=np.int8)
    print(f"  s={tuple(int(x) for x in s)}  E={energy(problem, s):+.2f}")

s = np.array([1, 1, 1], dtype=np.int8)
print(f"\nStart at {tuple(int(x) for x in s)}, E = {energy(problem, s):+.2f}")
for i in range(3):
    delta = energy_delta_flip(problem, s, i)
    check = energy(problem, flip(s, i)) - energy(problem, s)
    print(f"  flipping spin {i}: delta = {delta:+.2f} (full re-evaluation: {check:+.2f})")

# Sample sets aggregate repeated configurations and track timing.
configs = np.array([[1, 1, 1], [1, 1, 1], [-1, 1, 1], [1, -1, -1]], dtype=np.int8)
samples = SampleSet.from_configs(problem, configs, sampler="demo", wall_time_ms=8.0)
print(f"\nSampleSet: {samples.total_multiplicity} samples, "
      f"t_sample = {samples.meta.t_sample_ms} ms")
for e in samples.entries:
    print(f"  config {tuple(int(x) for x in e.config)}  E={e.energy:+.2f}  x{e.multiplicity}")
print(f"best energy: {samples.best.energy:+.2f}, mean: {samples.mean_energy():+.3f}")
