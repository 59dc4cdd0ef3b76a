"""Spin-reversal compression of spin-glass couplings into a chip range.

On a sparse planar spin glass with couplings in [-1, 1], the couplings
stronger than 0.5 usually induce a forest, so a linear-time spin-reversal
transform can make them all negative. The asymmetric hardware range [-2, 1]
then admits twice the energy scale.

Run: python demos/coupling_compression.py
"""

import numpy as np

from spinbench import (
    CompressionError,
    compress_couplings,
    energy_scale,
    gen_heavy_hex,
    gen_planar_spin_glass,
)

topology = gen_heavy_hex("heron133")
seed = 0
while True:
    problem = gen_planar_spin_glass(topology, seed)
    try:
        transform, compressed = compress_couplings(problem, strong_threshold=0.5)
        break
    except CompressionError as exc:
        print(f"seed {seed}: frustrated strong cycle {exc.cycle}, trying the next seed")
        seed += 1

before = np.array(list(problem.quadratic.values()))
after = np.array(list(compressed.quadratic.values()))
print(f"instance: {problem.num_spins} spins, {before.size} couplings (seed {seed})")
print(f"flips: {len(transform.flip_set)} spins")
print(f"coupling range before: [{before.min():+.3f}, {before.max():+.3f}]")
print(f"coupling range after:  [{after.min():+.3f}, {after.max():+.3f}]  (target [-1, 0.5])")
print(f"doubled couplings lie in [{2 * after.min():+.3f}, {2 * after.max():+.3f}]"
      "  (chip range [-2, 1])")

s0 = energy_scale(problem, (-2.0, 1.0))
s1 = energy_scale(compressed, (-2.0, 1.0))
print(f"\nadmissible energy scale: {s0:.4f} -> {s1:.4f}  (ratio {s1 / s0:.4f})")

# a frustrated strong cycle genuinely cannot be compressed
from spinbench import IsingProblem

triangle = IsingProblem(3, quadratic={(0, 1): 0.9, (1, 2): 0.9, (0, 2): 0.9})
try:
    compress_couplings(triangle)
except CompressionError as exc:
    print(f"\nfrustrated example rejected as expected: {exc}")
