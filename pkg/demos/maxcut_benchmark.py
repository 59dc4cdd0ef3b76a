"""Benchmark an annealer against random sampling on a max-cut instance.

Generates a 3-regular graph, solves it exactly, then compares raw and
postprocessed success probabilities and time-to-solution.

Run: python demos/maxcut_benchmark.py
"""

from spinbench import (
    SamplerParams,
    estimate_pgs,
    exact_ground,
    gen_random_regular,
    maxcut_name,
    maxcut_to_ising,
    postprocess_samples,
    random_sample,
    simulated_anneal,
    tts,
)

N, D, SEED = 24, 3, 11
graph = gen_random_regular(N, D, SEED)
problem = maxcut_to_ising(graph)
print(f"instance {maxcut_name(N, D, SEED)}: {graph.num_edges} edges")

result = exact_ground(problem)
opt_cut = (graph.total_weight - result.ground_energy) / 2
print(f"exact optimum: cut {opt_cut:g} (ground energy {result.ground_energy:g}, "
      f"{result.ground_count} ground states)")

rows = []
for label, sampler in (
    ("random", lambda: random_sample(problem, 500, seed=1)),
    ("anneal", lambda: simulated_anneal(problem, SamplerParams(reads=500, sweeps=64, seed=2))),
):
    raw = sampler()
    post = postprocess_samples(problem, raw, seed=3, max_sweeps=5)
    p_raw = estimate_pgs(raw, result.ground_energy)
    p_post = estimate_pgs(post, result.ground_energy)
    t_samp = raw.meta.t_sample_ms or 1.0
    rows.append((label, p_raw, p_post, t_samp, tts(p_raw, t_samp), tts(p_post, t_samp)))

def fmt(ms: float) -> str:
    return "inf" if ms == float("inf") else f"{ms:.1f}ms"


print(f"\n{'sampler':<8} {'P_GS raw':>9} {'P_GS post':>10} {'t_sample':>9} "
      f"{'TTS raw':>10} {'TTS post':>10}")
for label, p_raw, p_post, t, tts_raw, tts_post in rows:
    print(f"{label:<8} {p_raw:>9.4f} {p_post:>10.4f} {t:>7.2f}ms "
          f"{fmt(tts_raw):>10} {fmt(tts_post):>10}")

best = min(rows, key=lambda r: r[5])
print(f"\nbest postprocessed time-to-solution: {best[0]} ({best[5]:.1f} ms)")
