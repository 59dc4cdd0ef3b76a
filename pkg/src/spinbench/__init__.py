"""spinbench: benchmarking toolkit for Ising/HUBO optimization.

Builds and serializes benchmark instances (max-cut on random regular
graphs, higher-order and planar spin glasses on heavy-hex lattices),
order-reduces cubic terms through verified gadgets, applies spin-reversal
preprocessing, samples with classical backends and a digitized-annealing
simulator, and reports ground-state probability / time-to-solution metrics.
"""

from .model import (
    DimensionError,
    IsingProblem,
    SampleEntry,
    SampleMeta,
    SampleSet,
    as_spins,
    energies,
    energy,
    energy_delta_flip,
    flip,
)
from .instances import (
    Graph,
    HeavyHexTopology,
    InstanceMetadata,
    cut_value,
    gen_heavy_hex,
    gen_hoso_instance,
    gen_planar_spin_glass,
    gen_random_regular,
    load_instance,
    maxcut_name,
    maxcut_opt_energy,
    maxcut_to_ising,
    parse_maxcut_name,
    save_instance,
)
from .reduction import (
    CompressionError,
    GadgetSpec,
    GadgetSynthesisError,
    GaugeTransform,
    ReductionMap,
    apply_gauge,
    baseline_gadget_set,
    better_gadget_set,
    compress_couplings,
    energy_scale,
    gauge_config,
    load_gadget_library,
    reduce_cubic,
    save_gadget_library,
    synthesize_gadget,
    verify_gadget,
)
from .solvers import (
    ExactResult,
    SamplerParams,
    exact_ground,
    greedy_postprocess,
    is_local_min,
    local_solver,
    postprocess_samples,
    random_sample,
    simulated_anneal,
)
from .qa_sim import (
    AnnealSchedule,
    anneal_sweep,
    digitized_time,
    measure,
    residual_energy,
    trotter_anneal,
)
from .metrics import (
    BenchmarkRow,
    bootstrap_ci,
    estimate_pgs,
    histogram,
    t_sample,
    tts,
)
from .rng import derive_rng, seed_sequence

__version__ = "0.1.0"
