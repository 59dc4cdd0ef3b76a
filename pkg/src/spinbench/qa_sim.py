"""Desk-scale transverse-field annealing simulator.

State-vector simulation of the digitized (Trotterized) anneal
``H(s) = -mixer(s) * sum_i X_i + problem(s) * H_problem`` with a symmetric
(second-order) split step: half mixer, full problem phase, half mixer. The
mixer step is a product of independent single-spin rotations, the problem
step a diagonal phase, so no dense matrices are needed up to ~20 spins.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import IsingProblem, SampleSet, energies
from .rng import derive_rng

__all__ = [
    "AnnealSchedule",
    "MAX_SIM_SPINS",
    "basis_configs",
    "trotter_anneal",
    "measure",
    "residual_energy",
    "digitized_time",
    "anneal_sweep",
    "SweepRow",
]

MAX_SIM_SPINS = 20


def _linear_mixer(s: float) -> float:
    return 1.0 - s


def _linear_problem(s: float) -> float:
    return s


@dataclass
class AnnealSchedule:
    """Annealing schedule in dimensionless time.

    ``mixer_profile`` and ``problem_profile`` are functions of s in [0, 1];
    the defaults are the linear ramps 1 - s and s. Hardware wall time is
    accounted separately via :func:`digitized_time`.
    """

    total_time: float
    slices: int
    mixer_profile: Callable[[float], float] = _linear_mixer
    problem_profile: Callable[[float], float] = _linear_problem

    def __post_init__(self):
        if self.total_time < 0:
            raise ValueError("total_time must be >= 0")
        if self.slices < 0:
            raise ValueError("slices must be >= 0")
        if self.slices == 0 and self.total_time > 0:
            raise ValueError("zero slices with nonzero total_time")


def basis_configs(n: int) -> np.ndarray:
    """(2^n, n) spin matrix for the computational basis; bit i of the basis
    index gives spin i (bit 0 -> +1, bit 1 -> -1)."""
    idx = np.arange(1 << n, dtype=np.uint32)
    S = np.empty((1 << n, n), dtype=np.int8)
    for i in range(n):
        S[:, i] = 1 - 2 * ((idx >> i) & np.uint32(1)).astype(np.int8)
    return S


def _mixer_half_step(state: np.ndarray, n: int, theta: float) -> np.ndarray:
    """Apply exp(+i * theta * X_i) on every spin."""
    c = np.cos(theta)
    s = 1j * np.sin(theta)
    for i in range(n):
        psi = state.reshape(-1, 2, 1 << i)
        a = psi[:, 0, :].copy()
        b = psi[:, 1, :]
        psi[:, 0, :] = c * a + s * b
        psi[:, 1, :] = s * a + c * b
    return state


def trotter_anneal(problem: IsingProblem, schedule: AnnealSchedule) -> np.ndarray:
    """Final state of the digitized anneal, starting from the uniform
    superposition (the mixer ground state). Returns a normalized complex
    amplitude vector of length 2^n."""
    n = problem.num_spins
    if n > MAX_SIM_SPINS:
        raise ValueError(f"state-vector simulation supports n <= {MAX_SIM_SPINS}, got {n}")
    if problem.cubic:
        raise ValueError("the simulator supports problems without cubic terms; reduce first")
    state = np.full(1 << n, 2.0 ** (-n / 2.0), dtype=np.complex128)
    if schedule.slices == 0 or schedule.total_time == 0.0:
        return state
    e_basis = energies(problem, basis_configs(n))
    dt = schedule.total_time / schedule.slices
    for k in range(schedule.slices):
        s = (k + 0.5) / schedule.slices
        a = float(schedule.mixer_profile(s))
        b = float(schedule.problem_profile(s))
        if a < 0 or b < 0:
            raise ValueError(f"schedule profiles must be nonnegative (at s={s:.4f})")
        state = _mixer_half_step(state, n, a * dt / 2.0)
        state *= np.exp(-1j * dt * b * e_basis)
        state = _mixer_half_step(state, n, a * dt / 2.0)
    return state


def measure(state: np.ndarray, problem: IsingProblem, shots: int, seed: int) -> SampleSet:
    """Sample configurations from the squared amplitudes."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    n = problem.num_spins
    if state.shape[0] != 1 << n:
        raise ValueError(f"state of length {state.shape[0]} does not match n = {n}")
    p = np.abs(state) ** 2
    p = p / p.sum()
    rng = derive_rng(seed)
    outcomes = rng.choice(p.size, size=shots, p=p)
    idx, counts = np.unique(outcomes, return_counts=True)
    arange = np.arange(n, dtype=np.uint32)
    configs = (1 - 2 * ((idx[:, None] >> arange[None, :]) & 1)).astype(np.int8)
    expanded = np.repeat(configs, counts, axis=0)
    return SampleSet.from_configs(problem, expanded, sampler="trotter_measure", seed=seed)


def residual_energy(samples: SampleSet, problem: IsingProblem, ground_energy: float) -> float:
    """Per-spin distance of the mean sampled energy from the ground energy."""
    if not samples.entries:
        raise ValueError("empty sample set")
    return (samples.mean_energy() - float(ground_energy)) / problem.num_spins


def digitized_time(slices: int, gate_depth: int = 4, gate_time_ns: float = 84.0) -> float:
    """Hardware time of a digitized anneal, in microseconds."""
    if slices < 0:
        raise ValueError("slices must be >= 0")
    return slices * gate_depth * gate_time_ns / 1000.0


@dataclass
class SweepRow:
    """One point of a residual-energy-versus-annealing-time sweep."""

    total_time: float
    slices: int
    digitized_time_us: float
    residual_energy: float
    p_gs: float


def anneal_sweep(
    problem: IsingProblem,
    time_grid,
    ground_energy: float,
    shots: int = 4096,
    seed: int = 0,
    slices_per_unit: float = 4.0,
    gate_depth: int = 4,
    gate_time_ns: float = 84.0,
    tol: float = 1e-9,
) -> list[SweepRow]:
    """Run the anneal over a grid of total times and report, per point, the
    digitized hardware time, per-spin residual energy, and ground-state hit
    probability (slices scale with total time)."""
    rows = []
    for pos, total_time in enumerate(time_grid):
        total_time = float(total_time)
        slices = 0 if total_time == 0 else max(1, int(round(total_time * slices_per_unit)))
        state = trotter_anneal(problem, AnnealSchedule(total_time=total_time, slices=slices))
        samples = measure(state, problem, shots=shots, seed=seed + pos)
        total = samples.total_multiplicity
        hits = sum(
            e.multiplicity for e in samples.entries if abs(e.energy - ground_energy) <= tol
        )
        rows.append(
            SweepRow(
                total_time=total_time,
                slices=slices,
                digitized_time_us=digitized_time(slices, gate_depth, gate_time_ns),
                residual_energy=residual_energy(samples, problem, ground_energy),
                p_gs=hits / total,
            )
        )
    return rows
