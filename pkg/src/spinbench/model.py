"""Core energy model: sparse Ising problems with up-to-cubic terms.

Problems are stored sparsely (linear, pairwise, and triple coefficients over
canonically sorted index keys) and evaluated with a fixed summation order so
that energies are bit-stable across runs. Spin configurations are plain
``numpy`` arrays with entries in {-1, +1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "DimensionError",
    "IsingProblem",
    "SampleEntry",
    "SampleMeta",
    "SampleSet",
    "as_spins",
    "flip",
    "energy",
    "energies",
    "energy_delta_flip",
]


class DimensionError(ValueError):
    """A configuration's length does not match the owning problem."""


def _canonical_terms(
    terms: Mapping | Iterable | None, arity: int, num_spins: int, kind: str
) -> dict[tuple[int, ...], float]:
    """Validate and canonicalize a term map: sorted keys, no zeros, no dupes."""
    out: dict[tuple[int, ...], float] = {}
    if terms is None:
        return out
    items = terms.items() if isinstance(terms, Mapping) else terms
    for key, coeff in items:
        if arity == 1 and not isinstance(key, tuple):
            key = (key,)
        idx = tuple(int(i) for i in key)
        if len(idx) != arity:
            raise ValueError(f"{kind} key {key!r} must have {arity} indices")
        if len(set(idx)) != arity:
            raise ValueError(f"{kind} key {key!r} has repeated indices")
        for i in idx:
            if not 0 <= i < num_spins:
                raise IndexError(f"{kind} key {key!r}: index {i} out of range [0, {num_spins})")
        canon = tuple(sorted(idx))
        coeff = float(coeff)
        if not np.isfinite(coeff):
            raise ValueError(f"{kind} coefficient for {key!r} is not finite")
        if canon in out:
            raise ValueError(f"duplicate {kind} key {canon!r}")
        if coeff != 0.0:
            out[canon] = coeff
    return out


@dataclass(frozen=True)
class _TermArrays:
    """Flat per-kind index/coefficient arrays in sorted-key order."""

    lin_idx: np.ndarray
    lin_coef: np.ndarray
    pair_i: np.ndarray
    pair_j: np.ndarray
    pair_coef: np.ndarray
    tri_i: np.ndarray
    tri_j: np.ndarray
    tri_k: np.ndarray
    tri_coef: np.ndarray


@dataclass(frozen=True)
class _Adjacency:
    """Per-spin views of the terms touching each spin (for flip deltas)."""

    lin: np.ndarray                     # dense (n,) linear coefficients
    pair_nbr: list[np.ndarray]          # for spin i: indices of coupled spins
    pair_coef: list[np.ndarray]
    tri_nbr: list[np.ndarray]           # for spin i: (k, 2) other-member indices
    tri_coef: list[np.ndarray]


@dataclass(frozen=True, repr=False)
class IsingProblem:
    """Sparse spin problem with linear, pairwise, and triple coefficients.

    Energy convention (minimization):
    ``E(s) = offset + sum_i h_i s_i + sum_{i<j} J_ij s_i s_j
    + sum_{i<j<k} K_ijk s_i s_j s_k``.

    Keys are canonicalized to sorted index tuples at construction; zero
    coefficients are dropped; duplicate keys are an error. Instances are
    immutable and safe to share across threads.
    """

    num_spins: int
    linear: Mapping[tuple[int, ...], float] = field(default_factory=dict)
    quadratic: Mapping[tuple[int, ...], float] = field(default_factory=dict)
    cubic: Mapping[tuple[int, ...], float] = field(default_factory=dict)
    offset: float = 0.0

    def __post_init__(self):
        n = int(self.num_spins)
        if n <= 0:
            raise ValueError("num_spins must be positive")
        object.__setattr__(self, "num_spins", n)
        object.__setattr__(
            self, "linear", MappingProxyType(_canonical_terms(self.linear, 1, n, "linear"))
        )
        object.__setattr__(
            self, "quadratic", MappingProxyType(_canonical_terms(self.quadratic, 2, n, "quadratic"))
        )
        object.__setattr__(
            self, "cubic", MappingProxyType(_canonical_terms(self.cubic, 3, n, "cubic"))
        )
        object.__setattr__(self, "offset", float(self.offset))

    def __repr__(self):
        return (
            f"IsingProblem(num_spins={self.num_spins}, |h|={len(self.linear)}, "
            f"|J|={len(self.quadratic)}, |K|={len(self.cubic)}, offset={self.offset})"
        )

    @property
    def num_terms(self) -> int:
        return len(self.linear) + len(self.quadratic) + len(self.cubic)

    @property
    def max_abs_coefficient(self) -> float:
        coeffs = [abs(c) for c in self.linear.values()]
        coeffs += [abs(c) for c in self.quadratic.values()]
        coeffs += [abs(c) for c in self.cubic.values()]
        return max(coeffs, default=0.0)

    @cached_property
    def _terms(self) -> _TermArrays:
        lk = sorted(self.linear)
        pk = sorted(self.quadratic)
        tk = sorted(self.cubic)
        return _TermArrays(
            lin_idx=np.array([k[0] for k in lk], dtype=np.intp),
            lin_coef=np.array([self.linear[k] for k in lk], dtype=np.float64),
            pair_i=np.array([k[0] for k in pk], dtype=np.intp),
            pair_j=np.array([k[1] for k in pk], dtype=np.intp),
            pair_coef=np.array([self.quadratic[k] for k in pk], dtype=np.float64),
            tri_i=np.array([k[0] for k in tk], dtype=np.intp),
            tri_j=np.array([k[1] for k in tk], dtype=np.intp),
            tri_k=np.array([k[2] for k in tk], dtype=np.intp),
            tri_coef=np.array([self.cubic[k] for k in tk], dtype=np.float64),
        )

    @cached_property
    def _adjacency(self) -> _Adjacency:
        n = self.num_spins
        lin = np.zeros(n, dtype=np.float64)
        for (i,), h in self.linear.items():
            lin[i] = h
        pair_nbr: list[list[int]] = [[] for _ in range(n)]
        pair_coef: list[list[float]] = [[] for _ in range(n)]
        for (i, j), c in sorted(self.quadratic.items()):
            pair_nbr[i].append(j)
            pair_coef[i].append(c)
            pair_nbr[j].append(i)
            pair_coef[j].append(c)
        tri_nbr: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        tri_coef: list[list[float]] = [[] for _ in range(n)]
        for (i, j, k), c in sorted(self.cubic.items()):
            tri_nbr[i].append((j, k))
            tri_coef[i].append(c)
            tri_nbr[j].append((i, k))
            tri_coef[j].append(c)
            tri_nbr[k].append((i, j))
            tri_coef[k].append(c)
        return _Adjacency(
            lin=lin,
            pair_nbr=[np.array(v, dtype=np.intp) for v in pair_nbr],
            pair_coef=[np.array(v, dtype=np.float64) for v in pair_coef],
            tri_nbr=[np.array(v, dtype=np.intp).reshape(-1, 2) for v in tri_nbr],
            tri_coef=[np.array(v, dtype=np.float64) for v in tri_coef],
        )

    def scaled(self, factor: float) -> "IsingProblem":
        """New problem with every coefficient and the offset multiplied."""
        f = float(factor)
        return IsingProblem(
            num_spins=self.num_spins,
            linear={k: f * v for k, v in self.linear.items()},
            quadratic={k: f * v for k, v in self.quadratic.items()},
            cubic={k: f * v for k, v in self.cubic.items()},
            offset=f * self.offset,
        )


def as_spins(values, num_spins: int | None = None) -> np.ndarray:
    """Validate and return a {-1,+1} int8 configuration array."""
    s = np.asarray(values, dtype=np.int8)
    if s.ndim != 1:
        raise ValueError("spin configuration must be one-dimensional")
    if num_spins is not None and s.shape[0] != num_spins:
        raise DimensionError(f"configuration length {s.shape[0]} != num_spins {num_spins}")
    if not np.all(np.abs(s) == 1):
        raise ValueError("spin values must be exactly -1 or +1")
    return s


def flip(config: np.ndarray, i: int) -> np.ndarray:
    """Copy of ``config`` with spin ``i`` negated."""
    out = np.array(config, dtype=np.int8, copy=True)
    out[i] = -out[i]
    return out


def energies(problem: IsingProblem, configs: np.ndarray) -> np.ndarray:
    """Energies of a (batch, num_spins) matrix of configurations."""
    s = np.asarray(configs)
    if s.ndim != 2 or s.shape[1] != problem.num_spins:
        raise DimensionError(
            f"config matrix of shape {s.shape} does not match num_spins {problem.num_spins}"
        )
    t = problem._terms
    s = s.astype(np.float64, copy=False)
    e = np.full(s.shape[0], problem.offset, dtype=np.float64)
    if t.lin_idx.size:
        e += s[:, t.lin_idx] @ t.lin_coef
    if t.pair_i.size:
        e += (s[:, t.pair_i] * s[:, t.pair_j]) @ t.pair_coef
    if t.tri_i.size:
        e += (s[:, t.tri_i] * s[:, t.tri_j] * s[:, t.tri_k]) @ t.tri_coef
    return e


def energy(problem: IsingProblem, config) -> float:
    """Energy of one configuration (deterministic sorted-term summation)."""
    s = as_spins(config, problem.num_spins)
    return float(energies(problem, s[None, :])[0])


def energy_delta_flip(problem: IsingProblem, config, i: int) -> float:
    """Energy change from flipping spin ``i``; O(terms touching i)."""
    s = np.asarray(config)
    if s.shape[0] != problem.num_spins:
        raise DimensionError(f"configuration length {s.shape[0]} != num_spins {problem.num_spins}")
    if not 0 <= i < problem.num_spins:
        raise IndexError(f"spin index {i} out of range [0, {problem.num_spins})")
    adj = problem._adjacency
    local = adj.lin[i]
    nbr = adj.pair_nbr[i]
    if nbr.size:
        local += adj.pair_coef[i] @ s[nbr].astype(np.float64)
    tri = adj.tri_nbr[i]
    if tri.shape[0]:
        local += adj.tri_coef[i] @ (s[tri[:, 0]] * s[tri[:, 1]]).astype(np.float64)
    return float(-2.0 * s[i] * local)


@dataclass(frozen=True)
class SampleEntry:
    """One distinct configuration with its energy and multiplicity."""

    config: np.ndarray
    energy: float
    multiplicity: int

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be >= 1")


@dataclass
class SampleMeta:
    """Sampler provenance and timing accounting."""

    sampler: str
    seed: int | None = None
    wall_time_ms: float | None = None
    t_sample_ms: float | None = None
    reads: int | None = None
    parallel_copies: int | None = None
    extra: dict = field(default_factory=dict)


@dataclass
class SampleSet:
    """Weighted collection of sampled configurations with provenance.

    Every entry's energy equals the problem energy of its configuration;
    when a wall time is recorded, ``meta.t_sample_ms`` is wall time divided
    by the total multiplicity.
    """

    entries: list[SampleEntry]
    meta: SampleMeta

    @classmethod
    def from_configs(
        cls,
        problem: IsingProblem,
        configs: np.ndarray,
        *,
        sampler: str,
        seed: int | None = None,
        wall_time_ms: float | None = None,
        reads: int | None = None,
        parallel_copies: int | None = None,
        extra: dict | None = None,
    ) -> "SampleSet":
        """Aggregate a (batch, n) matrix of configurations into a SampleSet."""
        configs = np.asarray(configs, dtype=np.int8)
        if configs.ndim != 2 or configs.shape[0] == 0:
            raise ValueError("expected a nonempty (batch, num_spins) matrix")
        uniq, counts = np.unique(configs, axis=0, return_counts=True)
        es = energies(problem, uniq)
        entries = [
            SampleEntry(config=uniq[r].copy(), energy=float(es[r]), multiplicity=int(counts[r]))
            for r in range(uniq.shape[0])
        ]
        total = int(counts.sum())
        t_sample = wall_time_ms / total if wall_time_ms is not None else None
        meta = SampleMeta(
            sampler=sampler,
            seed=seed,
            wall_time_ms=wall_time_ms,
            t_sample_ms=t_sample,
            reads=reads,
            parallel_copies=parallel_copies,
            extra=dict(extra or {}),
        )
        return cls(entries=entries, meta=meta)

    @property
    def total_multiplicity(self) -> int:
        return sum(e.multiplicity for e in self.entries)

    @property
    def best(self) -> SampleEntry:
        return min(self.entries, key=lambda e: e.energy)

    def mean_energy(self) -> float:
        tot = self.total_multiplicity
        return sum(e.energy * e.multiplicity for e in self.entries) / tot

    def to_config_matrix(self) -> np.ndarray:
        """Expand entries to a (total_multiplicity, n) matrix."""
        rows = [np.repeat(e.config[None, :], e.multiplicity, axis=0) for e in self.entries]
        return np.concatenate(rows, axis=0)
