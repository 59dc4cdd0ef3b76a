"""Cubic-to-quadratic order reduction and spin-reversal preprocessing.

A gadget replaces one cubic term with a quadratic form over the three
original spins plus one fresh auxiliary spin, exactly: minimizing over the
auxiliary recovers the cubic term's energy up to a constant. Gadgets are
synthesized by exhaustive search over half-integer coefficient grids and
verified by 16-state enumeration. Spin-reversal (gauge) transforms preserve
the energy spectrum and are also used to compress couplings into hardware
ranges.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .model import IsingProblem

__all__ = [
    "ROLE_NAMES",
    "ROLE_PAIRS",
    "GadgetSpec",
    "GadgetSynthesisError",
    "CompressionError",
    "GaugeTransform",
    "ReductionMap",
    "verify_gadget",
    "synthesize_gadget",
    "baseline_gadget_set",
    "better_gadget_set",
    "reduce_cubic",
    "apply_gauge",
    "gauge_config",
    "compress_couplings",
    "energy_scale",
    "save_gadget_library",
    "load_gadget_library",
]

# Roles 0..3 = the three cubic-term spins plus the auxiliary.
ROLE_NAMES = ("A", "B", "C", "aux")
AUX = 3
ROLE_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

_SIGMA8 = tuple(itertools.product((1, -1), repeat=3))


class GadgetSynthesisError(RuntimeError):
    """No exact gadget exists within the requested coefficient bound."""


class CompressionError(ValueError):
    """Coupling compression is infeasible; names the frustrated cycle."""

    def __init__(self, message: str, cycle: list[int]):
        super().__init__(message)
        self.cycle = cycle


@dataclass(frozen=True)
class GadgetSpec:
    """Exact quadratic replacement for one cubic term of coefficient
    ``target_coeff`` using one auxiliary spin.

    ``linear`` holds coefficients for roles (A, B, C, aux); ``quadratic``
    holds coefficients for the role pairs in :data:`ROLE_PAIRS`. Exactness:
    for each of the 8 assignments of (A, B, C), the minimum over the
    auxiliary of the quadratic form equals
    ``target_coeff * sA * sB * sC + offset``.
    """

    target_coeff: float
    linear: tuple[float, float, float, float]
    quadratic: tuple[float, float, float, float, float, float]
    offset: float

    def form_energy(self, s: tuple[int, int, int, int]) -> float:
        e = sum(self.linear[r] * s[r] for r in range(4))
        e += sum(c * s[a] * s[b] for (a, b), c in zip(ROLE_PAIRS, self.quadratic))
        return e

    @property
    def coefficients(self) -> tuple[float, ...]:
        return self.linear + self.quadratic

    @property
    def max_abs_coefficient(self) -> float:
        return max(abs(c) for c in self.coefficients)

    def scaled(self, factor: float) -> "GadgetSpec":
        """Gadget for ``factor * target_coeff`` (exactness is homogeneous)."""
        f = float(factor)
        return GadgetSpec(
            target_coeff=f * self.target_coeff,
            linear=tuple(f * c for c in self.linear),
            quadratic=tuple(f * c for c in self.quadratic),
            offset=f * self.offset,
        )

    def negate_role(self, role: int) -> "GadgetSpec":
        """Spin-reversal on one role: negate every coefficient involving it.

        The target coefficient flips sign when the role is A, B, or C.
        """
        lin = list(self.linear)
        lin[role] = -lin[role]
        quad = [
            -c if role in pair else c for pair, c in zip(ROLE_PAIRS, self.quadratic)
        ]
        target = -self.target_coeff if role != AUX else self.target_coeff
        return GadgetSpec(
            target_coeff=target, linear=tuple(lin), quadratic=tuple(quad), offset=self.offset
        )


def verify_gadget(g: GadgetSpec, tol: float = 1e-9):
    """16-state exactness check.

    Returns ``(True, None)`` when exact, else ``(False, witness)`` where the
    witness is the violating (sA, sB, sC) assignment.
    """
    for s in _SIGMA8:
        best = min(g.form_energy((s[0], s[1], s[2], x)) for x in (1, -1))
        want = g.target_coeff * s[0] * s[1] * s[2] + g.offset
        if abs(best - want) > tol:
            return False, s
    return True, None


def _parity_components(values8: np.ndarray) -> np.ndarray:
    """Parity (Walsh) transform of a function on {-1,+1}^3.

    Input rows follow :data:`_SIGMA8` order; output columns are the
    components for subsets (const, A, B, C, AB, AC, BC, ABC).
    """
    mat = np.empty((8, 8), dtype=np.float64)
    for r, s in enumerate(_SIGMA8):
        mat[r, 0] = 1.0
        mat[r, 1] = s[0]
        mat[r, 2] = s[1]
        mat[r, 3] = s[2]
        mat[r, 4] = s[0] * s[1]
        mat[r, 5] = s[0] * s[2]
        mat[r, 6] = s[1] * s[2]
        mat[r, 7] = s[0] * s[1] * s[2]
    return values8 @ mat / 8.0


def _search_exact_gadgets(d: float, coeff_bound: float) -> list[GadgetSpec]:
    """All exact gadgets for target d with every coefficient on the
    half-integer grid within [-coeff_bound, coeff_bound].

    The search enumerates the four aux-coupled coefficients; for each, the
    six remaining coefficients and the offset are forced uniquely by the
    exactness condition (min over the auxiliary of the form equals
    f(sigma) - |g(sigma)| with g the aux-coupled part), so checking the
    forced values against the grid is equivalent to enumerating them.
    """
    steps = int(round(coeff_bound * 2))
    grid = np.arange(-steps, steps + 1, dtype=np.float64) / 2.0
    lx, qa, qb, qc = np.meshgrid(grid, grid, grid, grid, indexing="ij")
    cand = np.stack([lx.ravel(), qa.ravel(), qb.ravel(), qc.ravel()], axis=1)
    sig = np.array(_SIGMA8, dtype=np.float64)
    # |g(sigma)| for every candidate aux-coupled part, all 8 sigma at once
    gabs = np.abs(cand[:, 0:1] + cand[:, 1:] @ sig.T)
    comp = _parity_components(gabs)
    keep = np.abs(comp[:, 7] - (-d)) < 1e-12
    gadgets: list[GadgetSpec] = []
    for row, c in zip(cand[keep], comp[keep]):
        la, lb, lc = c[1], c[2], c[3]
        qab, qac, qbc = c[4], c[5], c[6]
        offset = -c[0]
        coeffs = (la, lb, lc, row[0], qab, qac, row[1], qbc, row[2], row[3])
        # forced coefficients must land back on the grid, inside the bound
        if any(abs(x * 2 - round(x * 2)) > 1e-9 or abs(x) > coeff_bound + 1e-12 for x in coeffs):
            continue
        gadgets.append(
            GadgetSpec(
                target_coeff=float(d),
                linear=(float(la), float(lb), float(lc), float(row[0])),
                quadratic=(
                    float(qab), float(qac), float(row[1]),
                    float(qbc), float(row[2]), float(row[3]),
                ),
                offset=float(offset),
            )
        )
    return gadgets


def _select_gadget(gadgets: list[GadgetSpec]) -> GadgetSpec:
    """Minimize max |coefficient|; break ties by fewest nonzero terms, then
    lexicographically on the coefficient vector."""
    def key(g: GadgetSpec):
        nnz = sum(1 for c in g.coefficients if c != 0.0)
        return (g.max_abs_coefficient, nnz, g.coefficients)

    return min(gadgets, key=key)


def synthesize_gadget(d: float, coeff_bound: float = 2.0) -> GadgetSpec:
    """Exact gadget for a unit cubic coefficient d in {-1, +1}, optimal in
    max |coefficient| over the half-integer grid within the bound."""
    if d not in (1.0, -1.0, 1, -1):
        raise ValueError("d must be -1 or +1; scale gadgets for other magnitudes")
    if coeff_bound < 1:
        raise ValueError("coeff_bound must be >= 1")
    gadgets = _search_exact_gadgets(float(d), float(coeff_bound))
    if not gadgets:
        raise GadgetSynthesisError(
            f"no exact gadget for d={d:+g} with coefficients in [-{coeff_bound:g}, {coeff_bound:g}]"
        )
    return _select_gadget(gadgets)


def baseline_gadget_set(coeff_bound: float = 2.0) -> dict[float, GadgetSpec]:
    """Reference gadget pair with the historically common asymmetry: the
    d=+1 gadget is optimal, while the d=-1 gadget spans twice the
    coefficient range (which halves the programmable energy scale)."""
    plus = synthesize_gadget(+1.0, coeff_bound)
    wide_bound = 2.0 * plus.max_abs_coefficient
    wide = [
        g for g in _search_exact_gadgets(-1.0, wide_bound)
        if g.max_abs_coefficient >= wide_bound - 1e-12
    ]
    if not wide:
        raise GadgetSynthesisError(f"no exact d=-1 gadget at coefficient range {wide_bound:g}")
    return {1.0: plus, -1.0: _select_gadget(wide)}


def better_gadget_set(base: dict[float, GadgetSpec]) -> dict[float, GadgetSpec]:
    """Replace the d=-1 gadget with a spin-reversal (role C) of the d=+1
    gadget; coefficient magnitudes, and hence the energy scale, match the
    d=+1 gadget."""
    if 1.0 not in base:
        raise ValueError("base set must contain a d=+1 gadget")
    out = dict(base)
    out[-1.0] = base[1.0].negate_role(2)
    return out


@dataclass(frozen=True)
class ReductionMap:
    """Bookkeeping from :func:`reduce_cubic`.

    Auxiliary indices are fresh (>= original num_spins), one per cubic term,
    assigned in sorted term order. ``offset_shift`` is the sum of gadget
    offsets: min over the auxiliaries of the reduced energy equals the
    original energy plus ``offset_shift``.
    """

    original_num_spins: int
    aux_index: dict[tuple[int, int, int], int]
    gadget_sign: dict[tuple[int, int, int], float]
    offset_shift: float

    def restrict(self, config: np.ndarray) -> np.ndarray:
        """Project a reduced-space configuration onto the original spins."""
        return np.asarray(config)[: self.original_num_spins]


def reduce_cubic(
    problem: IsingProblem, gadget_set: dict[float, GadgetSpec]
) -> tuple[IsingProblem, ReductionMap]:
    """Replace every cubic term with a gadget over one fresh auxiliary spin.

    The gadget for sign(K) is scaled by |K|. The output has no cubic terms
    and exactly one extra spin per cubic term.
    """
    n = problem.num_spins
    linear = {k[0]: v for k, v in problem.linear.items()}
    quadratic = dict(problem.quadratic)

    def add_linear(i: int, c: float):
        linear[i] = linear.get(i, 0.0) + c

    def add_quadratic(i: int, j: int, c: float):
        key = (min(i, j), max(i, j))
        quadratic[key] = quadratic.get(key, 0.0) + c

    aux_index: dict[tuple[int, int, int], int] = {}
    gadget_sign: dict[tuple[int, int, int], float] = {}
    offset_shift = 0.0
    for rank, (triple, coeff) in enumerate(sorted(problem.cubic.items())):
        sign = 1.0 if coeff > 0 else -1.0
        if sign not in gadget_set:
            raise KeyError(f"gadget set has no entry for cubic coefficient sign {sign:+g}")
        g = gadget_set[sign].scaled(abs(coeff))
        aux = n + rank
        spins = (triple[0], triple[1], triple[2], aux)
        for r in range(4):
            if g.linear[r] != 0.0:
                add_linear(spins[r], g.linear[r])
        for (a, b), c in zip(ROLE_PAIRS, g.quadratic):
            if c != 0.0:
                add_quadratic(spins[a], spins[b], c)
        aux_index[triple] = aux
        gadget_sign[triple] = sign
        offset_shift += g.offset
    reduced = IsingProblem(
        num_spins=n + len(problem.cubic),
        linear={(i,): c for i, c in linear.items() if c != 0.0},
        quadratic={k: c for k, c in quadratic.items() if c != 0.0},
        offset=problem.offset,
    )
    return reduced, ReductionMap(
        original_num_spins=n,
        aux_index=aux_index,
        gadget_sign=gadget_sign,
        offset_shift=offset_shift,
    )


@dataclass(frozen=True)
class GaugeTransform:
    """Spin-reversal transform: negate the spins in ``flip_set`` (and the
    incident odd-order coefficients), then multiply by ``scale``."""

    flip_set: frozenset[int]
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "flip_set", frozenset(int(i) for i in self.flip_set))
        if self.scale <= 0:
            raise ValueError("scale must be positive")


def apply_gauge(problem: IsingProblem, g: GaugeTransform) -> IsingProblem:
    """Transformed problem; the energy spectrum is preserved up to ``scale``,
    with configurations mapped by flipping the same set."""
    for i in g.flip_set:
        if not 0 <= i < problem.num_spins:
            raise IndexError(f"flip index {i} out of range [0, {problem.num_spins})")
    fs = g.flip_set

    def sgn(key) -> float:
        return -1.0 if sum(1 for i in key if i in fs) % 2 else 1.0

    return IsingProblem(
        num_spins=problem.num_spins,
        linear={k: g.scale * sgn(k) * v for k, v in problem.linear.items()},
        quadratic={k: g.scale * sgn(k) * v for k, v in problem.quadratic.items()},
        cubic={k: g.scale * sgn(k) * v for k, v in problem.cubic.items()},
        offset=g.scale * problem.offset,
    )


def gauge_config(g: GaugeTransform, config: np.ndarray) -> np.ndarray:
    """Map a configuration between the original and transformed problems."""
    out = np.array(config, dtype=np.int8, copy=True)
    idx = sorted(g.flip_set)
    out[idx] = -out[idx]
    return out


def compress_couplings(
    problem: IsingProblem,
    strong_threshold: float = 0.5,
    chip_range: tuple[float, float] = (-2.0, 1.0),
) -> tuple[GaugeTransform, IsingProblem]:
    """Find a spin-reversal transform making every strong coupling negative.

    Requires a quadratic-only problem with couplings in [-1, 1] and no
    linear terms. Signs are assigned by breadth-first traversal of each
    connected component of the strong-edge subgraph (|J| > threshold);
    non-tree strong edges are checked for consistency and a frustrated
    strong cycle raises :class:`CompressionError` naming the cycle. All
    transformed couplings lie in [-1, threshold], so multiplying by
    ``chip_range[1] / threshold`` afterwards fits the chip range. Runs in
    time linear in the number of edges.
    """
    if problem.linear or problem.cubic:
        raise ValueError("compression requires a quadratic-only problem with no linear terms")
    for k, v in problem.quadratic.items():
        if abs(v) > 1.0 + 1e-12:
            raise ValueError(f"coupling {k} = {v} outside [-1, 1]")
    n = problem.num_spins
    strong: dict[int, list[tuple[int, float]]] = {i: [] for i in range(n)}
    for (u, v), c in sorted(problem.quadratic.items()):
        if abs(c) > strong_threshold:
            strong[u].append((v, c))
            strong[v].append((u, c))

    sign = np.zeros(n, dtype=np.int8)  # 0 = unvisited
    parent = np.full(n, -1, dtype=np.int64)
    for root in range(n):
        if sign[root] != 0 or not strong[root]:
            continue
        sign[root] = 1
        component = [root]
        queue = [root]
        while queue:
            u = queue.pop(0)
            for v, c in strong[u]:
                # want transformed coupling negative: sign_u * sign_v = -sign(J)
                need = -sign[u] * (1 if c > 0 else -1)
                if sign[v] == 0:
                    sign[v] = need
                    parent[v] = u
                    component.append(v)
                    queue.append(v)
                elif sign[v] != need:
                    cycle = _tree_cycle(parent, u, v)
                    raise CompressionError(
                        f"frustrated strong cycle {cycle}: no spin-reversal makes "
                        f"all couplings with |J| > {strong_threshold} negative",
                        cycle,
                    )
        # the gauge is defined up to a global flip per component; take the
        # variant flipping fewer spins
        minus = [v for v in component if sign[v] == -1]
        if 2 * len(minus) > len(component):
            for v in component:
                sign[v] = -sign[v]
    flips = frozenset(int(i) for i in np.nonzero(sign == -1)[0])
    transform = GaugeTransform(flip_set=flips, scale=1.0)
    return transform, apply_gauge(problem, transform)


def _tree_cycle(parent: np.ndarray, u: int, v: int) -> list[int]:
    """Cycle through tree paths to the common ancestor plus the edge (u, v)."""
    anc_u = []
    x = u
    while x != -1:
        anc_u.append(x)
        x = int(parent[x])
    pos = {node: t for t, node in enumerate(anc_u)}
    path_v = []
    x = v
    while x not in pos:
        path_v.append(x)
        x = int(parent[x])
    return anc_u[: pos[x] + 1][::-1] + path_v[::-1]


def energy_scale(
    problem: IsingProblem,
    chip_range: tuple[float, float] = (-2.0, 1.0),
    linear_range: tuple[float, float] = (-4.0, 4.0),
) -> float:
    """Largest uniform multiplier keeping every coefficient inside the
    hardware range (couplings in ``chip_range``, fields in ``linear_range``).

    For each coefficient the admissible multiplier is the range bound in the
    coefficient's sign direction divided by its magnitude; the scale is the
    minimum over all coefficients and is invariant under spin relabeling.
    """
    if problem.cubic:
        raise ValueError("energy scale is defined for problems without cubic terms")
    lo, hi = float(chip_range[0]), float(chip_range[1])
    llo, lhi = float(linear_range[0]), float(linear_range[1])
    if not (lo < 0 < hi and llo < 0 < lhi):
        raise ValueError("ranges must straddle zero")
    bounds = [hi / c if c > 0 else lo / c for c in problem.quadratic.values()]
    bounds += [lhi / c if c > 0 else llo / c for c in problem.linear.values()]
    if not bounds:
        raise ValueError("energy scale is undefined for a problem with no terms")
    return float(min(bounds))


# ---------------------------------------------------------------------------
# Gadget library files (same structured-text style as instances)
# ---------------------------------------------------------------------------

def save_gadget_library(path, gadgets: dict[float, GadgetSpec]) -> None:
    doc = {
        "format_version": 1,
        "gadgets": [
            {
                "target_coeff": g.target_coeff,
                "linear": [[r, c] for r, c in enumerate(g.linear) if c != 0.0],
                "quadratic": [
                    [a, b, c] for (a, b), c in zip(ROLE_PAIRS, g.quadratic) if c != 0.0
                ],
                "offset": g.offset,
            }
            for _, g in sorted(gadgets.items())
        ],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


def load_gadget_library(path, verify: bool = True) -> dict[float, GadgetSpec]:
    """Load a gadget library keyed by target coefficient; verifies exactness
    of every gadget unless disabled."""
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    if doc.get("format_version") != 1:
        raise ValueError(f"unsupported gadget library version {doc.get('format_version')!r}")
    out: dict[float, GadgetSpec] = {}
    for entry in doc["gadgets"]:
        linear = [0.0, 0.0, 0.0, 0.0]
        for r, c in entry.get("linear", []):
            linear[int(r)] = float(c)
        quad = [0.0] * len(ROLE_PAIRS)
        pair_pos = {p: t for t, p in enumerate(ROLE_PAIRS)}
        for a, b, c in entry.get("quadratic", []):
            key = (min(int(a), int(b)), max(int(a), int(b)))
            quad[pair_pos[key]] = float(c)
        g = GadgetSpec(
            target_coeff=float(entry["target_coeff"]),
            linear=tuple(linear),
            quadratic=tuple(quad),
            offset=float(entry.get("offset", 0.0)),
        )
        if verify:
            ok, witness = verify_gadget(g)
            if not ok:
                raise ValueError(
                    f"gadget for target {g.target_coeff:+g} fails exactness at (A,B,C)={witness}"
                )
        out[g.target_coeff] = g
    return out
