"""Instance construction and serialization.

Covers the two benchmark input families (unweighted max-cut on random
regular graphs, higher-order spin glasses on heavy-hex lattices), the planar
spin glass with couplings uniform in [-1, 1], and a versioned JSON file
format that is the canonical interchange representation (see
``schema/instance.schema.json``).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Iterable

import numpy as np

from .model import IsingProblem, as_spins
from .rng import derive_rng

__all__ = [
    "Graph",
    "InstanceMetadata",
    "HeavyHexTopology",
    "InfeasibleGraphError",
    "GraphGenerationError",
    "InstanceFormatError",
    "gen_random_regular",
    "maxcut_to_ising",
    "maxcut_opt_energy",
    "cut_value",
    "gen_heavy_hex",
    "gen_hoso_instance",
    "gen_planar_spin_glass",
    "maxcut_name",
    "parse_maxcut_name",
    "save_instance",
    "load_instance",
    "FORMAT_VERSION",
]

FORMAT_VERSION = 1

FAMILIES = ("maxcut", "hoso", "planar_sg")


class InfeasibleGraphError(ValueError):
    """Requested graph parameters admit no graph (e.g. odd n*d)."""


class GraphGenerationError(RuntimeError):
    """Rejection sampling exhausted its retry budget."""


class InstanceFormatError(ValueError):
    """An instance file is malformed; the message names the offending field."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected weighted graph with canonical (i < j) edges."""

    num_nodes: int
    edges: tuple[tuple[int, int, float], ...]

    @classmethod
    def build(cls, num_nodes: int, edges: Iterable) -> "Graph":
        """Validate and canonicalize an edge list; weight defaults to 1."""
        n = int(num_nodes)
        if n <= 0:
            raise ValueError("num_nodes must be positive")
        seen: set[tuple[int, int]] = set()
        canon: list[tuple[int, int, float]] = []
        for e in edges:
            if len(e) == 2:
                u, v = e
                w = 1.0
            else:
                u, v, w = e
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise IndexError(f"edge ({u},{v}) out of range [0, {n})")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            canon.append((key[0], key[1], w))
        canon.sort()
        return cls(num_nodes=n, edges=tuple(canon))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.num_nodes, dtype=np.int64)
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for u, v, _ in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return [sorted(a) for a in adj]


@dataclass
class InstanceMetadata:
    """Descriptive metadata carried alongside a problem."""

    name: str
    family: str
    opt_value: float | None = None
    source: str = "generated"       # "generated" | "imported"
    provenance: dict = field(default_factory=dict)
    graph: Graph | None = None      # populated for max-cut instances

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.source not in ("generated", "imported"):
            raise ValueError(f"unknown source {self.source!r}")


@dataclass(frozen=True)
class HeavyHexTopology:
    """Degree-<=3 lattice used as the layout for spin-glass instances."""

    graph: Graph
    spec: str

    def __post_init__(self):
        deg = self.graph.degrees()
        if deg.size and int(deg.max()) > 3:
            raise ValueError(f"heavy-hex topology has node of degree {int(deg.max())} > 3")


def maxcut_name(n: int, d: int, seed: int) -> str:
    return f"({n},{d},{seed},u)"


def parse_maxcut_name(name: str) -> tuple[int, int, int]:
    """Parse "(N,d,s,u)" back into (N, d, s)."""
    m = re.fullmatch(r"\((\d+),(\d+),(\d+),u\)", name)
    if m is None:
        raise ValueError(f"not a max-cut instance name: {name!r}")
    return int(m.group(1)), int(m.group(2)), int(m.group(3))


def gen_random_regular(n: int, d: int, seed: int, max_retries: int = 1000) -> Graph:
    """d-regular simple graph on n nodes via the configuration/pairing model.

    Deterministic for a fixed seed. Pairings producing self-loops or
    multi-edges are rejected and redrawn, up to ``max_retries`` attempts.
    """
    n, d = int(n), int(d)
    if d < 0 or n <= 0:
        raise ValueError("need n > 0 and d >= 0")
    if d >= n:
        raise InfeasibleGraphError(f"degree {d} must be < n = {n}")
    if (n * d) % 2 != 0:
        raise InfeasibleGraphError(f"n*d = {n * d} is odd; no {d}-regular graph on {n} nodes")
    rng = derive_rng(seed)
    stubs = np.repeat(np.arange(n), d)
    for _ in range(max_retries):
        perm = rng.permutation(stubs)
        pairs = perm.reshape(-1, 2)
        edges: set[tuple[int, int]] = set()
        ok = True
        for u, v in pairs:
            u, v = int(u), int(v)
            if u == v:
                ok = False
                break
            key = (min(u, v), max(u, v))
            if key in edges:
                ok = False
                break
            edges.add(key)
        if ok:
            return Graph.build(n, sorted(edges))
    raise GraphGenerationError(
        f"no simple {d}-regular graph found for n={n} after {max_retries} pairing attempts"
    )


def maxcut_to_ising(graph: Graph) -> IsingProblem:
    """Map max-cut to energy minimization: J_ij = +w_ij per edge.

    With W the total edge weight, cut(s) = (W - E(s)) / 2 for every
    configuration, so minimizing the energy maximizes the cut.
    """
    quadratic = {(u, v): w for u, v, w in graph.edges}
    return IsingProblem(num_spins=graph.num_nodes, quadratic=quadratic)


def maxcut_opt_energy(graph: Graph, opt_cut: float) -> float:
    """Ground energy of the Ising image of a graph with known optimal cut."""
    return graph.total_weight - 2.0 * float(opt_cut)


def cut_value(graph: Graph, config) -> float:
    """Total weight of edges crossing the partition defined by ``config``."""
    s = as_spins(config, graph.num_nodes)
    same = sum(w * float(s[u]) * float(s[v]) for u, v, w in graph.edges)
    return (graph.total_weight - same) / 2.0


def _load_builtin_hex(name: str) -> Graph:
    data = json.loads(resources.files("spinbench.data").joinpath(f"{name}.json").read_text())
    return Graph.build(data["num_nodes"], data["edges"])


def _generated_hex(rows: int, cols: int) -> Graph:
    """Parametric heavy-hex: full rows of ``cols`` qubits joined by bridges
    at alternating column offsets 0 and 2 (period 4)."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be positive")
    edges: list[tuple[int, int]] = []
    ids: list[list[int]] = []
    bridge_of: list[list[tuple[int, int]]] = []
    nxt = 0
    for r in range(rows):
        ids.append(list(range(nxt, nxt + cols)))
        nxt += cols
        if r + 1 < rows:
            offs = 0 if r % 2 == 0 else 2
            bcols = [c for c in range(offs, cols, 4)]
            bridge_of.append([(c, nxt + t) for t, c in enumerate(bcols)])
            nxt += len(bcols)
    for r in range(rows):
        row = ids[r]
        edges += [(row[t], row[t + 1]) for t in range(cols - 1)]
    for r, blist in enumerate(bridge_of):
        for c, b in blist:
            edges.append((ids[r][c], b))
            edges.append((b, ids[r + 1][c]))
    return Graph.build(nxt, edges)


def gen_heavy_hex(spec) -> HeavyHexTopology:
    """Built-in ("eagle127", "heron133") or generated ((rows, cols)) lattice."""
    if isinstance(spec, str):
        if spec in ("eagle127", "heron133"):
            g = _load_builtin_hex(spec)
            expect = 127 if spec == "eagle127" else 133
            if g.num_nodes != expect:
                raise ValueError(f"bundled {spec} has {g.num_nodes} nodes, expected {expect}")
            return HeavyHexTopology(graph=g, spec=spec)
        m = re.fullmatch(r"(\d+)x(\d+)", spec)
        if m:
            rows, cols = int(m.group(1)), int(m.group(2))
            return HeavyHexTopology(graph=_generated_hex(rows, cols), spec=f"generated({rows},{cols})")
        raise ValueError(f"unknown heavy-hex spec {spec!r}")
    rows, cols = spec
    return HeavyHexTopology(graph=_generated_hex(int(rows), int(cols)), spec=f"generated({rows},{cols})")


def length2_path_triples(graph: Graph) -> list[tuple[int, int, int]]:
    """All node triples {u, v, w} induced by a path u - v - w, deduplicated
    and returned as sorted tuples in sorted order."""
    adj = graph.adjacency()
    triples: set[tuple[int, int, int]] = set()
    for v in range(graph.num_nodes):
        nbrs = adj[v]
        for a in range(len(nbrs)):
            for b in range(a + 1, len(nbrs)):
                triples.add(tuple(sorted((nbrs[a], v, nbrs[b]))))
    return sorted(triples)


TRIPLE_RULES: dict[str, Callable[[Graph], list[tuple[int, int, int]]]] = {
    "paths2": length2_path_triples,
}


def gen_hoso_instance(
    topology: HeavyHexTopology, seed: int, triple_rule="paths2"
) -> tuple[IsingProblem, InstanceMetadata]:
    """Higher-order spin glass: +-1 coefficients on every node, every edge,
    and every triple selected by ``triple_rule`` (default: length-2 paths)."""
    g = topology.graph
    if callable(triple_rule):
        rule_name = getattr(triple_rule, "__name__", "custom")
        triples = [tuple(sorted(t)) for t in triple_rule(g)]
    else:
        rule_name = str(triple_rule)
        if rule_name not in TRIPLE_RULES:
            raise ValueError(f"unknown triple rule {rule_name!r}")
        triples = TRIPLE_RULES[rule_name](g)
    rng = derive_rng(seed)
    pm = np.array([-1.0, 1.0])
    linear = {(i,): float(rng.choice(pm)) for i in range(g.num_nodes)}
    quadratic = {(u, v): float(rng.choice(pm)) for u, v, _ in g.edges}
    cubic = {t: float(rng.choice(pm)) for t in sorted(triples)}
    problem = IsingProblem(
        num_spins=g.num_nodes, linear=linear, quadratic=quadratic, cubic=cubic
    )
    meta = InstanceMetadata(
        name=f"hoso-{topology.spec}-s{seed}",
        family="hoso",
        opt_value=None,
        source="generated",
        provenance={"generator": "gen_hoso_instance", "seed": int(seed), "triple_rule": rule_name,
                    "topology": topology.spec},
    )
    return problem, meta


def gen_planar_spin_glass(topology: HeavyHexTopology, seed: int) -> IsingProblem:
    """Quadratic-only spin glass with couplings uniform in [-1, 1]."""
    g = topology.graph
    rng = derive_rng(seed)
    quadratic = {(u, v): float(rng.uniform(-1.0, 1.0)) for u, v, _ in g.edges}
    return IsingProblem(num_spins=g.num_nodes, quadratic=quadratic)


# ---------------------------------------------------------------------------
# Serialization (canonical instance file format; see schema/)
# ---------------------------------------------------------------------------

def _require(doc: dict, key: str, path: str = ""):
    if key not in doc:
        raise InstanceFormatError(f"missing field {path + key!r}")
    return doc[key]


def save_instance(path, problem: IsingProblem, metadata: InstanceMetadata) -> None:
    """Write an instance file. Max-cut instances store the graph's edges;
    the other families store explicit term lists."""
    doc: dict = {
        "format_version": FORMAT_VERSION,
        "name": metadata.name,
        "family": metadata.family,
        "num_spins": problem.num_spins,
        "offset": problem.offset,
        "opt_value": metadata.opt_value,
        "provenance": {
            "generator": metadata.provenance.get("generator"),
            "seed": metadata.provenance.get("seed"),
            "triple_rule": metadata.provenance.get("triple_rule"),
            "source": metadata.source,
            **{k: v for k, v in metadata.provenance.items()
               if k not in ("generator", "seed", "triple_rule")},
        },
    }
    if metadata.family == "maxcut":
        if metadata.graph is None:
            raise ValueError("max-cut metadata must carry its graph")
        doc["edges"] = [[u, v, w] for u, v, w in metadata.graph.edges]
    else:
        doc["linear"] = [[k[0], c] for k, c in sorted(problem.linear.items())]
        doc["quadratic"] = [[k[0], k[1], c] for k, c in sorted(problem.quadratic.items())]
        doc["cubic"] = [[k[0], k[1], k[2], c] for k, c in sorted(problem.cubic.items())]
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


def load_instance(path) -> tuple[IsingProblem, InstanceMetadata]:
    """Load and validate an instance file; inverse of :func:`save_instance`."""
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    version = _require(doc, "format_version")
    if version != FORMAT_VERSION:
        raise InstanceFormatError(f"unsupported format_version {version!r}")
    name = _require(doc, "name")
    family = _require(doc, "family")
    if family not in FAMILIES:
        raise InstanceFormatError(f"unknown family {family!r}")
    num_spins = _require(doc, "num_spins")
    offset = float(doc.get("offset", 0.0))
    opt_value = doc.get("opt_value")
    prov = dict(doc.get("provenance") or {})
    source = prov.pop("source", None) or "imported"
    prov = {k: v for k, v in prov.items() if v is not None}

    try:
        if family == "maxcut":
            if offset != 0.0:
                raise InstanceFormatError("max-cut instances must have offset 0")
            edges = _require(doc, "edges")
            graph = Graph.build(num_spins, edges)
            problem = maxcut_to_ising(graph)
        else:
            graph = None
            linear = {(int(i),): float(c) for i, c in _require(doc, "linear")}
            quad_rows = _require(doc, "quadratic")
            quadratic = {}
            for row in quad_rows:
                i, j, c = int(row[0]), int(row[1]), float(row[2])
                key = tuple(sorted((i, j)))
                if key in quadratic:
                    raise InstanceFormatError(f"duplicate quadratic key {key}")
                quadratic[key] = c
            cubic = {}
            for row in doc.get("cubic") or []:
                i, j, k, c = int(row[0]), int(row[1]), int(row[2]), float(row[3])
                key = tuple(sorted((i, j, k)))
                if key in cubic:
                    raise InstanceFormatError(f"duplicate cubic key {key}")
                cubic[key] = c
            problem = IsingProblem(
                num_spins=int(num_spins), linear=linear, quadratic=quadratic,
                cubic=cubic, offset=offset,
            )
    except (ValueError, IndexError) as exc:
        if isinstance(exc, InstanceFormatError):
            raise
        raise InstanceFormatError(f"{path}: {exc}") from exc

    if family == "maxcut":
        try:
            n, d, _ = parse_maxcut_name(name)
        except ValueError:
            pass
        else:
            if n != graph.num_nodes:
                raise InstanceFormatError(
                    f"name {name!r} claims {n} nodes but graph has {graph.num_nodes}"
                )
            deg = graph.degrees()
            if deg.size and (deg != d).any():
                raise InstanceFormatError(f"name {name!r} claims degree {d} but graph is not {d}-regular")
    meta = InstanceMetadata(
        name=name,
        family=family,
        opt_value=None if opt_value is None else float(opt_value),
        source=source,
        provenance=prov,
        graph=graph,
    )
    return problem, meta
