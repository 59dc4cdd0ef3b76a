#!/usr/bin/env python3
"""Emit the seeded unweighted max-cut reference instances.

The six benchmark graphs are regenerated from their reference (N, d, seed)
tuples with ``networkx.random_regular_graph``, whose seeded RNG stream is
what gives the tuples meaning, and written in the canonical instance file
format consumed by the spinbench toolkit (see ``schema/instance.schema.json``
at the repository root). A checksum manifest records the content hashes and
the library version so emissions can be compared across machines.

This script deliberately does not import the toolkit: the instance file
format is the only coupling.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import platform
import sys
from pathlib import Path

import networkx as nx

FORMAT_VERSION = 1

# (nodes, degree, seed) tuples naming the "(N,d,s,u)" instances
INSTANCE_TUPLES = [
    (28, 3, 102),
    (30, 3, 264),
    (32, 3, 7),
    (80, 3, 68),
    (100, 3, 12),
    (120, 3, 8),
]


class EmissionError(RuntimeError):
    pass


def build_instance_doc(n: int, d: int, seed: int) -> dict:
    """Generate one graph and render it as an instance document."""
    graph = nx.random_regular_graph(d, n, seed=seed)
    if graph.number_of_nodes() != n:
        raise EmissionError(f"({n},{d},{seed}): wrong node count")
    degrees = dict(graph.degree())
    if sorted(degrees) != list(range(n)) or set(degrees.values()) != {d}:
        raise EmissionError(f"({n},{d},{seed}): graph is not {d}-regular on 0..{n - 1}")
    edges = sorted((min(u, v), max(u, v)) for u, v in graph.edges())
    if len(edges) != len(set(edges)) or len(edges) != n * d // 2:
        raise EmissionError(f"({n},{d},{seed}): graph is not simple {d}-regular")
    return {
        "format_version": FORMAT_VERSION,
        "name": f"({n},{d},{seed},u)",
        "family": "maxcut",
        "num_spins": n,
        "offset": 0.0,
        "opt_value": None,  # stays null until solved downstream
        "provenance": {
            "generator": "networkx.random_regular_graph",
            "seed": seed,
            "triple_rule": None,
            "source": "imported",
            "networkx_version": nx.__version__,
        },
        "edges": [[u, v, 1.0] for u, v in edges],
    }


def render(doc: dict) -> str:
    return json.dumps(doc, indent=1) + "\n"


def emit_instances(out_dir, tuples=INSTANCE_TUPLES) -> dict[str, str]:
    """Write one instance file per tuple plus ``manifest.json``.

    All documents are built and validated before anything is written, so a
    failure emits nothing partial. Returns {filename: sha256}.
    """
    rendered: list[tuple[str, str]] = []
    for n, d, seed in tuples:
        doc = build_instance_doc(n, d, seed)
        rendered.append((f"{doc['name']}.json", render(doc)))

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    hashes: dict[str, str] = {}
    for filename, text in rendered:
        (out_dir / filename).write_text(text, encoding="utf-8")
        hashes[filename] = hashlib.sha256(text.encode("utf-8")).hexdigest()
    manifest = {
        "format_version": FORMAT_VERSION,
        "networkx_version": nx.__version__,
        "python_version": platform.python_version(),
        "sha256": hashes,
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )
    return hashes


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="instances", help="output directory")
    args = parser.parse_args(argv)
    try:
        hashes = emit_instances(args.out_dir)
    except EmissionError as exc:
        print(f"emission failed, nothing written: {exc}", file=sys.stderr)
        return 1
    for filename, digest in sorted(hashes.items()):
        print(f"{digest}  {filename}")
    print(f"{len(hashes)} instances + manifest -> {args.out_dir} (networkx {nx.__version__})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
