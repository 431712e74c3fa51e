"""Named evaluation graphs.

The two public social graphs used throughout the experiments are read from
``$GRAPHCRAWL_DATA_DIR`` when present (SNAP file names, optionally
gzipped).  Without them a seeded directed heavy-tailed stand-in of the same
scale is generated, and the returned info says so.
"""

from __future__ import annotations

import functools
import os
from pathlib import Path

from .graph import Graph, GraphError, generate_directed_power_law, largest_connected_component, load_edge_list

DATA_ENV = "GRAPHCRAWL_DATA_DIR"

# stand-in generator arguments, sized so the LCC lands near the real graphs'
# node count, undirected edge count and largest in/out degrees
_SPECS = {
    "soc-epinions": {"files": ("soc-Epinions1.txt", "soc-Epinions1.txt.gz"),
                     "lcc_nodes": 75877, "lcc_edges": 405739,
                     "standin": {"n": 76500, "mean_out_degree": 5.55, "seed": 20110, "reciprocity": 0.25,
                                 "max_in_weight": 3000, "max_out_weight": 950}},
    "soc-slashdot": {"files": ("soc-Slashdot0811.txt", "soc-Slashdot0811.txt.gz"),
                     "lcc_nodes": 77360, "lcc_edges": None,
                     "standin": {"n": 77690, "mean_out_degree": 6.3, "seed": 20111, "reciprocity": 0.3,
                                 "max_in_weight": 2600, "max_out_weight": 1400}},
}


def names() -> list[str]:
    return sorted(_SPECS)


def find_file(name: str) -> Path | None:
    root = os.environ.get(DATA_ENV)
    if not root:
        return None
    for f in _SPECS[name]["files"]:
        p = Path(root) / f
        if p.exists():
            return p
    return None


@functools.lru_cache(maxsize=4)
def load(name: str, lcc: bool = True) -> tuple[Graph, dict]:
    """LCC of a named graph and an info dict (``source`` is ``file`` or ``stand-in``)."""
    if name not in _SPECS:
        raise GraphError(f"unknown dataset {name!r}; known: {', '.join(names())}")
    spec = _SPECS[name]
    path = find_file(name)
    if path is not None:
        g = load_edge_list(path, directed=True)
        info = {"name": name, "source": "file", "path": str(path)}
    else:
        g = generate_directed_power_law(**spec["standin"])
        info = {"name": name, "source": "stand-in", "params": spec["standin"]}
    if lcc:
        g = largest_connected_component(g)
    info.update(nodes=g.node_count, undirected_edges=g.edge_count_undirected,
                directed_edges=g.edge_count_directed)
    return g, info
