"""Information flow graphs for one coordinated repair and their min cuts.

Layout (all capacities in units of beta, ``None`` = unbounded):

* ``S -> dev{i}.in`` unbounded, ``dev{i}.in -> dev{i}.out`` alpha, for the
  ``n = d + t`` initial devices;
* newcomer ``new{j}`` replacing device ``j`` (``j < t``) has ``in``, ``coord``
  and ``out`` nodes: helper ``out -> new{j}.in`` beta, ``new{j}.in ->
  new{j}.coord`` unbounded, ``new{j}.in -> new{j'}.coord`` beta' and
  ``new{j}.coord -> new{j}.out`` alpha;
* with ``aligned=True`` each extra systematic helper (index ``t..k-1``)
  feeds every newcomer through one shared node behind a single beta edge,
  which models it sending the same symbol to all of them.

The min cut is the smallest max-flow from ``S`` to a data collector
attached to any ``k`` of the devices alive after the repair.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Optional

import networkx as nx

SOURCE = "S"
COLLECTOR = "DC"


@dataclass
class FlowGraph:
    k: int
    d: int
    t: int
    alpha: int
    beta: int = 1
    beta_prime: int = 1
    aligned: bool = False
    nodes: list[str] = dc_field(default_factory=list)
    edges: dict[tuple[str, str], Optional[int]] = dc_field(default_factory=dict)
    live: list[str] = dc_field(default_factory=list)

    @property
    def file_size(self) -> int:
        return self.k * self.alpha

    def add_edge(self, u: str, v: str, capacity: Optional[int]) -> None:
        if capacity is not None and capacity < 0:
            raise ValueError("capacities must be nonnegative")
        for x in (u, v):
            if x not in self.nodes:
                self.nodes.append(x)
        self.edges[(u, v)] = capacity

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.nodes)
        for (u, v), cap in self.edges.items():
            if cap is None:
                g.add_edge(u, v)
            else:
                g.add_edge(u, v, capacity=cap)
        return g

    def to_dot(self, collector: Optional[tuple[str, ...]] = None) -> str:
        """Graphviz text; unbounded edges are drawn dashed."""
        lines = [f'digraph "flow_k{self.k}_d{self.d}_t{self.t}{"_aligned" if self.aligned else ""}" {{', "  rankdir=LR;"]
        for n in self.nodes:
            lines.append(f'  "{n}";')
        for (u, v), cap in self.edges.items():
            label = "inf" if cap is None else str(cap)
            style = ", style=dashed" if cap is None else ""
            lines.append(f'  "{u}" -> "{v}" [label="{label}"{style}];')
        if collector:
            for out in collector:
                lines.append(f'  "{out}" -> "{COLLECTOR}" [label="inf", style=dashed];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_flow_graph(
    k: int,
    d: int,
    t: int,
    aligned: bool,
    alpha: Optional[int] = None,
    beta: int = 1,
    beta_prime: int = 1,
) -> FlowGraph:
    """Graph of ``t`` simultaneous repairs from ``d`` helpers (MSCR point by default)."""
    if t < 1 or d < k or k < 1:
        raise ValueError("need t >= 1 and d >= k >= 1")
    if alpha is None:
        alpha = (d - k + t) * beta
    n = d + t
    g = FlowGraph(k, d, t, alpha, beta, beta_prime, aligned)
    for i in range(n):
        g.add_edge(SOURCE, f"dev{i}.in", None)
        g.add_edge(f"dev{i}.in", f"dev{i}.out", alpha)
    newcomers = list(range(t))
    helpers = list(range(t, n))
    shared = {h for h in helpers if aligned and t >= 2 and h < k}
    for h in helpers:
        if h in shared:
            g.add_edge(f"dev{h}.out", f"share{h}", beta)
            for j in newcomers:
                g.add_edge(f"share{h}", f"new{j}.in", None)
        else:
            for j in newcomers:
                g.add_edge(f"dev{h}.out", f"new{j}.in", beta)
    for j in newcomers:
        g.add_edge(f"new{j}.in", f"new{j}.coord", None)
        for j2 in newcomers:
            if j2 != j:
                g.add_edge(f"new{j}.in", f"new{j2}.coord", beta_prime)
        g.add_edge(f"new{j}.coord", f"new{j}.out", alpha)
    g.live = [f"new{j}.out" for j in newcomers] + [f"dev{h}.out" for h in helpers]
    return g


@dataclass
class MinCut:
    value: int
    collector: tuple[str, ...]
    source_side: frozenset
    per_collector: dict[tuple[str, ...], int]

    def cut_edges(self, g: FlowGraph) -> list[tuple[str, str, Optional[int]]]:
        return [(u, v, c) for (u, v), c in g.edges.items() if u in self.source_side and v not in self.source_side]


def collector_flow(g: FlowGraph, collector: tuple[str, ...]) -> tuple[int, frozenset]:
    net = g.to_networkx()
    for out in collector:
        net.add_edge(out, COLLECTOR)
    value, (reach, _) = nx.minimum_cut(net, SOURCE, COLLECTOR)
    return int(value), frozenset(reach)


def min_cut(g: FlowGraph) -> MinCut:
    """Minimum over every data collector of the S-to-collector max flow."""
    best = None
    per = {}
    for coll in itertools.combinations(g.live, g.k):
        value, side = collector_flow(g, coll)
        per[coll] = value
        if best is None or value < best[0]:
            best = (value, coll, side)
    return MinCut(best[0], best[1], best[2], per)
