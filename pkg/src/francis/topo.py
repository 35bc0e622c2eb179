"""Network topologies: fat-tree and Jellyfish generators, edge-list I/O, queries.

Node ids are dense integers starting at 0.  A topology is immutable after
construction and safe to share read-only across scenario runs; all mutable
simulation state (link up/down, queues) lives in the simulator.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace

CORE = "core"
AGG = "aggregation"
TOR = "tor"

# Scenario defaults: 100 Gbps links with 100 +- 10 ns propagation delay and
# 0.1% per-packet loss.
DEFAULT_BANDWIDTH_BPS = 100_000_000_000
DEFAULT_DELAY_NS = 100
DEFAULT_JITTER_NS = 10
DEFAULT_LOSS_RATE = 0.001


class TopologyError(ValueError):
    pass


class DisconnectedError(TopologyError):
    """Raised where an operation requires a connected graph.

    Carries the component partition so callers can report what is split off.
    """

    def __init__(self, components):
        self.components = components
        sizes = sorted((len(c) for c in components), reverse=True)
        super().__init__(f"graph is disconnected: {len(components)} components, sizes {sizes[:8]}")


@dataclass(frozen=True)
class LinkParams:
    bandwidth_bps: int = DEFAULT_BANDWIDTH_BPS
    base_delay_ns: int = DEFAULT_DELAY_NS
    jitter_ns: int = DEFAULT_JITTER_NS
    loss_rate: float = DEFAULT_LOSS_RATE

    def validate(self):
        if not (0.0 <= self.loss_rate < 1.0):
            raise TopologyError(f"loss_rate must be in [0, 1): {self.loss_rate}")
        if self.base_delay_ns <= self.jitter_ns or self.jitter_ns < 0:
            raise TopologyError(
                f"need base_delay_ns > jitter_ns >= 0: {self.base_delay_ns}, {self.jitter_ns}")
        if self.bandwidth_bps <= 0:
            raise TopologyError(f"bandwidth must be positive: {self.bandwidth_bps}")


class Topology:
    """Undirected switch graph with per-node port numbering and per-link params.

    adjacency[u] is an ordered list of (neighbor, port_index); port indices are
    dense 0..degree-1.  Every undirected link appears in ``links`` exactly once
    under the key (min(u,v), max(u,v)).
    """

    def __init__(self, node_count, edges, roles=None, link_params=None,
                 default_link=None, hosts_per_tor=4):
        self.n = node_count
        self.hosts_per_tor = hosts_per_tor
        self.roles = roles if roles is not None else {v: TOR for v in range(node_count)}
        default = default_link or LinkParams()
        default.validate()
        self.adj: list[list[tuple[int, int]]] = [[] for _ in range(node_count)]
        self.links: dict[tuple[int, int], LinkParams] = {}
        self._port_of: dict[tuple[int, int], int] = {}
        link_params = link_params or {}
        for (u, v) in edges:
            if u == v:
                raise TopologyError(f"self-loop at node {u}")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise TopologyError(f"edge ({u},{v}) out of range for n={node_count}")
            key = (u, v) if u < v else (v, u)
            if key in self.links:
                raise TopologyError(f"duplicate edge {key}")
            lp = link_params.get(key, default)
            lp.validate()
            self.links[key] = lp
            self._port_of[(u, v)] = len(self.adj[u])
            self._port_of[(v, u)] = len(self.adj[v])
            self.adj[u].append((v, len(self.adj[u])))
            self.adj[v].append((u, len(self.adj[v])))
        # adjacency stores (neighbor, port) where port equals the slot index;
        # rebuild pairs so the stored port matches position.
        for u in range(node_count):
            self.adj[u] = [(nb, i) for i, (nb, _) in enumerate(self.adj[u])]
        self.m = len(self.links)

    # -- queries -----------------------------------------------------------
    def degree(self, u):
        return len(self.adj[u])

    def neighbors(self, u):
        return [nb for nb, _ in self.adj[u]]

    def port(self, u, v):
        return self._port_of[(u, v)]

    def peer(self, u, port):
        return self.adj[u][port][0]

    def link(self, u, v):
        return self.links[(u, v) if u < v else (v, u)]

    def link_key(self, u, v):
        return (u, v) if u < v else (v, u)

    def tors(self):
        return [v for v in range(self.n) if self.roles[v] == TOR]

    def components(self, dead_nodes=frozenset(), dead_links=frozenset()):
        """Connected components, optionally with failed nodes/links removed."""
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s] or s in dead_nodes:
                continue
            comp, stack = [], [s]
            seen[s] = True
            while stack:
                u = stack.pop()
                comp.append(u)
                for nb, _ in self.adj[u]:
                    if seen[nb] or nb in dead_nodes:
                        continue
                    if self.link_key(u, nb) in dead_links:
                        continue
                    seen[nb] = True
                    stack.append(nb)
            comps.append(comp)
        return comps

    def validate(self):
        """Check structural invariants; raises TopologyError on violation."""
        for u in range(self.n):
            ports = [p for _, p in self.adj[u]]
            if ports != list(range(len(self.adj[u]))):
                raise TopologyError(f"ports of node {u} not dense: {ports}")
            for nb, _ in self.adj[u]:
                if (u, nb) not in self._port_of or (nb, u) not in self._port_of:
                    raise TopologyError(f"asymmetric adjacency at ({u},{nb})")
        for key, lp in self.links.items():
            lp.validate()
        return True

    def summary(self, with_diameter=False):
        hist: dict[int, int] = {}
        for u in range(self.n):
            hist[self.degree(u)] = hist.get(self.degree(u), 0) + 1
        out = {
            "nodes": self.n,
            "edges": self.m,
            "roles": {r: sum(1 for v in self.roles.values() if v == r)
                      for r in sorted(set(self.roles.values()))},
            "degree_histogram": {str(k): hist[k] for k in sorted(hist)},
        }
        if with_diameter:
            out["diameter"] = diameter(self)
        return out

    def summary_json(self, with_diameter=False):
        return json.dumps(self.summary(with_diameter=with_diameter), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# Generators


def build_fat_tree(k, default_link=None, hosts_per_tor=4):
    """Standard 3-level k-ary fat-tree: (k/2)^2 cores, k pods of k/2 agg + k/2 ToR.

    5k^2/4 switches, k^3/2 links, switch-to-switch diameter 4.
    """
    if k < 4 or k % 2 != 0:
        raise TopologyError(f"fat-tree arity must be an even integer >= 4, got {k}")
    half = k // 2
    n_core = half * half
    core = list(range(n_core))
    roles = {c: CORE for c in core}
    edges = []
    nid = n_core
    for pod in range(k):
        aggs = list(range(nid, nid + half))
        nid += half
        tors = list(range(nid, nid + half))
        nid += half
        for a in aggs:
            roles[a] = AGG
        for t in tors:
            roles[t] = TOR
        for i, a in enumerate(aggs):
            # agg i in each pod connects to core block i (one core per column slot)
            for j in range(half):
                edges.append((a, core[i * half + j]))
            for t in tors:
                edges.append((a, t))
    t = Topology(nid, edges, roles=roles, default_link=default_link,
                 hosts_per_tor=hosts_per_tor)
    t.fat_tree_k = k
    return t


def fat_tree_layout(k):
    """Index helpers for a build_fat_tree(k) topology.

    Returns dict with core/agg/tor id calculators used by the structural
    multicast tree builder.
    """
    half = k // 2
    n_core = half * half

    def agg_id(pod, i):
        return n_core + pod * k + i

    def tor_id(pod, i):
        return n_core + pod * k + half + i

    def core_id(col, j):
        return col * half + j

    return {"k": k, "half": half, "n_core": n_core,
            "agg": agg_id, "tor": tor_id, "core": core_id}


def build_jellyfish(n, r, seed, default_link=None, hosts_per_tor=4):
    """Random r-regular switch graph (simple), deterministic per seed.

    Built by repeated random pairing of port stubs; colliding pairs are
    resolved by edge swaps, with full restarts as a fallback.
    """
    if r >= n:
        raise TopologyError(f"degree r={r} must be < n={n}")
    if (n * r) % 2 != 0:
        raise TopologyError(f"n*r must be even, got n={n} r={r}")
    rng = random.Random(seed)
    for _attempt in range(100):
        stubs = [v for v in range(n) for _ in range(r)]
        rng.shuffle(stubs)
        edges = set()
        leftovers = []
        for i in range(0, len(stubs), 2):
            u, v = stubs[i], stubs[i + 1]
            key = (u, v) if u < v else (v, u)
            if u == v or key in edges:
                leftovers.append(key)
            else:
                edges.add(key)
        ok = True
        for (u, v) in leftovers:
            # swap with a random existing edge (a,b): replace by (u,a),(v,b)
            fixed = False
            pool = list(edges)
            for _ in range(200):
                a, b = pool[rng.randrange(len(pool))]
                if len({u, v, a, b}) < 4:
                    continue
                e1 = (u, a) if u < a else (a, u)
                e2 = (v, b) if v < b else (b, v)
                if e1 in edges or e2 in edges:
                    continue
                edges.discard((a, b))
                edges.add(e1)
                edges.add(e2)
                fixed = True
                break
            if not fixed:
                ok = False
                break
        if ok:
            t = Topology(n, sorted(edges), default_link=default_link,
                         hosts_per_tor=hosts_per_tor)
            return t
    raise TopologyError(f"failed to build simple {r}-regular graph on {n} nodes")


# ---------------------------------------------------------------------------
# Edge-list I/O


def load_edge_list(text, default_link=None, hosts_per_tor=4):
    """Parse an edge-list document: one "u v [loss_rate] [delay_ns]" per line.

    '#' starts a comment.  Duplicate edges (in either orientation) and
    self-loops are rejected with the offending line number.
    """
    default = default_link or LinkParams()
    edges = []
    params = {}
    seen = {}
    max_id = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 2 or len(parts) > 4:
            raise TopologyError(f"line {lineno}: expected 'u v [loss_rate] [delay_ns]', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
            loss = float(parts[2]) if len(parts) >= 3 else default.loss_rate
            delay = int(parts[3]) if len(parts) >= 4 else default.base_delay_ns
        except ValueError as e:
            raise TopologyError(f"line {lineno}: {e}") from None
        if u < 0 or v < 0:
            raise TopologyError(f"line {lineno}: negative node id")
        if u == v:
            raise TopologyError(f"line {lineno}: self-loop at node {u}")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise TopologyError(f"line {lineno}: duplicate edge {u} {v} (first on line {seen[key]})")
        seen[key] = lineno
        edges.append(key)
        jitter = default.jitter_ns if delay > default.jitter_ns else 0
        params[key] = replace(default, loss_rate=loss, base_delay_ns=delay, jitter_ns=jitter)
        max_id = max(max_id, u, v)
    if not edges:
        raise TopologyError("empty edge list")
    return Topology(max_id + 1, edges, link_params=params, default_link=default,
                    hosts_per_tor=hosts_per_tor)


def serialize_edge_list(t: Topology):
    lines = [f"# nodes={t.n} edges={t.m}"]
    for (u, v) in sorted(t.links):
        lp = t.links[(u, v)]
        lines.append(f"{u} {v} {lp.loss_rate:g} {lp.base_delay_ns}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Distance queries


def bfs_depths(t: Topology, src, allowed=None):
    """Hop distances from src (-1 for unreachable); plain list BFS."""
    depth = [-1] * t.n
    depth[src] = 0
    frontier = [src]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for u in frontier:
            for nb, _ in t.adj[u]:
                if depth[nb] < 0 and (allowed is None or allowed(u, nb)):
                    depth[nb] = d
                    nxt.append(nb)
        frontier = nxt
    return depth


def eccentricity(t: Topology, src):
    depth = bfs_depths(t, src)
    if min(depth) < 0:
        raise DisconnectedError(t.components())
    return max(depth)


def diameter(t: Topology):
    """Max over node pairs of unweighted shortest-path length (all-pairs BFS)."""
    comps = t.components()
    if len(comps) != 1:
        raise DisconnectedError(comps)
    best = 0
    for s in range(t.n):
        depth = bfs_depths(t, s)
        m = max(depth)
        if m > best:
            best = m
    return best
