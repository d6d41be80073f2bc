"""Label-preserving isomorphisms of the leaf/curve graph, and the Morita and
isomorphism decision procedures built on them.

Graphs here are tiny (a vertex per leaf), so the search is a plain
backtracking over vertex assignments with label/degree pre-partitioning.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter, defaultdict
from dataclasses import dataclass

from .model import LabeledGraph, TssSurface, build_graph, format_rational

DEFAULT_MAX_VERTICES = 12


class GraphSizeError(ValueError):
    pass


@dataclass(frozen=True)
class GraphMap:
    """A bijection on vertices and edges, optionally reversing all orientations."""

    vertex_items: tuple[tuple[str, str], ...]
    edge_items: tuple[tuple[str, str], ...]
    reversal: bool = False

    @classmethod
    def from_dicts(cls, vertices: dict, edges: dict, reversal: bool = False) -> "GraphMap":
        return cls(tuple(sorted(vertices.items())), tuple(sorted(edges.items())), bool(reversal))

    @classmethod
    def identity(cls, g: LabeledGraph) -> "GraphMap":
        return cls.from_dicts({v.id: v.id for v in g.vertices}, {e.id: e.id for e in g.edges})

    @property
    def vertex_map(self) -> dict:
        return dict(self.vertex_items)

    @property
    def edge_map(self) -> dict:
        return dict(self.edge_items)

    def is_identity(self) -> bool:
        return not self.reversal and all(a == b for a, b in self.vertex_items + self.edge_items)

    def compose(self, other: "GraphMap") -> "GraphMap":
        """``self o other``: apply ``other`` first."""
        vm, em = self.vertex_map, self.edge_map
        return GraphMap.from_dicts(
            {k: vm[v] for k, v in other.vertex_items},
            {k: em[v] for k, v in other.edge_items},
            self.reversal != other.reversal,
        )

    def inverse(self) -> "GraphMap":
        return GraphMap.from_dicts(
            {v: k for k, v in self.vertex_items},
            {v: k for k, v in self.edge_items},
            self.reversal,
        )

    def to_json(self) -> dict:
        return {"vertices": self.vertex_map, "edges": self.edge_map, "reversal": self.reversal}

    @classmethod
    def from_json(cls, obj: dict) -> "GraphMap":
        if set(obj) != {"vertices", "edges", "reversal"}:
            raise ValueError("graph map needs exactly 'vertices', 'edges', 'reversal'")
        return cls.from_dicts(obj["vertices"], obj["edges"], obj["reversal"])


def check_map(g1: LabeledGraph, g2: LabeledGraph, m: GraphMap) -> list[str]:
    """Pointwise verification of a candidate isomorphism; returns problems."""
    problems = []
    vm, em = m.vertex_map, m.edge_map
    if sorted(vm) != sorted(v.id for v in g1.vertices) or sorted(vm.values()) != sorted(v.id for v in g2.vertices):
        return ["vertex map is not a bijection"]
    if sorted(em) != sorted(e.id for e in g1.edges) or sorted(em.values()) != sorted(e.id for e in g2.edges):
        return ["edge map is not a bijection"]
    flip = -1 if m.reversal else 1
    for v in g1.vertices:
        w = g2.vertex(vm[v.id])
        if (w.genus, w.ends) != (v.genus, v.ends):
            problems.append(f"vertex {v.id}: genus or end count not preserved")
        if w.sign != flip * v.sign:
            problems.append(f"vertex {v.id}: sign inconsistent with reversal flag")
    edges2 = {e.id: e for e in g2.edges}
    for e in g1.edges:
        f = edges2[em[e.id]]
        if f.period != e.period:
            problems.append(f"edge {e.id}: period not preserved")
        ends = (vm[e.head], vm[e.tail]) if m.reversal else (vm[e.tail], vm[e.head])
        if (f.tail, f.head) != ends:
            problems.append(f"edge {e.id}: incidence not preserved")
    return problems


def _signature(g: LabeledGraph, flip: bool) -> dict:
    outs, ins = defaultdict(list), defaultdict(list)
    for e in g.edges:
        outs[e.tail].append(e.period)
        ins[e.head].append(e.period)
    sig = {}
    for v in g.vertices:
        o, i = tuple(sorted(outs[v.id])), tuple(sorted(ins[v.id]))
        sig[v.id] = (v.genus, v.ends, -v.sign, i, o) if flip else (v.genus, v.ends, v.sign, o, i)
    return sig


def _edge_buckets(g: LabeledGraph) -> dict:
    buckets = defaultdict(list)
    for e in g.edges:
        buckets[(e.tail, e.head, e.period)].append(e.id)
    return buckets


def _vertex_maps(g1, g2, reversal):
    sig1 = _signature(g1, reversal)
    sig2 = _signature(g2, False)
    if Counter(sig1.values()) != Counter(sig2.values()):
        return
    count1 = Counter((e.tail, e.head, e.period) for e in g1.edges)
    count2 = Counter((e.tail, e.head, e.period) for e in g2.edges)
    by_sig = defaultdict(list)
    for vid, sg in sig2.items():
        by_sig[sg].append(vid)
    order = sorted(sig1, key=lambda v: len(by_sig[sig1[v]]))
    periods = {e.period for e in g1.edges}

    def consistent(v, w, assign):
        for u, x in list(assign.items()) + [(v, w)]:
            for p in periods:
                if reversal:
                    ok = (count1[(v, u, p)] == count2[(x, w, p)] and count1[(u, v, p)] == count2[(w, x, p)])
                else:
                    ok = (count1[(v, u, p)] == count2[(w, x, p)] and count1[(u, v, p)] == count2[(x, w, p)])
                if not ok:
                    return False
        return True

    def extend(i, assign, used):
        if i == len(order):
            yield dict(assign)
            return
        v = order[i]
        for w in by_sig[sig1[v]]:
            if w in used or not consistent(v, w, assign):
                continue
            assign[v] = w
            used.add(w)
            yield from extend(i + 1, assign, used)
            del assign[v]
            used.discard(w)

    yield from extend(0, {}, set())


def graph_isomorphisms(g1: LabeledGraph, g2: LabeledGraph, allow_reversal: bool = False,
                       max_vertices: int = DEFAULT_MAX_VERTICES) -> list[GraphMap]:
    """Every label-preserving isomorphism ``g1 -> g2``.

    With ``allow_reversal`` the maps flipping every sign and reversing every
    edge are included as well (these come from orientation-reversing
    diffeomorphisms).
    """
    for g in (g1, g2):
        if len(g.vertices) > max_vertices:
            raise GraphSizeError(f"graph has {len(g.vertices)} vertices, search capped at {max_vertices}")
    if len(g1.vertices) != len(g2.vertices) or len(g1.edges) != len(g2.edges):
        return []

    buckets2 = _edge_buckets(g2)
    found = []
    for reversal in ((False, True) if allow_reversal else (False,)):
        for vm in _vertex_maps(g1, g2, reversal):
            choices = []
            for (tail, head, p), ids in sorted(_edge_buckets(g1).items(), key=lambda kv: sorted(kv[1])):
                key = (vm[head], vm[tail], p) if reversal else (vm[tail], vm[head], p)
                targets = buckets2.get(key, [])
                choices.append([(ids, perm) for perm in itertools.permutations(targets)])
            for combo in itertools.product(*choices):
                em = {}
                for ids, perm in combo:
                    em.update(zip(ids, perm))
                found.append(GraphMap.from_dicts(vm, em, reversal))
    return sorted(found, key=lambda m: (m.reversal, m.vertex_items, m.edge_items))


@dataclass(frozen=True)
class AutomorphismGroup:
    elements: tuple[GraphMap, ...]
    generators: tuple[GraphMap, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def identity(self) -> GraphMap:
        return next(m for m in self.elements if m.is_identity())

    def __contains__(self, m) -> bool:
        return m in set(self.elements)

    def name(self) -> str:
        n = self.order
        if n == 1:
            return "1"
        if n == 2:
            return "Z2"
        return f"G{n}"


def _generated(gens, identity):
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = g.compose(x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def automorphism_group(g: LabeledGraph, max_vertices: int = DEFAULT_MAX_VERTICES) -> AutomorphismGroup:
    elements = graph_isomorphisms(g, g, allow_reversal=True, max_vertices=max_vertices)
    elem_set = set(elements)
    identity = GraphMap.identity(g)
    if identity not in elem_set:
        raise AssertionError("identity missing from automorphism search")
    for a in elements:
        if a.inverse() not in elem_set:
            raise AssertionError("automorphism set not closed under inverse")
        for b in elements:
            if a.compose(b) not in elem_set:
                raise AssertionError("automorphism set not closed under composition")
    gens = []
    span = {identity}
    for m in elements:
        if m not in span:
            gens.append(m)
            span = _generated(gens, identity)
    return AutomorphismGroup(tuple(elements), tuple(gens))


def canonical_key(g: LabeledGraph, max_vertices: int = DEFAULT_MAX_VERTICES) -> str:
    """A string equal for two graphs iff they are (orientation-preservingly) isomorphic."""
    if len(g.vertices) > max_vertices:
        raise GraphSizeError(f"graph has {len(g.vertices)} vertices, search capped at {max_vertices}")
    classes = defaultdict(list)
    for v in g.vertices:
        classes[(v.genus, v.ends, v.sign)].append(v.id)
    labels = sorted(classes)
    vertex_part = [list(lab) for lab in labels for _ in classes[lab]]
    best = None
    for perms in itertools.product(*(itertools.permutations(classes[lab]) for lab in labels)):
        pos = {vid: i for i, vid in enumerate(itertools.chain.from_iterable(perms))}
        edges = sorted((pos[e.tail], pos[e.head], e.period) for e in g.edges)
        if best is None or edges < best:
            best = edges
    edge_part = [[a, b, format_rational(p)] for a, b, p in best or []]
    return json.dumps({"v": vertex_part, "e": edge_part}, separators=(",", ":"))


def morita_equivalent(s1: TssSurface, s2: TssSurface, max_vertices: int = DEFAULT_MAX_VERTICES):
    """Same oriented zero-set topology and modular periods.  Returns (bool, witness)."""
    maps = graph_isomorphisms(build_graph(s1), build_graph(s2), False, max_vertices)
    return (True, maps[0]) if maps else (False, None)


def isomorphic_tss(s1: TssSurface, s2: TssSurface, strict: bool = False,
                   max_vertices: int = DEFAULT_MAX_VERTICES):
    """Morita data plus volume agreement.

    By default only the total regularized volume is compared; ``strict``
    additionally requires a witness carrying each leaf to one of equal volume.
    """
    maps = graph_isomorphisms(build_graph(s1), build_graph(s2), False, max_vertices)
    if not maps:
        return False, None
    if strict:
        vol1 = {lf.id: lf.volume for lf in s1.leaves}
        vol2 = {lf.id: lf.volume for lf in s2.leaves}
        for m in maps:
            if all(vol1[a] == vol2[b] for a, b in m.vertex_items):
                return True, m
        return False, None
    if s1.total_volume() != s2.total_volume():
        return False, None
    return True, maps[0]
