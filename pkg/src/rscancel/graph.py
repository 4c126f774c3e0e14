"""Labeled directed multigraphs over <a> * <b>.

Edges carry a Word. In a *generator-labeled* graph every label is a
positive power of a or b: an edge u -> v labeled a^n stands for a directed
path of n a-edges whose interior vertices are left implicit. This keeps
graphs with exponents like 10^300 small. `expand` materializes the
letters when a graph is small enough.
"""

from __future__ import annotations

import json
import re
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .words import Syllable, Word, cyclic_canonical, format_word, parse_word, sort_key

FACTOR_INDEX = {"a": 0, "b": 1}


class Edge(NamedTuple):
    src: int
    dst: int
    label: Word


def is_run(label: Word) -> bool:
    return len(label.syllables) == 1 and label.syllables[0].exponent > 0


class LabeledGraph:
    """Vertices are ints, edges are keyed by int ids.

    Built incrementally with add_vertex/add_edge, then treated as
    immutable; every transformation returns a new graph.
    """

    def __init__(self, vertices: Iterable[int] = (), edges: Optional[Dict[int, Edge]] = None,
                 basepoint: Optional[int] = None):
        self._vertices = set(int(v) for v in vertices)
        self.edges: Dict[int, Edge] = {}
        self.basepoint = basepoint
        self._cache: dict = {}
        for eid, e in sorted((edges or {}).items()):
            self.add_edge(e.src, e.dst, e.label, eid=eid)
        if basepoint is not None:
            self._vertices.add(basepoint)

    # construction
    def add_vertex(self, v: int) -> int:
        self._vertices.add(int(v))
        self._cache.clear()
        return v

    def new_vertex(self) -> int:
        v = max(self._vertices, default=-1) + 1
        self._vertices.add(v)
        self._cache.clear()
        return v

    def add_edge(self, src: int, dst: int, label, eid: Optional[int] = None) -> int:
        if isinstance(label, str):
            label = parse_word(label)
        if eid is None:
            eid = max(self.edges, default=-1) + 1
        if eid in self.edges:
            raise ValueError(f"duplicate edge id {eid}")
        self._vertices.add(int(src))
        self._vertices.add(int(dst))
        self.edges[eid] = Edge(int(src), int(dst), label)
        self._cache.clear()
        return eid

    # queries
    @property
    def vertices(self) -> List[int]:
        return sorted(self._vertices)

    def num_vertices(self) -> int:
        return len(self._vertices)

    def num_edges(self) -> int:
        return len(self.edges)

    def copy(self) -> "LabeledGraph":
        return LabeledGraph(self._vertices, dict(self.edges), self.basepoint)

    def is_generator_labeled(self) -> bool:
        return all(is_run(e.label) for e in self.edges.values())

    def is_unit_labeled(self) -> bool:
        return all(is_run(e.label) and e.label.syllables[0].exponent == 1 for e in self.edges.values())

    def require_runs(self):
        for eid, e in self.edges.items():
            if not is_run(e.label):
                raise ValueError(f"edge {eid} has non-generator label {format_word(e.label)}; run ab_subdivide first")

    def total_letters(self) -> int:
        return sum(e.label.word_length for e in self.edges.values())

    def incidence(self):
        """out[(v, f)] and inn[(v, f)] as lists of edge ids (runs only)."""
        if "inc" not in self._cache:
            out = defaultdict(list)
            inn = defaultdict(list)
            for eid, e in sorted(self.edges.items()):
                f = e.label.syllables[0].factor
                out[(e.src, f)].append(eid)
                inn[(e.dst, f)].append(eid)
            self._cache["inc"] = (dict(out), dict(inn))
        return self._cache["inc"]

    def degree(self, v: int) -> int:
        return sum((e.src == v) + (e.dst == v) for e in self.edges.values())

    def is_reduced(self) -> bool:
        self.require_runs()
        out, inn = self.incidence()
        return all(len(x) < 2 for x in out.values()) and all(len(x) < 2 for x in inn.values())

    def __eq__(self, other) -> bool:
        return (isinstance(other, LabeledGraph) and self._vertices == other._vertices
                and self.edges == other.edges and self.basepoint == other.basepoint)

    def __repr__(self) -> str:
        return f"LabeledGraph(|V|={self.num_vertices()}, |E|={self.num_edges()}, basepoint={self.basepoint})"


# -- paths ----------------------------------------------------------------

@dataclass(frozen=True)
class GraphPath:
    """A path as a start vertex and (edge id, +1/-1) steps over whole edges."""

    start: int
    steps: Tuple[Tuple[int, int], ...] = ()

    def end(self, g: LabeledGraph) -> int:
        v = self.start
        for eid, o in self.steps:
            e = g.edges[eid]
            v = e.dst if o > 0 else e.src
        return v

    def inverse(self, g: LabeledGraph) -> "GraphPath":
        return GraphPath(self.end(g), tuple((eid, -o) for eid, o in reversed(self.steps)))

    def then(self, other: "GraphPath") -> "GraphPath":
        return GraphPath(self.start, self.steps + other.steps)

    def is_closed(self, g: LabeledGraph) -> bool:
        return self.end(g) == self.start

    def to_json(self):
        return {"start": self.start, "steps": [[eid, o] for eid, o in self.steps]}

    @classmethod
    def from_json(cls, d):
        return cls(int(d["start"]), tuple((int(a), int(b)) for a, b in d["steps"]))


def validate_path(g: LabeledGraph, p: GraphPath):
    if p.start not in g._vertices:
        raise ValueError(f"path starts at unknown vertex {p.start}")
    v = p.start
    for i, (eid, o) in enumerate(p.steps):
        if eid not in g.edges or o not in (1, -1):
            raise ValueError(f"step {i}: bad edge reference {(eid, o)}")
        e = g.edges[eid]
        here, there = (e.src, e.dst) if o > 0 else (e.dst, e.src)
        if here != v:
            raise ValueError(f"step {i}: edge {eid} does not continue from vertex {v}")
        v = there


def path_label(g: LabeledGraph, p: GraphPath) -> Word:
    validate_path(g, p)
    raw = []
    for eid, o in p.steps:
        lab = g.edges[eid].label
        if o < 0:
            lab = lab.inverse()
        raw.extend(lab.syllables)
    return Word(raw)


class Point(NamedTuple):
    """A position strictly inside a run: `offset` letters after its source."""

    eid: int
    offset: int


def read_word(g: LabeledGraph, start, word: Word):
    """Follow `word` from a vertex or Point in a reduced generator-labeled graph.

    Returns (end, segments) with segments = [(eid, +1/-1, letters)], or None
    if the word cannot be read.
    """
    out, inn = g.incidence()
    loc = start
    segs = []
    for s in word.syllables:
        f, remaining = s.factor, abs(s.exponent)
        forward = s.exponent > 0
        while remaining:
            if isinstance(loc, Point):
                e = g.edges[loc.eid]
                if e.label.syllables[0].factor != f:
                    return None
                n = e.label.syllables[0].exponent
                room = n - loc.offset if forward else loc.offset
                eid = loc.eid
            else:
                lst = (out if forward else inn).get((loc, f))
                if not lst:
                    return None
                eid = lst[0]
                e = g.edges[eid]
                n = e.label.syllables[0].exponent
                room = n
            step = min(room, remaining)
            segs.append((eid, 1 if forward else -1, step))
            remaining -= step
            if step == room:
                loc = e.dst if forward else e.src
            else:
                base = loc.offset if isinstance(loc, Point) else (0 if forward else n)
                loc = Point(eid, base + step if forward else base - step)
    return loc, segs


def read_path(g: LabeledGraph, start: int, word: Word) -> Optional[GraphPath]:
    """Whole-edge path from a vertex reading `word`, or None."""
    res = read_word(g, start, word)
    if res is None or isinstance(res[0], Point):
        return None
    steps = []
    for eid, o, k in res[1]:
        if k != g.edges[eid].label.syllables[0].exponent:
            return None
        steps.append((eid, o))
    return GraphPath(start, tuple(steps))


def segments_label(g: LabeledGraph, segs) -> Word:
    return Word((g.edges[eid].label.syllables[0].factor, o * k) for eid, o, k in segs)


# -- transformations ------------------------------------------------------

def ab_subdivide(g: LabeledGraph, expand: bool = False) -> LabeledGraph:
    """Replace each word-labeled edge by a path of generator edges.

    One run per syllable by default; with expand=True one edge per letter.
    Negative exponents become reversed edges. No folding is done.
    """
    h = LabeledGraph(g.vertices, basepoint=g.basepoint)
    nxt = max(g.vertices, default=-1) + 1
    for eid, e in sorted(g.edges.items()):
        if e.label.is_identity():
            raise ValueError(f"edge {eid} has the identity label")
        pieces = []
        for s in e.label.syllables:
            if expand:
                pieces.extend([(s.factor, 1 if s.exponent > 0 else -1)] * abs(s.exponent))
            else:
                pieces.append((s.factor, s.exponent))
        cur = e.src
        for i, (f, x) in enumerate(pieces):
            if i == len(pieces) - 1:
                tgt = e.dst
            else:
                tgt = nxt
                nxt += 1
            lab = Word.gen(f, abs(x))
            if x > 0:
                h.add_edge(cur, tgt, lab)
            else:
                h.add_edge(tgt, cur, lab)
            cur = tgt
    return h


def expand(g: LabeledGraph, max_letters: int = 200000) -> LabeledGraph:
    """Unit-edge version of a generator-labeled graph (small graphs only)."""
    g.require_runs()
    if g.total_letters() > max_letters:
        raise ValueError(f"graph has {g.total_letters()} letters; refusing to expand beyond {max_letters}")
    return ab_subdivide(g, expand=True)


def reduce(g: LabeledGraph, return_map: bool = False):
    """Fold until no two edges share (source, letter) or (target, letter).

    Works directly on runs: folding a^m against a^n with m < n identifies
    the endpoint of the shorter run with the point m letters along the
    longer one, which becomes a run of length n - m from there. The
    surviving vertex of each merge is the smallest id.
    """
    g.require_runs()
    parent = {v: v for v in g._vertices}

    def find(v):
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    edges = {}
    out = defaultdict(list)
    inn = defaultdict(list)
    for eid, e in sorted(g.edges.items()):
        s = e.label.syllables[0]
        edges[eid] = [e.src, e.dst, s.factor, s.exponent]
        out[(e.src, s.factor)].append(eid)
        inn[(e.dst, s.factor)].append(eid)
    work = deque()
    for key, lst in sorted(out.items()):
        if len(lst) > 1:
            work.append((0, key))
    for key, lst in sorted(inn.items()):
        if len(lst) > 1:
            work.append((1, key))

    def push(kind, key):
        if len((out if kind == 0 else inn)[key]) > 1:
            work.append((kind, key))

    def drop(eid):
        s, d, f, _ = edges.pop(eid)
        out[(s, f)].remove(eid)
        inn[(d, f)].remove(eid)

    def merge(x, y):
        x, y = find(x), find(y)
        if x == y:
            return
        if y < x:
            x, y = y, x
        parent[y] = x
        for f in ("a", "b"):
            moved = out.pop((y, f), [])
            for eid in moved:
                edges[eid][0] = x
            if moved:
                out[(x, f)].extend(moved)
                push(0, (x, f))
            moved = inn.pop((y, f), [])
            for eid in moved:
                edges[eid][1] = x
            if moved:
                inn[(x, f)].extend(moved)
                push(1, (x, f))

    while work:
        kind, key = work.popleft()
        table = out if kind == 0 else inn
        lst = table.get(key)
        if not lst or len(lst) < 2:
            continue
        v, f = key
        lst.sort(key=lambda e: (edges[e][3], e))
        e1, e2 = lst[0], lst[1]
        far = 1 if kind == 0 else 0  # index of the far endpoint
        u1, n1 = edges[e1][far], edges[e1][3]
        u2, n2 = edges[e2][far], edges[e2][3]
        if n1 == n2:
            drop(e2)
            merge(u1, u2)
        elif u1 == v:
            r = n2 % n1
            if r == 0:
                drop(e2)
                merge(v, u2)
            else:
                edges[e2][3] = r
        else:
            # e2 now starts (or ends) where e1 ends (or starts)
            table[key].remove(e2)
            near = 1 - far
            edges[e2][near] = u1
            edges[e2][3] = n2 - n1
            table[(u1, f)].append(e2)
            push(kind, (u1, f))
        push(kind, key)

    h = LabeledGraph(sorted({find(v) for v in g._vertices}),
                     basepoint=find(g.basepoint) if g.basepoint is not None else None)
    for eid in sorted(edges):
        s, d, f, n = edges[eid]
        h.add_edge(s, d, Word.gen(f, n), eid=eid)
    if return_map:
        return h, {v: find(v) for v in g.vertices}
    return h


def compress(g: LabeledGraph, keep: Iterable[int] = ()) -> LabeledGraph:
    """Merge runs through vertices that only continue a single run."""
    g.require_runs()
    keep = set(keep)
    if g.basepoint is not None:
        keep.add(g.basepoint)
    edges = {eid: [e.src, e.dst, e.label.syllables[0].factor, e.label.syllables[0].exponent]
             for eid, e in g.edges.items()}
    inc = defaultdict(set)
    for eid, (s, d, _, _) in edges.items():
        inc[s].add(eid)
        inc[d].add(eid)
    verts = set(g._vertices)
    changed = True
    while changed:
        changed = False
        for v in sorted(verts):
            if v in keep or len(inc[v]) != 2:
                continue
            e_in = [e for e in inc[v] if edges[e][1] == v and edges[e][0] != v]
            e_out = [e for e in inc[v] if edges[e][0] == v and edges[e][1] != v]
            if len(e_in) != 1 or len(e_out) != 1:
                continue
            x, y = e_in[0], e_out[0]
            if edges[x][2] != edges[y][2]:
                continue
            lo = min(x, y)
            s, d = edges[x][0], edges[y][1]
            n = edges[x][3] + edges[y][3]
            f = edges[x][2]
            for e in (x, y):
                inc[edges[e][0]].discard(e)
                inc[edges[e][1]].discard(e)
                del edges[e]
            edges[lo] = [s, d, f, n]
            inc[s].add(lo)
            inc[d].add(lo)
            verts.discard(v)
            del inc[v]
            changed = True
    h = LabeledGraph(sorted(verts), basepoint=g.basepoint)
    for eid in sorted(edges):
        s, d, f, n = edges[eid]
        h.add_edge(s, d, Word.gen(f, n), eid=eid)
    return h


def delete_degree_one(g: LabeledGraph, protected: Iterable[int] = ()) -> LabeledGraph:
    """Repeatedly delete vertices of degree <= 1 together with their edge."""
    protected = set(protected)
    if g.basepoint is not None:
        protected.add(g.basepoint)
    inc = defaultdict(list)
    for eid, e in g.edges.items():
        inc[e.src].append(eid)
        inc[e.dst].append(eid)
    alive_e = set(g.edges)
    alive_v = set(g._vertices)
    deg = {v: len(inc[v]) for v in alive_v}
    queue = deque(sorted(v for v in alive_v if deg[v] <= 1 and v not in protected))
    while queue:
        v = queue.popleft()
        if v not in alive_v or deg[v] > 1 or v in protected:
            continue
        alive_v.discard(v)
        for eid in inc[v]:
            if eid in alive_e:
                alive_e.discard(eid)
                e = g.edges[eid]
                other = e.dst if e.src == v else e.src
                deg[other] -= 1
                if other in alive_v and deg[other] <= 1 and other not in protected:
                    queue.append(other)
    return LabeledGraph(sorted(alive_v), {eid: g.edges[eid] for eid in sorted(alive_e)},
                        g.basepoint if g.basepoint in alive_v else None)


def disjoint_union(graphs: Sequence[LabeledGraph]):
    """Union with shifted ids; returns (graph, list of vertex offsets)."""
    h = LabeledGraph()
    offsets = []
    voff = 0
    eoff = 0
    for g in graphs:
        offsets.append((voff, eoff))
        for v in g.vertices:
            h.add_vertex(v + voff)
        for eid, e in sorted(g.edges.items()):
            h.add_edge(e.src + voff, e.dst + voff, e.label, eid=eid + eoff)
        voff += max(g.vertices, default=-1) + 1
        eoff += max(g.edges, default=-1) + 1
    if graphs and graphs[0].basepoint is not None:
        h.basepoint = graphs[0].basepoint
    return h, offsets


def canonical_form(g: LabeledGraph):
    """Isomorphism invariant of a connected reduced graph with basepoint.

    Vertices are renumbered in breadth-first order from the basepoint,
    following (factor, direction) in a fixed order, which is canonical
    because a reduced graph has at most one edge per (vertex, letter).
    """
    g.require_runs()
    if g.basepoint is None:
        raise ValueError("canonical_form needs a basepoint")
    out, inn = g.incidence()
    order = {g.basepoint: 0}
    queue = deque([g.basepoint])
    sig = []
    while queue:
        v = queue.popleft()
        for f in ("a", "b"):
            for table, forward in ((out, True), (inn, False)):
                lst = table.get((v, f), [])
                for eid in lst:
                    e = g.edges[eid]
                    w = e.dst if forward else e.src
                    if w not in order:
                        order[w] = len(order)
                        queue.append(w)
                    if forward:
                        sig.append((order[v], order[w], f, e.label.syllables[0].exponent))
    return len(order), tuple(sorted(sig))


# -- factor structure of reduced graphs -----------------------------------

@dataclass
class Component:
    factor: str
    vertices: List[int]          # in order along the component
    positions: List[int]         # distance from the first vertex
    length: int                  # total letters
    cycle: bool


@dataclass
class FactorStructure:
    """Decomposition of a reduced graph into a-components and b-components.

    In a reduced graph each vertex has at most one outgoing and one
    incoming run of each factor, so every component is a directed path or
    a directed cycle of runs. Vertices meeting both factors are the only
    places where a reduced path can change syllable.
    """

    components: Dict[str, List[Component]]
    where: Dict[str, Dict[int, Tuple[int, int]]]   # f -> v -> (component index, position)
    first_type: List[int]
    ft_index: Dict[int, int] = field(default_factory=dict)

    def has_in(self, v: int, f: str) -> bool:
        loc = self.where[f].get(v)
        if loc is None:
            return False
        comp = self.components[f][loc[0]]
        return comp.cycle or loc[1] > 0

    def has_out(self, v: int, f: str) -> bool:
        loc = self.where[f].get(v)
        if loc is None:
            return False
        comp = self.components[f][loc[0]]
        return comp.cycle or loc[1] < comp.length

    def first_type_on(self, f: str, ci: int) -> List[Tuple[int, int]]:
        comp = self.components[f][ci]
        ft = self.ft_index
        return [(p, v) for v, p in zip(comp.vertices, comp.positions) if v in ft]


def factor_structure(g: LabeledGraph) -> FactorStructure:
    if "fs" in g._cache:
        return g._cache["fs"]
    if not g.is_reduced():
        raise ValueError("graph is not reduced; call reduce() first")
    out, inn = g.incidence()
    comps: Dict[str, List[Component]] = {"a": [], "b": []}
    where: Dict[str, Dict[int, Tuple[int, int]]] = {"a": {}, "b": {}}
    for f in ("a", "b"):
        nxt = {}
        has_in = set()
        touched = set()
        for (v, ff), lst in out.items():
            if ff == f:
                e = g.edges[lst[0]]
                nxt[v] = (e.dst, e.label.syllables[0].exponent)
                has_in.add(e.dst)
                touched.update((v, e.dst))
        starts = sorted(v for v in touched if v not in has_in)
        seen = set()

        def walk(s, is_cycle):
            vs, ps = [s], [0]
            seen.add(s)
            v, pos = s, 0
            while v in nxt:
                w, n = nxt[v]
                pos += n
                if w == s and is_cycle:
                    break
                vs.append(w)
                ps.append(pos)
                seen.add(w)
                v = w
            comp = Component(f, vs, ps, pos, is_cycle)
            ci = len(comps[f])
            comps[f].append(comp)
            for vv, pp in zip(vs, ps):
                where[f][vv] = (ci, pp)

        for s in starts:
            walk(s, False)
        for s in sorted(touched - seen):
            if s not in seen:
                walk(s, True)
    first_type = sorted(set(where["a"]) & set(where["b"]))
    fs = FactorStructure(comps, where, first_type, {v: i for i, v in enumerate(first_type)})
    g._cache["fs"] = fs
    return fs


def syllable_moves(fs: FactorStructure, f: str):
    """Full-syllable moves between first-type vertices.

    Yields (x, y, d): reading f^d from x along its f-component ends at y.
    On cycle components each endpoint pair is reached by the two primitive
    displacements (less than one turn either way, or one full turn when
    x == y); longer windings are not listed.
    """
    for ci, comp in enumerate(fs.components[f]):
        ft = fs.first_type_on(f, ci)
        if comp.cycle:
            L = comp.length
            for px, x in ft:
                for py, y in ft:
                    if x == y:
                        yield x, y, L
                        yield x, y, -L
                    else:
                        d = (py - px) % L
                        yield x, y, d
                        yield x, y, d - L
        else:
            for px, x in ft:
                for py, y in ft:
                    if x != y:
                        yield x, y, py - px


def _alternating_csr(fs: FactorStructure):
    n = len(fs.first_type)
    out = []
    for f in ("a", "b"):
        adj = [set() for _ in range(n)]
        for x, y, _ in syllable_moves(fs, f):
            adj[fs.ft_index[x]].add(fs.ft_index[y])
        start = np.zeros(n + 1, np.int64)
        for i in range(n):
            start[i + 1] = start[i] + len(adj[i])
        nbr = np.fromiter((j for i in range(n) for j in sorted(adj[i])), np.int64, int(start[-1]))
        out.append((start, nbr))
    return out


def gamma_syllable(g: LabeledGraph, cap: Optional[int] = None) -> Optional[int]:
    """Minimal syllable length of a nontrivial cycle, or None.

    A cycle lying in one factor has syllable length 1. Any other reduced
    cycle changes factor only at first-type vertices, so it is a closed
    walk alternating between a-syllables and b-syllables, found by
    breadth-first search over (vertex, last factor).
    """
    fs = factor_structure(g)
    limit = cap if cap is not None else 2 * len(fs.first_type) + 2
    if any(c.cycle for f in ("a", "b") for c in fs.components[f]):
        return 1 if limit >= 1 else None
    if not fs.first_type or limit < 2:
        return None
    (a_start, a_nbr), (b_start, b_nbr) = _alternating_csr(fs)
    res = _kernels.alternating_girth(len(fs.first_type), a_start, a_nbr, b_start, b_nbr, limit)
    return None if res < 0 else int(res)


def enumerate_cycle_words(g: LabeledGraph, max_syllable: int, limit: int = 2_000_000) -> List[Word]:
    """Labels of reduced cycles with at most max_syllable syllables.

    One representative per class under rotation and inversion, sorted.
    Cycles through a cycle component wind at most once per syllable.
    `limit` bounds the number of search nodes as a safety valve.
    """
    fs = factor_structure(g)
    found = set()
    if max_syllable >= 1:
        for f in ("a", "b"):
            for c in fs.components[f]:
                if c.cycle:
                    found.add(cyclic_canonical(Word.gen(f, c.length)))
    if max_syllable < 2 or not fs.first_type:
        return sorted(found, key=sort_key)
    idx = fs.ft_index
    n = len(fs.first_type)
    moves = {"a": [[] for _ in range(n)], "b": [[] for _ in range(n)]}
    for f in ("a", "b"):
        for x, y, d in syllable_moves(fs, f):
            moves[f][idx[x]].append((idx[y], d))
    undirected = [set() for _ in range(n)]
    for f in ("a", "b"):
        for i in range(n):
            for j, _ in moves[f][i]:
                undirected[i].add(j)
                undirected[j].add(i)
    budget = [limit]
    other = {"a": "b", "b": "a"}
    for s in range(n):
        # distance back to s, restricted to vertices >= s
        dist = {s: 0}
        q = deque([s])
        while q:
            v = q.popleft()
            if dist[v] >= max_syllable:
                continue
            for w in undirected[v]:
                if w >= s and w not in dist:
                    dist[w] = dist[v] + 1
                    q.append(w)
        for f0 in ("a", "b"):
            stack = [(s, f0, ())]
            while stack:
                v, f, syl = stack.pop()
                budget[0] -= 1
                if budget[0] < 0:
                    raise RuntimeError("cycle enumeration exceeded its search limit; lower max_syllable")
                depth = len(syl)
                for w, d in moves[f][v]:
                    if w < s:
                        continue
                    nsyl = syl + (Syllable(f, d),)
                    if w == s and f != f0 and depth + 1 >= 2:
                        found.add(cyclic_canonical(Word._trusted(nsyl)))
                    dw = dist.get(w)
                    if dw is None or depth + 1 + max(dw, 1) > max_syllable:
                        continue
                    stack.append((w, other[f], nsyl))
    return sorted(found, key=sort_key)


# -- serialization --------------------------------------------------------

def to_json_dict(g: LabeledGraph, extra: Optional[dict] = None) -> dict:
    d = {
        "vertices": g.vertices,
        "edges": [{"id": eid, "src": e.src, "dst": e.dst, "label": format_word(e.label)}
                  for eid, e in sorted(g.edges.items())],
        "basepoint": g.basepoint,
    }
    if extra:
        d.update(extra)
    return d


class GraphFormatError(ValueError):
    pass


def from_json_dict(d) -> LabeledGraph:
    if not isinstance(d, dict):
        raise GraphFormatError("graph JSON must be an object")
    for key in ("vertices", "edges"):
        if key not in d:
            raise GraphFormatError(f"graph JSON is missing '{key}'")
    g = LabeledGraph()
    for i, v in enumerate(d["vertices"]):
        if not isinstance(v, int) or isinstance(v, bool):
            raise GraphFormatError(f"vertices[{i}]: expected an integer id, got {v!r}")
        g.add_vertex(v)
    for i, e in enumerate(d["edges"]):
        try:
            src, dst, label = e["src"], e["dst"], e["label"]
        except (KeyError, TypeError):
            raise GraphFormatError(f"edges[{i}]: expected an object with src, dst, label")
        if src not in g._vertices or dst not in g._vertices:
            raise GraphFormatError(f"edges[{i}]: endpoint not in vertices")
        try:
            w = parse_word(str(label))
        except ValueError as exc:
            raise GraphFormatError(f"edges[{i}].label: {exc}")
        eid = e.get("id")
        g.add_edge(src, dst, w, eid=eid)
    bp = d.get("basepoint")
    if bp is not None:
        if bp not in g._vertices:
            raise GraphFormatError("basepoint is not a vertex")
        g.basepoint = bp
    return g


def to_json(g: LabeledGraph, extra: Optional[dict] = None) -> str:
    return json.dumps(to_json_dict(g, extra), indent=1, sort_keys=True) + "\n"


def from_json(text: str) -> LabeledGraph:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")
    return from_json_dict(d)


def to_dot(g: LabeledGraph, name: str = "G") -> str:
    lines = [f"digraph {name} {{"]
    for v in g.vertices:
        shape = ' shape="doublecircle"' if v == g.basepoint else ""
        lines.append(f'  v{v} [label="{v}"{shape}];')
    for eid, e in sorted(g.edges.items()):
        f = e.label.syllables[0].factor if e.label.syllables else "a"
        color = "blue" if f == "a" else "red"
        lines.append(f'  v{e.src} -> v{e.dst} [id="{eid}" label="{format_word(e.label)}" color="{color}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


_DOT_NODE = re.compile(r'^\s*v(-?\d+)\s*\[label="[^"]*"(\s*shape="doublecircle")?\];\s*$')
_DOT_EDGE = re.compile(r'^\s*v(-?\d+)\s*->\s*v(-?\d+)\s*\[id="(\d+)"\s+label="([^"]*)"[^\]]*\];\s*$')


def from_dot(text: str) -> LabeledGraph:
    """Parse the DOT dialect written by to_dot."""
    g = LabeledGraph()
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("digraph") or s == "}":
            continue
        m = _DOT_EDGE.match(s)
        if m:
            g.add_edge(int(m.group(1)), int(m.group(2)), parse_word(m.group(4)), eid=int(m.group(3)))
            continue
        m = _DOT_NODE.match(s)
        if m:
            v = int(m.group(1))
            g.add_vertex(v)
            if m.group(2):
                g.basepoint = v
            continue
        raise GraphFormatError(f"line {lineno}: unrecognized DOT statement {s!r}")
    return g
