"""Rips-Segev graphs: labeling an underlying graph and reducing it to Γ."""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .coefficients import CoefficientLine, CoefficientTable, check_rs_condition
from .graph import (GraphPath, LabeledGraph, ab_subdivide, compress, delete_degree_one,
                    disjoint_union, enumerate_cycle_words, factor_structure, from_json_dict,
                    path_label, reduce, to_json_dict)
from .underlying import UnderlyingGraph
from .words import Word, cyclic_canonical, cyclically_reduced, format_word, sort_key


class RSConstructionError(ValueError):
    pass


def _aword(n: int) -> Word:
    return Word.gen("a", n) if n else Word()


def label_underlying(phi: UnderlyingGraph, table: CoefficientTable) -> LabeledGraph:
    """Word-labeled copy of Φ; edge 4i+j runs i -> perms[j][i].

    Labels, with k the target:  b a^-I1(k),  a^C(i) b a^-I2(k),
    a^O1(i) b a^-C(k),  a^O2(i) b.
    """
    if len(table) != phi.n:
        raise RSConstructionError(f"coefficient table has {len(table)} lines but Φ has {phi.n} vertices")
    for i, line in enumerate(table.lines):
        if not line.is_standard:
            raise RSConstructionError(f"line {i} does not have two I and two O positions")
    g = LabeledGraph(range(phi.n), basepoint=0)
    b = Word.gen("b")
    for i, j, k in phi.edges():
        li, lk = table[i], table[k]
        if j == 0:
            w = b * _aword(lk.I1).inverse()
        elif j == 1:
            w = _aword(li.C) * b * _aword(lk.I2).inverse()
        elif j == 2:
            w = _aword(li.O1) * b * _aword(lk.C).inverse()
        else:
            w = _aword(li.O2) * b
        g.add_edge(i, k, w, eid=4 * i + j)
    return g


@dataclass
class RSGraph:
    graph: LabeledGraph
    coefficients: CoefficientTable
    line_vertices: List[Dict[int, int]]          # per line: position -> vertex
    aline_of: Dict[int, Tuple[int, int]]          # vertex -> (line, position)
    b_edges: List[Tuple[int, Tuple[int, int], Tuple[int, int]]]   # (eid, (i, P), (j, Q))
    basepoint: int
    tree: frozenset
    tree_paths: Dict[int, GraphPath]
    c: List[Word]
    phi: Optional[UnderlyingGraph] = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def K(self) -> int:
        return len(self.coefficients)

    def line_start(self, i: int) -> int:
        return self.line_vertices[i][0]

    def vertex(self, i: int, p: int) -> int:
        return self.line_vertices[i][p]

    def to_json(self) -> str:
        extra = {"rips_segev": {
            "coefficients": json.loads(self.coefficients.to_json()),
            "line_starts": [self.line_start(i) for i in range(self.K)],
            "c": [format_word(w) for w in self.c],
        }}
        return json.dumps(to_json_dict(self.graph, extra), sort_keys=True, indent=1) + "\n"


def shortest_path_tree(g: LabeledGraph, root: int):
    """Dijkstra by letter count; ties go to the lexicographically least
    sequence of (edge id, direction) steps. Returns (tree edges, paths)."""
    adj: Dict[int, List[Tuple[int, int, int, int]]] = {v: [] for v in g.vertices}
    for eid, e in sorted(g.edges.items()):
        n = e.label.word_length
        adj[e.src].append((e.dst, eid, 1, n))
        adj[e.dst].append((e.src, eid, -1, n))
    best = {root: (0, ())}
    heap = [(0, (), root)]
    done = set()
    while heap:
        d, seq, v = heapq.heappop(heap)
        if v in done or best.get(v) != (d, seq):
            continue
        done.add(v)
        for w, eid, o, n in adj[v]:
            if w in done:
                continue
            cand = (d + n, seq + ((eid, o),))
            if w not in best or cand < best[w]:
                best[w] = cand
                heapq.heappush(heap, (cand[0], cand[1], w))
    paths = {v: GraphPath(root, seq) for v, (_, seq) in best.items()}
    tree = frozenset(seq[-1][0] for _, seq in best.values() if seq)
    return tree, paths


def _finish(g: LabeledGraph, starts: Sequence[int], table: Optional[CoefficientTable] = None,
            phi: Optional[UnderlyingGraph] = None) -> RSGraph:
    """Recover a-line metadata from a reduced graph and check the invariants."""
    fs = factor_structure(g)
    where = fs.where["a"]
    comps = fs.components["a"]
    line_of_comp = {}
    for i, s in enumerate(starts):
        if s not in where:
            raise RSConstructionError(f"line {i} start vertex {s} has no a-edge")
        ci, pos = where[s]
        if pos != 0 or comps[ci].cycle:
            raise RSConstructionError(f"line {i} does not start at vertex {s}")
        if ci in line_of_comp:
            raise RSConstructionError(f"lines {line_of_comp[ci]} and {i} were folded together")
        line_of_comp[ci] = i
    if len(line_of_comp) != len(comps):
        raise RSConstructionError(f"{len(comps)} a-components for {len(starts)} lines")
    line_vertices = [dict() for _ in starts]
    aline_of = {}
    for ci, comp in enumerate(comps):
        i = line_of_comp[ci]
        for v, p in zip(comp.vertices, comp.positions):
            line_vertices[i][p] = v
            aline_of[v] = (i, p)
    for v in g.vertices:
        if v not in aline_of:
            raise RSConstructionError(f"vertex {v} lies on no a-line")
    lengths = [comps[where[s][0]].length for s in starts]
    b_edges = []
    I = [[] for _ in starts]
    O = [[] for _ in starts]
    for eid, e in sorted(g.edges.items()):
        s = e.label.syllables[0]
        if s.factor != "b":
            continue
        if s.exponent != 1:
            raise RSConstructionError(f"b-edge {eid} carries b^{s.exponent}")
        (i, P), (j, Q) = aline_of[e.src], aline_of[e.dst]
        if i == j:
            raise RSConstructionError(f"b-edge {eid} joins line {i} to itself")
        b_edges.append((eid, (i, P), (j, Q)))
        if P in (0, lengths[i]):
            I[j].append(Q)
        else:
            O[i].append(P)
            if Q not in (0, lengths[j]):
                raise RSConstructionError(f"b-edge {eid} joins interior positions {P} and {Q}")
    if table is None:
        table = CoefficientTable(tuple(
            CoefficientLine(tuple(sorted(I[i])), tuple(sorted(O[i])), lengths[i]) for i in range(len(starts))))
    else:
        if len(table) != len(starts):
            raise RSConstructionError("coefficient table does not match the number of lines")
        for i, line in enumerate(table.lines):
            if line.C != lengths[i]:
                raise RSConstructionError(f"line {i} has length {lengths[i]}, expected C = {line.C}")
            if sorted(I[i]) != sorted(line.I) or sorted(O[i]) != sorted(line.O):
                raise RSConstructionError(
                    f"line {i}: b-edges attach at I={sorted(I[i])} O={sorted(O[i])}, "
                    f"expected I={sorted(line.I)} O={sorted(line.O)}")
    for i in range(len(starts)):
        allowed = {0, lengths[i], *table[i].I, *table[i].O}
        extra = set(line_vertices[i]) - allowed
        if extra:
            raise RSConstructionError(f"line {i} has unexpected break points {sorted(extra)}")
    base = starts[0] if starts else g.basepoint
    g.basepoint = base
    tree, paths = shortest_path_tree(g, base)
    if len(paths) != g.num_vertices():
        raise RSConstructionError("Γ is not connected")
    c = [path_label(g, paths[s]) for s in starts]
    return RSGraph(g, table, line_vertices, aline_of, b_edges, base, tree, paths, c, phi)


def build_gamma(labeled: LabeledGraph, table: Optional[CoefficientTable] = None,
                phi: Optional[UnderlyingGraph] = None) -> RSGraph:
    """{a,b}-reduction of a labeled underlying graph, with a-line metadata."""
    n = labeled.num_vertices()
    for eid, e in labeled.edges.items():
        if e.src == e.dst:
            raise RSConstructionError(f"Φ has a loop at vertex {e.src} (edge {eid}); "
                                      "b-edges must join distinct a-lines")
    h = ab_subdivide(labeled)
    h, qmap = reduce(h, return_map=True)
    starts = [qmap[v] for v in range(n)]
    h = delete_degree_one(h, protected=starts)
    h = compress(h, keep=starts)
    return _finish(h, starts, table, phi)


def build_theta_prime(lengths: Sequence[int], b_edges: Sequence[Tuple[int, int, int, int]]) -> RSGraph:
    """Γ from an explicit pairing: a-lines of the given lengths and b-edges
    (i, P, j, Q) from position P on line i to position Q on line j."""
    marks = [{0, C} for C in lengths]
    for i, P, j, Q in b_edges:
        for line, p in ((i, P), (j, Q)):
            if not 0 <= p <= lengths[line]:
                raise RSConstructionError(f"position {p} outside line {line}")
            marks[line].add(p)
    g = LabeledGraph()
    vid = {}
    for i, ms in enumerate(marks):
        for p in sorted(ms):
            vid[(i, p)] = g.add_vertex(len(vid))
    eid = 0
    for i, ms in enumerate(marks):
        ms = sorted(ms)
        for p, q in zip(ms, ms[1:]):
            g.add_edge(vid[(i, p)], vid[(i, q)], Word.gen("a", q - p), eid=eid)
            eid += 1
    for i, P, j, Q in b_edges:
        g.add_edge(vid[(i, P)], vid[(j, Q)], Word.gen("b"), eid=eid)
        eid += 1
    starts = [vid[(i, 0)] for i in range(len(lengths))]
    g.basepoint = starts[0] if starts else None
    if not g.is_reduced():
        raise RSConstructionError("pairing puts two b-edges at the same end of a vertex")
    return _finish(g, starts)


def rsgraph_from_json(text: str) -> RSGraph:
    d = json.loads(text)
    g = from_json_dict(d)
    meta = d.get("rips_segev")
    if meta is None:
        raise RSConstructionError("graph JSON has no rips_segev block")
    table = CoefficientTable.from_data(meta["coefficients"])
    return _finish(g, [int(s) for s in meta["line_starts"]], table)


def underlying_graph_of(gamma: RSGraph) -> LabeledGraph:
    """One vertex per a-line, one edge per b-edge labeled a^P b a^-Q."""
    q = LabeledGraph(range(gamma.K))
    for eid, (i, P), (j, Q) in gamma.b_edges:
        q.add_edge(i, j, _aword(P) * Word.gen("b") * _aword(Q).inverse(), eid=eid)
    return q


def underlying_signature(g: LabeledGraph):
    return sorted((e.src, e.dst, sort_key(e.label)) for e in g.edges.values())


@dataclass
class RSFamily:
    gamma: RSGraph
    members: List[RSGraph]
    check: object
    girth_bound: Optional[int]          # min girth of the members' Φ

    @property
    def gamma_lower_bound(self) -> Optional[int]:
        return None if self.girth_bound is None else self.girth_bound + 2


def combine_family(members: Sequence[RSGraph]) -> RSFamily:
    """Disjoint union with a-lines renumbered consecutively."""
    if not members:
        raise ValueError("empty family")
    table = members[0].coefficients
    for m in members[1:]:
        table = table.merged(m.coefficients)
    check = check_rs_condition(table)
    if not check.passed:
        raise RSConstructionError(f"merged coefficients fail the Rips-Segev condition: {check.message()}")
    if len(members) == 1:
        return RSFamily(members[0], list(members), check,
                        members[0].phi.girth if members[0].phi else None)
    g, offsets = disjoint_union([m.graph for m in members])
    starts = [m.line_start(i) + off[0] for m, off in zip(members, offsets) for i in range(m.K)]
    g.basepoint = starts[0]
    fam = _finish_disconnected(g, starts, table)
    girths = [m.phi.girth for m in members if m.phi is not None]
    bound = min(girths) if len(girths) == len(members) else None
    return RSFamily(fam, list(members), check, bound)


def _finish_disconnected(g, starts, table):
    # members stay separate components; the tree is a forest rooted at each
    # component's first line start
    try:
        return _finish(g, starts, table)
    except RSConstructionError as exc:
        if "not connected" not in str(exc):
            raise
    tree, paths = set(), {}
    for s in starts:
        if s in paths:
            continue
        t, p = shortest_path_tree(g, s)
        tree |= t
        paths.update(p)
    return _finish_partial(g, starts, table, frozenset(tree), paths)


def _finish_partial(g, starts, table, tree, paths):
    fs = factor_structure(g)
    where = fs.where["a"]
    line_vertices = [dict() for _ in starts]
    aline_of = {}
    for i, s in enumerate(starts):
        comp = fs.components["a"][where[s][0]]
        for v, p in zip(comp.vertices, comp.positions):
            line_vertices[i][p] = v
            aline_of[v] = (i, p)
    b_edges = []
    for eid, e in sorted(g.edges.items()):
        if e.label.syllables[0].factor == "b":
            b_edges.append((eid, aline_of[e.src], aline_of[e.dst]))
    c = [path_label(g, paths[s]) for s in starts]
    return RSGraph(g, table, line_vertices, aline_of, b_edges, starts[0], tree, paths, c, None)


@dataclass
class Presentation:
    relators: List[Word]
    chords: int

    def text(self) -> str:
        lines = ["gens: a b"]
        lines += [f"rel: {format_word(r)}" for r in self.relators]
        return "\n".join(lines) + "\n"


def emit_presentation(gamma, cycle_cap: int = 0) -> Presentation:
    """Relators from the fundamental cycles of a spanning tree.

    With cycle_cap > 0, labels of all reduced cycles of at most that many
    syllables are appended (one per rotation/inversion class, new ones only).
    """
    if isinstance(gamma, RSGraph):
        g, tree, paths = gamma.graph, gamma.tree, gamma.tree_paths
    else:
        g = gamma
        root = g.basepoint if g.basepoint is not None else min(g.vertices)
        tree, paths = shortest_path_tree(g, root)
        if len(paths) != g.num_vertices():
            raise ValueError("graph is not connected")
    rels = []
    for eid, e in sorted(g.edges.items()):
        if eid in tree:
            continue
        w = path_label(g, paths[e.src]) * e.label * path_label(g, paths[e.dst]).inverse()
        w = cyclically_reduced(w)
        if not w.is_identity():
            rels.append(w)
    chords = len(rels)
    if cycle_cap:
        have = {cyclic_canonical(r) for r in rels}
        for w in enumerate_cycle_words(g, cycle_cap):
            if cyclic_canonical(w) not in have:
                have.add(cyclic_canonical(w))
                rels.append(w)
    return Presentation(rels, chords)
