"""Pieces, the maximal piece length and the Gr'_*(lambda) certificate."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from . import _kernels
from .graph import (LabeledGraph, Point, factor_structure, gamma_syllable, read_word)
from .words import Word, format_word

UNBOUNDED = "unbounded"
OTHER = {"a": "b", "b": "a"}


@dataclass
class FiberProduct:
    graph: LabeledGraph
    pair_of: Dict[int, Tuple[int, int]]
    diagonal: frozenset

    def off_diagonal(self) -> LabeledGraph:
        keep = [v for v in self.graph.vertices if v not in self.diagonal]
        h = LabeledGraph(keep)
        for eid, e in self.graph.edges.items():
            if e.src not in self.diagonal and e.dst not in self.diagonal:
                h.add_edge(e.src, e.dst, e.label, eid=eid)
        return h


def fiber_product(g: LabeledGraph) -> FiberProduct:
    """Pullback of g with itself over the bouquet of a and b.

    Works on unit-labeled graphs (use graph.expand on small run graphs).
    Pair (u, v) gets id u_index * n + v_index.
    """
    if not g.is_unit_labeled():
        raise ValueError("fiber_product needs one letter per edge; expand the graph first")
    verts = g.vertices
    pos = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    h = LabeledGraph()
    pair_of = {}
    for u in verts:
        for v in verts:
            pid = pos[u] * n + pos[v]
            pair_of[pid] = (u, v)
            h.add_vertex(pid)
    by_label = defaultdict(list)
    for e in g.edges.values():
        by_label[e.label].append(e)
    for lab in sorted(by_label, key=lambda w: w.syllables[0].factor):
        es = by_label[lab]
        for e1 in es:
            for e2 in es:
                h.add_edge(pos[e1.src] * n + pos[e2.src], pos[e1.dst] * n + pos[e2.dst], lab)
    diag = frozenset(pos[v] * n + pos[v] for v in verts)
    return FiberProduct(h, pair_of, diag)


@dataclass
class PieceWitness:
    """A label readable from two distinct starting points."""

    label: Word
    starts: Tuple[object, object]

    def to_json(self):
        def loc(p):
            if isinstance(p, Point):
                return {"edge": p.eid, "offset": p.offset}
            return {"vertex": p}
        return {"label": format_word(self.label), "starts": [loc(self.starts[0]), loc(self.starts[1])]}

    def immersions(self, g: LabeledGraph):
        return [read_word(g, s, self.label) for s in self.starts]


def _crt_nonzero(r1, m1, r2, m2) -> Optional[int]:
    """Smallest positive d with d = r1 mod m1 and d = r2 mod m2 (moduli 0 mean exact)."""
    if m1 == 0 and m2 == 0:
        return r1 if r1 == r2 and r1 != 0 else None
    if m1 == 0:
        r1, m1, r2, m2 = r2, m2, r1, m1
    if m2 == 0:
        return r2 if r2 != 0 and (r2 - r1) % m1 == 0 else None
    g = gcd(m1, m2)
    if (r2 - r1) % g:
        return None
    lcm = m1 // g * m2
    # solve r1 + m1*k = r2 mod m2
    k = ((r2 - r1) // g * pow(m1 // g, -1, m2 // g)) % (m2 // g) if m2 // g > 1 else 0
    d = (r1 + m1 * k) % lcm
    return d if d else lcm


class _PairGraph:
    def __init__(self, g: LabeledGraph):
        self.g = g
        self.fs = fs = factor_structure(g)
        self.pair_id: Dict[Tuple[int, int], int] = {}
        self.pairs: List[Tuple[int, int]] = []
        self.arc_src: List[int] = []
        self.arc_dst: List[int] = []
        self.arc_f: List[int] = []
        self.arc_d: List[int] = []
        for fi, f in enumerate(("a", "b")):
            exact = defaultdict(list)      # displacement -> [(x, y)]
            modular = []                    # (x, y, residue, modulus)
            for ci, comp in enumerate(fs.components[f]):
                ft = fs.first_type_on(f, ci)
                for px, x in ft:
                    for py, y in ft:
                        if comp.cycle:
                            modular.append((x, y, (py - px) % comp.length, comp.length))
                        elif x != y:
                            exact[py - px].append((x, y))
            for d in sorted(exact):
                lst = exact[d]
                if len(lst) < 2:
                    continue
                for x1, y1 in lst:
                    for x2, y2 in lst:
                        if x1 != x2:
                            self._arc((x1, x2), (y1, y2), fi, d)
            if modular:
                for x1, y1, r1, m1 in modular:
                    for d in sorted(exact):
                        if d % m1 != r1:
                            continue
                        for x2, y2 in exact[d]:
                            if x1 != x2:
                                self._arc((x1, x2), (y1, y2), fi, d)
                                self._arc((x2, x1), (y2, y1), fi, d)
                    for x2, y2, r2, m2 in modular:
                        if x1 == x2:
                            continue
                        d = _crt_nonzero(r1, m1, r2, m2)
                        if d is not None:
                            self._arc((x1, x2), (y1, y2), fi, d)

    def _pid(self, p):
        i = self.pair_id.get(p)
        if i is None:
            i = self.pair_id[p] = len(self.pairs)
            self.pairs.append(p)
        return i

    def _arc(self, p, q, fi, d):
        self.arc_src.append(self._pid(p))
        self.arc_dst.append(self._pid(q))
        self.arc_f.append(fi)
        self.arc_d.append(d)

    def shared_direction(self, x, y, f) -> int:
        """+1 if both have an incoming f-run, -1 if both have an outgoing one, else 0."""
        fs = self.fs
        if fs.has_in(x, f) and fs.has_in(y, f):
            return 1
        if fs.has_out(x, f) and fs.has_out(y, f):
            return -1
        return 0


def _step_back(g, fs, v, f, sign):
    """Point one letter before v along f (sign +1) or after v (sign -1)."""
    out, inn = g.incidence()
    eid = (inn if sign > 0 else out)[(v, f)][0]
    e = g.edges[eid]
    n = e.label.syllables[0].exponent
    if n == 1:
        return e.src if sign > 0 else e.dst
    return Point(eid, n - 1) if sign > 0 else Point(eid, 1)


def max_piece_syllable(g: LabeledGraph, with_witness: bool = False):
    """Largest syllable length of a piece, or UNBOUNDED.

    A piece is a reduced word readable from two distinct points. Its
    interior syllable boundaries sit at pairs of distinct first-type
    vertices, and consecutive boundaries are joined by a full syllable of
    equal displacement in both copies. The longest alternating walk in
    that pair graph, plus a partial syllable at each end, gives the
    answer; a cycle in it means pieces of every length.
    """
    if not g.edges:
        return (0, None) if with_witness else 0
    g.require_runs()
    pg = _PairGraph(g)
    fs = pg.fs
    best, witness = 0, None

    # one syllable: some factor has at least two letters in total
    for f in ("a", "b"):
        runs = [(eid, e) for eid, e in sorted(g.edges.items()) if e.label.syllables[0].factor == f]
        letters = sum(e.label.syllables[0].exponent for _, e in runs)
        if letters >= 2 and best < 1:
            best = 1
            eid, e = runs[0]
            other = Point(eid, 1) if e.label.syllables[0].exponent >= 2 else runs[1][1].src
            witness = PieceWitness(Word.gen(f, 1), (e.src, other))

    # two syllables meeting at one pair of first-type vertices
    if best < 2:
        sig = defaultdict(list)
        for v in fs.first_type:
            key = tuple(int(h(v, f)) for f in ("a", "b") for h in (fs.has_in, fs.has_out))
            sig[key].append(v)
        keys = sorted(sig)
        done = False
        for k1 in keys:
            for k2 in keys:
                if done:
                    break
                x = sig[k1][0]
                cands = [y for y in sig[k2] if y != x]
                if not cands:
                    continue
                y = cands[0]
                for f in ("a", "b"):
                    s1 = pg.shared_direction(x, y, f)
                    s2 = pg.shared_direction(x, y, OTHER[f])
                    if s1 and s2:
                        start = (_step_back(g, fs, x, f, s1), _step_back(g, fs, y, f, s1))
                        label = Word([(f, s1), (OTHER[f], -s2)])
                        best, witness, done = 2, PieceWitness(label, start), True
                        break

    if pg.arc_src:
        npairs = len(pg.pairs)
        lead = np.zeros((npairs, 2), np.bool_)
        trail = np.zeros((npairs, 2), np.bool_)
        for i, (x, y) in enumerate(pg.pairs):
            for fi, f in enumerate(("a", "b")):
                s = pg.shared_direction(x, y, f)
                lead[i, fi] = s != 0
                trail[i, fi] = s != 0
        length, end, pred_state, pred_arc = _kernels.longest_alternating(
            npairs, np.asarray(pg.arc_src, np.int64), np.asarray(pg.arc_dst, np.int64),
            np.asarray(pg.arc_f, np.int64), lead, trail)
        if length < 0:
            return (UNBOUNDED, None) if with_witness else UNBOUNDED
        if length > best:
            best = int(length)
            if with_witness:
                witness = _rebuild(g, pg, int(end), pred_state, pred_arc, trail)
    return (best, witness) if with_witness else best


def _rebuild(g, pg, end, pred_state, pred_arc, trail):
    fs = pg.fs
    names = ("a", "b")
    syl = []
    p, f = divmod(end, 2)
    x, y = pg.pairs[p]
    g_f = names[1 - f]
    s = pg.shared_direction(x, y, g_f) if trail[p, 1 - f] else 0
    if s:
        syl.append((g_f, -s))
    state = end
    while True:
        ps = int(pred_state[state])
        p, f = divmod(state, 2)
        if ps == -2:
            x, y = pg.pairs[p]
            sgn = pg.shared_direction(x, y, names[f])
            syl.append((names[f], sgn))
            start = (_step_back(g, fs, x, names[f], sgn), _step_back(g, fs, y, names[f], sgn))
            break
        k = int(pred_arc[state])
        syl.append((names[pg.arc_f[k]], pg.arc_d[k]))
        if ps == -1:
            start = pg.pairs[pg.arc_src[k]]
            break
        state = ps
    return PieceWitness(Word(reversed(syl)), start)


@dataclass
class PieceReport:
    lambda_piece: Union[int, str]
    gamma: Optional[int]
    criterion_value: Optional[Fraction]
    raw_ratio: Optional[Fraction]
    passes: Dict[str, bool]
    witness: Optional[PieceWitness] = None
    note: str = ""
    extra: dict = field(default_factory=dict)

    def to_json(self):
        fr = lambda x: None if x is None else str(x)
        d = {
            "lambda_piece": self.lambda_piece,
            "gamma": self.gamma,
            "criterion_value": fr(self.criterion_value),
            "raw_ratio": fr(self.raw_ratio),
            "passes": dict(sorted(self.passes.items())),
            "witness": self.witness.to_json() if self.witness else None,
            "note": self.note,
        }
        d.update(self.extra)
        return d


def parse_fraction(text) -> Fraction:
    lam = Fraction(str(text))
    if not (0 < lam < 1):
        raise ValueError(f"lambda must lie strictly between 0 and 1, got {text}")
    return lam


def criterion_holds(lambda_piece: int, gamma: int, lam) -> bool:
    """(Lambda + 2) / gamma < lam, in exact rational arithmetic."""
    return Fraction(lambda_piece + 2, gamma) < parse_fraction(lam)


def check_gr(g: LabeledGraph, lam="1/6", gamma_cap: Optional[int] = None) -> PieceReport:
    """Certify Gr'_*(lam) through (Lambda + 2) / gamma < lam.

    A pass is a proof; a failure only says this sufficient test fails.
    """
    lam = parse_fraction(lam)
    levels = {"1/6": Fraction(1, 6), "1/8": Fraction(1, 8), str(lam): lam}
    lp, wit = max_piece_syllable(g, with_witness=True)
    gamma = gamma_syllable(g, gamma_cap)
    if gamma is None:
        note = "no cycles within the cap: the presentation has no relators (degenerate pass)"
        return PieceReport(lp, None, None, None, {k: True for k in levels}, wit, note)
    if lp == UNBOUNDED:
        return PieceReport(lp, gamma, None, None, {k: False for k in levels}, None,
                           "pieces of unbounded length: criterion fail")
    crit = Fraction(lp + 2, gamma)
    passes = {k: criterion_holds(lp, gamma, v) for k, v in levels.items()}
    note = "certified" if passes[str(lam)] else "criterion fail (not a disproof)"
    return PieceReport(lp, gamma, crit, Fraction(lp, gamma), passes, wit, note)
