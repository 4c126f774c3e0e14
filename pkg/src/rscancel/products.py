"""The sets A = {c_i a^l}, B = {1, a, b, ab} and non-unique-product witnesses."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .graph import GraphPath, LabeledGraph, path_label, read_path
from .rsgraph import RSGraph
from .words import IDENTITY, Word, format_word, sort_key

A_ = Word.gen("a")
B_ = Word.gen("b")
B_SET = (IDENTITY, A_, B_, A_ * B_)
B_NAMES = {IDENTITY: "1", A_: "a", B_: "b", A_ * B_: "ab"}


def _split_a_tail(w: Word) -> Tuple[Word, int]:
    if w.syllables and w.syllables[-1].factor == "a":
        return Word._trusted(w.syllables[:-1]), w.syllables[-1].exponent
    return w, 0


@dataclass
class ProductSet:
    """A given either by lines (c_i, C_i) or as an explicit list; B fixed
    unless given explicitly."""

    c: Tuple[Word, ...] = ()
    C: Tuple[int, ...] = ()
    explicit_A: Optional[Tuple[Word, ...]] = None
    B: Tuple[Word, ...] = B_SET

    def __post_init__(self):
        self._stems: Dict[Word, List[Tuple[int, int]]] = defaultdict(list)
        for i, ci in enumerate(self.c):
            stem, tail = _split_a_tail(ci)
            self._stems[stem].append((i, tail))
        self._explicit = set(self.explicit_A) if self.explicit_A is not None else None

    @property
    def size_A(self) -> int:
        return len(self.explicit_A) if self.explicit_A is not None else sum(self.C)

    def A(self, limit: int = 1_000_000) -> List[Word]:
        if self.explicit_A is not None:
            return list(self.explicit_A)
        if self.size_A > limit:
            raise ValueError(f"|A| = {self.size_A} is too large to list")
        return [ci * Word.gen("a", l) if l else ci for ci, Ci in zip(self.c, self.C) for l in range(Ci)]

    def locate(self, x: Word) -> Optional[Tuple[int, int]]:
        """(i, l) with x = c_i a^l and 0 <= l < C_i, or None."""
        if self.explicit_A is not None:
            return (0, 0) if x in self._explicit else None
        stem, tail = _split_a_tail(x)
        for i, t in self._stems.get(stem, ()):
            l = tail - t
            if 0 <= l < self.C[i]:
                return i, l
        return None

    def contains(self, x: Word) -> bool:
        return self.locate(x) is not None

    def factorizations(self, z: Word) -> List[Tuple[Word, Word]]:
        """All (x, y) in A x B with xy = z in F."""
        out = []
        for y in self.B:
            x = z * y.inverse()
            if self.contains(x):
                out.append((x, y))
        return out

    def is_unique(self, z: Word) -> bool:
        return len(self.factorizations(z)) == 1


def derive_sets(gamma: RSGraph) -> ProductSet:
    return ProductSet(tuple(gamma.c), tuple(line.C for line in gamma.coefficients.lines))


def classify_products(s: ProductSet, limit: int = 200_000) -> Dict[Word, List[Tuple[Word, Word]]]:
    """Group every product xy by its value in F (brute force over A x B)."""
    groups: Dict[Word, List[Tuple[Word, Word]]] = defaultdict(list)
    for x in s.A(limit):
        for y in s.B:
            groups[x * y].append((x, y))
    return dict(sorted(groups.items(), key=lambda kv: sort_key(kv[0])))


def unique_products(groups) -> List[Word]:
    return [z for z, fs in groups.items() if len(fs) == 1]


@dataclass
class WitnessReport:
    z: Word
    factorizations: List[Tuple[Word, Word]]
    u: Word
    cycle: GraphPath
    unique_in_F: bool
    kind: str = ""
    line: int = -1

    def to_json(self):
        return {
            "z": format_word(self.z),
            "factorizations": [[format_word(x), format_word(y)] for x, y in self.factorizations],
            "u": format_word(self.u),
            "cycle": self.cycle.to_json(),
            "unique_in_F": self.unique_in_F,
            "kind": self.kind,
            "line": self.line,
        }


def products_at(gamma: RSGraph, v: int) -> List[Tuple[Word, Word]]:
    """All (x, y) in A x B whose reading from the basepoint ends at v."""
    j, Q = gamma.aline_of[v]
    Cj = gamma.coefficients[j].C
    out = []
    cj = gamma.c[j]
    if Q < Cj:
        out.append((cj * Word.gen("a", Q) if Q else cj, IDENTITY))
    if Q >= 1:
        out.append((cj * Word.gen("a", Q - 1) if Q > 1 else cj, A_))
    for eid, (l, P), (jj, QQ) in gamma.b_edges:
        if gamma.graph.edges[eid].dst != v:
            continue
        Cl = gamma.coefficients[l].C
        cl = gamma.c[l]
        if P < Cl:
            out.append((cl * Word.gen("a", P) if P else cl, B_))
        if P >= 1:
            out.append((cl * Word.gen("a", P - 1) if P > 1 else cl, A_ * B_))
    return out


def _y_rank(y: Word) -> int:
    return B_SET.index(y)


def _witness(g: LabeledGraph, base: int, x: Word, y: Word, partners, s: ProductSet,
             kind: str, line: int) -> WitnessReport:
    cands = [(x2, y2) for x2, y2 in partners if x2 != x and y2 != y]
    if not cands:
        raise ValueError(f"product {format_word(x)}·{format_word(y)} has no second factorization at its vertex")
    cands.sort(key=lambda p: (_y_rank(p[1]) if p[1] in B_SET else 9, sort_key(p[0])))
    x2, y2 = cands[0]
    p1 = read_path(g, base, x * y)
    p2 = read_path(g, base, x2 * y2)
    if p1 is None or p2 is None or p1.end(g) != p2.end(g):
        raise ValueError(f"witness paths for {format_word(x * y)} do not meet")
    cycle = p1.then(p2.inverse(g))
    u = x * y * (x2 * y2).inverse()
    if path_label(g, cycle) != u:
        raise AssertionError("witness cycle label mismatch")
    z = x * y
    return WitnessReport(z, [(x, y), (x2, y2)], u, cycle, s.is_unique(z), kind, line)


def extract_witnesses(gamma: RSGraph) -> List[WitnessReport]:
    """One witness per designated product v_i0, w_i0, v_iC, w_iC of each line."""
    s = derive_sets(gamma)
    g = gamma.graph
    out_b = {}
    for eid, (i, P), (j, Q) in gamma.b_edges:
        out_b[(i, P)] = g.edges[eid].dst
    reports = []
    for i in range(gamma.K):
        Ci = gamma.coefficients[i].C
        ci = gamma.c[i]
        last = ci * Word.gen("a", Ci - 1) if Ci > 1 else ci
        designated = [
            ("v0", ci, IDENTITY, gamma.vertex(i, 0)),
            ("w0", ci, B_, out_b.get((i, 0))),
            ("vC", last, A_, gamma.vertex(i, Ci)),
            ("wC", last, A_ * B_, out_b.get((i, Ci))),
        ]
        for kind, x, y, v in designated:
            if v is None:
                raise ValueError(f"line {i}: no b-edge leaves the {'start' if kind == 'w0' else 'end'}")
            reports.append(_witness(g, gamma.basepoint, x, y, products_at(gamma, v), s, kind, i))
    return reports


def extract_witnesses_explicit(g: LabeledGraph, A: Sequence[Word], B: Sequence[Word]) -> List[WitnessReport]:
    """Witnesses for every F-unique product of explicit finite sets."""
    base = g.basepoint
    at = defaultdict(list)
    for x in A:
        for y in B:
            p = read_path(g, base, x * y)
            if p is not None:
                at[p.end(g)].append((x, y))
    groups = defaultdict(list)
    for x in A:
        for y in B:
            groups[x * y].append((x, y))
    reports = []
    for z, fs in sorted(groups.items(), key=lambda kv: sort_key(kv[0])):
        if len(fs) != 1:
            continue
        x, y = fs[0]
        p = read_path(g, base, z)
        if p is None:
            raise ValueError(f"unique product {format_word(z)} is not read from the basepoint")
        cands = [(x2, y2) for x2, y2 in at[p.end(g)] if x2 != x and y2 != y]
        if not cands:
            raise ValueError(f"unique product {format_word(z)} has no second factorization in the graph")
        cands.sort(key=lambda q: (list(B).index(q[1]), sort_key(q[0])))
        x2, y2 = cands[0]
        cycle = p.then(read_path(g, base, x2 * y2).inverse(g))
        u = z * (x2 * y2).inverse()
        assert path_label(g, cycle) == u
        reports.append(WitnessReport(z, [(x, y), (x2, y2)], u, cycle, True))
    return reports


def instructive_preset():
    """Three vertices: 0 -a-> 1, 1 -b-> 2, 2 -b-> 1; A = {a, ab}, B = {1, b}."""
    g = LabeledGraph(range(3), basepoint=0)
    g.add_edge(0, 1, "a", eid=0)
    g.add_edge(1, 2, "b", eid=1)
    g.add_edge(2, 1, "b", eid=2)
    return g, [A_, A_ * B_], [IDENTITY, B_]
