"""Dehn reduction over a symmetrized set of cycle labels."""

from __future__ import annotations

import bisect
import itertools
import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .graph import LabeledGraph, enumerate_cycle_words, path_label
from .pieces import check_gr, parse_fraction
from .words import (IDENTITY, Syllable, Word, cyclic_conjugates, cyclic_reduce, format_word,
                    sort_key)

SIXTH = Fraction(1, 6)


class UncertifiedError(RuntimeError):
    pass


@dataclass
class RelatorIndex:
    """Cycle labels (one per rotation/inversion class) plus their inverses,
    matched cyclically, which amounts to the symmetrized closure."""

    base: Tuple[Word, ...]
    max_syllable: int
    certified: bool = True
    lam: Fraction = SIXTH
    report: Optional[object] = None
    note: str = ""
    by_syllable: Dict[Syllable, List[Tuple[int, int]]] = field(default_factory=dict, repr=False)
    cyclic: List[Tuple[Syllable, ...]] = field(default_factory=list, repr=False)

    def __post_init__(self):
        self.cyclic = []
        seen = set()
        for r in self.base:
            for w in (r, r.inverse()):
                if w.syllable_length and w not in seen:
                    seen.add(w)
                    self.cyclic.append(w.syllables)
        self.by_syllable = defaultdict(list)
        for ri, syl in enumerate(self.cyclic):
            for k, s in enumerate(syl):
                self.by_syllable[s].append((ri, k))

    @property
    def relators(self) -> frozenset:
        out = set()
        for r in self.base:
            out |= cyclic_conjugates(r)
        return frozenset(out)

    def __len__(self):
        return len(self.base)


def build_index(gamma, max_syllable: int, lam="1/6", unsafe: bool = False,
                demonstration: bool = False) -> RelatorIndex:
    """Index the cycle labels of Γ up to max_syllable syllables.

    Refuses unless Γ passes the piece criterion at some λ <= 1/6. With
    demonstration=True (or unsafe=True) an uncertified graph is accepted,
    reductions run at λ = 1/6 and every verdict is marked conditional.
    """
    g = gamma.graph if hasattr(gamma, "graph") else gamma
    lam = parse_fraction(lam)
    report = check_gr(g, lam)
    certified = lam <= SIXTH and report.passes.get(str(lam), False)
    note = ""
    if not certified:
        if not (unsafe or demonstration):
            raise UncertifiedError(
                f"graph not certified at λ = {lam} (criterion value {report.criterion_value}); "
                "use unsafe or demonstration mode")
        note = ("demonstration λ: criterion value " f"{report.criterion_value} is not below 1/6, "
                "so Dehn verdicts are conditional on λ <= 1/6")
        lam = SIXTH
    base = tuple(enumerate_cycle_words(g, max_syllable)) if max_syllable > 0 else ()
    return RelatorIndex(base, max_syllable, certified, lam, report, note)


def index_from_relators(relators: Sequence[Word], max_syllable: Optional[int] = None,
                        lam="1/6", certified: bool = True) -> RelatorIndex:
    rel = tuple(relators)
    cap = max_syllable if max_syllable is not None else max((r.syllable_length for r in rel), default=0)
    return RelatorIndex(rel, cap, certified, parse_fraction(lam))


def required_cap(w: Word, lam) -> int:
    lam = parse_fraction(lam)
    return math.ceil(Fraction(w.syllable_length) / (1 - 3 * lam))


@dataclass
class DehnStep:
    position: int            # letter offset of the match in the current cyclic word
    relator: Word            # the relator rotation r = p q
    replaced: Word           # p
    complement: Word         # q; p is replaced by q^-1
    conjugator: Word         # g with the step contributing g r g^-1

    def to_json(self):
        return {"position": self.position, "relator": format_word(self.relator),
                "replaced": format_word(self.replaced), "complement": format_word(self.complement),
                "conjugator": format_word(self.conjugator)}


@dataclass
class DehnTrace:
    input: Word
    steps: List[DehnStep]
    final: Word
    final_conjugator: Word
    verdict: str             # trivial | nontrivial | inconclusive
    conditional: bool = False
    reason: str = ""

    def remultiply(self) -> Word:
        w = IDENTITY
        for s in self.steps:
            w = w * s.conjugator * s.relator * s.conjugator.inverse()
        return w * self.final_conjugator * self.final * self.final_conjugator.inverse()

    def json_lines(self) -> List[dict]:
        out = [dict(step=i, **s.to_json()) for i, s in enumerate(self.steps)]
        out.append({"verdict": self.verdict, "final": format_word(self.final),
                    "input": format_word(self.input), "conditional": self.conditional,
                    "reason": self.reason})
        return out


def _letters_before(syl: Sequence[Syllable], i: int) -> int:
    return sum(abs(s.exponent) for s in syl[:i])


def _word(raw) -> Word:
    return Word([(f, e) for f, e in raw if e])


def _find_matches(W: Tuple[Syllable, ...], idx: RelatorIndex, thresh: Fraction):
    """Maximal common subwords anchored on a full syllable shared by w and r."""
    m = len(W)
    seen = set()
    for i in range(m):
        for ri, k in idx.by_syllable.get(W[i], ()):
            R = idx.cyclic[ri]
            L = len(R)
            # forward over full syllables
            f = 0
            while f + 1 < min(m, L) and W[(i + f + 1) % m] == R[(k + f + 1) % L]:
                f += 1
            bk = 0
            while f + bk + 1 < min(m, L) and W[(i - bk - 1) % m] == R[(k - bk - 1) % L]:
                bk += 1
            full = f + bk + 1
            # partial ends: same factor and sign, shorter overlap
            front = back = 0
            if full < min(m, L):
                ws, rs = W[(i + f + 1) % m], R[(k + f + 1) % L]
                if ws.factor == rs.factor and (ws.exponent > 0) == (rs.exponent > 0):
                    front = min(abs(ws.exponent), abs(rs.exponent))
                ws, rs = W[(i - bk - 1) % m], R[(k - bk - 1) % L]
                if ws.factor == rs.factor and (ws.exponent > 0) == (rs.exponent > 0):
                    back = min(abs(ws.exponent), abs(rs.exponent))
                if full == L - 1 and front and back:
                    # both partial ends sit in the same relator syllable
                    front = min(front, abs(R[(k + f + 1) % L].exponent) - back)
                if full == m - 1 and front and back:
                    front = min(front, abs(W[(i + f + 1) % m].exponent) - back)
            key = (ri, (i - bk) % m, (k - bk) % L, full, front, back)
            if key in seen:
                continue
            seen.add(key)
            plen = full + (front > 0) + (back > 0)
            if Fraction(plen) <= thresh * L:
                continue
            yield ri, (i - bk) % m, (k - bk) % L, full, front, back


def _rotate_letters(W: Tuple[Syllable, ...], start: int, back: int):
    """Split cyclic W so the rotation starts `back` letters before syllable
    `start`. Returns (Y, rotated) with W = Y (rotated) Y^-1 as words."""
    m = len(W)
    s0 = (start - 1) % m if back else start
    head = W[:s0]
    sy = W[s0]
    if back:
        sign = 1 if sy.exponent > 0 else -1
        cut = abs(sy.exponent) - back
        y = list(head) + ([(sy.factor, sign * cut)] if cut else [])
        rest = [(sy.factor, sign * back)] + list(W[s0 + 1:]) + list(head) + ([(sy.factor, sign * cut)] if cut else [])
    else:
        y = list(head)
        rest = list(W[s0:]) + list(head)
    return Word(y), rest


def _relator_piece(R, k0, full, front, back):
    """p and q for the relator rotation starting at the match."""
    L = len(R)
    raw = []
    if back:
        s = R[(k0 - 1) % L]
        sign = 1 if s.exponent > 0 else -1
        raw.append((s.factor, sign * back))
    for t in range(full):
        s = R[(k0 + t) % L]
        raw.append((s.factor, s.exponent))
    if front:
        s = R[(k0 + full) % L]
        sign = 1 if s.exponent > 0 else -1
        raw.append((s.factor, sign * front))
    p = _word(raw)
    # relator rotation beginning where p begins
    if back:
        s = R[(k0 - 1) % L]
        sign = 1 if s.exponent > 0 else -1
        head = [(s.factor, sign * back)]
        tail = [(s.factor, s.exponent - sign * back)]
        rot = head + [(x.factor, x.exponent) for x in (R[(k0 + t) % L] for t in range(L - 1))] + tail
    else:
        rot = [(x.factor, x.exponent) for x in (R[(k0 + t) % L] for t in range(L))]
    r = _word(rot)
    q = p.inverse() * r
    return p, q, r


def dehn_reduce(w: Word, idx: RelatorIndex, lam=None, max_steps: int = 100000) -> Tuple[Word, DehnTrace]:
    lam = idx.lam if lam is None else parse_fraction(lam)
    thresh = 1 - 3 * lam
    h, c = cyclic_reduce(w)
    steps: List[DehnStep] = []
    while not c.is_identity() and len(steps) < max_steps:
        W = c.syllables
        best = None
        for ri, s0, k0, full, front, back in _find_matches(W, idx, thresh):
            R = idx.cyclic[ri]
            p, q, r = _relator_piece(R, k0, full, front, back)
            Y, rest = _rotate_letters(W, s0, back)
            rotated = _word(rest)
            new = q.inverse() * (p.inverse() * rotated)
            Z, c2 = cyclic_reduce(new)
            if c2.syllable_length >= c.syllable_length:
                continue
            pos = _letters_before(W, s0) - back
            if pos < 0:
                pos += sum(abs(s.exponent) for s in W)
            key = (-(p.syllable_length - q.syllable_length), pos, sort_key(r))
            if best is None or key < best[0]:
                best = (key, pos, r, p, q, Y, Z, c2)
        if best is None:
            break
        _, pos, r, p, q, Y, Z, c2 = best
        g = h * Y
        steps.append(DehnStep(pos, r, p, q, g))
        h = g * Z
        c = c2
    trace = DehnTrace(w, steps, c, h, "", conditional=not idx.certified)
    if c.is_identity():
        trace.verdict = "trivial"
    else:
        need = required_cap(c, lam)
        if idx.max_syllable >= need:
            trace.verdict = "nontrivial"
        else:
            trace.verdict = "inconclusive"
            trace.reason = f"relator cap {idx.max_syllable} below required {need}"
    return c, trace


@dataclass
class CheckResult:
    label: str
    verdict: str
    detail: str = ""

    def to_json(self):
        return {"label": self.label, "verdict": self.verdict, "detail": self.detail}


@dataclass
class EmbeddingReport:
    passed: bool
    pairs: int
    failures: List[CheckResult]
    inconclusive: List[CheckResult]
    sampled: bool
    conditional: bool

    def to_json(self):
        return {"passed": self.passed, "pairs": self.pairs, "sampled": self.sampled,
                "conditional": self.conditional,
                "failures": [f.to_json() for f in self.failures],
                "inconclusive": [f.to_json() for f in self.inconclusive]}


def _pair_check(words: Sequence[Word], idx, name: str, out_fail, out_inc, pairs):
    for i, j in pairs:
        x1, x2 = words[i], words[j]
        d = x1 * x2.inverse()
        _, tr = dehn_reduce(d, idx)
        lab = f"{name}: {format_word(x1)} vs {format_word(x2)}"
        if tr.verdict == "trivial":
            out_fail.append(CheckResult(lab, "trivial", "the two elements coincide in G"))
        elif tr.verdict == "inconclusive":
            out_inc.append(CheckResult(lab, "inconclusive", tr.reason))


def verify_embedding(s, idx: RelatorIndex, max_pairs: int = 20000, seed: int = 0,
                     include_A: bool = True) -> EmbeddingReport:
    """x1 x2^-1 must not reduce to 1 for distinct x1, x2 within A and within B."""
    fails, inc = [], []
    Bw = list(s.B)
    bp = [(i, j) for i in range(len(Bw)) for j in range(i + 1, len(Bw))]
    _pair_check(Bw, idx, "B", fails, inc, bp)
    total = len(bp)
    sampled = False
    if include_A:
        n = s.size_A
        all_pairs = n * (n - 1) // 2
        if all_pairs <= max_pairs:
            Aw = s.A()
            ap = [(i, j) for i in range(n) for j in range(i + 1, n)]
        else:
            sampled = True
            rng = random.Random(seed)
            Aw = _sample_A(s, rng, 2 * max_pairs)
            ap = [(2 * t, 2 * t + 1) for t in range(len(Aw) // 2) if Aw[2 * t] != Aw[2 * t + 1]]
        _pair_check(Aw, idx, "A", fails, inc, ap)
        total += len(ap)
    return EmbeddingReport(not fails and not inc, total, fails, inc, sampled, not idx.certified)


def _sample_A(s, rng, k):
    cum = list(itertools.accumulate(s.C))
    out = []
    for _ in range(k):
        r = rng.randrange(cum[-1])
        i = bisect.bisect_right(cum, r)
        l = r - (cum[i - 1] if i else 0)
        out.append(s.c[i] * Word.gen("a", l) if l else s.c[i])
    return out


@dataclass
class NupReport:
    structural_passed: bool
    dehn_passed: Optional[bool]
    witnesses: List[dict]
    conditional: bool

    @property
    def passed(self) -> bool:
        return self.structural_passed and bool(self.dehn_passed)

    def to_json(self):
        return {"structural_passed": self.structural_passed, "dehn_passed": self.dehn_passed,
                "conditional": self.conditional, "witnesses": self.witnesses}


def verify_nup(witnesses, g: LabeledGraph, idx: Optional[RelatorIndex] = None,
               cross_check_u: bool = False) -> NupReport:
    """Structural half: u is the label of a closed path. Dehn half: x != x'
    in G, checked through y' y^-1, which equals x^-1 x' once u = 1."""
    rows = []
    s_ok = True
    d_ok = None if idx is None else True
    for k, wr in enumerate(witnesses):
        row = {"index": k, "z": format_word(wr.z), "u": format_word(wr.u)}
        try:
            closed = wr.cycle.is_closed(g) and path_label(g, wr.cycle) == wr.u
        except ValueError:
            closed = False
        (x, y), (x2, y2) = wr.factorizations[:2]
        consistent = x * y * (x2 * y2).inverse() == wr.u
        row["closed_path"] = bool(closed and consistent)
        s_ok &= row["closed_path"]
        if idx is not None:
            _, tr = dehn_reduce(y2 * y.inverse(), idx)
            row["factors_distinct"] = tr.verdict
            if tr.verdict != "nontrivial":
                d_ok = False
            if cross_check_u:
                _, tu = dehn_reduce(wr.u, idx)
                row["u_dehn"] = tu.verdict
        rows.append(row)
    return NupReport(s_ok, d_ok, rows, idx is not None and not idx.certified)
