"""How rare pattern words a^P0 b^e a^P1 ... b^e a^Pk are, exactly and by simulation."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .words import Word

LETTERS = ("a", "A", "b", "B")     # kernel letter codes 0..3
MAX_EXACT_T = 60


def is_rs_pattern(w: Word) -> bool:
    """At least one b-syllable, and every b-syllable is b^e for one e = +-1."""
    signs = {s.exponent for s in w.syllables if s.factor == "b"}
    return len(signs) == 1 and abs(next(iter(signs))) == 1


def cyclically_reduced_count(n: int) -> int:
    """Cyclically reduced letter words of length n >= 1 in the free group of rank 2."""
    return 3 ** n + 2 + (-1) ** n


def _letter_word(letters: Sequence[int]) -> Word:
    return Word((LETTERS[x].lower(), 1 if x % 2 == 0 else -1) for x in letters)


def count_pattern_by_length(t: int) -> List[Tuple[int, int]]:
    """(pattern count, total) for each length 1..t, by dynamic programming
    over (first letter, last letter, b-sign state)."""
    if t > MAX_EXACT_T:
        raise ValueError(f"t = {t} too large for exact counting; use Monte Carlo")
    rows = []
    # state: (first, last, sign) with sign 0 none yet, 2 or 3 the b letter used
    cur = {}
    for x in range(4):
        key = (x, x, x if x >= 2 else 0)
        cur[key] = cur.get(key, 0) + 1
    for n in range(1, t + 1):
        if n > 1:
            nxt = {}
            for (f, last, sg), c in cur.items():
                for x in range(4):
                    if x == last ^ 1:
                        continue
                    if x >= 2:
                        if last >= 2 or (sg and sg != x):
                            continue
                        ns = x
                    else:
                        ns = sg
                    key = (f, x, ns)
                    nxt[key] = nxt.get(key, 0) + c
            cur = nxt
        pat = sum(c for (f, last, sg), c in cur.items() if sg and last != f ^ 1)
        rows.append((pat, cyclically_reduced_count(n)))
    return rows


def count_pattern_exact(t: int) -> Tuple[int, int]:
    """Pattern words and all cyclically reduced words, lengths 1..t."""
    rows = count_pattern_by_length(t)
    return sum(p for p, _ in rows), sum(n for _, n in rows)


def count_pattern_brute(t: int) -> Tuple[int, int]:
    """Same counts by listing every letter word (small t only)."""
    pat = tot = 0
    for n in range(1, t + 1):
        for letters in itertools.product(range(4), repeat=n):
            if any(letters[i + 1] == letters[i] ^ 1 for i in range(n - 1)):
                continue
            if n > 1 and letters[-1] == letters[0] ^ 1:
                continue
            tot += 1
            pat += is_rs_pattern(_letter_word(letters))
    return pat, tot


def pattern_count_bound(t: int) -> int:
    return 4 * t * 2 ** t


@dataclass
class Estimate:
    p: float
    lo: float
    hi: float
    hits: int
    trials: int
    seed: Optional[int]
    flagged: int = 0

    @property
    def sigma(self) -> float:
        return math.sqrt(max(self.p * (1 - self.p), 1e-300) / max(self.trials, 1))

    def to_json(self):
        return {"estimate": self.p, "ci_low": self.lo, "ci_high": self.hi, "hits": self.hits,
                "trials": self.trials, "seed": self.seed, "flagged": self.flagged}


def wilson(hits: int, n: int, z: float = 1.96) -> Tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = hits / n
    den = 1 + z * z / n
    mid = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return max(0.0, mid - half), min(1.0, mid + half)


def _estimate(hits, trials, seed, flagged=0) -> Estimate:
    lo, hi = wilson(hits, trials)
    return Estimate(hits / trials if trials else 0.0, lo, hi, hits, trials, seed, flagged)


@dataclass
class PatternQuery:
    t: int
    n: int
    trials: int
    seed: Optional[int] = None


def length_weights(t: int) -> np.ndarray:
    counts = np.array([cyclically_reduced_count(k) for k in range(1, t + 1)], np.float64)
    return np.cumsum(counts) / counts.sum()


def mc_presentation(q: PatternQuery, chunk: int = 20000) -> Estimate:
    """P(some relator is a pattern word) for n uniform cyclically reduced
    words of length <= t. Lengths are drawn with weight equal to their
    word count; letters by an exact successor chain."""
    if q.n == 0 or q.trials == 0:
        return _estimate(0, q.trials, q.seed)
    rng = np.random.Generator(np.random.PCG64(q.seed))
    cum = length_weights(q.t)
    E = _kernels.completion_counts(q.t)
    hits = 0
    done = 0
    while done < q.trials:
        m = min(chunk, q.trials - done)
        u = rng.random((m, q.n, q.t + 1))
        hits += int(_kernels.sample_pattern_trials(u, cum, E).sum())
        done += m
    return _estimate(hits, q.trials, q.seed)


def sample_cyclically_reduced(t: int, size: int, seed=None) -> List[Word]:
    """Uniform cyclically reduced words of length 1..t (pure Python, for tests)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    cum = length_weights(t)
    E = _kernels.completion_counts(t)
    out = []
    for _ in range(size):
        ell = int(np.searchsorted(cum, rng.random(), side="right")) + 1
        ell = min(ell, t)
        first = int(rng.integers(4))
        letters = [first]
        for k in range(1, ell):
            m = ell - k - 1
            w = []
            for x in range(4):
                if x == letters[-1] ^ 1:
                    w.append(0.0)
                else:
                    rel = 0 if x == first else (1 if x == first ^ 1 else 2)
                    w.append(E[m, rel])
            w = np.array(w) / sum(w)
            letters.append(int(rng.choice(4, p=w)))
        out.append(_letter_word(letters))
    return out


@dataclass
class SubdivisionModel:
    n: int                                   # vertices of Δ
    edges: Tuple[Tuple[int, int], ...]
    j: int
    threshold: int

    @classmethod
    def cycle(cls, length: int, j: int, threshold: int) -> "SubdivisionModel":
        return cls(length, tuple((i, (i + 1) % length) for i in range(length)), j, threshold)

    @classmethod
    def from_json(cls, text: str, j: int, threshold: int) -> "SubdivisionModel":
        d = json.loads(text)
        return cls(int(d["n"]), tuple((int(u), int(v)) for u, v in d["edges"]), j, threshold)

    def subdivided(self):
        """(vertex count, src, dst) of Δ^j."""
        src, dst = [], []
        nv = self.n
        for u, v in self.edges:
            prev = u
            for k in range(self.j - 1):
                src.append(prev)
                dst.append(nv)
                prev = nv
                nv += 1
            src.append(prev)
            dst.append(v)
        return nv, np.array(src, np.int64), np.array(dst, np.int64)


def _orient(src, dst, letters):
    """Letters 0..3 on edges -> generator labels 0/1 with inverses flipped."""
    lab = letters // 2
    inv = (letters % 2) == 1
    s = np.where(inv, dst, src)
    d = np.where(inv, src, dst)
    return s, d, lab


def graphical_trial(nv, src, dst, letters, threshold):
    """(occurs, collapsed) for one labeling of Δ^j."""
    if threshold <= 0:
        return True, False
    s, d, lab = _orient(src, dst, letters)
    rep, out, inn = _kernels.fold_generator_graph(nv, s, d, lab)
    if int((rep == np.arange(nv)).sum()) == 1:
        return False, True
    for bl in (2, 3):
        if _kernels.pattern_path_exists(rep, out, inn, threshold, bl):
            return True, False
    return False, False


def mc_graphical(m: SubdivisionModel, trials: int, seed=None) -> Estimate:
    """Label Δ^j uniformly by a, a^-1, b, b^-1, fold, and look for a reduced
    path of length >= threshold reading a pattern word."""
    if m.j < 1:
        raise ValueError("j must be >= 1")
    nv, src, dst = m.subdivided()
    rng = np.random.Generator(np.random.PCG64(seed))
    hits = collapsed = 0
    for _ in range(trials):
        letters = rng.integers(0, 4, size=src.shape[0])
        occ, col = graphical_trial(nv, src, dst, letters, m.threshold)
        hits += occ
        collapsed += col
    return _estimate(hits, trials, seed, collapsed)


def exhaustive_graphical(m: SubdivisionModel) -> float:
    """Exact occurrence probability by trying all 4^edges labelings."""
    nv, src, dst = m.subdivided()
    ne = src.shape[0]
    if ne > 10:
        raise ValueError("too many edges for exhaustive labeling")
    hits = 0
    for letters in itertools.product(range(4), repeat=ne):
        occ, _ = graphical_trial(nv, src, dst, np.array(letters, np.int64), m.threshold)
        hits += occ
    return hits / 4 ** ne
