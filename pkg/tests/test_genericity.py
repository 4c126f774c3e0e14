import itertools

import numpy as np
import pytest

from rscancel.genericity import (PatternQuery, SubdivisionModel, count_pattern_brute, count_pattern_exact,
                                 cyclically_reduced_count, exhaustive_graphical, graphical_trial,
                                 is_rs_pattern, mc_graphical, mc_presentation, pattern_count_bound,
                                 sample_cyclically_reduced, wilson)
from rscancel.graph import LabeledGraph, expand, reduce
from rscancel.words import Word, cyclic_reduce, parse_word, rotations

W = parse_word


def test_pattern_examples():
    assert is_rs_pattern(W("b a b"))
    assert not is_rs_pattern(W("b a b^-1"))
    assert not is_rs_pattern(W("b^2 a b"))
    assert not is_rs_pattern(W("a^3"))
    assert is_rs_pattern(W("a^-2 b^-1 a^5 b^-1"))


def test_pattern_symmetry_exhaustive():
    for n in range(1, 9):
        for letters in itertools.product("aAbB", repeat=n):
            w = W("".join(letters))
            if w.syllable_length == 0:
                continue
            assert is_rs_pattern(w) == is_rs_pattern(w.inverse())
            if w.syllable_length > 1 and w.syllables[0].factor != w.syllables[-1].factor:
                for r in rotations(w):
                    assert is_rs_pattern(r) == is_rs_pattern(w)


def test_counts_match_brute_force():
    for t in range(1, 9):
        assert count_pattern_exact(t) == count_pattern_brute(t)
    assert count_pattern_brute(2) == (10, 16)


def test_total_count_formula():
    for n in range(1, 8):
        assert cyclically_reduced_count(n) == count_pattern_brute(n)[1] - count_pattern_brute(n - 1)[1]


def test_pattern_bound_and_decay():
    ratios = {}
    for t in range(1, 41):
        p, n = count_pattern_exact(t)
        assert p <= pattern_count_bound(t)
        ratios[t] = p / n
    for t in range(2, 37):
        assert ratios[t + 4] < ratios[t]


def test_exact_refuses_huge_t():
    with pytest.raises(ValueError):
        count_pattern_exact(10 ** 4)


def test_sampler_is_uniform_on_small_t():
    words = sample_cyclically_reduced(2, 16000, seed=3)
    counts = {}
    for w in words:
        counts[w] = counts.get(w, 0) + 1
    assert len(counts) == 16
    assert max(counts.values()) < 1.25 * 1000 and min(counts.values()) > 0.75 * 1000
    assert all(cyclic_reduce(w)[1] == w for w in words)


def test_mc_presentation_against_exact():
    for t in (4, 7):
        p, n = count_pattern_exact(t)
        est = mc_presentation(PatternQuery(t, 1, 40000, seed=11))
        assert abs(est.p - p / n) < 3 * est.sigma + 1e-9
    assert mc_presentation(PatternQuery(5, 0, 100, seed=1)).p == 0.0


def test_mc_presentation_several_relators():
    p, n = count_pattern_exact(5)
    q = p / n
    est = mc_presentation(PatternQuery(5, 3, 40000, seed=2))
    assert abs(est.p - (1 - (1 - q) ** 3)) < 3 * est.sigma


def test_wilson():
    lo, hi = wilson(50, 100)
    assert lo < 0.5 < hi
    assert wilson(0, 0) == (0.0, 1.0)


def test_graphical_threshold_zero_and_decrease():
    m0 = SubdivisionModel.cycle(6, 3, 0)
    assert mc_graphical(m0, 50, seed=1).p == 1.0
    ests = [mc_graphical(SubdivisionModel.cycle(6, 3, th), 1500, seed=5).p for th in (4, 8, 12)]
    assert ests[0] >= ests[1] >= ests[2]
    assert ests[2] < 1.0


def test_graphical_exhaustive_agrees():
    m = SubdivisionModel.cycle(3, 2, 4)
    exact = exhaustive_graphical(m)
    est = mc_graphical(m, 20000, seed=9)
    assert abs(est.p - exact) < 3 * est.sigma + 1e-9


def _python_pattern_search(g, length):
    """Depth-first search for a reduced pattern path of exactly `length` letters."""
    out, inn = g.incidence()
    moves = []
    for v in g.vertices:
        for f in "ab":
            for e in out.get((v, f), []):
                moves.append((v, g.edges[e].dst, f, 1))
            for e in inn.get((v, f), []):
                moves.append((v, g.edges[e].src, f, -1))
    adj = {}
    for v, w, f, o in moves:
        adj.setdefault(v, []).append((w, f, o))

    def dfs(v, k, last, bsign, seen_b):
        if k == length:
            return seen_b
        for w, f, o in adj.get(v, []):
            if last is not None and last == (f, -o):
                continue
            if f == "b":
                if (last is not None and last[0] == "b") or (bsign and bsign != o):
                    continue
                if dfs(w, k + 1, (f, o), o, True):
                    return True
            elif dfs(w, k + 1, (f, o), bsign, seen_b):
                return True
        return False

    return any(dfs(v, 0, None, 0, False) for v in g.vertices)


def test_fold_then_search_matches_python_oracle():
    rng = np.random.default_rng(4)
    m = SubdivisionModel.cycle(3, 3, 5)
    nv, src, dst = m.subdivided()
    for _ in range(60):
        letters = rng.integers(0, 4, size=src.shape[0])
        occ, collapsed = graphical_trial(nv, src, dst, letters, m.threshold)
        g = LabeledGraph(range(nv))
        for s, d, x in zip(src, dst, letters):
            f = "ab"[x // 2]
            if x % 2:
                g.add_edge(int(d), int(s), Word.gen(f))
            else:
                g.add_edge(int(s), int(d), Word.gen(f))
        h = expand(reduce(g))
        if h.num_vertices() == 1:
            assert collapsed and not occ
        else:
            assert occ == _python_pattern_search(h, m.threshold)
