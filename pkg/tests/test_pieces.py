from fractions import Fraction

from hypothesis import given, settings, strategies as st

from rscancel.graph import LabeledGraph, expand
from rscancel.pieces import UNBOUNDED, check_gr, fiber_product, max_piece_syllable
from rscancel.words import Word

from _helpers import single_cycle

LETTERS = [("a", 1), ("a", -1), ("b", 1), ("b", -1)]


def brute_piece(g, steps):
    """Max syllables of a label read from two distinct start vertices,
    over reduced walks of at most `steps` letters (unit-labeled graph)."""
    out, inn = {}, {}
    for e in g.edges.values():
        f = e.label.syllables[0].factor
        out[(e.src, f)] = e.dst
        inn[(e.dst, f)] = e.src
    best = 0
    layer = {}
    verts = g.vertices
    for u in verts:
        for v in verts:
            if u != v:
                layer[(u, v, None)] = 0
    for _ in range(steps):
        nxt = {}
        for (u, v, last), syl in layer.items():
            for k, (f, o) in enumerate(LETTERS):
                if last is not None and k == last ^ 1:
                    continue
                tab = out if o > 0 else inn
                if (u, f) in tab and (v, f) in tab:
                    s = syl + (last is None or LETTERS[last][0] != f)
                    key = (tab[(u, f)], tab[(v, f)], k)
                    if nxt.get(key, -1) < s:
                        nxt[key] = s
        if not nxt:
            break
        best = max(best, max(nxt.values()))
        layer = nxt
    return best


def test_single_cycle_values():
    g = single_cycle(5)
    assert max_piece_syllable(g) == 3
    assert brute_piece(expand(g), 60) == 3
    off = fiber_product(expand(g)).off_diagonal()
    assert off.num_edges() > 0


def test_check_gr_boundary():
    r21 = check_gr(single_cycle(21), "1/8")
    assert (r21.lambda_piece, r21.gamma, r21.criterion_value) == (3, 42, Fraction(5, 42))
    assert r21.passes["1/8"]
    r20 = check_gr(single_cycle(20), "1/8")
    assert r20.criterion_value == Fraction(1, 8) and not r20.passes["1/8"]


def test_repeated_cycle_is_unbounded():
    g = single_cycle(3)
    h = single_cycle(3)
    for eid, e in h.edges.items():
        g.add_edge(e.src + 100, e.dst + 100, e.label)
    assert max_piece_syllable(g) == UNBOUNDED


def test_instructive_piece():
    om = LabeledGraph(basepoint=0)
    om.add_edge(0, 1, "a")
    om.add_edge(1, 2, "b")
    om.add_edge(2, 1, "b")
    rep = check_gr(om, "1/6")
    assert rep.lambda_piece == 1 and rep.gamma == 1 and not rep.passes["1/6"]
    assert brute_piece(om, 10) == 1


def test_acyclic_degenerate_pass():
    t = LabeledGraph()
    t.add_edge(0, 1, "a")
    rep = check_gr(t, "1/6")
    assert rep.gamma is None and all(rep.passes.values())


@st.composite
def reduced_graphs(draw):
    n = draw(st.integers(2, 7))
    g = LabeledGraph(range(n))
    used = set()
    for _ in range(draw(st.integers(1, 10))):
        s, d = draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))
        f = draw(st.sampled_from("ab"))
        if (s, f, "out") in used or (d, f, "in") in used:
            continue
        used.update({(s, f, "out"), (d, f, "in")})
        g.add_edge(s, d, Word.gen(f, 1))
    return g


@settings(max_examples=80, deadline=None)
@given(reduced_graphs())
def test_piece_length_matches_brute_force(g):
    lp = max_piece_syllable(g)
    n = g.num_vertices()
    short, long = brute_piece(g, 4 * n * n), brute_piece(g, 8 * n * n)
    if lp == UNBOUNDED:
        assert long > short or long >= 2 * n * n
    else:
        assert short == long == lp


def test_witness_reads_twice():
    g = single_cycle(6)
    lp, wit = max_piece_syllable(g, with_witness=True)
    assert wit.label.syllable_length == lp
    a, b = wit.immersions(g)
    assert a is not None and b is not None
