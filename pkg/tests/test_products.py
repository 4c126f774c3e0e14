import pytest

from rscancel.graph import path_label
from rscancel.products import (B_SET, ProductSet, classify_products, derive_sets, extract_witnesses,
                               extract_witnesses_explicit, instructive_preset, unique_products)
from rscancel.words import IDENTITY, Word, cyclic_conjugates, cyclically_reduced, parse_word

from _helpers import exnup4, k88, pg_power
from rscancel.coefficients import gen_ruler_coefficients
from rscancel.rsgraph import build_gamma, label_underlying

W = parse_word


def test_single_line_set():
    s = ProductSet((IDENTITY,), (4,))
    assert s.A() == [W("1"), W("a"), W("a^2"), W("a^3")]
    assert s.B == B_SET
    groups = classify_products(s)
    assert set(unique_products(groups)) == {W("1"), W("b"), W("a^4"), W("a^4 b")}


def test_instructive_classification():
    g, A, B = instructive_preset()
    s = ProductSet(explicit_A=tuple(A), B=tuple(B))
    groups = classify_products(s)
    assert set(unique_products(groups)) == {W("a"), W("a b^2")}
    assert len(groups[W("a b")]) == 2


def test_instructive_witness():
    g, A, B = instructive_preset()
    ws = extract_witnesses_explicit(g, A, B)
    first = [w for w in ws if w.z == W("a")][0]
    assert first.u == W("a b^-2 a^-1")
    assert cyclically_reduced(first.u) in cyclic_conjugates(W("b^2"))
    assert path_label(g, first.cycle) == first.u and first.cycle.is_closed(g)


def test_exnup4_sets():
    gm = exnup4()
    s = derive_sets(gm)
    assert W("b^-1 a^2") in s.A()
    assert s.size_A == 12


def _k88_ruler_gamma():
    phi = k88()
    t = gen_ruler_coefficients(phi.n, seed=0)
    return build_gamma(label_underlying(phi, t), t, phi)


@pytest.mark.parametrize("make", [exnup4, _k88_ruler_gamma])
def test_witnesses_cover_every_unique_product(make):
    gm = make()
    ws = extract_witnesses(gm)
    assert len(ws) == 4 * gm.K
    groups = classify_products(derive_sets(gm))
    uniq = set(unique_products(groups))
    assert uniq == {w.z for w in ws if w.unique_in_F}
    for w in ws:
        (x, y), (x2, y2) = w.factorizations
        assert x != x2 and y != y2
        assert w.u == x * y * (x2 * y2).inverse()
        assert path_label(gm.graph, w.cycle) == w.u and w.cycle.is_closed(gm.graph)
        assert w.unique_in_F == (len(groups[w.z]) == 1)


def test_symbolic_uniqueness_on_power_instance():
    gm = pg_power()
    s = derive_sets(gm)
    ws = extract_witnesses(gm)
    assert len(ws) == 4 * gm.K
    for w in ws[:40]:
        assert w.unique_in_F == (len(s.factorizations(w.z)) == 1)
    # interior products always have a second factorization in F
    i = 5
    mid = gm.c[i] * Word.gen("a", gm.coefficients[i].I1)
    assert len(s.factorizations(mid)) >= 2


def test_tampered_witness_breaks_cycle():
    gm = exnup4()
    w = [x for x in extract_witnesses(gm) if not x.u.is_identity()][0]
    syl = list(w.u.syllables)
    syl[0] = (syl[0].factor, syl[0].exponent + 1)
    assert path_label(gm.graph, w.cycle) != Word(syl)
