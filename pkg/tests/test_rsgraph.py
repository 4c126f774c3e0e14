import pytest

from rscancel.coefficients import gen_power_coefficients, gen_ruler_coefficients
from rscancel.graph import enumerate_cycle_words, gamma_syllable, read_path
from rscancel.pieces import max_piece_syllable
from rscancel.rsgraph import (RSConstructionError, build_gamma, combine_family, emit_presentation,
                              label_underlying, rsgraph_from_json, underlying_graph_of,
                              underlying_signature)
from rscancel.underlying import UnderlyingGraph
from rscancel.words import Word, format_word

from _helpers import exnup4, k88, pg_power, pg_ruler


def test_labels():
    phi = k88()
    t = gen_power_coefficients(phi.n)
    g = label_underlying(phi, t)
    i = 0
    k0 = phi.perms[0][i]
    assert g.edges[4 * i + 0].label == Word.gen("b") * Word.gen("a", -t[k0].I1)
    assert g.edges[4 * i + 3].label == Word.gen("a", t[i].O2) * Word.gen("b")
    assert format_word(g.edges[0].label) == "b a^-" + str(t[k0].I1)
    assert t[0].I1 == 10


def test_loops_rejected():
    phi = UnderlyingGraph(1, ((0,), (0,), (0,), (0,)))
    t = gen_power_coefficients(1)
    with pytest.raises(RSConstructionError, match="loop"):
        build_gamma(label_underlying(phi, t), t, phi)


def test_line_count_mismatch():
    with pytest.raises(RSConstructionError):
        label_underlying(k88(), gen_power_coefficients(3))


def test_structure_of_pg_gamma():
    gm = pg_power()
    n = 114
    assert gm.graph.num_vertices() == 6 * n and gm.graph.num_edges() == 9 * n
    assert len(gm.b_edges) == 4 * n and gm.K == n
    for eid, (i, P), (j, Q) in gm.b_edges:
        line_i, line_j = gm.coefficients[i], gm.coefficients[j]
        assert i != j
        assert (P in (0, line_i.C) and Q in line_j.I) or (P in line_i.O and Q in (0, line_j.C))
    for i in range(n):
        assert max(gm.line_vertices[i]) == gm.coefficients[i].C


def test_underlying_round_trip():
    phi = k88()
    t = gen_power_coefficients(phi.n)
    lab = label_underlying(phi, t)
    gm = build_gamma(lab, t, phi)
    assert underlying_signature(underlying_graph_of(gm)) == underlying_signature(lab)


def test_c_are_tree_path_labels():
    gm = pg_ruler()
    for i, c in enumerate(gm.c):
        p = read_path(gm.graph, gm.basepoint, c)
        assert p is not None and p.end(gm.graph) == gm.line_start(i)


def test_lambda_and_gamma_on_small_instances():
    for gm in (pg_ruler(), build_gamma(*_k88_ruler())):
        assert max_piece_syllable(gm.graph) == 3
        assert gamma_syllable(gm.graph) >= gm.phi.girth


def _k88_ruler():
    phi = k88()
    t = gen_ruler_coefficients(phi.n, seed=0)
    return label_underlying(phi, t), t, phi


def _simple_paths_bab(g, aline_of):
    """Labels b^e a^P b^f of simple paths, exhaustively."""
    out, inn = g.incidence()
    res = []
    for v in g.vertices:
        for e1, o1 in [(x, 1) for x in out.get((v, "b"), [])] + [(x, -1) for x in inn.get((v, "b"), [])]:
            e = g.edges[e1]
            u = e.dst if o1 > 0 else e.src
            i, p = aline_of[u]
            for w, (j, q) in aline_of.items():
                if j != i or q == p:
                    continue
                for e2, o2 in [(x, 1) for x in out.get((w, "b"), [])] + [(x, -1) for x in inn.get((w, "b"), [])]:
                    if e2 == e1:
                        continue
                    res.append(((o1, q - p, o2), (e1, e2)))
    return res


def test_no_two_paths_share_a_middle_exponent():
    gm = build_gamma(*_k88_ruler())
    seen = {}
    for (o1, P, o2), edges in _simple_paths_bab(gm.graph, gm.aline_of):
        key = (o1, P, o2)
        assert key not in seen or seen[key] == edges, f"b a^{P} b read twice"
        seen[key] = edges


def test_exnup4():
    gm = exnup4()
    q = underlying_graph_of(gm)
    assert q.num_vertices() == 3 and q.num_edges() == 8
    assert [format_word(c) for c in gm.c] == ["1", "b^-2", "b^-1"]


def test_emit_presentation_counts():
    gm = pg_power()
    pres = emit_presentation(gm)
    assert len(pres.relators) == 3 * 114 + 1
    assert all(r.syllable_length >= 6 for r in pres.relators)
    assert pres.text().startswith("gens: a b\nrel: ")


def test_cycles_below_girth_absent():
    gm = pg_ruler()
    assert enumerate_cycle_words(gm.graph, 5) == []


def test_reduced_pattern_path_of_girth_length():
    from rscancel.genericity import is_rs_pattern
    gm = pg_ruler()
    g = gm.graph
    outs = {}
    for eid, (i, P), _ in gm.b_edges:
        outs.setdefault(i, []).append((P, eid))
    target = gm.phi.girth

    def extend(path):
        if len(path) == target:
            return path
        j, Q = gm.aline_of[g.edges[path[-1]].dst]
        for P, eid in sorted(outs[j]):
            if P != Q:
                found = extend(path + [eid])
                if found:
                    return found
        return None

    path = extend([gm.b_edges[0][0]])
    assert path is not None
    raw = [("b", 1)]
    for e1, e2 in zip(path, path[1:]):
        _, q = gm.aline_of[g.edges[e1].dst]
        _, p = gm.aline_of[g.edges[e2].src]
        raw += [("a", p - q), ("b", 1)]
    w = Word(raw)
    assert is_rs_pattern(w) and w.syllable_length == 2 * target - 1
    start = g.edges[path[0]].src
    assert read_path(g, start, w) is not None


def test_json_round_trip():
    gm = pg_ruler()
    again = rsgraph_from_json(gm.to_json())
    assert again.graph == gm.graph and again.c == gm.c


def test_family():
    a = pg_power()
    phi = a.phi
    t2 = gen_power_coefficients(phi.n, range(200, 200 + phi.n))
    b = build_gamma(label_underlying(phi, t2), t2, phi)
    fam = combine_family([a, b])
    assert fam.check.passed and fam.gamma.K == 228
    assert fam.girth_bound == 6
    assert combine_family([a]).gamma is a
    with pytest.raises(RSConstructionError, match="Rips-Segev"):
        combine_family([a, a])
