from hypothesis import given, strategies as st

from rscancel.words import (IDENTITY, Word, concat, cyclic_canonical, cyclic_conjugates, cyclic_reduce,
                            format_word, invert, is_conjugate, lengths, normalize, parse_word, to_letters)

raw_words = st.lists(st.tuples(st.sampled_from("ab"), st.integers(-4, 4)), max_size=10)


def W(text):
    return parse_word(text)


def test_normalize_examples():
    assert normalize([("a", 1), ("a", 1)]) == W("a^2")
    assert normalize([("a", 1), ("a", 1)]).syllable_length == 1
    assert normalize([("a", 1), ("b", 1), ("b", -1), ("a", 1)]) == W("a^2")
    w = normalize([("a", 2), ("b", 1), ("a", -1)])
    assert format_word(w) == "a^2 b a^-1" and w.syllable_length == 3


def test_concat_examples():
    assert concat(W("a"), W("a^-1")) == IDENTITY
    assert concat(W("a b"), W("b")) == W("a b^2")
    assert concat(W("a^10 b"), W("b^-1 a^-10")) == IDENTITY


def test_invert_and_lengths():
    assert invert(W("a^2 b a^-1")) == W("a b^-1 a^-2")
    assert invert(IDENTITY) == IDENTITY
    assert invert(W("b")) == W("b^-1")
    assert lengths(W("a^2")) == (1, 2)
    assert lengths(W("a^2 b a^-1")) == (3, 4)
    assert lengths(IDENTITY) == (0, 0)


def _brute_conjugates(w):
    letters = to_letters(w)
    out = set()
    for s in (letters, to_letters(w.inverse())):
        for k in range(len(s)):
            r = parse_word(s[k:] + s[:k])
            out.add(cyclic_reduce(r)[1])
    return out


def test_cyclic_conjugates_examples():
    w = W("a b a^2 b")
    got = cyclic_conjugates(w)
    assert {W("a b a^2 b"), W("a^2 b a b"), W("b a^2 b a"), W("b a b a^2")} <= got
    assert len(got) == 8
    assert got == _brute_conjugates(w)
    assert cyclic_conjugates(W("b^2")) == {W("b^2"), W("b^-2")}
    assert cyclic_conjugates(W("a b^-1 a^-1")) == {W("b^-1"), W("b")}


def test_parse_format():
    assert parse_word("1") == IDENTITY
    assert format_word(IDENTITY) == "1"
    assert parse_word("aabA") == W("a^2 b a^-1")
    assert parse_word("a^(-3)*b") == W("a^-3 b")
    big = 10 ** 40
    assert parse_word(f"a^{big} b").syllables[0].exponent == big


@given(raw_words)
def test_normal_form_alternates(raw):
    w = Word(raw)
    syl = w.syllables
    assert all(s.exponent != 0 for s in syl)
    assert all(x.factor != y.factor for x, y in zip(syl, syl[1:]))


@given(raw_words, raw_words, raw_words)
def test_group_laws(r1, r2, r3):
    u, v, x = Word(r1), Word(r2), Word(r3)
    assert (u * v) * x == u * (v * x)
    assert u * u.inverse() == IDENTITY
    assert (u * v).inverse() == v.inverse() * u.inverse()
    assert parse_word(format_word(u)) == u
    assert parse_word(to_letters(u)) == u


@given(raw_words)
def test_cyclic_reduce(raw):
    w = Word(raw)
    h, c = cyclic_reduce(w)
    assert h * c * h.inverse() == w
    if c.syllable_length > 1:
        assert c.syllables[0].factor != c.syllables[-1].factor
    if not c.is_identity():
        assert is_conjugate(w, c)
        assert cyclic_canonical(c) in cyclic_conjugates(c)
        assert cyclic_conjugates(c) == _brute_conjugates(c)
