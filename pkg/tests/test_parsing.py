import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dforge import equal, parse_operator_expr, pretty, tokenize
from dforge.errors import IllegalCharacter, ParseError, UnknownLevel

from conftest import LEVELS, random_expr


class TestTokenize:
    def test_ladder_product(self):
        toks = tokenize("a*ad")
        assert [(t.kind, t.lexeme) for t in toks] == [
            ("ladder", "a"),
            ("punct", "*"),
            ("ladder", "ad"),
        ]

    def test_channel_term(self):
        toks = tokenize("g1*sig(g,r)*ad")
        assert len(toks) == 10
        assert toks[0].kind == "ident" and toks[0].lexeme == "g1"
        assert toks[2].kind == "sigma-head"
        assert toks[-1].kind == "ladder" and toks[-1].lexeme == "ad"

    def test_non_ascii_rejected(self):
        with pytest.raises(IllegalCharacter) as exc:
            tokenize("σ")
        assert exc.value.position == 0

    def test_positions_strictly_increasing(self):
        toks = tokenize("g1 * sig(g,r) + 2.5e3*ad")
        positions = [t.position for t in toks]
        assert positions == sorted(positions)
        assert len(set(positions)) == len(positions)

    def test_lexemes_reproduce_input(self):
        text = "g1*sig(g, r)*ad + 2/delta*a"
        assert "".join(t.lexeme for t in tokenize(text)) == text.replace(" ", "")

    def test_unknown_character(self):
        with pytest.raises(IllegalCharacter) as exc:
            tokenize("a + @b")
        assert exc.value.position == 4


class TestParse:
    def test_single_monomial(self):
        x = parse_operator_expr("sig(g,r)*ad", LEVELS)
        assert len(x.terms) == 1
        m = x.terms[0]
        assert m.coeff.re == 1 and m.coeff.im == 0
        assert m.atom.pair == ("g", "r")
        assert (m.boson.creators, m.boson.annihilators) == (1, 0)

    def test_two_channel_sum(self):
        x = parse_operator_expr("g1*sig(g,r)*ad + g2*sig(e,r)*a", LEVELS)
        assert len(x.terms) == 2
        sigs = {m.coeff.num for m in x.terms}
        assert sigs == {("g1",), ("g2",)}

    def test_ccr_canonicalization(self):
        x = parse_operator_expr("a*ad", LEVELS)
        y = parse_operator_expr("1 + ad*a", LEVELS)
        assert equal(x, y)

    def test_unknown_level(self):
        with pytest.raises(UnknownLevel):
            parse_operator_expr("sig(g,x)", LEVELS)

    def test_error_position_within_input(self):
        text = "a + * ad"
        with pytest.raises(ParseError) as exc:
            parse_operator_expr(text, LEVELS)
        assert 0 <= exc.value.position <= len(text.encode())

    def test_trailing_junk_rejected(self):
        with pytest.raises(ParseError):
            parse_operator_expr("a a", LEVELS)

    def test_imaginary_unit(self):
        x = parse_operator_expr("i*sig(g,g)", LEVELS)
        m = x.terms[0]
        assert m.coeff.re == 0 and m.coeff.im == 1

    def test_symbol_division(self):
        x = parse_operator_expr("g1*g2/delta*sig(g,e)", LEVELS)
        m = x.terms[0]
        assert m.coeff.num == ("g1", "g2")
        assert m.coeff.den == ("delta",)

    def test_parsing_is_pure(self):
        text = "g1*sig(g,r)*ad + i*a - 3/2*sig(e,e)"
        assert equal(
            parse_operator_expr(text, LEVELS), parse_operator_expr(text, LEVELS)
        )


class TestRoundTrip:
    @given(seed=st.integers(0, 10**9))
    @settings(max_examples=150, deadline=None)
    def test_pretty_reparses_equal(self, seed):
        rng = random.Random(seed)
        x = random_expr(rng, max_terms=4, symbols=("g1", "g2", "Om"))
        text = pretty(x)
        assert equal(parse_operator_expr(text, LEVELS), x)

    def test_zero_round_trip(self):
        x = parse_operator_expr("a - a", LEVELS)
        assert pretty(x) == "0"
        assert equal(parse_operator_expr("0", LEVELS), x)

    def test_denominator_round_trip(self):
        x = parse_operator_expr("g1*g2/delta*sig(g,e)*ad*ad", LEVELS)
        assert equal(parse_operator_expr(pretty(x), LEVELS), x)
