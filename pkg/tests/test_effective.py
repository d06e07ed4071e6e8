import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dforge import (
    AtomOp,
    BosonString,
    Channel,
    ChannelSpec,
    Coefficient,
    Monomial,
    OperatorExpr,
    SpaceSpec,
    add,
    decompose,
    effective_hamiltonian,
    equal,
    first_order_remainder_bound,
    hermiticity_defect,
    opnorm,
    realize,
)

from conftest import LEVELS, three_level_spec

SPACE = SpaceSpec(LEVELS, 10)


def mono(re, atom, m, n, num=(), den=()):
    return Monomial(
        Coefficient.make(Fraction(re), 0, num, den), atom, BosonString(m, n)
    )


def sig(i, j):
    return AtomOp.transition(i, j)


class TestEffectiveHamiltonian:
    def test_single_cavity_channel(self):
        # lam [A, A^dag] with A = sig(g,r) ad:
        # sig(g,g) ad a - sig(r,r) ad a - sig(r,r)
        op = OperatorExpr.sigma("g", "r") * OperatorExpr.create()
        spec = ChannelSpec((Channel.from_symbol("g1", op),), "delta")
        got = effective_hamiltonian(spec)
        nd = (("g1", "g1"), ("delta",))
        expected = OperatorExpr.from_monomials(
            [
                mono(1, sig("g", "g"), 1, 1, *nd),
                mono(-1, sig("r", "r"), 1, 1, *nd),
                mono(-1, sig("r", "r"), 0, 0, *nd),
            ]
        )
        assert equal(got, expected)

    def test_single_drive_channel(self):
        # classical drive: [sig(g,r), sig(r,g)] = sig(g,g) - sig(r,r)
        spec = ChannelSpec(
            (Channel.from_symbol("Om", OperatorExpr.sigma("g", "r")),), "delta"
        )
        got = effective_hamiltonian(spec)
        nd = (("Om", "Om"), ("delta",))
        expected = OperatorExpr.from_monomials(
            [mono(1, sig("g", "g"), 0, 0, *nd), mono(-1, sig("r", "r"), 0, 0, *nd)]
        )
        assert equal(got, expected)

    def test_identity_channel_vanishes(self):
        # [1, 1] = 0: a channel proportional to the identity contributes nothing
        spec = ChannelSpec(
            (Channel.from_symbol("x", OperatorExpr.identity()),), "delta"
        )
        assert effective_hamiltonian(spec).is_zero()

    def test_every_coefficient_carries_detuning(self):
        h = effective_hamiltonian(three_level_spec())
        for m in h.terms:
            assert m.coeff.den == ("delta",)
            assert len(m.coeff.num) == 2

    def test_three_level_monomial_count(self):
        h = effective_hamiltonian(three_level_spec())
        assert len(h.terms) == 16  # 10 survive projecting out r (see golden test)

    @given(seed=st.integers(0, 10**9))
    @settings(max_examples=40, deadline=None)
    def test_hermitian_for_random_channels(self, seed):
        rng = random.Random(seed)
        channels = []
        for idx in range(rng.randint(1, 3)):
            i, j = rng.sample(LEVELS, 2)
            op = OperatorExpr.sigma(i, j)
            for _ in range(rng.randint(0, 2)):
                op = op * (
                    OperatorExpr.create() if rng.random() < 0.5
                    else OperatorExpr.annihilate()
                )
            if op.is_zero():
                op = OperatorExpr.sigma(i, j)
            channels.append(Channel.from_symbol(f"c{idx}", op))
        spec = ChannelSpec(tuple(channels), "delta")
        h = effective_hamiltonian(spec)
        params = {f"c{idx}": 0.5 + 0.25 * idx for idx in range(len(channels))}
        params["delta"] = 3.0
        deg = h.max_boson_degree()
        mat = realize(h, SPACE, params)
        fd = SPACE.fock_dim
        keep = np.array(
            [lv * fd + n for lv in range(len(LEVELS)) for n in range(fd - deg)]
        )
        sub = mat[np.ix_(keep, keep)]
        assert float(np.max(np.abs(sub - sub.conj().T))) < 1e-12

    def test_detuning_symbol_collision_rejected(self):
        with pytest.raises(ValueError):
            ChannelSpec(
                (Channel.from_symbol("delta", OperatorExpr.sigma("g", "r")),),
                "delta",
            )


@pytest.fixture(scope="module")
def parts():
    from dforge import project_out_level

    h = project_out_level(effective_hamiltonian(three_level_spec()), "r")
    return h, decompose(h, "g", "e")


class TestDecompose:
    def test_parts_resum_exactly(self, parts):
        h, d = parts
        total = OperatorExpr.zero()
        for x in d.values():
            total = add(total, x)
        assert equal(total, h)
        assert total.terms == h.terms

    def test_stark_terms(self, parts):
        _, d = parts
        expected = OperatorExpr.from_monomials(
            [
                mono(1, sig("e", "e"), 0, 0, ("g2", "g2"), ("delta",)),
                mono(1, sig("e", "e"), 1, 1, ("g2", "g2"), ("delta",)),
                mono(1, sig("g", "g"), 0, 0, ("Omega", "Omega"), ("delta",)),
                mono(1, sig("g", "g"), 1, 1, ("g1", "g1"), ("delta",)),
            ]
        )
        assert equal(d["stark"], expected)

    def test_one_photon_terms(self, parts):
        _, d = parts
        expected = OperatorExpr.from_monomials(
            [
                mono(1, sig("e", "g"), 0, 1, ("Omega", "g2"), ("delta",)),
                mono(1, sig("g", "e"), 1, 0, ("Omega", "g2"), ("delta",)),
            ]
        )
        assert equal(d["one_photon"], expected)

    def test_two_photon_terms(self, parts):
        _, d = parts
        expected = OperatorExpr.from_monomials(
            [
                mono(1, sig("e", "g"), 0, 2, ("g1", "g2"), ("delta",)),
                mono(1, sig("g", "e"), 2, 0, ("g1", "g2"), ("delta",)),
            ]
        )
        assert equal(d["two_photon"], expected)

    def test_displacement_terms(self, parts):
        _, d = parts
        expected = OperatorExpr.from_monomials(
            [
                mono(1, sig("g", "g"), 0, 1, ("Omega", "g1"), ("delta",)),
                mono(1, sig("g", "g"), 1, 0, ("Omega", "g1"), ("delta",)),
            ]
        )
        assert equal(d["displacement"], expected)

    def test_nothing_left_over(self, parts):
        _, d = parts
        assert d["other"].is_zero()

    def test_parts_are_individually_hermitian(self, parts):
        _, d = parts
        params = {"g1": 1.0, "g2": 0.7, "Omega": 0.4, "delta": 50.0}
        for name in ("stark", "one_photon", "two_photon", "displacement"):
            mat = realize(d[name], SPACE, params)
            fd = SPACE.fock_dim
            keep = np.array(
                [lv * fd + n for lv in range(len(LEVELS)) for n in range(fd - 2)]
            )
            sub = mat[np.ix_(keep, keep)]
            assert float(np.max(np.abs(sub - sub.conj().T))) < 1e-12


class TestRemainderBound:
    PARAMS = {"g1": 1.0, "g2": 1.0, "Omega": 1.0, "delta": 100.0}

    def test_drive_only_value(self):
        # sig(g,r) has unit operator norm, so the bound is exactly 2 lam/delta
        spec = ChannelSpec(
            (Channel.from_symbol("Om", OperatorExpr.sigma("g", "r")),), "delta"
        )
        got = first_order_remainder_bound(
            spec, {"Om": 2.0, "delta": 100.0}, SPACE
        )
        assert got == pytest.approx(2.0 * 2.0 / 100.0, rel=1e-12)

    def test_cavity_channel_value(self):
        # |sig(g,r) ad| on a truncated space is sqrt(n_max)
        op = OperatorExpr.sigma("g", "r") * OperatorExpr.create()
        spec = ChannelSpec((Channel.from_symbol("g1", op),), "delta")
        got = first_order_remainder_bound(
            spec, {"g1": 1.0, "delta": 100.0}, SPACE
        )
        assert got == pytest.approx(2.0 * np.sqrt(SPACE.n_max) / 100.0, rel=1e-12)

    def test_scales_linearly_in_coupling(self):
        spec = three_level_spec()
        base = first_order_remainder_bound(spec, self.PARAMS, SPACE)
        doubled = dict(self.PARAMS)
        for key in ("g1", "g2", "Omega"):
            doubled[key] = 2.0 * self.PARAMS[key]
        assert first_order_remainder_bound(
            spec, doubled, SPACE
        ) == pytest.approx(2.0 * base, rel=1e-12)

    def test_scales_inversely_in_detuning(self):
        spec = three_level_spec()
        base = first_order_remainder_bound(spec, self.PARAMS, SPACE)
        far = dict(self.PARAMS, delta=1000.0)
        assert first_order_remainder_bound(spec, far, SPACE) == pytest.approx(
            base / 10.0, rel=1e-12
        )

    def test_shrinks_with_detuning_against_norm(self):
        spec = three_level_spec()
        bound = first_order_remainder_bound(spec, self.PARAMS, SPACE)
        h = realize(effective_hamiltonian(spec), SPACE, self.PARAMS)
        assert bound < opnorm(h) * 10  # same 1/delta order, sane magnitude

    def test_hermiticity_defect_of_realized_generator(self):
        h = realize(effective_hamiltonian(three_level_spec()), SPACE, self.PARAMS)
        deg = 2
        fd = SPACE.fock_dim
        keep = np.array(
            [lv * fd + n for lv in range(len(LEVELS)) for n in range(fd - deg)]
        )
        sub = h[np.ix_(keep, keep)]
        assert hermiticity_defect(sub) < 1e-12
