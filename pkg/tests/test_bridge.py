from fractions import Fraction

import numpy as np
import pytest

from infinikit import bridge as br
from infinikit import hyperseq as hs
from infinikit import opcalc as oc
from infinikit.errors import NotCompactError, PreconditionError
from infinikit.hyperseq import Congruence, FilterVerdict as FV, PerfectPowers, Threshold
from infinikit._rat import Rat


def quarter_diag():
    return oc.diag_embed([1, Fraction(1, 2), Fraction(1, 3), Fraction(1, 4)])


class TestOperatorToInfinitesimal:
    def test_diagonal_round_trip(self):
        eps = br.operator_to_infinitesimal(quarter_diag(), hs.make_rate(1, -1))
        assert [v for _, v in eps.prefix] == [1.0, 0.5, 1 / 3, 0.25]
        assert eps.monomials[0].p == -1
        assert hs.converges_to_zero(eps)

    def test_conjugated_prefix_close(self):
        T = quarter_diag()
        Q = oc.random_orthogonal(4, 3)
        a = br.operator_to_infinitesimal(T, hs.make_rate(1, -1))
        b = br.operator_to_infinitesimal(oc.conjugate(T, Q), hs.make_rate(1, -1))
        diffs = [abs(x - y) for (_, x), (_, y) in zip(a.prefix, b.prefix)]
        assert max(diffs) <= 1e-8

    def test_constant_tail_rejected(self):
        with pytest.raises(NotCompactError):
            br.operator_to_infinitesimal(quarter_diag(), hs.constant_seq(1))


class TestRunBridge:
    def test_worked_example(self):
        rep = br.run_bridge(
            quarter_diag(), hs.make_rate(1, -1), [Threshold(10), Congruence(0, 2)]
        )
        assert rep.H.monomials[0].p == 1
        assert rep.H_int.monomials[0].p == 1
        assert [v for _, v in rep.queries] == [FV.IN_FILTER, FV.UNDECIDED]
        assert (rep.enclosure.lo, rep.enclosure.hi) == (Rat(1, 2), Rat(1, 1))

    def test_square_tail_flips_squares_verdict(self):
        rep_n = br.run_bridge(
            quarter_diag(), hs.make_rate(1, -1), [PerfectPowers(2)]
        )
        rep_n2 = br.run_bridge(
            quarter_diag(), hs.make_rate(1, -2), [PerfectPowers(2)]
        )
        assert rep_n.queries[0][1] is FV.UNDECIDED
        assert rep_n2.queries[0][1] is FV.IN_FILTER

    def test_empty_predicates_rejected(self):
        with pytest.raises(PreconditionError):
            br.run_bridge(quarter_diag(), hs.make_rate(1, -1), [])

    def test_product_with_reciprocal_eventually_one(self):
        rep = br.run_bridge(quarter_diag(), hs.make_rate(1, -1), [Threshold(5)])
        prod = hs.termwise_mul(rep.robinson, rep.H)
        assert hs.eventually_equal(prod, hs.constant_seq(1))

    def test_conjugation_invariance_end_to_end(self):
        T = quarter_diag()
        preds = [Threshold(10), Congruence(0, 2), PerfectPowers(2)]
        base = br.run_bridge(T, hs.make_rate(1, -1), preds)
        for seed in (0, 1, 17):
            Q = oc.random_orthogonal(4, seed)
            rep = br.run_bridge(oc.conjugate(T, Q), hs.make_rate(1, -1), preds)
            assert [v for _, v in rep.queries] == [v for _, v in base.queries]
            assert rep.enclosure == base.enclosure
            assert hs.eventually_equal(rep.robinson, base.robinson)

    def test_width_law(self):
        rep = br.run_bridge(
            quarter_diag(),
            hs.make_rate(1, -1),
            [Threshold(2), Threshold(3), Congruence(0, 2), Threshold(4)],
        )
        d = rep.enclosure.decided_bits
        assert d == 2
        assert rep.enclosure.width == Rat(1, 4)

    def test_enclosure_never_degenerate(self):
        rep = br.run_bridge(
            quarter_diag(), hs.make_rate(1, -1), [Threshold(2)] * 6
        )
        assert rep.enclosure.width > 0

    def test_stage_tag_on_failure(self):
        bad_tail = hs.make_rate(1, 0, parity=True)
        with pytest.raises(NotCompactError) as info:
            br.run_bridge(quarter_diag(), bad_tail, [Threshold(2)])
        assert "stage" in str(info.value)

    def test_doc_form(self):
        rep = br.run_bridge(quarter_diag(), hs.make_rate(1, -1), [Threshold(10)])
        doc = rep.as_doc()
        assert doc["queries"] == [["m>10", "in_filter"]]
        assert doc["enclosure"]["lo"] == "1/2"
        assert "canonical" in doc["exhibitability_note"]


class TestParsePredicate:
    def test_catalogue(self):
        assert isinstance(br.parse_predicate("m>10"), Threshold)
        assert isinstance(br.parse_predicate("evens"), Congruence)
        assert isinstance(br.parse_predicate("mod:3:1"), Congruence)
        assert isinstance(br.parse_predicate("squares"), PerfectPowers)
        assert isinstance(br.parse_predicate("powers:5"), PerfectPowers)
        assert br.parse_predicate("finite:{1,2}").contains(2)
        assert not br.parse_predicate("cofinite:{1,2}").contains(2)

    def test_rejects_unknown(self):
        with pytest.raises(PreconditionError):
            br.parse_predicate("primes")

    def test_rejects_malformed(self):
        with pytest.raises(PreconditionError):
            br.parse_predicate("mod:3")
        with pytest.raises(PreconditionError):
            br.parse_predicate("m>ten")
