"""The grouped coefficient systems, case analysis, and feasibility search.

The heart of the package: an irregular polygon must yield a witness index
whose grouped mass form cannot vanish with positive masses, and the
independent linear-programming route must agree.
"""

import json
import math
import random
from fractions import Fraction as F

import numpy as np
import pytest

from curvednbody import (
    AmbiguousGroupingError,
    InternalConsistencyError,
    MassForm,
    PolygonConfig,
    RegularPolygonError,
    base_groups,
    canonicalize,
    certify,
    classify_case,
    decompose,
    find_contradiction_j,
    mass_feasibility,
    mu,
    mu_derivative,
    pairing_possibility1,
    pairing_u,
    pairing_v,
    random_irregular_polygon,
)
from curvednbody.jsonout import dumps


def turns(*t):
    return PolygonConfig.from_turns(tuple(F(x) for x in t))


def prefactor(k):
    out = 1.0
    for l in range(k):
        out *= 1.5 + l
    return out


class TestMuDerivative:
    def test_order_zero_is_mu_exactly(self, pyrng):
        for _ in range(50):
            c = pyrng.uniform(0.05, 2.0)
            rho = pyrng.uniform(-2.0, 0.9)
            assert mu_derivative(c, rho, 0) == mu(c, rho)

    def test_frozen_reference_values(self):
        # high-precision references from an independent evaluation
        assert mu_derivative(2.0, 0.0, 2) == pytest.approx(15.0 / 16.0, rel=1e-14)
        assert mu_derivative(1.0, 0.0, 1) == pytest.approx(0.26516504294495533, rel=1e-14)
        assert mu_derivative(1.5, 0.25, 3) == pytest.approx(4.068996495416128, rel=1e-13)
        assert mu_derivative(0.5, -1.0, 4) == pytest.approx(0.033809347819796820, rel=1e-13)

    def test_rejects_negative_order(self):
        with pytest.raises(ValueError):
            mu_derivative(1.0, 0.5, -1)

    def test_matches_central_difference(self, pyrng):
        """4th-order FD of the (k-1)-th closed form reproduces the k-th."""
        for _ in range(100):
            c = pyrng.uniform(0.1, 2.0)
            rho = pyrng.uniform(-2.0, 0.85)
            base = 2.0 - c * rho
            if base < 0.4:
                continue
            h = 0.004 * base / c
            for k in range(1, 5):
                f = lambda x: mu_derivative(c, x, k - 1)
                fd = (-f(rho + 2 * h) + 8 * f(rho + h) - 8 * f(rho - h) + f(rho - 2 * h)) / (12 * h)
                assert mu_derivative(c, rho, k) == pytest.approx(fd, rel=1e-6)


class TestDecompose:
    def test_boundary_examples(self):
        a, g = decompose(1.0, 1.0)
        assert (a, g) == (1.0, 1.0)
        a, g = decompose(2.0, 0.0)
        assert a == pytest.approx(0.5, rel=1e-15)
        assert g == pytest.approx(1.0, rel=1e-15)

    def test_power_identity(self, pyrng):
        for _ in range(100):
            c = pyrng.uniform(0.05, 2.0)
            rho = pyrng.uniform(-2.0, 0.9)
            a, g = decompose(c, rho)
            base = 2.0 - c * rho
            for k in range(7):
                assert a * g**k == pytest.approx(
                    c ** (0.5 + k) / base ** (1.5 + k), rel=1e-12
                )

    def test_relation_to_derivative_kernel(self, pyrng):
        # a*g^k carries one extra factor of c relative to the true k-th
        # derivative divided by its prefactor
        for _ in range(50):
            c = pyrng.uniform(0.1, 2.0)
            rho = pyrng.uniform(-1.5, 0.8)
            a, g = decompose(c, rho)
            k = 3
            ratio = mu_derivative(c, rho, k) / prefactor(k)
            assert a * g**k == pytest.approx(c * ratio, rel=1e-12)

    def test_base_monotone_in_chord(self, pyrng):
        for rho in (0.7, 0.25, -0.5, -3.0):
            gs = [decompose(c, rho)[1] for c in np.linspace(0.05, 2.0, 40)]
            assert all(x < y for x, y in zip(gs, gs[1:]))


class TestBaseGroups:
    def test_uneven_triangle_grouping(self):
        cfg = turns(0, "1/4", "1/2")
        system = base_groups(cfg, 0.5)
        assert system.n == 3
        assert len(system.groups) == 2
        by_c = {round(grp.c, 9): grp for grp in system.groups}
        g1, g2 = by_c[1.0], by_c[2.0]
        a1, _ = decompose(1.0, 0.5)
        a2, _ = decompose(2.0, 0.5)
        # c=1 holds (2,1) and (3,2): delta (m2 - m1 - m3), gamma (m1 + m2 - m3)
        np.testing.assert_allclose(g1.delta_form.coeffs, (-a1, a1, -a1), rtol=1e-13)
        np.testing.assert_allclose(g1.gamma_form.coeffs, (a1, a1, -a1), rtol=1e-13)
        # c=2 holds (3,1) alone: delta m3, gamma killed by s=0
        np.testing.assert_allclose(g2.delta_form.coeffs, (0.0, 0.0, a2), rtol=1e-13)
        assert g2.gamma_form.is_zero

    def test_regular_triangle_single_group(self):
        cfg = turns(0, "1/3", "2/3")
        system = base_groups(cfg, 0.5)
        assert len(system.groups) == 1
        # equal masses must annihilate both forms
        m = (1.0, 1.0, 1.0)
        assert system.groups[0].delta_form.value(m) == pytest.approx(0.0, abs=1e-14)
        assert system.groups[0].gamma_form.value(m) == pytest.approx(0.0, abs=1e-14)

    def test_generic_scalene_three_singletons(self):
        system = base_groups(turns(0, "1/5", "1/2"), 0.25)
        assert len(system.groups) == 3
        for grp in system.groups:
            pairs = {(term.j, term.i) for term in grp.members}
            assert len(pairs) == 1

    def test_group_bases_strictly_increasing(self, pyrng):
        rng = random.Random(5)
        for _ in range(50):
            cfg = canonicalize(random_irregular_polygon(rng, 3 + rng.randrange(4)))
            system = base_groups(cfg, rng.choice([0.3, 0.7, -1.5]))
            gs = [grp.g for grp in system.groups]
            assert all(x < y for x, y in zip(gs, gs[1:]))

    def test_float_mode_merges_equal_chords(self):
        cfg = canonicalize(PolygonConfig.from_radians((0.0, 1.0, 2.0)))
        system = base_groups(cfg, 0.5)
        # chords at angle differences 1, 1, 2: two groups
        assert len(system.groups) == 2

    def test_float_mode_ambiguous_band_rejected(self):
        eps = 6e-10  # shifts c by about 5e-10, inside (1e-12, 1e-9)
        cfg = canonicalize(PolygonConfig.from_radians((0.0, 1.0, 2.0 + eps)))
        with pytest.raises(AmbiguousGroupingError):
            base_groups(cfg, 0.5)

    def test_rejects_non_canonical(self):
        with pytest.raises(ValueError):
            base_groups(turns(0, "1/2", "3/4"), 0.5)

    def test_equality_rows_cover_nonzero_forms(self):
        system = base_groups(turns(0, "1/4", "1/2"), 0.5)
        rows, labels = system.equality_rows()
        assert rows.shape[1] == 3
        assert rows.shape[0] == len(labels) == 3


class TestPairings:
    def test_possibility1_regular(self):
        reg = turns(0, "1/4", "1/2", "3/4")
        assert pairing_possibility1(reg, 2) == 3
        assert pairing_possibility1(reg, 3) == 4
        assert pairing_possibility1(reg, 4) == 1

    def test_possibility1_absent(self):
        assert pairing_possibility1(turns(0, "1/4", "1/2"), 3) is None
        assert pairing_possibility1(turns(0, "1/4", "1/2", "5/8"), 3) is None

    def test_possibility1_rejects_non_canonical_hit(self):
        # first gap is not minimal, so a matching vertex lands off-successor
        cfg = turns(0, "1/2", "5/8")
        with pytest.raises(InternalConsistencyError):
            pairing_possibility1(cfg, 2)

    def test_pairing_u_examples(self):
        assert pairing_u(turns(0, "1/4", "1/2"), 3) is None
        assert pairing_u(turns(0, "1/8", "1/2", "5/8"), 4) == 3

    def test_pairing_v_examples(self):
        assert pairing_v(turns(0, "1/4", "1/2"), 3) is None
        assert pairing_v(turns(0, "1/4", "1/2", "3/4"), 4) == 2
        # self-match does not count
        assert pairing_v(turns(0, "1/10", "1/2", "7/10", "9/10"), 3) is None

    def test_pairings_unique_by_enumeration(self):
        rng = random.Random(9)
        for _ in range(200):
            cfg = canonicalize(random_irregular_polygon(rng, 3 + rng.randrange(4)))
            a = cfg.turns
            for j in range(3, cfg.n + 1):
                target_u = (a[0] + a[1] - a[j - 1]) % 1
                target_v = (2 * a[0] - a[j - 1]) % 1
                hits_u = [i for i, x in enumerate(a) if x % 1 == target_u]
                hits_v = [i + 1 for i, x in enumerate(a) if x % 1 == target_v and i + 1 != j]
                assert len(hits_u) <= 1
                assert len(hits_v) <= 1
                got_u = pairing_u(cfg, j)
                got_v = pairing_v(cfg, j)
                if got_u is not None:
                    assert a[got_u - 1] % 1 == target_u
                if got_v is not None:
                    assert hits_v == [got_v]


class TestFindContradiction:
    def test_examples(self):
        assert find_contradiction_j(turns(0, "1/4", "1/2")) == 3
        assert find_contradiction_j(turns(0, "1/8", "1/4", "1/2")) == 3
        assert find_contradiction_j(turns(0, "1/8", "1/2", "5/8")) == 4

    def test_regular_rejected(self):
        with pytest.raises(RegularPolygonError):
            find_contradiction_j(turns(0, "1/6", "1/3", "1/2", "2/3", "5/6"))

    def test_float_mode_rejected(self):
        with pytest.raises(ValueError):
            find_contradiction_j(PolygonConfig.from_radians((0.0, 1.0, 2.0)))

    def test_witness_is_first_broken_successor(self):
        rng = random.Random(21)
        for _ in range(200):
            cfg = canonicalize(random_irregular_polygon(rng, 3 + rng.randrange(4)))
            j = find_contradiction_j(cfg)
            assert 3 <= j <= cfg.n
            assert pairing_possibility1(cfg, j) is None
            for earlier in range(3, j):
                assert pairing_possibility1(cfg, earlier) is not None


class TestClassifyCase:
    def test_case1_fixture(self):
        cfg = turns(0, "1/8", "1/4", "3/8")
        cert = classify_case(cfg, 4)
        assert cert.case_tag == "case1"
        assert cert.u is None and cert.v is None
        assert cert.failing_equation == "delta"
        (wf,) = cert.witness_forms
        assert wf.form.coeffs == (0.0, 0.0, 0.0, 1.0)
        assert wf.sign_definite

    def test_case1_with_half_turn_witness(self):
        # s_j1 = 0 here; the delta witness never touches it
        cfg = turns(0, "1/8", "1/2")
        cert = classify_case(cfg, 3)
        assert cert.case_tag == "case1"
        assert cert.failing_equation == "delta"

    def test_case2u_fixture(self):
        cfg = turns(0, "1/8", "3/8", "3/4")
        cert = classify_case(cfg, 3)
        assert cert.case_tag == "case2u"
        assert cert.u == 4 and cert.v is None
        assert cert.failing_equation == "gamma"
        (wf,) = cert.witness_forms
        assert wf.sign_definite
        assert set(wf.form.support) == {3, 4}

    def test_case2v_fixture(self):
        cfg = turns(0, "1/8", "1/4", "3/4")
        cert = classify_case(cfg, 3)
        assert cert.case_tag == "case2v"
        assert cert.u is None and cert.v == 4
        (wf,) = cert.witness_forms
        assert wf.form.coeffs == (0.0, 0.0, 1.0, 1.0)

    def test_case3_fixture_records_both_forms(self):
        cfg = turns(0, "1/6", "1/3", "1/2", "2/3")
        cert = classify_case(cfg, 5)
        assert cert.case_tag == "case3"
        assert cert.u == 4 and cert.v == 3
        assert cert.failing_equation == "disjunction"
        dform, gform = cert.witness_forms
        assert dform.equation == "delta"
        assert gform.equation == "gamma"
        # delta pattern m5 + m3 - m4 and gamma pattern (m5 - m3 + m4)*t
        # sum to 2*m5 after removing the shared tangent factor
        t = gform.form.coeffs[4] / dform.form.coeffs[4]
        combined = np.asarray(dform.form.coeffs) + np.asarray(gform.form.coeffs) / t
        np.testing.assert_allclose(combined, (0, 0, 0, 0, 2.0), atol=1e-12)

    def test_case3_with_u_equal_j_collapses_to_delta(self):
        cfg = turns(0, "1/5", "2/5", "3/5")
        cert = classify_case(cfg, 4)
        assert cert.case_tag == "case3"
        assert cert.u == 4 and cert.v == 3
        assert cert.failing_equation == "delta"
        dform = cert.witness_forms[0]
        assert dform.form.coeffs == (0.0, 0.0, 1.0, 0.0)
        assert dform.sign_definite

    def test_rejects_index_where_pairing_exists(self):
        # at j=3 the gap matches the first gap, so there is no contradiction
        with pytest.raises(ValueError):
            classify_case(turns(0, "1/8", "1/2", "5/8"), 3)

    def test_accepts_any_broken_index(self):
        # j=4 also breaks the pairing even though the witness search stops at 3
        cert = classify_case(turns(0, "1/8", "1/4", "1/2"), 4)
        assert cert.case_tag in {"case1", "case2u", "case2v", "case3"}

    def test_case_shape_invariants(self):
        rng = random.Random(13)
        for _ in range(300):
            cfg = canonicalize(random_irregular_polygon(rng, 3 + rng.randrange(4)))
            cert = classify_case(cfg, find_contradiction_j(cfg))
            if cert.case_tag == "case1":
                assert cert.u is None and cert.v is None
            elif cert.case_tag == "case2u":
                assert cert.u is not None and cert.v is None
            elif cert.case_tag == "case2v":
                assert cert.u is None and cert.v is not None
            else:
                assert cert.u is not None and cert.v is not None
            if cert.failing_equation != "disjunction":
                assert any(
                    wf.sign_definite and wf.equation == cert.failing_equation
                    for wf in cert.witness_forms
                )


class TestMassForm:
    def test_support_and_sign(self):
        form = MassForm((0.0, 1.5, -0.5))
        assert form.support == (2, 3)
        assert not form.sign_definite
        assert MassForm((0.0, 2.0, 1.0)).sign_definite
        assert not MassForm((0.0, 0.0)).sign_definite
        assert MassForm((0.0, 0.0)).is_zero

    def test_value_and_scaling(self):
        form = MassForm((1.0, -2.0))
        assert form.value((3.0, 1.0)) == 1.0
        assert form.scaled(2.0).coeffs == (2.0, -4.0)

    def test_from_terms_accumulates_repeats(self):
        form = MassForm.from_terms(3, {2: 1.0})
        assert form.coeffs == (0.0, 1.0, 0.0)


class TestMassFeasibility:
    def test_regular_polygons_feasible_with_equal_masses(self):
        for n in (3, 4, 5, 6):
            cfg = PolygonConfig.from_turns(tuple(F(k, n) for k in range(n)))
            res = mass_feasibility(cfg, 0.5)
            assert res.feasible
            assert res.masses is not None
            m = np.asarray(res.masses)
            np.testing.assert_allclose(m, m[0], rtol=1e-9)
            assert res.residual <= 1e-10

    def test_uneven_triangle_infeasible(self):
        res = mass_feasibility(turns(0, "1/4", "1/2"), 0.5)
        assert not res.feasible
        assert res.masses is None

    def test_floor_scales_witness(self):
        cfg = PolygonConfig.from_turns(tuple(F(k, 4) for k in range(4)))
        res = mass_feasibility(cfg, 0.5, floor=2.0)
        assert res.feasible
        assert min(res.masses) >= 2.0 - 1e-12

    def test_hyperbolic_rho(self):
        assert not mass_feasibility(turns(0, "1/4", "1/2"), -1.0).feasible
        cfg = PolygonConfig.from_turns(tuple(F(k, 5) for k in range(5)))
        assert mass_feasibility(cfg, -1.0).feasible

    def test_random_irregular_always_infeasible(self):
        rng = random.Random(17)
        for _ in range(100):
            cfg = random_irregular_polygon(rng, 3 + rng.randrange(4))
            assert not mass_feasibility(cfg, 0.5).feasible


class TestCertify:
    def test_uneven_triangle_certificate(self):
        cert = certify(turns(0, "1/4", "1/2"))
        assert cert.special_j == 3
        assert cert.case_tag == "case1"
        assert cert.feasibility_rho == 0.5
        assert cert.feasibility_feasible is False

    def test_regular_rejected(self):
        with pytest.raises(RegularPolygonError):
            certify(PolygonConfig.from_turns(tuple(F(k, 5) for k in range(5))))

    def test_float_mode_rejected(self):
        with pytest.raises(ValueError):
            certify(PolygonConfig.from_radians((0.0, 1.0, 2.0)))

    def test_non_canonical_input_keeps_original_angles(self):
        cert = certify(turns(0, "1/4", "3/4"))
        assert cert.polygon.turns == (F(0), F(1, 4), F(3, 4))
        assert cert.canonical.turns == (F(0), F(1, 4), F(1, 2))

    def test_hyperbolic_cross_check(self):
        cert = certify(turns(0, "1/4", "1/2"), rho=-1.0)
        assert cert.feasibility_rho == -1.0
        assert cert.feasibility_feasible is False

    def test_json_rendering_is_deterministic_and_shaped(self):
        cert = certify(turns(0, "1/8", "1/2", "5/8"))
        doc = cert.to_json_dict()
        for key in ("n", "angles", "canonical_angles", "j", "case", "u", "v",
                    "witness_forms", "feasibility", "narrative"):
            assert key in doc
        assert doc["feasibility"] == {"rho": 0.5, "verdict": "infeasible"}
        text1 = dumps(doc)
        text2 = dumps(certify(turns(0, "1/8", "1/2", "5/8")).to_json_dict())
        assert text1 == text2
        json.loads(text1)  # valid JSON

    def test_narrative_mentions_the_argument(self):
        cert = certify(turns(0, "1/4", "1/2"))
        text = cert.narrative
        assert "Case 1" in text
        assert "j = 3" in text
        assert "positive masses" in text
        assert "infeasible" in text

    def test_batch_agreement_with_feasibility(self):
        rng = random.Random(29)
        for _ in range(100):
            cfg = random_irregular_polygon(rng, 3 + rng.randrange(4))
            cert = certify(cfg)  # raises DisagreementError on any conflict
            assert cert.feasibility_feasible is False
