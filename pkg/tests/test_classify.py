import cmath
import math

import pytest
from hypothesis import assume, given, settings, strategies as st

from expsolve import expsum as es
from expsolve.classify import (PARAM_TOL, characteristic_roots, classify, enumerate_case12,
                               enumerate_case3, enumerate_case4, enumerate_case5,
                               enumerate_case6, homogeneous_solutions)
from expsolve.ode import OdeSpec, verify

from conftest import cx, unit_disk

cosh2 = es.make([(1, 1, 0), (1, -1, 0)])


def spec_of(ref, key):
    return OdeSpec.from_json(ref[key]["spec"])


def test_exponential_pair():
    cands = classify(OdeSpec(1, (0, 1), 1, 2))
    by_tag = {c.case_tag: c for c in cands if c.verified and c.phi != 0}
    assert set(by_tag) == {"C1", "C2"}
    assert by_tag["C1"].params["lambda"] == pytest.approx(2)
    assert by_tag["C2"].params["lambda"] == pytest.approx(-1)
    assert by_tag["C1"].f == es.make([(1, 0, 0), (1, 2, 0)])
    assert by_tag["C2"].f == es.make([(2, 0, 0), (1, -1, 0)])
    for c in by_tag.values():
        assert c.phi == pytest.approx(-2)
    # the remaining verified candidate is the phi = 0 solution A e^z of f = f'
    rest = [c for c in cands if c.verified and c.phi == 0]
    assert [c.case_tag for c in rest] == ["HOM"]


def test_case1_cube_roots(ref):
    spec = OdeSpec(3, (0, 0, 0, 1), 1, 2)
    c1 = [c for c in enumerate_case12(spec) if c.case_tag == "C1"]
    assert len(c1) == 3 and all(c.verified for c in c1)
    want = sorted((cx(r["lambda"]) for r in ref["cube_root_two"]), key=lambda z: (z.real, z.imag))
    got = sorted((c.params["lambda"] for c in c1), key=lambda z: (z.real, z.imag))
    assert got == pytest.approx(want, abs=1e-12)
    for c in c1:
        lam = c.params["lambda"]
        assert c.phi == pytest.approx(lam * 1 / (1 - 2), rel=1e-12)


def test_case12_target_zero_excludes_zero_root():
    spec = OdeSpec(2, (0, 1, 1), 1, 0)
    lams = [c.params["lambda"] for c in enumerate_case12(spec) if c.case_tag == "C1"]
    assert lams == pytest.approx([-1])


def test_case3_magnitude_at_k2():
    lam = 1j / math.sqrt(18)
    spec = OdeSpec(2, (0, 7 / (18 * lam), 1), 0, 1)
    cands = enumerate_case3(spec)
    assert cands and all(c.verified for c in cands)
    for c in cands:
        assert abs(c.params["lambda"]) == pytest.approx(math.sqrt(1 / 18), rel=1e-12)
        assert c.phi == pytest.approx(c.params["lambda"])
        assert c.params["d0"] == c.params["lambda"]


def test_case3_general_a0(ref):
    spec = spec_of(ref, "case3")
    cands = enumerate_case3(spec)
    hit = [c for c in cands if abs(c.params["lambda"] - cx(ref["case3"]["lambda"])) < 1e-10]
    assert len(hit) == 3 and all(c.verified for c in hit)
    assert hit[0].phi == pytest.approx(cx(ref["case3"]["phi"]), rel=1e-12)


def test_case3_includes_first_order_square():
    cands = enumerate_case3(OdeSpec(1, (0, 1), 0, 1))
    f = es.power(es.add(es.exp_term(1, 0.25), es.const(-1)), 2)
    assert any(c.f == f and c.verified and c.phi == 0.25 for c in cands)


def test_case3_guards():
    assert enumerate_case3(OdeSpec(3, (0.2, 0, 0, 1), 0, 1)) == []
    assert enumerate_case3(OdeSpec(2, (0, 0.4, 1), 0.5, 1)) == []
    assert enumerate_case3(OdeSpec(2, (0.1, 0.4, 1), 0, 1)) == []   # filter fails


def test_case4_reference(ref):
    spec = spec_of(ref, "case4")
    cands = enumerate_case4(spec)
    assert len(cands) == 2 and all(c.verified for c in cands)
    for c in cands:
        assert c.phi == pytest.approx(cx(ref["case4"]["phi"]), rel=1e-12)
        assert c.params["c"] == pytest.approx(cx(ref["case4"]["c_closed"]), rel=1e-12)
        assert c.params["c0"] == 1
        assert c.params["c1"] ** 2 == pytest.approx(spec.b - spec.a)


def test_case4_guards_and_filter():
    assert enumerate_case4(OdeSpec(2, (0.3, 0.2, 1), 0, 1)) == []
    assert enumerate_case4(OdeSpec(2, (1, 0.2, 1), 1, 2)) == []
    assert enumerate_case4(OdeSpec(2, (0, 0, 1), 1, 2)) == []
    assert enumerate_case4(OdeSpec(2, (0.5, 0, 1), 1, 0.5)) == []   # b = a a0
    assert enumerate_case4(OdeSpec(2, (0.3, 0.2, 1), 1, 2)) == []   # filter fails


@given(unit_disk(), unit_disk(), unit_disk())
@settings(max_examples=50, deadline=None)
def test_case4_first_order_candidates_verify(a0, a, b):
    assume(abs(a0) > 1e-3 and abs(1 - a0) > 1e-3 and abs(a) > 1e-3 and abs(a - b) > 0.1)
    assume(abs(b - a * a0) > 1e-3)
    for c in enumerate_case4(OdeSpec(1, (a0, 1), a, b)):
        assert c.verified


def test_case5_reference(ref):
    spec = spec_of(ref, "case5")
    cands = enumerate_case5(spec)
    assert cands and all(c.verified for c in cands)
    r = ref["case5"]
    hit = [c for c in cands if c.params["m"] == 1 and abs(c.params["c2"] - cx(r["c2"])) < 1e-9]
    assert len(hit) == 1
    c = hit[0]
    assert c.params["lambda1"] == pytest.approx(cx(r["lambda1"]), abs=1e-12)
    assert c.params["lambda2"] == pytest.approx(cx(r["lambda2"]), abs=1e-12)
    assert c.phi == pytest.approx(cx(r["phi"]), rel=1e-12)
    for c in cands:
        m, k = c.params["m"], spec.k
        assert c.params["lambda1"] / c.params["lambda2"] == pytest.approx((m - k) / m, rel=1e-12)


def test_case5_coupling_branch_finds_a_translate(ref):
    cands = enumerate_case5(spec_of(ref, "case5"))
    assert any("coupling" in c.note for c in cands)


def test_case5_guards():
    assert enumerate_case5(OdeSpec(2, (0.2, 0.3, 1), 1, 2)) == []   # 2m = k
    assert enumerate_case5(OdeSpec(3, (0.2, 0, 0, 1), 1, 2)) == []
    assert enumerate_case5(OdeSpec(3, (0.2, 0.1, 0.3, 1), 0, 2)) == []


def test_case6():
    (c,) = enumerate_case6(OdeSpec(2, (0, 0, 1), 2, 3))
    assert c.f == cosh2 and c.phi == 0 and c.verified
    (c,) = enumerate_case6(OdeSpec(2, (0, 0, 1), 4, 3))
    assert c.f == es.make([(1, 1, 0), (4, -1, 0)]) and c.verified
    assert abs(c.params["c0"] * c.params["c1"] - 4) <= 1e-12 * 4
    assert all(x.f != cosh2 for x in classify(OdeSpec(2, (0, 0, 1), 4, 3)))
    assert enumerate_case6(OdeSpec(2, (0, 0.1, 1), 2, 3)) == []
    assert enumerate_case6(OdeSpec(2, (0, 0, 1), 0, 3)) == []


def test_characteristic_roots():
    assert characteristic_roots(OdeSpec(2, (0, 0, 1), 0, 1)) == pytest.approx([-1, 1])
    roots = characteristic_roots(OdeSpec(3, (0, 0, 0, 1), 0, 1))
    assert len(roots) == 3 and all(abs(r ** 3 - 1) <= 1e-10 for r in roots)


def test_homogeneous_branches():
    # a0 = 1: zero root dropped, shift a
    cands = homogeneous_solutions(OdeSpec(2, (1, 3, 1), 2, 5))
    assert [c.params["lambda"] for c in cands] == pytest.approx([-3])
    assert cands[0].f == es.make([(1, -3, 0), (2, 0, 0)]) and cands[0].verified
    # a = 0: pure exponentials
    cands = homogeneous_solutions(OdeSpec(2, (0.5, 1, 1), 0, 5))
    assert len(cands) == 2 and all(c.verified for c in cands)
    # pure second derivative with a != 0
    (c,) = homogeneous_solutions(OdeSpec(2, (0, 0, 1), 3, 1))
    assert c.params["c1"] == pytest.approx(9 / 4) and c.verified


def test_homogeneous_progression(ref):
    spec = spec_of(ref, "hom_progression")
    hits = [c for c in homogeneous_solutions(spec) if "c1" in c.params]
    assert len(hits) == 2 and all(c.verified for c in hits)
    for c in hits:
        assert c.params["c1"] ** 2 == pytest.approx(cx(ref["hom_progression"]["c1_squared"]))
        assert c.params["lambda"] == pytest.approx(cx(ref["hom_progression"]["lambda"]))


def test_homogeneous_two_exponentials(ref):
    spec = spec_of(ref, "hom_two_exp")
    r = ref["hom_two_exp"]
    hits = [c for c in homogeneous_solutions(spec) if c.params.get("m") == 1]
    assert len(hits) == 2 and all(c.verified for c in hits)
    for c in hits:
        assert c.params["lambda1"] == pytest.approx(cx(r["lambda1"]))
        assert c.params["c2"] ** 2 == pytest.approx(cx(r["c2_squared"]))


def test_no_family_applies():
    assert classify(OdeSpec(1, (1, 1), 0.3, 0.7)) == []


def test_spec_phi_filters():
    cands = classify(OdeSpec(1, (0, 1), 1, 2, phi=-2))
    assert {c.case_tag for c in cands} == {"C1", "C2"}


def test_candidate_json():
    (c,) = enumerate_case6(OdeSpec(2, (0, 0, 1), 2, 3))
    js = c.to_json()
    assert js["case_tag"] == "C6" and js["verified"] is True
    assert js["params"]["c1"] == [1.0, 0.0] and js["phi"] == [0.0, 0.0]
    assert es.from_json(js["f"]) == c.f


@st.composite
def random_specs(draw):
    k = draw(st.integers(1, 4))
    coeffs = tuple(draw(unit_disk()) for _ in range(k)) + (1,)
    a = draw(unit_disk())
    b = draw(unit_disk())
    assume(abs(a - b) >= 0.1)
    return OdeSpec(k, coeffs, a, b)


@given(random_specs())
@settings(max_examples=60, deadline=None)
def test_case12_duality(spec):
    swapped = OdeSpec(spec.k, spec.a_coeffs, spec.b, spec.a)
    one = sorted((c.params["lambda"] for c in enumerate_case12(spec) if c.case_tag == "C1"),
                 key=lambda z: (round(z.real, 6), round(z.imag, 6)))
    two = sorted((c.params["lambda"] for c in enumerate_case12(swapped) if c.case_tag == "C2"),
                 key=lambda z: (round(z.real, 6), round(z.imag, 6)))
    assert len(one) == len(two)
    for x, y in zip(one, two):
        assert abs(x - y) <= 1e-8 * (1 + abs(x))


@given(random_specs())
@settings(max_examples=60, deadline=None)
def test_constraints_dedup_and_soundness(spec):
    cands = classify(spec)
    for c in cands:
        if c.verified:
            assert verify(spec, c.f, c.phi, 1e-8).passed
        res = dict(c.constraint_residuals)
        for name in ("symbol", "lambda_pow", "c_pow", "c0c1", "ratio"):
            if name in res:
                assert res[name] <= 1e-8
    for i in range(len(cands)):
        for j in range(i):
            p, q = cands[i], cands[j]
            if p.case_tag == q.case_tag and p.params.keys() == q.params.keys():
                assert any(abs(p.params[n] - q.params[n]) > PARAM_TOL * (1 + abs(p.params[n]))
                           for n in p.params)


def test_output_order_is_deterministic():
    spec = OdeSpec(3, (0.2, -0.4j, 0.1, 1), 1, 2)
    first = [c.to_json() for c in classify(spec)]
    assert first == [c.to_json() for c in classify(spec)]
    order = ["C1", "C2", "C3", "C4", "C5", "C6", "HOM"]
    tags = [order.index(c["case_tag"]) for c in first]
    assert tags == sorted(tags)
