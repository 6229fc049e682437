"""Named reference cases with known closed-form answers.

Each check returns ``(passed, details)``; :func:`run_all` collects them into
table rows for the ``regress`` command.
"""
import cmath
import math

from . import expsum as es
from .classify import characteristic_roots, classify
from .ode import OdeSpec, verify
from .oracle import Rect, check_multiplicity

TOL = 1e-8


def _close(x, y, tol=TOL):
    return abs(x - y) <= tol * (1 + abs(y))


def _find(cands, tag, **params):
    for c in cands:
        if c.case_tag != tag or not c.verified:
            continue
        if all(name in c.params and _close(c.params[name], v) for name, v in params.items()):
            return c
    return None


def exponential_pair():
    """k = 1, L f = f', a = 1, b = 2:  1 + A e^{2z}  and  2 + A e^{-z}, phi = -2."""
    spec = OdeSpec(1, (0, 1), 1, 2)
    cands = classify(spec)
    c1 = _find(cands, "C1", **{"lambda": 2})
    c2 = _find(cands, "C2", **{"lambda": -1})
    ok = bool(c1 and c2 and _close(c1.phi, -2) and _close(c2.phi, -2))
    return ok, {"found_C1": c1 is not None, "found_C2": c2 is not None}


def squared_quarter():
    """k = 1, a = 0, b = 1:  (e^{z/4} - 1)^2  with phi = 1/4."""
    spec = OdeSpec(1, (0, 1), 0, 1)
    f = es.power(es.add(es.exp_term(1, 0.25), es.const(-1)), 2)
    rep = verify(spec, f, 0.25)
    found = _find(classify(spec), "C3", **{"lambda": 0.25, "d1": -1}) is not None
    return rep.passed and found, {"residual_norm": rep.residual_norm, "classified": found}


def cube_root_two():
    """k = 3, L f = f''', a = 1, b = 2: lam^3 = 2, phi = a lam/(a - b)."""
    spec = OdeSpec(3, (0, 0, 0, 1), 1, 2)
    hits = [c for c in classify(spec) if c.case_tag == "C1" and c.verified]
    ok = len(hits) == 3
    for c in hits:
        lam = c.params["lambda"]
        ok &= abs(lam ** 3 - 2) <= TOL and _close(c.phi, lam / (1 - 2))
    return ok, {"roots": len(hits)}


def cube_root_minus_one():
    """k = 3, a = 1, b = 2: (a - b) lam^3 = a  for A e^{lam z} + b."""
    spec = OdeSpec(3, (0, 0, 0, 1), 1, 2)
    hits = [c for c in classify(spec) if c.case_tag == "C2" and c.verified]
    ok = len(hits) == 3
    for c in hits:
        lam = c.params["lambda"]
        ok &= abs((1 - 2) * lam ** 3 - 1) <= TOL and _close(c.phi, 2 * lam)
    return ok, {"roots": len(hits)}


def cosh_pair(a=2, b=5):
    """k = 2, L f = f'':  c0 e^z + c1 e^{-z}  with  4 c0 c1 = a^2, phi = 0."""
    spec = OdeSpec(2, (0, 0, 1), a, b)
    c = _find(classify(spec), "C6")
    ok = c is not None and abs(c.params["c0"] * c.params["c1"] - a * a / 4) <= 1e-12 * abs(a * a)
    return ok, {"found": c is not None}


def first_order_kernel():
    """f = f':  A e^z."""
    spec = OdeSpec(1, (0, 1), 1, 3)
    c = _find(classify(spec), "HOM", **{"lambda": 1})
    return c is not None, {"found": c is not None}


def second_order_kernel():
    """f = f'':  e^{+-z} when a = 0, c0 c1 = a^2/4 otherwise."""
    zero = OdeSpec(2, (0, 0, 1), 0, 1)
    lams = sorted((c.params["lambda"] for c in classify(zero)
                   if c.case_tag == "HOM" and c.verified), key=lambda z: z.real)
    ok_zero = len(lams) == 2 and _close(lams[0], -1) and _close(lams[1], 1)
    pair = _find(classify(OdeSpec(2, (0, 0, 1), 3, 1)), "HOM", c0=1, c1=9 / 4)
    return ok_zero and pair is not None, {"roots": len(lams), "pair": pair is not None}


def third_order_kernel():
    """f = f''' with a = 0:  A e^{lam z}, lam^3 = 1."""
    spec = OdeSpec(3, (0, 0, 0, 1), 0, 1)
    hits = [c for c in classify(spec) if c.case_tag == "HOM" and c.verified]
    ok = len(hits) == 3 and all(abs(c.params["lambda"] ** 3 - 1) <= 1e-10 for c in hits)
    roots = characteristic_roots(spec)
    ok &= all(abs(r ** 3 - 1) <= 1e-10 for r in roots)
    return ok, {"roots": len(hits)}


def double_cosh_counterexample():
    """L f = f'''' - f''' - f'' + f' + f, a = 4, f = e^z + e^{-z}, phi = 0.

    The residual vanishes, but f - 4 has simple zeros, so the multiplicity
    hypothesis fails; the classifier must not list this f.
    """
    spec = OdeSpec(4, (1, 1, -1, -1, 1), 4, 1)
    f = es.make([(1, 1, 0), (1, -1, 0)])
    rep = verify(spec, f, 0)
    mult = check_multiplicity(spec, f, Rect.from_bounds(-2, -2, 2, 2))
    listed = any(c.f == f for c in classify(spec))
    return rep.passed and not mult and not listed, {
        "residual_pass": rep.passed, "multiplicity_ok": mult, "classified": listed}


CHECKS = [
    ("D1 exponential pair", exponential_pair),
    ("D2 squared quarter", squared_quarter),
    ("E1 cube root of two", cube_root_two),
    ("E2 cube root of minus one", cube_root_minus_one),
    ("E4 cosh pair", cosh_pair),
    ("L1 first order kernel", first_order_kernel),
    ("L2 second order kernel", second_order_kernel),
    ("L3 third order kernel", third_order_kernel),
    ("T6 cosh pair k=2", lambda: cosh_pair(3, 1)),
    ("EX double cosh counterexample", double_cosh_counterexample),
]


def run_all():
    rows = []
    for name, check in CHECKS:
        ok, details = check()
        rows.append({"name": name, "pass": bool(ok), "details": details})
    return rows
