"""Enumerate the solution families of  f'(f - L f) = phi (f - a)(f - b).

Each ``enumerate_*`` function solves the constraint equations of one family,
builds the candidate functions as :class:`~expsolve.expsum.ExpSum` values and
runs :func:`~expsolve.ode.verify` on them.  Necessary conditions select
candidates; the residual check alone decides ``verified``.

Family tags::

    C1   A e^{lz} + a                      C4   (c0 e^{lz} + c1)^k + a
    C2   A e^{lz} + b                      C5   (c1 e^{l1 z} + c2 e^{l2 z})^k + a
    C3   ((d0/l) e^{lz} + d1)^(k+1) + a    C6   c0 e^z + c1 e^{-z}
    HOM  solutions of f = L f  (phi = 0)

Free constants (A, c0, d0, c1 in C5) get fixed representative values; the
values used are recorded in ``params``.
"""
import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from . import expsum as es
from .numerics import as_complex, cluster_roots, cx_to_json, nth_roots, poly_roots
from .ode import DEFAULT_EPS_REL, infer_phi, verify

log = logging.getLogger(__name__)

CASE_ORDER = ("C1", "C2", "C3", "C4", "C5", "C6", "HOM")
TOL_CONSTRAINT = 1e-8
PARAM_TOL = 1e-8
ZERO_TOL = 1e-12


@dataclass
class SolutionCandidate:
    case_tag: str
    params: Dict[str, complex]
    f: es.ExpSum
    phi: complex
    constraint_residuals: List[Tuple[str, float]] = field(default_factory=list)
    verified: bool = False
    residual_norm: float = math.nan
    scale: float = math.nan
    note: str = ""

    def to_json(self):
        params = {}
        for name, value in self.params.items():
            params[name] = value if isinstance(value, int) else cx_to_json(value)
        return {
            "case_tag": self.case_tag,
            "params": params,
            "phi": cx_to_json(self.phi),
            "verified": self.verified,
            "residual_norm": self.residual_norm,
            "scale": self.scale,
            "constraint_residuals": [[name, value] for name, value in self.constraint_residuals],
            "note": self.note,
            "f": es.to_json(self.f),
        }


def _zero(x):
    return abs(x) <= ZERO_TOL


def _rel(value, scale):
    return abs(value) / max(abs(scale), 1e-300)


def _symbol_scale(spec, lam):
    return sum(abs(c) * abs(lam) ** i for i, c in enumerate(spec.a_coeffs))


def _candidate(spec, tag, params, f, phi, constraints, eps_rel, note=""):
    rep = verify(spec, f, phi, eps_rel)
    return SolutionCandidate(
        case_tag=tag, params=params, f=f, phi=complex(phi),
        constraint_residuals=constraints, verified=rep.passed,
        residual_norm=rep.residual_norm, scale=rep.scale, note=note)


def characteristic_roots(spec):
    """Roots of  lam^k + a_{k-1} lam^{k-1} + ... + a_1 lam + (a_0 - 1)."""
    coeffs = list(spec.a_coeffs)
    coeffs[0] -= 1
    return poly_roots(coeffs)


def _distinct_nonzero(roots):
    return [r for r, _ in cluster_roots(roots) if abs(r) > 1e-9]


def enumerate_case12(spec, eps_rel=DEFAULT_EPS_REL):
    """Single exponentials  A e^{lam z} + base  with base in {a, b}, A = 1."""
    a, b, a0 = spec.a, spec.b, spec.a_coeffs[0]
    out = []
    for tag, base, other in (("C1", a, b), ("C2", b, a)):
        target = (other - base * a0) / (other - base)
        coeffs = list(spec.a_coeffs)
        coeffs[0] -= target
        for lam in _distinct_nonzero(poly_roots(coeffs)):
            f = es.make([(1, lam, 0), (base, 0, 0)])
            phi = infer_phi(spec, f, eps_rel)
            if phi is None:
                phi = lam * base * (1 - a0) / (base - other)
            constraints = [("symbol", _rel(spec.symbol(lam) - target, _symbol_scale(spec, lam) + abs(target)))]
            out.append(_candidate(spec, tag, {"A": 1 + 0j, "lambda": lam}, f, phi, constraints, eps_rel))
    return out


def enumerate_case3(spec, eps_rel=DEFAULT_EPS_REL):
    """f = ((d0/lam) e^{lam z} + d1)^(k+1) + a  with  d1^(k+1) = b - a, d0 = lam.

    Coefficient matching forces a = 0, phi = lam (1 - a0),
    lam^k = (-1)^(k+1) (1 - a0) / ((k+1) (k+1)!)  and
    L-symbol((k+1) lam) = 1 - (1 - a0)/(k+1).  For a0 = 0 these reduce to
    phi = lam and the familiar lam^k = (-1)^(k+1) / ((k+1)(k+1)!).
    """
    k, a, b = spec.k, spec.a, spec.b
    a0 = spec.a_coeffs[0]
    if k >= 2 and all(_zero(c) for c in spec.a_coeffs[1:k]):
        log.info("case 3 skipped: (a_1..a_{k-1}) is the zero vector")
        return []
    if not _zero(a):
        log.info("case 3 skipped: requires a = 0")
        return []
    if _zero(1 - a0):
        log.info("case 3 skipped: a_0 = 1 forces phi = 0")
        return []
    rhs = (-1) ** (k + 1) * (1 - a0) / ((k + 1) * math.factorial(k + 1))
    target = 1 - (1 - a0) / (k + 1)
    out = []
    for lam in nth_roots(rhs, k):
        x = (k + 1) * lam
        scale = _symbol_scale(spec, x) + abs(target)
        filt = _rel(spec.symbol(x) - target, scale)
        if filt > TOL_CONSTRAINT:
            continue
        constraints = [
            ("lambda_pow", _rel(lam ** k - rhs, rhs)),
            ("symbol_filter", filt),
            # the unnormalised form  sum a_i ((k+1) lam)^i = k, for reference
            ("symbol_filter_eq_k", _rel(spec.symbol(x) - k, _symbol_scale(spec, x) + k)),
        ]
        d0 = lam
        for d1 in nth_roots(b - a, k + 1):
            g = es.make([(d0 / lam, lam, 0), (d1, 0, 0)])
            f = es.add(es.power(g, k + 1), es.const(a))
            params = {"lambda": lam, "d0": d0, "d1": d1}
            cons = constraints + [("d1_pow", _rel(d1 ** (k + 1) - (b - a), b - a))]
            out.append(_candidate(spec, "C3", params, f, lam * (1 - a0), cons, eps_rel))
    return out


def enumerate_case4(spec, eps_rel=DEFAULT_EPS_REL):
    """f = (c0 e^{lam z} + c1)^k + a  with  c1^k = b - a, c0 = 1.

    ``c`` runs over the k-th roots of (-1)^k a(1-a0)(b-a a0)^k / (k! (b-a)^(k+1))
    and lam = (b-a) c / (b - a a0).  The constant phi that makes the residual
    vanish is lam (1 - a0) b / (b - a), which equals c only when a0 = 0; that
    value is used for phi and recorded as param ``phi``.
    """
    k, a, b = spec.k, spec.a, spec.b
    a0 = spec.a_coeffs[0]
    reason = None
    if _zero(a):
        reason = "a = 0"
    elif _zero(1 - a0):
        reason = "a_0 = 1"
    elif all(_zero(c) for c in spec.a_coeffs[:k]):
        reason = "(a_0..a_{k-1}) is the zero vector"
    elif _zero(b - a * a0):
        reason = "b = a a_0"
    if reason:
        log.info("case 4 skipped: %s", reason)
        return []
    rhs = (-1) ** k * a * (1 - a0) * (b - a * a0) ** k / (math.factorial(k) * (b - a) ** (k + 1))
    out = []
    for c in nth_roots(rhs, k):
        lam = (b - a) * c / (b - a * a0)
        phi = lam * (1 - a0) * b / (b - a)
        x = k * lam
        value = x - x * spec.symbol(x) - phi
        filt = _rel(value, abs(x) * (1 + _symbol_scale(spec, x)) + abs(phi))
        if filt > TOL_CONSTRAINT:
            continue
        constraints = [("c_pow", _rel(c ** k - rhs, rhs)), ("leading_filter", filt)]
        for c1 in nth_roots(b - a, k):
            g = es.make([(1, lam, 0), (c1, 0, 0)])
            f = es.add(es.power(g, k), es.const(a))
            params = {"c": c, "lambda": lam, "c0": 1 + 0j, "c1": c1, "phi": phi}
            out.append(_candidate(spec, "C4", params, f, phi, constraints, eps_rel))
    return out


def _solve_quadratic(q2, q1, q0):
    scale = max(abs(q2), abs(q1), abs(q0))
    if scale == 0:
        return []
    if abs(q2) <= 1e-14 * scale:
        return [] if abs(q1) <= 1e-14 * scale else [-q0 / q1]
    disc = cmath.sqrt(q1 * q1 - 4 * q2 * q0)
    # stable form avoids cancellation in the smaller root
    s = -q1 - disc if abs(-q1 - disc) >= abs(-q1 + disc) else -q1 + disc
    r1 = s / (2 * q2)
    r2 = (2 * q0) / s if s != 0 else r1
    return [r1, r2]


def case5_quadratics(spec, m):
    """Coefficients (q2, q1, q0) in phi of the three quadratic conditions.

    Returns a dict keyed ``i``, ``ii``, ``iii``; ``iii*`` is the variant of
    the last one with (1 - a0)^2 in the a_{k-2} term.
    """
    k, a, b = spec.k, spec.a, spec.b
    a0, ak1, ak2 = spec.a_coeffs[0], spec.a_coeffs[k - 1], spec.a_coeffs[k - 2]
    q = 4 * m * (m - k) / (2 * m - k) ** 2
    ba = b - a
    w = 1 - a0
    out = {}
    out["i"] = (
        (q - 2 * k * k + 2 * k) * ba ** 2,
        -k * (2 * q + k ** 3 - 2 * k * k + 3 * k + 2) * a * ba * ak1,
        k * k * (k * q + k ** 3 - 2 * k * k + 3 * k + 2) * a * a * w * ak1 ** 2
        - k ** 3 * (k + 1) ** 2 * a * a * w ** 2 * ak2,
    )
    out["ii"] = (
        (q + k * (k + 1) * (k * k + k + 2)) * ba ** 2,
        -k * (2 * q + 2 * k * (k + 1)) * a * ba * ak1,
        q * k ** 3 * a * a * w ** 2 * ak1 ** 2,
    )
    tail = k * k * (k * q + k ** 3 - 2 * k * k + 3 * k - 2) * a * a * w * ak1 ** 2 + 2 * k * (k + 1) * a * ba * ak1
    out["iii"] = (
        4 * (q / 4 - k * k - 1) * ba ** 2,
        -k * (2 * q + k ** 3 - 6 * k * k + 5 * k - 4) * a * ba * ak1,
        tail - k ** 3 * (k + 1) ** 2 * a * a * w * ak2,
    )
    out["iii*"] = out["iii"][:2] + (tail - k ** 3 * (k + 1) ** 2 * a * a * w ** 2 * ak2,)
    return out


def _coupling_c2(spec, lam1, lam2, c1, branch_bound, max_iter=60):
    """Solve  lam1 Log X(c2) - lam2 Log Y = 2 pi i n  for c2 by complex Newton.

    X(c2) = a(1-a0) / (k! c2^k (lam2-lam1)^k),  Y = a(1-a0) / (k! c1^k (lam1-lam2)^k),
    principal logarithms, n in [-branch_bound, branch_bound].  Returns
    ``[(c2, n, |F|)]`` for converged branches.
    """
    k = spec.k
    K = spec.a * (1 - spec.a_coeffs[0]) / math.factorial(k)
    log_y = cmath.log(K / (c1 ** k * (lam1 - lam2) ** k))
    found = []
    for n in range(-branch_bound, branch_bound + 1):
        shift = 2j * math.pi * n

        def F(c2):
            return lam1 * cmath.log(K / (c2 ** k * (lam2 - lam1) ** k)) - lam2 * log_y - shift

        target = (lam2 * log_y + shift) / lam1
        try:
            seeds = nth_roots(K / ((lam2 - lam1) ** k * cmath.exp(target)), k)
        except (OverflowError, ZeroDivisionError):
            log.info("case 5: coupling seed out of range on branch n=%d", n)
            continue
        for seed in seeds:
            c2 = seed
            ok = False
            try:
                for _ in range(max_iter):
                    val = F(c2)
                    if abs(val) <= 1e-12 * (1 + abs(lam2 * log_y) + abs(shift)):
                        ok = True
                        break
                    c2 = c2 - val / (-k * lam1 / c2)
                    if c2 == 0 or not cmath.isfinite(c2):
                        break
            except (OverflowError, ZeroDivisionError, ValueError):
                ok = False
            if ok:
                found.append((c2, n, abs(F(c2))))
            else:
                log.info("case 5: coupling Newton did not converge on branch n=%d", n)
    return found


def enumerate_case5(spec, c1_default=1, branch_bound=3, eps_rel=DEFAULT_EPS_REL):
    """f = (c1 e^{lam1 z} + c2 e^{lam2 z})^k + a  with phi = c.

    For each admissible m, ``c`` comes from two sources: the roots of the
    quadratic conditions (:func:`case5_quadratics`), and the closed form
    obtained by evaluating g'(z)^k at a zero of g and g^k at a critical
    point of g,

        (k mu)^k = (-1)^m a(1-a0) k^k / (k! (b-a) m^m (k-m)^(k-m)),
        lam2 = m mu,  lam1 = (m-k) mu.

    ``c2`` likewise comes from the logarithmic coupling relation and from
    c1^m c2^(k-m) = (b-a) m^m (k-m)^(k-m) / k^k.  Only candidates that pass
    verification are returned.
    """
    k, a, b = spec.k, spec.a, spec.b
    a0 = spec.a_coeffs[0]
    if k < 2:
        return []
    ak1, ak2 = spec.a_coeffs[k - 1], spec.a_coeffs[k - 2]
    if _zero(a) or _zero(1 - a0) or (_zero(ak1) and _zero(ak2)):
        log.info("case 5 skipped: guard a != 0, a_0 != 1, (a_{k-2}, a_{k-1}) != 0 failed")
        return []
    c1 = as_complex(c1_default)
    K = a * (1 - a0)
    out = []
    for m in range(1, k):
        if 2 * m == k:
            log.info("case 5: m=%d skipped, 2m = k makes the exponent formulas singular", m)
            continue
        D = k * k * (k + 1) * (2 * m - k) * K
        quads = case5_quadratics(spec, m)
        sources = []
        for name, (q2, q1, q0) in quads.items():
            sources.extend((c, "quadratic " + name) for c in _solve_quadratic(q2, q1, q0))
        mu_pow = (-1) ** m * K * k ** k / (math.factorial(k) * (b - a) * m ** m * (k - m) ** (k - m))
        for kmu in nth_roots(mu_pow, k):
            mu = kmu / k
            sources.append(((mu * D + 2 * k * K * ak1) / (2 * (b - a)), "closed form"))
        P = (b - a) * m ** m * (k - m) ** (k - m) / k ** k
        for c, source in sources:
            if abs(c) <= 1e-12:
                continue
            N = 2 * (b - a) * c - 2 * k * K * ak1
            lam1, lam2 = (m - k) * N / D, m * N / D
            if abs(lam1) <= 1e-12 or abs(lam2) <= 1e-12:
                continue
            # the extreme frequencies 2k lam1, 2k lam2 of the residual come
            # from one product each, so  k lam (1 - symbol(k lam)) = c  is
            # necessary whatever c2 is; a loose screen before verification
            edges = []
            for lam in (lam1, lam2):
                x = k * lam
                edges.append(_rel(x - x * spec.symbol(x) - c,
                                  abs(x) * (1 + _symbol_scale(spec, x)) + abs(c)))
            if max(edges) > 1e-6:
                continue
            quad_res = [("quadratic_" + name, _rel(q2 * c * c + q1 * c + q0,
                                                   abs(q2 * c * c) + abs(q1 * c) + abs(q0)))
                        for name, (q2, q1, q0) in quads.items()]
            c2s = [(c2, "coupling n=%d" % n, res) for c2, n, res in
                   _coupling_c2(spec, lam1, lam2, c1, branch_bound)]
            c2s += [(c2, "critical-value product", None) for c2 in nth_roots(P / c1 ** m, k - m)]
            seen = []
            for c2, how, coupling_res in c2s:
                if any(abs(c2 - s) <= PARAM_TOL * (1 + abs(s)) for s in seen):
                    continue
                seen.append(c2)
                g = es.make([(c1, lam1, 0), (c2, lam2, 0)])
                f = es.add(es.power(g, k), es.const(a))
                params = {"m": m, "c": c, "lambda1": lam1, "lambda2": lam2, "c1": c1, "c2": c2}
                cons = quad_res + [
                    ("edge_lambda1", edges[0]),
                    ("edge_lambda2", edges[1]),
                    ("ratio", _rel(lam1 / lam2 - (m - k) / m, (k - m) / m)),
                    ("product", _rel(c1 ** m * c2 ** (k - m) - P, P)),
                ]
                if coupling_res is not None:
                    cons.append(("coupling", coupling_res))
                cand = _candidate(spec, "C5", params, f, c, cons, eps_rel,
                                  note=f"phi from {source}; c2 from {how}")
                if cand.verified:
                    out.append(cand)
    return out


def enumerate_case6(spec, eps_rel=DEFAULT_EPS_REL):
    """k = 2, L f = f'':  f = c0 e^z + c1 e^{-z}  with c0 c1 = a^2/4, phi = 0."""
    if spec.k != 2 or not all(_zero(c) for c in spec.a_coeffs[:2]) or _zero(spec.a):
        return []
    c0 = 1 + 0j
    c1 = spec.a ** 2 / 4
    f = es.make([(c0, 1, 0), (c1, -1, 0)])
    cons = [("c0c1", _rel(c0 * c1 - spec.a ** 2 / 4, spec.a ** 2 / 4))]
    return [_candidate(spec, "C6", {"c0": c0, "c1": c1}, f, 0j, cons, eps_rel)]


def homogeneous_solutions(spec, eps_rel=DEFAULT_EPS_REL):
    """Solutions with phi = 0, i.e. f = L f, following the zero-multiplicity
    structure of f - a.

    * pure k-th derivative (a_0..a_{k-1} all 0): A e^{z} for k = 1; for k >= 2
      A e^{lam z} with lam^k = 1 when a = 0, and for k = 2, a != 0 the pair
      c0 e^z + c1 e^{-z} with c0 c1 = a^2/4;
    * a_0 = 1: A e^{lam z} + a over the nonzero characteristic roots;
    * a = 0: A e^{lam z} over the characteristic roots;
    * otherwise A e^{lam z} + a, plus (c0 e^{lam z} + c1)^k + a with
      lam = -2 a_{k-1}/(k(k+1)), c1^k = -a, and the two-exponential
      (c1 e^{lam1 z} + c2 e^{lam2 z})^k + a with lam1/lam2 = (m-k)/m and
      C(k,m) c1^m c2^(k-m) = -a.
    """
    k, a = spec.k, spec.a
    a0 = spec.a_coeffs[0]
    out = []

    def single(lam, shift, note=""):
        f = es.make([(1, lam, 0), (shift, 0, 0)])
        cons = [("characteristic", _rel(spec.symbol(lam) - 1, _symbol_scale(spec, lam) + 1))]
        out.append(_candidate(spec, "HOM", {"A": 1 + 0j, "lambda": lam}, f, 0j, cons, eps_rel, note))

    roots = characteristic_roots(spec)
    nonzero = _distinct_nonzero(roots)
    if all(_zero(c) for c in spec.a_coeffs[:k]):
        if k == 1:
            single(1 + 0j, 0j, "f = A e^z")
        elif _zero(a):
            for lam in nonzero:
                single(lam, 0j, "lam^k = 1, a = 0")
        elif k == 2:
            c1 = a * a / 4
            f = es.make([(1, 1, 0), (c1, -1, 0)])
            cons = [("c0c1", _rel(c1 - a * a / 4, a * a / 4))]
            out.append(_candidate(spec, "HOM", {"c0": 1 + 0j, "c1": c1}, f, 0j, cons, eps_rel,
                                  "c0 e^z + c1 e^{-z}, c0 c1 = a^2/4"))
        return out
    if _zero(1 - a0):
        for lam in nonzero:
            single(lam, a, "a_0 = 1, f - a zero-free")
        return out
    if _zero(a):
        for lam in nonzero:
            single(lam, 0j, "a = 0, f zero-free")
        return out
    for lam in nonzero:
        single(lam, a, "f - a zero-free")
    ak1 = spec.a_coeffs[k - 1]
    if _zero(ak1):
        return out
    lam = -2 * ak1 / (k * (k + 1))
    chi_scale = lambda x: _symbol_scale(spec, x) + 1
    filt = max(_rel(spec.symbol(j * lam) - 1, chi_scale(j * lam)) for j in range(1, k + 1))
    if filt <= TOL_CONSTRAINT:
        for c1 in nth_roots(-a, k):
            f = es.add(es.power(es.make([(1, lam, 0), (c1, 0, 0)]), k), es.const(a))
            out.append(_candidate(spec, "HOM", {"lambda": lam, "c0": 1 + 0j, "c1": c1}, f, 0j,
                                  [("progression_filter", filt)], eps_rel,
                                  "(c0 e^{lam z} + c1)^k + a"))
    for m in range(1, k):
        if 2 * m == k:
            continue
        mu = -2 * ak1 / (k * (k + 1) * (2 * m - k))
        freqs = [k * n * mu for n in range(m - k, m + 1) if n]
        filt = max(_rel(spec.symbol(x) - 1, chi_scale(x)) for x in freqs)
        if filt > TOL_CONSTRAINT:
            continue
        lam1, lam2 = (m - k) * mu, m * mu
        for c2 in nth_roots(-a / math.comb(k, m), k - m):
            g = es.make([(1, lam1, 0), (c2, lam2, 0)])
            f = es.add(es.power(g, k), es.const(a))
            params = {"m": m, "lambda1": lam1, "lambda2": lam2, "c1": 1 + 0j, "c2": c2}
            out.append(_candidate(spec, "HOM", params, f, 0j, [("progression_filter", filt)],
                                  eps_rel, "(c1 e^{lam1 z} + c2 e^{lam2 z})^k + a"))
    return out


def _same(p, q):
    if p.case_tag != q.case_tag or p.params.keys() != q.params.keys():
        return False
    for name, x in p.params.items():
        y = q.params[name]
        if abs(x - y) > PARAM_TOL * (1 + abs(x)):
            return False
    return True


def _sort_key(cand):
    key = [CASE_ORDER.index(cand.case_tag)]
    for name in sorted(cand.params):
        v = complex(cand.params[name])
        key.extend((round(v.real, 9), round(v.imag, 9)))
    return tuple(key)


def classify(spec, eps_rel=DEFAULT_EPS_REL, c1_default=1, branch_bound=3):
    """All candidates from every family, deduplicated and sorted.

    When ``spec.phi`` is given, only candidates with that phi are kept.
    """
    cands = []
    cands += enumerate_case12(spec, eps_rel)
    cands += enumerate_case3(spec, eps_rel)
    cands += enumerate_case4(spec, eps_rel)
    cands += enumerate_case5(spec, c1_default, branch_bound, eps_rel)
    cands += enumerate_case6(spec, eps_rel)
    cands += homogeneous_solutions(spec, eps_rel)
    if spec.phi is not None:
        cands = [c for c in cands if abs(c.phi - spec.phi) <= PARAM_TOL * (1 + abs(spec.phi))]
    unique = []
    for c in cands:
        if not any(_same(c, u) for u in unique):
            unique.append(c)
    unique.sort(key=_sort_key)
    return unique
