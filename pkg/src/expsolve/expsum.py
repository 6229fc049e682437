"""Exponential polynomials  sum_j p_j(z) * exp(mu_j z)  in canonical form.

Every value is kept canonical: frequencies are pairwise distinct (up to a
merge tolerance), terms are sorted by ``(Re mu, Im mu)``, and no term has a
zero coefficient polynomial.  The zero function has no terms.

All arithmetic funnels through :func:`make`, which sums every coefficient
with :func:`math.fsum`.  Sums are therefore independent of the order the
contributions arrive in, which makes ``add``/``mul`` commutative bit for bit.
"""
import cmath
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import InvalidInput, NumericalFailure
from .numerics import as_complex, cx_to_json, poly_eval

FREQ_TOL = 1e-9
DROP_REL = 1e-12
MAX_DEGREE = 64
MAX_TERMS = 4096


@dataclass(frozen=True)
class ExpTerm:
    freq: complex
    poly: Tuple[complex, ...]

    @property
    def degree(self):
        return len(self.poly) - 1


@dataclass(frozen=True)
class ExpSum:
    terms: Tuple[ExpTerm, ...] = ()

    # arithmetic sugar; the module functions are the real implementation
    def __add__(self, other):
        return add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, scale(_coerce(other), -1))

    def __rsub__(self, other):
        return add(_coerce(other), scale(self, -1))

    def __neg__(self):
        return scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, ExpSum):
            return mul(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __pow__(self, n):
        return power(self, n)

    def __call__(self, z):
        return evaluate(self, z)

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "ExpSum(0)"
        return f"ExpSum({to_string(self)})"

    @property
    def frequencies(self):
        return [t.freq for t in self.terms]

    def coeff(self, freq, degree=0):
        """Coefficient of ``z**degree * exp(freq z)``, 0 when absent."""
        tol = FREQ_TOL * (1 + max([abs(freq)] + [abs(t.freq) for t in self.terms]))
        for t in self.terms:
            if abs(t.freq - freq) <= tol:
                return t.poly[degree] if degree < len(t.poly) else 0j
        return 0j


ZERO = ExpSum()


def _coerce(x):
    if isinstance(x, ExpSum):
        return x
    return const(x)


def make(parts):
    """Canonical ExpSum equal to  sum coeff * z**degree * exp(freq z).

    ``parts`` is an iterable of ``(coeff, freq, degree)``.  Frequencies
    within ``1e-9 * (1 + max|freq|)`` of each other are merged.  A merged
    coefficient is dropped when it is no larger than ``1e-12`` times the
    largest contribution that produced it (cancellation residue) or the
    largest coefficient of its polynomial.
    """
    cleaned = []
    for coeff, freq, degree in parts:
        if degree < 0 or int(degree) != degree:
            raise InvalidInput(f"degree must be a nonnegative integer, got {degree!r}")
        coeff = complex(coeff)
        if coeff == 0:
            continue
        cleaned.append((coeff, complex(freq), int(degree)))
    if not cleaned:
        return ZERO
    tol = FREQ_TOL * (1 + max(abs(f) for _, f, _ in cleaned))

    # cluster frequencies; representatives are created in sorted order, so a
    # backwards scan can stop once Re drops out of range
    reps = []
    index = {}
    for f in sorted({f for _, f, _ in cleaned}, key=lambda f: (f.real, f.imag)):
        hit = None
        for j in range(len(reps) - 1, -1, -1):
            if reps[j].real < f.real - tol:
                break
            if abs(reps[j] - f) <= tol:
                hit = j
                break
        if hit is None:
            reps.append(f)
            hit = len(reps) - 1
        index[f] = hit

    buckets = {}
    for coeff, f, d in cleaned:
        re, im, big = buckets.setdefault((index[f], d), ([], [], [0.0]))
        re.append(coeff.real)
        im.append(coeff.imag)
        big[0] = max(big[0], abs(coeff))

    polys = {}
    for (j, d), (re, im, big) in buckets.items():
        c = complex(math.fsum(re), math.fsum(im))
        if abs(c) <= DROP_REL * big[0]:
            continue
        polys.setdefault(j, {})[d] = c

    terms = []
    for j, coeffs in polys.items():
        sup = max(abs(c) for c in coeffs.values())
        coeffs = {d: c for d, c in coeffs.items() if abs(c) > DROP_REL * sup}
        deg = max(coeffs)
        if deg > MAX_DEGREE:
            raise NumericalFailure(f"ExpSum degree {deg} exceeds cap {MAX_DEGREE}")
        terms.append(ExpTerm(reps[j], tuple(coeffs.get(d, 0j) for d in range(deg + 1))))
    if len(terms) > MAX_TERMS:
        raise NumericalFailure(f"ExpSum term count {len(terms)} exceeds cap {MAX_TERMS}")
    terms.sort(key=lambda t: (t.freq.real, t.freq.imag))
    return ExpSum(tuple(terms))


def flatten(f):
    """Inverse of :func:`make`: the ``(coeff, freq, degree)`` parts of ``f``."""
    return [(c, t.freq, d) for t in f.terms for d, c in enumerate(t.poly) if c != 0]


def const(c):
    return make([(as_complex(c), 0j, 0)])


def exp_term(coeff, freq, degree=0):
    """The single term  coeff * z**degree * exp(freq z)."""
    return make([(as_complex(coeff), as_complex(freq), degree)])


def scale(f, s):
    s = complex(s)
    return make((s * c, mu, d) for c, mu, d in flatten(f))


def add(f, g):
    return make(flatten(f) + flatten(g))


def mul(f, g):
    parts = []
    for s in f.terms:
        for t in g.terms:
            mu = s.freq + t.freq
            for i, p in enumerate(s.poly):
                if p == 0:
                    continue
                for j, q in enumerate(t.poly):
                    if q != 0:
                        parts.append((p * q, mu, i + j))
    return make(parts)


def power(f, n):
    """``f**n`` by repeated squaring; ``power(f, 0)`` is the constant 1."""
    if int(n) != n or n < 0:
        raise InvalidInput(f"power: exponent must be a nonnegative integer, got {n!r}")
    n = int(n)
    result = const(1)
    base = f
    while n:
        if n & 1:
            result = mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


def _derivative_once(f):
    parts = []
    for t in f.terms:
        for i, c in enumerate(t.poly):
            parts.append((t.freq * c, t.freq, i))
            if i:
                parts.append((i * c, t.freq, i - 1))
    return make(parts)


def derivative(f, n=1):
    """n-th derivative, using d/dz[p e^{mu z}] = (p' + mu p) e^{mu z}."""
    if int(n) != n or n < 0:
        raise InvalidInput(f"derivative order must be a nonnegative integer, got {n!r}")
    for _ in range(int(n)):
        f = _derivative_once(f)
    return f


def sup_scale(f):
    """Largest coefficient magnitude in ``f``; 1 for the zero function."""
    if not f.terms:
        return 1.0
    return max(abs(c) for t in f.terms for c in t.poly)


def max_coeff(f):
    """Largest coefficient magnitude in ``f``; 0 for the zero function."""
    return max((abs(c) for t in f.terms for c in t.poly), default=0.0)


def is_zero(f, scale=1.0, eps_rel=1e-8):
    if scale <= 0:
        raise InvalidInput("is_zero: scale must be positive")
    return max_coeff(f) <= eps_rel * scale + 1e-12


def is_constant(f):
    return all(t.freq == 0 and len(t.poly) == 1 for t in f.terms)


def evaluate(f, z):
    """Value of ``f`` at a point; overflow raises :class:`NumericalFailure`."""
    z = complex(z)
    total = 0j
    try:
        for t in f.terms:
            total += poly_eval(t.poly, z) * cmath.exp(t.freq * z)
    except OverflowError as exc:
        raise NumericalFailure("evaluate: overflow", z=[z.real, z.imag]) from exc
    if not (math.isfinite(total.real) and math.isfinite(total.imag)):
        raise NumericalFailure("evaluate: non-finite value", z=[z.real, z.imag])
    return total


def evaluate_many(f, zs):
    """Vectorised :func:`evaluate`; non-finite entries are left as ``nan``."""
    zs = np.asarray(zs, dtype=complex)
    out = np.zeros(zs.shape, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        for t in f.terms:
            p = np.zeros(zs.shape, dtype=complex)
            for c in reversed(t.poly):
                p = p * zs + c
            out += p * np.exp(t.freq * zs)
    out[~np.isfinite(out)] = np.nan
    return out


def to_json(f):
    return {"terms": [{"freq": cx_to_json(t.freq), "poly": [cx_to_json(c) for c in t.poly]}
                      for t in f.terms]}


def from_json(obj):
    if not isinstance(obj, dict) or not isinstance(obj.get("terms"), list):
        raise InvalidInput('ExpSum JSON must be an object with a "terms" list')
    parts = []
    for term in obj["terms"]:
        try:
            freq = as_complex(term["freq"])
            poly = term["poly"]
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed ExpSum term: {term!r}") from exc
        if not isinstance(poly, list):
            raise InvalidInput(f"malformed ExpSum term: {term!r}")
        parts.extend((as_complex(c), freq, d) for d, c in enumerate(poly))
    return make(parts)


def _fmt(c):
    if c.imag == 0:
        return f"{c.real:.6g}"
    return f"({c.real:.6g}{c.imag:+.6g}j)"


def to_string(f):
    out = []
    for t in f.terms:
        poly = " + ".join(f"{_fmt(c)}*z^{d}" if d else _fmt(c)
                          for d, c in enumerate(t.poly) if c != 0)
        if t.freq == 0:
            out.append(f"[{poly}]")
        else:
            out.append(f"[{poly}]*exp({_fmt(t.freq)}*z)")
    return " + ".join(out)
