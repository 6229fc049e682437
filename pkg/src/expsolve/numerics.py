"""Complex scalars, dense polynomials and polynomial root finding.

Scalars are plain Python ``complex`` values.  A polynomial is a tuple of
complex coefficients in ascending degree order; the empty tuple is the
zero polynomial.
"""
import cmath
import math

import numpy as np

from .errors import InvalidInput, NumericalFailure

EPS_COEFF_ABS = 1e-12
EPS_COEFF_REL = 1e-10
CLUSTER_TOL = 1e-6
MAX_ITER = 200


def as_complex(value):
    """Coerce a number or a ``[re, im]`` pair to a finite complex."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise InvalidInput(f"complex pair must have two entries, got {value!r}")
        z = complex(float(value[0]), float(value[1]))
    else:
        try:
            z = complex(value)
        except (TypeError, ValueError) as exc:
            raise InvalidInput(f"not a complex number: {value!r}") from exc
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InvalidInput(f"complex value must be finite, got {z!r}")
    return z


def cx_to_json(z):
    z = complex(z)
    return [z.real, z.imag]


def poly_trim(coeffs):
    """Drop leading coefficients that are negligible against the largest one."""
    coeffs = tuple(complex(c) for c in coeffs)
    if not coeffs:
        return ()
    big = max(abs(c) for c in coeffs)
    thresh = EPS_COEFF_ABS + EPS_COEFF_REL * big
    n = len(coeffs)
    while n and abs(coeffs[n - 1]) <= thresh:
        n -= 1
    return coeffs[:n]


def poly_degree(coeffs):
    return len(poly_trim(coeffs)) - 1


def poly_eval(coeffs, z):
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def poly_deriv(coeffs):
    return tuple(i * c for i, c in enumerate(coeffs) if i > 0)


def poly_from_roots(roots):
    """Monic polynomial with the given roots, ascending coefficients."""
    out = [1 + 0j]
    for r in roots:
        nxt = [0j] * (len(out) + 1)
        for i, c in enumerate(out):
            nxt[i + 1] += c
            nxt[i] -= r * c
        out = nxt
    return tuple(out)


def root_bound(coeffs, r):
    """Backward-error scale used to judge a root: sum|c| * max(1,|r|)^deg."""
    deg = len(coeffs) - 1
    return sum(abs(c) for c in coeffs) * max(1.0, abs(r)) ** deg


def _aberth(coeffs, max_iter):
    # coeffs ascending, leading coefficient nonzero, constant term nonzero
    n = len(coeffs) - 1
    lead = coeffs[-1]
    desc = np.array(coeffs[::-1], dtype=complex) / lead
    ddesc = np.polyder(desc)
    radius = 1.0 + max(abs(c) for c in coeffs[:-1]) / abs(lead)
    # small angular offset keeps the start circle off symmetric root sets
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    z = radius * np.exp(1j * angles)
    for it in range(1, max_iter + 1):
        p = np.polyval(desc, z)
        dp = np.polyval(ddesc, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            ratio = p / dp
            w = ratio / (1.0 - ratio * inv.sum(axis=1))
        bad = ~np.isfinite(w)
        if bad.any():
            # derivative vanished or two iterates collided: nudge and carry on
            w[bad] = 1e-3 * (1 + np.abs(z[bad])) * np.exp(1j * (it + 0.7))
        z = z - w
        if np.all(np.abs(w) <= 4e-16 * (1 + np.abs(z))) or np.all(p == 0):
            return z, it, True
    return z, max_iter, False


def _newton_polish(coeffs, r, steps=3):
    d = poly_deriv(coeffs)
    best, best_val = r, abs(poly_eval(coeffs, r))
    x = r
    for _ in range(steps):
        dv = poly_eval(d, x)
        if dv == 0:
            break
        x = x - poly_eval(coeffs, x) / dv
        val = abs(poly_eval(coeffs, x))
        if not math.isfinite(val):
            break
        if val < best_val:
            best, best_val = x, val
    return best


def poly_roots(coeffs, tol=1e-10, max_iter=MAX_ITER):
    """All roots of a polynomial, repeated according to multiplicity.

    Aberth-Ehrlich simultaneous iteration from a Cauchy-bound circle, then a
    few guarded Newton steps per root.  Each returned root ``r`` satisfies
    ``|p(r)| <= tol * sum|c| * max(1,|r|)**deg``; otherwise
    :class:`NumericalFailure` is raised.
    """
    p = poly_trim(coeffs)
    if not p:
        raise InvalidInput("poly_roots: zero polynomial")
    if len(p) < 2:
        raise InvalidInput("poly_roots: polynomial has degree 0")
    # exact zero roots split off first
    nzero = 0
    while p[nzero] == 0:
        nzero += 1
    q = p[nzero:]
    roots = [0j] * nzero
    if len(q) == 2:
        roots.append(-q[0] / q[1])
    elif len(q) > 2:
        z, iters, ok = _aberth(q, max_iter)
        roots.extend(_newton_polish(q, complex(r)) for r in z)
    for r in roots:
        if not (math.isfinite(r.real) and math.isfinite(r.imag)):
            raise NumericalFailure("poly_roots: non-finite root", coeffs=list(p))
        resid = abs(poly_eval(p, r))
        if resid > tol * root_bound(p, r):
            raise NumericalFailure(
                "poly_roots: no convergence",
                root=[r.real, r.imag], residual=resid, bound=tol * root_bound(p, r))
    return sorted(roots, key=lambda r: (r.real, r.imag))


def nth_roots(w, n):
    """The ``n`` distinct ``n``-th roots of ``w``, principal root first.

    Roots are listed counter-clockwise from the principal one.  ``w == 0``
    gives ``[0]``.
    """
    if int(n) != n or n < 1:
        raise InvalidInput(f"nth_roots: n must be a positive integer, got {n!r}")
    n = int(n)
    w = complex(w)
    if w == 0:
        return [0j]
    mod = abs(w) ** (1.0 / n)
    arg = math.atan2(w.imag, w.real)
    out = []
    for j in range(n):
        r = cmath.rect(mod, (arg + 2 * math.pi * j) / n)
        # one Newton step on z**n - w tightens the last ulp or two
        r = r - (r ** n - w) / (n * r ** (n - 1))
        out.append(r)
    return out


def cluster_roots(roots, tol=CLUSTER_TOL):
    """Group nearly equal roots: returns ``[(center, count), ...]``.

    Centers are cluster means, in the order their first member appears.
    """
    clusters = []
    for r in roots:
        for cl in clusters:
            if abs(r - cl[0] / cl[1]) <= tol * (1 + abs(r)):
                cl[0] += r
                cl[1] += 1
                break
        else:
            clusters.append([complex(r), 1])
    return [(s / c, c) for s, c in clusters]
