"""Numerical cross-checks that never touch the symbolic derivative of the
residual: pointwise sampling with finite differences, and zero counting by
the argument principle.
"""
import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from . import expsum as es
from .errors import InvalidInput, NumericalFailure
from .numerics import as_complex, cx_to_json

FD_STEP = 1e-5
CAUCHY_RADIUS = 0.25
CAUCHY_NODES = 64
GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class Rect:
    lo: complex
    hi: complex

    def __post_init__(self):
        lo, hi = as_complex(self.lo), as_complex(self.hi)
        if not (lo.real < hi.real and lo.imag < hi.imag):
            raise InvalidInput(f"degenerate rectangle {lo} .. {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_bounds(cls, x0, y0, x1, y1):
        return cls(complex(x0, y0), complex(x1, y1))

    def contains(self, z):
        return self.lo.real < z.real < self.hi.real and self.lo.imag < z.imag < self.hi.imag

    def boundary_distance(self, z):
        d = min(z.real - self.lo.real, self.hi.real - z.real,
                z.imag - self.lo.imag, self.hi.imag - z.imag)
        if d >= 0:
            return d
        dx = max(self.lo.real - z.real, 0.0, z.real - self.hi.real)
        dy = max(self.lo.imag - z.imag, 0.0, z.imag - self.hi.imag)
        return math.hypot(dx, dy)

    def grown(self, delta):
        return Rect(self.lo - complex(delta, delta), self.hi + complex(delta, delta))

    def corners(self):
        lo, hi = self.lo, self.hi
        return [lo, complex(hi.real, lo.imag), hi, complex(lo.real, hi.imag)]

    def to_json(self):
        return [self.lo.real, self.lo.imag, self.hi.real, self.hi.imag]


@dataclass
class ZeroReport:
    rect: Rect
    total_count: int
    winding: float
    zeros: List[Tuple[complex, int]] = field(default_factory=list)
    perturbations: int = 0

    def to_json(self):
        return {
            "rect": self.rect.to_json(),
            "total_count": self.total_count,
            "winding": self.winding,
            "perturbations": self.perturbations,
            "zeros": [{"z": cx_to_json(z), "multiplicity": m} for z, m in self.zeros],
        }


# --- pointwise sampling -------------------------------------------------

def _first_derivative(func, z, h=FD_STEP):
    def central(step):
        return (func(z + step) - func(z - step)) / (2 * step)
    # one Richardson step: O(h^2) -> O(h^4)
    return (4 * central(h / 2) - central(h)) / 3


def _cauchy_derivatives(func, z, n, r=CAUCHY_RADIUS, nodes=CAUCHY_NODES):
    """f^(1..n) at the points ``z`` from samples on circles around them: the
    periodic trapezoid rule on the Cauchy integral.  Central differences
    lose ~h^-n to rounding at high order; these stay accurate for entire
    functions of moderate growth.  Returns an array of shape (n, len(z)).
    """
    w = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    vals = func(z[:, None] + r * w[None, :])
    out = []
    for j in range(1, n + 1):
        out.append(math.factorial(j) * np.mean(vals * w ** (-j), axis=1) / r ** j)
    return np.array(out)


def _pointwise_parts(spec, f, zs):
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    func = lambda x: es.evaluate_many(f, x)
    fz = func(zs)
    d1 = _first_derivative(func, zs)
    derivs = [fz, d1]
    if spec.k >= 2:
        derivs.extend(_cauchy_derivatives(func, zs, spec.k)[1:])
    Lf = sum(c * d for c, d in zip(spec.a_coeffs, derivs))
    return fz, d1, Lf


def pointwise_residual(spec, f, phi, zs):
    """f'(f - L f) - phi (f - a)(f - b) at the points ``zs`` using only
    evaluations of ``f``; ``nan`` where evaluation overflowed."""
    fz, d1, Lf = _pointwise_parts(spec, f, zs)
    return d1 * (fz - Lf) - phi * (fz - spec.a) * (fz - spec.b)


def sample_points(n_points, seed):
    """Seeded, uniformly distributed points of the unit disk."""
    rng = np.random.default_rng(seed)
    radius = np.sqrt(rng.uniform(0, 1, n_points))
    angle = rng.uniform(0, 2 * np.pi, n_points)
    return radius * np.exp(1j * angle)


@dataclass(frozen=True)
class SampleReport:
    residual: float      # largest |residual| over the usable points
    local_scale: float   # largest |f'| max(|f|, |L f|) or |f - a||f - b| there
    skipped: int


def sample_report(spec, f, phi, n_points=32, seed=0):
    """Pointwise residual and the size of the terms it is made of.

    ``local_scale`` is what rounding error is proportional to: for a
    solution with e^{10 z} in it the products reach ~1e9 in the unit disk
    whatever its coefficients are.
    """
    if n_points < 1:
        raise InvalidInput("n_points must be positive")
    phi = as_complex(phi)
    with np.errstate(all="ignore"):
        fz, d1, Lf = _pointwise_parts(spec, f, sample_points(n_points, seed))
        res = np.abs(d1 * (fz - Lf) - phi * (fz - spec.a) * (fz - spec.b))
        size = np.maximum(np.abs(d1) * np.maximum(np.abs(fz), np.abs(Lf)),
                          np.abs((fz - spec.a) * (fz - spec.b)))
    ok = np.isfinite(res) & np.isfinite(size)
    skipped = int(n_points - ok.sum())
    if skipped * 2 > n_points:
        raise NumericalFailure("sample_residual: too many points overflowed",
                               skipped=skipped, n_points=n_points)
    if not ok.any():
        return SampleReport(0.0, 0.0, skipped)
    return SampleReport(float(res[ok].max()), float(size[ok].max()), skipped)


def sample_residual(spec, f, phi, n_points=32, seed=0):
    """Largest pointwise residual at ``n_points`` seeded points of the unit disk.

    Derivatives come from evaluations of ``f`` only.  Points where evaluation
    overflows are skipped; more than half skipped is a failure.
    """
    return sample_report(spec, f, phi, n_points, seed).residual


# --- argument principle -------------------------------------------------

def _log_derivative(f, df, zs):
    return es.evaluate_many(df, zs) / es.evaluate_many(f, zs)


def _segment_integral(f, df, a, b):
    mid, half = (a + b) / 2, (b - a) / 2
    zs = mid + half * GL_NODES
    vals = _log_derivative(f, df, zs)
    return half * np.dot(GL_WEIGHTS, vals)


def _adaptive(f, df, a, b, whole, depth, tol):
    m = (a + b) / 2
    left = _segment_integral(f, df, a, m)
    right = _segment_integral(f, df, m, b)
    if not np.isfinite(left + right):
        raise NumericalFailure("argument principle: f vanishes on the contour")
    if abs(left + right - whole) <= tol:
        return left + right
    if depth == 0:
        raise NumericalFailure("argument principle: bisection depth exhausted",
                               segment=[cx_to_json(a), cx_to_json(b)])
    return (_adaptive(f, df, a, m, left, depth - 1, tol / 2)
            + _adaptive(f, df, m, b, right, depth - 1, tol / 2))


def contour_winding(f, rect, df=None, pieces=8, tol=1e-10, depth=40):
    """(1/2 pi i) times the integral of f'/f around ``rect``, unrounded."""
    if df is None:
        df = es.derivative(f)
    corners = rect.corners()
    total = 0j
    for i in range(4):
        a, b = corners[i], corners[(i + 1) % 4]
        for j in range(pieces):
            s = a + (b - a) * j / pieces
            e = a + (b - a) * (j + 1) / pieces
            whole = _segment_integral(f, df, s, e)
            if not np.isfinite(whole):
                raise NumericalFailure("argument principle: f vanishes on the contour")
            total += _adaptive(f, df, s, e, whole, depth, tol)
    return total / (2j * math.pi)


def circle_winding(f, df, center, radius, nodes=128):
    """Winding number of f around a small circle (periodic trapezoid rule)."""
    w = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    zs = center + radius * w
    vals = _log_derivative(f, df, zs) * radius * w
    return complex(np.mean(vals))


def _newton_cloud(f, rect, spacing, iters=80):
    """Converged points of the multiplicity-insensitive iteration z -= u/u',
    u = f/f', started on a grid covering ``rect``."""
    df = es.derivative(f)
    ddf = es.derivative(df)
    nx = max(2, int(math.ceil((rect.hi.real - rect.lo.real) / spacing)) + 1)
    ny = max(2, int(math.ceil((rect.hi.imag - rect.lo.imag) / spacing)) + 1)
    xs = np.linspace(rect.lo.real, rect.hi.real, nx)
    ys = np.linspace(rect.lo.imag, rect.hi.imag, ny)
    z = (xs[None, :] + 1j * ys[:, None]).ravel()
    active = np.arange(z.size)
    done = np.zeros(z.shape, dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(iters):
            if not active.size:
                break
            za = z[active]
            fz = es.evaluate_many(f, za)
            d1 = es.evaluate_many(df, za)
            d2 = es.evaluate_many(ddf, za)
            denom = d1 * d1 - fz * d2
            step = np.where(fz == 0, 0, fz * d1 / denom)
            bad = ~np.isfinite(step)
            z[active] = za - np.where(bad, 0, step)
            conv = ~bad & (np.abs(step) <= 1e-14 * (1 + np.abs(za)))
            # points wandering far away are abandoned
            lost = bad | (np.abs(step) > 10)
            done[active[conv]] = True
            active = active[~(conv | lost)]
        if active.size:
            za = z[active]
            fz = es.evaluate_many(f, za)
            d1 = es.evaluate_many(df, za)
            d2 = es.evaluate_many(ddf, za)
            step = fz * d1 / (d1 * d1 - fz * d2)
            done[active[np.abs(step) <= 1e-9 * (1 + np.abs(za))]] = True
    ok = done
    # the iteration also stops at critical points; keep only true zeros
    with np.errstate(all="ignore"):
        small = np.abs(es.evaluate_many(f, z)) <= 1e-8 * _magnitude(f, z)
    return [complex(x) for x in z[ok & small]], df


def _magnitude(f, zs):
    """Sum of the moduli of the terms of f: the size rounding scales with."""
    zs = np.asarray(zs, dtype=complex)
    out = np.zeros(zs.shape)
    for t in f.terms:
        p = np.zeros(zs.shape)
        for c in reversed(t.poly):
            p = p * np.abs(zs) + abs(c)
        out += p * np.exp((t.freq * zs).real)
    return out


def _locate(f, rect, spacing, merge=1e-7):
    # search a slightly larger box so zeros near the edge are seen
    margin = 0.05 * max(rect.hi.real - rect.lo.real, rect.hi.imag - rect.lo.imag)
    found, df = _newton_cloud(f, rect.grown(margin), spacing)
    pts = []
    for z in found:
        if not rect.grown(margin).contains(z):
            continue
        if not any(abs(z - p) <= merge for p in pts):
            pts.append(z)
    pts.sort(key=lambda z: (z.real, z.imag))
    # a multiple zero leaves a small cloud of converged points; the winding
    # number on a circle enclosing the cloud gives the multiplicity
    groups = []
    radius = 1e-3
    for z in pts:
        for g in groups:
            if abs(z - g[0] / len(g[1])) <= radius:
                g[0] += z
                g[1].append(z)
                break
        else:
            groups.append([z, [z]])
    zeros = []
    for total, members in groups:
        center = total / len(members)
        r = radius
        others = [abs(center - t / len(m)) for t, m in groups if m is not members]
        if others:
            r = min(r, 0.25 * min(others))
        w = circle_winding(f, df, center, r)
        mult = int(round(w.real))
        if abs(w - mult) > 1e-3 or mult < 1:
            raise NumericalFailure("zero multiplicity winding not integral",
                                   z=cx_to_json(center), winding=cx_to_json(w))
        zeros.append((center, mult))
    return zeros, df


def count_zeros(f, rect, spacing=0.1, max_perturb=3, max_refine=3):
    """Zeros of ``f`` inside ``rect`` with multiplicities.

    The total comes from the argument principle; locations from grid-seeded
    Newton; multiplicities from winding numbers on small circles.  A zero
    within 1e-6 of the boundary moves the boundary outward (at most three
    times).
    """
    if not isinstance(rect, Rect):
        rect = Rect.from_bounds(*rect)
    if not f.terms:
        raise InvalidInput("count_zeros: f is identically zero")
    used = rect
    for attempt in range(max_perturb + 1):
        zeros, df = _locate(f, used, spacing)
        if all(used.boundary_distance(z) > 1e-6 for z, _ in zeros):
            break
        if attempt == max_perturb:
            raise NumericalFailure("count_zeros: zero on the boundary after perturbing",
                                   rect=used.to_json())
        delta = 1e-3 * (attempt + 1) * min(rect.hi.real - rect.lo.real, rect.hi.imag - rect.lo.imag)
        used = rect.grown(delta)
    w = contour_winding(f, used, df)
    total = int(round(w.real))
    if abs(w - total) > 1e-3:
        raise NumericalFailure("count_zeros: winding integral not near an integer",
                               winding=cx_to_json(w))
    inside = [(z, m) for z, m in zeros if used.contains(z)]
    refine = 0
    while sum(m for _, m in inside) != total and refine < max_refine:
        refine += 1
        spacing /= 2
        zeros, _ = _locate(f, used, spacing)
        inside = [(z, m) for z, m in zeros if used.contains(z)]
    if sum(m for _, m in inside) != total:
        raise NumericalFailure("count_zeros: located zeros do not match the winding count",
                               total=total, located=[[cx_to_json(z), m] for z, m in inside])
    return ZeroReport(rect=used, total_count=total, winding=float(w.real),
                      zeros=inside, perturbations=0 if used is rect else attempt)


def check_multiplicity(spec, f, rect):
    """True when every zero of f - a in ``rect`` has multiplicity >= k."""
    report = count_zeros(es.add(f, es.const(-spec.a)), rect)
    return all(m >= spec.k for _, m in report.zeros)
