"""The equation  f'(f - L f) - phi (f - a)(f - b) = 0  over exponential polynomials.

``L`` is the constant-coefficient operator  L f = sum_i a_i f^(i)  with a
monic top coefficient.  ``phi`` is always a constant here.
"""
from dataclasses import dataclass, field
from typing import Optional, Tuple

from . import expsum as es
from .errors import InvalidInput
from .numerics import as_complex, cx_to_json

DEFAULT_EPS_REL = 1e-8


@dataclass(frozen=True)
class OdeSpec:
    """Order ``k``, coefficients ``a_0..a_k`` (``a_k == 1``), targets ``a != b``."""

    k: int
    a_coeffs: Tuple[complex, ...]
    a: complex
    b: complex
    phi: Optional[complex] = None

    def __post_init__(self):
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 1:
            raise InvalidInput(f"k must be a positive integer, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))
        coeffs = tuple(as_complex(c) for c in self.a_coeffs)
        if len(coeffs) != self.k + 1:
            raise InvalidInput(f"need k+1={self.k + 1} coefficients, got {len(coeffs)}")
        if coeffs[-1] != 1:
            raise InvalidInput(f"leading coefficient a_k must be exactly 1, got {coeffs[-1]}")
        object.__setattr__(self, "a_coeffs", coeffs)
        object.__setattr__(self, "a", as_complex(self.a))
        object.__setattr__(self, "b", as_complex(self.b))
        if self.a == self.b:
            raise InvalidInput("targets a and b must differ")
        if self.phi is not None:
            object.__setattr__(self, "phi", as_complex(self.phi))

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict):
            raise InvalidInput("OdeSpec JSON must be an object")
        missing = {"k", "a_coeffs", "a", "b"} - set(obj)
        if missing:
            raise InvalidInput(f"OdeSpec JSON missing keys: {sorted(missing)}")
        phi = obj.get("phi")
        if phi is not None and not isinstance(phi, (list, tuple)):
            # anything but a constant [re, im] pair is refused
            raise InvalidInput("phi must be a constant [re, im] pair or null")
        if not isinstance(obj["a_coeffs"], list):
            raise InvalidInput("a_coeffs must be a list of [re, im] pairs")
        return cls(k=obj["k"], a_coeffs=tuple(obj["a_coeffs"]), a=obj["a"], b=obj["b"], phi=phi)

    def to_json(self):
        return {
            "k": self.k,
            "a_coeffs": [cx_to_json(c) for c in self.a_coeffs],
            "a": cx_to_json(self.a),
            "b": cx_to_json(self.b),
            "phi": None if self.phi is None else cx_to_json(self.phi),
        }

    def symbol(self, lam):
        """The operator's symbol  sum_i a_i lam^i,  i.e. L applied to exp(lam z)."""
        acc = 0j
        for c in reversed(self.a_coeffs):
            acc = acc * lam + c
        return acc


@dataclass(frozen=True)
class VerifyReport:
    residual_norm: float
    scale: float
    tolerance: float
    passed: bool
    residual: es.ExpSum = field(repr=False)
    phi: complex = 0j
    phi_inferred: bool = False

    def to_json(self):
        return {
            "pass": self.passed,
            "residual_norm": self.residual_norm,
            "scale": self.scale,
            "tolerance": self.tolerance,
            "phi": cx_to_json(self.phi),
            "phi_inferred": self.phi_inferred,
            "residual": es.to_json(self.residual),
        }


def apply_L(spec, f):
    parts = []
    d = f
    for i, c in enumerate(spec.a_coeffs):
        if i:
            d = es.derivative(d, 1)
        if c != 0:
            parts.extend((c * coeff, mu, deg) for coeff, mu, deg in es.flatten(d))
    return es.make(parts)


def products(spec, f):
    """The two products of the equation: f'(f - L f) and (f - a)(f - b)."""
    lhs = es.mul(es.derivative(f, 1), es.add(f, es.scale(apply_L(spec, f), -1)))
    rhs = es.mul(es.add(f, es.const(-spec.a)), es.add(f, es.const(-spec.b)))
    return lhs, rhs


def residual_scale(lhs, rhs):
    """Reference magnitude for relative zero tests of the residual."""
    return max(es.sup_scale(lhs), es.sup_scale(rhs))


def residual(spec, f, phi):
    lhs, rhs = products(spec, f)
    return es.add(lhs, es.scale(rhs, -as_complex(phi)))


def infer_phi(spec, f, eps_rel=DEFAULT_EPS_REL):
    """The constant ``phi`` making the residual vanish, or ``None``.

    ``phi`` is read off the largest coefficient of (f - a)(f - b) and then
    checked against every other coefficient.
    """
    lhs, rhs = products(spec, f)
    scale = residual_scale(lhs, rhs)
    if es.is_zero(rhs, scale, eps_rel):
        return None
    best = max(((abs(c), t.freq, d, c) for t in rhs.terms for d, c in enumerate(t.poly)),
               key=lambda item: item[0])
    _, freq, deg, c = best
    phi = lhs.coeff(freq, deg) / c
    res = es.add(lhs, es.scale(rhs, -phi))
    if not es.is_zero(res, scale, eps_rel):
        return None
    return phi


def verify(spec, f, phi=None, eps_rel=DEFAULT_EPS_REL):
    """Check the residual identity coefficient-wise.

    With ``phi=None`` the spec's ``phi`` is used, and failing that the value
    from :func:`infer_phi` (0 when no constant fits).
    """
    inferred = False
    if phi is None:
        phi = spec.phi
    if phi is None:
        phi = infer_phi(spec, f, eps_rel)
        inferred = True
        if phi is None:
            phi = 0j
    phi = as_complex(phi)
    lhs, rhs = products(spec, f)
    scale = residual_scale(lhs, rhs)
    res = es.add(lhs, es.scale(rhs, -phi))
    norm = es.max_coeff(res)
    return VerifyReport(
        residual_norm=norm,
        scale=scale,
        tolerance=eps_rel,
        passed=es.is_zero(res, scale, eps_rel),
        residual=res,
        phi=phi,
        phi_inferred=inferred,
    )
