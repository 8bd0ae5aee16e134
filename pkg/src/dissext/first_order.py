"""Maximal dissipative extensions of ``A = i d/dx + i gamma/x`` on ``L^2(0, 1)``.

``A`` acts on ``H^1_0(0, 1)``; its imaginary part is multiplication by
``gamma/x``.  A one-dimensional extension ``f + c v -> A f + c l`` is
dissipative iff ``v`` passes :func:`wstar_domain_test` and

    Im<v, l> >= 1/4 int_0^1 |sqrt(x/g) l - i (sqrt(x/g) v)' + i (2g+1)/(2 sqrt(g x)) v|^2,

and every such extension is maximal because ``ker(A* - i)`` is spanned by
``x^g e^x``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConditionFailed, DomainViolation, NotInWStarDomain
from .funcspace import (FuncExpr, KEY_TOL, NonIntegrableSingularity,
                        differentiate, endpoint_exponent, inner_product,
                        integrate_abs2, quadrature_graded)

UNIT = (0.0, 1.0)
BOUNDARY_RTOL = 1e-9

DISSIPATIVE = "dissipative"
NOT_DISSIPATIVE = "not_dissipative"
BOUNDARY = "boundary"


def _check_gamma(gamma):
    if not (gamma > 0 and math.isfinite(gamma)):
        raise ValueError(f"gamma must be a positive number, got {gamma!r}")


def _vanishes_at_zero(f):
    lead, _ = endpoint_exponent(f, 0)
    return lead > KEY_TOL


def _derivative_l2(f):
    lead, _ = endpoint_exponent(differentiate(f), 0)
    return lead > -0.5 + KEY_TOL


def in_h10(f):
    """Membership in ``H^1_0(0, 1)`` by exponent analysis."""
    if f.is_zero:
        return True
    return (_vanishes_at_zero(f) and abs(f.value_at(1.0)) <= KEY_TOL
            and _derivative_l2(f))


@dataclass(frozen=True)
class WStarMembership:
    in_domain: bool
    c: complex
    h_H10_ok: bool
    diagnostics: dict = field(default_factory=dict)


def wstar_domain_test(v, gamma):
    """Is ``sqrt(x) v`` in ``H^1_0 + span{x^(g+1/2)}``?

    The coefficient of ``x^(g+1/2)`` is forced to ``v(1)``; the remainder
    ``h = sqrt(x) v - v(1) x^(g+1/2)`` is then tested for ``h(0+) = 0`` and
    ``h' in L^2``.
    """
    _check_gamma(gamma)
    diag = {}
    bad = v.l2_violations()
    if bad:
        diag["l2"] = bad
        return WStarMembership(False, 0j, False, diag)
    c = v.value_at(1.0)
    h = v.times_power(0.5) - c * FuncExpr.power(gamma + 0.5, interval=v.interval)
    lead_h, _ = endpoint_exponent(h, 0)
    lead_dh, _ = endpoint_exponent(differentiate(h), 0)
    diag.update(leading_power_h=lead_h, leading_power_dh=lead_dh,
                h_at_1=abs(h.value_at(1.0)), h_is_zero=h.is_zero)
    ok = h.is_zero or (lead_h > KEY_TOL and lead_dh > -0.5 + KEY_TOL)
    return WStarMembership(ok, c, ok, diag)


def wstar_part(v, gamma):
    """``-i (sqrt(x/g) v)' + i (2g+1)/(2 sqrt(g x)) v``, i.e. ``-W* v``."""
    s = 1.0 / math.sqrt(gamma)
    d = differentiate(v.times_power(0.5) * s)
    k = (2 * gamma + 1) / (2 * math.sqrt(gamma))
    return -1j * d + 1j * k * v.times_power(-0.5)


def condition_pieces(v, ell, gamma):
    """The three summands of the integrand, kept separate."""
    s = 1.0 / math.sqrt(gamma)
    p1 = ell.times_power(0.5) * s
    p2 = -1j * differentiate(v.times_power(0.5) * s)
    p3 = 1j * (2 * gamma + 1) / (2 * math.sqrt(gamma)) * v.times_power(-0.5)
    return p1, p2, p3


@dataclass(frozen=True)
class DissipativityReport:
    lhs: float
    rhs: float
    margin: float
    decision: str
    tolerance: float
    c: complex
    method: str

    def to_dict(self):
        return dict(lhs=self.lhs, rhs=self.rhs, margin=self.margin, decision=self.decision,
                    tolerance=self.tolerance, c=[self.c.real, self.c.imag], method=self.method)


def _rhs_quadrature(pieces, gamma):
    p1, p2, p3 = pieces
    lead, _ = endpoint_exponent(p1 + p2 + p3, 0)
    s = 2 * gamma - 1
    if math.isfinite(lead):
        s = min(s, 2 * lead)
    if s <= -1 + KEY_TOL:
        raise NonIntegrableSingularity(f"integrand ~ x^{s:g} at 0")
    fn = lambda x: np.abs(p1(x) + p2(x) + p3(x)) ** 2
    return 0.25 * float(quadrature_graded(fn, UNIT, s).real)


def dissipativity_check(v, ell, gamma, method="closed"):
    """Both sides of the dissipativity condition for the extension ``(v, l)``.

    ``method="closed"`` integrates the merged expression termwise;
    ``"quadrature"`` evaluates the three summands numerically and integrates
    on a mesh graded towards 0.
    """
    _check_gamma(gamma)
    if v.interval != UNIT or ell.interval != UNIT:
        raise DomainViolation("v and l must live on (0, 1)")
    mem = wstar_domain_test(v, gamma)
    if not mem.in_domain:
        raise NotInWStarDomain(f"v not in dom(W*): {mem.diagnostics}")
    if in_h10(v):
        raise DomainViolation("v lies in H^1_0(0,1), the domain of A itself")
    bad = ell.l2_violations()
    if bad:
        raise DomainViolation("l not in L^2: " + "; ".join(bad))
    lhs = float(inner_product(v, ell).imag)
    pieces = condition_pieces(v, ell, gamma)
    if method == "closed":
        rhs = 0.25 * integrate_abs2(pieces[0] + pieces[1] + pieces[2])
    elif method == "quadrature":
        rhs = _rhs_quadrature(pieces, gamma)
    else:
        raise ValueError(f"unknown method {method!r}")
    margin = lhs - rhs
    # both sides are quadratic in (v, l); the norms set the absolute floor
    norms = integrate_abs2(v) + (0.0 if ell.is_zero else integrate_abs2(ell))
    band = BOUNDARY_RTOL * max(abs(lhs), abs(rhs), norms)
    if abs(margin) <= band:
        decision = BOUNDARY
    else:
        decision = DISSIPATIVE if margin > 0 else NOT_DISSIPATIVE
    return DissipativityReport(lhs, rhs, margin, decision, band, mem.c, method)


def build_extension(v, ell, gamma):
    """Descriptor of the maximal dissipative extension ``A_{v,l}``."""
    rep = dissipativity_check(v, ell, gamma)
    if rep.decision == NOT_DISSIPATIVE:
        raise ConditionFailed(f"condition fails: lhs {rep.lhs:.6g} < rhs {rep.rhs:.6g}")
    return {
        "operator": "i d/dx + i gamma/x on L^2(0,1)",
        "gamma": gamma,
        "domain": "H^1_0(0,1) + span{v}",
        "action": "f + c v -> A f + c l",
        "v": v.to_json(),
        "l": ell.to_json(),
        "boundary": rep.decision == BOUNDARY,
        "report": rep.to_dict(),
        "maximality": {"codim": 1, "defect_dimension": 1,
                       "kernel": "x^gamma e^x spans ker(A* - i)"},
    }


def adjoint_apply(k, gamma):
    """Formal adjoint ``i k' - i gamma k / x``."""
    return 1j * differentiate(k) - 1j * gamma * k.times_power(-1.0)


def defect_kernel(gamma):
    _check_gamma(gamma)
    return FuncExpr.power(gamma, beta=1.0, interval=UNIT)


def defect_residual(gamma):
    """``(A* - i) k`` for the kernel vector; identically zero."""
    k = defect_kernel(gamma)
    return adjoint_apply(k, gamma) - 1j * k


def bisect_threshold(v, w, gamma, lo, hi, rtol=1e-12, method="closed"):
    """Sign change of the margin along ``l = c w`` inside ``[lo, hi]``.

    The margin must be strictly nonzero, with opposite signs, at both ends.
    """
    def margin(c):
        return dissipativity_check(v, c * w, gamma, method).margin

    mlo, mhi = margin(lo), margin(hi)
    if not mlo * mhi < 0:
        raise ValueError("no strict sign change in the bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        mm = margin(mid)
        if (mm > 0) == (mlo > 0):
            lo, mlo = mid, mm
        else:
            hi = mid
        if hi - lo <= rtol * max(abs(lo), abs(hi), 1e-300):
            break
    return 0.5 * (lo + hi)


def scan_rows(gammas, coefficients, v=None, direction=None, method="closed"):
    """Rows ``(gamma, c, lhs, rhs, margin, decision, message)`` for ``l = c * direction``.

    Defaults: ``v = x^gamma`` and ``direction = i x^gamma`` for each gamma.
    """
    rows = []
    for g in gammas:
        vv = v if v is not None else FuncExpr.power(g)
        ww = direction if direction is not None else FuncExpr.power(g, 1j)
        for c in coefficients:
            try:
                r = dissipativity_check(vv, c * ww, g, method)
                rows.append((g, c, r.lhs, r.rhs, r.margin, r.decision, ""))
            except (DomainViolation, NonIntegrableSingularity, ValueError) as exc:
                rows.append((g, c, math.nan, math.nan, math.nan, "error", str(exc)))
    return rows
