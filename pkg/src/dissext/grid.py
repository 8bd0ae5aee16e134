"""Discretized operators used as ground truth for the continuum checks.

Nothing here feeds back into the analytic modules: the routines only produce
numbers to compare against them.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import solveh_banded

from .errors import UnstableNullity
from .first_order import dissipativity_check
from .funcspace import FuncExpr, inner_product, integrate_abs2
from .linalg import imaginary_part

NULLITY_C = 1.0
SIGN_RESOLUTION = 1e-3


@dataclass(frozen=True)
class Mesh:
    nodes: np.ndarray
    ratio: float = 1.0

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float)
        if x.ndim != 1 or x.size < 3 or np.any(np.diff(x) <= 0):
            raise ValueError("mesh nodes must be strictly increasing, at least 3")
        object.__setattr__(self, "nodes", x)

    @property
    def interval(self):
        return float(self.nodes[0]), float(self.nodes[-1])

    @property
    def h(self):
        return float(np.max(np.diff(self.nodes)))

    def refined(self):
        x = self.nodes
        mid = 0.5 * (x[:-1] + x[1:])
        return Mesh(np.sort(np.concatenate([x, mid])), self.ratio)


def graded_mesh(n, interval=(0.0, 1.0), ratio=0.5, depth=12):
    """``n`` uniform cells with the first one split geometrically towards the left end."""
    a, b = interval
    x = np.linspace(a, b, n + 1)
    h = x[1] - x[0]
    extra = a + h * ratio ** np.arange(1, depth + 1)
    return Mesh(np.sort(np.concatenate([x, extra])), ratio)


def uniform_mesh(n, interval):
    return Mesh(np.linspace(interval[0], interval[1], n + 1))


@dataclass(frozen=True)
class DiscretizedOperator:
    """Square matrix of the minimal operator on interior nodes (orthonormal
    coordinates) plus the rectangular matrix of ``A* - i`` on the maximal
    domain, used for defect counting."""

    mesh: Mesh
    matrix: np.ndarray
    defect_matrix: np.ndarray
    boundary: str
    weights: np.ndarray
    rebuild: object = field(repr=False, compare=False)

    def refined(self):
        return self.rebuild(self.mesh.refined())


# ---------------------------------------------------------------- first order

def discretize_first_order(gamma, mesh):
    """``i d/dx + i gamma/x`` with backward differences, zero at both ends.

    With cell weights ``w_j = x_j - x_{j-1}`` the imaginary part is exactly
    ``gamma sum w_j |f_j|^2 / x_j + 1/2 sum |f_j - f_{j-1}|^2``: the
    multiplication form plus an O(h) numerical dissipation.
    """
    x = mesh.nodes
    if x[0] != 0:
        raise ValueError("first-order mesh must start at 0")
    xi = x[1:-1]
    w = np.diff(x)[:-1]                       # backward cells of interior nodes
    n = xi.size
    d = np.diag(1.0 / w) - np.diag(1.0 / w[1:], -1)
    a = 1j * d + 1j * gamma * np.diag(1.0 / xi)
    sw = np.sqrt(w)
    a_on = (sw[:, None] * a) / sw[None, :]

    # maximal adjoint i d/dx - i gamma/x on nodes x_1..x_N, forward differences
    xc = x[1:]
    wc = np.diff(x)                           # column weights
    hr = np.diff(xc)                          # forward steps, rows at x_1..x_{N-1}
    m = np.zeros((n, n + 1), dtype=complex)
    idx = np.arange(n)
    m[idx, idx] = -1j / hr - 1j * gamma / xc[:-1] - 1j
    m[idx, idx + 1] = 1j / hr
    m_on = (np.sqrt(hr)[:, None] * m) / np.sqrt(wc)[None, :]
    return DiscretizedOperator(mesh, a_on, m_on, "dirichlet at 0 and 1", w,
                               lambda ms: discretize_first_order(gamma, ms))


def first_order_form(dop, f):
    """``<u, Im(A) u>`` for samples ``f`` of a function at the interior nodes."""
    u = np.sqrt(dop.weights) * f
    return float(np.real(np.vdot(u, imaginary_part(dop.matrix) @ u)))


# --------------------------------------------------------------- second order

def discretize_second_order(potential, interval, n, right="dirichlet"):
    """``-d^2/dx^2 + V`` with three-point differences on a uniform mesh.

    ``A = iS`` so ``A* - i = -i (S* + 1)``; the defect matrix is ``S* + 1`` on
    the maximal domain (no condition at the left end).  ``right`` is
    ``"dirichlet"`` for a truncated half-line (the artificial end mimics a
    limit-point endpoint) or ``"free"`` for a regular endpoint.
    """
    mesh = uniform_mesh(n, interval)
    return _second_order(potential, mesh, right)


def _second_order(potential, mesh, right):
    x = mesh.nodes
    h = x[1] - x[0]
    xi = x[1:-1]
    vi = np.asarray(potential(xi), dtype=float)
    k = xi.size
    s = (np.diag(2.0 / h ** 2 + vi) - np.diag(np.full(k - 1, 1.0 / h ** 2), 1)
         - np.diag(np.full(k - 1, 1.0 / h ** 2), -1)).astype(complex)
    a_on = 1j * s
    ncols = k + 1 if right == "dirichlet" else k + 2
    m = np.zeros((k, ncols))
    idx = np.arange(k)
    m[idx, idx] = -1.0 / h ** 2
    m[idx, idx + 1] = 2.0 / h ** 2 + vi + 1.0
    cols = idx + 2
    keep = cols < ncols
    m[idx[keep], cols[keep]] = -1.0 / h ** 2
    # uniform weights cancel between rows and columns
    return DiscretizedOperator(mesh, a_on, m.astype(complex),
                               f"free at left, {right} at right", np.full(k, h),
                               lambda ms: _second_order(potential, ms, right))


# ---------------------------------------------------------------- defect count

def nullity(dop, c=NULLITY_C):
    """``cols - #{sigma > c h}`` for the defect matrix."""
    m = dop.defect_matrix
    sv = np.linalg.svd(m, compute_uv=False)
    thresh = c * dop.mesh.h
    return int(m.shape[1] - np.count_nonzero(sv > thresh)), sv


def defect_dimension(dop, c=NULLITY_C):
    """Estimated ``dim ker(A* - i)``; must agree after one refinement."""
    n1, _ = nullity(dop, c)
    n2, _ = nullity(dop.refined(), c)
    if n1 != n2:
        raise UnstableNullity(f"nullity {n1} at h={dop.mesh.h:g} but {n2} after refinement")
    return n1


def restricted_min_singular(dop, vec):
    """Smallest singular value of the defect matrix on the complement of ``vec``."""
    q = np.asarray(vec, dtype=complex)
    q = q / np.linalg.norm(q)
    _, _, vh = np.linalg.svd(q[None, :].conj())
    z = vh[1:].conj().T                        # orthonormal basis of q-perp
    return float(np.linalg.svd(dop.defect_matrix @ z, compute_uv=False).min())


def kernel_samples(dop, func):
    """Samples of ``func`` in the orthonormal coordinates of the defect matrix columns."""
    x = dop.mesh.nodes
    if dop.defect_matrix.shape[1] == x.size - 1:
        xc, wc = x[1:], np.diff(x)
    else:
        xc, wc = x, np.full(x.size, x[1] - x[0])
    return np.sqrt(wc) * func(xc)


# ------------------------------------------------------- closability falsifier

def closability_falsifier(ns=(1, 10, 100)):
    """Hat functions ``f_n = max(0, 1 - n x)`` against ``q(f) = |f(0)|^2 / 2``.

    ``||f_n||^2 = 1/(3n) -> 0`` and ``q(f_n - f_m) = 0`` while ``q(f_n) = 1/2``.
    """
    rows = []
    for n in ns:
        n = Fraction(n)
        norm2 = 1 / (3 * n)                    # int_0^{1/n} (1 - n x)^2 dx
        rows.append({"n": int(n), "norm2": norm2, "q": Fraction(1, 2)})
    diffs = {(a["n"], b["n"]): Fraction(0) for a in rows for b in rows}
    return {"rows": rows, "q_differences": diffs, "closable": False}


def hat_norm2_numeric(n):
    """Quadrature value of ``||f_n||^2``, for comparison with the rational path."""
    f = FuncExpr.power(0.0, interval=(0.0, 1.0 / n)) - FuncExpr.power(1.0, n, interval=(0.0, 1.0 / n))
    return integrate_abs2(f)


# ----------------------------------------------------------- cross validation

@dataclass(frozen=True)
class ArrowForm:
    """Hermitian ``[[T, b], [b*, c]]`` with ``T`` real symmetric tridiagonal."""

    diag: np.ndarray
    off: np.ndarray
    border: np.ndarray
    corner: float

    def dense(self):
        n = self.diag.size
        m = np.zeros((n + 1, n + 1), dtype=complex)
        m[:n, :n] = np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)
        m[:n, n] = self.border
        m[n, :n] = self.border.conj()
        m[n, n] = self.corner
        return m


def negative_count(g, mass, lam):
    """Number of eigenvalues of the pencil ``(G, mass)`` below ``lam``.

    Sylvester inertia of ``G - lam mass``: LDL^T of the tridiagonal block,
    then the sign of the Schur complement of the border.
    """
    a = (g.diag - lam * mass.diag).tolist()
    b = (g.off - lam * mass.off).tolist()
    r = (g.border - lam * mass.border).tolist()
    c = g.corner - lam * mass.corner
    tiny = 1e-300
    neg = 0
    quad = 0.0
    d, y = a[0], r[0]
    for i in range(len(a)):
        if i:
            l = b[i - 1] / d
            d = a[i] - l * b[i - 1]
            y = r[i] - l * y
        if d == 0.0:
            d = tiny
        if d < 0:
            neg += 1
        quad += (y.real * y.real + y.imag * y.imag) / d
    if c - quad < 0:
        neg += 1
    return neg


def min_generalized_eig(g, mass, rtol=1e-12):
    """Smallest eigenvalue of ``(G, mass)`` by inertia bisection."""
    hi = g.corner / mass.corner              # Rayleigh quotient of the border direction
    scale = max(abs(hi), 1.0)
    step = scale
    lo = hi - step
    while negative_count(g, mass, lo) > 0:
        step *= 2
        lo = hi - step
    for _ in range(200):
        if hi - lo <= rtol * scale:
            break
        mid = 0.5 * (lo + hi)
        if negative_count(g, mass, mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _gauss_on_elements(x, nq):
    g, w = np.polynomial.legendre.leggauss(nq)
    a, b = x[:-1, None], x[1:, None]
    h = b - a
    pts = 0.5 * (a + b) + 0.5 * h * g[None, :]
    return pts, 0.5 * h * w[None, :], h


def galerkin_first_order(v, ell, gamma, mesh, nq=12):
    """Imaginary-part form and Gram matrix of ``B`` on ``span{hats} + span{v}``.

    The hats are the interior P1 functions on ``mesh``; they lie in ``H^1_0``,
    so the discrete infimum can only overestimate the continuum one.  Between
    hats the derivative parts cancel and the form is ``gamma int phi_i phi_j / x``.
    Returns ``(G, mass)`` as :class:`ArrowForm` with ``v`` as the border.
    """
    x = mesh.nodes
    pts, wts, h = _gauss_on_elements(x, nq)
    left = (x[1:, None] - pts) / h          # hat of the element's left node
    right = (pts - x[:-1, None]) / h        # hat of the element's right node
    vv = v(pts)
    ll = ell(pts)
    gx = gamma / pts

    def el(f):
        return np.sum(f * wts, axis=1)

    # element e joins interior unknowns e-1 (left node) and e (right node)
    g_diag = el(right * right * gx)[:-1] + el(left * left * gx)[1:]
    g_off = el(left * right * gx)[1:-1]
    m_diag = el(right * right)[:-1] + el(left * left)[1:]
    m_off = el(left * right)[1:-1]

    def border(phi, dphi):
        # (<phi, l> - conj<v, A phi>) / 2i, with A phi = i phi' + i gamma phi / x
        img = 1j * dphi + 1j * phi * gx
        return (el(phi * ll) - el(img.conj() * vv)) / 2j

    g_border = border(right, 1.0 / h)[:-1] + border(left, -1.0 / h)[1:]
    m_border = el(right * vv)[:-1] + el(left * vv)[1:]
    corner_g = float(inner_product(v, ell).imag)
    corner_m = float(integrate_abs2(v))
    return (ArrowForm(g_diag, g_off, g_border, corner_g),
            ArrowForm(m_diag, m_off, m_border, corner_m))


def schur_margin(g):
    """``G_vv - G_vh G_hh^{-1} G_hv`` with ``v`` the border direction."""
    ab = np.zeros((2, g.diag.size))
    ab[0, 1:] = g.off
    ab[1] = g.diag
    y = solveh_banded(ab, g.border)
    return float(np.real(g.corner - np.vdot(g.border, y)))


def oracle_first_order(v, ell, gamma, mesh):
    """``(margin, floor, schur)``: smallest eigenvalue of the discrete form
    relative to the Gram matrix, its resolution floor, and the Schur value."""
    g, mass = galerkin_first_order(v, ell, gamma, mesh)
    margin = min_generalized_eig(g, mass)
    floor = 1e-9 * max(abs(g.corner) / mass.corner, 1.0)
    return margin, floor, schur_margin(g)


@dataclass(frozen=True)
class ConvergenceReport:
    analytic_margin: float
    analytic_decision: str
    rows: list
    resolvable: bool
    agrees: bool
    no_convergence: bool

    def to_dict(self):
        return {"analytic_margin": self.analytic_margin,
                "analytic_decision": self.analytic_decision,
                "rows": self.rows, "resolvable": self.resolvable,
                "agrees": self.agrees, "no_convergence": self.no_convergence}


def _sign(m, floor):
    if abs(m) <= floor:
        return 0
    return 1 if m > 0 else -1


def cross_validate(v, ell, gamma, ladder=(512, 1024, 2048), depth=12):
    """Oracle margins on refining graded meshes against the analytic decision."""
    rep = dissipativity_check(v, ell, gamma)
    rows = []
    for n in ladder:
        mesh = graded_mesh(n, depth=depth)
        margin, floor, schur = oracle_first_order(v, ell, gamma, mesh)
        rows.append({"n": n, "h": 1.0 / n, "dofs": mesh.nodes.size - 1,
                     "oracle_margin": margin, "floor": floor, "schur_margin": schur,
                     "sign": _sign(margin, floor)})
    resolvable = abs(rep.margin) > SIGN_RESOLUTION
    target = 1 if rep.margin > 0 else -1
    final = rows[-1]["sign"]
    agrees = resolvable and final == target
    stable = len(rows) < 2 or rows[-1]["sign"] == rows[-2]["sign"]
    return ConvergenceReport(rep.margin, rep.decision, rows, resolvable, agrees,
                             resolvable and not (agrees and stable))


def regression_cases():
    """Twelve ``(name, v, l, gamma)`` triples with analytic margins well away from 0."""
    P = FuncExpr.power
    cases = [
        ("x-4i", P(1.0), P(1.0, 4j), 1.0),
        ("x-8i", P(1.0), P(1.0, 8j), 1.0),
        ("sqrt-2i", P(0.5), P(0.5, 2j), 0.5),
        ("sqrt-4i", P(0.5), P(0.5, 4j), 0.5),
        ("x2-5i", P(2.0), P(2.0, 5j), 2.0),
        ("x2-12i", P(2.0), P(2.0, 12j), 2.0),
        ("x03-1i", P(0.3), P(0.3, 1j), 0.3),
        ("x03-3i", P(0.3), P(0.3, 3j), 0.3),
        ("kernel-i", P(1.0, beta=1.0), P(1.0, 1j, beta=1.0), 1.0),
        ("x+x2-3i", P(1.0) + P(2.0), P(1.0, 3j), 1.0),
        ("x-real", P(1.0), P(1.0, 1 + 2j), 1.0),
        ("x-const", P(1.0), P(0.0, 6j), 1.0),
    ]
    return cases
