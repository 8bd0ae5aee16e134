"""Dissipativity of finite-dimensional operator extensions.

A dissipative operator ``A`` is given on a proper subspace ``D`` of ``C^n``; an
extension ``B`` adds a complement ``V`` and prescribes ``B`` on it.  ``B`` is
dissipative on ``D + V`` exactly when

    R - 1/4 M* M  >= 0,

where ``R`` is the imaginary-part form of ``B`` on ``V`` and
``M = V_A^{-1/2} P_D B - W_A*`` restricted to ``V`` with
``W_A = A V_A^{-1/2}``.  The brute-force alternative (:func:`oracle_check`)
takes the smallest eigenvalue of the imaginary-part form on all of
``D + V`` and needs no positivity hypothesis.
"""

from dataclasses import dataclass, field

import numpy as np

from .linalg import (as_complex_matrix, hermitian_eig, imaginary_part,
                     inv_sqrt_pd, psd_margin)

ORTHO_TOL = 1e-10
BOUNDARY_RTOL = 1e-9
ORACLE_RTOL = 1e-9

DISSIPATIVE = "dissipative"
NOT_DISSIPATIVE = "not_dissipative"
BOUNDARY = "boundary"


def _orthonormality_error(q):
    return np.linalg.norm(q.conj().T @ q - np.eye(q.shape[1]))


@dataclass(frozen=True)
class PartialOperator:
    """``A`` on ``span(domain_basis)``; column j of ``action`` is ``A d_j``."""

    domain_basis: np.ndarray
    action: np.ndarray

    def __post_init__(self):
        d = as_complex_matrix(self.domain_basis, "domain_basis")
        ad = as_complex_matrix(self.action, "domain_action")
        object.__setattr__(self, "domain_basis", d)
        object.__setattr__(self, "action", ad)
        n, k = d.shape
        if ad.shape != d.shape:
            raise ValueError(f"domain_action shape {ad.shape} != domain_basis shape {d.shape}")
        if k < 1 or n <= k:
            raise ValueError(f"need 1 <= d < n, got d={k}, n={n}")
        err = _orthonormality_error(d)
        if err > ORTHO_TOL:
            raise ValueError(f"domain_basis: columns not orthonormal (error {err:.2e})")

    @property
    def ambient_dim(self):
        return self.domain_basis.shape[0]

    @property
    def dim(self):
        return self.domain_basis.shape[1]


@dataclass(frozen=True)
class ExtensionSpec:
    """Complement basis ``V`` (orthonormal, orthogonal to ``D``) and ``B V``."""

    complement_basis: np.ndarray
    action: np.ndarray

    def __post_init__(self):
        v = as_complex_matrix(self.complement_basis, "complement_basis")
        bv = as_complex_matrix(self.action, "complement_action")
        object.__setattr__(self, "complement_basis", v)
        object.__setattr__(self, "action", bv)
        if v.shape[1] < 1:
            raise ValueError("empty complement: B would coincide with A")
        if bv.shape != v.shape:
            raise ValueError(f"complement_action shape {bv.shape} != complement_basis shape {v.shape}")
        err = _orthonormality_error(v)
        if err > ORTHO_TOL:
            raise ValueError(f"complement_basis: columns not orthonormal (error {err:.2e})")

    @property
    def dim(self):
        return self.complement_basis.shape[1]

    @classmethod
    def from_complement(cls, op, vectors, action):
        """Re-base an arbitrary complement onto an orthonormal basis of ``D^perp``.

        ``v -> v - P_D v`` changes ``Bv`` by ``-A(P_D v)``, which is known
        because ``P_D v`` lies in the domain of ``A``.
        """
        d, ad = op.domain_basis, op.action
        v = as_complex_matrix(vectors, "complement_basis")
        bv = as_complex_matrix(action, "complement_action")
        if v.shape[0] != op.ambient_dim or bv.shape != v.shape:
            raise ValueError("complement shapes do not match the ambient dimension")
        coef = d.conj().T @ v
        v = v - d @ coef
        bv = bv - ad @ coef
        q, r = np.linalg.qr(v)
        sv = np.abs(np.diag(r))
        if sv.size == 0 or sv.min() <= 1e-10 * max(1.0, sv.max()):
            raise ValueError("complement is not linearly independent of the domain")
        rinv = np.linalg.inv(r)
        return cls(q, bv @ rinv)

    def check_against(self, op):
        if self.complement_basis.shape[0] != op.ambient_dim:
            raise ValueError("complement lives in a different ambient space")
        if self.dim > op.ambient_dim - op.dim:
            raise ValueError("complement dimension exceeds codimension of the domain")
        overlap = np.linalg.norm(op.domain_basis.conj().T @ self.complement_basis)
        if overlap > ORTHO_TOL:
            raise ValueError(f"complement_basis not orthogonal to domain (overlap {overlap:.2e})")


@dataclass(frozen=True)
class CriterionAssembly:
    VA: np.ndarray
    VA_inv_sqrt: np.ndarray
    WA: np.ndarray
    WA_star: np.ndarray
    M: np.ndarray
    R: np.ndarray
    C: np.ndarray
    epsilon: float
    domain_basis: np.ndarray = field(repr=False)

    @property
    def K(self):
        """``R - 1/4 M*M``, the matrix whose PSD-ness decides dissipativity."""
        k = self.R - 0.25 * (self.M.conj().T @ self.M)
        return 0.5 * (k + k.conj().T)

    def schur_identity_error(self):
        """Entrywise max of ``|1/4 M*M - C* VA^{-1} C|``."""
        lhs = 0.25 * (self.M.conj().T @ self.M)
        rhs = self.C.conj().T @ np.linalg.solve(self.VA, self.C)
        return float(np.max(np.abs(lhs - rhs)))


@dataclass(frozen=True)
class CheckReport:
    decision: str
    criterion_margin: float
    oracle_margin: float
    epsilon_used: float
    agreement: bool
    tolerance: float
    va_spectrum: list
    m_norm: float
    schur_identity_error: float

    def to_dict(self):
        return {
            "decision": self.decision,
            "criterion_margin": self.criterion_margin,
            "oracle_margin": self.oracle_margin,
            "epsilon_used": self.epsilon_used,
            "agreement": self.agreement,
            "tolerance": self.tolerance,
            "va_spectrum": list(self.va_spectrum),
            "m_norm": self.m_norm,
            "schur_identity_error": self.schur_identity_error,
        }


def assemble_form_matrix(op):
    """``V_A`` in domain coordinates: ``<c, VA c> = Im<Dc, A Dc>``."""
    t = op.domain_basis.conj().T @ op.action
    return imaginary_part(t)


def default_epsilon(va):
    return 1e-6 * max(np.linalg.norm(va, 2), np.finfo(float).tiny)


def check_strict_positivity(va, epsilon):
    return psd_margin(va) >= epsilon


def assemble_criterion(op, ext, epsilon=None):
    ext.check_against(op)
    d, ad = op.domain_basis, op.action
    v, bv = ext.complement_basis, ext.action
    va = assemble_form_matrix(op)
    if epsilon is None:
        epsilon = default_epsilon(va)
    va_is = inv_sqrt_pd(va, epsilon)
    wa = ad @ va_is
    wa_star = wa.conj().T
    # only the D-component of Bv pairs with the domain
    m = va_is @ (d.conj().T @ bv) - wa_star @ v
    r = imaginary_part(v.conj().T @ bv)
    c = (d.conj().T @ bv - ad.conj().T @ v) / 2j
    return CriterionAssembly(va, va_is, wa, wa_star, m, r, c, float(epsilon), d)


def _boundary_tol(a):
    scale = max(np.linalg.norm(a.R, 2), 0.25 * np.linalg.norm(a.M, 2) ** 2)
    return BOUNDARY_RTOL * scale


def _decide(margin, tol):
    if abs(margin) <= tol:
        return BOUNDARY
    return DISSIPATIVE if margin > 0 else NOT_DISSIPATIVE


def oracle_matrix(op, ext):
    """Imaginary-part form of ``B`` on ``D + V`` in the combined basis."""
    basis = np.hstack([op.domain_basis, ext.complement_basis])
    image = np.hstack([op.action, ext.action])
    return imaginary_part(basis.conj().T @ image)


def oracle_check(op, ext):
    """Smallest eigenvalue of the imaginary-part form on ``D + V``."""
    ext.check_against(op)
    return psd_margin(oracle_matrix(op, ext))


def oracle_decision(op, ext, margin=None):
    g = oracle_matrix(op, ext)
    if margin is None:
        margin = psd_margin(g)
    tol = ORACLE_RTOL * np.linalg.norm(g, 2)
    return _decide(margin, tol)


def criterion_check(op, ext, epsilon=None):
    a = assemble_criterion(op, ext, epsilon)
    dec = hermitian_eig(a.K)
    margin = dec.min_eig
    tol = _boundary_tol(a)
    decision = _decide(margin, tol)
    om = oracle_check(op, ext)
    odecision = oracle_decision(op, ext, om)
    return CheckReport(
        decision=decision,
        criterion_margin=margin,
        oracle_margin=om,
        epsilon_used=a.epsilon,
        agreement=(decision == odecision) or BOUNDARY in (decision, odecision),
        tolerance=tol,
        va_spectrum=[float(x) for x in hermitian_eig(a.VA).eigenvalues],
        m_norm=float(np.linalg.norm(a.M, 2)),
        schur_identity_error=a.schur_identity_error(),
    )


def minimizing_witness(a, w):
    """Domain vector ``f`` minimizing ``Im<f + v, B(f + v)>`` for ``v = V w``.

    With inner products linear in the second slot the minimizer in the
    ``g = V_A^{1/2} f`` variable is ``g = (i/2) M w``.
    """
    w = np.asarray(w, dtype=np.complex128).reshape(-1)
    g = 0.5j * (a.M @ w)
    return a.domain_basis @ (a.VA_inv_sqrt @ g)


def full_form(op, ext, f, w):
    """``Im<f + Vw, B(f + Vw)>`` for ``f`` in the domain (ambient coordinates)."""
    f = np.asarray(f, dtype=np.complex128).reshape(-1)
    w = np.asarray(w, dtype=np.complex128).reshape(-1)
    a = op.domain_basis.conj().T @ f
    x = f + ext.complement_basis @ w
    bx = op.action @ a + ext.action @ w
    return float(np.vdot(x, bx).imag)


def form_margin(gram, mass):
    """Smallest eigenvalue of a Hermitian form relative to a Gram (mass) matrix.

    Equals :func:`oracle_check` after orthonormalizing a non-orthogonal
    basis; used when the form is assembled directly from integrals.
    """
    dec = hermitian_eig(mass, rtol=1e-10)
    r = inv_sqrt_pd(mass, max(dec.min_eig * 0.5, np.finfo(float).tiny))
    return psd_margin(r @ gram @ r, rtol=1e-10)


def random_instance(rng, n, d, k, epsilon=1e-3, scale=1.0, lift=0.0):
    """Random ``(A, B)`` pair with ``V_A >= epsilon`` on the domain.

    The Hermitian part of ``D* A D`` is arbitrary; its anti-Hermitian part is
    drawn PSD and shifted by ``epsilon``.  Off-domain components of ``A D`` and
    ``B V`` are unconstrained.
    """
    def cplx(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    q, _ = np.linalg.qr(cplx(n, n))
    dbasis, vbasis = q[:, :d], q[:, d:d + k]
    x = cplx(d, d) * scale
    pos = x @ x.conj().T / d + epsilon * np.eye(d)
    s = cplx(d, d)
    herm = 0.5 * (s + s.conj().T)
    t = herm + 1j * pos                      # D* A D, with Im-part = pos
    outside = q[:, d:] @ cplx(n - d, d)
    ad = dbasis @ t + outside
    bv = cplx(n, k) * scale + 1j * lift * vbasis
    return PartialOperator(dbasis, ad), ExtensionSpec(vbasis, bv)
