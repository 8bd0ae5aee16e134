"""Dense complex linear algebra used by every dissipativity check.

Everything goes through a single Hermitian eigendecomposition; there is no
Cholesky path. Matrices are plain ``numpy`` arrays of dtype ``complex128``.
"""

from dataclasses import dataclass

import numpy as np

HERMITIAN_RTOL = 1e-12


class NotHermitian(ValueError):
    pass


class StrictPositivityViolated(ValueError):
    """Smallest eigenvalue is below the required lower bound."""

    def __init__(self, min_eig, epsilon):
        self.min_eig = float(min_eig)
        self.epsilon = float(epsilon)
        super().__init__(
            f"min eigenvalue {self.min_eig:.6g} < epsilon {self.epsilon:.6g}")


def as_complex_matrix(a, name="matrix"):
    """Validate and convert to a 2-d finite complex128 array."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2:
        raise ValueError(f"{name}: expected a 2-d array, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name}: non-finite entries")
    return m


def _require_square(m, name):
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{name}: expected a square matrix, got {m.shape}")


def hermitian_deviation(h):
    """Relative size of the anti-Hermitian part, ``||H - H*|| / max(1, ||H||)``."""
    h = np.asarray(h)
    return np.linalg.norm(h - h.conj().T) / max(1.0, np.linalg.norm(h))


@dataclass(frozen=True)
class HermitianDecomposition:
    eigenvalues: np.ndarray    # ascending
    eigenvectors: np.ndarray   # unitary, columns are eigenvectors
    deviation: float = 0.0     # anti-Hermitian part removed before decomposing

    def reconstruct(self):
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T

    def apply_function(self, fn):
        """Return ``U diag(fn(lambda)) U*``."""
        u = self.eigenvectors
        return (u * fn(self.eigenvalues)) @ u.conj().T

    @property
    def min_eig(self):
        return float(self.eigenvalues[0])


def hermitian_eig(h, rtol=HERMITIAN_RTOL):
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrized as ``(H + H*)/2`` first; the removed deviation is
    kept on the result. Raises :class:`NotHermitian` when it exceeds ``rtol``.
    """
    h = as_complex_matrix(h, "H")
    _require_square(h, "H")
    dev = hermitian_deviation(h)
    if dev > rtol:
        raise NotHermitian(f"relative anti-Hermitian part {dev:.3g} > {rtol:.1g}")
    hs = 0.5 * (h + h.conj().T)
    w, u = np.linalg.eigh(hs)
    return HermitianDecomposition(w, u, dev)


def imaginary_part(b):
    """Hermitian matrix ``(B - B*)/(2i)``, i.e. the form ``f -> Im<f, Bf>``."""
    b = as_complex_matrix(b, "B")
    _require_square(b, "B")
    h = (b - b.conj().T) / 2j
    # exact Hermitian symmetry, rounding may break it at the last ulp
    return 0.5 * (h + h.conj().T)


def psd_margin(h, rtol=HERMITIAN_RTOL):
    """Smallest eigenvalue of ``H``; the caller compares it with a tolerance."""
    return hermitian_eig(h, rtol).min_eig


def inv_sqrt_pd(h, epsilon):
    """Principal inverse square root of a Hermitian matrix with ``H >= epsilon``."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    dec = hermitian_eig(h)
    if dec.min_eig < epsilon:
        raise StrictPositivityViolated(dec.min_eig, epsilon)
    r = dec.apply_function(lambda lam: 1.0 / np.sqrt(lam))
    return 0.5 * (r + r.conj().T)


def classify(margin, tol):
    """Three-valued decision from a margin and a boundary half-width."""
    if abs(margin) <= tol:
        return "boundary"
    return "positive" if margin > 0 else "negative"
