"""Dense Hermitian operator helpers shared by the quantization modules.

Operators and density states are plain complex ndarrays. The helpers here
centralize the Hermiticity bookkeeping: symmetrization is always explicit and
anything drifting past the tolerance is an error, never silently repaired.
"""
import numpy as np

HERMITICITY_TOL = 1e-10


def hermitize(a, tol=HERMITICITY_TOL):
    """Symmetrized copy of a; rejects input that is not Hermitian up to tol."""
    a = np.asarray(a)
    sym = 0.5 * (a + a.conj().T)
    scale = max(1.0, float(np.linalg.norm(sym, ord=np.inf)))
    drift = float(np.linalg.norm(a - sym, ord=np.inf)) / scale
    if drift > tol:
        raise ValueError(f"matrix is not Hermitian (relative drift {drift:.3e})")
    return sym


def is_hermitian(a, tol=HERMITICITY_TOL):
    a = np.asarray(a)
    scale = max(1.0, float(np.linalg.norm(a, ord=np.inf)))
    return float(np.linalg.norm(a - a.conj().T, ord=np.inf)) <= tol * scale


def operator_norm(a, tol=HERMITICITY_TOL):
    """Spectral norm of a Hermitian matrix via full eigendecomposition."""
    sym = hermitize(a, tol)
    return float(np.max(np.abs(np.linalg.eigvalsh(sym))))


def spectral_norm(a):
    """Largest singular value; for residuals that are not Hermitian."""
    return float(np.linalg.norm(np.asarray(a), ord=2))


def jordan_product(a, b):
    return 0.5 * (a @ b + b @ a)


def commutator(a, b):
    return a @ b - b @ a


def random_density(dim, seed, rank=None):
    """Wishart density matrix: G G*/tr(G G*) with complex Gaussian G."""
    rng = np.random.default_rng(seed)
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def check_density(rho, tol=1e-10):
    """Validate Hermiticity, unit trace and positivity of a state."""
    rho = hermitize(rho, tol)
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density trace {tr} differs from 1")
    lo = float(np.min(np.linalg.eigvalsh(rho)))
    if lo < -tol:
        raise ValueError(f"density has negative eigenvalue {lo:.3e}")
    return rho


def expectation(a, rho):
    return float(np.trace(a @ rho).real)
