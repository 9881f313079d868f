"""Band-limited function calculus on the two-sphere.

Normalization used by the whole package: the reference measure sigma is the
normalized round measure (total mass 1), the symplectic measure is
mu = total_area * sigma with total_area = 2 pi, the metric is half the round
metric, and the positive Laplacian has eigenvalue 2 l (l+1) on degree-l
harmonics. The Poisson bracket is normalized so that {x, y} = 2 z cyclically
for the ambient coordinate functions.

Functions are stored by real orthonormal harmonic coefficients (layout
idx(l, m) = l*l + l + m, see _core_py). All products and brackets are computed
by sampling on a quadrature grid that is exact for the full product degree, so
band growth is explicit and nothing is truncated silently.
"""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import backend


@dataclass(frozen=True)
class NormalizationConvention:
    """Single source for the measure and Laplacian normalizations."""

    total_area: float = 2.0 * np.pi

    def laplace_eigenvalue(self, l):
        return 2.0 * l * (l + 1.0)


CONVENTION = NormalizationConvention()


@dataclass(frozen=True)
class SpherePoint:
    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= np.pi:
            raise ValueError("theta outside [0, pi]")

    @property
    def vector(self):
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])


@dataclass(frozen=True)
class QuadratureGrid:
    """Product rule: Gauss-Legendre in cos(theta) times equispaced phi.

    Weights sum to 1 (they quadrate the normalized measure sigma).
    exact_degree is the largest spherical-polynomial degree integrated exactly.
    """

    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray
    exact_degree: int
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def size(self):
        return self.theta.size

    @property
    def vectors(self):
        st = np.sin(self.theta)
        return np.stack([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)], axis=1)

    def basis(self, lmax):
        key = ("basis", lmax)
        if key not in self._cache:
            self._cache[key] = backend.basis(lmax, self.theta, self.phi)
        return self._cache[key]

    def basis_dtheta(self, lmax):
        key = ("dtheta", lmax)
        if key not in self._cache:
            self._cache[key] = backend.basis_dtheta(lmax, self.theta, self.phi)
        return self._cache[key]

    def integrate(self, values):
        return float(np.dot(self.weights, values))


@lru_cache(maxsize=None)
def build_grid(degree):
    """Smallest product grid with exact_degree >= degree."""
    if degree < 0:
        raise ValueError("degree must be non-negative")
    n_t = (degree + 2) // 2  # ceil((degree+1)/2), Gauss exactness 2 n_t - 1
    n_t = max(n_t, 1)
    n_phi = degree + 1
    x, w = np.polynomial.legendre.leggauss(n_t)
    theta_1d = np.arccos(x)
    phi_1d = 2.0 * np.pi * np.arange(n_phi) / n_phi
    theta = np.repeat(theta_1d, n_phi)
    phi = np.tile(phi_1d, n_t)
    weights = np.repeat(w / 2.0, n_phi) / n_phi
    exact = min(2 * n_t - 1, n_phi - 1)
    if exact < degree:
        raise AssertionError("grid construction lost exactness")
    return QuadratureGrid(theta=theta, phi=phi, weights=weights, exact_degree=exact)


@dataclass(frozen=True)
class SphereFunction:
    """Real function with harmonic coefficients up to band_limit."""

    band_limit: int
    coeffs: np.ndarray

    def __post_init__(self):
        want = (self.band_limit + 1) ** 2
        if self.coeffs.shape != (want,):
            raise ValueError(f"expected {want} coefficients for band {self.band_limit}")

    @classmethod
    def zero(cls, band_limit=0):
        return cls(band_limit, np.zeros((band_limit + 1) ** 2))

    def coeff(self, l, m):
        if l > self.band_limit or abs(m) > l:
            return 0.0
        return float(self.coeffs[l * l + l + m])

    def values(self, theta, phi):
        return backend.synth(self.coeffs, self.band_limit, theta, phi)

    def values_on(self, grid):
        return grid.basis(self.band_limit) @ self.coeffs

    def mean(self):
        return float(self.coeffs[0])

    def with_band(self, band_limit):
        """Zero-pad or explicitly truncate to a new band limit."""
        out = np.zeros((band_limit + 1) ** 2)
        n = min(out.size, self.coeffs.size)
        out[:n] = self.coeffs[:n]
        return SphereFunction(band_limit, out)

    def sup_norm(self, oversample=6):
        """Max of |f| on a dense evaluation grid that includes both poles."""
        n_t = oversample * (self.band_limit + 2)
        n_p = oversample * (self.band_limit + 1) + 1
        theta_1d = np.linspace(0.0, np.pi, n_t)
        phi_1d = 2.0 * np.pi * np.arange(n_p) / n_p
        theta = np.repeat(theta_1d, n_p)
        phi = np.tile(phi_1d, n_t)
        return float(np.max(np.abs(self.values(theta, phi))))

    def _binary(self, other, sign):
        band = max(self.band_limit, other.band_limit)
        a = self.with_band(band).coeffs
        b = other.with_band(band).coeffs
        return SphereFunction(band, a + sign * b)

    def __add__(self, other):
        if isinstance(other, SphereFunction):
            return self._binary(other, 1.0)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, SphereFunction):
            return self._binary(other, -1.0)
        return NotImplemented

    def __mul__(self, scalar):
        if np.isscalar(scalar):
            return SphereFunction(self.band_limit, self.coeffs * float(scalar))
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


def constant(value):
    return SphereFunction(0, np.array([float(value)]))


def harmonic(l, m):
    """Unit-norm real harmonic Y_(l,m)."""
    coeffs = np.zeros((l + 1) ** 2)
    coeffs[l * l + l + m] = 1.0
    return SphereFunction(l, coeffs)


def legendre(n):
    """Legendre polynomial P_n(cos theta); value 1 at the north pole."""
    return harmonic(n, 0) * (1.0 / np.sqrt(2.0 * n + 1.0))


def coordinate(axis):
    """Ambient coordinate function x, y or z restricted to the sphere."""
    l1 = 1.0 / np.sqrt(3.0)
    if axis in (0, "x"):
        return harmonic(1, 1) * l1
    if axis in (1, "y"):
        return harmonic(1, -1) * l1
    if axis in (2, "z"):
        return harmonic(1, 0) * l1
    raise ValueError(f"unknown axis {axis!r}")


def random_function(band_limit, seed, normalize=True):
    """Random band-limited function, optionally scaled to unit sup norm."""
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal((band_limit + 1) ** 2)
    f = SphereFunction(band_limit, coeffs)
    if normalize:
        f = f * (1.0 / f.sup_norm())
    return f


def project(values, grid, band_limit):
    """Coefficients from point samples by quadrature against the basis.

    Exact when the sampled function has band <= exact_degree - band_limit.
    """
    if 2 * band_limit > grid.exact_degree:
        raise ValueError("grid cannot resolve the requested band")
    weighted = grid.weights * np.asarray(values, dtype=np.float64)
    return SphereFunction(band_limit, grid.basis(band_limit).T @ weighted)


def evaluate(f, theta, phi):
    return f.values(theta, phi)


def multiply(f, g, band_limit=None):
    """Pointwise product. Defaults to the exact band L_f + L_g."""
    exact_band = f.band_limit + g.band_limit
    if band_limit is None:
        band_limit = exact_band
    grid = build_grid(exact_band + band_limit)
    return project(f.values_on(grid) * g.values_on(grid), grid, band_limit)


def laplacian(f):
    """Positive Laplacian of the half-round metric: eigenvalue 2 l (l+1)."""
    coeffs = f.coeffs.copy()
    for l in range(f.band_limit + 1):
        coeffs[l * l : (l + 1) ** 2] *= CONVENTION.laplace_eigenvalue(l)
    return SphereFunction(f.band_limit, coeffs)


def heat_flow(f, t):
    """exp(-t Laplacian) applied spectrally; t >= 0."""
    if t < 0:
        raise ValueError("heat flow needs t >= 0")
    coeffs = f.coeffs.copy()
    for l in range(f.band_limit + 1):
        coeffs[l * l : (l + 1) ** 2] *= np.exp(-t * CONVENTION.laplace_eigenvalue(l))
    return SphereFunction(f.band_limit, coeffs)


def grad_pairing(f, g):
    """Metric gradient pairing (grad f, grad g) without derivatives.

    Uses the Laplacian product identity
    (grad f, grad g) = (f Lap g + g Lap f - Lap(fg)) / 2,
    exact for band-limited inputs.
    """
    band = f.band_limit + g.band_limit
    m1 = multiply(f, laplacian(g), band)
    m2 = multiply(g, laplacian(f), band)
    m3 = laplacian(multiply(f, g, band))
    return 0.5 * (m1 + m2 - m3)


def dphi_coeffs(f):
    """Exact azimuthal derivative in coefficient space."""
    out = np.zeros_like(f.coeffs)
    for l in range(f.band_limit + 1):
        base = l * l + l
        for m in range(1, l + 1):
            out[base - m] += -m * f.coeffs[base + m]
            out[base + m] += m * f.coeffs[base - m]
    return SphereFunction(f.band_limit, out)


def derivative_values(f, grid):
    """(d/dtheta f, d/dphi f) sampled on grid nodes."""
    ft = grid.basis_dtheta(f.band_limit) @ f.coeffs
    fp = grid.basis(f.band_limit) @ dphi_coeffs(f).coeffs
    return ft, fp


def poisson_bracket(f, g):
    """{f, g} = (2/sin theta)(f_theta g_phi - f_phi g_theta); {x, y} = 2z."""
    band = f.band_limit + g.band_limit
    grid = build_grid(2 * band)
    ft, fp = derivative_values(f, grid)
    gt, gp = derivative_values(g, grid)
    vals = 2.0 / np.sin(grid.theta) * (ft * gp - fp * gt)
    return project(vals, grid, band)


def rodrigues(axis, angle):
    """Rotation matrix about a (not necessarily unit) axis."""
    n = np.asarray(axis, dtype=np.float64)
    norm = np.linalg.norm(n)
    if norm == 0.0:
        return np.eye(3)
    n = n / norm
    kmat = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])
    return np.eye(3) + np.sin(angle) * kmat + (1.0 - np.cos(angle)) * (kmat @ kmat)


def angles_from_vectors(vecs):
    vecs = np.asarray(vecs)
    z = np.clip(vecs[:, 2], -1.0, 1.0)
    theta = np.arccos(z)
    phi = np.mod(np.arctan2(vecs[:, 1], vecs[:, 0]), 2.0 * np.pi)
    return theta, phi


def rotate_function(f, rotation):
    """f composed with the inverse rotation, same band (exact)."""
    grid = build_grid(2 * f.band_limit)
    moved = grid.vectors @ rotation  # row-vector form of R^T v
    theta, phi = angles_from_vectors(moved)
    return project(f.values(theta, phi), grid, f.band_limit)
