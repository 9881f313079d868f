"""Coherent-state quantization at level k and its semiclassical diagnostics.

The level-k quantizer integrates a function against the coherent projector
family with the (k+1)-normalized weights, on a grid exact to degree
k + 2*band_max. Every identity used downstream (resolution of identity, trace
rule, symbol band limits) is then quadrature-exact, which is what makes the
1e-10 class tolerances in the tests honest.

Symbols: the lower symbol (dequantization) of a level-k operator is band
limited to l <= k; its coefficients are exact up to l <= 2*band_max on the
quantizer grid, so that is the default report band.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import backend
from .operator_core import hermitize, operator_norm, spectral_norm
from .sphere_fn import (
    SphereFunction,
    SpherePoint,
    build_grid,
    constant,
    harmonic,
    multiply,
    poisson_bracket,
    grad_pairing,
    rodrigues,
    rotate_function,
)

DEFAULT_BAND_MAX = 8


def coherent_state(k, point):
    """Amplitude vector of the level-k coherent state at a sphere point."""
    if not isinstance(point, SpherePoint):
        point = SpherePoint(*point)
    return backend.coherent(k, np.array([point.theta]), np.array([point.phi]))[0]


def spin_matrices(k):
    """Spin-(k/2) generators in the coherent basis (row 0 = highest weight)."""
    s = 0.5 * k
    mu = s - np.arange(k + 1)
    sz = np.diag(mu.astype(np.complex128))
    raise_abs = np.sqrt([m * (k - m + 1.0) for m in range(1, k + 1)])
    splus = np.zeros((k + 1, k + 1), dtype=np.complex128)
    for m in range(1, k + 1):
        splus[m - 1, m] = raise_abs[m - 1]
    sminus = splus.conj().T
    sx = 0.5 * (splus + sminus)
    sy = -0.5j * (splus - sminus)
    return sx, sy, sz


def rotation_unitary(k, axis, angle):
    """Unitary implementing the rotation about axis by angle at level k."""
    n = np.asarray(axis, dtype=np.float64)
    norm = np.linalg.norm(n)
    if norm == 0.0:
        return np.eye(k + 1, dtype=np.complex128)
    n = n / norm
    sx, sy, sz = spin_matrices(k)
    return scipy.linalg.expm(-1j * angle * (n[0] * sx + n[1] * sy + n[2] * sz))


@dataclass
class ToeplitzQuantizer:
    """Positive quantizer built from the coherent-state family at level k."""

    k: int
    band_max: int = DEFAULT_BAND_MAX
    kind: str = "standard"
    is_povm: bool = True
    grid: object = None
    _coh: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("level k must be >= 1")
        if self.grid is None:
            self.grid = build_grid(self.k + 2 * self.band_max)
        if self._coh is None:
            self._coh = backend.coherent(self.k, self.grid.theta, self.grid.phi)
        self.point_weights = (self.k + 1.0) * self.grid.weights

    @property
    def hbar(self):
        return 1.0 / self.k

    @property
    def dim(self):
        return self.k + 1

    # -- quantization ------------------------------------------------------

    def pre_samples(self, f):
        """Samples fed to the integrator; the identity map for this kind."""
        if f.band_limit > self.band_max:
            raise ValueError("function band exceeds quantizer band_max")
        return f.values_on(self.grid)

    def quantize_samples(self, values):
        weighted = (self.point_weights * np.asarray(values, dtype=np.float64))[:, None]
        return hermitize(((self._coh * weighted).T @ self._coh.conj()))

    def quantize(self, f):
        return self.quantize_samples(self.pre_samples(f))

    def quantize_complex(self, f_re, f_im):
        return self.quantize(f_re) + 1j * self.quantize(f_im)

    def trace_of(self, f):
        """tr Q(f) without building the matrix."""
        return float(np.dot(self.point_weights, self.pre_samples(f)))

    # -- dequantization ----------------------------------------------------

    def symbol_values(self, a):
        """Lower symbol <x|A|x> on the grid nodes (complex for general A)."""
        return np.einsum("qm,mn,qn->q", self._coh.conj(), np.asarray(a), self._coh)

    def dequantize(self, a, band=None):
        """Lower symbol of a Hermitian operator, projected to a report band."""
        band = 2 * self.band_max if band is None else band
        if band > 2 * self.band_max:
            raise ValueError("report band beyond quadrature exactness")
        vals = self.symbol_values(a)
        if np.max(np.abs(vals.imag)) > 1e-9 * max(1.0, np.max(np.abs(vals.real))):
            raise ValueError("operator is not Hermitian; use dequantize_complex")
        weighted = self.grid.weights * vals.real
        return SphereFunction(band, self.grid.basis(band).T @ weighted)

    def dequantize_complex(self, a, band=None):
        """(real, imaginary) symbol pair for a general operator."""
        band = 2 * self.band_max if band is None else band
        if band > 2 * self.band_max:
            raise ValueError("report band beyond quadrature exactness")
        vals = self.symbol_values(a)
        basis = self.grid.basis(band)
        re = SphereFunction(band, basis.T @ (self.grid.weights * vals.real))
        im = SphereFunction(band, basis.T @ (self.grid.weights * vals.imag))
        return re, im

    def berezin(self, f):
        return self.dequantize(self.quantize(f), band=f.band_limit)

    def husimi_moment(self, f, state):
        return float(np.trace(self.quantize(f) @ state).real)

    # -- semiclassical structure -------------------------------------------

    def cocycle_candidate(self, f, g):
        """First-order cocycle prediction (c_plus, c_minus) for this kind."""
        return -0.5 * grad_pairing(f, g), 0.5 * poisson_bracket(f, g)

    def rawnsley_prediction(self):
        """First-order trace-density profile r with R = 1 + hbar r."""
        return constant(1.0)


def noise_operator(quantizer, f):
    """Measurement noise Q(f^2) - Q(f)^2; positive semidefinite for POVM kinds."""
    f2 = multiply(f, f)
    a = quantizer.quantize(f)
    return hermitize(quantizer.quantize(f2) - a @ a)


@dataclass(frozen=True)
class RawnsleyEstimate:
    band: int
    density: SphereFunction  # R with tr Q(f) = k <f R>_sigma
    profile: SphereFunction  # r = (R - 1)/hbar
    mean_profile: float


def rawnsley_function(quantizer, band=2, probes=None):
    """Trace density from probe traces, solved by least squares.

    With the default orthonormal harmonic probes the system is diagonal; a
    custom probe list exercises the same path through lstsq.
    """
    if probes is None:
        probes = [harmonic(l, m) for l in range(band + 1) for m in range(-l, l + 1)]
    ncoef = (band + 1) ** 2
    design = np.zeros((len(probes), ncoef))
    rhs = np.zeros(len(probes))
    for i, p in enumerate(probes):
        design[i] = p.with_band(band).coeffs
        rhs[i] = quantizer.trace_of(p) / quantizer.k
    coeffs, *_ = np.linalg.lstsq(design, rhs, rcond=None)
    density = SphereFunction(band, coeffs)
    profile = quantizer.k * (density - constant(1.0))
    return RawnsleyEstimate(band, density, profile, profile.mean())


def covariance_residual(quantizer, f, axis, angle):
    """Operator-norm defect of rotation covariance for one generator."""
    rot = rodrigues(axis, angle)
    lhs = quantizer.quantize(rotate_function(f, rot))
    u = rotation_unitary(quantizer.k, axis, angle)
    rhs = u @ quantizer.quantize(f) @ u.conj().T
    return spectral_norm(lhs - rhs)


RESIDUAL_NAMES = ("r1_norm", "r2_bracket", "r3_product", "r4_trace", "r5_berezin")
SLOPE_FLOOR = 1e-12


def fit_slope(hbars, residuals, floor=SLOPE_FLOOR):
    """Least-squares slope of log(residual) vs log(hbar); None when at floor."""
    h = np.asarray(hbars, dtype=np.float64)
    r = np.asarray(residuals, dtype=np.float64)
    keep = r > floor
    if np.count_nonzero(keep) < 2:
        return None
    x = np.log(h[keep])
    y = np.log(r[keep])
    return float(np.polyfit(x, y, 1)[0])


@dataclass
class ConvergenceRecord:
    ks: list
    hbars: list
    residuals: dict
    slopes: dict

    def rows(self):
        for i, k in enumerate(self.ks):
            row = {"k": k, "hbar": self.hbars[i]}
            for name in RESIDUAL_NAMES:
                row[name] = self.residuals[name][i]
            yield row


def axiom_report(make_quantizer, ks, f, g, rawnsley_profile=None):
    """Residuals of the five quantization axioms over a level list.

    r1 norm correspondence (one-sided), r2 bracket correspondence, r3
    quasi-multiplicativity against the kind's cocycle candidate, r4 trace rule
    against R = 1 + hbar r_model, r5 reversibility of the lower symbol.
    """
    bracket = poisson_bracket(f, g)
    sup_f = f.sup_norm()
    data = {name: [] for name in RESIDUAL_NAMES}
    hbars = []
    for k in ks:
        q = make_quantizer(k)
        hbars.append(q.hbar)
        qf = q.quantize(f)
        qg = q.quantize(g)
        qfg = q.quantize(multiply(f, g))
        data["r1_norm"].append(max(0.0, sup_f - operator_norm(qf)))
        comm = -1j / q.hbar * (qf @ qg - qg @ qf)
        data["r2_bracket"].append(operator_norm(comm - q.quantize(bracket)))
        c_plus, c_minus = q.cocycle_candidate(f, g)
        resid = qf @ qg - qfg - q.hbar * q.quantize_complex(c_plus, c_minus)
        data["r3_product"].append(spectral_norm(resid))
        r_model = rawnsley_profile if rawnsley_profile is not None else q.rawnsley_prediction()
        density = constant(1.0) + q.hbar * r_model
        predicted = q.k * multiply(f, density).mean()
        data["r4_trace"].append(abs(q.trace_of(f) - predicted))
        drift = q.berezin(f) - f
        data["r5_berezin"].append(drift.sup_norm())
    slopes = {name: fit_slope(hbars, data[name]) for name in RESIDUAL_NAMES}
    return ConvergenceRecord(list(ks), hbars, data, slopes)


def write_operator(path, a, k):
    """Line-oriented dump: header 'dim k', then rows of 're im' pairs."""
    a = np.asarray(a)
    dim = a.shape[0]
    with open(path, "w") as fh:
        fh.write(f"{dim} {k}\n")
        for row in a:
            fh.write(" ".join(f"{v.real:.17g} {v.imag:.17g}" for v in row) + "\n")


def read_operator(path):
    with open(path) as fh:
        header = fh.readline().split()
        dim, k = int(header[0]), int(header[1])
        a = np.zeros((dim, dim), dtype=np.complex128)
        for i in range(dim):
            parts = [float(x) for x in fh.readline().split()]
            if len(parts) != 2 * dim:
                raise ValueError(f"row {i} has {len(parts)} values, expected {2 * dim}")
            a[i] = np.array(parts[0::2]) + 1j * np.array(parts[1::2])
    return a, k
