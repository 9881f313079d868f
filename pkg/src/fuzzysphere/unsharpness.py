"""Unsharpness cocycle of a quantizer and the metric it induces.

The product defect Q(f)Q(g) - Q(fg) has a symbol of size hbar; rescaled by k
it converges to a bilinear cocycle c = c_plus + i c_minus. The antisymmetric
part is universal (half the Poisson bracket), while c_plus is minus one half
of a metric applied to the Hamiltonian vector fields of f and g. Reading off
that metric from the ambient coordinate probes, decomposing it against the
symplectic form and integrating its volume are the operations in this module.

Frame convention: at each point the working frame is (e_theta, e_phi) =
sqrt(2) (theta_hat, phi_hat), orthonormal for the rescaled round metric that
matches the bracket normalization; the symplectic matrix in this frame is
Omega = [[0, -1], [1, 0]] (so that {x, y} = 2z), and metric matrices are
always stored as their components in this frame.
"""
from dataclasses import dataclass

import numpy as np

from .sphere_fn import (
    SphereFunction,
    build_grid,
    coordinate,
    derivative_values,
    multiply,
    project,
)

OMEGA_INV = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class CocycleEstimate:
    k: int
    band: int
    c_plus: SphereFunction
    c_minus: SphereFunction
    extrapolated: bool = False


def cocycle_estimate(quantizer, f, g, band=None):
    """Level-k cocycle estimate k * symbol(Q(f)Q(g) - Q(fg))."""
    if band is None:
        band = f.band_limit + g.band_limit
    defect = quantizer.quantize(f) @ quantizer.quantize(g) - quantizer.quantize(multiply(f, g))
    re, im = quantizer.dequantize_complex(defect, band=band)
    k = quantizer.k
    return CocycleEstimate(k=k, band=band, c_plus=k * re, c_minus=k * im)


def cocycle_extrapolate(est_low, est_high):
    """Richardson step 2 c_(2k) - c_k removing the O(hbar) error."""
    if est_high.k != 2 * est_low.k:
        raise ValueError("extrapolation wants levels k and 2k")
    if est_high.band != est_low.band:
        raise ValueError("estimates carry different report bands")
    return CocycleEstimate(
        k=est_high.k,
        band=est_high.band,
        c_plus=2.0 * est_high.c_plus - est_low.c_plus,
        c_minus=2.0 * est_high.c_minus - est_low.c_minus,
        extrapolated=True,
    )


def _complex_sup(re, im, grid):
    vr = re.values_on(grid)
    vi = im.values_on(grid)
    return float(np.max(np.hypot(vr, vi)))


def hochschild_residual(quantizer, f1, f2, f3):
    """Sup norm of the Hochschild coboundary of the full cocycle estimate."""
    e23 = cocycle_estimate(quantizer, f2, f3)
    e12_3 = cocycle_estimate(quantizer, multiply(f1, f2), f3)
    e1_23 = cocycle_estimate(quantizer, f1, multiply(f2, f3))
    e12 = cocycle_estimate(quantizer, f1, f2)
    band = max(f1.band_limit + e23.band, e12.band + f3.band_limit, e12_3.band, e1_23.band)
    re = (
        multiply(f1, e23.c_plus, band)
        - e12_3.c_plus.with_band(band)
        + e1_23.c_plus.with_band(band)
        - multiply(e12.c_plus, f3, band)
    )
    im = (
        multiply(f1, e23.c_minus, band)
        - e12_3.c_minus.with_band(band)
        + e1_23.c_minus.with_band(band)
        - multiply(e12.c_minus, f3, band)
    )
    return _complex_sup(re, im, build_grid(2 * band))


def leibniz_residual(quantizer, f, g, h):
    """Sup norm of c_plus(fg, h) - f c_plus(g, h) - g c_plus(f, h)."""
    e_fg_h = cocycle_estimate(quantizer, multiply(f, g), h)
    e_gh = cocycle_estimate(quantizer, g, h)
    e_fh = cocycle_estimate(quantizer, f, h)
    band = max(e_fg_h.band, f.band_limit + e_gh.band, g.band_limit + e_fh.band)
    resid = (
        e_fg_h.c_plus.with_band(band)
        - multiply(f, e_gh.c_plus, band)
        - multiply(g, e_fh.c_plus, band)
    )
    grid = build_grid(2 * band)
    return float(np.max(np.abs(resid.values_on(grid))))


def frame_vectors(theta, phi):
    """Round unit tangent vectors (theta_hat, phi_hat) at given angles."""
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    theta_hat = np.stack([ct * cp, ct * sp, -st], axis=1)
    phi_hat = np.stack([-sp, cp, np.zeros_like(sp)], axis=1)
    return theta_hat, phi_hat


def sgrad_frame(f, grid):
    """Frame components of the Hamiltonian field of f on grid nodes.

    With gradient components (g1, g2) = sqrt(2) (f_theta, f_phi / sin theta)
    the Hamiltonian field is (g2, -g1); this matches sgrad u_i = 2 e_i x p for
    the ambient coordinates.
    """
    ft, fp = derivative_values(f, grid)
    g1 = np.sqrt(2.0) * ft
    g2 = np.sqrt(2.0) * fp / np.sin(grid.theta)
    return np.stack([g2, -g1], axis=1)


def metric_pairing(f, g, metric_frame, band=None):
    """Candidate c_plus = -1/2 G(sgrad f, sgrad g) for a given frame metric.

    metric_frame(theta, phi) returns (n, 2, 2) metric components.
    """
    if band is None:
        band = f.band_limit + g.band_limit
    grid = build_grid(2 * band + 4)
    xf = sgrad_frame(f, grid)
    xg = sgrad_frame(g, grid)
    gmat = metric_frame(grid.theta, grid.phi)
    vals = -0.5 * np.einsum("ni,nij,nj->n", xf, gmat, xg)
    return project(vals, grid, band)


@dataclass(frozen=True)
class MetricField:
    """Unsharpness metric components in the rescaled round frame, per node."""

    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray
    G: np.ndarray  # (n, 2, 2)

    @property
    def det(self):
        return np.linalg.det(self.G)

    @property
    def sqrt_det(self):
        return np.sqrt(self.det)


@dataclass(frozen=True)
class MetricDecomposition:
    J: np.ndarray  # (n, 2, 2), omega-compatible complex structure
    compatible: np.ndarray  # omega(., J.) component
    rho: np.ndarray  # remainder, expected positive semidefinite
    alpha: np.ndarray  # K-operator spectrum sqrt(det G); rho >= 0 iff alpha >= 1

    @property
    def rho_min_eig(self):
        return np.linalg.eigvalsh(self.rho)[:, 0]


def metric_decompose(field):
    """Split G = omega(., J.) + rho with J the polar complex structure."""
    det = field.det
    if np.any(det <= 0.0):
        raise ValueError("metric reconstruction produced a non-positive determinant")
    alpha = np.sqrt(det)
    kop = np.einsum("ab,nbc->nac", OMEGA_INV, field.G)
    jmat = kop / alpha[:, None, None]
    compatible = field.G / alpha[:, None, None]
    rho = field.G - compatible
    return MetricDecomposition(J=jmat, compatible=compatible, rho=rho, alpha=alpha)


def _axis_probes(rotation):
    axes = np.eye(3) if rotation is None else np.asarray(rotation)
    base = [coordinate(i) for i in range(3)]
    probes = []
    for i in range(3):
        f = SphereFunction.zero(1)
        for j in range(3):
            f = f + axes[j, i] * base[j]
        probes.append(f)
    return axes, probes


def metric_reconstruct(q_low, q_high=None, eval_grid=None, rotation=None):
    """Pointwise Gram reconstruction of the unsharpness metric.

    Estimates -2 c_plus(u_i, u_j) for the (optionally rotated) coordinate
    probes, Richardson-extrapolates when a doubled-level quantizer is given,
    and solves the 6x3 least-squares system against the known Hamiltonian
    fields sgrad u_i = 2 a_i x p at every node of the evaluation grid.
    """
    if eval_grid is None:
        eval_grid = build_grid(24)
    axes, probes = _axis_probes(rotation)
    pairs = [(i, j) for i in range(3) for j in range(i, 3)]
    gram_fns = {}
    for i, j in pairs:
        est = cocycle_estimate(q_low, probes[i], probes[j])
        if q_high is not None:
            est = cocycle_extrapolate(est, cocycle_estimate(q_high, probes[i], probes[j]))
        gram_fns[(i, j)] = est.c_plus

    n = eval_grid.size
    pts = eval_grid.vectors
    theta_hat, phi_hat = frame_vectors(eval_grid.theta, eval_grid.phi)
    # frame components of sgrad u_i = 2 a_i x p
    comp_a = np.empty((n, 3))
    comp_b = np.empty((n, 3))
    for i in range(3):
        field = 2.0 * np.cross(np.broadcast_to(axes[:, i], pts.shape), pts)
        comp_a[:, i] = np.einsum("nd,nd->n", field, theta_hat) / np.sqrt(2.0)
        comp_b[:, i] = np.einsum("nd,nd->n", field, phi_hat) / np.sqrt(2.0)

    design = np.empty((n, len(pairs), 3))
    target = np.empty((n, len(pairs)))
    for row, (i, j) in enumerate(pairs):
        design[:, row, 0] = comp_a[:, i] * comp_a[:, j]
        design[:, row, 1] = comp_a[:, i] * comp_b[:, j] + comp_a[:, j] * comp_b[:, i]
        design[:, row, 2] = comp_b[:, i] * comp_b[:, j]
        target[:, row] = -2.0 * gram_fns[(i, j)].values_on(eval_grid)
    lhs = np.einsum("nra,nrb->nab", design, design)
    rhs = np.einsum("nra,nr->na", design, target)
    sol = np.linalg.solve(lhs, rhs[..., None])[..., 0]
    gmat = np.empty((n, 2, 2))
    gmat[:, 0, 0] = sol[:, 0]
    gmat[:, 0, 1] = gmat[:, 1, 0] = sol[:, 1]
    gmat[:, 1, 1] = sol[:, 2]
    return MetricField(
        theta=eval_grid.theta, phi=eval_grid.phi, weights=eval_grid.weights, G=gmat
    )


def total_unsharpness(field):
    """Volume of the unsharpness metric against the symplectic volume 2 pi."""
    return float(2.0 * np.pi * np.dot(field.weights, field.sqrt_det))


METRIC_CSV_COLUMNS = (
    "theta,phi,G11,G12,G22,J11,J12,J21,J22,rho11,rho12,rho22,sqrt_detG"
)


def metric_to_csv(field, path):
    decomp = metric_decompose(field)
    s = field.sqrt_det
    with open(path, "w") as fh:
        fh.write(METRIC_CSV_COLUMNS + "\n")
        for q in range(field.theta.size):
            row = [
                field.theta[q], field.phi[q],
                field.G[q, 0, 0], field.G[q, 0, 1], field.G[q, 1, 1],
                decomp.J[q, 0, 0], decomp.J[q, 0, 1],
                decomp.J[q, 1, 0], decomp.J[q, 1, 1],
                decomp.rho[q, 0, 0], decomp.rho[q, 0, 1], decomp.rho[q, 1, 1],
                s[q],
            ]
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")


def metric_from_csv(path):
    with open(path) as fh:
        header = fh.readline().strip()
        if header != METRIC_CSV_COLUMNS:
            raise ValueError("unexpected metric csv header")
        rows = np.array([[float(x) for x in line.split(",")] for line in fh if line.strip()])
    return {name: rows[:, i] for i, name in enumerate(METRIC_CSV_COLUMNS.split(","))}
