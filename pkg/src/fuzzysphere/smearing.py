"""Derived quantizers: heat-smeared, metaplectic, point-flow twisted, and
anisotropic-Gaussian (Markov kernel) kinds.

Each derived quantizer is the standard positive quantizer composed with a
pre-map on classical functions. The pre-map fixes constants; for the kinds
that stay positive (heat, twist, markov) it also preserves pointwise
non-negativity, so the composite is again a POVM integration. The metaplectic
kind adds a quarter-Laplacian correction instead and gives up positivity on
purpose; it is tagged accordingly.

All tangent-plane work happens in the orthonormal frame of the half-round
metric, (e_theta, e_phi) = sqrt(2) (theta_hat, phi_hat), in which the complex
structure is J = [[0, 1], [-1, 0]] and round distance is sqrt(2) |Z|.
"""
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .quantization import ToeplitzQuantizer, rotation_unitary
from .sphere_fn import (
    angles_from_vectors,
    build_grid,
    constant,
    dphi_coeffs,
    heat_flow,
    laplacian,
    project,
    rodrigues,
)

DEFAULT_CUTOFF = np.pi / 4
DEFAULT_GH_ORDER = 20
FRAME_J = np.array([[0.0, 1.0], [-1.0, 0.0]])


# -- rho fields --------------------------------------------------------------


@dataclass(frozen=True)
class RhoField:
    """Pointwise symmetric 2x2 form in the (e_theta, e_phi) frame."""

    matrix_at: object  # callable (theta, phi) -> (n, 2, 2)
    tag: str = "custom"

    def __call__(self, theta, phi):
        out = np.asarray(self.matrix_at(theta, phi), dtype=np.float64)
        if out.shape != (np.asarray(theta).size, 2, 2):
            raise ValueError("rho callback must return (n, 2, 2)")
        sym_err = np.max(np.abs(out - np.swapaxes(out, 1, 2)))
        if sym_err > 1e-12:
            raise ValueError("rho must be symmetric")
        low = np.linalg.eigvalsh(out)[:, 0]
        if np.any(low < -1e-12):
            raise ValueError("rho must be positive semidefinite")
        return out


def rho_isotropic(s):
    """rho = s * g_p, a constant multiple of the background metric."""
    if s < 0:
        raise ValueError("isotropic scale must be >= 0")

    def cb(theta, phi):
        n = np.asarray(theta).size
        return s * np.broadcast_to(np.eye(2), (n, 2, 2)).copy()

    return RhoField(cb, tag=f"iso:{s:g}")


def rho_zz(s):
    """rho = s * dz (x) dz restricted to the tangent planes; rank one.

    dz(e_theta) = -sqrt(2) sin(theta), dz(e_phi) = 0, so the frame matrix is
    diag(2 s sin^2 theta, 0): an equator-concentrated rank-one field.
    """
    if s < 0:
        raise ValueError("zz scale must be >= 0")

    def cb(theta, phi):
        theta = np.asarray(theta, dtype=np.float64)
        out = np.zeros((theta.size, 2, 2))
        out[:, 0, 0] = 2.0 * s * np.sin(theta) ** 2
        return out

    return RhoField(cb, tag=f"zz:{s:g}")


def rho_from_grid_csv(path):
    """Per-node rho from a CSV with columns theta,phi,r11,r12,r22.

    Values are matched to query points by nearest node; intended for fields
    sampled on the same grid they will be evaluated on.
    """
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    nodes = rows[:, :2]
    comps = rows[:, 2:5]

    def cb(theta, phi):
        theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
        phi = np.atleast_1d(np.asarray(phi, dtype=np.float64))
        d2 = (nodes[None, :, 0] - theta[:, None]) ** 2 + (
            np.mod(nodes[None, :, 1] - phi[:, None] + np.pi, 2 * np.pi) - np.pi
        ) ** 2
        pick = comps[np.argmin(d2, axis=1)]
        out = np.empty((theta.size, 2, 2))
        out[:, 0, 0] = pick[:, 0]
        out[:, 0, 1] = out[:, 1, 0] = pick[:, 1]
        out[:, 1, 1] = pick[:, 2]
        return out

    return RhoField(cb, tag=path)


def expected_markov_metric(rho):
    """Frame-matrix callback for the predicted metric g_p + rho."""

    def cb(theta, phi):
        n = np.asarray(theta).size
        return np.broadcast_to(np.eye(2), (n, 2, 2)) + rho(theta, phi)

    return cb


# -- the smeared quantizer container -----------------------------------------


@dataclass
class SmearedQuantizer(ToeplitzQuantizer):
    """Standard quantizer precomposed with a function transform.

    pre_map(f, grid) returns the transformed samples on the grid; the rest of
    the machinery (integration, dequantization, traces) is inherited, since
    symbols and coherent states are those of the base kind.
    """

    pre_map: object = None
    params: dict = field(default_factory=dict)
    profile_fn: object = None
    kernel_fn: object = None

    def __post_init__(self):
        super().__post_init__()
        if self.pre_map is None:
            raise ValueError("smeared quantizer needs a pre-map")

    def pre_samples(self, f):
        if f.band_limit > self.band_max:
            raise ValueError("function band exceeds quantizer band_max")
        return self.pre_map(f, self.grid)

    def rawnsley_prediction(self):
        if self.profile_fn is None:
            return constant(1.0)
        return self.profile_fn()

    def cocycle_candidate(self, f, g):
        from .sphere_fn import SphereFunction, grad_pairing, poisson_bracket
        from .unsharpness import metric_pairing

        c_minus = 0.5 * poisson_bracket(f, g)
        if self.kind == "heat":
            scale = 1.0 + 4.0 * self.params["t"]
            return -0.5 * scale * grad_pairing(f, g), c_minus
        if self.kind == "metaplectic":
            return SphereFunction.zero(f.band_limit + g.band_limit), c_minus
        if self.kind == "markov" and "rho_field" in self.params:
            rho = self.params["rho_field"]

            def metric(theta, phi):
                n = np.asarray(theta).size
                return np.broadcast_to(np.eye(2), (n, 2, 2)) + rho(theta, phi)

            return metric_pairing(f, g, metric), c_minus
        return -0.5 * grad_pairing(f, g), c_minus

    def discrete_kernel(self):
        """Outcome labels and optional row-stochastic projector mixing."""
        if self.kernel_fn is None:
            return self.grid.vectors, None
        return self.kernel_fn()


def _base_fields(base):
    return dict(k=base.k, band_max=base.band_max, grid=base.grid, _coh=base._coh)


# -- heat kind ----------------------------------------------------------------


def heat_quantizer(base, t):
    """Quantize the heat-flowed function, time t/k."""
    if t < 0:
        raise ValueError("heat time must be >= 0")

    def pre(f, grid):
        return heat_flow(f, t / base.k).values_on(grid)

    q = SmearedQuantizer(
        kind="heat",
        is_povm=True,
        pre_map=pre,
        params={"t": t},
        **_base_fields(base),
    )
    q.kernel_fn = lambda: (q.grid.vectors, _heat_kernel_rows(q, t))
    return q


def _heat_kernel_rows(quantizer, t):
    """Row-stochastic spectral heat kernel on the grid, w.r.t. the weights.

    The truncated spectral kernel can dip slightly negative between nodes;
    clamping and renormalizing keeps the mixing matrix stochastic, which is
    what the POVM materialization needs exactly.
    """
    tau = t / quantizer.k
    if tau <= 0:
        return None
    lmax = 1
    while 2 * lmax * (lmax + 1) * tau < 34.5 and lmax < 400:
        lmax += 1
    coeffs = np.array(
        [np.exp(-2.0 * l * (l + 1) * tau) * (2 * l + 1) for l in range(lmax + 1)]
    )
    pts = quantizer.grid.vectors
    cosine = np.clip(pts @ pts.T, -1.0, 1.0)
    rows = np.polynomial.legendre.legval(cosine, coeffs)
    np.clip(rows, 0.0, None, out=rows)
    rows *= quantizer.grid.weights[None, :]
    rows /= rows.sum(axis=1, keepdims=True)
    return rows


# -- metaplectic kind ---------------------------------------------------------


def metaplectic_quantizer(base):
    """Quantize f + (hbar/4) laplacian(f); unital but not positive."""

    def pre(f, grid):
        corrected = f + (1.0 / (4.0 * base.k)) * laplacian(f)
        return corrected.values_on(grid)

    return SmearedQuantizer(
        kind="metaplectic",
        is_povm=False,
        pre_map=pre,
        params={},
        **_base_fields(base),
    )


def metaplectic_positivity_witness(quantizer, band=2, seed=0, attempts=200):
    """A non-negative function whose metaplectic operator has a negative mode.

    ((1+z)/2)^2 is already a witness at every level; the search confirms it
    or finds another among random non-negative band-limited functions.
    """
    from .sphere_fn import coordinate, multiply, random_function

    half = 0.5 * (constant(1.0) + coordinate(2))
    candidates = [multiply(half, half)]
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        g = random_function(band, seed=int(rng.integers(2**31)))
        candidates.append(multiply(g, g))
    for f in candidates:
        op = quantizer.quantize(f)
        low = float(np.linalg.eigvalsh(op)[0])
        if low < -1e-13:
            return f, low
    return None, 0.0


# -- twist kind ---------------------------------------------------------------


def _rotation_field(coeffs):
    a = np.asarray(coeffs, dtype=np.float64)

    def v(points):
        return np.cross(np.broadcast_to(a, points.shape), points)

    return v


def _gradient_field(h):
    """Ambient g_p-gradient of h: twice the round-sphere gradient."""
    lmax = h.band_limit

    def v(points):
        # integrator midpoints sit slightly off the sphere; extend radially
        points = points / np.linalg.norm(points, axis=1, keepdims=True)
        theta, phi = angles_from_vectors(points)
        bt = backend.basis_dtheta(lmax, theta, phi)
        dt = bt @ h.coeffs
        dp = backend.synth(dphi_coeffs(h).coeffs, lmax, theta, phi)
        ct, st = np.cos(theta), np.sin(theta)
        cp, sp = np.cos(phi), np.sin(phi)
        theta_hat = np.stack([ct * cp, ct * sp, -st], axis=1)
        phi_hat = np.stack([-sp, cp, np.zeros_like(sp)], axis=1)
        return 2.0 * (theta_hat * dt[:, None] + phi_hat * (dp / st)[:, None])

    return v


def _flow_points(points, velocity, time, n_steps):
    """Classic fourth-order integrator on the sphere, renormalized stepwise."""
    x = np.array(points, dtype=np.float64)
    h = time / n_steps
    for _ in range(n_steps):
        k1 = velocity(x)
        k2 = velocity(x + 0.5 * h * k1)
        k3 = velocity(x + 0.5 * h * k2)
        k4 = velocity(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x


def vector_twist_quantizer(base, rotation=(0.0, 0.0, 0.0), potential=None):
    """Quantize f pulled back by the time-(-hbar) flow of the field.

    The field is rotation[0..2] paired with the ambient rotation generators,
    plus optionally the g_p-gradient of a potential function. Pure rotations
    flow in closed form; anything else integrates with 8 fourth-order steps.
    """
    rotation = np.asarray(rotation, dtype=np.float64)
    hbar = 1.0 / base.k
    pts = base.grid.vectors
    if potential is None:
        speed = np.linalg.norm(rotation)
        if speed == 0.0:
            moved = pts.copy()
        else:
            moved = pts @ rodrigues(rotation / speed, -hbar * speed).T
        div_profile = None
    else:
        grad_v = _gradient_field(potential)
        rot_v = _rotation_field(rotation)
        moved = _flow_points(pts, lambda x: rot_v(x) + grad_v(x), -hbar, 8)
        div_profile = -1.0 * laplacian(potential)

    theta_m, phi_m = angles_from_vectors(moved)

    def pre(f, grid):
        return backend.synth(f.coeffs, f.band_limit, theta_m, phi_m)

    def profile():
        if div_profile is None:
            return constant(1.0)
        return constant(1.0) + div_profile

    q = SmearedQuantizer(
        kind="twist",
        is_povm=True,
        pre_map=pre,
        params={"rotation": tuple(rotation), "potential": potential},
        profile_fn=profile,
        **_base_fields(base),
    )
    q.kernel_fn = lambda: (moved, None)
    return q


# -- markov (anisotropic Gaussian) kind ----------------------------------------


def smooth_cutoff(r, eps):
    """Even bump: 1 on [0, eps/2], 0 beyond eps, exp(-1/s) transition."""
    r = np.asarray(r, dtype=np.float64)
    out = np.zeros_like(r)
    out[r <= eps / 2] = 1.0
    mid = (r > eps / 2) & (r < eps)
    s = (r[mid] - eps / 2) / (eps / 2)
    a = np.exp(-1.0 / (1.0 - s))
    b = np.exp(-1.0 / s)
    out[mid] = a / (a + b)
    return out


def _covariance_matrices(rho, t, theta, phi):
    """A_t = t (-pi J rho J + t I) in the frame, batched over points."""
    rmat = rho(theta, phi)
    m = np.empty_like(rmat)
    m[:, 0, 0] = rmat[:, 1, 1]
    m[:, 1, 1] = rmat[:, 0, 0]
    m[:, 0, 1] = m[:, 1, 0] = -rmat[:, 0, 1]
    return t * (np.pi * m + t * np.eye(2))


def markov_values(f, rho, t, theta, phi, eps=DEFAULT_CUTOFF, gh_order=DEFAULT_GH_ORDER):
    """Kernel-smeared values of f at the given points.

    At each point: diagonalize the covariance A_t, place tensor Gauss-Hermite
    nodes in the tangent plane, push them through the exponential map, and
    take the cutoff-weighted ratio, which normalizes the constant exactly.
    """
    if t <= 0:
        raise ValueError("kernel time must be > 0")
    if not 0 < eps < np.pi:
        raise ValueError("cutoff radius must sit inside the injectivity radius")
    theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    phi = np.atleast_1d(np.asarray(phi, dtype=np.float64))
    n = theta.size
    amat = _covariance_matrices(rho, t, theta, phi)
    evals, evecs = np.linalg.eigh(amat)

    xi, wt = np.polynomial.hermite.hermgauss(gh_order)
    w2 = (wt[:, None] * wt[None, :]).ravel()
    grid1 = np.repeat(xi, gh_order)
    grid2 = np.tile(xi, gh_order)
    m2 = gh_order * gh_order

    # tangent nodes Z = evecs @ diag(sqrt(a/pi)) @ xi, batched: (n, m2, 2)
    scale = np.sqrt(evals / np.pi)
    local = np.empty((n, m2, 2))
    local[:, :, 0] = scale[:, None, 0] * grid1[None, :]
    local[:, :, 1] = scale[:, None, 1] * grid2[None, :]
    znodes = np.einsum("nab,nmb->nma", evecs, local)

    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    theta_hat = np.stack([ct * cp, ct * sp, -st], axis=1)
    phi_hat = np.stack([-sp, cp, np.zeros_like(sp)], axis=1)
    center = np.stack([st * cp, st * sp, ct], axis=1)

    znorm = np.linalg.norm(znodes, axis=2)
    dist = np.sqrt(2.0) * znorm
    cut = smooth_cutoff(dist, eps)
    safe = np.where(znorm > 1e-300, znorm, 1.0)
    direction = (
        theta_hat[:, None, :] * (znodes[:, :, 0] / safe)[:, :, None]
        + phi_hat[:, None, :] * (znodes[:, :, 1] / safe)[:, :, None]
    )
    points = (
        np.cos(dist)[:, :, None] * center[:, None, :]
        + np.sin(dist)[:, :, None] * direction
    )
    points[znorm <= 1e-300] = np.broadcast_to(
        center[:, None, :], points.shape
    )[znorm <= 1e-300]

    flat = points.reshape(-1, 3)
    th_f, ph_f = angles_from_vectors(flat)
    fvals = backend.synth(f.coeffs, f.band_limit, th_f, ph_f).reshape(n, m2)
    weights = w2[None, :] * cut
    return np.einsum("nm,nm->n", weights, fvals) / weights.sum(axis=1)


def markov_smear_apply(f, rho, t, eps=DEFAULT_CUTOFF, gh_order=DEFAULT_GH_ORDER, band=None):
    """Smeared f projected back to a band-limited function."""
    if band is None:
        band = f.band_limit + 8
    grid = build_grid(2 * band)
    vals = markov_values(f, rho, t, grid.theta, grid.phi, eps=eps, gh_order=gh_order)
    return project(vals, grid, band)


def rho_quantizer(base, rho, t=None, eps=DEFAULT_CUTOFF, gh_order=DEFAULT_GH_ORDER):
    """Quantize the kernel-smeared function; t defaults to hbar."""
    t_eff = 1.0 / base.k if t is None else t

    def pre(f, grid):
        return markov_values(f, rho, t_eff, grid.theta, grid.phi, eps=eps, gh_order=gh_order)

    q = SmearedQuantizer(
        kind="markov",
        is_povm=True,
        pre_map=pre,
        params={"rho": rho.tag, "rho_field": rho, "t": t_eff, "eps": eps},
        **_base_fields(base),
    )
    q.kernel_fn = lambda: (q.grid.vectors, _markov_kernel_rows(q, rho, t_eff, eps))
    return q


def _markov_kernel_rows(quantizer, rho, t, eps):
    """Row-stochastic sphere-grid discretization of the Gaussian kernel.

    This quadratures the same tangent-plane integral over the grid nodes
    instead of Gauss-Hermite nodes (with the exponential-map Jacobian put
    back); rows are normalized exactly, so the POVM axioms hold exactly and
    the operator agreement is limited only by the cruder quadrature.
    """
    grid = quantizer.grid
    pts = grid.vectors
    amat = _covariance_matrices(rho, t, grid.theta, grid.phi)
    ainv = np.linalg.inv(amat)
    cosine = np.clip(pts @ pts.T, -1.0, 1.0)
    dist = np.arccos(cosine)

    ct, st = np.cos(grid.theta), np.sin(grid.theta)
    cp, sp = np.cos(grid.phi), np.sin(grid.phi)
    theta_hat = np.stack([ct * cp, ct * sp, -st], axis=1)
    phi_hat = np.stack([-sp, cp, np.zeros_like(sp)], axis=1)

    tangent = pts[None, :, :] - cosine[:, :, None] * pts[:, None, :]
    tnorm = np.linalg.norm(tangent, axis=2)
    safe = np.where(tnorm > 1e-300, tnorm, 1.0)
    radius = dist / np.sqrt(2.0)
    z1 = radius * np.einsum("qrd,qd->qr", tangent / safe[:, :, None], theta_hat)
    z2 = radius * np.einsum("qrd,qd->qr", tangent / safe[:, :, None], phi_hat)

    quad = (
        ainv[:, None, 0, 0] * z1 * z1
        + 2.0 * ainv[:, None, 0, 1] * z1 * z2
        + ainv[:, None, 1, 1] * z2 * z2
    )
    jac = np.where(dist > 1e-12, np.sin(dist) / np.where(dist > 1e-12, dist, 1.0), 1.0)
    rows = smooth_cutoff(dist, eps) * np.exp(-np.pi * quad) / jac
    rows *= grid.weights[None, :]
    rows /= rows.sum(axis=1, keepdims=True)
    return rows
