"""Finite-outcome positive operator valued measures and their dilations.

A quantizer built on a quadrature grid is, read backwards, a measurement:
one positive operator per grid node, summing to the identity. This module
materializes that family, embeds it isometrically into a larger space where
the measurement becomes projective, and verifies the two operational facts
that drive the least-unsharpness story: the noise operator inequality and
the decomposition of outcome variance into quantum and measurement parts.

Everything here is agnostic to the sphere; outcome functions are plain value
arrays, one entry per outcome.
"""
from dataclasses import dataclass

import numpy as np

from .operator_core import check_density, hermitize, spectral_norm
from .sphere_fn import multiply

PSD_TOL = 1e-12
RESOLUTION_TOL = 1e-10
MAX_ELEMENT_ENTRIES = 60_000_000


@dataclass(frozen=True)
class DiscretePOVM:
    """Positive operators elements[q] with sum = identity; labels per outcome."""

    elements: np.ndarray  # (n_outcomes, dim, dim) complex
    labels: np.ndarray = None

    @property
    def n_outcomes(self):
        return self.elements.shape[0]

    @property
    def dim(self):
        return self.elements.shape[1]

    def resolution_residual(self):
        total = self.elements.sum(axis=0)
        return spectral_norm(total - np.eye(self.dim))

    def min_element_eigenvalue(self):
        worst = np.inf
        for f_q in self.elements:
            worst = min(worst, float(np.linalg.eigvalsh(hermitize(f_q))[0]))
        return worst

    def validate(self, psd_tol=PSD_TOL, sum_tol=RESOLUTION_TOL):
        low = self.min_element_eigenvalue()
        if low < -psd_tol:
            raise ValueError(f"POVM element negative beyond tolerance: {low}")
        resid = self.resolution_residual()
        if resid > sum_tol:
            raise ValueError(f"POVM does not resolve the identity: {resid}")
        return low, resid

    def integrate(self, values):
        """Sum of values[q] * elements[q]; the measurement's operator moment."""
        values = np.asarray(values)
        if values.shape != (self.n_outcomes,):
            raise ValueError("one outcome value per element required")
        return np.einsum("q,qmn->mn", values, self.elements)


def discretize_povm(quantizer):
    """Outcome family F_q with quantize(f) = sum f(label_q) F_q.

    For the plain kind the elements are the weighted coherent projectors at
    the grid nodes. Point-relabeling kinds keep the same projectors under
    transported labels; kernel kinds mix the projectors by a row-stochastic
    matrix, which keeps positivity and the exact resolution of identity.
    """
    if not quantizer.is_povm:
        raise ValueError(f"quantizer kind {quantizer.kind!r} is not a POVM")
    n = quantizer.grid.size
    dim = quantizer.dim
    if n * dim * dim > MAX_ELEMENT_ENTRIES:
        raise ValueError("POVM too large to materialize; use a smaller level")
    coh = quantizer._coh
    projectors = np.einsum(
        "q,qm,qn->qmn", quantizer.point_weights, coh, coh.conj()
    )
    labels = quantizer.grid.vectors
    mix = None
    if hasattr(quantizer, "discrete_kernel"):
        labels, mix = quantizer.discrete_kernel()
    if mix is not None:
        projectors = np.einsum("qr,qmn->rmn", mix, projectors)
    return DiscretePOVM(elements=projectors, labels=labels)


def _psd_sqrt(matrix, clamp_tol=PSD_TOL):
    vals, vecs = np.linalg.eigh(hermitize(matrix))
    if vals[0] < -clamp_tol:
        raise ValueError(f"matrix not positive within tolerance: {vals[0]}")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


@dataclass(frozen=True)
class NaimarkDilation:
    """Isometry V stacking the square roots F_q^{1/2}, one block per outcome.

    The dilated space is n_outcomes copies of the original one; the projective
    measurement up there is "which block", and compressing it back through V
    recovers the POVM.
    """

    isometry: np.ndarray  # (n_outcomes * dim, dim)
    n_outcomes: int
    dim: int

    def isometry_residual(self):
        v = self.isometry
        return spectral_norm(v.conj().T @ v - np.eye(self.dim))

    def block(self, q):
        return self.isometry[q * self.dim : (q + 1) * self.dim]

    def compressed_element(self, q):
        """Pi P_q Pi* = (block q)† (block q); must reproduce F_q."""
        b = self.block(q)
        return b.conj().T @ b

    def dilated_observable_compressed(self, values):
        """Pi (sum values[q] P_q) Pi* without forming the big matrix."""
        scaled = self._scale_blocks(values)
        return self.isometry.conj().T @ scaled

    def _scale_blocks(self, values):
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (self.n_outcomes,):
            raise ValueError("one value per outcome required")
        return np.repeat(values, self.dim)[:, None] * self.isometry

    def q_pairing(self, u_values, v_values):
        """V† S_u (1 - VV†) S_v V, the defect pairing of two outcome symbols.

        Computed column-block-wise so the (n*dim)^2 projector never exists.
        """
        a_u = self._scale_blocks(u_values)
        a_v = self._scale_blocks(v_values)
        a_v_perp = a_v - self.isometry @ (self.isometry.conj().T @ a_v)
        return a_u.conj().T @ a_v_perp


def naimark_dilate(povm):
    povm.validate()
    blocks = [_psd_sqrt(f_q) for f_q in povm.elements]
    return NaimarkDilation(
        isometry=np.vstack(blocks), n_outcomes=povm.n_outcomes, dim=povm.dim
    )


def noise_operator_discrete(povm, values):
    """Second moment minus squared first moment of the outcome family."""
    values = np.asarray(values, dtype=np.float64)
    first = povm.integrate(values)
    second = povm.integrate(values**2)
    return hermitize(second - first @ first)


def noise_operator_sampled(quantizer, values):
    """Same quantity straight from a quantizer's grid samples."""
    values = np.asarray(values, dtype=np.float64)
    first = quantizer.quantize_samples(values)
    second = quantizer.quantize_samples(values**2)
    return hermitize(second - first @ first)


def _trace_with(op, state):
    return np.trace(op @ state)


def noise_inequality_terms(delta_u, delta_v, op_u, op_v, state):
    lhs = float(_trace_with(delta_u, state).real) * float(_trace_with(delta_v, state).real)
    comm = op_u @ op_v - op_v @ op_u
    rhs = 0.25 * abs(_trace_with(comm, state)) ** 2
    return lhs, rhs


def verify_noise_inequality(povm, u_values, v_values, state):
    """Signed slack of tr(D_u s) tr(D_v s) >= |tr([U,V] s)|^2 / 4."""
    check_density(state)
    op_u = povm.integrate(np.asarray(u_values, dtype=np.float64))
    op_v = povm.integrate(np.asarray(v_values, dtype=np.float64))
    lhs, rhs = noise_inequality_terms(
        noise_operator_discrete(povm, u_values),
        noise_operator_discrete(povm, v_values),
        op_u,
        op_v,
        state,
    )
    return lhs - rhs


def noise_trial_rows(quantizer, n_trials, seed=0, band=4):
    """Randomized noise-inequality trials on a quantizer's sampled POVM.

    Uses the algebraic form of the noise operator so no outcome family is
    materialized; returns (trial, k, slack, lhs, rhs) rows.
    """
    from .operator_core import random_density
    from .sphere_fn import random_function

    rng = np.random.default_rng(seed)
    rows = []
    for trial in range(n_trials):
        u = random_function(band, seed=int(rng.integers(2**31)))
        v = random_function(band, seed=int(rng.integers(2**31)))
        state = random_density(quantizer.dim, seed=int(rng.integers(2**31)))
        u_vals = quantizer.pre_samples(u)
        v_vals = quantizer.pre_samples(v)
        lhs, rhs = noise_inequality_terms(
            noise_operator_sampled(quantizer, u_vals),
            noise_operator_sampled(quantizer, v_vals),
            quantizer.quantize_samples(u_vals),
            quantizer.quantize_samples(v_vals),
            state,
        )
        rows.append((trial, quantizer.k, lhs - rhs, lhs, rhs))
    return rows


def write_trial_csv(path, rows):
    with open(path, "w") as fh:
        fh.write("trial,k,slack,lhs,rhs\n")
        for trial, k, slack, lhs, rhs in rows:
            fh.write(
                f"{trial},{k},{slack:.17g},{lhs:.17g},{rhs:.17g}\n"
            )


def operator_variance(op, state):
    mean = float(_trace_with(op, state).real)
    return float(_trace_with(op @ op, state).real) - mean**2


def variance_identity_check(quantizer, f, state):
    """|Var(outcomes) - Var(operator) - tr(noise * state)|; zero in theory."""
    check_density(state)
    f2 = multiply(f, f)
    op = quantizer.quantize(f)
    op2 = quantizer.quantize(f2)
    mean = float(_trace_with(op, state).real)
    var_outcomes = float(_trace_with(op2, state).real) - mean**2
    var_operator = operator_variance(op, state)
    noise = float(_trace_with(op2 - op @ op, state).real)
    return abs(var_outcomes - var_operator - noise)


def coherent_state_variance(quantizer, f, point):
    """Operator variance of quantize(f) in the coherent state at point."""
    from .quantization import coherent_state

    psi = coherent_state(quantizer.k, point)
    op = quantizer.quantize(f)
    mean = float(np.real(psi.conj() @ (op @ psi)))
    second = float(np.real(psi.conj() @ (op @ (op @ psi))))
    return second - mean**2
