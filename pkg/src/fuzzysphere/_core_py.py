"""Pure-numpy kernel reference: normalized spherical harmonics and coherent amplitudes.

Conventions used everywhere in the package:

* Real harmonics are orthonormal for the NORMALIZED sphere measure (total mass 1).
  Column layout is idx(l, m) = l*l + l + m with cos(m phi) at +m and sin(m phi)
  at -m. The theta part is the fully normalized associated Legendre chain
  N(0,0)=1, N(1,1)=sqrt(3) sin(theta), so e.g. Y(1,0)=sqrt(3) cos(theta).
* Coherent amplitudes at level k follow the binomial square-root convention
  c_m = sqrt(C(k,m)) cos(theta/2)^(k-m) (sin(theta/2) e^(i phi))^m, m = 0..k.

The compiled module `_core` exports the same basis/synth/coherent signatures;
`backend.py` picks whichever is importable. The derivative kernel only exists
here because it never sits on a hot path.
"""
import numpy as np
from scipy.special import gammaln


def _chain_coeffs(l, m):
    # upward three-term recurrence at fixed m: N(l) = a*(t*N(l-1) - b*N(l-2))
    a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
    b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
    return a, b


def _prepare(theta, phi):
    theta = np.ascontiguousarray(theta, dtype=np.float64).ravel()
    phi = np.ascontiguousarray(phi, dtype=np.float64).ravel()
    if theta.shape != phi.shape:
        raise ValueError("theta and phi must have matching shapes")
    return theta, phi


def basis(lmax, theta, phi):
    """Real orthonormal harmonic matrix, shape (npts, (lmax+1)**2)."""
    theta, phi = _prepare(theta, phi)
    n = theta.size
    t = np.cos(theta)
    u = np.sin(theta)
    out = np.empty((n, (lmax + 1) ** 2))
    sect = np.ones(n)
    for m in range(lmax + 1):
        if m == 1:
            sect = np.sqrt(3.0) * u * sect
        elif m > 1:
            sect = np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * u * sect
        if m == 0:
            cosm = None
            sinm = None
        else:
            cosm = np.cos(m * phi)
            sinm = np.sin(m * phi)
        prev2 = None
        prev = sect
        for l in range(m, lmax + 1):
            if l == m:
                val = sect
            elif l == m + 1:
                val = np.sqrt(2.0 * m + 3.0) * t * prev
            else:
                a, b = _chain_coeffs(l, m)
                val = a * (t * prev - b * prev2)
            if l > m:
                prev2 = prev
                prev = val
            base = l * l + l
            if m == 0:
                out[:, base] = val
            else:
                out[:, base + m] = val * cosm
                out[:, base - m] = val * sinm
    return out


def basis_dtheta(lmax, theta, phi):
    """Elementwise d/dtheta of basis(); same shape and layout."""
    theta, phi = _prepare(theta, phi)
    n = theta.size
    t = np.cos(theta)
    u = np.sin(theta)
    if np.any(u == 0.0):
        raise ValueError("theta derivative synthesis is undefined at the poles")
    out = np.empty((n, (lmax + 1) ** 2))
    sect = np.ones(n)
    for m in range(lmax + 1):
        if m == 1:
            sect = np.sqrt(3.0) * u * sect
        elif m > 1:
            sect = np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * u * sect
        if m == 0:
            cosm = None
            sinm = None
        else:
            cosm = np.cos(m * phi)
            sinm = np.sin(m * phi)
        prev2 = None
        prev = sect
        for l in range(m, lmax + 1):
            if l == m:
                val = sect
            elif l == m + 1:
                val = np.sqrt(2.0 * m + 3.0) * t * prev
            else:
                a, b = _chain_coeffs(l, m)
                val = a * (t * prev - b * prev2)
            if l == m:
                dval = (l * t / u) * val if l > 0 else np.zeros(n)
            else:
                # d/dtheta N(l,m) = (l t N(l,m) - f(l,m) N(l-1,m)) / sin(theta)
                f = np.sqrt((l * l - m * m) * (2.0 * l + 1.0) / (2.0 * l - 1.0))
                dval = (l * t * val - f * prev) / u
            if l > m:
                prev2 = prev
                prev = val
            base = l * l + l
            if m == 0:
                out[:, base] = dval
            else:
                out[:, base + m] = dval * cosm
                out[:, base - m] = dval * sinm
    return out


def synth(coeffs, lmax, theta, phi):
    """Evaluate sum_lm coeffs[lm] Y_lm at scattered points without a full basis matrix."""
    theta, phi = _prepare(theta, phi)
    coeffs = np.asarray(coeffs, dtype=np.float64).ravel()
    if coeffs.size != (lmax + 1) ** 2:
        raise ValueError("coefficient vector does not match lmax")
    n = theta.size
    t = np.cos(theta)
    u = np.sin(theta)
    out = np.zeros(n)
    sect = np.ones(n)
    for m in range(lmax + 1):
        if m == 1:
            sect = np.sqrt(3.0) * u * sect
        elif m > 1:
            sect = np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * u * sect
        if m == 0:
            azim = None
        else:
            # skip the whole m chain when no coefficient touches it
            live = any(
                coeffs[l * l + l + m] != 0.0 or coeffs[l * l + l - m] != 0.0
                for l in range(m, lmax + 1)
            )
            if not live:
                continue
            azim = np.cos(m * phi)
            azim_s = np.sin(m * phi)
        prev2 = None
        prev = sect
        for l in range(m, lmax + 1):
            if l == m:
                val = sect
            elif l == m + 1:
                val = np.sqrt(2.0 * m + 3.0) * t * prev
            else:
                a, b = _chain_coeffs(l, m)
                val = a * (t * prev - b * prev2)
            if l > m:
                prev2 = prev
                prev = val
            base = l * l + l
            if m == 0:
                c = coeffs[base]
                if c != 0.0:
                    out += c * val
            else:
                cp = coeffs[base + m]
                cm = coeffs[base - m]
                if cp != 0.0:
                    out += cp * val * azim
                if cm != 0.0:
                    out += cm * val * azim_s
    return out


def coherent(k, theta, phi):
    """Coherent amplitude matrix, shape (npts, k+1), complex128."""
    theta, phi = _prepare(theta, phi)
    n = theta.size
    m = np.arange(k + 1)
    half = 0.5 * theta
    c = np.cos(half)
    s = np.sin(half)
    logbin = 0.5 * (gammaln(k + 1.0) - gammaln(m + 1.0) - gammaln(k - m + 1.0))
    out = np.zeros((n, k + 1), dtype=np.complex128)
    interior = (s > 0.0) & (c > 0.0)
    if np.any(interior):
        lc = np.log(c[interior])
        ls = np.log(s[interior])
        logmag = logbin[None, :] + np.outer(lc, k - m) + np.outer(ls, m)
        out[interior] = np.exp(logmag) * np.exp(1j * np.outer(phi[interior], m))
    north = s == 0.0
    if np.any(north):
        out[north, 0] = 1.0
    south = c == 0.0
    if np.any(south):
        out[south, k] = np.exp(1j * k * phi[south])
    return out
