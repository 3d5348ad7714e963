"""Shared numerical utilities: quadrature grids, Lanczos tridiagonalization,
exact-rational linear algebra, and the extended-precision context.

Precision tiers used across the package:

* ``double``   -- hardware float64 / complex128,
* ``extended`` -- mpmath at ``EXTENDED_DPS`` significant digits,
* ``exact``    -- ``fractions.Fraction`` (only for weights with rational
  moments).
"""

from __future__ import annotations

import functools
from fractions import Fraction

import mpmath as mp
import numpy as np
from scipy.special import roots_legendre

from .errors import RhopError

DOUBLE = "double"
EXTENDED = "extended"
EXACT = "exact"
PRECISIONS = (DOUBLE, EXTENDED, EXACT)

EXTENDED_DPS = 30


def extended_ctx(dps=EXTENDED_DPS):
    """Context manager setting the mpmath working precision."""
    return mp.workdps(dps)


@functools.lru_cache(maxsize=64)
def _gl_rule(order):
    x, w = roots_legendre(order)
    return x, w


@functools.lru_cache(maxsize=256)
def composite_gl(a, b, panels, order=20):
    """Composite Gauss-Legendre nodes/weights on [a, b] with equal panels."""
    x0, w0 = _gl_rule(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
    weights = (half[:, None] * w0[None, :]).ravel()
    return nodes, weights


def trig_grid(m):
    """Uniform grid theta_j = 2*pi*j/m, j = 0..m-1."""
    return 2.0 * np.pi * np.arange(m) / m


def fourier_coefficients(values, kmax):
    """Coefficients c_k = (1/m) sum_j values_j exp(-i k theta_j), |k| <= kmax.

    Returned as an array indexed k = -kmax..kmax (offset kmax); spectrally
    accurate trapezoid sums for smooth periodic data.
    """
    m = len(values)
    if 2 * kmax >= m:
        raise RhopError("grid underresolved", module="numeric")
    f = np.fft.fft(np.asarray(values)) / m
    out = np.empty(2 * kmax + 1, dtype=complex)
    for k in range(-kmax, kmax + 1):
        out[k + kmax] = f[k % m]
    return out


def double_factorial(n):
    """n!! with (-1)!! = 1."""
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def lanczos_tridiag(atoms, weights, n):
    """Recurrence coefficients of the measure sum_i weights_i * delta(atoms_i).

    Lanczos with full reorthogonalization on diag(atoms) started from
    sqrt(weights); returns (a[0..n-1], b[0..n-2]).  This is the map from a
    discrete measure to its Jacobi data, stable for n well below the number
    of distinct atoms.
    """
    atoms = np.asarray(atoms, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if n > len(atoms):
        raise RhopError(
            f"need at least {n} atoms for {n} recurrence coefficients",
            module="numeric",
        )
    q = np.sqrt(weights)
    norm0 = np.linalg.norm(q)
    q = q / norm0
    basis = [q]
    a = np.zeros(n)
    b = np.zeros(max(n - 1, 0))
    for j in range(n):
        v = atoms * basis[j]
        a[j] = basis[j] @ v
        v = v - a[j] * basis[j]
        if j > 0:
            v = v - b[j - 1] * basis[j - 1]
        # two rounds of reorthogonalization keep the basis orthonormal
        for _ in range(2):
            for u in basis:
                v -= (u @ v) * u
        if j == n - 1:
            break
        nv = np.linalg.norm(v)
        if nv <= 1e-14 * max(1.0, np.abs(atoms).max()):
            raise RhopError(
                f"precision exhausted at degree {j + 1}",
                module="numeric",
                partial=(a[: j + 1], b[:j]),
            )
        b[j] = nv
        basis.append(v / nv)
    return a, b


def lanczos_tridiag_mp(atoms, weights, n):
    """mpmath variant of :func:`lanczos_tridiag` (atoms/weights are mpf lists)."""
    m = len(atoms)
    if n > m:
        raise RhopError("not enough atoms", module="numeric")
    q = [mp.sqrt(w) for w in weights]
    norm0 = mp.sqrt(mp.fsum(x * x for x in q))
    q = [x / norm0 for x in q]
    basis = [q]
    a = [mp.mpf(0)] * n
    b = [mp.mpf(0)] * max(n - 1, 0)

    def dot(u, v):
        return mp.fsum(ui * vi for ui, vi in zip(u, v))

    for j in range(n):
        v = [atoms[i] * basis[j][i] for i in range(m)]
        a[j] = dot(basis[j], v)
        v = [v[i] - a[j] * basis[j][i] for i in range(m)]
        if j > 0:
            v = [v[i] - b[j - 1] * basis[j - 1][i] for i in range(m)]
        for _ in range(2):
            for u in basis:
                c = dot(u, v)
                v = [v[i] - c * u[i] for i in range(m)]
        if j == n - 1:
            break
        nv = mp.sqrt(dot(v, v))
        if nv <= mp.mpf(10) ** (-mp.mp.dps + 5):
            raise RhopError(
                f"precision exhausted at degree {j + 1}", module="numeric"
            )
        b[j] = nv
        basis.append([v[i] / nv for i in range(m)])
    return a, b


def fraction_det(rows):
    """Exact determinant of a square matrix of Fractions (Bareiss algorithm)."""
    a = [list(map(Fraction, r)) for r in rows]
    n = len(a)
    if n == 0:
        return Fraction(1)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def as_float(x):
    """Convert double/mpf/Fraction scalars to float."""
    if isinstance(x, Fraction):
        return x.numerator / x.denominator
    return float(x)
