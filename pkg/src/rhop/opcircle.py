"""Orthogonal polynomials on the unit circle.

Verblunsky coefficients by three independent algorithms (Toeplitz
Gram-Schmidt, the Schur algorithm on series coefficients, and -- in the rhp
module -- Riemann-Hilbert extraction), the Szego recurrence, CMV matrices,
Toeplitz determinants, Schur iterates, and Wall polynomials with the
Pinter-Nevai residual contract.
"""

from __future__ import annotations

import dataclasses
import math
from fractions import Fraction

import mpmath as mp
import numpy as np

from .errors import RhopError
from .measures import (
    CIRCLE,
    MomentData,
    WeightSpec,
    circle_moments,
    toeplitz_matrix,
    trig_grid,
    weight_values,
)
from .numeric import DOUBLE, EXACT, EXTENDED, as_float, extended_ctx, fraction_det

_MODULE = "opcircle"


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

def _to_complex(x):
    if isinstance(x, mp.mpc) or isinstance(x, mp.mpf):
        return complex(x)
    return complex(x)


@dataclasses.dataclass
class VerblunskySeq:
    """Verblunsky coefficients alpha_0..alpha_{N-1} with companions.

    rho_j = sqrt(1 - |alpha_j|^2) and norming constants kappa_0..kappa_N of
    the orthonormal phi_n, with kappa_{n+1} = kappa_n / rho_n.
    """

    alpha: object
    rho: object
    kappa: object
    precision: str = DOUBLE

    @property
    def n(self):
        return len(self.alpha)

    def as_complex(self):
        return (np.array([_to_complex(x) for x in self.alpha]),
                np.array([as_float(x) for x in self.rho]),
                np.array([as_float(x) for x in self.kappa]))


@dataclasses.dataclass
class CMVMatrix:
    """Principal N x N section of the CMV matrix C = LM (no completion)."""

    mat: np.ndarray
    alpha: np.ndarray

    @property
    def n(self):
        return len(self.mat)

    def bands(self):
        out = {}
        for d in range(-2, 3):
            out[d] = np.diag(self.mat, d).copy()
        return out


@dataclasses.dataclass
class WallPair:
    """Wall polynomials A_{n-1}, B_{n-1} (ascending coefficient lists).

    Defined as the numerator/denominator of the composition of the first n
    Moebius steps of the Schur algorithm, so B_{n-1}(0) = 1.
    """

    degree: int
    a_coeffs: np.ndarray
    b_coeffs: np.ndarray


def verblunsky_from_alpha(alpha, mu0=1.0, precision=DOUBLE):
    """Assemble a VerblunskySeq from raw alpha values (kappa_0 = 1/sqrt(mu0))."""
    alpha = list(alpha)
    for a in alpha:
        if abs(a) >= 1:
            raise RhopError("Verblunsky coefficients must satisfy |alpha| < 1",
                            _MODULE)
    if precision == EXTENDED:
        rho = [mp.sqrt(1 - abs(a) ** 2) for a in alpha]
        kappa = [1 / mp.sqrt(mp.mpf(mu0))]
        for r in rho:
            kappa.append(kappa[-1] / r)
        return VerblunskySeq(alpha, rho, kappa, EXTENDED)
    alpha = np.asarray(alpha, dtype=complex)
    rho = np.sqrt(1.0 - np.abs(alpha) ** 2)
    kappa = np.empty(len(alpha) + 1)
    kappa[0] = 1.0 / math.sqrt(float(mu0))
    for j, r in enumerate(rho):
        kappa[j + 1] = kappa[j] / r
    return VerblunskySeq(alpha, rho, kappa, DOUBLE)


# ---------------------------------------------------------------------------
# Levinson-type path: Toeplitz Gram-Schmidt
# ---------------------------------------------------------------------------

def _moments_of(source, order, precision):
    if isinstance(source, MomentData):
        if source.order < order:
            raise RhopError(f"need moments through order {order}", _MODULE)
        return source
    if isinstance(source, WeightSpec):
        return circle_moments(source, order, precision=precision)
    raise RhopError("source must be a circle weight or moments", _MODULE)


def verblunsky_levinson(source, n, precision=DOUBLE):
    """Verblunsky coefficients alpha_0..alpha_{n-1} by monic Gram-Schmidt
    against the Toeplitz moment form.

    Returns the sequence together with rho_j and the norming constants
    kappa_0..kappa_n; alpha_{m-1} is read off as -conj(Phi_m(0)).  Raw
    (non-probability) weights are fine: the alphas are normalization
    invariant and the kappas refer to the raw measure.
    """
    md = _moments_of(source, n, precision)
    phis, h = _monic_phi_by_gs(md, n)
    alpha = []
    for m in range(1, n + 1):
        val = phis[m][0]
        alpha.append(-_conj_like(val))
    if md.precision == EXTENDED:
        with extended_ctx():
            rho = [mp.sqrt(1 - abs(mp.mpc(a)) ** 2) for a in alpha]
            kappa = [1 / mp.sqrt(hh) for hh in h]
            seq = VerblunskySeq(alpha, rho, kappa, EXTENDED)
    elif md.precision == EXACT:
        af = np.array([as_float(a) for a in alpha], dtype=complex)
        rho = np.sqrt(1.0 - np.abs(af) ** 2)
        kappa = np.array([1.0 / math.sqrt(as_float(x)) for x in h])
        seq = VerblunskySeq(af, rho, kappa, DOUBLE)
        seq.h_exact = h
        seq.alpha_exact = alpha
    else:
        af = np.asarray(alpha, dtype=complex)
        bad = np.abs(af) >= 1
        if np.any(bad):
            j = int(np.argmax(bad))
            raise RhopError(f"precision exhausted at degree {j + 1}", _MODULE)
        rho = np.sqrt(1.0 - np.abs(af) ** 2)
        kappa = np.array([1.0 / math.sqrt(float(x)) for x in h])
        seq = VerblunskySeq(af, rho, kappa, DOUBLE)
    seq.monic_coeffs = phis
    seq.norms_sq = h
    return seq


def _conj_like(x):
    if isinstance(x, (mp.mpc, mp.mpf)):
        return mp.conj(x)
    if isinstance(x, Fraction):
        return x
    return np.conj(x)


def _monic_phi_by_gs(md, n):
    """Monic Phi_0..Phi_n as coefficient lists, plus squared norms h_m.

    <z^j, z^k> = mu_{j-k}; positivity loss raises with a partial payload.
    """
    vals = md.values
    if md.precision == EXACT:
        zero, one = Fraction(0), Fraction(1)
        def mu(d):
            return md.value(d)
    elif md.precision == EXTENDED:
        zero, one = mp.mpc(0), mp.mpc(1)
        def mu(d):
            return mp.mpc(md.value(d))
    else:
        vals = np.asarray(vals, dtype=complex)
        zero, one = 0.0 + 0.0j, 1.0 + 0.0j
        def mu(d):
            return vals[d] if d >= 0 else np.conj(vals[-d])

    def ip(p, q):
        # <p, q> = sum conj(p_j) q_k mu_{j-k}
        acc = zero
        for j, pj in enumerate(p):
            if pj == 0:
                continue
            cpj = _conj_like(pj)
            for k, qk in enumerate(q):
                if qk == 0:
                    continue
                acc += cpj * qk * mu(j - k)
        return acc

    phis = [[one]]
    h = [_real_like(ip(phis[0], phis[0]))]
    if _real_part(h[0]) <= 0:
        raise RhopError("degenerate measure", _MODULE)
    for m in range(1, n + 1):
        mono = [zero] * m + [one]
        p = list(mono)
        for prev, hprev in zip(phis, h):
            c = ip(prev, mono) / hprev
            for idx, pv in enumerate(prev):
                p[idx] -= c * pv
        hm = ip(p, p)
        if _real_part(hm) <= 0:
            raise RhopError(f"precision exhausted at degree {m}", _MODULE,
                            partial=(phis, h))
        phis.append(p)
        h.append(_real_like(hm))
    return phis, h


def _real_part(x):
    if isinstance(x, (mp.mpc,)):
        return float(mp.re(x))
    if isinstance(x, Fraction):
        return float(x)
    return float(np.real(x))


def _real_like(x):
    if isinstance(x, mp.mpc):
        return mp.re(x)
    if isinstance(x, Fraction):
        return x
    return float(np.real(x))


# ---------------------------------------------------------------------------
# Szego recurrence evaluation
# ---------------------------------------------------------------------------

def szego_eval(seq, n, z, monic=False):
    """(phi_0..phi_n, phi*_0..phi*_n) at points z by the joint recurrence.

    rho_m phi_{m+1} = z phi_m - conj(alpha_m) phi*_m
    rho_m phi*_{m+1} = phi*_m - alpha_m z phi_m

    With ``monic`` the kappa-normalized (monic) variants are returned.
    """
    if n > seq.n:
        raise RhopError(f"Verblunsky data stored through index {seq.n - 1}", _MODULE)
    alpha, rho, kappa = seq.as_complex()
    z = np.asarray(z, dtype=complex)
    phi = np.zeros((n + 1,) + z.shape, dtype=complex)
    star = np.zeros_like(phi)
    phi[0] = kappa[0]
    star[0] = kappa[0]
    for m in range(n):
        phi[m + 1] = (z * phi[m] - np.conj(alpha[m]) * star[m]) / rho[m]
        star[m + 1] = (star[m] - alpha[m] * z * phi[m]) / rho[m]
    if monic:
        scale = kappa[: n + 1].reshape((n + 1,) + (1,) * z.ndim)
        phi = phi / scale
        star = star / scale
    return phi, star


def monic_phi_coefficients(seq, n):
    """Coefficient vectors (ascending) of monic Phi_0..Phi_n and Phi*_0..Phi*_n."""
    if n > seq.n:
        raise RhopError(f"Verblunsky data stored through index {seq.n - 1}", _MODULE)
    alpha, _, _ = seq.as_complex()
    phi = [np.array([1.0 + 0.0j])]
    star = [np.array([1.0 + 0.0j])]
    for m in range(n):
        p = np.zeros(m + 2, dtype=complex)
        p[1:] = phi[m]
        p[: m + 1] -= np.conj(alpha[m]) * star[m]
        s = np.zeros(m + 2, dtype=complex)
        s[: m + 1] = star[m]
        s[1:] -= alpha[m] * phi[m]
        phi.append(p)
        star.append(s)
    return phi, star


# ---------------------------------------------------------------------------
# Toeplitz determinants
# ---------------------------------------------------------------------------

def toeplitz_det(source, n, precision="auto"):
    """Determinant of the (n+1)x(n+1) Toeplitz moment matrix.

    Satisfies Delta_{n-1}/Delta_n = kappa_n^2 against the Gram-Schmidt
    route; double precision escalates to extended when ill-conditioned and
    the weight is available.
    """
    if isinstance(source, WeightSpec):
        source = circle_moments(source, n)
    if source.contour != CIRCLE:
        raise RhopError("toeplitz_det requires circle moments", _MODULE)
    if source.precision == EXACT:
        return fraction_det(toeplitz_matrix(source, n))
    if source.precision == EXTENDED:
        with extended_ctx():
            return mp.det(mp.matrix(toeplitz_matrix(source, n)))
    t = toeplitz_matrix(source, n)
    eig = np.linalg.eigvalsh(t)
    if eig.min() <= 0 or eig.max() / eig.min() > 1e12:
        if precision == DOUBLE:
            raise RhopError("precision exhausted: Toeplitz matrix too "
                            "ill-conditioned", _MODULE)
        if source.weight is None:
            raise RhopError("precision exhausted and no weight to re-integrate",
                            _MODULE)
        md = circle_moments(source.weight, n, precision=EXTENDED)
        with extended_ctx():
            return mp.det(mp.matrix(toeplitz_matrix(md, n)))
    sign, logdet = np.linalg.slogdet(t)
    det = sign * math.exp(logdet.real)
    return det.real if abs(det.imag) < 1e-10 * abs(det.real) else det


# ---------------------------------------------------------------------------
# CMV matrices
# ---------------------------------------------------------------------------

def cmv_build(seq, n):
    """Principal n x n section of C = LM.

    L = diag(Theta_0, Theta_2, ...), M = diag(1, Theta_1, Theta_3, ...) with
    Theta_j = [[conj(a_j), rho_j], [rho_j, -a_j]].  The section keeps the
    exact entries of the infinite matrix; no unitary completion is applied,
    so checks are restricted to the untruncated band window.
    """
    if n < 1:
        raise RhopError("n must be >= 1", _MODULE)
    if n > seq.n:
        raise RhopError("need Verblunsky data through index n-1", _MODULE)
    alpha, rho, _ = seq.as_complex()
    size = n + 3
    # pad so boundary blocks exist; padding never touches the leading section
    pad = max(0, size - len(alpha))
    alpha = np.concatenate([alpha, np.zeros(pad, dtype=complex)])
    rho = np.concatenate([rho, np.ones(pad)])

    def theta(j):
        return np.array([[np.conj(alpha[j]), rho[j]],
                         [rho[j], -alpha[j]]], dtype=complex)

    lmat = np.zeros((size, size), dtype=complex)
    mmat = np.zeros((size, size), dtype=complex)
    j = 0
    row = 0
    while row < size:
        blk = theta(2 * j)
        end = min(row + 2, size)
        lmat[row:end, row:end] = blk[: end - row, : end - row]
        row += 2
        j += 1
    mmat[0, 0] = 1.0
    j = 0
    row = 1
    while row < size:
        blk = theta(2 * j + 1)
        end = min(row + 2, size)
        mmat[row:end, row:end] = blk[: end - row, : end - row]
        row += 2
        j += 1
    c = (lmat @ mmat)[:n, :n]
    return CMVMatrix(c, alpha[: n].copy())


def cmv_moment(cmv, k):
    """(C^k)_{00} of the section; equals int z^k dmu = conj(mu_k) while k is
    inside the untruncated band window."""
    n = cmv.n
    if k < 0:
        raise RhopError("k must be >= 0", _MODULE)
    if k > n // 2 - 2:
        raise RhopError("truncation window exceeded", _MODULE)
    e0 = np.zeros(n, dtype=complex)
    e0[0] = 1.0
    v = e0
    for _ in range(k):
        v = cmv.mat @ v
    return complex(v[0])


# ---------------------------------------------------------------------------
# Schur algorithm on series coefficients (Geronimus path)
# ---------------------------------------------------------------------------

def _series_div(num, den):
    """Coefficients of num/den; den[0] must be nonzero (power-series division)."""
    k = len(num)
    out = np.zeros(k, dtype=complex)
    d0 = den[0]
    for j in range(k):
        acc = num[j]
        top = min(j, len(den) - 1)
        for i in range(1, top + 1):
            acc -= den[i] * out[j - i]
        out[j] = acc / d0
    return out


def schur_series(moments, nterms):
    """Taylor coefficients of the Schur function f_0 through order nterms-1."""
    m0 = complex(moments.values[0])
    kmax = moments.order
    c = np.zeros(nterms, dtype=complex)
    for k in range(1, min(kmax, nterms - 1) + 1):
        c[k] = 2.0 * complex(moments.values[k]) / m0
    # F = 1 + sum_{k>=1} c_k z^k ; f0 = ((F-1)/z) / (F+1)
    num = np.zeros(nterms, dtype=complex)
    num[:-1] = c[1:]
    den = np.zeros(nterms, dtype=complex)
    den[0] = 2.0
    den[1:] = c[1:]
    return _series_div(num, den)


def schur_geronimus(source, n, precision=DOUBLE, guard=8):
    """Verblunsky coefficients via Geronimus' theorem: alpha_m = f_m(0).

    The Schur iterates f_{m+1} = (1/z)(f_m - f_m(0)) / (1 - conj(f_m(0)) f_m)
    act on truncated Taylor coefficient vectors (``guard`` extra terms absorb
    the one order lost per step).  Must agree with verblunsky_levinson.
    """
    md = _moments_of(source, n + guard, precision)
    nterms = n + guard
    f = schur_series(md, nterms)
    alpha = np.zeros(n, dtype=complex)
    for m in range(n):
        a = f[0]
        if abs(a) >= 1.0:
            raise RhopError("Schur parameter out of disk", _MODULE)
        alpha[m] = a
        if m == n - 1:
            break
        num = f.copy()
        num[0] = 0.0
        num = np.roll(num, -1)
        num[-1] = 0.0
        den = -np.conj(a) * f
        den[0] += 1.0
        f = _series_div(num, den)
    mu0 = float(np.real(md.values[0]))
    return verblunsky_from_alpha(alpha, mu0=mu0)


def schur_iterate_integral(weight, n, z, seq=None, grid=2048):
    """Schur iterate f_n(z) as a ratio of two contour integrals.

    f_n(z) = [int Phi_n*(s) s^{-n} dmu / (s-z)] / [int Phi_n(s) s^{-n+1}
    dmu / (s-z)], evaluated by uniform-grid quadrature; must match the
    series-iterated Schur function pointwise.
    """
    z = complex(z)
    if abs(z) > 0.95:
        raise RhopError("refuse |z| > 0.95: quadrature unreliable near the circle",
                        _MODULE)
    if seq is None:
        seq = verblunsky_levinson(weight, max(n, 1))
    theta = trig_grid(grid)
    s = np.exp(1j * theta)
    w = weight_values(weight, theta)
    phi, star = szego_eval(seq, n, s, monic=True)
    num = np.mean(star[n] * s ** (-n) * w / (s - z))
    den = np.mean(phi[n] * s ** (-n + 1) * w / (s - z))
    return complex(num / den)


# ---------------------------------------------------------------------------
# Wall polynomials and the Pinter-Nevai formula
# ---------------------------------------------------------------------------

def wall_pinter_nevai(seq, n):
    """Wall polynomials A_{n-1}, B_{n-1} and the Pinter-Nevai residuals.

    The pair is built by composing the n inverted Moebius steps of the Schur
    algorithm (f_0 expressed in f_n); the returned residuals are the
    max-coefficient errors of

        Phi_n*(z) - (B_{n-1}(z) - z A_{n-1}(z))
        Phi_n(z)  - (z B*_{n-1}(z) - A*_{n-1}(z))

    which is the acceptance contract (the normalization fixes B_{n-1}(0)=1).
    """
    if n < 1:
        raise RhopError("n must be >= 1", _MODULE)
    if n > seq.n:
        raise RhopError("need Verblunsky data through index n-1", _MODULE)
    alpha, _, _ = seq.as_complex()
    # A_0 = alpha_0, B_0 = 1 and their reversals at degree 0
    a = np.array([alpha[0]], dtype=complex)
    b = np.array([1.0 + 0.0j])
    astar = np.array([np.conj(alpha[0])])
    bstar = np.array([1.0 + 0.0j])
    for m in range(1, n):
        zbs = np.concatenate([[0.0], bstar])
        zas = np.concatenate([[0.0], astar])
        a_new = np.concatenate([a, [0.0]]) + alpha[m] * zbs
        b_new = np.concatenate([b, [0.0]]) + alpha[m] * zas
        astar_new = zas + np.conj(alpha[m]) * np.concatenate([b, [0.0]])
        bstar_new = zbs + np.conj(alpha[m]) * np.concatenate([a, [0.0]])
        a, b, astar, bstar = a_new, b_new, astar_new, bstar_new
    phi, star = monic_phi_coefficients(seq, n)
    rhs_star = np.concatenate([b, [0.0]])
    rhs_star[1:] -= a
    rhs_phi = np.concatenate([[0.0], bstar])
    rhs_phi[: n] -= astar
    res_star = float(np.abs(star[n] - rhs_star).max())
    res_phi = float(np.abs(phi[n] - rhs_phi).max())
    pair = WallPair(degree=n, a_coeffs=a, b_coeffs=b)
    return pair, res_star, res_phi
