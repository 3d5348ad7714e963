"""Orthogonal polynomials on the real line.

Three-term recurrence data, Hankel determinants, the mutually inverse maps
between Jacobi matrices and (discrete) spectral measures, and the Toda flow
solved two independent ways: by spectral reweighting and by direct Lax-pair
integration.
"""

from __future__ import annotations

import dataclasses
import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import scipy.linalg
from scipy.special import roots_hermite

from .errors import RhopError
from .measures import (
    LINE,
    MomentData,
    WeightSpec,
    decay_radius,
    gaussian_terms,
    hankel_matrix,
    line_moments,
    weight_values,
)
from .numeric import (
    DOUBLE,
    EXACT,
    EXTENDED,
    as_float,
    composite_gl,
    extended_ctx,
    fraction_det,
    lanczos_tridiag,
    lanczos_tridiag_mp,
)

_MODULE = "opline"


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclasses.dataclass
class RecurrenceLine:
    """Recurrence data of orthonormal polynomials on the line.

    b_{n-1} p_{n-1} + a_n p_n + b_n p_{n+1} = x p_n, with b_n > 0, and
    norming constants k_n (leading coefficients of the orthonormal p_n),
    which satisfy k_n = k_{n-1}/b_{n-1}.
    """

    a: object
    b: object
    k: object
    precision: str = DOUBLE

    @property
    def n(self):
        return len(self.a)

    def as_float(self):
        return (np.array([as_float(x) for x in self.a]),
                np.array([as_float(x) for x in self.b]),
                np.array([as_float(x) for x in self.k]))


@dataclasses.dataclass
class JacobiMatrix:
    """Finite symmetric tridiagonal matrix with positive off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        self.diag = np.asarray(self.diag, dtype=float)
        self.offdiag = np.asarray(self.offdiag, dtype=float)
        if len(self.offdiag) != max(len(self.diag) - 1, 0):
            raise RhopError("offdiag length must be n-1", _MODULE)
        if np.any(self.offdiag <= 0):
            raise RhopError("Jacobi off-diagonal entries must be positive", _MODULE)

    @property
    def n(self):
        return len(self.diag)

    def to_array(self):
        m = np.diag(self.diag)
        if self.n > 1:
            m += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return m


@dataclasses.dataclass
class DiscreteMeasure:
    """Finite positive measure sum_i weights_i delta(atoms_i), atoms increasing."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.atoms = np.asarray(self.atoms, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if np.any(np.diff(self.atoms) <= 0):
            raise RhopError("atoms must be strictly increasing", _MODULE)
        if np.any(self.weights <= 0):
            raise RhopError("weights must be positive", _MODULE)

    @property
    def n(self):
        return len(self.atoms)

    def total(self):
        return float(self.weights.sum())


# ---------------------------------------------------------------------------
# recurrence coefficients
# ---------------------------------------------------------------------------

def _moments_of(source, order, precision):
    if isinstance(source, MomentData):
        if source.order < order:
            raise RhopError(f"need moments through order {order}", _MODULE)
        return source
    if isinstance(source, WeightSpec):
        return line_moments(source, order, precision=precision)
    raise RhopError("source must be a weight, moments, or discrete measure", _MODULE)


def _gram_schmidt_on_moments(moments, n):
    """Monic orthogonalization directly against the moment form.

    Works over whatever arithmetic the moments carry (float, mpf, Fraction).
    Exponentially ill-conditioned in floating point; intended as the exact /
    extended-precision oracle at desk scale.
    """
    vals = list(moments.values)
    if isinstance(vals[0], Fraction):
        zero, one = Fraction(0), Fraction(1)
    elif isinstance(vals[0], mp.mpf):
        zero, one = mp.mpf(0), mp.mpf(1)
    else:
        vals = [float(v) for v in vals]
        zero, one = 0.0, 1.0

    def ip(p, q):
        # <p, q> = sum p_r q_s m_{r+s}
        acc = zero
        for r, pr in enumerate(p):
            if pr == zero:
                continue
            for s, qs in enumerate(q):
                if qs == zero:
                    continue
                acc += pr * qs * vals[r + s]
        return acc

    def xshift(p):
        return [zero] + list(p)

    p_prev = None
    p_cur = [one]
    h_prev = None
    h_cur = ip(p_cur, p_cur)
    if h_cur <= zero:
        raise RhopError("degenerate measure", _MODULE)
    a, b, h = [], [], [h_cur]
    for j in range(n):
        xp = xshift(p_cur)
        aj = ip(xp, p_cur) / h_cur
        a.append(aj)
        if j == n - 1:
            break
        nxt = [xv - aj * pv for xv, pv in
               zip(xp, list(p_cur) + [zero])]
        if p_prev is not None:
            ratio = h_cur / h_prev
            nxt = [nv - ratio * pv for nv, pv in
                   zip(nxt, list(p_prev) + [zero] * (len(nxt) - len(p_prev)))]
        h_nxt = ip(nxt, nxt)
        if h_nxt <= zero:
            partial = _pack_recurrence(a[: j + 1], b[:j], h[: j + 1])
            raise RhopError(f"precision exhausted at degree {j + 1}",
                            _MODULE, partial=partial)
        b.append(_sqrt_like(h_nxt / h_cur))
        h.append(h_nxt)
        p_prev, h_prev = p_cur, h_cur
        p_cur, h_cur = nxt, h_nxt
    return _pack_recurrence(a, b, h)


def _sqrt_like(x):
    if isinstance(x, Fraction):
        return x  # kept squared; see _pack_recurrence
    if isinstance(x, mp.mpf):
        return mp.sqrt(x)
    return math.sqrt(x)


def _pack_recurrence(a, b, h):
    """Assemble RecurrenceLine; for Fractions, b entries arrive squared."""
    if h and isinstance(h[0], Fraction):
        bf = [math.sqrt(as_float(x)) for x in b]
        kf = [1.0 / math.sqrt(as_float(h[0]))]
        for x in bf:
            kf.append(kf[-1] / x)
        rec = RecurrenceLine(np.array([as_float(x) for x in a]),
                             np.array(bf), np.array(kf), EXACT)
        rec.b_squared_exact = list(b)
        rec.h_exact = list(h)
        rec.a_exact = list(a)
        return rec
    if h and isinstance(h[0], mp.mpf):
        k = [1 / mp.sqrt(h[0])]
        for x in b:
            k.append(k[-1] / x)
        return RecurrenceLine(list(a), list(b), k, EXTENDED)
    k = [1.0 / math.sqrt(h[0])]
    for x in b:
        k.append(k[-1] / x)
    return RecurrenceLine(np.asarray(a), np.asarray(b), np.asarray(k), DOUBLE)


def discretize_weight(spec, n, tol=1e-15):
    """Quadrature discretization of a line weight, suitable for Stieltjes.

    Gaussian-type weights use scaled Gauss-Hermite (exact for the moment
    range); everything else composite Gauss-Legendre on the decay-truncated
    interval with at least 4n nodes.
    """
    terms = gaussian_terms(spec)
    if terms is not None and all(a > 0 for _, a in terms):
        nodes = max(2 * n + 8, 4 * n, 48)
        x, w = roots_hermite(nodes)
        allx, allw = [], []
        for c, aa in terms:
            s = 1.0 / math.sqrt(aa)
            allx.append(s * x)
            allw.append(c * s * w)
        x = np.concatenate(allx)
        w = np.concatenate(allw)
        order = np.argsort(x)
        return x[order], w[order]
    t_max = decay_radius(spec, 2 * n + 2, tol=tol)
    panels = max(int(4 * t_max), 8, 4 * n // 16 + 8)
    x, wq = composite_gl(-t_max, t_max, panels, 24)
    return x, wq * weight_values(spec, x)


def recurrence_from_measure(source, n, method="auto", precision=DOUBLE):
    """Recurrence coefficients a_0..a_{n-1}, b_0..b_{n-2}, k_0..k_{n-1}.

    Two independent routes:

    * ``moments``   -- monic Gram-Schmidt against the moment form (exact
      rational or extended precision; the small-n oracle),
    * ``stieltjes`` -- Lanczos on a quadrature discretization of the weight
      (the stable floating-point route), also the route for discrete
      measures, where it realizes the inverse spectral map F.

    ``auto`` picks stieltjes for weights/discrete measures at double
    precision and moments otherwise.
    """
    if n < 1:
        raise RhopError("n must be >= 1", _MODULE)
    if isinstance(source, DiscreteMeasure):
        a, b = lanczos_tridiag(source.atoms, source.weights, n)
        k = np.empty(n)
        k[0] = 1.0 / math.sqrt(source.total())
        for j in range(1, n):
            k[j] = k[j - 1] / b[j - 1]
        return RecurrenceLine(a, b, k, DOUBLE)

    if method == "auto":
        if precision in (EXACT, EXTENDED) or isinstance(source, MomentData):
            method = "moments"
        else:
            method = "stieltjes"

    if method == "moments":
        md = _moments_of(source, 2 * n - 1, precision)
        return _gram_schmidt_on_moments(md, n)

    if method == "stieltjes":
        if not isinstance(source, WeightSpec):
            raise RhopError("stieltjes route needs a weight", _MODULE)
        x, w = discretize_weight(source, n)
        a, b = lanczos_tridiag(x, w, n)
        k = np.empty(n)
        k[0] = 1.0 / math.sqrt(w.sum())
        for j in range(1, n):
            k[j] = k[j - 1] / b[j - 1]
        return RecurrenceLine(a, b, k, DOUBLE)

    raise RhopError(f"unknown method {method!r}", _MODULE)


def eval_opl(rec, n, x, monic=False):
    """Values p_0(x)..p_n(x) by the forward three-term recurrence.

    Returns an array of shape (n+1,) + shape(x); with ``monic`` the monic
    polynomials P_j = p_j / k_j are returned instead.
    """
    if n >= rec.n:
        raise RhopError(f"recurrence data stored through degree {rec.n - 1}", _MODULE)
    a, b, k = rec.as_float()
    x = np.asarray(x, dtype=float)
    out = np.zeros((n + 1,) + x.shape)
    out[0] = k[0]
    if n >= 1:
        out[1] = (x - a[0]) * out[0] / b[0]
    for j in range(1, n):
        out[j + 1] = ((x - a[j]) * out[j] - b[j - 1] * out[j - 1]) / b[j]
    if monic:
        out = out / k[: n + 1].reshape((n + 1,) + (1,) * x.ndim)
    return out


def monic_coefficients(rec, n):
    """Coefficient vectors (ascending) of the monic P_0..P_n."""
    if n >= rec.n:
        raise RhopError(f"recurrence data stored through degree {rec.n - 1}", _MODULE)
    a, b, _ = rec.as_float()
    polys = [np.array([1.0])]
    if n >= 1:
        polys.append(np.array([-a[0], 1.0]))
    for j in range(1, n):
        p = np.zeros(j + 2)
        p[1:] += polys[j]
        p[: j + 1] -= a[j] * polys[j]
        p[: j] -= (b[j - 1] ** 2) * polys[j - 1]
        polys.append(p)
    return polys


# ---------------------------------------------------------------------------
# Hankel determinants
# ---------------------------------------------------------------------------

def hankel_det(moments, n, precision="auto"):
    """Determinant of the (n+1)x(n+1) Hankel moment matrix.

    In double precision, ill-conditioning is detected and the computation
    escalates to extended precision when the weight is available; satisfies
    D_{n-1}/D_n = k_n^2 against the recurrence route.
    """
    if moments.contour != LINE:
        raise RhopError("hankel_det requires line moments", _MODULE)
    if moments.precision == EXACT:
        return fraction_det(hankel_matrix(moments, n))
    if moments.precision == EXTENDED:
        with extended_ctx():
            return mp.det(mp.matrix(hankel_matrix(moments, n)))
    h = hankel_matrix(moments, n)
    d = 1.0 / np.sqrt(np.abs(np.diag(h)))
    eig = np.linalg.eigvalsh(h * d[:, None] * d[None, :])
    if eig.min() <= 0 or eig.max() / eig.min() > 1e12:
        if precision == DOUBLE:
            raise RhopError("precision exhausted: Hankel matrix too ill-conditioned",
                            _MODULE)
        if moments.weight is None:
            raise RhopError("precision exhausted and no weight to re-integrate",
                            _MODULE)
        md = line_moments(moments.weight, 2 * n, precision=EXTENDED)
        with extended_ctx():
            return mp.det(mp.matrix(hankel_matrix(md, n)))
    sign, logdet = np.linalg.slogdet(h)
    return sign * math.exp(logdet)


# ---------------------------------------------------------------------------
# Jacobi matrices and spectral measures
# ---------------------------------------------------------------------------

def jacobi_from_recurrence(rec, n):
    """Leading n x n section of the Jacobi matrix of the recurrence."""
    if n > rec.n:
        raise RhopError("not enough recurrence data", _MODULE)
    a, b, _ = rec.as_float() if isinstance(rec, RecurrenceLine) else rec
    return JacobiMatrix(a[:n], b[: n - 1])


def spectral_measure(mat):
    """Spectral measure of a finite Jacobi matrix at the first basis vector.

    Atoms are the eigenvalues and the weight of each atom is the squared
    first component of the normalized eigenvector, so that
    (e_0, (mat - z)^{-1} e_0) = sum_i w_i/(atom_i - z).
    """
    if mat.n == 1:
        return DiscreteMeasure(mat.diag.copy(), np.array([1.0]))
    lam, v = scipy.linalg.eigh_tridiagonal(mat.diag, mat.offdiag)
    gaps = np.diff(lam)
    if np.any(gaps <= 0):
        raise RhopError("internal error: degenerate Jacobi spectrum", _MODULE)
    w = v[0, :] ** 2
    w = w / w.sum()
    return DiscreteMeasure(lam, w)


def recurrence_from_discrete(measure, n):
    """Jacobi data of a discrete measure (the map F at finite size)."""
    a, b = lanczos_tridiag(measure.atoms, measure.weights, n)
    return JacobiMatrix(a, b)


# ---------------------------------------------------------------------------
# Toda flow
# ---------------------------------------------------------------------------

def toda_flow_spectral(mat, t, max_dps=300):
    """Toda flow by the spectral-map procedure.

    Diagonalize, reweight each atom by exp(2 lambda_i t), renormalize, and
    reconstruct.  The largest exponent is factored out first, so only weight
    ratios enter; if the dynamic range still drowns double precision the
    computation escalates to mpmath.
    """
    t = float(t)
    if t == 0.0:
        return JacobiMatrix(mat.diag.copy(), mat.offdiag.copy())
    dm = spectral_measure(mat)
    logw = np.log(dm.weights) + 2.0 * dm.atoms * t
    logw -= logw.max()
    w = np.exp(logw)
    if w.min() > 1e-250:
        try:
            a, b = lanczos_tridiag(dm.atoms, w / w.sum(), mat.n)
            return JacobiMatrix(a, b)
        except RhopError:
            pass
    # extended-precision fallback for extreme dynamic range
    span = float(2.0 * abs(t) * (dm.atoms.max() - dm.atoms.min()))
    dps = int(span / math.log(10)) + 40
    if dps > max_dps:
        raise RhopError("dynamic range exceeded", _MODULE)
    with extended_ctx(dps):
        atoms = [mp.mpf(x) for x in dm.atoms]
        wmp = [mp.e ** (mp.mpf(lw) + 2 * mp.mpf(x) * mp.mpf(t))
               for lw, x in zip(np.log(dm.weights), dm.atoms)]
        total = mp.fsum(wmp)
        wmp = [x / total for x in wmp]
        a, b = lanczos_tridiag_mp(atoms, wmp, mat.n)
        return JacobiMatrix(np.array([float(x) for x in a]),
                            np.array([float(x) for x in b]))


def _toda_rhs(a, b):
    # da_k/dt = 2(b_k^2 - b_{k-1}^2), db_k/dt = b_k (a_{k+1} - a_k)
    da = np.zeros_like(a)
    if len(b):
        b2 = b ** 2
        da[:-1] += 2.0 * b2
        da[1:] -= 2.0 * b2
    db = b * (a[1:] - a[:-1])
    return da, db


def toda_flow_ode(mat, t, step=1e-3, drift_tol=1e-8):
    """Toda flow by classical fourth-order Runge-Kutta on the Lax equation.

    dL/dt = B(L) L - L B(L) with B the tridiagonal skew part (+b above,
    -b below the diagonal).  Serves as the independent oracle for
    :func:`toda_flow_spectral`.  Rejects steps whose invariant-trace drift
    exceeds ``drift_tol``.
    """
    if step <= 0:
        raise RhopError("step must be positive", _MODULE)
    a = mat.diag.astype(float).copy()
    b = mat.offdiag.astype(float).copy()
    t = float(t)
    if t == 0.0:
        return JacobiMatrix(a, b)
    nsteps = max(1, int(math.ceil(abs(t) / step)))
    h = t / nsteps
    energy0 = float(np.sum(a ** 2) + 2.0 * np.sum(b ** 2))
    for _ in range(nsteps):
        k1a, k1b = _toda_rhs(a, b)
        k2a, k2b = _toda_rhs(a + 0.5 * h * k1a, b + 0.5 * h * k1b)
        k3a, k3b = _toda_rhs(a + 0.5 * h * k2a, b + 0.5 * h * k2b)
        k4a, k4b = _toda_rhs(a + h * k3a, b + h * k3b)
        a = a + (h / 6.0) * (k1a + 2 * k2a + 2 * k3a + k4a)
        b = b + (h / 6.0) * (k1b + 2 * k2b + 2 * k3b + k4b)
    energy1 = float(np.sum(a ** 2) + 2.0 * np.sum(b ** 2))
    if abs(energy1 - energy0) > drift_tol * max(1.0, abs(energy0)):
        raise RhopError("step rejected", _MODULE)
    return JacobiMatrix(a, b)
