"""Riemann-Hilbert machinery for orthogonal polynomials.

The 2x2 problems solved here live on the real line (oriented left to right)
or the unit circle (counterclockwise), with upper-triangular unit-determinant
jump v = [[1, w],[0,1]] (line) or [[1, omega z^{-n}],[0,1]] (circle), and the
solution normalized by m(z) diag(z^{-n}, z^n) -> I at infinity.

Two routes are provided and cross-checked:

* direct assembly from the orthogonal-polynomial data (monic polynomials and
  weighted Cauchy transforms),
* for the circle, a singular-integral-equation solve over Fourier modes that
  never looks at the polynomials.

Boundary values of Cauchy transforms are computed by one-sided Fourier mode
sums on the circle and by quadrature over contours shifted into the weight's
strip of analyticity on the line, so the two sides of every jump check come
from genuinely independent numerics.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import RhopError
from .measures import (
    CIRCLE,
    LINE,
    WeightSpec,
    decay_radius,
    weight_values,
    weight_values_complex,
)
from .numeric import composite_gl, trig_grid
from .opcircle import (
    VerblunskySeq,
    monic_phi_coefficients,
    verblunsky_levinson,
)
from .opline import RecurrenceLine, monic_coefficients, recurrence_from_measure

_MODULE = "rhp"

TWO_PI_I = 2.0j * np.pi


# ---------------------------------------------------------------------------
# problem description
# ---------------------------------------------------------------------------

@dataclasses.dataclass
class RHProblem:
    """Contour, degree, and weight of an orthogonal-polynomial RHP."""

    contour: str
    n: int
    weight: WeightSpec

    def jump(self, t):
        """Jump matrix at contour parameter t (x on the line, theta on S^1)."""
        t = np.asarray(t, dtype=float)
        v = np.zeros(t.shape + (2, 2), dtype=complex)
        v[..., 0, 0] = 1.0
        v[..., 1, 1] = 1.0
        if self.contour == LINE:
            v[..., 0, 1] = weight_values(self.weight, t)
        else:
            v[..., 0, 1] = weight_values(self.weight, t) * \
                np.exp(-1j * self.n * t)
        return v


# ---------------------------------------------------------------------------
# Cauchy operators
# ---------------------------------------------------------------------------

def _circle_modes(h, grid):
    """Full FFT mode array of samples (callable sampled on the uniform grid)."""
    if callable(h):
        theta = trig_grid(grid)
        vals = h(theta)
    else:
        vals = np.asarray(h)
        grid = len(vals)
    return np.fft.fft(vals) / grid


def _mode_split(f):
    """(c_plus, c_minus): coefficients of z^0..z^K and z^-1..z^-K."""
    m = len(f)
    kmax = m // 2 - 1
    c_plus = f[: kmax + 1]
    c_minus = f[-1: -kmax - 1: -1]  # modes -1, -2, ..., -K
    return np.asarray(c_plus), np.asarray(c_minus)


def _eval_plus(c_plus, z):
    """sum_{k>=0} c_k z^k (Horner), z any array with |z| <= 1."""
    acc = np.zeros_like(z, dtype=complex)
    for c in c_plus[::-1]:
        acc = acc * z + c
    return acc


def _eval_minus(c_minus, z):
    """sum_{k<=-1} c_k z^k with coefficients ordered -1, -2, ..."""
    zi = 1.0 / z
    acc = np.zeros_like(z, dtype=complex)
    for c in c_minus[::-1]:
        acc = (acc + c) * zi
    return acc


def cauchy_eval(contour, h, z, grid=1024, weight=None, t_max=None,
                min_dist=0.1):
    """Cauchy transform C(h)(z) = (1/2 pi i) int h(s)/(s - z) ds, z off contour.

    circle: h is a callable of theta (or an array of samples on a uniform
    grid); the transform is the one-sided Fourier mode sum.  line: h is a
    callable of x; spectral composite quadrature on the decay-truncated
    interval.  Points closer to the contour than ``min_dist`` are refused;
    use :func:`cauchy_boundary` / the shifted-contour boundary machinery.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if contour == CIRCLE:
        r = np.abs(z)
        if np.any(np.abs(r - 1.0) < 1e-8):
            raise RhopError("use boundary mode", _MODULE)
        f = _circle_modes(h, grid)
        c_plus, c_minus = _mode_split(f)
        inside = r < 1.0
        out = np.empty_like(z)
        if inside.any():
            out[inside] = _eval_plus(c_plus, z[inside])
        if (~inside).any():
            out[~inside] = -_eval_minus(c_minus, z[~inside])
        return complex(out[0]) if scalar else out
    if contour == LINE:
        if np.any(np.abs(z.imag) < min_dist):
            raise RhopError("use boundary mode", _MODULE)
        if t_max is None:
            if weight is not None:
                t_max = decay_radius(weight, 4)
            else:
                t_max = 12.0
        nodes, wq = composite_gl(-t_max, t_max, max(int(10 * t_max), 16), 12)
        hv = h(nodes)
        out = (hv * wq) @ (1.0 / (nodes[None, :] - z[:, None])).T / TWO_PI_I
        return complex(out[0]) if scalar else out
    raise RhopError(f"unknown contour {contour!r}", _MODULE)


def cauchy_boundary(coeffs, side):
    """Boundary values of the circle Cauchy operator on Fourier coefficients.

    ``coeffs`` is indexed k = -K..K (offset K, as from
    :func:`rhop.numeric.fourier_coefficients`).  C_+ keeps modes k >= 0;
    C_- negates modes k < 0 and drops the rest, so C_+ - C_- = 1 exactly.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    k = len(coeffs) // 2
    out = np.zeros_like(coeffs)
    if side == "+":
        out[k:] = coeffs[k:]
    elif side == "-":
        out[:k] = -coeffs[:k]
    else:
        raise RhopError("side must be '+' or '-'", _MODULE)
    return out


class _LineCauchy:
    """Weighted Cauchy transforms of entire, decaying functions on the line.

    Boundary values from the +/- side are obtained by shifting the contour
    into the lower/upper strip of analyticity (depth ``c``), which keeps the
    quadrature spectrally accurate up to the contour itself.
    """

    def __init__(self, weight, order, c=0.25, panel=0.1, gl_order=12):
        self.weight = weight
        self.c = c
        self.t_max = decay_radius(weight, order + 4)
        panels = max(int(self.t_max / panel), 16)
        self.nodes, self.wq = composite_gl(-self.t_max, self.t_max,
                                           panels, gl_order)
        self.w_real = weight_values(weight, self.nodes)
        self.nodes_dn = self.nodes - 1j * c
        self.nodes_up = self.nodes + 1j * c
        self.w_dn = weight_values_complex(weight, self.nodes_dn)
        self.w_up = weight_values_complex(weight, self.nodes_up)

    def transform(self, poly, z):
        """C(P w)(z) for monic coefficient vector ``poly``, z off the axis."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        pv = np.polyval(poly[::-1], self.nodes)
        h = pv * self.w_real * self.wq
        return h @ (1.0 / (self.nodes[:, None] - z[None, :]))\
            / TWO_PI_I

    def boundary(self, poly, x, side):
        """C_+/- (P w)(x) via the contour shifted away from the side."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if side == "+":
            nodes, wvals = self.nodes_dn, self.w_dn
        elif side == "-":
            nodes, wvals = self.nodes_up, self.w_up
        else:
            raise RhopError("side must be '+' or '-'", _MODULE)
        pv = np.polyval(poly[::-1], nodes)
        h = pv * wvals * self.wq
        return h @ (1.0 / (nodes[:, None] - x[None, :])) / TWO_PI_I


# ---------------------------------------------------------------------------
# solutions
# ---------------------------------------------------------------------------

@dataclasses.dataclass
class RHSolution:
    """A solved/assembled 2x2 RH matrix function.

    ``evaluate`` works at any off-contour point; ``boundary`` returns the
    one-sided limits on the contour.  ``extraction`` carries the quantities
    read off the solution (residue matrix on the line; value at zero, alpha
    and kappa^2 on the circle).  Diagnostics are filled by verify_jump.
    """

    contour: str
    n: int
    weight: WeightSpec
    source: str
    extraction: dict
    _impl: object

    def evaluate(self, z):
        return self._impl.evaluate(z)

    def boundary(self, t, side):
        return self._impl.boundary(t, side)

    def jump_matrix(self, t):
        return RHProblem(self.contour, self.n, self.weight).jump(t)


class _AssembledCircleImpl:
    def __init__(self, weight, n, seq, grid):
        self.weight = weight
        self.n = n
        theta = trig_grid(grid)
        s = np.exp(1j * theta)
        w = weight_values(weight, theta)
        if n == 0:
            self.phi = np.array([1.0 + 0.0j])
            self.star_prev = None
            self.kappa_sq = None
            h12 = w.astype(complex)
            h22 = None
        else:
            phis, stars = monic_phi_coefficients(seq, n)
            self.phi = phis[n]
            self.star_prev = stars[n - 1]
            _, _, kappa = seq.as_complex()
            self.kappa_sq = float(kappa[n - 1] ** 2)
            base = w * np.exp(-1j * n * theta)
            h12 = np.polyval(self.phi[::-1], s) * base
            h22 = np.polyval(self.star_prev[::-1], s) * base
        self.c12 = _mode_split(np.fft.fft(h12) / grid)
        self.c22 = None if h22 is None else _mode_split(np.fft.fft(h22) / grid)

    def _cauchy(self, split, z, inside_mask):
        c_plus, c_minus = split
        out = np.empty_like(z)
        if inside_mask.any():
            out[inside_mask] = _eval_plus(c_plus, z[inside_mask])
        if (~inside_mask).any():
            out[~inside_mask] = -_eval_minus(c_minus, z[~inside_mask])
        return out

    def _cauchy_boundary(self, split, z, side):
        c_plus, c_minus = split
        return _eval_plus(c_plus, z) if side == "+" else -_eval_minus(c_minus, z)

    def _assemble(self, z, c12, c22, p11):
        out = np.zeros(z.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = p11
        out[..., 0, 1] = c12
        if self.n == 0:
            out[..., 1, 0] = 0.0
            out[..., 1, 1] = 1.0
        else:
            out[..., 1, 0] = -self.kappa_sq * \
                np.polyval(self.star_prev[::-1], z)
            out[..., 1, 1] = -self.kappa_sq * c22
        return out

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        scalar = z.ndim == 0
        z = np.atleast_1d(z)
        if np.any(np.abs(np.abs(z) - 1.0) < 1e-8):
            raise RhopError("use boundary mode", _MODULE)
        inside = np.abs(z) < 1.0
        c12 = np.where(inside, self._cauchy(self.c12, z, True),
                       self._cauchy(self.c12, np.where(inside, 2.0, z), False))
        c22 = None
        if self.n > 0:
            c22 = np.where(inside, self._cauchy(self.c22, z, True),
                           self._cauchy(self.c22, np.where(inside, 2.0, z),
                                        False))
        out = self._assemble(z, c12, c22, np.polyval(self.phi[::-1], z))
        return out[0] if scalar else out

    def boundary(self, theta, side):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        z = np.exp(1j * theta)
        c12 = self._cauchy_boundary(self.c12, z, side)
        c22 = self._cauchy_boundary(self.c22, z, side) if self.n else None
        return self._assemble(z, c12, c22, np.polyval(self.phi[::-1], z))


def assemble_Y(weight, n, seq=None, grid=2048):
    """Assemble the circle solution Y^{(n)} from orthogonal-polynomial data.

    Y = [[Phi_n, C(Phi_n w s^{-n})], [-kappa_{n-1}^2 Phi*_{n-1},
    -kappa_{n-1}^2 C(Phi*_{n-1} w s^{-n})]].  The extraction dictionary
    reports alpha_{n-1} = -conj(Y_11(0)) and kappa_{n-1}^2 = -Y_21(0).
    """
    if weight.contour != CIRCLE:
        raise RhopError("assemble_Y requires a circle weight", _MODULE)
    if n > 0 and seq is None:
        seq = verblunsky_levinson(weight, n)
    impl = _AssembledCircleImpl(weight, n, seq, grid)
    y0 = impl.evaluate(np.array([0.0 + 0.0j]))[0]
    extraction = {
        "value_at_zero": y0,
        "alpha": None if n == 0 else -np.conj(y0[0, 0]),
        "kappa_sq": None if n == 0 else -complex(y0[1, 0]).real,
    }
    return RHSolution(CIRCLE, n, weight, "assembled", extraction, impl)


class _AssembledLineImpl:
    def __init__(self, weight, n, rec):
        self.weight = weight
        self.n = n
        self.cauchy = _LineCauchy(weight, n)
        if n == 0:
            self.pn = np.array([1.0])
            self.pn1 = None
            self.k_sq = None
        else:
            polys = monic_coefficients(rec, n)
            self.pn = polys[n]
            self.pn1 = polys[n - 1]
            _, _, k = rec.as_float()
            self.k_sq = float(k[n - 1] ** 2)

    def _assemble(self, z, c_top, c_bot, pol_top, pol_bot):
        out = np.zeros(z.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = pol_top
        out[..., 0, 1] = c_top
        if self.n == 0:
            out[..., 1, 1] = 1.0
        else:
            fac = -TWO_PI_I * self.k_sq
            out[..., 1, 0] = fac * pol_bot
            out[..., 1, 1] = fac * c_bot
        return out

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        scalar = z.ndim == 0
        z = np.atleast_1d(z)
        if np.any(np.abs(z.imag) < 0.1):
            raise RhopError("use boundary mode", _MODULE)
        c_top = self.cauchy.transform(self.pn, z)
        c_bot = self.cauchy.transform(self.pn1, z) if self.n else None
        out = self._assemble(
            z, c_top, c_bot, np.polyval(self.pn[::-1], z),
            None if self.n == 0 else np.polyval(self.pn1[::-1], z))
        return out[0] if scalar else out

    def boundary(self, x, side):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        c_top = self.cauchy.boundary(self.pn, x, side)
        c_bot = self.cauchy.boundary(self.pn1, x, side) if self.n else None
        return self._assemble(
            x.astype(complex), c_top, c_bot, np.polyval(self.pn[::-1], x),
            None if self.n == 0 else np.polyval(self.pn1[::-1], x))


def residue_matrix(weight, n, rec=None, moments=None):
    """Residue X_1^{(n)} of X^{(n)} diag(z^{-n}, z^n) at infinity.

    Entries come from polynomial coefficients and norming constants:
    (X_1)_11 = subleading coefficient of P_n, (X_1)_21 = -2 pi i k_{n-1}^2,
    (X_1)_12 = -(1/2 pi i) k_n^{-2}, (X_1)_22 = -(X_1)_11 (unimodularity).
    """
    if rec is None:
        rec = recurrence_from_measure(weight, n + 1)
    _, _, k = rec.as_float()
    x1 = np.zeros((2, 2), dtype=complex)
    if n >= 1:
        polys = monic_coefficients(rec, n)
        x1[0, 0] = polys[n][n - 1]
        x1[1, 0] = -TWO_PI_I * k[n - 1] ** 2
    x1[0, 1] = -1.0 / (TWO_PI_I * k[n] ** 2)
    x1[1, 1] = -x1[0, 0]
    return x1


def assemble_X(weight, n, rec=None):
    """Assemble the line solution X^{(n)} from orthogonal-polynomial data.

    X = [[P_n, C(P_n w)], [-2 pi i k_{n-1}^2 P_{n-1},
    -2 pi i k_{n-1}^2 C(P_{n-1} w)]], with the residue matrix X_1 computed
    from coefficients and norming constants (see :func:`residue_matrix`).
    """
    if weight.contour != LINE:
        raise RhopError("assemble_X requires a line weight", _MODULE)
    if rec is None:
        rec = recurrence_from_measure(weight, n + 1)
    impl = _AssembledLineImpl(weight, n, rec)
    extraction = {"residue": residue_matrix(weight, n, rec=rec), "rec": rec}
    return RHSolution(LINE, n, weight, "assembled", extraction, impl)


# ---------------------------------------------------------------------------
# jump verification
# ---------------------------------------------------------------------------

def verify_jump(sol, npoints=64, far_radius=40.0):
    """Max residual of m_+ = m_- v over off-grid contour points.

    The two sides come from independent numerics (one-sided mode sums /
    oppositely shifted contours), so the residual honestly reflects the
    resolution of the computed solution.  Also checks the normalization
    m(z) diag(z^{-n}, z^n) -> I at a far point and det m = 1 at test points.
    """
    n = sol.n
    if sol.contour == CIRCLE:
        t = trig_grid(npoints) + 0.375 * (2 * np.pi / npoints)
    else:
        t_max = decay_radius(sol.weight, n + 2)
        t = np.linspace(-0.85 * t_max, 0.85 * t_max, npoints)
    mp_ = sol.boundary(t, "+")
    mm = sol.boundary(t, "-")
    v = sol.jump_matrix(t)
    resid = np.abs(mp_ - np.einsum("...ij,...jk->...ik", mm, v))
    scale = 1.0 + np.abs(mp_).max(axis=(-2, -1), keepdims=True)
    jump_res = float((resid / scale).max())

    if sol.contour == CIRCLE:
        zfar = np.array([far_radius * np.exp(0.7j), 1.0 / far_radius *
                         np.exp(1.9j)])
        norm_pts = zfar[:1]
        det_pts = np.array([0.43 * np.exp(0.9j), 1.7 * np.exp(2.2j),
                            0.2 + 0.1j])
    else:
        norm_pts = np.array([far_radius * 1j])
        det_pts = np.array([0.4 + 0.7j, -1.1 + 0.9j, 2.0 - 1.3j])
    mfar = sol.evaluate(norm_pts)
    scaled = mfar.copy()
    scaled[..., :, 0] *= norm_pts[:, None] ** (-n)
    scaled[..., :, 1] *= norm_pts[:, None] ** n
    norm_res = float(np.abs(scaled - np.eye(2)).max())

    md = sol.evaluate(det_pts)
    det = md[..., 0, 0] * md[..., 1, 1] - md[..., 0, 1] * md[..., 1, 0]
    det_res = float(np.abs(det - 1.0).max())
    report = {"jump_residual": jump_res, "normalization_residual": norm_res,
              "det_residual": det_res, "npoints": npoints}
    sol.extraction.setdefault("diagnostics", {}).update(report)
    return report


# ---------------------------------------------------------------------------
# singular-integral solver on the circle
# ---------------------------------------------------------------------------

class _SIECircleImpl:
    def __init__(self, n, g_modes, grid):
        self.n = n
        self.g = g_modes  # shape (grid, 2, 2), full FFT layout
        self.grid = grid
        kmax = grid // 2 - 1
        self.c_plus = g_modes[: kmax + 1]
        self.c_minus = g_modes[-1: -kmax - 1: -1]

    def _m(self, z, inside):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape + (2, 2), dtype=complex)
        for i in range(2):
            for j in range(2):
                if inside:
                    out[..., i, j] = _eval_plus(self.c_plus[:, i, j], z)
                else:
                    out[..., i, j] = -_eval_minus(self.c_minus[:, i, j], z)
        out[..., 0, 0] += 1.0
        out[..., 1, 1] += 1.0
        return out

    def _to_y(self, m, z, inside):
        if inside:
            return m
        zn = np.asarray(z) ** self.n
        out = m.copy()
        out[..., :, 0] *= zn[..., None]
        out[..., :, 1] /= zn[..., None]
        return out

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        scalar = z.ndim == 0
        z = np.atleast_1d(z)
        if np.any(np.abs(np.abs(z) - 1.0) < 1e-8):
            raise RhopError("use boundary mode", _MODULE)
        inside = np.abs(z) < 1.0
        out = np.empty(z.shape + (2, 2), dtype=complex)
        if inside.any():
            out[inside] = self._m(z[inside], True)
        if (~inside).any():
            zo = z[~inside]
            out[~inside] = self._to_y(self._m(zo, False), zo, False)
        return out[0] if scalar else out

    def boundary(self, theta, side):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        z = np.exp(1j * theta)
        if side == "+":
            return self._m(z, True)
        return self._to_y(self._m(z, False), z, False)


def solve_rhp_circle(weight, n, modes=64, grid=None):
    """Solve the circle RHP for Y^{(n)} as a singular integral equation.

    The problem is normalized piecewise: T = Y inside the circle and
    T = Y diag(z^{-n}, z^n) outside, so T -> I at infinity, T is analytic at
    z = 0, and the jump becomes the bounded matrix
    vt = [[z^n, omega], [0, z^{-n}]].  With the trivial factorization
    (v_- = I, v_+ = vt; w_- = 0, w_+ = vt - I) the equation
    (1 - C_w) mu = I closes over the negative Fourier modes of mu, giving a
    finite block-Toeplitz system over modes -1..-M.  The solution is
    reconstructed as m = I + C(mu w_+) and converted back to Y, from which
    alpha_{n-1} = -conj(Y_11(0)) and kappa_{n-1}^2 = -Y_21(0) are read off.
    """
    if weight.contour != CIRCLE:
        raise RhopError("solve_rhp_circle requires a circle weight", _MODULE)
    if modes < n + 2:
        modes = n + 2
    m_modes = modes
    if grid is None:
        grid = 1 << max(11, (2 * (m_modes + n + 4)).bit_length())
    theta = trig_grid(grid)
    w_hat = np.fft.fft(weight_values(weight, theta)) / grid

    def what(k):
        return w_hat[k % grid]

    def w_plus_mode(k):
        """2x2 Fourier mode of w_+ = vt - I."""
        blk = np.zeros((2, 2), dtype=complex)
        blk[0, 1] = what(k)
        if k == n:
            blk[0, 0] += 1.0
        if k == -n:
            blk[1, 1] += 1.0
        if k == 0:
            blk[0, 0] -= 1.0
            blk[1, 1] -= 1.0
        return blk

    wtab = {k: w_plus_mode(k) for k in range(-m_modes - 1, m_modes + 1)}

    # unknown row vectors: mu_row(k, :) for k = -1..-M, equation
    # mu_{k,b} + sum_{j<0} sum_c mu_{j,c} W_{k-j}[c,b] = -W_k[a,b]
    mm = m_modes
    dim = 2 * mm
    amat = np.eye(dim, dtype=complex)
    for ki in range(mm):
        k = -1 - ki
        for ji in range(mm):
            j = -1 - ji
            blk = wtab[k - j]
            for c in range(2):
                for b in range(2):
                    amat[2 * ki + b, 2 * ji + c] += blk[c, b]
    rhs = np.zeros((dim, 2), dtype=complex)
    for ki in range(mm):
        k = -1 - ki
        blk = wtab[k]
        for a in range(2):
            for b in range(2):
                rhs[2 * ki + b, a] = -blk[a, b]
    try:
        sol = np.linalg.solve(amat, rhs)
    except np.linalg.LinAlgError:
        raise RhopError("increase M or precision", _MODULE)
    cond = np.linalg.cond(amat)
    if cond > 1e12:
        raise RhopError("increase M or precision", _MODULE)

    # mu on the sampling grid: mu = I + sum_{j<0} mu_j z^j
    z = np.exp(1j * theta)
    mu = np.zeros((grid, 2, 2), dtype=complex)
    mu[:, 0, 0] = 1.0
    mu[:, 1, 1] = 1.0
    zi = 1.0 / z
    zp = np.ones_like(z)
    for ji in range(mm):
        zp = zp * zi  # z^{-(ji+1)}
        for a in range(2):
            for b in range(2):
                mu[:, a, b] += sol[2 * ji + b, a] * zp

    # w_+ on the grid and the product g = mu w_+
    wgrid = np.zeros((grid, 2, 2), dtype=complex)
    wgrid[:, 0, 1] = weight_values(weight, theta)
    zn = z ** n
    wgrid[:, 0, 0] = zn - 1.0
    wgrid[:, 1, 1] = 1.0 / zn - 1.0
    g = np.einsum("tij,tjk->tik", mu, wgrid)
    g_modes = np.fft.fft(g, axis=0) / grid

    impl = _SIECircleImpl(n, g_modes, grid)
    y0 = impl.evaluate(np.array([0.0 + 0.0j]))[0]
    extraction = {
        "value_at_zero": y0,
        "alpha": None if n == 0 else -np.conj(y0[0, 0]),
        "kappa_sq": None if n == 0 else -complex(y0[1, 0]).real,
        "modes": m_modes,
        "condition": float(cond),
    }
    return RHSolution(CIRCLE, n, weight, "sie", extraction, impl)


# ---------------------------------------------------------------------------
# transfer identities
# ---------------------------------------------------------------------------

_E11 = np.array([[1.0, 0.0], [0.0, 0.0]])


def transfer_identity_line(weight, n, points=None, rec=None):
    """Residual of X^{(n+1)} = (z E11 + X1^{(n+1)} E11 - E11 X1^{(n)}) X^{(n)}.

    The transfer matrix's first row encodes the three-term recurrence:
    a_n = (X1^{(n)})_11 - (X1^{(n+1)})_11 and b_{n-1}^2 through the
    (1,2) entry.  Returns (max relative residual over points, coefficients
    read off the transfer matrix).
    """
    if points is None:
        points = np.array([0.4 + 0.6j, -0.8 + 0.5j, 1.3 - 0.7j, -1.6 - 0.9j,
                           0.2 + 1.4j, 2.1 + 0.8j, -0.5 - 1.2j, 0.9 + 0.35j])
    if rec is None:
        rec = recurrence_from_measure(weight, n + 2)
    sol_n = assemble_X(weight, n, rec=rec)
    sol_n1 = assemble_X(weight, n + 1, rec=rec)
    x1n = sol_n.extraction["residue"]
    x1n1 = sol_n1.extraction["residue"]
    points = np.asarray(points, dtype=complex)
    xn = sol_n.evaluate(points)
    xn1 = sol_n1.evaluate(points)
    t = (x1n1 @ _E11 - _E11 @ x1n)[None, :, :] + \
        points[:, None, None] * _E11[None, :, :]
    resid = xn1 - np.einsum("pij,pjk->pik", t, xn)
    scale = 1.0 + np.abs(xn1).max(axis=(-2, -1), keepdims=True)
    max_res = float((np.abs(resid) / scale).max())
    a_n = complex(x1n[0, 0] - x1n1[0, 0]).real
    b_sq = complex(x1n[0, 1] * x1n[1, 0]).real  # same-index product
    return {"max_residual": max_res, "a_n": a_n, "b_nm1_sq": b_sq,
            "printed_20_5": complex(x1n[0, 1] * x1n1[1, 0])}


def transfer_identity_circle(weight, n, points=None, seq=None):
    """Residual of Y^{(n+1)} diag(1, z) = [[z + a, b], [c, 1]] Y^{(n)} with

    a = conj(alpha_n) alpha_{n-1}, b = conj(alpha_n)/kappa_n^2,
    c = kappa_n^2 alpha_{n-1}  (n >= 1), plus the det Y = 1 residual.
    """
    if n < 1:
        raise RhopError("circle transfer identity needs n >= 1", _MODULE)
    if points is None:
        rad = np.array([0.35, 0.6, 1.45, 2.2])
        ang = np.array([0.4, 1.7, 2.9, 4.4])
        points = np.concatenate([r * np.exp(1j * ang) for r in rad])
    if seq is None:
        seq = verblunsky_levinson(weight, n + 1)
    alpha, _, kappa = seq.as_complex()
    a_hat = np.conj(alpha[n]) * alpha[n - 1]
    b_hat = np.conj(alpha[n]) / kappa[n] ** 2
    c_hat = kappa[n] ** 2 * alpha[n - 1]
    sol_n = assemble_Y(weight, n, seq=seq)
    sol_n1 = assemble_Y(weight, n + 1, seq=seq)
    points = np.asarray(points, dtype=complex)
    yn = sol_n.evaluate(points)
    yn1 = sol_n1.evaluate(points)
    lhs = yn1.copy()
    lhs[..., :, 1] *= points[:, None]
    t = np.zeros(points.shape + (2, 2), dtype=complex)
    t[..., 0, 0] = points + a_hat
    t[..., 0, 1] = b_hat
    t[..., 1, 0] = c_hat
    t[..., 1, 1] = 1.0
    resid = lhs - np.einsum("pij,pjk->pik", t, yn)
    scale = 1.0 + np.abs(lhs).max(axis=(-2, -1), keepdims=True)
    det = yn[..., 0, 0] * yn[..., 1, 1] - yn[..., 0, 1] * yn[..., 1, 0]
    return {"max_residual": float((np.abs(resid) / scale).max()),
            "det_residual": float(np.abs(det - 1.0).max())}
