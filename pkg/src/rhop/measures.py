"""Weights and measures on the real line and the unit circle.

Conventions fixed here and used everywhere else in the package:

* a circle measure is d(mu) = omega(theta) dtheta/(2 pi) with trigonometric
  moments mu_k = int exp(-i k theta) d(mu); real weights give
  mu_{-k} = conj(mu_k),
* a line measure is d(mu) = w(x) dx with power moments m_j = int x^j w(x) dx,
* the Caratheodory function of a probability measure on the circle is
  F(z) = 1 + 2 sum_{k>=1} mu_k z^k and the Schur function is
  f(z) = (F(z) - 1) / (z (F(z) + 1)).

Builtin weights (the spec mini-language)::

    lebesgue                      omega = 1
    onepluscos                    omega = 1 + cos(theta)
    expcos:s=<real>               omega = exp(s cos(theta))
    gauss                         w = exp(-x^2)/sqrt(pi)
    quartic:g=<real>,d=<real>     w = exp(-(g x^4 + d x^2))
    onplusgauss:c=<real>          w = 1 + c exp(-x^2)   (factor weight; no moments)
    sampled:<path>                CSV of grid,value on a uniform grid

Only smooth, a.e. positive weights are supported; singular or atomic parts
and weights vanishing on sets of positive measure are out of scope.
"""

from __future__ import annotations

import dataclasses
import math
from fractions import Fraction

import mpmath as mp
import numpy as np

from .errors import RhopError
from .numeric import (
    DOUBLE,
    EXACT,
    EXTENDED,
    EXTENDED_DPS,
    composite_gl,
    double_factorial,
    extended_ctx,
    fourier_coefficients,
    trig_grid,
)

LINE = "line"
CIRCLE = "circle"

_MODULE = "measures"


# ---------------------------------------------------------------------------
# weight specifications
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class WeightSpec:
    """A weight on the line or the circle.

    ``params`` is a sorted tuple of (name, value) pairs so instances are
    hashable and usable as cache keys.  ``samples`` holds (grid, values)
    tuples for sampled weights; builtin weights leave it None.
    """

    contour: str
    name: str
    kind: str = "builtin"
    params: tuple = ()
    samples: tuple | None = None
    normalization: str = "probability"

    def param(self, key, default=None):
        for k, v in self.params:
            if k == key:
                return v
        if default is None:
            raise RhopError(f"weight {self.name} missing parameter {key}", _MODULE)
        return default

    def label(self):
        if self.kind == "sampled":
            return f"sampled[{self.contour}]"
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={v:g}" for k, v in self.params)
        return f"{self.name}:{inner}"


_LINE_NAMES = ("gauss", "quartic", "onplusgauss")
_CIRCLE_NAMES = ("lebesgue", "onepluscos", "expcos")


def make_weight(name, contour=None, **params):
    if name in _CIRCLE_NAMES:
        ctr = CIRCLE
    elif name in _LINE_NAMES:
        ctr = LINE
    else:
        raise RhopError(f"unknown builtin weight {name!r}", _MODULE)
    if contour is not None and contour != ctr:
        raise RhopError(f"weight {name} lives on the {ctr}, not the {contour}", _MODULE)
    norm = "probability"
    if name == "expcos" or name == "quartic" or name == "onplusgauss":
        norm = "raw"
    return WeightSpec(contour=ctr, name=name,
                      params=tuple(sorted((k, float(v)) for k, v in params.items())),
                      normalization=norm)


def parse_weight(text, contour=None):
    """Parse the weight mini-language (see module docstring)."""
    name, _, rest = text.partition(":")
    if name == "sampled":
        return load_sampled(rest, contour)
    params = {}
    if rest:
        for piece in rest.split(","):
            key, sep, val = piece.partition("=")
            if not sep:
                raise RhopError(f"malformed weight parameter {piece!r}", _MODULE)
            params[key] = float(val)
    return make_weight(name, contour=contour, **params)


def load_sampled(path, contour=None):
    """Load a sampled weight from a CSV of grid,value rows."""
    grid = []
    vals = []
    try:
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#") or line[0].isalpha():
                    continue
                g, v = line.split(",")
                grid.append(float(g))
                vals.append(float(v))
    except OSError as exc:
        raise RhopError(f"cannot read sampled weight: {exc}", _MODULE)
    grid = np.asarray(grid)
    vals = np.asarray(vals)
    if np.any(vals <= 0):
        raise RhopError("sampled weight must be strictly positive", _MODULE)
    if contour is None:
        # heuristics: a grid spanning ~[0, 2pi) is a circle weight
        contour = CIRCLE if abs(grid[0]) < 1e-12 and grid[-1] < 2 * np.pi else LINE
    return WeightSpec(contour=contour, name="sampled", kind="sampled",
                      params=(), samples=(tuple(grid), tuple(vals)),
                      normalization="raw")


def weight_values(spec, x):
    """Evaluate the weight on a real array (theta for circle weights)."""
    x = np.asarray(x, dtype=float)
    if spec.kind == "sampled":
        grid = np.asarray(spec.samples[0])
        vals = np.asarray(spec.samples[1])
        if spec.contour == CIRCLE:
            period = 2 * np.pi
            return np.interp(np.mod(x, period), grid, vals, period=period)
        return np.interp(x, grid, vals)
    n = spec.name
    if n == "lebesgue":
        return np.ones_like(x)
    if n == "onepluscos":
        return 1.0 + np.cos(x)
    if n == "expcos":
        return np.exp(spec.param("s") * np.cos(x))
    if n == "gauss":
        return np.exp(-x * x) / math.sqrt(math.pi)
    if n == "quartic":
        g = spec.param("g")
        d = spec.param("d", 0.0)
        return np.exp(-(g * x ** 4 + d * x * x))
    if n == "onplusgauss":
        return 1.0 + spec.param("c") * np.exp(-x * x)
    raise RhopError(f"unknown weight {n!r}", _MODULE)


def weight_values_complex(spec, z):
    """Analytic continuation of a builtin line weight to complex arguments.

    Needed for boundary values of Cauchy transforms (contours shifted into
    the strip of analyticity).  All builtin line weights are entire.
    """
    if spec.contour != LINE or spec.kind != "builtin":
        raise RhopError("complex evaluation available for builtin line weights only",
                        _MODULE)
    z = np.asarray(z, dtype=complex)
    n = spec.name
    if n == "gauss":
        return np.exp(-z * z) / math.sqrt(math.pi)
    if n == "quartic":
        g = spec.param("g")
        d = spec.param("d", 0.0)
        return np.exp(-(g * z ** 4 + d * z * z))
    if n == "onplusgauss":
        return 1.0 + spec.param("c") * np.exp(-z * z)
    raise RhopError(f"unknown weight {n!r}", _MODULE)


def gaussian_terms(spec):
    """Decompose a line weight as sum_i c_i exp(-a_i x^2) if possible.

    Returns a list of (c, a) pairs or None.  Such decompositions admit
    closed-form moments at any precision, which backs the exact/extended
    Hankel-determinant paths.
    """
    if spec.contour != LINE or spec.kind != "builtin":
        return None
    n = spec.name
    if n == "gauss":
        return [(1.0 / math.sqrt(math.pi), 1.0)]
    if n == "onplusgauss":
        return [(1.0, 0.0), (spec.param("c"), 1.0)]
    if n == "quartic" and spec.param("g") == 0.0:
        return [(1.0, spec.param("d"))]
    return None


def product_terms(t1, t2):
    """Gaussian-term list of a product weight: exponents add."""
    return [(c1 * c2, a1 + a2) for c1, a1 in t1 for c2, a2 in t2]


def decay_radius(spec, order, tol=1e-15):
    """Truncation point T with |x|^order * w(x) negligible beyond |x| > T."""
    if spec.kind == "sampled":
        return float(np.max(np.abs(spec.samples[0])))
    t = 1.0
    while t < 64.0:
        mag = float(weight_values(spec, np.array([t]))[0]) * (t ** order) * (1.0 + t)
        if mag < tol:
            return t + 1.0
        t *= 1.25
    raise RhopError("insufficient decay", _MODULE)


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

@dataclasses.dataclass
class MomentData:
    """Moment sequence of a measure.

    line:   values[j] = m_j = int x^j w dx           (real)
    circle: values[k] = mu_k = int e^{-ik theta} dmu (complex; mu_{-k} implied)
    """

    contour: str
    values: object
    precision: str = DOUBLE
    weight: WeightSpec | None = None

    @property
    def order(self):
        return len(self.values) - 1

    def value(self, k):
        if self.contour == CIRCLE and k < 0:
            v = self.values[-k]
            return v.conjugate() if hasattr(v, "conjugate") else v
        return self.values[k]

    def m0(self):
        return self.values[0]


def _exact_line_moment(spec, j):
    if spec.name == "gauss":
        if j % 2:
            return Fraction(0)
        m = j // 2
        return Fraction(double_factorial(2 * m - 1), 2 ** m)
    return None


def _mp_gaussian_moment(j, a):
    # int x^j exp(-a x^2) dx
    if j % 2:
        return mp.mpf(0)
    if a <= 0:
        raise RhopError("insufficient decay", _MODULE)
    m = j // 2
    return mp.gamma(m + mp.mpf(1) / 2) / mp.mpf(a) ** (m + mp.mpf(1) / 2)


def line_moments(spec, order, precision=DOUBLE, tol=1e-12):
    """Moments m_0..m_order of a line weight.

    Gaussian-type weights use the closed Gamma-function form (exact through
    the Gauss-Hermite correspondence); other builtins fall back to composite
    Gauss-Legendre on a decay-truncated interval, refined until stable.
    """
    if spec.contour != LINE:
        raise RhopError("line_moments requires a line weight", _MODULE)
    if order < 0:
        raise RhopError("order must be >= 0", _MODULE)

    if precision == EXACT:
        vals = []
        for j in range(order + 1):
            v = _exact_line_moment(spec, j)
            if v is None:
                raise RhopError(
                    f"exact moments unavailable for weight {spec.label()}", _MODULE)
            vals.append(v)
        md = MomentData(LINE, vals, EXACT, spec)
        _check_hankel_pd(md)
        return md

    terms = gaussian_terms(spec)
    if terms is not None:
        if any(a <= 0 for _, a in terms):
            raise RhopError("insufficient decay", _MODULE)
        if precision == EXTENDED:
            with extended_ctx():
                vals = [mp.fsum(c * _mp_gaussian_moment(j, a) for c, a in terms)
                        for j in range(order + 1)]
        else:
            vals = np.array([
                sum(c * float(_mp_gaussian_moment(j, a)) for c, a in terms)
                for j in range(order + 1)
            ])
        md = MomentData(LINE, vals, precision, spec)
        _check_hankel_pd(md)
        return md

    if precision == EXTENDED:
        if spec.kind != "builtin":
            raise RhopError("extended moments need a builtin weight", _MODULE)
        g = spec.param("g")
        d = spec.param("d", 0.0)
        with extended_ctx():
            def w(x):
                return mp.exp(-(g * x ** 4 + d * x * x))
            vals = [mp.quad(lambda x, jj=j: x ** jj * w(x), [-mp.inf, 0, mp.inf])
                    for j in range(order + 1)]
        md = MomentData(LINE, vals, EXTENDED, spec)
        _check_hankel_pd(md)
        return md

    if spec.kind == "sampled":
        grid = np.asarray(spec.samples[0])
        vals_w = np.asarray(spec.samples[1])
        moments = np.array([np.trapz(grid ** j * vals_w, grid)
                            for j in range(order + 1)])
        md = MomentData(LINE, moments, DOUBLE, spec)
        _check_hankel_pd(md)
        return md

    t_max = decay_radius(spec, order, tol=min(tol, 1e-15))
    prev = None
    panels = max(2 * int(t_max) + 2, 8)
    for _ in range(6):
        x, wq = composite_gl(-t_max, t_max, panels)
        wx = weight_values(spec, x) * wq
        moments = np.array([(x ** j) @ wx for j in range(order + 1)])
        if prev is not None:
            scale = np.maximum(np.abs(moments), 1.0)
            if np.max(np.abs(moments - prev) / scale) < tol:
                break
        prev = moments
        panels *= 2
    else:
        raise RhopError("insufficient decay", _MODULE)
    # quadrature tail estimate on [T, 2T]
    xt, wt = composite_gl(t_max, 2 * t_max, 8)
    tail = abs((np.abs(xt) ** order * weight_values(spec, xt)) @ wt)
    if tail > max(tol, 1e3 * np.finfo(float).eps) * max(1.0, abs(moments[0])):
        raise RhopError("insufficient decay", _MODULE)
    md = MomentData(LINE, moments, DOUBLE, spec)
    _check_hankel_pd(md)
    return md


def _exact_circle_moment(spec, k):
    if spec.name == "lebesgue":
        return Fraction(1) if k == 0 else Fraction(0)
    if spec.name == "onepluscos":
        if k == 0:
            return Fraction(1)
        if abs(k) == 1:
            return Fraction(1, 2)
        return Fraction(0)
    return None


def circle_moments(spec, order, precision=DOUBLE, grid_size=None):
    """Trigonometric moments mu_0..mu_order of a circle weight.

    Uses uniform-grid trapezoid sums (spectrally accurate for smooth periodic
    weights), doubling the grid until the computed coefficients stabilize and
    the top of the spectrum sits at the noise floor.
    """
    if spec.contour != CIRCLE:
        raise RhopError("circle_moments requires a circle weight", _MODULE)
    if order < 0:
        raise RhopError("order must be >= 0", _MODULE)

    if precision == EXACT:
        vals = []
        for k in range(order + 1):
            v = _exact_circle_moment(spec, k)
            if v is None:
                raise RhopError(
                    f"exact moments unavailable for weight {spec.label()}", _MODULE)
            vals.append(v)
        md = MomentData(CIRCLE, vals, EXACT, spec)
        _check_toeplitz_pd(md)
        return md

    if precision == EXTENDED:
        with extended_ctx():
            if spec.name in ("lebesgue", "onepluscos"):
                vals = []
                for k in range(order + 1):
                    q = _exact_circle_moment(spec, k)
                    vals.append(mp.mpf(q.numerator) / q.denominator)
            elif spec.name == "expcos":
                s = spec.param("s")
                vals = [mp.besseli(k, s) for k in range(order + 1)]
            else:
                raise RhopError(
                    f"extended moments unavailable for weight {spec.label()}",
                    _MODULE)
        md = MomentData(CIRCLE, vals, EXTENDED, spec)
        _check_toeplitz_pd(md)
        return md

    if spec.kind == "sampled":
        vals_w = np.asarray(spec.samples[1])
        m = len(vals_w)
        coeffs = fourier_coefficients(vals_w, min(order, m // 2 - 1))
        kmax = (len(coeffs) - 1) // 2
        if kmax < order:
            raise RhopError("grid underresolved", _MODULE)
        top = np.abs(np.fft.fft(vals_w) / m)[m // 4: 3 * m // 4]
        if top.size and top.max() > 1e-10 * max(np.abs(vals_w).max(), 1.0):
            raise RhopError("grid underresolved", _MODULE)
        out = coeffs[kmax: kmax + order + 1]
        md = MomentData(CIRCLE, out, DOUBLE, spec)
        _check_toeplitz_pd(md)
        return md

    m = grid_size or max(256, 8 * (order + 1))
    prev = None
    for _ in range(8):
        theta = trig_grid(m)
        vals_w = weight_values(spec, theta)
        f = np.fft.fft(vals_w) / m
        out = np.array([f[k] for k in range(order + 1)])
        noise = np.abs(f[m // 4: 3 * m // 4]).max() if m >= 8 else np.inf
        if prev is not None and len(prev) == len(out):
            delta = np.abs(out - prev).max()
            if delta < 1e-14 * max(1.0, abs(out[0])) and \
                    noise < 1e-12 * max(1.0, abs(out[0])):
                break
        prev = out
        m *= 2
    else:
        raise RhopError("grid underresolved", _MODULE)
    md = MomentData(CIRCLE, out, DOUBLE, spec)
    _check_toeplitz_pd(md)
    return md


# ---------------------------------------------------------------------------
# moment matrices and positivity
# ---------------------------------------------------------------------------

def hankel_matrix(moments, n):
    """(n+1)x(n+1) Hankel matrix (m_{j+k}) from line moments."""
    if moments.order < 2 * n:
        raise RhopError(f"need moments through order {2 * n}", _MODULE)
    vals = moments.values
    if moments.precision == DOUBLE:
        v = np.asarray(vals, dtype=float)
        idx = np.add.outer(np.arange(n + 1), np.arange(n + 1))
        return v[idx]
    return [[vals[j + k] for k in range(n + 1)] for j in range(n + 1)]


def toeplitz_matrix(moments, n):
    """(n+1)x(n+1) Toeplitz matrix (mu_{j-k}) from circle moments."""
    if moments.order < n:
        raise RhopError(f"need moments through order {n}", _MODULE)
    if moments.precision == DOUBLE:
        v = np.asarray(moments.values, dtype=complex)
        out = np.empty((n + 1, n + 1), dtype=complex)
        for j in range(n + 1):
            for k in range(n + 1):
                d = j - k
                out[j, k] = v[d] if d >= 0 else np.conj(v[-d])
        return out
    out = []
    for j in range(n + 1):
        row = []
        for k in range(n + 1):
            row.append(moments.value(j - k))
        out.append(row)
    return out


def _check_hankel_pd(md, max_order=20):
    n = min(md.order // 2, max_order)
    if n < 0:
        return
    if md.precision == DOUBLE:
        h = hankel_matrix(md, n)
        # scale rows/cols to tame the huge dynamic range of raw moments
        d = 1.0 / np.sqrt(np.abs(np.diag(h)))
        eig = np.linalg.eigvalsh(h * d[:, None] * d[None, :])
        if eig.min() <= 0:
            raise RhopError("degenerate measure", _MODULE)


def _check_toeplitz_pd(md, max_order=20):
    n = min(md.order, max_order)
    if md.precision == DOUBLE:
        t = toeplitz_matrix(md, n)
        eig = np.linalg.eigvalsh(t)
        if eig.min() <= 0:
            raise RhopError("degenerate measure", _MODULE)


# ---------------------------------------------------------------------------
# Caratheodory and Schur functions
# ---------------------------------------------------------------------------

def caratheodory(moments, z, tol=1e-12):
    """Caratheodory function F(z) = int (s+z)/(s-z) dmu, |z| < 1.

    Evaluated from the moment series F(z) = 1 + 2 sum mu_k z^k of the
    probability-normalized measure (raw input is normalized by mu_0).
    """
    if moments.contour != CIRCLE:
        raise RhopError("caratheodory requires circle moments", _MODULE)
    z = complex(z)
    if abs(z) >= 1.0:
        raise RhopError("caratheodory requires |z| < 1", _MODULE)
    m0 = complex(moments.values[0])
    c = np.asarray([complex(v) for v in moments.values]) / m0
    kmax = len(c) - 1
    if abs(z) > 0 and kmax >= 1:
        # tail estimated from the trailing computed coefficients; |mu_k| <= mu_0
        # caps it when the series is truncated mid-decay
        top = np.abs(c[max(1, kmax - 1):]).max()
        tail = 2.0 * top * abs(z) ** (kmax + 1) / (1.0 - abs(z))
        if tail > tol:
            raise RhopError("insufficient moments", _MODULE)
    acc = 0.0 + 0.0j
    for k in range(kmax, 0, -1):
        acc = (acc + c[k]) * z
    f = 1.0 + 2.0 * acc
    if f.real <= 0:
        raise RhopError("measure degenerate or underresolved", _MODULE)
    return f


def schur_function(moments, z, tol=1e-12):
    """Schur function f(z) = (F(z)-1)/(z(F(z)+1)); f(0) = mu_1 (normalized)."""
    z = complex(z)
    if abs(z) >= 1.0:
        raise RhopError("schur_function requires |z| < 1", _MODULE)
    if z == 0:
        m0 = complex(moments.values[0])
        if moments.order < 1:
            raise RhopError("insufficient moments", _MODULE)
        val = complex(moments.values[1]) / m0
    else:
        f = caratheodory(moments, z, tol=tol)
        val = (f - 1.0) / (z * (f + 1.0))
    if abs(val) >= 1.0:
        raise RhopError("measure degenerate or underresolved", _MODULE)
    return val
