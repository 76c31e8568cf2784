"""Builders for the generator families: sinc, B-splines, and the banded family.

The banded family ``psi`` places scaled copies of the frequency blocks
``h_j`` (see :mod:`sispace.bumps`) at integer centers ``n*(gamma_j + l)``,
``l = 0..beta_j-1``, together with their mirror images, where

    beta_j  = ceil(2**(j*beta))          block count at depth j
    gamma_j = beta_0 + ... + beta_{j-1}  cumulative offset (gamma_0 = 0)

The resulting spectrum is real, even, supported in (-1/2, 1/2) + n*Z, and
its squared integer-periodization equals the block partition of unity away
from half-integer frequencies.  Two evaluation routes exist for the time
domain: the grid route (inverse transform of the sampled spectrum) and an
analytic route combining tabulated window transforms with closed-form
geometric phase sums.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from .bumps import g0, g1, h, h_support
from .grid import (FrequencyGrid, GridError, SampledSignal, SampledSpectrum,
                   make_grid, next_pow2)

MAX_BSPLINE_DEGREE = 25

# Auto-sizing policy: at least this many frequency samples across the
# narrowest block, subject to the overall point-count cap below.
BLOCK_SAMPLES_TARGET = 32
N_POINTS_CAP = 1 << 24


def _ceil_pow2_of(t):
    """ceil(2**t) robust against float representation of t (e.g. 5*0.4)."""
    v = 2.0 ** t
    r = round(v)
    if abs(v - r) <= 1e-9 * max(1.0, abs(r)):
        return int(r)
    return int(math.ceil(v))


@dataclass(frozen=True)
class PsiParams:
    """Parameters of the banded generator plus derived block bookkeeping."""

    alpha: float
    beta: float
    n: int
    J: int = 5

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("n must be an integer >= 2")
        if int(self.J) != self.J or self.J < 1:
            raise ValueError("J must be an integer >= 1")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "J", int(self.J))

    @property
    def block_counts(self):
        """(beta_0, ..., beta_J); strictly increasing from j = 1 on."""
        return tuple(_ceil_pow2_of(j * self.beta) for j in range(self.J + 1))

    @property
    def block_offsets(self):
        """(gamma_0, ..., gamma_{J+1}) with gamma_0 = 0."""
        counts = self.block_counts
        out = [0]
        for c in counts:
            out.append(out[-1] + c)
        return tuple(out)

    @property
    def required_half_range(self):
        """Smallest grid half-range that fits all blocks with 1 unit margin."""
        return self.n * self.block_offsets[self.J + 1] + 1

    @property
    def exclusion_halfwidth(self):
        """Half-width around half-integer frequencies where the truncated
        partition has not completed."""
        return 2.0 ** (-self.J * self.alpha) / 2.0

    def to_json(self):
        return {"alpha": self.alpha, "beta": self.beta, "n": self.n, "J": self.J}


@dataclass(frozen=True)
class GeneratorSpec:
    """Which generator to build: sinc, bspline(degree), psi(params), custom."""

    kind: str
    degree: int | None = None
    psi: PsiParams | None = None
    path: str | None = None

    def __post_init__(self):
        if self.kind not in ("sinc", "bspline", "psi", "custom"):
            raise ValueError(f"unknown generator variant {self.kind!r}")
        if self.kind == "bspline":
            if self.degree is None or self.degree < 0:
                raise ValueError("bspline requires a nonnegative degree")
            if self.degree > MAX_BSPLINE_DEGREE:
                raise ValueError(f"bspline degree capped at {MAX_BSPLINE_DEGREE}")
        if self.kind == "psi" and self.psi is None:
            raise ValueError("psi requires parameters")
        if self.kind == "custom" and self.path is None:
            raise ValueError("custom requires a path")

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        variant = obj.get("variant")
        if variant == "sinc":
            return cls(kind="sinc")
        if variant == "bspline":
            return cls(kind="bspline", degree=int(obj["degree"]))
        if variant == "psi":
            params = PsiParams(alpha=float(obj["alpha"]), beta=float(obj["beta"]),
                               n=int(obj["n"]), J=int(obj.get("J", 5)))
            return cls(kind="psi", psi=params)
        if variant == "custom":
            return cls(kind="custom", path=str(obj["path"]))
        raise ValueError(f"unknown generator variant {variant!r}")

    def to_json(self):
        if self.kind == "sinc":
            return {"variant": "sinc"}
        if self.kind == "bspline":
            return {"variant": "bspline", "degree": self.degree}
        if self.kind == "psi":
            return {"variant": "psi", **self.psi.to_json()}
        return {"variant": "custom", "path": self.path}

    @property
    def label(self):
        if self.kind == "sinc":
            return "sinc"
        if self.kind == "bspline":
            return f"bspline{self.degree}"
        if self.kind == "psi":
            p = self.psi
            # no commas: labels land in CSV cells
            return f"psi(a={p.alpha:g} b={p.beta:g} n={p.n} J={p.J})"
        return f"custom:{self.path}"


def auto_grid(spec: GeneratorSpec):
    """Default grid sizing per generator; returns (grid, sizing_info).

    For the banded family: half-range fits every block with margin, and the
    per-unit sampling targets ``BLOCK_SAMPLES_TARGET`` samples across the
    narrowest block, capped so N never exceeds ``N_POINTS_CAP`` (the achieved
    sampling is reported either way).
    """
    if spec.kind == "sinc":
        # Long time span for the slowly decaying tail; 1 unit of spectrum.
        return make_grid(1024, 16), {"rule": "sinc-default"}
    if spec.kind == "bspline":
        # Wide half-range so the integer-periodization tail of the powerlaw
        # spectrum falls below 1e-11; compact time support needs little span.
        return make_grid(64, 1024), {"rule": "bspline-default"}
    if spec.kind == "psi":
        p = spec.psi
        Xi = next_pow2(p.n * p.block_offsets[p.J + 1] + 2)
        lo, hi = h_support(p.J, p.alpha)
        narrow = hi - lo
        S_requested = next_pow2(math.ceil(BLOCK_SAMPLES_TARGET / narrow))
        S_cap = max(64, N_POINTS_CAP // (2 * Xi))
        S = max(64, min(S_requested, S_cap))
        info = {
            "rule": "psi-auto",
            "required_half_range": p.required_half_range,
            "narrowest_block_width": narrow,
            "requested_samples_per_unit": S_requested,
            "narrowest_block_samples": S * narrow,
        }
        return make_grid(S, Xi), info
    raise ValueError("custom generators carry their own grid")


def build_sinc(grid: FrequencyGrid) -> SampledSpectrum:
    """Indicator of [-1/2, 1/2]; value 1/2 at the two endpoint samples.

    The symmetric endpoint convention leaves a measure-zero artifact in
    grid analyses exactly at half-integer frequencies, declared through
    ``meta['exclusion_halfwidth'] = 0.0``.
    """
    S = grid.samples_per_unit
    values = np.zeros(grid.n_points)
    center = grid.n_points // 2
    half = S // 2
    values[center - half + 1:center + half] = 1.0
    values[center - half] = 0.5
    values[center + half] = 0.5
    return SampledSpectrum(grid=grid, values=values, label="sinc", hermitian=True,
                           meta={"exclusion_halfwidth": 0.0})


def build_bspline(degree: int, grid: FrequencyGrid):
    """Cardinal B-spline of the given degree on [0, degree+1].

    Returns ``(signal, spectrum)``: the signal from iterated discrete
    convolution of the sampled unit indicator (trapezoid normalization),
    the spectrum from the closed form ``(exp(-pi i xi) sinc(xi))**(degree+1)``.
    The two agree under the discrete transform to quadrature accuracy.
    """
    if degree < 0:
        raise ValueError("degree must be >= 0")
    if degree > MAX_BSPLINE_DEGREE:
        raise ValueError(f"degree capped at {MAX_BSPLINE_DEGREE} "
                         "(iterated convolution conditioning)")
    if grid.time_half_span < degree + 2:
        raise GridError(f"time span too short for degree {degree}; "
                        f"need samples_per_unit >= {2 * (degree + 2)}")

    dx = grid.time_spacing
    per_unit = 2 * grid.half_range
    # Unit indicator sampled on [0, 1] with midpoint values at the jumps.
    base = np.ones(per_unit + 1)
    base[0] = 0.5
    base[-1] = 0.5
    piece = base
    for _ in range(degree):
        piece = np.convolve(piece, base) * dx
    values = np.zeros(grid.n_points)
    start = grid.n_points // 2  # x = 0
    values[start:start + piece.size] = piece
    signal = SampledSignal(grid=grid, values=values, label=f"bspline{degree}")

    xi = grid.xi
    spectrum_values = (np.exp(-1j * np.pi * xi) * np.sinc(xi)) ** (degree + 1)
    spectrum = SampledSpectrum(grid=grid, values=spectrum_values,
                               label=f"bspline{degree}", hermitian=True,
                               meta={"degree": degree, "full_frequency_support": True})
    return signal, spectrum


def _block_layout(params: PsiParams):
    """Per-depth placement facts for the positive-frequency blocks."""
    counts = params.block_counts
    offsets = params.block_offsets
    layout = []
    for j in range(1, params.J + 1):
        lo, hi = h_support(j, params.alpha)
        layout.append({
            "j": j,
            "count": counts[j],
            "weight": counts[j] ** -0.5,
            "support_lo": lo,
            "support_hi": hi,
            "center_first": params.n * offsets[j],
            "center_step": params.n,
        })
    return layout


def build_psi_spectrum(params: PsiParams, grid: FrequencyGrid) -> SampledSpectrum:
    """Assemble the banded spectrum on the grid.

    Blocks are evaluated once per depth and written to pairwise-disjoint
    index ranges (asserted); the negative half is an exact mirror of the
    positive half, enforcing evenness bitwise.
    """
    need = params.required_half_range
    if grid.half_range < need:
        raise GridError(f"grid too small for these block parameters: "
                        f"need half_range >= {need}, have {grid.half_range}")
    S = grid.samples_per_unit
    N = grid.n_points
    center = N // 2
    values = np.zeros(N)
    written = np.zeros(N - center, dtype=bool)  # nonnegative-frequency half

    def paint(idx, vals):
        if written[idx].any():
            raise AssertionError("block supports overlap on the grid")
        written[idx] = True
        values[center + idx] = vals

    # central block
    lo0, hi0 = h_support(0, params.alpha)
    idx0 = np.arange(0, int(math.floor(hi0 * S)) + 1)
    paint(idx0, h(idx0 / S, 0, params.alpha))

    for blk in _block_layout(params):
        lo, hi = blk["support_lo"], blk["support_hi"]
        rel = np.arange(int(math.floor(lo * S)) + 1, int(math.ceil(hi * S)))
        samples = blk["weight"] * h(rel / S, blk["j"], params.alpha)
        for l in range(blk["count"]):
            base = (blk["center_first"] + l * blk["center_step"]) * S
            paint(base + rel, samples)

    # mirror: value at -xi equals value at +xi, sample by sample
    values[1:center] = values[center + 1:][::-1]
    values[0] = 0.0

    meta = {
        "psi": params.to_json(),
        "exclusion_halfwidth": params.exclusion_halfwidth,
        "blocks": _block_layout(params),
    }
    return SampledSpectrum(grid=grid, values=values,
                           label=GeneratorSpec(kind="psi", psi=params).label,
                           hermitian=True, meta=meta)


# ---------------------------------------------------------------------------
# analytic time-domain route
# ---------------------------------------------------------------------------

TABLE_X_MAX = 64.0
TABLE_X_SAMPLES = 4097   # spacing 1/32 over [-64, 64], includes 0
TABLE_QUAD_NODES = 8193


def _inverse_transform_table(window_values, xi_nodes, x_nodes):
    """Trapezoid quadrature of integral w(xi) exp(2 pi i xi x) dxi, chunked in x."""
    dxi = xi_nodes[1] - xi_nodes[0]
    weights = np.full(xi_nodes.size, dxi)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    wv = window_values * weights
    out = np.empty(x_nodes.size, dtype=complex)
    chunk = 256
    for start in range(0, x_nodes.size, chunk):
        xs = x_nodes[start:start + chunk]
        out[start:start + chunk] = np.exp(2j * np.pi * np.outer(xs, xi_nodes)) @ wv
    return out


class WindowTables:
    """Tabulated inverse transforms of ``g0`` and ``g1`` with cubic interpolation.

    Values beyond ``|x| = x_max`` evaluate to 0; ``tail_bound`` records the
    largest magnitude seen on the outer 2% of each table, which bounds the
    truncation error committed by that convention.
    """

    def __init__(self, alpha, x_max=TABLE_X_MAX, n_x=TABLE_X_SAMPLES,
                 n_quad=TABLE_QUAD_NODES):
        self.alpha = alpha
        self.x_max = x_max
        x_nodes = np.linspace(-x_max, x_max, n_x)

        xi0 = np.linspace(-1.0, 1.0, n_quad)
        g0_inv = _inverse_transform_table(g0(xi0), xi0, x_nodes)
        xi1 = np.linspace(-1.0, 2.0 ** (-alpha), n_quad)
        g1_inv = _inverse_transform_table(g1(xi1, alpha), xi1, x_nodes)

        self._g0 = CubicSpline(x_nodes, g0_inv.real)
        self._g1 = CubicSpline(x_nodes, g1_inv)
        edge = x_nodes.size // 50
        self.tail_bound = float(max(np.abs(g0_inv[:edge]).max(),
                                    np.abs(g0_inv[-edge:]).max(),
                                    np.abs(g1_inv[:edge]).max(),
                                    np.abs(g1_inv[-edge:]).max()))

    def g0_inv(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        ok = np.abs(x) <= self.x_max
        out[ok] = self._g0(x[ok])
        return out

    def g1_inv(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        ok = np.abs(x) <= self.x_max
        out[ok] = self._g1(x[ok])
        return out


@lru_cache(maxsize=8)
def window_tables(alpha, x_max=TABLE_X_MAX):
    return WindowTables(alpha, x_max=x_max)


def dirichlet_ratio(u, count):
    """Stable ``sin(count*pi*u) / sin(pi*u)``, the closed form of the
    ``count``-term geometric phase sum magnitude (signed).

    Reduced to the nearest-integer residue for accuracy at large ``u``; the
    removable singularity at integer ``u`` takes the limit value ``count``
    via a second-order expansion.
    """
    u = np.asarray(u, dtype=float)
    m = np.round(u)
    r = u - m
    sign = np.where((m.astype(np.int64) * (count - 1)) % 2 == 0, 1.0, -1.0)
    small = np.abs(r) < 1e-7
    den = np.where(small, 1.0, np.sin(np.pi * r))
    ratio = np.where(small,
                     count * (1.0 - (np.pi * r) ** 2 * (count ** 2 - 1) / 6.0),
                     np.sin(count * np.pi * r) / den)
    return sign * ratio


def evaluate_psi_time(x, params: PsiParams, tables: WindowTables | None = None):
    """Time-domain values of the banded generator by the analytic route.

    Sums the inverse transforms of the individual blocks: a central window
    term plus, per depth j, an envelope ``g1_inv`` at the block scale, a
    carrier phase at the block center frequency, and the closed-form
    geometric sum over the ``beta_j`` copies (Dirichlet ratio with a
    removable-singularity guard).  Returns complex values; the mirror terms
    cancel the imaginary part up to table rounding.
    """
    if tables is None:
        tables = window_tables(params.alpha)
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)

    a = params.alpha
    counts = params.block_counts
    offsets = params.block_offsets
    s0 = (1.0 - 2.0 ** (-a)) / 2.0
    out = np.asarray(s0 * tables.g0_inv(s0 * x), dtype=complex)

    u = params.n * x
    for j in range(1, params.J + 1):
        bj = counts[j]
        cj = (2.0 ** a - 1.0) / 2.0 ** (j * a + 1)
        pref = (2.0 ** a - 1.0) / 2.0 * bj ** -0.5 * 2.0 ** (-j * a)
        carrier = np.exp(1j * np.pi * x * (1.0 - 2.0 ** (-j * a)))
        comb = (np.exp(2j * np.pi * u * offsets[j])
                * np.exp(1j * np.pi * u * (bj - 1))
                * dirichlet_ratio(u, bj))
        out += pref * tables.g1_inv(cj * x) * carrier * comb
        out += pref * tables.g1_inv(-cj * x) * np.conj(carrier) * np.conj(comb)
    return out[0] if scalar else out


class PsiTimeEvaluator:
    """Callable analytic route with its sampling metadata.

    ``max_frequency`` is the largest carrier present (outermost copy plus
    half a block width); quadrature lattices for localization probes are
    sized from it.  ``valid_span`` is how far in x the window tables reach
    given the block scalings.
    """

    def __init__(self, params: PsiParams, tables: WindowTables | None = None):
        self.params = params
        self.tables = tables if tables is not None else window_tables(params.alpha)
        self.max_frequency = params.n * (params.block_offsets[params.J + 1] - 1) + 0.5
        scales = [(1.0 - 2.0 ** (-params.alpha)) / 2.0]
        scales += [(2.0 ** params.alpha - 1.0) / 2.0 ** (j * params.alpha + 1)
                   for j in range(1, params.J + 1)]
        self.valid_span = self.tables.x_max / max(scales)
        self._abs_cache = {}

    def __call__(self, x):
        return evaluate_psi_time(x, self.params, self.tables)

    def abs_on_lattice(self, n_half, inv_dx):
        """|values| on the symmetric lattice k/inv_dx, |k| <= n_half.

        Cached so several probes over the same lattice share one evaluation
        (a narrower request reuses a wider cached lattice).
        """
        for (cached_half, cached_inv), vals in self._abs_cache.items():
            if cached_inv == inv_dx and cached_half >= n_half:
                mid = cached_half
                return vals[mid - n_half:mid + n_half + 1]
        xs = np.arange(-n_half, n_half + 1) / inv_dx
        vals = np.empty(xs.size)
        chunk = 1 << 19
        for s in range(0, xs.size, chunk):
            vals[s:s + chunk] = np.abs(self(xs[s:s + chunk]))
        self._abs_cache.clear()
        self._abs_cache[(n_half, inv_dx)] = vals
        return vals
