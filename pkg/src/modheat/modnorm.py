"""Modulation-space norms, computed two independent ways.

The first estimator sums weighted L^p norms of frequency-uniform blocks
cut out by a smooth partition of unity on unit cubes centered at integer
frequencies.  The second samples the short-time Fourier transform against a
normalized window and takes the mixed L^p_x L^q_y quadrature norm.  The two
agree up to an equivalence constant that is measured once and frozen as a
regression value (no explicit constant is available analytically).

Partitions and STFT plans are immutable after construction; per-block work
is independent, and norm reductions use a fixed summation order so results
do not depend on evaluation schedule.
"""

from dataclasses import dataclass
from itertools import product
import math

import numpy as np

from .spectral import (FREQUENCY, PHYSICAL, GridFunction, SpectralGrid,
                       dealiased_product, forward_transform, frequency_lp_norm,
                       inverse_transform, lp_norm, physical_lp_norm)


# -- smooth bump profile --------------------------------------------------------


def _exp_bump(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_transition(x):
    """C-infinity monotone step: 0 for x <= 0, 1 for x >= 1."""
    a = _exp_bump(np.asarray(x, dtype=float))
    b = _exp_bump(1.0 - np.asarray(x, dtype=float))
    return a / (a + b)


def bump_profile(u):
    """One-dimensional profile: 1 on [-1/2, 1/2], 0 outside (-1, 1), smooth between."""
    u = np.abs(np.asarray(u, dtype=float))
    out = np.zeros_like(u)
    out[u <= 0.5] = 1.0
    mid = (u > 0.5) & (u < 1.0)
    out[mid] = smooth_transition(2.0 * (1.0 - u[mid]))
    return out


class UniformPartition:
    """Family {sigma_k} of frequency-uniform symbols on the frequency lattice.

    The profile is a tensor product of one-dimensional bumps, and the
    normalization by the lattice-wide sum factorizes per axis, so each
    sigma_k is an outer product of rows of a single (2 k_max + 1, N) matrix.
    That makes the partition-of-unity identity hold essentially to roundoff.
    """

    def __init__(self, grid, k_max=None):
        if k_max is None:
            k_max = math.ceil(grid.max_freq_component)
        if k_max < grid.max_freq_component:
            raise ValueError(
                "partition does not cover the lattice: k_max "
                f"{k_max} < max frequency {grid.max_freq_component:.6g}")
        self.grid = grid
        self.k_max = int(k_max)
        centers = np.arange(-self.k_max, self.k_max + 1)
        profile = bump_profile(grid.freq_axis[None, :] - centers[:, None])
        denom = profile.sum(axis=0)
        if np.any(denom <= 0.0):
            raise ValueError("partition does not cover the lattice "
                             "(zero bump sum at some frequency)")
        self._rows = profile / denom[None, :]
        self._support = self._rows > 0.0

    def keys(self):
        rng = range(-self.k_max, self.k_max + 1)
        return product(rng, repeat=self.grid.dim)

    def _row(self, c):
        return self._rows[c + self.k_max]

    def contains(self, k):
        return all(abs(c) <= self.k_max for c in k)

    def symbol(self, k):
        """sigma_k sampled on the full frequency lattice."""
        k = tuple(int(c) for c in k)
        if not self.contains(k):
            raise ValueError(f"block center {k} outside k_max {self.k_max}")
        out = self._row(k[0])
        for c in k[1:]:
            out = np.multiply.outer(out, self._row(c))
        return out

    def has_lattice_support(self, k):
        return all(self._support[c + self.k_max].any() for c in k)

    def active_keys(self):
        """Block centers whose symbol is nonzero somewhere on the lattice."""
        active = [c for c in range(-self.k_max, self.k_max + 1)
                  if self._support[c + self.k_max].any()]
        return product(active, repeat=self.grid.dim)


def build_partition(grid, k_max=None):
    return UniformPartition(grid, k_max)


def block_project(f, k, partition):
    """Frequency-uniform block: inverse transform of sigma_k times F f."""
    if f.side != PHYSICAL:
        raise ValueError("block_project expects a physical-side function")
    F = forward_transform(f)
    sym = partition.symbol(k)
    return inverse_transform(GridFunction(f.grid, sym * F.values, FREQUENCY))


# -- decomposition-side norm ----------------------------------------------------


@dataclass(frozen=True)
class ModNormSpec:
    """Integrability exponents (p over space, q over blocks) and weight power s."""

    p: float = 2.0
    q: float = 1.0
    s: float = 0.0

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise ValueError("p and q must be >= 1")


def _block_lp_norms(F_values, partition, p):
    """L^p norms of every active block, keyed in sorted order."""
    g = partition.grid
    vol = g.spacing ** g.dim
    out = []
    for k in sorted(partition.active_keys()):
        sym = partition.symbol(k)
        block = GridFunction(g, sym * F_values, FREQUENCY)
        out.append((k, lp_norm(inverse_transform(block).values, vol, p)))
    return out


def mod_norm_from_frequency(F, spec, partition):
    """Decomposition norm evaluated from frequency-side samples."""
    if not np.all(np.isfinite(F.values)):
        raise ValueError("non-finite values in norm input")
    norms = _block_lp_norms(F.values, partition, spec.p)
    weights = [(1.0 + math.sqrt(sum(c * c for c in k))) ** spec.s
               for k, _ in norms]
    terms = [w * n for w, (_, n) in zip(weights, norms)]
    if np.isinf(spec.q):
        return max(terms) if terms else 0.0
    return float(sum(t ** spec.q for t in terms) ** (1.0 / spec.q))


def mod_norm_decomp(f, spec, partition):
    """l^q-over-blocks of weighted L^p block norms (quadrature on the grid)."""
    if f.grid.size == 0:
        raise ValueError("empty grid")
    if f.side != PHYSICAL:
        raise ValueError("mod_norm_decomp expects a physical-side function")
    return mod_norm_from_frequency(forward_transform(f), spec, partition)


def fourier_lebesgue_norm(f, p):
    """Quadrature L^p norm of the Fourier transform of f."""
    F = f if f.side == FREQUENCY else forward_transform(f)
    return frequency_lp_norm(F, p)


# -- STFT-side norm -------------------------------------------------------------


class STFTPlan:
    """Window plus phase-space sampling steps for the STFT estimator.

    x is sampled on a sub-lattice of the physical grid (step a = stride * h)
    and y on the dual lattice (step b = pi/L), optionally refined by
    zero-padding.  The window is L^2-normalized on the grid.
    """

    def __init__(self, grid, window_values=None, x_stride=None, normalize=True):
        self.grid = grid
        if window_values is None:
            # default window: L^2-normalized Gaussian
            sq = np.sum(grid.x_mesh ** 2, axis=-1)
            window_values = np.exp(-0.5 * sq)
        w = np.asarray(window_values, dtype=complex).reshape(grid.shape)
        nrm = lp_norm(w, grid.spacing ** grid.dim, 2)
        if nrm == 0.0:
            raise ValueError("window must be nonzero")
        self.window = w / nrm if normalize else w
        if x_stride is None:
            x_stride = max(1, int(round(0.5 / grid.spacing)))
        x_stride = int(x_stride)
        # uniform x quadrature needs the stride to divide the axis length
        while grid.points_per_axis % x_stride != 0:
            x_stride -= 1
        self.x_stride = x_stride

    @property
    def a(self):
        return self.x_stride * self.grid.spacing

    @property
    def b(self):
        return self.grid.freq_spacing


def stft(f, plan, x, y):
    """Quadrature value of the windowed transform at one phase-space point.

    x is snapped to the physical lattice (the window is only known there);
    y may be any frequency within the sampled band.
    """
    g = f.grid
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.size != g.dim or y.size != g.dim:
        raise ValueError("x and y must be d-vectors")
    if np.any(np.abs(x) > g.half_width) or np.any(np.abs(y) > g.max_freq_component):
        raise ValueError("phase-space point outside the sampled range")
    shifts = [int(round(c / g.spacing)) for c in x]
    win = np.roll(np.conj(plan.window), shifts, axis=tuple(range(g.dim)))
    phase = np.exp(-1j * np.tensordot(g.x_mesh, y, axes=([-1], [0])))
    integrand = f.values * win * phase
    return complex((2.0 * np.pi) ** (-g.dim / 2.0)
                   * g.spacing ** g.dim * np.sum(integrand))


def _stft_row(f, plan, shifts, refine):
    """V_g f on the (refined) frequency lattice for one window shift."""
    g = f.grid
    win = np.roll(np.conj(plan.window), shifts, axis=tuple(range(g.dim)))
    w = f.values * win
    if refine == 1:
        return forward_transform(GridFunction(g, w, PHYSICAL)).values
    # Finer y sampling <=> transform on a zero-padded box of the same spacing.
    big = SpectralGrid(g.dim, g.points_per_axis * refine,
                       g.half_width * refine)
    pad = np.zeros(big.shape, dtype=complex)
    n = g.points_per_axis
    lo = (big.points_per_axis - n) // 2
    pad[tuple(slice(lo, lo + n) for _ in range(g.dim))] = w
    return forward_transform(GridFunction(big, pad, PHYSICAL)).values


def mod_norm_stft(f, plan, spec, refine=1):
    """Mixed L^p_x L^q_y quadrature norm of V_g f with weight <y>^s."""
    g = f.grid
    n = g.points_per_axis
    stride = max(1, plan.x_stride // refine)
    while n % stride != 0:
        stride -= 1
    # rolling the window through the full stride orbit enumerates the x lattice
    positions = list(product(range(0, n, stride), repeat=g.dim))
    inner = None
    for pos in positions:
        row = np.abs(_stft_row(f, plan, list(pos), refine))
        contrib = row ** spec.p if not np.isinf(spec.p) else row
        if inner is None:
            inner = np.zeros_like(contrib)
        if np.isinf(spec.p):
            np.maximum(inner, contrib, out=inner)
        else:
            inner += contrib
    a_vol = (stride * g.spacing) ** g.dim
    if np.isinf(spec.p):
        amp = inner
    else:
        amp = (a_vol * inner) ** (1.0 / spec.p)
    # weight and outer q-norm over the y lattice
    fine = SpectralGrid(g.dim, n * refine, g.half_width * refine) if refine > 1 else g
    ysq = np.sum(fine.freq_mesh ** 2, axis=-1)
    weight = (1.0 + ysq) ** (spec.s / 2.0)
    b_vol = fine.freq_spacing ** g.dim
    return lp_norm(amp * weight, b_vol, spec.q)


def stft_resolution_ok(f, plan, spec, rel_tol=0.01):
    """True when halving both sampling steps moves the norm by < rel_tol."""
    coarse = mod_norm_stft(f, plan, spec, refine=1)
    fine = mod_norm_stft(f, plan, spec, refine=2)
    if fine == 0.0:
        return coarse == 0.0
    return abs(coarse - fine) / fine < rel_tol


# -- measured-inequality helpers ------------------------------------------------


def algebra_defect(f, g, p, partition):
    """||fg|| / (||f|| ||g||) in the (p, 1) norm; certifies the algebra bound."""
    spec = ModNormSpec(p, 1.0, 0.0)
    nf = mod_norm_decomp(f, spec, partition)
    ng = mod_norm_decomp(g, spec, partition)
    if nf == 0.0 or ng == 0.0:
        raise ValueError("algebra defect undefined for zero-norm input")
    prod = dealiased_product(f, g)
    return mod_norm_decomp(prod, spec, partition) / (nf * ng)
