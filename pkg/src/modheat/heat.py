"""Fractional heat semigroup, Duhamel solver, and blow-up diagnostics.

The linear flow is the Fourier multiplier exp(-t |xi|^beta).  The nonlinear
problem

    d_t u + (-Delta)^{beta/2} u = u^k,    u(0) = u0

is advanced by exponential time differencing: the stiff linear symbol is
applied exactly each step and the nonlinearity enters through the phi_1
weight, with the |xi| -> 0 limit taken analytically.  Pointwise powers are
dealiased by zero padding so that every retained mode of u^k is an exact
k-fold spectral convolution; this is what keeps the Fourier-positivity
diagnostics meaningful.

Alongside the time stepper the module builds the iterated-integral series
whose terms solve the Duhamel equation order by order, evaluates the
closed-form lower envelopes that force divergence of that series for
Fourier-positive data with a large enough plateau, and certifies the
corresponding hypotheses (plateau height, support radius, volume condition)
on the lattice.
"""

from dataclasses import dataclass, field
from itertools import product
import math

import numpy as np

from .gammafn import gamma as _gamma
from .modnorm import ModNormSpec, UniformPartition, mod_norm_from_frequency
from .spectral import (FREQUENCY, GridFunction, dealiased_power_hat,
                       forward_transform, frequency_lp_norm, heat_symbol,
                       inverse_transform)

E = math.e


# -- linear flow ---------------------------------------------------------------


def linear_propagate(f, t, beta):
    """Apply the semigroup multiplier exp(-t |xi|^beta); t >= 0."""
    if t < 0:
        raise ValueError("negative time in linear_propagate")
    g = f.grid
    sym = heat_symbol(g, t, beta)
    if f.side == FREQUENCY:
        return GridFunction(g, sym * f.values, FREQUENCY)
    F = forward_transform(f)
    return inverse_transform(GridFunction(g, sym * F.values, FREQUENCY))


def phi1(z):
    """(1 - e^{-z}) / z with the z -> 0 limit 1, stable for all z >= 0."""
    z = np.asarray(z, dtype=float)
    out = np.ones_like(z)
    nz = z > 1e-12
    out[nz] = -np.expm1(-z[nz]) / z[nz]
    return out


def phi2(z):
    """(e^{-z} - 1 + z) / z^2 with the z -> 0 limit 1/2."""
    z = np.asarray(z, dtype=float)
    out = np.full_like(z, 0.5)
    nz = z > 1e-6
    out[nz] = (np.expm1(-z[nz]) + z[nz]) / z[nz] ** 2
    small = ~nz
    zs = z[small]
    out[small] = 0.5 - zs / 6.0 + zs ** 2 / 24.0
    return out


# -- problem / config / trace ---------------------------------------------------


@dataclass
class HeatProblem:
    beta: float
    k: int
    u0: GridFunction
    norm_spec: ModNormSpec = field(default_factory=lambda: ModNormSpec(2.0, 1.0, 0.0))
    # +1 solves d_t u + (-Delta)^{beta/2} u = +u^k; -1 flips the source sign
    # (the Fourier-positive blow-up mechanism only operates with +1).
    source_sign: int = 1

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("nonlinearity exponent k must be >= 2")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if not np.all(np.isfinite(self.u0.values)):
            raise ValueError("u0 must be finite everywhere")


@dataclass
class SolverConfig:
    dt: float
    t_max: float
    blowup_threshold: float = None  # default: 1e6 x initial norm
    scheme: str = "ETD1"
    picard_depth: int = 8
    snapshot_every: int = 0  # 0 disables field snapshots

    def __post_init__(self):
        if not 0 < self.dt < self.t_max:
            raise ValueError("need 0 < dt < t_max")
        if self.scheme not in ("ETD1", "ETD2"):
            raise ValueError(f"unknown scheme {self.scheme!r}")


@dataclass
class SolutionTrace:
    times: list
    norms: list          # modulation norm per recorded time
    fl1_norms: list
    linf_norms: list
    blowup_detected: bool
    t_detect: float = None
    overflow: bool = False
    snapshots: list = field(default_factory=list)  # (t, physical values)

    def rows(self):
        """CSV rows (t, norm_Mp1, norm_FL1, linf, blowup_flag)."""
        last = len(self.times) - 1
        for i, t in enumerate(self.times):
            flag = 1 if (self.blowup_detected and i == last) else 0
            yield (t, self.norms[i], self.fl1_norms[i], self.linf_norms[i], flag)


def solve(problem, config, partition=None):
    """March the Duhamel equation with an exponential integrator.

    Records the chosen modulation norm at every step and stops early, with
    blow-up flagged, once the norm passes the threshold or the state stops
    being finite (overflow counts as detection at the last finite time).
    """
    g = problem.u0.grid
    if partition is None:
        partition = UniformPartition(g)
    z = config.dt * g.freq_magnitude ** problem.beta
    decay = np.exp(-z)
    w1 = config.dt * phi1(z)
    w2 = config.dt * phi2(z) if config.scheme == "ETD2" else None

    u = problem.u0
    u_hat = forward_transform(u)
    spec = problem.norm_spec

    def norm_of(F):
        return mod_norm_from_frequency(F, spec, partition)

    init_norm = norm_of(u_hat)
    threshold = config.blowup_threshold
    if threshold is None:
        threshold = 1e6 * init_norm if init_norm > 0 else 1e6
    if init_norm >= threshold:
        raise ValueError("blow-up threshold must exceed the initial norm")

    times = [0.0]
    norms = [init_norm]
    fl1 = [frequency_lp_norm(u_hat, 1)]
    linf = [float(np.max(np.abs(u.values)))]
    snapshots = []
    if config.snapshot_every > 0:
        snapshots.append((0.0, u.values.copy()))
    detected = False
    t_detect = None
    overflow = False

    n_steps = int(round(config.t_max / config.dt))
    t = 0.0
    for step in range(1, n_steps + 1):
        n_hat = dealiased_power_hat(u, problem.k)
        n_vals = problem.source_sign * n_hat.values
        new_hat = decay * u_hat.values + w1 * n_vals
        if config.scheme == "ETD2":
            stage = GridFunction(g, new_hat, FREQUENCY)
            n_stage = problem.source_sign * dealiased_power_hat(
                inverse_transform(stage), problem.k).values
            new_hat = new_hat + w2 * (n_stage - n_vals)
        t += config.dt
        if not np.all(np.isfinite(new_hat)):
            detected = True
            overflow = True
            t_detect = times[-1]
            break
        u_hat = GridFunction(g, new_hat, FREQUENCY)
        u = inverse_transform(u_hat)
        nom = norm_of(u_hat)
        times.append(t)
        norms.append(nom)
        fl1.append(frequency_lp_norm(u_hat, 1))
        linf.append(float(np.max(np.abs(u.values))))
        if config.snapshot_every > 0 and (step % config.snapshot_every == 0
                                          or step == n_steps):
            snapshots.append((t, u.values.copy()))
        if not math.isfinite(nom) or nom > threshold:
            detected = True
            t_detect = t
            break

    return SolutionTrace(times, norms, fl1, linf, detected, t_detect, overflow,
                         snapshots)


# -- blow-up hypothesis certification --------------------------------------------


def unit_ball_volume(d):
    """Volume of the Euclidean unit ball; exact small-d values avoid roundoff."""
    if d == 1:
        return 2.0
    if d == 2:
        return math.pi
    if d == 3:
        return 4.0 * math.pi / 3.0
    return math.pi ** (d / 2.0) / _gamma(d / 2.0 + 1.0)


@dataclass
class BlowupHypothesis:
    gamma: float
    r: float
    beta: float
    k: int
    d: int

    def __post_init__(self):
        if min(self.gamma, self.r, self.beta) <= 0 or self.k < 2 or self.d < 1:
            raise ValueError("hypothesis parameters out of range")

    @property
    def gamma_bound(self):
        return 4.0 * self.r ** self.beta * (self.k - 1) * E

    @property
    def horizon(self):
        """Time by which the witness series is forced to diverge."""
        return 1.0 / (4.0 * self.r ** self.beta * (self.k - 1))


@dataclass
class ConditionReport:
    name: str
    value: float
    bound: float
    margin: float
    passed: bool


@dataclass
class HypothesisCertificate:
    conditions: list
    horizon: float

    @property
    def all_passed(self):
        return all(c.passed for c in self.conditions)

    def condition(self, name):
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)


def certify_hypothesis(h, u0):
    """Check every blow-up condition on the lattice; failures are reported, not raised."""
    g = u0.grid
    if g.dim != h.d:
        raise ValueError("hypothesis dimension does not match the grid")
    F = forward_transform(u0)
    re = F.values.real
    im = F.values.imag
    scale = float(np.max(np.abs(F.values)))
    conds = []

    vol = h.r ** h.d * unit_ball_volume(h.d)
    conds.append(ConditionReport("volume", vol, 2.0 ** h.d,
                                 vol - 2.0 ** h.d, vol >= 2.0 ** h.d))

    min_re = float(re.min())
    max_im = float(np.max(np.abs(im)))
    tol = 1e-12 * max(scale, 1.0)
    positive = min_re >= -tol and max_im <= tol
    conds.append(ConditionReport("fourier_nonnegative", min_re, 0.0,
                                 min_re, positive))

    ball = g.freq_magnitude <= h.r
    if np.any(ball):
        min_on_ball = float(re[ball].min())
    else:
        min_on_ball = math.inf  # no lattice point inside the ball: vacuous
    conds.append(ConditionReport("plateau_lower_bound", min_on_ball, h.gamma,
                                 min_on_ball - h.gamma, min_on_ball >= h.gamma))

    lhs = h.gamma ** (h.k - 1)
    conds.append(ConditionReport("gamma_threshold", lhs, h.gamma_bound,
                                 lhs - h.gamma_bound, lhs >= h.gamma_bound))

    return HypothesisCertificate(conds, h.horizon)


def ball_indicator(grid, r):
    """chi over the Euclidean ball of radius r, sampled on the frequency lattice."""
    return (grid.freq_magnitude <= r).astype(float)


def plateau_data(grid, gamma, r):
    """Initial data built spectrally: Fourier transform exactly gamma on the ball.

    In one dimension this is the periodized version of
    gamma * sqrt(2/pi) * sin(r x) / x.
    """
    F = GridFunction(grid, gamma * ball_indicator(grid, r), FREQUENCY)
    return inverse_transform(F)


# -- iterated Duhamel series -----------------------------------------------------


def term_index(j, k):
    """Series label of the j-th constructed term: j k - (j - 1) = j (k-1) + 1."""
    return j * (k - 1) + 1


def lambda_index_set(j, k):
    """Admissible ordered k-tuples feeding the j-th term of the series.

    Entries are earlier term labels t(k-1)+1 with 0 <= t < j, and the labels
    in each tuple sum to the current label j(k-1)+1 = jk - (j-1).
    """
    if j < 1 or k < 2:
        raise ValueError("need j >= 1 and k >= 2")
    allowed = [term_index(t, k) for t in range(j)]
    target = term_index(j, k)
    return {tup for tup in product(allowed, repeat=k) if sum(tup) == target}


@dataclass
class PicardResult:
    term_indices: list   # series labels, [1, k, 2k-1, ...]
    trajectories: list   # physical values per term, shape (n_t, *grid.shape)
    t_grid: np.ndarray
    sup_norms: list      # modulation norm maxima over the time grid
    ratios: list         # sup_norms[i+1] / sup_norms[i]
    summable: bool


def _cumulative_weights(t_grid):
    """Quadrature weights over [0, t_i] for every i (composite Simpson family).

    Even panel counts use composite Simpson; odd counts splice a 3/8 block at
    the end; a single panel falls back to the trapezoid.
    """
    n = len(t_grid)
    tau = t_grid[1] - t_grid[0]
    W = np.zeros((n, n))
    for i in range(1, n):
        if i == 1:
            W[1, 0] = W[1, 1] = tau / 2.0
            continue
        w = np.zeros(i + 1)
        if i % 2 == 0:
            w[0] = w[i] = 1.0
            w[1:i:2] = 4.0
            w[2:i:2] = 2.0
            w *= tau / 3.0
        else:
            m = i - 3
            if m > 0:
                w[0] = 1.0
                w[1:m:2] = 4.0
                w[2:m:2] = 2.0
                w[m] = 1.0
                w[:m + 1] *= tau / 3.0
            w[m:] += np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 * tau / 8.0)
        W[i, :i + 1] = w
    return W


def _multiset_products(tuples):
    """Group ordered tuples by multiset; returns (count, sorted_tuple) pairs."""
    from collections import Counter

    counts = Counter(tuple(sorted(t)) for t in tuples)
    return [(c, key) for key, c in sorted(counts.items())]


def _dealiased_multi_product_hat(grid, factors):
    """Transform of a pointwise product of several fields, alias-free in band."""
    from .spectral import _alternating_sign, _crop_modes, _fine_point_count, _pad_modes

    n = grid.points_per_axis
    k = len(factors)
    m = _fine_point_count(n, k)
    fine = np.ones((m,) * grid.dim, dtype=complex)
    for vals in factors:
        A = np.fft.fftshift(np.fft.fftn(vals))
        fine *= np.fft.ifftn(np.fft.ifftshift(_pad_modes(A, n, m, grid.dim))) \
            * (m / n) ** grid.dim
    C = np.fft.fftshift(np.fft.fftn(fine)) * (n / m) ** grid.dim
    coeffs = _crop_modes(C, n, m, grid.dim)
    scale = (2.0 * np.pi) ** (-grid.dim / 2.0) * grid.spacing ** grid.dim
    return scale * _alternating_sign(grid) * coeffs


def picard_terms(problem, depth, t_grid, partition=None):
    """First `depth` terms of the iterated-integral series on a uniform t grid.

    Term 0 is the linear flow of the data; term j >= 1 integrates the
    admissible products of earlier terms against the semigroup kernel
    (composite Simpson in the Duhamel variable).  Growth of the term norms is
    flagged, but the terms are still returned.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    t_grid = np.asarray(t_grid, dtype=float)
    if len(t_grid) < 2 or t_grid[0] != 0.0:
        raise ValueError("t_grid must start at 0 with at least two points")
    g = problem.u0.grid
    if partition is None:
        partition = UniformPartition(g)
    k = problem.k
    n_t = len(t_grid)
    symbase = g.freq_magnitude ** problem.beta
    W = _cumulative_weights(t_grid)

    u0_hat = forward_transform(problem.u0).values
    # trajectories stored both sides: physical for products, frequency for sups
    phys = {}
    freq = {}

    lin_f = np.array([np.exp(-t * symbase) * u0_hat for t in t_grid])
    freq[1] = lin_f
    phys[1] = np.array([inverse_transform(
        GridFunction(g, F, FREQUENCY)).values for F in lin_f])

    indices = [1]
    for j in range(1, depth):
        idx = term_index(j, k)
        combos = _multiset_products(lambda_index_set(j, k))
        prod_hat = np.zeros((n_t, *g.shape), dtype=complex)
        for s_i in range(n_t):
            acc = np.zeros(g.shape, dtype=complex)
            for count, key in combos:
                factors = [phys[lab][s_i] for lab in key]
                acc += count * _dealiased_multi_product_hat(g, factors)
            prod_hat[s_i] = acc
        term_f = np.zeros((n_t, *g.shape), dtype=complex)
        for i in range(1, n_t):
            kernel = np.exp(-np.multiply.outer(t_grid[i] - t_grid[:i + 1],
                                               symbase))
            term_f[i] = np.tensordot(W[i, :i + 1],
                                     kernel * prod_hat[:i + 1], axes=(0, 0))
        freq[idx] = term_f
        phys[idx] = np.array([inverse_transform(
            GridFunction(g, F, FREQUENCY)).values for F in term_f])
        indices.append(idx)

    sup_norms = []
    for idx in indices:
        sups = [mod_norm_from_frequency(GridFunction(g, F, FREQUENCY),
                                        problem.norm_spec, partition)
                for F in freq[idx]]
        sup_norms.append(max(sups))
    ratios = [sup_norms[i + 1] / sup_norms[i] if sup_norms[i] > 0 else math.inf
              for i in range(len(sup_norms) - 1)]
    summable = bool(ratios) and ratios[-1] < 1.0
    return PicardResult(indices, [phys[i] for i in indices], t_grid,
                        sup_norms, ratios, summable)


def picard_frequency_trajectory(problem, result, term_pos):
    """Frequency-side values of one stored term (recomputed from physical)."""
    g = problem.u0.grid
    return np.array([forward_transform(
        GridFunction(g, v)).values for v in result.trajectories[term_pos]])


# -- lower-bound envelopes and the divergence witness ----------------------------


def lower_bound_sequence(h, i, t, xi):
    """Closed-form lower envelope for the i-th series term at (t, xi).

    The envelope is gamma^i e^{-4 r^beta (k-1) m t} t^m e^{-t |xi|^beta} on
    the ball |xi| <= r (zero outside), with m = (i-1)/(k-1); the hidden
    constant is taken to be 1 and any slack is measured separately.
    """
    if (i - 1) % (h.k - 1) != 0:
        raise ValueError(f"series index {i} is not of the form m(k-1)+1")
    m = (i - 1) // (h.k - 1)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    mag = math.sqrt(float(np.sum(xi * xi)))
    if mag > h.r:
        return 0.0
    return (h.gamma ** i
            * math.exp(-4.0 * h.r ** h.beta * (h.k - 1) * m * t)
            * t ** m * math.exp(-t * mag ** h.beta))


def lower_bound_envelope(h, i, t, grid):
    """Vectorized envelope over the frequency lattice."""
    if (i - 1) % (h.k - 1) != 0:
        raise ValueError(f"series index {i} is not of the form m(k-1)+1")
    m = (i - 1) // (h.k - 1)
    mag = grid.freq_magnitude
    env = (h.gamma ** i
           * math.exp(-4.0 * h.r ** h.beta * (h.k - 1) * m * t)
           * t ** m * np.exp(-t * mag ** h.beta))
    return env * ball_indicator(grid, h.r)


@dataclass
class WitnessResult:
    terms: list
    partial_sums: list
    ratio: float
    hypothesis_ok: bool
    label: str

    @property
    def divergent(self):
        return self.hypothesis_ok and self.ratio >= 1.0 - 1e-12


def divergence_witness(h, T, i_max):
    """Partial sums of the L^1-lower-bound series evaluated at time T.

    Term j is gamma^{(j-1)(k-1)+1} e^{-4 r^beta (k-1)(j-1) T} T^{j-1} |B(r)|;
    consecutive terms have the constant ratio gamma^{k-1} T e^{-4 r^beta (k-1) T},
    so ratio >= 1 certifies divergence of the witness series.
    """
    vol = unit_ball_volume(h.d) * h.r ** h.d
    decay = 4.0 * h.r ** h.beta * (h.k - 1)
    terms = [h.gamma ** ((j - 1) * (h.k - 1) + 1)
             * math.exp(-decay * (j - 1) * T) * T ** (j - 1) * vol
             for j in range(1, i_max + 1)]
    sums = list(np.cumsum(terms))
    ratio = h.gamma ** (h.k - 1) * T * math.exp(-decay * T)
    ok = (h.gamma ** (h.k - 1) >= h.gamma_bound) and (T >= h.horizon)
    if not ok:
        label = "no divergence guarantee (hypothesis preconditions fail)"
    elif ratio >= 1.0 - 1e-12:
        label = "divergent"
    else:
        label = "inconclusive (term ratio below 1 at this T)"
    return WitnessResult(terms, sums, ratio, ok, label)
