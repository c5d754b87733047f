"""Hermite functions, transforms, eigenprojections, and the oscillator heat flow.

Normalized Hermite functions are generated by the stable recurrence

    h_0(x) = pi^{-1/4} e^{-x^2/2}
    h_{k+1}(x) = x sqrt(2/(k+1)) h_k(x) - sqrt(k/(k+1)) h_{k-1}(x)

and tensorized to d dimensions.  The oscillator H = -Delta + |x|^2 acts on
the level-k eigenspace with eigenvalue 2k + d, so any bounded spectral
multiplier, in particular exp(-t (2k+d)^beta), is diagonal in the
coefficient tensor.  Inner products use Gauss quadrature in the e^{-x^2}
measure with a guard margin of extra nodes, which makes the analysis exact
for polynomial-times-Gaussian integrands up to the degree cap.
"""

import math
from itertools import product

import numpy as np

from .gammafn import gamma, log_gamma


def hermite_table(k_max, x):
    """h_0 .. h_{k_max} evaluated at x; shape (k_max + 1, len(x))."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((k_max + 1, x.size))
    out[0] = math.pi ** (-0.25) * np.exp(-0.5 * x * x)
    if k_max >= 1:
        out[1] = x * math.sqrt(2.0) * out[0]
    for k in range(1, k_max):
        out[k + 1] = (x * math.sqrt(2.0 / (k + 1)) * out[k]
                      - math.sqrt(k / (k + 1.0)) * out[k - 1])
    return out


def hermite_eval(k, x):
    """Normalized Hermite function h_k at x (scalar in, scalar out)."""
    if k < 0:
        raise ValueError("degree must be nonnegative")
    scalar = np.isscalar(x)
    vals = hermite_table(k, x)[k]
    return float(vals[0]) if scalar else vals


class HermiteBasis:
    """Quadrature nodes/weights and Hermite tables up to a total-degree cap.

    Coefficient tensors are indexed by the per-axis degrees; entries with
    total degree above the cap are masked out.  The basis is immutable after
    construction and safe to share.
    """

    def __init__(self, dim, degree_cap, nodes_per_axis=None):
        if dim < 1 or degree_cap < 0:
            raise ValueError("bad basis parameters")
        if nodes_per_axis is None:
            nodes_per_axis = degree_cap + 8  # guard margin for products h_j h_k
        self.dim = dim
        self.degree_cap = degree_cap
        self.nodes_per_axis = nodes_per_axis
        nodes, weights = np.polynomial.hermite.hermgauss(nodes_per_axis)
        self.nodes = nodes
        self.gauss_weights = weights
        # weights converted out of the e^{-x^2} measure, computed in logs so
        # the far nodes neither underflow nor overflow
        with np.errstate(divide="ignore"):
            self.total_weights = np.exp(np.log(weights) + nodes ** 2)
        self.table = hermite_table(degree_cap, nodes)
        self._analysis = self.table * self.total_weights[None, :]
        k = degree_cap + 1
        self.level_mesh = sum(np.indices((k,) * dim))
        self.level_mask = self.level_mesh <= degree_cap

    @property
    def coeff_shape(self):
        return (self.degree_cap + 1,) * self.dim

    @property
    def node_shape(self):
        return (self.nodes_per_axis,) * self.dim

    def node_mesh(self):
        axes = np.meshgrid(*([self.nodes] * self.dim), indexing="ij")
        return np.stack(axes, axis=-1)

    def eigenvalue(self, level):
        return 2 * level + self.dim

    def level_dimension(self, level):
        return math.comb(level + self.dim - 1, self.dim - 1)

    def recurrence_residual(self):
        """Max defect of the three-term recurrence across the stored table."""
        if self.degree_cap < 2:
            return 0.0
        x = self.nodes
        res = 0.0
        for k in range(1, self.degree_cap):
            lhs = self.table[k + 1]
            rhs = (x * math.sqrt(2.0 / (k + 1)) * self.table[k]
                   - math.sqrt(k / (k + 1.0)) * self.table[k - 1])
            res = max(res, float(np.max(np.abs(lhs - rhs))))
        return res

    def gram_matrix(self):
        """Per-axis quadrature Gram matrix <h_j, h_k>; should be the identity."""
        return self._analysis @ self.table.T


class HermiteCoeffs:
    """Coefficient tensor <f, Phi_alpha> over retained multi-indices."""

    __slots__ = ("basis", "tensor")

    def __init__(self, basis, tensor):
        tensor = np.asarray(tensor, dtype=complex)
        if tensor.shape != basis.coeff_shape:
            raise ValueError("coefficient tensor shape mismatch")
        self.basis = basis
        self.tensor = np.where(basis.level_mask, tensor, 0.0)

    def l2_norm(self):
        return float(np.sqrt(np.sum(np.abs(self.tensor) ** 2)))

    def copy(self):
        return HermiteCoeffs(self.basis, self.tensor.copy())


def _contract_all_axes(values, matrix):
    """Apply `matrix` (new_idx, node) along every axis, preserving axis order."""
    out = np.asarray(values, dtype=complex)
    d = out.ndim
    for _ in range(d):
        out = np.tensordot(out, matrix, axes=([0], [1]))
    return out


def analyze(values, basis):
    """Hermite coefficients of samples given on the quadrature node mesh."""
    values = np.asarray(values, dtype=complex).reshape(basis.node_shape)
    tensor = _contract_all_axes(values, basis._analysis)
    return HermiteCoeffs(basis, tensor)


def synthesize(coeffs):
    """Evaluate the coefficient tensor back on the quadrature node mesh."""
    return _contract_all_axes(coeffs.tensor, coeffs.basis.table.T)


def synthesize_at(coeffs, axis_points):
    """Evaluate the expansion on the product mesh of arbitrary per-axis points."""
    basis = coeffs.basis
    table = hermite_table(basis.degree_cap, np.asarray(axis_points, dtype=float))
    return _contract_all_axes(coeffs.tensor, table.T)


def analysis_residual(values, basis):
    """Relative L^2 mass not captured by the retained expansion (tail diagnostic)."""
    c = analyze(values, basis)
    back = synthesize(c)
    values = np.asarray(values, dtype=complex).reshape(basis.node_shape)
    num = _node_l2(values - back, basis)
    den = _node_l2(values, basis)
    return num / den if den > 0 else 0.0


def _node_l2(values, basis):
    """L^2(R^d) norm by Gauss quadrature on the node mesh."""
    w = basis.total_weights
    sq = np.abs(np.asarray(values)) ** 2
    for _ in range(basis.dim):
        sq = np.tensordot(sq, w, axes=([0], [0]))
    return float(np.sqrt(sq))


def project_eigenspace(values, level, basis):
    """Orthogonal projection onto the level-`level` eigenspace, on the nodes."""
    if level > basis.degree_cap:
        raise ValueError("level exceeds the degree cap")
    c = analyze(values, basis)
    keep = np.where(basis.level_mesh == level, c.tensor, 0.0)
    return synthesize(HermiteCoeffs(basis, keep))


def heat_coeff_factors(basis, t, beta):
    return np.exp(-t * (2.0 * basis.level_mesh + basis.dim) ** beta)


def oscillator_heat_coeffs(coeffs, t, beta):
    """Heat flow of the fractional oscillator applied in coefficient space."""
    if t < 0:
        raise ValueError("negative time")
    basis = coeffs.basis
    return HermiteCoeffs(basis, heat_coeff_factors(basis, t, beta) * coeffs.tensor)


def oscillator_heat(values, t, beta, basis):
    """Level-by-level spectral multiplier exp(-t (2k+d)^beta) on node samples."""
    c = analyze(values, basis)
    return synthesize(oscillator_heat_coeffs(c, t, beta))


def heat_truncation_bound(values, t, beta, basis):
    """Certified bound on what the degree cap discards: e^{-t(2K+d)^beta} x tail mass."""
    values = np.asarray(values, dtype=complex).reshape(basis.node_shape)
    c = analyze(values, basis)
    total = _node_l2(values, basis)
    captured = c.l2_norm()
    tail = math.sqrt(max(total ** 2 - captured ** 2, 0.0))
    return math.exp(-t * (2.0 * basis.degree_cap + basis.dim) ** beta) * tail


# -- eigenvalue sums and their closed-form bound ----------------------------------


def _shell_terms(d, c, beta, n_lo, n_hi):
    """Terms multiplicity(n) * exp(-c (2n+d)^beta) for shells n_lo..n_hi-1."""
    n = np.arange(n_lo, n_hi, dtype=float)
    if d == 1:
        mult = np.ones_like(n)
    elif d == 2:
        mult = n + 1.0
    elif d == 3:
        mult = (n + 1.0) * (n + 2.0) / 2.0
    else:
        mult = np.array([math.comb(int(m) + d - 1, d - 1) for m in n])
    return mult * np.exp(-c * (2.0 * n + d) ** beta)


def _shell_tail_bound(d, c, beta, n_star):
    """Rigorous bound on sum_{n > n_star} multiplicity(n) e^{-c (2n+d)^beta}.

    Uses multiplicity(n) <= (n+d)^{d-1}/(d-1)! and the substitution
    u = (2x+d)^beta, under which the integrand is dominated by a decaying
    exponential once u_star >= 2(d/beta - 1)/c.
    """
    y_star = 2.0 * n_star + d
    u_star = y_star ** beta
    a = d / beta
    if u_star < 2.0 * max(a - 1.0, 0.0) / c or y_star < d:
        return math.inf  # caller must push n_star further out
    log_tail = ((a - 1.0) * math.log(u_star) - c * u_star
                + math.log(2.0 / c) - math.log(2.0 * beta)
                - log_gamma(float(d)))
    return math.exp(log_tail)


def eigen_sum(d, beta, t, rel_remainder=1e-14):
    """sum over alpha in N^d of exp(-2 t (2|alpha|+d)^beta) by direct summation.

    The shell sum is extended until a rigorous remainder bound drops below
    `rel_remainder` times the accumulated value.
    """
    if t <= 0 or beta <= 0:
        raise ValueError("t and beta must be positive")
    c = 2.0 * t
    total = 0.0
    n_lo, block = 0, 4096
    while True:
        terms = _shell_terms(d, c, beta, n_lo, n_lo + block)
        total += float(np.sum(terms))
        n_star = n_lo + block - 1
        tail = _shell_tail_bound(d, c, beta, n_star)
        if tail <= rel_remainder * total:
            return total
        n_lo += block
        block *= 2
        if n_lo > 50_000_000:
            raise RuntimeError("eigenvalue sum failed to certify its remainder; "
                               "parameters too extreme")


def eigen_sum_bound(d, beta, t):
    """Closed-form majorant e^{-t d^beta} d^{d/beta} Gamma(1+1/beta)^d / (2^d t^{d/beta})."""
    if t <= 0 or beta <= 0:
        raise ValueError("t and beta must be positive")
    return (math.exp(-t * d ** beta) * d ** (d / beta)
            / (2.0 ** d * t ** (d / beta)) * gamma(1.0 + 1.0 / beta) ** d)


def multiplier_tail(d, t, beta, n_from):
    """Bound on sum over shells n >= n_from of multiplicity(n) e^{-t (2n+d)^beta}."""
    direct = _shell_terms(d, t, beta, n_from, n_from + 4096)
    tail = _shell_tail_bound(d, t, beta, n_from + 4095)
    return float(np.sum(direct)) + tail


# -- decay profile ----------------------------------------------------------------


def decay_profile(coeffs, beta, p, t_grid, grid, partition, norm_fn):
    """Table of (t, norm of the heat flow, compensated ratio).

    The ratio multiplies the measured norm by e^{t d^beta} t^{d/beta} and
    divides by the initial norm; its supremum over the grid is the empirical
    decay constant.  `norm_fn(values_on_grid) -> float` supplies the norm.
    """
    basis = coeffs.basis
    d = basis.dim
    base_vals = synthesize_at(coeffs, grid.x_axis)
    base = norm_fn(base_vals)
    if base == 0.0:
        raise ValueError("decay profile undefined for zero data")
    rows = []
    for t in t_grid:
        ct = oscillator_heat_coeffs(coeffs, float(t), beta)
        vals = synthesize_at(ct, grid.x_axis)
        nrm = norm_fn(vals)
        ratio = nrm * math.exp(t * d ** beta) * t ** (d / beta) / base
        rows.append((float(t), nrm, ratio))
    return rows


# -- basis cache ------------------------------------------------------------------


def basis_cache_path(directory, dim, degree_cap, nodes_per_axis):
    return f"{directory}/hermite_d{dim}_K{degree_cap}_n{nodes_per_axis}.npz"


def save_basis(basis, directory):
    path = basis_cache_path(directory, basis.dim, basis.degree_cap,
                            basis.nodes_per_axis)
    np.savez(path, nodes=basis.nodes, weights=basis.gauss_weights,
             table=basis.table,
             meta=np.array([basis.dim, basis.degree_cap, basis.nodes_per_axis]))
    return path


def load_basis(directory, dim, degree_cap, nodes_per_axis):
    path = basis_cache_path(directory, dim, degree_cap, nodes_per_axis)
    with np.load(path) as data:
        meta = data["meta"]
        basis = HermiteBasis(int(meta[0]), int(meta[1]), int(meta[2]))
        # stored tables must agree with the regenerated ones
        if not np.allclose(data["table"], basis.table, atol=1e-12):
            raise ValueError("cached basis is inconsistent with its key")
    return basis
