"""Polynomials orthonormal with respect to w(t)^2 dt.

The recurrence is x p_k = a_{k+1} p_{k+1} + a_k p_{k-1} (the diagonal vanishes
for even weights).  Coefficients come from a discretized Stieltjes procedure
run on sqrt-weighted vectors, so no unweighted polynomial value is ever
formed.  Evaluation carries the factor w(x) along with a per-point log scale.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import QuadratureUnderresolved
from .mrs import MrsTable
from .quadrature import composite_rule, graded_edges
from .reports import RatioReport
from .weights import q_value

RESIDUAL_GATE = 1e-8
N_MAX_DEFAULT = 256
LOGW2_CUT = -740.0


@dataclass(frozen=True)
class QuadConfig:
    nodes_per_panel: int = 64
    uniform_panels: int = 0  # 0: ceil(N/8) + 8
    grading_levels: int = 10
    radius_factor: float = 1.25

    def panels_for(self, N):
        return self.uniform_panels or math.ceil(N / 8) + 8


DEFAULT_QUAD = QuadConfig()
FINE_QUAD = QuadConfig(nodes_per_panel=80, grading_levels=14)


def _fine_panels(N):
    return math.ceil(1.5 * (math.ceil(N / 8) + 8)) + 1


def support_radius(spec, logw2_cut=LOGW2_CUT):
    """Radius beyond which log w(x)^2 < logw2_cut."""
    target = -0.5 * logw2_cut
    lo, hi = 0.0, 1.0
    while q_value(spec, hi) < target:
        lo, hi = hi, 2 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if q_value(spec, mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * hi:
            break
    return hi


@dataclass
class RecurrenceTable:
    spec: object
    N: int
    offdiag: np.ndarray  # a_1 .. a_N
    diag: np.ndarray  # b_0 .. b_{N-1}, identically zero
    mu0: float
    radius: float
    core: float  # end of the uniform quadrature panels
    nodes: np.ndarray = field(repr=False)  # half-line plain quadrature
    weights: np.ndarray = field(repr=False)
    residual: float = math.nan
    _basis_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def gamma_ratio(self):
        """gamma_{k-1}/gamma_k for k = 1..N, equal to the off-diagonal."""
        return self.offdiag

    def full_rule(self):
        """Symmetric plain quadrature on [-radius, radius]."""
        x = np.concatenate([-self.nodes[::-1], self.nodes])
        w = np.concatenate([self.weights[::-1], self.weights])
        return x, w

    def basis_on_rule(self, m):
        """p_k w for k < m at the nodes of :meth:`full_rule` (cached)."""
        hit = self._basis_cache.get("rule")
        if hit is None or hit.shape[1] < m:
            x, _ = self.full_rule()
            hit = weighted_basis(self, x, max(m, 1), 0)[..., 0]
            self._basis_cache["rule"] = hit
        return hit[:, :m]

    def rows(self):
        return [(k, float(self.offdiag[k - 1]), 0.0, float(self.offdiag[k - 1]))
                for k in range(1, self.N + 1)]


def _half_rule(spec, N, radius, core, cfg, fine=False):
    panels = _fine_panels(N) if fine else cfg.panels_for(N)
    edges = graded_edges(radius, panels, cfg.grading_levels, core=core)
    return composite_rule(edges, cfg.nodes_per_panel)


def _fsum_sq(v):
    return math.fsum((v * v).tolist())


def _scaled_values(m, s):
    # m * exp(s) without overflow in the intermediate factors
    with np.errstate(divide="ignore"):
        return np.where(m == 0, 0.0, np.sign(m) * np.exp(np.log(np.abs(m)) + s))


def build_recurrence(spec, N, quad_cfg=DEFAULT_QUAD, mrs=None, check=True):
    """Discretized Stieltjes procedure for p_0 .. p_N.

    Inner products are taken over [0, R] with doubled weights, valid because
    every integrand in the procedure is even.  The Lanczos vectors are kept
    as mantissas times a per-node log scale, so nodes where w(x)^2 underflows
    still carry p_k w once p_k has grown there.  Raises
    QuadratureUnderresolved when the orthonormality residual on an
    independent finer rule exceeds 1e-8 (skip with ``check=False``).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    mrs = mrs or MrsTable(spec)
    core = max(support_radius(spec), 1.1 * mrs(2 * N))
    radius = max(quad_cfg.radius_factor * mrs(4 * N), core)
    x, qw = _half_rule(spec, N, radius, core, quad_cfg)
    s = 0.5 * np.log(2.0 * qw) - q_value(spec, x)

    mu0 = math.fsum(np.exp(2.0 * s).tolist())
    a = np.empty(N)
    prev = np.zeros_like(x)
    cur = np.full_like(x, 1.0 / math.sqrt(mu0))
    a_prev = 0.0
    for k in range(N):
        u = x * cur - a_prev * prev
        vp = _scaled_values(prev, s)
        # one reorthogonalization pass against the previous vector
        u -= math.fsum((_scaled_values(u, s) * vp).tolist()) * prev
        nrm = math.sqrt(_fsum_sq(_scaled_values(u, s)))
        if not nrm > 0:
            raise QuadratureUnderresolved(f"Stieltjes breakdown at degree {k + 1}")
        a[k] = nrm
        prev, cur, a_prev = cur, u / nrm, nrm
        big = np.abs(cur) > 1e150
        if big.any():
            f = np.where(big, np.abs(cur), 1.0)
            cur, prev = cur / f, prev / f
            s = s + np.log(f)

    rec = RecurrenceTable(spec, N, a, np.zeros(N), mu0, radius, core, x, qw)
    if check:
        rec.residual = orthonormality_residual(rec)
        if not rec.residual <= RESIDUAL_GATE:
            raise QuadratureUnderresolved(
                f"orthonormality residual {rec.residual:.3e} > {RESIDUAL_GATE:g}")
    return rec


def weighted_basis(rec, x, n, j_max=0):
    """p_k^{(j)}(x) w(x) for k < n and j <= j_max.

    Returns an array of shape x.shape + (n, j_max + 1).  The recurrence

        a_{k+1} p_{k+1}^{(j)} = x p_k^{(j)} + j p_k^{(j-1)} - a_k p_{k-1}^{(j)}

    is run on the weighted values with a running per-point log scale, so
    neither overflow of p_k nor underflow of w(x) leaks into the result.
    """
    if n > rec.N + 1:
        raise ValueError(f"n = {n} exceeds table degree {rec.N}")
    x = np.asarray(x, dtype=float)
    shape = x.shape
    xf = x.ravel()
    m = xf.size
    J = j_max + 1
    jj = np.arange(J, dtype=float)[:, None]

    out = np.empty((n, J, m))
    scale = np.empty((n, m))
    s = -q_value(rec.spec, xf)
    s = np.asarray(s, dtype=float).reshape(m)
    cur = np.zeros((J, m))
    cur[0] = 1.0 / math.sqrt(rec.mu0)
    prev = np.zeros((J, m))
    a = rec.offdiag
    out[0], scale[0] = cur, s
    for k in range(n - 1):
        nxt = xf * cur
        nxt[1:] += jj[1:] * cur[:-1]
        if k:
            nxt -= a[k - 1] * prev
        nxt /= a[k]
        mag = np.abs(nxt).max(axis=0)
        big = mag > 1e150
        if big.any():
            f = np.where(big, mag, 1.0)
            nxt /= f
            cur = cur / f
            s = s + np.log(f)
        prev, cur = cur, nxt
        out[k + 1], scale[k + 1] = cur, s

    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        mag = np.log(np.abs(out)) + scale[:, None, :]
        vals = np.where(out == 0, 0.0, np.sign(out) * np.exp(mag))
    vals = np.where(np.isnan(vals), 0.0, vals)
    return np.moveaxis(vals, -1, 0).reshape(shape + (n, J))


def weighted_series(rec, coeffs, x, j=0):
    """Sum_k c_k p_k^{(j)}(x) w(x); ``coeffs`` may be (n,) or (n, F)."""
    c = np.asarray(coeffs, dtype=float)
    B = weighted_basis(rec, x, c.shape[0], j)[..., j]
    return B @ c


@dataclass
class WeightedEvalBlock:
    x: float
    rows: np.ndarray  # (n, j_max + 1)

    def value(self, k, j=0):
        return self.rows[k, j]


def eval_weighted(rec, x, n, j_max=0):
    if j_max < 0:
        raise ValueError("j_max must be >= 0")
    return WeightedEvalBlock(float(x), weighted_basis(rec, float(x), n, j_max))


def orthonormality_residual(rec, quad_cfg=FINE_QUAD):
    """max |int p_i p_j w^2 - delta_ij| over i, j <= N on a finer independent rule."""
    x, qw = _half_rule(rec.spec, rec.N, rec.radius, rec.core, quad_cfg, fine=True)
    x = np.concatenate([-x[::-1], x])
    qw = np.concatenate([qw[::-1], qw])
    B = weighted_basis(rec, x, rec.N + 1, 0)[..., 0]
    G = (B * qw[:, None]).T @ B
    return float(np.max(np.abs(G - np.eye(rec.N + 1))))


def verify_34(rec, mrs, n_grid):
    """(gamma_{n-1}/gamma_n) / a_n per n."""
    rows = []
    for n in n_grid:
        if not 1 <= n <= rec.N:
            raise ValueError(f"n = {n} outside [1, {rec.N}]")
        rows.append((n, rec.offdiag[n - 1] / mrs(n)))
    return RatioReport.from_rows("3.4", rows)
