"""Weighted L^p norms and ratio-boundedness experiments.

Each ``verify_*`` function evaluates the left side of one weighted
inequality divided by its right side (without the unknown constant) over a
grid of degrees n, and returns a :class:`RatioReport`.  Boundedness is judged
by the log-log slope of the ratios on the upper half of the n grid.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import NonFinite, TheoremRangeViolation
from .mrs import MrsTable
from .operators import fourier_coeffs, vp_taper
from .orthopoly import weighted_basis
from .reports import RatioReport
from .weights import q_value, t_safe

RESTRICTED_BOUND = 2.0 * (1 + 1e-6)
TAIL_CUTOFF = 1e-200
GOLDEN = (math.sqrt(5) - 1) / 2

T11, T12, T13 = "1.11", "1.12", "1.13"
INEQ15, INEQ16, INEQ41, INEQ64 = "1.5", "1.6", "4.1", "6.4"
THEOREMS = (T11, T12, T13, INEQ15, INEQ16, INEQ41, INEQ64)
WITH_T, INVERSE_T = "2.6", "2.7"


@dataclass(frozen=True)
class NormConfig:
    """``grid_density`` is the number of Gauss-Legendre panels on the core
    interval; tails get geometrically widening panels."""

    p: float = 2.0
    grid_density: int = 64
    domain_policy: object = "full"  # "full" or ("restricted", multiple of a_m)
    refine_tol: float = 1e-6
    nodes_per_panel: int = 16

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError("p must be >= 1")
        if self.grid_density < 64:
            raise ValueError("grid_density must be >= 64")


def parse_p(p):
    if isinstance(p, str):
        return math.inf if p.strip().lower() in ("inf", "infinity", "oo") else float(p)
    return float(p)


def _panel_edges(interval, core, panels, growth=1.5):
    lo, hi = interval
    clo, chi = max(core[0], lo), min(core[1], hi)
    inner = np.linspace(clo, chi, panels + 1)
    h = (chi - clo) / panels
    right, x, step = [], chi, h
    while x < hi:
        step *= growth
        x = min(x + step, hi)
        right.append(x)
    left, x, step = [], clo, h
    while x > lo:
        step *= growth
        x = max(x - step, lo)
        left.append(x)
    return np.concatenate([left[::-1], inner, right])


def _decay_interval(g, start=1.0, limit=1e6):
    r = start
    while r < limit:
        probe = np.linspace(r, 2 * r, 65)
        vals = np.abs(np.asarray(g(np.concatenate([-probe, probe]))))
        if np.all(vals < TAIL_CUTOFF):
            return (-r, r)
        r *= 2
    return (-limit, limit)


def _golden_refine(g, cols, a, b, iters):
    # maximise |g[:, col]| on [a, b] for each candidate, all candidates at once
    idx = np.arange(len(cols))

    def val(x):
        return np.abs(np.asarray(g(x)).reshape(len(x), -1)[idx, cols])

    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = val(c), val(d)
    for _ in range(iters):
        left = fc > fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c_new = b - GOLDEN * (b - a)
        d_new = a + GOLDEN * (b - a)
        # reuse the surviving interior point
        c, d = np.where(left, c_new, d), np.where(left, c, d_new)
        fnew = val(np.where(left, c, d))
        fc, fd = np.where(left, fnew, fd), np.where(left, fc, fnew)
    return np.maximum(fc, fd)


def weighted_norm(g, cfg, interval=None, core=None, candidates=3):
    """||g||_{L^p(interval)} for a vectorized sampler g.

    ``g(x)`` may return shape (len(x),) or (len(x), F); the result then has
    shape () or (F,).  p < inf uses composite Gauss-Legendre quadrature of
    |g|^p; p = inf takes the maximum over the same dense node set and polishes
    the best ``candidates`` local maxima by golden-section search.  Without an
    interval the domain is grown until |g| < 1e-200 at the ends.
    """
    if interval is None:
        interval = _decay_interval(g)
    core = interval if core is None else core
    edges = _panel_edges(interval, core, cfg.grid_density)
    t, wt = np.polynomial.legendre.leggauss(cfg.nodes_per_panel)
    lo, hi = edges[:-1, None], edges[1:, None]
    x = ((lo + hi) / 2 + (hi - lo) / 2 * t).ravel()
    qw = ((hi - lo) / 2 * wt).ravel()
    G = np.asarray(g(x), dtype=float)
    single = G.ndim == 1
    G = G.reshape(len(x), -1)
    if not np.all(np.isfinite(G)):
        raise NonFinite("sampler returned non-finite values")
    A = np.abs(G)
    if math.isinf(cfg.p):
        best = A.max(axis=0)
        x_all = np.concatenate([[interval[0]], x, [interval[1]]])
        cols, a, b = [], [], []
        for col in range(A.shape[1]):
            if best[col] == 0:
                continue
            order = np.argsort(A[:, col])[::-1][:candidates]
            for i in order:
                cols.append(col)
                a.append(x_all[i])      # left neighbour (x_all is shifted by one)
                b.append(x_all[i + 2])
        if cols:
            iters = max(8, int(math.ceil(math.log(cfg.refine_tol) / math.log(GOLDEN))))
            ref = _golden_refine(g if not single else (lambda z: np.asarray(g(z))[:, None]),
                                 np.array(cols), np.array(a), np.array(b), iters)
            np.maximum.at(best, np.array(cols), ref)
        out = best
    else:
        out = (qw @ A ** cfg.p) ** (1.0 / cfg.p)
    return float(out[0]) if single else out


# -- polynomial suites --------------------------------------------------------

def random_coeffs(n, samples, seed):
    """Standard normal coefficients of P in P_n in the orthonormal basis."""
    rng = np.random.default_rng([int(seed), int(n)])
    return rng.standard_normal((n + 1, samples))


def _full_interval(rec, mrs, n, extra=0.0):
    x = max(rec.radius, extra)
    return (-x, x)


def _core(mrs, m):
    a = 1.25 * mrs(m)
    return (-a, a)


def _cfg(p, n, density=None):
    return NormConfig(p=p, grid_density=max(64, 2 * n) if density is None else density)


def restricted_range_ratios(rec, mrs, n, p, coeffs):
    """||Pw||_R / ||Pw||_[-a_n, a_n] for each column of ``coeffs``."""
    cfg = _cfg(p, n)

    def g(x):
        return weighted_basis(rec, x, n + 1)[..., 0] @ coeffs

    an = mrs(n)
    full = weighted_norm(g, cfg, _full_interval(rec, mrs, n), _core(mrs, 2 * n))
    part = weighted_norm(g, cfg, (-an, an))
    return np.atleast_1d(full / part)


def verify_restricted_range(rec, mrs, n_grid, p, samples=20, seed=0):
    p = parse_p(p)
    mrs = mrs or MrsTable(rec.spec)
    rows, extra = [], {"samples": samples, "seed": seed, "p": _p_json(p)}
    for n in n_grid:
        r = restricted_range_ratios(rec, mrs, n, p, random_coeffs(n, samples, seed))
        rows.append((n, float(r.max())))
    return RatioReport.from_rows(f"2.3[p={_p_json(p)}]", rows, bound=RESTRICTED_BOUND,
                                 extra=extra)


def bernstein_ratios(rec, mrs, n, p, j, mode, coeffs):
    """Markov-Bernstein ratios for each column of ``coeffs`` (P in P_n)."""
    spec = rec.spec
    cfg = _cfg(p, n)
    scale = (n / mrs(n)) ** j

    def lhs(x):
        B = weighted_basis(rec, x, n + 1, j)
        v = B[..., j] @ coeffs
        if mode == WITH_T:
            v = v * (t_safe(spec, x) ** (-j / 2))[:, None]
        return v

    def rhs(x):
        v = weighted_basis(rec, x, n + 1)[..., 0] @ coeffs
        if mode == INVERSE_T:
            v = v * (t_safe(spec, x) ** (j / 2))[:, None]
        return v

    interval, core = _full_interval(rec, mrs, n), _core(mrs, 2 * n)
    num = weighted_norm(lhs, cfg, interval, core)
    den = weighted_norm(rhs, cfg, interval, core)
    return np.atleast_1d(num / (scale * den))


def verify_bernstein(rec, mrs, n_grid, p, j, mode=WITH_T, samples=20, seed=0):
    if mode not in (WITH_T, INVERSE_T):
        raise ValueError(f"unknown Bernstein mode {mode!r}")
    if not 1 <= j <= 4:
        raise ValueError("j must be in [1, 4]")
    p = parse_p(p)
    mrs = mrs or MrsTable(rec.spec)
    rows = []
    for n in n_grid:
        if n < j:
            raise ValueError("need n >= j")
        r = bernstein_ratios(rec, mrs, n, p, j, mode, random_coeffs(n, samples, seed))
        rows.append((n, float(r.max())))
    return RatioReport.from_rows(f"{mode}[p={_p_json(p)},j={j}]", rows,
                                 extra={"samples": samples, "seed": seed})


def check_theorem_range(thm, p, j, beta=None, exploratory=False):
    if thm not in THEOREMS:
        raise TheoremRangeViolation(f"unknown inequality {thm!r}")
    if thm in (INEQ15, INEQ16):
        if j != 0:
            raise TheoremRangeViolation(f"({thm}) is stated for v_n itself; use j = 0")
    elif not 1 <= j <= 4:
        raise TheoremRangeViolation("j must be in [1, 4]")
    if not p >= 1:
        raise TheoremRangeViolation("p must be >= 1")
    if thm == T12 and p < 2 and not exploratory:
        raise TheoremRangeViolation("(1.12) is only established for p >= 2")
    if thm in (T13, INEQ64) and p > 2:
        raise TheoremRangeViolation(f"({thm}) needs 1 <= p <= 2")
    if thm == INEQ64 and not (beta is not None and beta > 1):
        raise TheoremRangeViolation("(6.4) needs beta > 1")


def _lhs_factor(spec, thm, p, j, beta):
    if thm == T11:
        return lambda x: t_safe(spec, x) ** (-(2 * j + 1) / 4)
    if thm == INEQ15:
        return lambda x: t_safe(spec, x) ** -0.25
    if thm == INEQ64:
        e = (2 - p) * beta / (2 * p)
        return lambda x: (1 + np.abs(x)) ** (-e)
    return None


def _rhs_spec(thm, p, j):
    """(T exponent on fw, norm index) for the right-hand norm."""
    return {
        T11: (0.0, p),
        T12: ((2 * j + 1) / 4, p),
        T13: ((2 * j + 1) / 4, 2.0),
        INEQ15: (0.0, p),
        INEQ16: (0.25, p),
        INEQ41: (0.0, p),
        INEQ64: ((2 * j + 1) / 4, 2.0),
    }[thm]


def _function_norms(spec, rec, suite, texp, q):
    radius = max([min(f.radius, rec.radius) for f in suite] + [rec.core])

    def g(x):
        fac = t_safe(spec, x) ** texp if texp else 1.0
        return np.stack([f(x) for f in suite], axis=-1) * np.reshape(fac, (-1, 1))

    return weighted_norm(g, NormConfig(p=q, grid_density=256), (-radius, radius))


def vp_theorem_ratios(spec, rec, mrs, suite, coeffs, thm, p, j, n, beta, rhs_norms):
    """Ratios for one n; ``coeffs`` has one column per suite member."""
    cfg = _cfg(p, n)
    an = mrs(n)
    factor = _lhs_factor(spec, thm, p, j, beta)
    C = vp_taper(n)[:, None] * coeffs[:2 * n]

    def lhs(x):
        v = weighted_basis(rec, x, 2 * n, j)[..., j] @ C
        return v * factor(x)[:, None] if factor else v

    extra_radius = max(min(f.radius, rec.radius) for f in suite)
    num = weighted_norm(lhs, cfg, _full_interval(rec, mrs, n, extra_radius), _core(mrs, 4 * n))
    scale = (n / an) ** j
    if thm == T13:
        scale *= an ** ((2 - p) / (2 * p))
    elif thm == INEQ41:
        scale *= float(t_safe(spec, an)) ** ((2 * j + 1) / 4)
    return num / (scale * rhs_norms)


def verify_vp_theorem(spec, rec, mrs, f_suite, thm, p, j, n_grid, beta=2.0,
                      exploratory=False):
    """Ratio report for one of (1.5), (1.6), (1.11)-(1.13), (4.1), (6.4).

    Functions with fw = 0 are dropped from the suite (both sides vanish).
    (1.12) with p < 2 is only available with ``exploratory=True`` and never
    receives a pass/fail verdict.
    """
    p = parse_p(p)
    check_theorem_range(thm, p, j, beta, exploratory)
    mrs = mrs or MrsTable(spec)
    m = 2 * max(n_grid)
    coeffs = np.column_stack([fourier_coeffs(f, rec, m).coeffs for f in f_suite])
    texp, q = _rhs_spec(thm, p, j)
    rhs = np.atleast_1d(_function_norms(spec, rec, f_suite, texp, q))
    keep = rhs > 0
    suite = [f for f, k in zip(f_suite, keep) if k]
    coeffs, rhs = coeffs[:, keep], rhs[keep]
    rows, argmax = [], {}
    for n in n_grid:
        r = np.atleast_1d(vp_theorem_ratios(spec, rec, mrs, suite, coeffs, thm, p, j, n,
                                            beta, rhs))
        i = int(np.argmax(r))
        rows.append((n, float(r[i])))
        argmax[str(n)] = suite[i].id
    explore = exploratory and thm == T12 and p < 2
    label = f"{thm}[p={_p_json(p)},j={j}" + (f",beta={beta:g}]" if thm == INEQ64 else "]")
    return RatioReport.from_rows(label, rows, exploratory=explore,
                                 extra={"argmax_function": argmax,
                                        "suite": [f.id for f in suite]})


def log_weight_gap(spec, x, t):
    """|log w(x) - log w(t)|."""
    return np.abs(q_value(spec, x) - q_value(spec, t))


def verify_lemma27(spec, mrs, n_grid, sample_count=1000, seed=0):
    """Largest |log w(x) - log w(t)| over sampled pairs with |x|, |t| < a_{2n}
    and |t - x| < a_n / (n sqrt(T(x))).

    Rows hold exp of that maximum, i.e. the empirical constant C6.
    """
    mrs = mrs or MrsTable(spec)
    rows, gaps = [], {}
    for n in n_grid:
        rng = np.random.default_rng([int(seed), int(n)])
        a2n, an = mrs(2 * n), mrs(n)
        x = rng.uniform(-a2n, a2n, sample_count)
        radius = an / (n * np.sqrt(t_safe(spec, x)))
        t = x + rng.uniform(-1, 1, sample_count) * radius
        ok = np.abs(t) < a2n
        gap = float(np.max(log_weight_gap(spec, x[ok], t[ok]))) if ok.any() else 0.0
        gaps[str(n)] = gap
        rows.append((n, math.exp(gap)))
    return RatioReport.from_rows("2.10", rows, extra={"max_log_ratio": gaps})


def _p_json(p):
    return "inf" if math.isinf(p) else f"{p:g}"
