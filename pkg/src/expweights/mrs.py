"""Mhaskar-Rakhmanov-Saff numbers.

a_x is the positive root a of

    x = (2/pi) * int_0^1 a u Q'(a u) / sqrt(1 - u^2) du.

With u = sin(theta) the endpoint singularity disappears and the integrand
becomes s Q'(s) = T(s) Q(s) at s = a sin(theta).
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import BracketFailure, OverflowDomain
from .quadrature import composite_rule
from .reports import fit_slope
from .weights import q_jet, q_value, t_func

# 8 panels of 64 nodes on [0, pi/2], graded toward theta = 0 where
# non-integer Freud exponents leave a weak singularity.
_THETA_EDGES = (0.5 * math.pi) * np.array(
    [0.0, 4.0 ** -6, 4.0 ** -5, 4.0 ** -4, 4.0 ** -3, 4.0 ** -2, 0.25, 0.625, 1.0])
_THETA, _THETA_W = composite_rule(_THETA_EDGES, 64)
_SIN = np.sin(_THETA)

DEFAULT_TOL = 1e-12


def _sq1(spec, s):
    # s Q'(s) for s >= 0, saturating to inf
    s = np.asarray(s, dtype=float)
    pos = s > 0
    q = q_value(spec, s)
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.where(pos, t_func(spec, np.where(pos, s, 1.0)) * q, 0.0)
    return out


def mrs_rhs(spec, a):
    """Right-hand side of the MRS equation as a function of a > 0."""
    if not a > 0:
        raise ValueError("a must be positive")
    vals = _sq1(spec, a * _SIN)
    total = (2.0 / math.pi) * float(np.dot(_THETA_W, vals))
    if not math.isfinite(total):
        raise OverflowDomain(f"Q'(a) overflows at a = {a:g}")
    return total


def _rhs_or_inf(spec, a):
    try:
        return mrs_rhs(spec, a)
    except OverflowDomain:
        return math.inf


def _rhs_derivative(spec, a):
    # d/da of the rhs: (2/pi) int u (Q'(au) + a u Q''(au)) dtheta
    s = a * _SIN
    jet = q_jet(spec, s, budget=None)
    vals = _SIN * (jet.q1 + s * jet.q2)
    return (2.0 / math.pi) * float(np.dot(_THETA_W, vals))


def mrs_number(spec, x, tol=DEFAULT_TOL):
    """Solve for a_x by bracketing, bisection and a Newton polish."""
    if not x > 0:
        raise ValueError("x must be positive")
    lo, hi = 1e-8, 1.0
    while _rhs_or_inf(spec, hi) < x:
        hi *= 2.0
        if hi > 1e300:
            raise BracketFailure(f"no upper bracket for x = {x:g}")
    while mrs_rhs(spec, lo) > x:
        lo *= 0.5
        if lo < 1e-300:
            raise BracketFailure(f"no lower bracket for x = {x:g}")
    lo = max(lo, hi / 2.0) if _rhs_or_inf(spec, hi / 2.0) < x else lo

    # bisection to a coarse bracket
    while hi - lo > 1e-6 * hi:
        mid = 0.5 * (lo + hi)
        if _rhs_or_inf(spec, mid) < x:
            lo = mid
        else:
            hi = mid

    a = 0.5 * (lo + hi)
    for _ in range(50):
        r = mrs_rhs(spec, a) - x
        if abs(r) <= tol * x:
            return a
        if r < 0:
            lo = a
        else:
            hi = a
        step = r / _rhs_derivative(spec, a)
        nxt = a - step
        if not lo <= nxt <= hi:
            nxt = 0.5 * (lo + hi)
        if nxt == a:
            break
        a = nxt
    if abs(mrs_rhs(spec, a) - x) <= max(tol, 1e-14) * x:
        return a
    raise BracketFailure(f"MRS solve did not reach tol {tol:g} for x = {x:g}")


@dataclass
class MrsTable:
    """Cache of a_x keyed by exact x; no interpolation between entries."""

    spec: object
    solver_tol: float = DEFAULT_TOL
    entries: dict = field(default_factory=dict)

    def __call__(self, x):
        x = float(x)
        a = self.entries.get(x)
        if a is None:
            a = self.entries[x] = mrs_number(self.spec, x, self.solver_tol)
        return a

    def fill(self, xs):
        for x in xs:
            self(x)
        return self

    def rows(self):
        """(x, a_x, T(a_x), Q(a_x), relative residual) sorted by x."""
        out = []
        for x in sorted(self.entries):
            a = self.entries[x]
            out.append((x, a, t_func(self.spec, a), q_value(self.spec, a),
                        (mrs_rhs(self.spec, a) - x) / x))
        return out


@dataclass
class Lemma21Report:
    t: np.ndarray
    L: float
    ratios: dict

    def bands(self):
        """max/min of every ratio sequence."""
        return {k: float(np.max(v) / np.min(v)) for k, v in self.ratios.items()}

    def to_dict(self):
        return {"t": self.t.tolist(), "L": self.L,
                "ratios": {k: v.tolist() for k, v in self.ratios.items()},
                "bands": self.bands()}


def lemma21_report(spec, n_grid, L=2.0, table=None):
    """Comparison ratios between quantities at a_t and a_{Lt}.

    Keys: ``a`` = a_t/a_{Lt}, ``Q`` = Q(a_t)/Q(a_{Lt}), ``T`` =
    T(a_t)/T(a_{Lt}), ``Q_vs_t`` = [t/sqrt(T(a_t))]/Q(a_t), ``Q1_vs_t`` =
    [t sqrt(T(a_t))/a_t]/Q'(a_t), ``T_vs_gap`` = (1/T(a_t))/|1 - a_{Lt}/a_t|.
    The last one is undefined for L = 1 and reported as nan there.
    """
    table = table or MrsTable(spec)
    t = np.asarray(n_grid, dtype=float)
    at = np.array([table(v) for v in t])
    alt = np.array([table(L * v) for v in t])
    qa, qb = q_value(spec, at), q_value(spec, alt)
    ta, tb = t_func(spec, at), t_func(spec, alt)
    q1a = ta * qa / at
    with np.errstate(divide="ignore", invalid="ignore"):
        gap = (1.0 / ta) / np.abs(1.0 - alt / at)
    ratios = {
        "a": at / alt,
        "Q": qa / qb,
        "T": ta / tb,
        "Q_vs_t": (t / np.sqrt(ta)) / qa,
        "Q1_vs_t": (t * np.sqrt(ta) / at) / q1a,
        "T_vs_gap": gap if L != 1 else np.full_like(t, np.nan),
    }
    return Lemma21Report(t, float(L), ratios)


def growth_exponent(spec, n_grid, table=None):
    """Slope of log a_x against log x and the implied constant max a_x/x**slope."""
    table = table or MrsTable(spec)
    x = np.asarray(n_grid, dtype=float)
    a = np.array([table(v) for v in x])
    slope = fit_slope(x, a)
    return slope, float(np.max(a / x ** slope))


def lemma26_fit(spec, k, n_grid, table=None):
    """Fit log T(a_n) against log n; passes iff the slope is below 2/(2k+3)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    n = np.asarray(n_grid, dtype=float)
    if n.max() / n.min() < 100:
        raise ValueError("n_grid must span at least two decades")
    table = table or MrsTable(spec)
    tv = np.array([t_func(spec, table(v)) for v in n])
    slope = fit_slope(n, tv)
    return slope, bool(slope < 2.0 / (2 * k + 3))
