"""Exponential weights w = exp(-Q) on the real line.

Two families are supported:

* Freud:  Q(x) = |x|**alpha, alpha > 1
* Erdos:  Q(x) = |x|**u * (exp_l(|x|**alpha) - exp_l(0)), with exp_l the
  l-fold iterated exponential.

Every function here accepts scalars or numpy arrays.  Evenness is applied by
working with |x| throughout, so the derivative jet returned by :func:`q_jet`
is the jet of Q on (0, inf) evaluated at |x|.
"""

from dataclasses import asdict, dataclass
import math

import numpy as np
from scipy.special import binom

from .errors import OverflowDomain, SingularPoint

FREUD = "freud"
ERDOS = "erdos"

#: |log w| above this raises OverflowDomain from q_jet
LOGW_BUDGET = 700.0
#: iterated-exponential depth beyond which doubles overflow at tiny |x|
MAX_DEPTH = 2

_FAMILY_ALIASES = {"freud": FREUD, "erdos": ERDOS, "erdős": ERDOS}


@dataclass(frozen=True)
class WeightSpec:
    family: str
    alpha: float
    u: float = 0.0
    l: int = 1

    def __post_init__(self):
        fam = _FAMILY_ALIASES.get(str(self.family).lower())
        if fam is None:
            raise ValueError(f"unknown weight family {self.family!r}")
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "u", float(self.u))
        if int(self.l) != self.l:
            raise ValueError("l must be an integer")
        object.__setattr__(self, "l", int(self.l))
        if fam == FREUD:
            if not self.alpha > 1:
                raise ValueError("Freud weights need alpha > 1")
        else:
            if not self.alpha > 0 or self.u < 0 or not self.alpha + self.u > 1:
                raise ValueError("Erdos weights need alpha > 0, u >= 0, alpha + u > 1")
            if not 1 <= self.l <= MAX_DEPTH:
                raise ValueError(f"Erdos depth l must be in [1, {MAX_DEPTH}]")

    @classmethod
    def freud(cls, alpha):
        return cls(FREUD, alpha)

    @classmethod
    def erdos(cls, alpha, u=0.0, l=1):
        return cls(ERDOS, alpha, u, l)

    @property
    def is_freud(self):
        return self.family == FREUD

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(d["family"], d["alpha"], d.get("u", 0.0), d.get("l", 1))

    def label(self):
        if self.is_freud:
            return f"Freud(alpha={self.alpha:g})"
        return f"Erdos(alpha={self.alpha:g}, u={self.u:g}, l={self.l})"


@dataclass
class QJet:
    """Q and its first four derivatives at |x|; ``logw`` is -Q."""

    q: object
    q1: object
    q2: object
    q3: object
    q4: object
    logw: object

    def derivative(self, k):
        return (self.q, self.q1, self.q2, self.q3, self.q4)[k]


# -- truncated Taylor arithmetic, coefficient k holds f^(k)/k! ----------------

_ORDER = 4


def _power_jet(x, a):
    """Jet of x**a at x >= 0."""
    x = np.asarray(x, dtype=float)
    jet = np.empty((_ORDER + 1,) + x.shape)
    pos = x > 0
    for k in range(_ORDER + 1):
        c = binom(a, k)
        e = a - k
        if c == 0:
            # integer power: this derivative vanishes identically
            jet[k] = 0.0
            continue
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            val = c * np.where(pos, x, 1.0) ** e
        if not pos.all():
            if e > 0:
                at0 = 0.0
            elif e == 0:
                at0 = c
            else:
                at0 = np.nan
            val = np.where(pos, val, at0)
        jet[k] = val
    return jet


def _mul_jet(f, g):
    h = np.zeros_like(f)
    for k in range(_ORDER + 1):
        for i in range(k + 1):
            h[k] += f[i] * g[k - i]
    return h


def _expm1_jet(f):
    """Jet of expm1(f); derivative coefficients are those of exp(f)."""
    g = np.empty_like(f)
    with np.errstate(over="ignore"):
        g[0] = np.exp(f[0])
    for k in range(1, _ORDER + 1):
        acc = np.zeros_like(f[0])
        for i in range(1, k + 1):
            acc = acc + i * f[i] * g[k - i]
        g[k] = acc / k
    with np.errstate(over="ignore"):
        g[0] = np.expm1(f[0])
    return g


def _iterated_bases(l):
    # exp_m(0) for m = 0..l
    c = [0.0]
    for _ in range(l):
        c.append(math.exp(c[-1]))
    return c


def _log_q(spec, ax):
    """log Q(|x|) without overflow, -inf at 0."""
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        if spec.is_freud:
            return spec.alpha * np.log(ax)
        c = _iterated_bases(spec.l)
        d = ax ** spec.alpha
        logd = spec.alpha * np.log(ax)
        for m in range(1, spec.l + 1):
            big = d > 30
            logexpm1 = np.where(big, d + np.log(-np.expm1(-np.where(big, d, 1.0))),
                                np.log(np.expm1(np.where(big, 0.0, d))))
            logd = c[m - 1] + logexpm1
            d = math.exp(c[m - 1]) * np.expm1(d)
        return spec.u * np.log(ax) + logd


def _check_budget(spec, ax):
    logq = _log_q(spec, ax)
    if np.any(logq > math.log(LOGW_BUDGET)):
        raise OverflowDomain(
            f"Q(x) exceeds the log-weight budget {LOGW_BUDGET:g} for {spec.label()}")


def q_jet(spec, x, budget=LOGW_BUDGET):
    """Q, Q', Q'', Q''', Q'''' at |x|.

    With ``budget`` set (the default), any point where Q > budget raises
    :class:`OverflowDomain`; pass ``budget=None`` to evaluate regardless and
    let values saturate to inf.
    """
    ax = np.abs(np.asarray(x, dtype=float))
    if budget is not None:
        _check_budget(spec, ax)
    if spec.is_freud:
        jet = _power_jet(ax, spec.alpha)
    else:
        d = _power_jet(ax, spec.alpha)
        c = _iterated_bases(spec.l)
        with np.errstate(over="ignore", invalid="ignore"):
            for m in range(1, spec.l + 1):
                d = math.exp(c[m - 1]) * _expm1_jet(d)
            jet = _mul_jet(_power_jet(ax, spec.u), d) if spec.u else d
    if np.any(np.isnan(jet)):
        raise SingularPoint(f"derivatives of Q undefined at x = 0 for {spec.label()}")
    fact = [1, 1, 2, 6, 24]
    vals = [jet[k] * fact[k] for k in range(_ORDER + 1)]
    if np.ndim(x) == 0:
        vals = [float(v) for v in vals]
    return QJet(*vals, logw=-vals[0])


def q_value(spec, x):
    """Q(|x|), saturating to inf instead of raising."""
    ax = np.abs(np.asarray(x, dtype=float))
    with np.errstate(over="ignore", invalid="ignore"):
        if spec.is_freud:
            q = ax ** spec.alpha
        else:
            c = _iterated_bases(spec.l)
            d = ax ** spec.alpha
            for m in range(1, spec.l + 1):
                d = math.exp(c[m - 1]) * np.expm1(d)
            q = ax ** spec.u * d if spec.u else d
    return q if np.ndim(q) else float(q)


def _phi(z):
    # z / (1 - exp(-z)), continuous at 0
    z = np.asarray(z, dtype=float)
    small = z < 1e-300
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.where(small, 1.0, z / -np.expm1(-np.where(small, 1.0, z)))
    return out


def t_func(spec, x):
    """T(x) = x Q'(x) / Q(x), x != 0.

    Computed from a log-derivative recursion, so it stays finite well past
    the point where Q itself overflows.
    """
    ax = np.abs(np.asarray(x, dtype=float))
    if np.any(ax == 0):
        raise SingularPoint("T is undefined at x = 0")
    if spec.is_freud:
        t = np.full(ax.shape, spec.alpha)
    else:
        c = _iterated_bases(spec.l)
        with np.errstate(over="ignore"):
            d = ax ** spec.alpha
            t = spec.alpha * np.ones_like(ax)
            for m in range(1, spec.l + 1):
                t = t * _phi(d)
                d = math.exp(c[m - 1]) * np.expm1(d)
        t = spec.u + t
    return t if np.ndim(x) else float(t)


def t_safe(spec, x, eps=1e-8):
    """T with the eps-neighbourhood of 0 replaced by its value at +-eps."""
    x = np.asarray(x, dtype=float)
    return t_func(spec, np.where(np.abs(x) < eps, eps, x))


def weight_eval(spec, x):
    """Return (w, logw); w may underflow to 0 while logw stays finite."""
    logw = -q_value(spec, x)
    w = np.exp(logw)
    if np.ndim(w) == 0:
        return float(w), float(logw)
    return w, logw


def class_report(spec, grid, lam=1.0, exclude=0.0):
    """Sampled diagnostics for the class conditions on Q.

    Grid points with |x| <= ``exclude`` are dropped.  The returned constants
    are empirical grid extrema, not certified bounds.
    """
    x = np.asarray(grid, dtype=float)
    x = x[np.abs(x) > exclude]
    if x.size == 0:
        raise ValueError("class_report needs grid points outside the excluded neighbourhood")
    jet = q_jet(spec, x, budget=None)
    t = t_func(spec, x)
    pos = np.abs(x)
    order = np.argsort(pos)
    t_sorted = t[order]
    e_ratio = jet.q2 * jet.q / jet.q1 ** 2
    growth = np.abs(jet.q1) / jet.q ** lam
    report = {
        "weight": spec.to_dict(),
        "lambda": float(lam),
        "points": int(x.size),
        "T_min": float(t.min()),
        "T_min_at": float(x[np.argmin(t)]),
        "T_max": float(t.max()),
        "T_monotone": bool(np.all(np.diff(t_sorted) >= -1e-12 * np.abs(t_sorted[1:]))),
        # worst ratio T(x)/T(y) over x < y, i.e. the quasi-increasing constant
        "T_quasi_constant": float(np.max(t_sorted / np.minimum.accumulate(t_sorted[::-1])[::-1])),
        "q1_positive": bool(np.all(jet.q1 > 0)),
        "q2_positive": bool(np.all(jet.q2 > 0)),
        "cond_e_min": float(e_ratio.min()),
        "cond_e_max": float(e_ratio.max()),
        "growth_max": float(growth.max()),
    }
    # C^3 / C^4 ratios only where the higher derivatives do not vanish identically
    with np.errstate(divide="ignore", invalid="ignore"):
        base = np.abs(jet.q2 / jet.q1)
        r3 = np.abs(jet.q3 / jet.q2) / base
        r4 = np.abs(jet.q4 / jet.q3) / base
    for key, r in (("c3_ratio", r3), ("c4_ratio", r4)):
        r = r[np.isfinite(r)]
        report[key + "_max"] = float(r.max()) if r.size else None
        report[key + "_min"] = float(r.min()) if r.size else None
    return report
