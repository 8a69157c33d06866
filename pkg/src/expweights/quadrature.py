"""Composite Gauss-Legendre rules."""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def gauss_legendre(m):
    """Nodes and weights of the m-point rule on [-1, 1] (cached, read-only)."""
    x, w = np.polynomial.legendre.leggauss(m)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def composite_rule(edges, m):
    """Composite m-point Gauss-Legendre rule on the panels given by ``edges``.

    Returns (nodes, weights), both sorted by panel.
    """
    edges = np.asarray(edges, dtype=float)
    t, wt = gauss_legendre(m)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + hi) * 0.5 + half * t
    weights = half * wt
    return nodes.ravel(), weights.ravel()


def graded_edges(radius, uniform_panels, grading_levels=10, core=None,
                 tail_growth=1.5):
    """Panel edges on [0, radius].

    Geometric grading toward 0 below the first uniform panel, ``uniform_panels``
    equal panels on [0, core], then panels growing by ``tail_growth`` out
    to ``radius``.
    """
    core = radius if core is None else min(core, radius)
    h = core / uniform_panels
    uniform = np.linspace(0.0, core, uniform_panels + 1)
    graded = h * 0.5 ** np.arange(grading_levels, 0, -1)
    edges = [0.0, *graded, *uniform[1:]]
    x, step = core, h
    while x < radius:
        step *= tail_growth
        x = min(x + step, radius)
        edges.append(x)
    return np.asarray(edges)
