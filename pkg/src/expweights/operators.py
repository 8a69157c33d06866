"""Fourier coefficients, partial sums, de la Vallee Poussin means, kernels and
Christoffel functions.

Every value here is built from weighted quantities: partial sums and means
are returned as s_n^{(j)}(f)(x) w(x), kernels as w(x) w(t) K_n(x, t), and the
Christoffel function lambda_n^{(j)}(x) as w(x)^2 / sum_k (p_k^{(j)}(x) w(x))^2,
so no unweighted p_k is formed.
"""

from dataclasses import dataclass
import math

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import polynomial as Pm
from scipy.linalg import cho_factor, cho_solve

from .errors import DegenerateSum, IllConditioned, NearDiagonal, QuadratureUnderresolved
from .mrs import MrsTable, mrs_number
from .orthopoly import FINE_QUAD, _half_rule, weighted_basis
from .reports import RatioReport
from .weights import t_safe, weight_eval

BESSEL_RTOL = 1e-8
NEAR_DIAGONAL = 1e-6


@dataclass
class TestFunction:
    """A target f given through its weighted values x -> f(x) w(x).

    ``radius`` bounds the region where |fw| is non-negligible.
    """

    __test__ = False  # not a pytest class

    id: str
    evaluator: object
    description: str = ""
    radius: float = math.inf
    degree: int = None  # set when f is a polynomial

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=float))

    def scaled(self, c):
        ev = self.evaluator
        return TestFunction(f"{c:g}*{self.id}", lambda x: c * ev(x), self.description,
                            self.radius, self.degree)


def bump(shift, spec=None):
    return TestFunction(f"bump{shift:+g}", lambda x: np.exp(-(x - shift) ** 2),
                        f"fw = exp(-(t - {shift:g})^2)", abs(shift) + 9.0)


def sine_packet():
    return TestFunction("sine", lambda x: np.sin(5 * x) * np.exp(-x * x / 4),
                        "fw = sin(5t) exp(-t^2/4)", 18.0)


def plateau(width=0.1):
    def ev(x):
        return 0.5 * (np.tanh((x + 1) / width) - np.tanh((x - 1) / width))
    return TestFunction("plateau", ev, f"fw = smoothed indicator of [-1, 1], edge {width:g}",
                        1.0 + 40 * width)


def polynomial(spec, coeffs, name=None, radius=math.inf):
    """f = P with monomial coefficients ``coeffs`` (ascending)."""
    coeffs = np.asarray(coeffs, dtype=float)

    def ev(x):
        return Pm.polyval(x, coeffs) * weight_eval(spec, x)[0]
    deg = len(coeffs) - 1
    return TestFunction(name or f"poly{deg}", ev, f"f = polynomial of degree {deg}",
                        radius, deg)


def suite_polynomial_coeffs(d):
    i = np.arange(d + 1)
    return (-0.5) ** i / (i + 1.0)


def basis_function(rec, k):
    """f = p_k."""
    return TestFunction(f"p{k}", lambda x: weighted_basis(rec, x, k + 1)[..., k, 0],
                        f"f = p_{k}", rec.radius, k)


def default_suite(spec, radius=math.inf, max_degree=12):
    """Fixed stress suite: three bumps, a sine packet, a plateau, and
    polynomials of degree 0..max_degree."""
    suite = [bump(0.0), bump(0.75), bump(-1.5), sine_packet(), plateau()]
    suite += [polynomial(spec, suite_polynomial_coeffs(d), radius=radius)
              for d in range(max_degree + 1)]
    return suite


@dataclass
class CoeffVector:
    spec: object
    coeffs: np.ndarray
    target_id: str
    norm2: float = math.nan  # ||fw||_2^2 on the same rule

    def __len__(self):
        return len(self.coeffs)


def fourier_coeffs(f, rec, m, quad_cfg=None):
    """b_k(f) = int (fw)(t) (p_k w)(t) dt for k < m."""
    if m > rec.N + 1:
        raise ValueError(f"m = {m} exceeds table degree {rec.N}")
    if quad_cfg is None:
        x, qw = rec.full_rule()
        B = rec.basis_on_rule(m)
    else:
        hx, hw = _half_rule(rec.spec, rec.N, rec.radius, rec.core, quad_cfg)
        x = np.concatenate([-hx[::-1], hx])
        qw = np.concatenate([hw[::-1], hw])
        B = weighted_basis(rec, x, m, 0)[..., 0]
    fw = f(x)
    b = B.T @ (qw * fw)
    norm2 = math.fsum((qw * fw * fw).tolist())
    total = math.fsum((b * b).tolist())
    if total > norm2 * (1 + BESSEL_RTOL) + 1e-300:
        raise QuadratureUnderresolved(
            f"Bessel check failed for {f.id}: sum b_k^2 = {total:.16g} > {norm2:.16g}")
    return CoeffVector(rec.spec, b, f.id, norm2)


def _coeff_array(c):
    return np.asarray(c.coeffs if isinstance(c, CoeffVector) else c, dtype=float)


def partial_sum(c, rec, x, n, j=0):
    """s_n^{(j)}(f)(x) w(x)."""
    b = _coeff_array(c)
    if n > len(b):
        raise ValueError("n exceeds the number of coefficients")
    B = weighted_basis(rec, x, n, j)[..., j]
    return B @ b[:n]


def vp_taper(n, m=None):
    """Weights tau_k, k < m (default 2n), collapsing the mean of s_{n+1}..s_{2n}."""
    m = 2 * n if m is None else m
    k = np.arange(m, dtype=float)
    return np.clip((2 * n - k) / n, 0.0, 1.0)


def vp_mean(c, rec, x, n, j=0):
    """v_n^{(j)}(f)(x) w(x) via the tapered expansion."""
    b = _coeff_array(c)
    if len(b) < 2 * n:
        raise ValueError("vp_mean needs at least 2n coefficients")
    B = weighted_basis(rec, x, 2 * n, j)[..., j]
    return B @ (vp_taper(n) * b[:2 * n])


def vp_mean_definition(c, rec, x, n, j=0):
    """(1/n) sum_{m=n+1}^{2n} s_m^{(j)}(f)(x) w(x), term by term."""
    b = _coeff_array(c)
    B = weighted_basis(rec, x, 2 * n, j)[..., j]
    terms = [B[..., :m] @ b[:m] for m in range(n + 1, 2 * n + 1)]
    return sum(terms) / n


def cd_kernel(rec, n, x, t, threshold=NEAR_DIAGONAL):
    """(direct, cd) values of w(x) w(t) K_n(x, t).

    ``direct`` sums p_k(x) p_k(t); ``cd`` uses the Christoffel-Darboux
    quotient with gamma_{n-1}/gamma_n = a_n.
    """
    if not 1 <= n <= rec.N:
        raise ValueError(f"n must be in [1, {rec.N}]")
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    bx = weighted_basis(rec, x, n + 1)[..., 0]
    bt = weighted_basis(rec, t, n + 1)[..., 0]
    direct = np.sum(bx[..., :n] * bt[..., :n], axis=-1)
    if np.any(np.abs(x - t) < threshold):
        raise NearDiagonal(f"|x - t| below {threshold:g}", direct=direct)
    an = rec.offdiag[n - 1]
    cd = an * (bx[..., n] * bt[..., n - 1] - bt[..., n] * bx[..., n - 1]) / (x - t)
    if direct.ndim == 0:
        return float(direct), float(cd)
    return direct, cd


def christoffel_sum(rec, n, x, j=0):
    """sum_{k<n} (p_k^{(j)}(x) w(x))^2."""
    B = weighted_basis(rec, x, n, j)[..., j]
    return np.sum(B * B, axis=-1)


def christoffel(rec, n, x, j=0):
    """lambda_n^{(j)}(x) = 1 / sum_{k<n} p_k^{(j)}(x)^2 for the measure w^2 dt.

    Evaluated as exp(2 log w(x) - log sum (p_k^{(j)} w)^2); underflows to 0
    only where w(x)^2 itself does.
    """
    if not 0 <= j < n:
        raise ValueError("christoffel needs 0 <= j < n")
    s = christoffel_sum(rec, n, x, j)
    if np.any(s == 0):
        raise DegenerateSum("weighted sum of squares underflowed to 0")
    out = np.exp(2.0 * weight_eval(rec.spec, x)[1] - np.log(s))
    return float(out) if np.ndim(out) == 0 else out


def christoffel_oracle(spec, rec, n, x, j=0, quad_cfg=FINE_QUAD, scale=None):
    """Brute-force lambda_n^{(j)}(x) from the extremal problem

        min int |P w|^2  subject to  P^{(j)}(x) = 1,  P of degree < n,

    solved in a Chebyshev basis scaled to [-a_n, a_n] with an explicitly
    assembled Gram matrix.
    """
    if not 0 <= j < n <= 12:
        raise ValueError("oracle needs 0 <= j < n <= 12")
    s = scale or mrs_number(spec, n)
    hx, hw = _half_rule(spec, max(n, 8), rec.radius, rec.core, quad_cfg, fine=True)
    t = np.concatenate([-hx[::-1], hx])
    qw = np.concatenate([hw[::-1], hw]) * np.exp(2.0 * weight_eval(spec, t)[1])
    V = C.chebvander(t / s, n - 1)
    G = (V * qw[:, None]).T @ V
    ev = np.linalg.eigvalsh(G)
    if ev[0] <= 0 or ev[-1] / ev[0] > 1e10:
        raise IllConditioned(f"Gram condition number {ev[-1] / ev[0]:.3e}")
    c = np.empty(n)
    for a in range(n):
        e = np.zeros(n)
        e[a] = 1.0
        c[a] = C.chebval(x / s, C.chebder(e, j)) / s ** j if j else C.chebval(x / s, e)
    return 1.0 / float(c @ cho_solve(cho_factor(G), c))


def verify_prop32(spec, rec, mrs, n_grid, j, x_grid=None, points=801):
    """sup_x [sum_{k<n} (p_k^{(j)} w)^2 T^{-(2j+1)/2}] / (n/a_n)^{2j+1} per n.

    ``x_grid`` defaults to ``points`` equispaced points in (-a_{2n}, a_{2n});
    a supplied grid is clipped to that interval.  Points with |x| <= 1e-8 are
    dropped (T is only formally singular there).
    """
    mrs = mrs or MrsTable(spec)
    rows = []
    for n in n_grid:
        a2n = mrs(2 * n)
        if x_grid is None:
            xs = np.linspace(-a2n, a2n, points + 2)[1:-1]
        else:
            xs = np.asarray(x_grid, dtype=float)
            xs = xs[np.abs(xs) < a2n]
        xs = xs[np.abs(xs) > 1e-8]
        if xs.size == 0:
            raise ValueError(f"no grid points left for n = {n}")
        s = christoffel_sum(rec, n, xs, j) * t_safe(spec, xs) ** (-(2 * j + 1) / 2)
        rows.append((n, float(np.max(s)) / (n / mrs(n)) ** (2 * j + 1)))
    return RatioReport.from_rows(f"3.7[j={j}]", rows)
