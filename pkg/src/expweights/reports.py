"""Per-n ratio records and the log-log boundedness verdict."""

from dataclasses import dataclass, field
import math

import numpy as np

SLOPE_TOL = 0.1

PASS = "pass"
FAIL = "fail"
EXPLORATORY = "exploratory"


def fit_slope(x, y):
    """Least-squares slope of log y against log x."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    if lx.size < 2:
        return 0.0
    return float(np.polyfit(lx, ly, 1)[0])


def upper_half(rows):
    """The rows fitted for the verdict: the upper ceil(len/2) by n."""
    rows = sorted(rows)
    return rows[len(rows) // 2:] if len(rows) > 2 else rows


@dataclass
class RatioReport:
    inequality_id: str
    rows: list
    slope: float
    verdict: str
    empirical_constant: float
    slope_tol: float = SLOPE_TOL
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_rows(cls, inequality_id, rows, slope_tol=SLOPE_TOL, exploratory=False,
                  bound=None, extra=None):
        """Build a report from (n, ratio) rows.

        With ``bound`` set, the verdict is an explicit-constant check (every
        ratio <= bound) instead of the slope test.
        """
        rows = sorted((int(n), float(r)) for n, r in rows)
        fit = upper_half(rows)
        slope = fit_slope([n for n, _ in fit], [r for _, r in fit])
        const = max(r for _, r in rows)
        if exploratory:
            verdict = EXPLORATORY
        elif bound is not None:
            verdict = PASS if const <= bound else FAIL
        else:
            verdict = PASS if slope <= slope_tol else FAIL
        if not all(r > 0 and math.isfinite(r) for _, r in rows):
            verdict = FAIL if not exploratory else verdict
        return cls(inequality_id, rows, slope, verdict, const, slope_tol, dict(extra or {}))

    @property
    def passed(self):
        return self.verdict == PASS

    def ns(self):
        return [n for n, _ in self.rows]

    def ratios(self):
        return [r for _, r in self.rows]

    def slope_without_largest(self):
        rows = self.rows[:-1]
        fit = upper_half(rows)
        return fit_slope([n for n, _ in fit], [r for _, r in fit])

    def to_dict(self):
        return {
            "inequality_id": self.inequality_id,
            "rows": [[n, r] for n, r in self.rows],
            "slope": self.slope,
            "slope_tol": self.slope_tol,
            "verdict": self.verdict,
            "empirical_constant": self.empirical_constant,
            "extra": self.extra,
        }
