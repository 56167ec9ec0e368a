"""Periodic ideal splines: the Euler-type extremals with one interior kink.

The degree-r ideal spline here is the 2pi-periodic function with zero mean
whose r-th derivative equals sign(x) - offset on the cut window
(-b, 2pi - b), with the constant offset chosen so the derivative has zero
mean over the period.  On [-b, 2pi - b] it differs from the power kink
|x| x^(r-1) / r! by a polynomial of degree at most r.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import factorial

from .grids import TWO_PI, Interval
from .piecewise import PiecewisePoly


def abs_power(r: int, x):
    """|x| x^(r-1) / r!, the one-kink power function (x itself for r = 1)."""
    if r < 1:
        raise ValueError("r must be a positive integer")
    x = np.asarray(x, dtype=float)
    return np.abs(x) * x ** (r - 1) / float(factorial(r, exact=True))


def step_offset(b: float) -> float:
    """Constant making the cut step sign(x) - offset mean-zero on the period.

    The step is -1 on (-b, 0) and +1 on (0, 2pi - b); the balancing constant
    is 1 - b/pi, which lies in [0, 1) for 0 < b <= pi.
    """
    if not 0.0 < b <= np.pi:
        raise ValueError("the cut parameter b must satisfy 0 < b <= pi")
    return 1.0 - b / np.pi


@dataclass
class IdealSpline:
    """Degree-r periodic ideal spline with cut parameter b.

    levels[j] is the j-th antiderivative of the mean-zero step: levels[0] is
    the r-th derivative, levels[r] the spline itself.  Every level has zero
    period mean, so each antiderivative is again periodic.
    """

    r: int
    b: float
    offset: float
    levels: list

    @property
    def poly(self) -> PiecewisePoly:
        return self.levels[self.r]

    @property
    def window(self) -> Interval:
        return self.poly.window

    def __call__(self, x):
        return self.poly(x)

    def derivative_values(self, j: int, x):
        """Values of the j-th derivative, 0 <= j <= r."""
        if not 0 <= j <= self.r:
            raise ValueError("derivative order must lie in [0, r]")
        return self.levels[self.r - j](x)

    def top_derivative_sup(self) -> float:
        """Exact sup of |r-th derivative|: the larger step plateau, 1 + offset."""
        return max(abs(c[0]) for c in self.levels[0].coefficients)

    def residual_poly(self):
        """Coefficients of the degree <= r polynomial (spline minus power kink).

        Computed independently from both window pieces; returns the
        coefficient vector and the cross-piece defect (max abs coefficient
        difference), which is a construction self-check.
        """
        rfact = float(factorial(self.r, exact=True))
        plus = self.poly.global_piece_coefficients(1)
        minus = self.poly.global_piece_coefficients(0)
        p_plus = plus.copy()
        p_plus[self.r] -= 1.0 / rfact
        p_minus = minus.copy()
        p_minus[self.r] += 1.0 / rfact
        defect = float(np.abs(p_plus - p_minus).max())
        return p_plus, defect

    def to_dict(self) -> dict:
        return {
            "kind": "ideal_spline",
            "r": self.r,
            "b": self.b,
            "offset": self.offset,
            "levels": [lv.to_dict() for lv in self.levels],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IdealSpline":
        levels = [PiecewisePoly.from_dict(lv) for lv in d["levels"]]
        return cls(d["r"], d["b"], d["offset"], levels)


def build_ideal_spline(r: int, b: float) -> IdealSpline:
    """Construct the degree-r ideal spline on the window [-b, 2pi - b]."""
    if r < 1:
        raise ValueError("r must be a positive integer")
    offset = step_offset(b)
    step = PiecewisePoly([-b, 0.0, TWO_PI - b],
                         [[-1.0 - offset], [1.0 - offset]],
                         periodic=True)
    levels = [step]
    current = step
    for _ in range(r):
        current = current.antiderivative().with_zero_mean()
        levels.append(current)
    return IdealSpline(r=r, b=b, offset=offset, levels=levels)


def residual_polynomial(r: int, b: float):
    """Degree <= r polynomial linking the ideal spline to the power kink."""
    return build_ideal_spline(r, b).residual_poly()


def ideal_qth_derivative_quotient(spline: IdealSpline, h: float = 1e-7):
    """One-sided difference quotient of the top derivative, as a callable.

    Away from the two step breakpoints the r-th derivative is constant, so
    the forward quotient vanishes identically; near a breakpoint it is a
    large one-signed spike.  Used for membership checks of splines whose
    (r+1)-th derivative only exists distributionally.
    """
    top = spline.levels[0]

    def quotient(t):
        t = np.asarray(t, dtype=float)
        return (top(t + h) - top(t)) / h

    return quotient
