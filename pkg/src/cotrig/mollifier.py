"""A smooth odd step and its derivative calculus.

The step S is built from the standard bump psi(t) = exp(-1/(1 - t^2)):
S(x) = -1 + 2/Z * int_{-1}^{x} psi, with Z the total bump mass.  S is odd,
increasing, equals sign(x) for |x| >= 1, and all its derivatives vanish at
+-1, so pieces of S can be welded onto constant plateaus with C^infinity
joins.  Derivatives of any order are evaluated from the closed form
psi^(k) = P_k(t) / (1 - t^2)^(2k) * psi(t), with P_k given by a polynomial
recursion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as _cheb
from numpy.polynomial import polynomial as _poly
from scipy.integrate import quad

# below 1 - t^2 = 2e-3 the bump is ~ exp(-500) ~ 1e-218: call it zero and
# keep the rational prefactor from overflowing
_EDGE = 2e-3

_MAX_DERIVATIVE = 12


def _prefactor_polys(count: int):
    """P_k for psi^(k) = P_k / (1-t^2)^(2k) * psi, exact small-int recursion.

    Differentiating P_k / D^(2k) * psi with D = 1 - t^2 and D' = -2t gives
    P_{k+1} = (P_k' D + 4 k t P_k) D - 2 t P_k.
    """
    D = np.array([1.0, 0.0, -1.0])
    t = np.array([0.0, 1.0])
    polys = [np.array([1.0])]
    for k in range(count):
        P = polys[-1]
        inner = _poly.polyadd(_poly.polymul(_poly.polyder(P), D),
                              4.0 * k * _poly.polymul(t, P))
        polys.append(_poly.polysub(_poly.polymul(inner, D), 2.0 * _poly.polymul(t, P)))
    return polys


_PREFACTORS = _prefactor_polys(_MAX_DERIVATIVE)


def bump(t):
    """exp(-1/(1-t^2)) inside (-1, 1), zero outside."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros_like(t)
    d = 1.0 - t * t
    inside = d > _EDGE
    out[inside] = np.exp(-1.0 / d[inside])
    return out


def bump_derivative(k: int, t):
    """k-th derivative of the bump, exact rational-prefactor closed form."""
    if not 0 <= k <= _MAX_DERIVATIVE:
        raise ValueError(f"bump derivatives supported up to order {_MAX_DERIVATIVE}")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros_like(t)
    d = 1.0 - t * t
    inside = d > _EDGE
    ti = t[inside]
    di = d[inside]
    out[inside] = (_poly.polyval(ti, _PREFACTORS[k]) / di ** (2 * k)) * np.exp(-1.0 / di)
    return out


def _bump_scalar(u: float) -> float:
    d = 1.0 - u * u
    if d <= _EDGE:
        return 0.0
    return float(np.exp(-1.0 / d))


def bump_mass() -> float:
    """Z = int_{-1}^{1} psi, via adaptive quadrature."""
    val, _ = quad(_bump_scalar, -1.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


@dataclass
class MollifierTable:
    """Cached values and norms of the smooth step S and its derivatives.

    grid is a fine uniform partition of [-1, 1]; values[j] holds S^(j) on it
    (j = 0 is S itself).  sup_norms[j] is a refined estimate of the true sup
    of |S^(j)| (exactly 1 for j = 0).  cheb_coeffs is a Chebyshev interpolant
    of S on [-1, 1] used when transition zones are integrated exactly.
    """

    grid_size: int
    max_order: int
    cheb_degree: int
    mass: float
    grid: np.ndarray = field(repr=False)
    values: list = field(repr=False)
    sup_norms: np.ndarray = field(repr=False)
    cheb_coeffs: np.ndarray = field(repr=False)

    def step(self, u):
        """S(u): odd, increasing, sign(u) for |u| >= 1."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.sign(u).astype(float)
        inside = np.abs(u) < 1.0
        if inside.any():
            out[inside] = _cheb.chebval(u[inside], self.cheb_coeffs)
        return out

    def step_derivative(self, j: int, u):
        """S^(j)(u) for j >= 1: scaled bump derivative, zero outside (-1, 1)."""
        if j < 1:
            raise ValueError("use step() for the 0-th derivative")
        return 2.0 / self.mass * bump_derivative(j - 1, u)

    def s_norm(self, j: int) -> float:
        return float(self.sup_norms[j])

    def to_dict(self) -> dict:
        return {
            "kind": "mollifier_table",
            "grid_size": self.grid_size,
            "max_order": self.max_order,
            "cheb_degree": self.cheb_degree,
            "mass": self.mass,
            "sup_norms": self.sup_norms.tolist(),
        }


def _cumulative_bump(us: np.ndarray, mass: float) -> np.ndarray:
    """int_{-1}^{u} psi for each u, adaptive quadrature between sorted nodes."""
    order = np.argsort(us)
    sorted_u = us[order]
    vals = np.empty_like(sorted_u)
    acc = 0.0
    prev = -1.0
    for i, u in enumerate(sorted_u):
        uc = min(max(u, -1.0), 1.0)
        if uc > prev:
            inc, _ = quad(_bump_scalar, prev, uc, epsabs=1e-14, epsrel=1e-13, limit=200)
            acc += inc
            prev = uc
        vals[i] = acc if u <= 1.0 else mass
    out = np.empty_like(vals)
    out[order] = vals
    return out


_TABLE_CACHE: dict = {}


def build_mollifier_table(grid_size: int = 2049, max_order: int = 8,
                          cheb_degree: int = 96) -> MollifierTable:
    """Build (or fetch from cache) the step table.

    The Chebyshev interpolant is fitted to S at first-kind nodes; since S is
    C^infinity its coefficients decay fast enough for zone construction, and
    the accuracy is asserted against direct quadrature in the test suite.
    """
    key = (grid_size, max_order, cheb_degree)
    if key in _TABLE_CACHE:
        return _TABLE_CACHE[key]
    if grid_size < 257:
        raise ValueError("grid_size too small for reliable sup norms")
    if max_order > _MAX_DERIVATIVE:
        raise ValueError(f"max_order capped at {_MAX_DERIVATIVE}")
    mass = bump_mass()
    grid = np.linspace(-1.0, 1.0, grid_size)

    # interpolation at first-kind nodes: chebfit with full degree is exact there
    nodes = np.cos(np.pi * (2.0 * np.arange(cheb_degree + 1) + 1.0) / (2.0 * (cheb_degree + 1)))
    s_nodes = -1.0 + 2.0 / mass * _cumulative_bump(nodes, mass)
    cheb_coeffs = _cheb.chebfit(nodes, s_nodes, cheb_degree)

    table = MollifierTable(grid_size=grid_size, max_order=max_order,
                           cheb_degree=cheb_degree, mass=mass, grid=grid,
                           values=[], sup_norms=np.zeros(max_order + 1),
                           cheb_coeffs=cheb_coeffs)

    values = [table.step(grid)]
    sups = [1.0]
    for j in range(1, max_order + 1):
        vj = table.step_derivative(j, grid)
        values.append(vj)
        # refine the grid max once through a local parabolic-free fine pass
        k = int(np.argmax(np.abs(vj)))
        lo = grid[max(k - 1, 0)]
        hi = grid[min(k + 1, grid_size - 1)]
        fine = np.linspace(lo, hi, 4097)
        sups.append(max(float(np.abs(vj).max()),
                        float(np.abs(table.step_derivative(j, fine)).max())))
    table.values = values
    table.sup_norms = np.asarray(sups)
    _TABLE_CACHE[key] = table
    return table
