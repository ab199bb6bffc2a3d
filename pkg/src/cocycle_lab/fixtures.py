"""Canonical fixtures with closed-form Lyapunov data.

The diagonal cocycle M_0 = diag(2, 1/2), M_1 = diag(3, 1/3) over the full
2-shift is the workhorse: its Oseledec splitting is the coordinate axes at
every point, and for Bernoulli(p) (symbol 0 carrying mass p) the exponents
are +-chi(p) with chi(p) = p log 2 + (1-p) log 3.  A second fixture with
upper-triangular generators exercises off-diagonal interaction; its fast
direction is still e_1, while the slow direction is the explicitly summed
series v(x) = (s(x), 1) with

    s(x) = - sum_{k>=0} b(x_k) prod_{j<k} d(x_j) / prod_{j<=k} a(x_j),

which converges geometrically (ratio <= 1/4) and is A-invariant by
construction.
"""

from __future__ import annotations

import math

import numpy as np

from .cocycle import CocycleSpec
from .lyapunov_metric import SplittingSpec
from .measures import MarkovMeasure, bernoulli, point_mass_measure
from .shift_space import ShiftSpace, SymbolPoint, full_shift

__all__ = [
    "LOG2",
    "LOG3",
    "chi_bernoulli",
    "diag_cocycle",
    "triangular_cocycle",
    "scalar_cocycle",
    "diag_splitting",
    "triangular_splitting",
    "delta_zero",
    "delta_one",
]

LOG2 = math.log(2.0)
LOG3 = math.log(3.0)


def chi_bernoulli(p: float) -> float:
    """Top exponent of the fixture cocycles w.r.t. Bernoulli(p)."""
    return p * LOG2 + (1 - p) * LOG3


def diag_cocycle(space: ShiftSpace | None = None) -> CocycleSpec:
    space = space or full_shift()
    return CocycleSpec(
        space=space,
        dimension=2,
        depth=1,
        generators={(0,): np.diag([2.0, 0.5]), (1,): np.diag([3.0, 1.0 / 3.0])},
    )


def triangular_cocycle(space: ShiftSpace | None = None) -> CocycleSpec:
    space = space or full_shift()
    return CocycleSpec(
        space=space,
        dimension=2,
        depth=1,
        generators={
            (0,): np.array([[2.0, 1.0], [0.0, 0.5]]),
            (1,): np.array([[3.0, 1.0], [0.0, 1.0 / 3.0]]),
        },
    )


def scalar_cocycle(c: float, space: ShiftSpace | None = None) -> CocycleSpec:
    space = space or full_shift()
    gens = {w: np.array([[c]]) for w in space.words(1)}
    return CocycleSpec(space=space, dimension=1, depth=1, generators=gens)


def delta_zero(space: ShiftSpace | None = None) -> MarkovMeasure:
    """Point mass on 0^infinity (top fixture exponent log 2)."""
    return point_mass_measure(space or full_shift(), 0)


def delta_one(space: ShiftSpace | None = None) -> MarkovMeasure:
    """Point mass on 1^infinity (top fixture exponent log 3)."""
    return point_mass_measure(space or full_shift(), 1)


def diag_splitting(chi: float) -> SplittingSpec:
    """Coordinate-axis splitting with exponents -chi < chi (chi > 0)."""
    if chi <= 0:
        raise ValueError("chi must be positive")
    e1 = np.array([[1.0], [0.0]])
    e2 = np.array([[0.0], [1.0]])
    return SplittingSpec(
        exponents=(-chi, chi),
        multiplicities=(1, 1),
        basis_at=lambda x: [e2, e1],
    )


def _slow_direction(A: CocycleSpec, x: SymbolPoint, terms: int = 60) -> np.ndarray:
    """Unit vector spanning the slow subspace of an upper-triangular
    2x2 cocycle at x, by direct series summation.

    The invariance A(x) v(x) = d(x_0) v(f x) holds by construction; with
    |d/a| <= 1/4 the truncation error after 60 terms is below 1e-30.
    """
    s = 0.0
    prefix = 1.0  # prod_{j<k} d(x_j) / prod_{j<k} a(x_j)
    for k in range(terms):
        a, b, d = (A.generators[A.generator_word(x, k)][i]
                   for i in ((0, 0), (0, 1), (1, 1)))
        s -= b * prefix / a
        prefix *= d / a
    v = np.array([s, 1.0])
    return v / np.linalg.norm(v)


def triangular_splitting(A: CocycleSpec, chi: float) -> SplittingSpec:
    """Splitting of the triangular fixture: fast direction e_1, slow
    direction the summed series, with exponents -chi < chi."""
    if chi <= 0:
        raise ValueError("chi must be positive")
    e1 = np.array([[1.0], [0.0]])

    def basis_at(x):
        return [_slow_direction(A, x)[:, None], e1]

    return SplittingSpec(exponents=(-chi, chi), multiplicities=(1, 1),
                         basis_at=basis_at)
