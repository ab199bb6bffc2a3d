"""Pseudo-orbits of orbit segments and exact exponential shadowing.

A pseudo-orbit is a list of orbit segments {(x_i, n_i)} whose junctions jump
by less than delta.  On shift spaces, shadowing is realized exactly by
concatenation: the point z with z[c_i + j] = x_i[j] on every segment is
admissible as soon as delta <= 1/2 (closeness at the junction forces an
allowed transition), and it (tau, lambda)-shadows the pseudo-orbit with the
canonical parameters (tau, lambda) = (2, log 2): the measured distance at
in-segment time j is at most 2^(1 - min(j, n_i - j)), largest at segment
boundaries and decaying by a factor 2 per step inward.

Finite pseudo-orbits are completed to bi-infinite ones by following the
first segment's own orbit backward and the last segment's orbit forward
(zero-jump completion); a periodic flag instead wraps the listed segments
cyclically, producing a periodic shadowing point of period c_M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .shift_space import (
    ShiftError,
    SymbolPoint,
    bowen_distance,
    dyadic_exponent,
    point_distance,
)

__all__ = [
    "PseudoOrbit",
    "ShadowingParams",
    "ShadowReport",
    "c_index",
    "verify_pseudo",
    "shadow",
    "verify_shadowing",
    "exponentially_close",
]

CANONICAL_TAU = 2.0
CANONICAL_LAMBDA = math.log(2.0)


@dataclass(frozen=True)
class ShadowingParams:
    """Decay profile tau * exp(-lambda * min(j, n_i - j)) for segment times j."""

    tau: float = CANONICAL_TAU
    lam: float = CANONICAL_LAMBDA


@dataclass
class PseudoOrbit:
    """Orbit segments (x_i, n_i), i = 0..M-1, with jumps below delta.

    ``delta`` must be a power of 1/2.  With ``periodic=True`` the segment
    list is interpreted cyclically (x_{i+M} = x_i, n_{i+M} = n_i) and the
    wrap junction is part of the pseudo-orbit property.
    """

    segments: list
    delta: float
    periodic: bool = False

    def __post_init__(self):
        if not self.segments:
            raise ValueError("pseudo-orbit needs at least one segment")
        if self.delta != 1.0:  # delta = 2^-w, w >= 0
            dyadic_exponent(self.delta)
        for x, n in self.segments:
            if n < 1:
                raise ValueError("segment lengths must be positive")

    def __len__(self):
        return len(self.segments)

    def segment(self, i: int):
        """Segment i with orbit/periodic completion outside the listed range."""
        M = len(self.segments)
        if self.periodic:
            x, n = self.segments[i % M]
            return x, n
        if 0 <= i < M:
            return self.segments[i]
        if i < 0:
            x0, n0 = self.segments[0]
            return x0.shift(i * n0), n0
        xM, nM = self.segments[-1]
        return xM.shift((i - (M - 1)) * nM), nM

    @property
    def total_length(self) -> int:
        return sum(n for _, n in self.segments)


def c_index(po: PseudoOrbit, i: int) -> int:
    """Cumulative time index: c_0 = 0, c_i = sum_{j<i} n_j for i > 0 and
    c_i = -sum_{j=i}^{-1} n_j for i < 0."""
    if i == 0:
        return 0
    if i > 0:
        return sum(po.segment(j)[1] for j in range(i))
    return -sum(po.segment(j)[1] for j in range(i, 0))


def verify_pseudo(po: PseudoOrbit, delta: float | None = None,
                  window: int = 16) -> bool:
    """Check d(f^{n_i} x_i, x_{i+1}) < delta across all listed junctions
    (plus the wrap junction for periodic pseudo-orbits)."""
    delta = po.delta if delta is None else delta
    M = len(po.segments)
    last = M - 1 if po.periodic else M - 2
    for i in range(0, last + 1):
        x, n = po.segment(i)
        y, _ = po.segment(i + 1)
        d = point_distance(x.shift(n), y, window=window)
        if not d.certified:
            if 2.0 ** (-d.window) >= delta:
                raise ShiftError(
                    f"window {window} too small to certify junction {i} below {delta}"
                )
            continue
        if d.value >= delta:
            return False
    return True


def shadow(po: PseudoOrbit) -> SymbolPoint:
    """The exact shadowing point: concatenation of the segment words.

    Requires a verified pseudo-orbit with delta <= 1/2, which makes every
    junction transition admissible.  The point's provenance records the
    completion used outside the listed range.
    """
    if po.delta > 1.0:
        raise ShiftError("shadow needs delta <= 1 for junction admissibility")
    if not verify_pseudo(po):
        raise ShiftError("not a delta-pseudo-orbit; refusing to shadow")
    segs = [(x, int(n)) for x, n in po.segments]
    M = len(segs)
    lengths = [n for _, n in segs]
    starts = np.concatenate([[0], np.cumsum(lengths)])  # c_0..c_M
    total = int(starts[-1])
    space = segs[0][0].space

    if po.periodic:
        def rule(k, _segs=segs, _starts=starts, _total=total):
            k = k % _total
            i = int(np.searchsorted(_starts, k, side="right")) - 1
            x, _ = _segs[i]
            return x[k - int(_starts[i])]

        prov = f"shadow(periodic, period={total})"
    else:
        x0 = segs[0][0]
        xM, nM = segs[-1]
        cM1 = int(starts[-2])  # c_{M-1}

        def rule(k, _segs=segs, _starts=starts, _x0=x0, _xM=xM, _cM1=cM1,
                 _total=total):
            if k < 0:
                return _x0[k]
            if k >= _total:
                return _xM[k - _cM1]
            i = int(np.searchsorted(_starts, k, side="right")) - 1
            x, _ = _segs[i]
            return x[k - int(_starts[i])]

        prov = "shadow(orbit-completed)"
    return SymbolPoint(space, rule, provenance=prov)


@dataclass
class ShadowReport:
    ok: bool
    worst_margin: float           # min over checks of bound - distance
    worst_location: tuple | None  # (segment index i, in-segment time j)
    checks: int


def verify_shadowing(z: SymbolPoint, po: PseudoOrbit,
                     params: ShadowingParams = ShadowingParams(),
                     horizon: int | None = None, window: int = 24) -> ShadowReport:
    """Check d(f^{c_i+j} z, f^j x_i) < tau * exp(-lam * min(j, n_i - j))
    over every listed segment (up to the optional time horizon)."""
    worst = math.inf
    where = None
    checks = 0
    c = 0
    for i, (x, n) in enumerate(po.segments):
        for j in range(n):
            if horizon is not None and c + j >= horizon:
                break
            bound = params.tau * math.exp(-params.lam * min(j, n - j))
            d = point_distance(z.shift(c + j), x.shift(j), window=window)
            if not d.certified and 2.0 ** (-d.window) >= bound:
                raise ShiftError("window too small to certify shadowing bound")
            checks += 1
            margin = bound - d.value
            if margin < worst:
                worst = margin
                where = (i, j)
        c += n
    return ShadowReport(ok=worst > 0, worst_margin=worst,
                        worst_location=where, checks=checks)


@dataclass
class ClosenessReport:
    ok: bool
    worst_margin: float
    worst_index: int | None


def exponentially_close(x: SymbolPoint, y: SymbolPoint, n: int, tau: float,
                        lam: float, window: int = 24) -> ClosenessReport:
    """Are the orbit segments x..f^n x and y..f^n y exponentially tau-close
    with exponent lam, i.e. d(f^i x, f^i y) < tau e^{-lam min(i, n-i)} for
    0 <= i <= n-1?"""
    worst = math.inf
    where = None
    for i in range(n):
        bound = tau * math.exp(-lam * min(i, n - i))
        d = point_distance(x.shift(i), y.shift(i), window=window)
        if not d.certified and 2.0 ** (-d.window) >= bound:
            raise ShiftError("window too small to certify exponential closeness")
        margin = bound - d.value
        if margin < worst:
            worst = margin
            where = i
    return ClosenessReport(ok=worst > 0, worst_margin=worst, worst_index=where)
