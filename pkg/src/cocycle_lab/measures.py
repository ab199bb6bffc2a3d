"""Ergodic Markov measures on shift spaces and entropy machinery.

A Markov measure is a stochastic matrix P supported on the allowed
transitions together with its stationary vector pi.  Cylinder weights are
exact products, the entropy has the closed form -sum_i pi_i sum_j P_ij log
P_ij, and two-sided stationary samples are drawn lazily and reproducibly
from counter-based per-index uniforms, so a sample point is a deterministic
function of (seed, index) no matter in which order coordinates are read.

The module also implements the separated-set extraction used by the fractal
construction: from a sampled pool restricted to points that return to their
own partition atom inside the window [L, (1+varsigma)L], extract a maximal
separated subset, bucket by return time and atom, and keep the largest
bucket.  Every claimed property of the output is re-verified directly,
independently of how the set was built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .shift_space import (
    BudgetError,
    ShiftSpace,
    SymbolPoint,
    bowen_distance,
    dyadic_exponent,
    full_shift,
    point_distance,
    separation_window,
)

__all__ = [
    "MarkovMeasure",
    "bernoulli",
    "point_mass_measure",
    "CylinderObservable",
    "birkhoff_average",
    "RecurrenceSetSpec",
    "RecurrenceReport",
    "recurrence_membership",
    "KatokEntropy",
    "katok_entropy",
    "KatokSeparated",
    "katok_separated_sets",
    "verify_katok_certificates",
    "entropy_dense_witness",
]

_MASK = (1 << 64) - 1


def _mix64(z: int) -> int:
    z &= _MASK
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return z ^ (z >> 31)


def _seed_int(seed) -> int:
    if isinstance(seed, (tuple, list)):
        acc = 0x243F6A8885A308D3
        for part in seed:
            acc = _mix64(acc ^ _mix64(_seed_int(part)))
        return acc
    if isinstance(seed, str):
        acc = 0x452821E638D01377
        for ch in seed:
            acc = _mix64(acc ^ ord(ch))
        return acc
    return _mix64(int(seed) & _MASK)


def _u01(seed_int: int, index: int) -> float:
    z = _mix64((seed_int + (index + (1 << 62)) * 0x9E3779B97F4A7C15) & _MASK)
    return (z >> 11) * 2.0 ** -53


def _inv_cdf(row: np.ndarray, u: float) -> int:
    acc = 0.0
    for s, p in enumerate(row):
        acc += p
        if u < acc:
            return s
    return int(len(row) - 1)


class MarkovMeasure:
    """Shift-invariant Markov measure supported on the allowed transitions.

    Parameters
    ----------
    space : ShiftSpace
    P : array_like, shape (q, q)
        Row-stochastic, with P[a, b] > 0 only where the transition a -> b is
        allowed.
    pi : array_like, optional
        Stationary vector; computed from P when omitted.  Chains that are
        not irreducible (point masses on a cycle) need an explicit pi.
    """

    def __init__(self, space: ShiftSpace, P, pi=None):
        self.space = space
        P = np.asarray(P, dtype=float)
        q = space.q
        if P.shape != (q, q):
            raise ValueError(f"P must be {q}x{q}")
        if not np.allclose(P.sum(axis=1), 1.0, atol=1e-12):
            raise ValueError("rows of P must sum to 1")
        if ((P > 1e-15) & (space.transitions == 0)).any():
            raise ValueError("P puts mass on a forbidden transition")
        self.P = P
        if pi is None:
            vals, vecs = np.linalg.eig(P.T)
            k = int(np.argmin(np.abs(vals - 1.0)))
            v = np.real(vecs[:, k])
            v = np.abs(v)
            if v.sum() < 1e-12:
                raise ValueError("could not compute a stationary vector; pass pi")
            pi = v / v.sum()
        pi = np.asarray(pi, dtype=float)
        if not np.allclose(pi @ P, pi, atol=1e-10):
            raise ValueError("pi is not stationary for P")
        self.pi = pi / pi.sum()
        # reversed kernel, defined on symbols of positive mass
        self._rev = np.zeros_like(P)
        for a in range(q):
            if self.pi[a] > 0:
                self._rev[a] = self.pi * P[:, a] / self.pi[a]

    def entropy(self) -> float:
        """Exact entropy -sum_i pi_i sum_j P_ij log P_ij."""
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.where(self.P > 0, np.log(np.where(self.P > 0, self.P, 1.0)), 0.0)
        return float(-(self.pi[:, None] * self.P * logs).sum())

    def cylinder_weight(self, word) -> float:
        """mu of the cylinder [word] (stationary, placement-independent)."""
        w = np.asarray(word, dtype=np.int64)
        if w.size == 0:
            return 1.0
        weight = float(self.pi[w[0]])
        if w.size > 1:
            weight *= float(np.prod(self.P[w[:-1], w[1:]]))
        return weight

    def word_weights(self, length: int, cap: int = 2**24) -> np.ndarray:
        """Weights of all q**length words (big-endian index), zeros where
        inadmissible.  Vectorized for the exact Katok-entropy mode."""
        q = self.space.q
        if q ** length > cap:
            raise BudgetError(f"{q ** length} words exceeds cap {cap}")
        w = self.pi.astype(float).copy()
        for _ in range(length - 1):
            last = np.arange(w.size) % q
            w = (w[:, None] * self.P[last, :]).ravel()
        return w

    def sample_point(self, half_window: int, seed) -> SymbolPoint:
        """Two-sided stationary sample, lazily extensible, deterministic in
        (seed, index).  half_window only sets the initially realized range."""
        s0 = _seed_int(seed)
        P, rev, pi = self.P, self._rev, self.pi
        state: dict[int, int] = {0: _inv_cdf(pi, _u01(s0, 0))}
        bounds = [0, 0]  # realized [lo, hi]

        def rule(i: int) -> int:
            if i in state:
                return state[i]
            lo, hi = bounds
            while hi < i:
                hi += 1
                state[hi] = _inv_cdf(P[state[hi - 1]], _u01(s0, hi))
            while lo > i:
                lo -= 1
                state[lo] = _inv_cdf(rev[state[lo + 1]], _u01(s0, lo))
            bounds[0], bounds[1] = lo, hi
            return state[i]

        x = SymbolPoint(self.space, rule, provenance=f"markov-sample")
        x.window(-half_window, half_window)
        return x

    # -- serialization ----------------------------------------------------
    def to_json(self) -> str:
        import json

        return json.dumps(
            {"P": [float(v) for v in self.P.ravel()],
             "pi": [float(v) for v in self.pi]},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, space: ShiftSpace, text: str) -> "MarkovMeasure":
        import json

        doc = json.loads(text)
        q = space.q
        P = np.asarray(doc["P"], dtype=float).reshape(q, q)
        pi = np.asarray(doc["pi"], dtype=float) if "pi" in doc else None
        return cls(space, P, pi)

    def __repr__(self):
        return f"MarkovMeasure(pi={np.round(self.pi, 4).tolist()})"


def bernoulli(p: float, space: ShiftSpace | None = None) -> MarkovMeasure:
    """Bernoulli(p) on the full 2-shift: symbol 0 has mass p."""
    space = space or full_shift()
    if space.q != 2 or not (space.transitions == 1).all():
        raise ValueError("bernoulli(p) is defined on the full 2-shift")
    P = np.array([[p, 1 - p], [p, 1 - p]], dtype=float)
    return MarkovMeasure(space, P, pi=[p, 1 - p])


def point_mass_measure(space: ShiftSpace, symbol: int) -> MarkovMeasure:
    """Point mass on the fixed point symbol^infinity."""
    if not space.allowed(symbol, symbol):
        raise ValueError(f"symbol {symbol} has no self-transition")
    P = np.eye(space.q)
    pi = np.zeros(space.q)
    pi[symbol] = 1.0
    return MarkovMeasure(space, P, pi=pi)


class CylinderObservable:
    """A function constant on forward cylinders of the given depth."""

    def __init__(self, depth: int, table: dict):
        self.depth = depth
        self.table = {tuple(int(s) for s in w): float(v) for w, v in table.items()}

    def __call__(self, x: SymbolPoint, i: int) -> float:
        return self.table[tuple(x.window(i, i + self.depth - 1).tolist())]


def birkhoff_average(phi, x: SymbolPoint, n: int) -> float:
    """(1/n) sum_{i<n} phi(f^i x) for a cylinder observable or callable."""
    if n < 1:
        raise ValueError("n must be positive")
    return sum(phi(x, i) for i in range(n)) / n


@dataclass(frozen=True)
class RecurrenceSetSpec:
    """Window-return target: points whose orbit re-enters their own
    partition atom at some time m in [l, (1+rho) l] for every l >= s.

    The partition is by cylinders on [-partition_depth, partition_depth];
    ``gamma`` optionally restricts to a target set via a predicate.
    """

    partition_depth: int
    s: int
    rho: float
    gamma: object = None


@dataclass
class RecurrenceReport:
    status: str                  # "member" | "non-member" | "indeterminate"
    certified_to: int            # largest l-range endpoint actually checked
    witness: int | None = None   # l with no return, for non-members


def recurrence_membership(spec: RecurrenceSetSpec, x: SymbolPoint,
                          horizon: int) -> RecurrenceReport:
    """Certify window-return membership up to the horizon.

    Membership is only ever horizon-certified: a "member" verdict means
    every l with s <= l and (1+rho) l <= horizon has a return.  A missing
    return at any such l is a definitive non-member verdict.
    """
    if spec.gamma is not None and not spec.gamma(x):
        return RecurrenceReport(status="non-member", certified_to=0, witness=None)
    wp = spec.partition_depth
    atom = x.window(-wp, wp)
    l_hi = int(math.floor(horizon / (1.0 + spec.rho)))
    if l_hi < spec.s:
        return RecurrenceReport(status="indeterminate", certified_to=0)
    for l in range(spec.s, l_hi + 1):
        m_hi = int(math.floor((1.0 + spec.rho) * l))
        hit = any(
            np.array_equal(x.window(m - wp, m + wp), atom)
            for m in range(l, m_hi + 1)
        )
        if not hit:
            return RecurrenceReport(status="non-member", certified_to=l, witness=l)
    return RecurrenceReport(status="member", certified_to=l_hi)


@dataclass
class KatokEntropy:
    """Finite-depth entropy estimate from minimal ball-cover counts.

    ``table`` holds (l, N_l) with N_l the minimal number of d_l-balls of
    radius eps whose union has measure at least 1 - rho; the slope is a
    least-squares fit of log N_l over the final third of depths, and
    ``tolerance`` is half the spread of consecutive secants on the fit
    window (zero when the growth is exactly geometric).
    """

    slope: float
    tolerance: float
    table: list
    eps: float
    rho: float
    fit_window: tuple

    def to_rows(self):
        return [(l, n, math.log(n) / l) for l, n in self.table]


def _greedy_cover_count(weights: np.ndarray, need: float) -> int:
    order = np.sort(weights[weights > 0])[::-1]
    acc = np.cumsum(order)
    k = int(np.searchsorted(acc, need - 1e-12))
    return min(k + 1, order.size)


def katok_entropy(mu: MarkovMeasure, eps: float, rho: float = 0.1,
                  l_max: int = 20, mode: str = "exact", seed=0,
                  samples: int = 20000, cap: int = 2**24) -> KatokEntropy:
    """Growth rate of minimal (1-rho)-mass covers by dynamical balls.

    At dyadic eps = 2^-m an open d_l-ball is exactly a cylinder on
    [-m, l-1+m], so in exact mode N_l is computed by a greedy scan of all
    cylinder weights in decreasing order, which is optimal because the balls
    are the atoms of a partition.  Monte Carlo mode replaces the weights by
    empirical word frequencies of seeded samples.
    """
    m = dyadic_exponent(eps)
    if not 0 < rho < 1:
        raise ValueError("rho must be in (0, 1)")
    table = []
    for l in range(1, l_max + 1):
        length = l + 2 * m
        if mode == "exact":
            w = mu.word_weights(length, cap=cap)
        elif mode == "mc":
            s0 = _seed_int((seed, l))
            counts: dict[tuple, int] = {}
            for k in range(samples):
                x = mu.sample_point(half_window=length + 2, seed=(s0, k))
                key = tuple(x.window(-m, l - 1 + m).tolist())
                counts[key] = counts.get(key, 0) + 1
            w = np.asarray(sorted(counts.values(), reverse=True), float) / samples
        else:
            raise ValueError(f"unknown mode {mode!r}")
        table.append((l, _greedy_cover_count(w, 1.0 - rho)))
    width = max(2, int(math.ceil(l_max / 3)))
    fit = [(l, math.log(n)) for l, n in table[-width:]]
    ls = np.array([l for l, _ in fit], float)
    ys = np.array([y for _, y in fit], float)
    slope = float(((ls - ls.mean()) * (ys - ys.mean())).sum()
                  / ((ls - ls.mean()) ** 2).sum())
    secants = np.diff(ys) / np.diff(ls)
    tol = float((secants.max() - secants.min()) / 2) if secants.size > 1 else 0.0
    return KatokEntropy(slope=slope, tolerance=tol, table=table, eps=eps,
                        rho=rho, fit_window=(int(ls[0]), int(ls[-1])))


@dataclass
class KatokSeparated:
    """Output of the separated-set extraction, with enough context to
    re-verify all three certified properties from scratch."""

    n: int
    points: list             # SymbolPoints, one per kept word
    words: list              # separation-window words of the kept points
    atom: tuple              # shared partition atom on [-atom_depth, atom_depth]
    atom_depth: int
    T_star: int
    sep_eps: float
    delta: float
    varsigma: float
    pool_size: int
    pool_kept: int           # pool members certified to return in the window
    seed: object


def katok_separated_sets(mu: MarkovMeasure, gamma=None, *, delta: float = 0.5,
                         varsigma: float = 0.1, sep_eps: float = 0.5,
                         n_floor: int | None = None, pool_size: int = 4096,
                         seed=0) -> KatokSeparated:
    """Extract an (n, sep_eps)-separated set with atom-return structure.

    Builds the cylinder partition of strict diameter < delta/2, samples a
    candidate pool from mu (restricted by the optional membership predicate
    ``gamma``), keeps points certified to return to their own atom at some
    time in [L, (1+varsigma) L], extracts a maximal separated subset, and
    returns the largest (return time, atom) bucket.  T_star is the
    partition cardinality.

    The returned set satisfies, re-verifiably: (1) each point returns to the
    target at time n (horizon-certified), (2) any two members x, y have
    d(f^n x, y) < delta, and (3) the count bound of
    ``verify_katok_certificates`` against a Katok entropy estimate at the
    same separation radius.
    """
    space = mu.space
    e = dyadic_exponent(delta)
    wp = e + 1  # atoms on [-wp, wp] have strict pairwise distance <= 2^-(wp+1) < delta/2
    msep = dyadic_exponent(sep_eps)
    T_star = space.word_count(2 * wp + 1)
    L = max(n_floor or 1, int(math.ceil(1.0 / varsigma)))
    slots = list(range(L, int(math.floor((1.0 + varsigma) * L)) + 1))
    horizon = slots[-1] + wp
    half = horizon + msep + 4

    kept = []
    for j in range(pool_size):
        x = mu.sample_point(half_window=half, seed=(_seed_int(seed), j))
        if gamma is not None and not gamma(x):
            continue
        atom = tuple(x.window(-wp, wp).tolist())
        returns = [l for l in slots
                   if tuple(x.window(l - wp, l + wp).tolist()) == atom]
        if returns:
            kept.append((x, atom, returns))

    if not kept:
        raise BudgetError("candidate pool is empty: no sampled point returned "
                          "to its atom inside the window; enlarge the pool or "
                          "relax varsigma")

    a, b = separation_window(L, msep)
    D: dict[tuple, tuple] = {}
    for x, atom, returns in kept:
        key = tuple(x.window(a, b).tolist())
        if key not in D:
            D[key] = (x, atom, returns)

    buckets: dict[tuple, list] = {}
    for key in sorted(D):
        x, atom, returns = D[key]
        for l in returns:
            buckets.setdefault((l, atom), []).append((key, x))

    def bucket_rank(item):
        (l, atom), members = item
        return (-len(members), l, atom)

    (n, atom), members = min(buckets.items(), key=bucket_rank)
    words = [key for key, _ in members]
    points = [x for _, x in members]
    return KatokSeparated(n=n, points=points, words=words, atom=atom,
                          atom_depth=wp, T_star=T_star, sep_eps=sep_eps,
                          delta=delta, varsigma=varsigma, pool_size=pool_size,
                          pool_kept=len(kept), seed=seed)


@dataclass
class KatokCertReport:
    ok: bool
    returns_ok: bool
    delta_ok: bool
    separation_ok: bool
    count_lhs: float
    count_rhs: float
    details: str = ""


def verify_katok_certificates(result: KatokSeparated, mu: MarkovMeasure,
                              h_estimate: KatokEntropy, gamma=None
                              ) -> KatokCertReport:
    """Re-verify the three certified properties directly from the output.

    The count bound is the estimator-tolerance-adjusted form

        (1/n) log(T_star #E_n) >= h(1 - vs) - (2 + 2 vs) vs - tol,

    with h and tol taken from the supplied Katok entropy estimate at the
    same separation radius.
    """
    n, wp = result.n, result.atom_depth
    atom = np.asarray(result.atom, dtype=np.int8)
    returns_ok = all(
        np.array_equal(x.window(n - wp, n + wp), atom)
        and (gamma is None or gamma(x.shift(n)))
        for x in result.points
    )
    delta_ok = True
    separation_ok = True
    pts = result.points
    for i in range(len(pts)):
        for j in range(len(pts)):
            if i == j:
                continue
            d = point_distance(pts[i].shift(n), pts[j], window=wp + 4)
            if d.certified and d.value >= result.delta:
                delta_ok = False
            if j > i:
                sep = bowen_distance(pts[i], pts[j], n,
                                     window=dyadic_exponent(result.sep_eps) + 2)
                if not (sep.certified and sep.value > result.sep_eps):
                    separation_ok = False
    vs = result.varsigma
    h = h_estimate.slope
    lhs = math.log(result.T_star * len(pts)) / n
    rhs = h * (1 - vs) - (2 + 2 * vs) * vs - h_estimate.tolerance
    ok = returns_ok and delta_ok and separation_ok and lhs >= rhs
    return KatokCertReport(ok=ok, returns_ok=returns_ok, delta_ok=delta_ok,
                           separation_ok=separation_ok, count_lhs=lhs,
                           count_rhs=rhs)


@dataclass
class WitnessReport:
    witness: MarkovMeasure | None
    witness_entropy: float | None
    witness_mle: float | None
    best_entropy: float
    candidates: list  # (entropy, mle) per grid measure


def entropy_dense_witness(candidates, A, entropy_target: float,
                          constraint=None, n_max: int = 6,
                          tol: float = 1e-9) -> WitnessReport:
    """Search a family of Markov measures for one of high entropy whose
    measure MLE satisfies a constraint.

    ``constraint`` is a callable (chi, all_chis) -> bool; the default asks
    for chi strictly above the family infimum.  Without a qualifying
    measure, the best entropy found is still reported.
    """
    from .cocycle import mle_of_measure

    rows = []
    for mu in candidates:
        rows.append((mu.entropy(), mle_of_measure(A, mu, n_max).value, mu))
    chis = [chi for _, chi, _ in rows]
    if constraint is None:
        constraint = lambda chi, all_chis: chi > min(all_chis) + 1e-9
    qualifying = [(h, chi, mu) for h, chi, mu in rows
                  if h >= entropy_target - tol and constraint(chi, chis)]
    best = max(h for h, _, _ in rows)
    if not qualifying:
        return WitnessReport(witness=None, witness_entropy=None,
                             witness_mle=None, best_entropy=best,
                             candidates=[(h, chi) for h, chi, _ in rows])
    h, chi, mu = max(qualifying, key=lambda r: r[0])
    return WitnessReport(witness=mu, witness_entropy=h, witness_mle=chi,
                         best_entropy=best,
                         candidates=[(h2, c2) for h2, c2, _ in rows])
