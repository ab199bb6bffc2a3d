"""Fractal gluing schemes and their finite-depth entropy certificates.

Given two ergodic Markov measures whose cocycle exponents differ (a > b),
the scheme glues alternating levels of separated orbit blocks: level k uses
N_k repetitions of blocks drawn from the measure mu_{g(k)} with
g(k) = (k+1) mod 2 + 1, joined by mixing bridges of length N, with
checkpoint times

    t_k = sum_{i<=k} N_i n_i + k N.

Points assembled from block choices shadow the glued pseudo-orbit exactly
(shift concatenation), so their finite-time exponents alternate: odd
checkpoints approach the larger exponent a, even checkpoints the smaller b,
and once the levels dominate the backlog the odd floor exceeds the even
ceiling, certifying divergence at the realized depth.

In full mode the level choices generate the point family T_k (one point per
choice vector); the uniform measures on T_k obey the combinatorial ball
bound

    omega_{k+p}(B) <= (#T_k)^-1 (#S_{k+1})^-j,

re-verified here by exhaustive enumeration, and they certify the
entropy-distribution lower bound s = h* - 5 gamma for the realized depth.
Light mode (N_k = 1, fast-growing n_k) is for long-horizon divergence runs
only; it cannot support the ball certificates and the builder enforces that
restriction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .cocycle import CocycleSpec, mle_checkpoints, mle_of_measure
from .measures import MarkovMeasure, katok_separated_sets
from .shadowing import PseudoOrbit, shadow, verify_pseudo
from .shift_space import (
    BudgetError,
    ShiftError,
    SymbolPoint,
    ball_window,
    dyadic_exponent,
)

__all__ = [
    "DichotomyError",
    "SchemeParams",
    "Level",
    "FractalScheme",
    "choose_parameters",
    "build_scheme",
    "construct_point",
    "DivergenceReport",
    "divergence_checkpoints",
    "OmegaBallReport",
    "omega_ball_bound",
    "BallSweep",
    "sweep_ball_bounds",
    "EDPCertificate",
    "edp_lower_bound",
    "packing_lower_bound",
]


class DichotomyError(Exception):
    """The supplied measures share their maximal exponent; the construction
    needs a > b.  Mirrors the first alternative of the dichotomy."""


@dataclass
class SchemeParams:
    """Parameters of a gluing scheme, with their consistency conditions.

    ``epsilon`` is the Lyapunov-metric epsilon (continuous); ``ball_eps``
    and ``sep_eps`` are the dyadic ball and separation radii (ratio 4 by
    default); ``delta`` is the pseudo-orbit jump size; ``bridge_len`` is
    the bridge length N; ``T_star`` the partition cardinality.
    """

    mu1: MarkovMeasure
    mu2: MarkovMeasure
    a: float                     # exponent of mu1 (the larger one)
    b: float                     # exponent of mu2
    gamma: float
    epsilon: float
    varsigma: float = 0.1
    rho: float = 0.1
    l: float = 8.0
    eta: float = 0.5
    tau: float = 2.0
    lam: float = math.log(2.0)
    delta: float = 0.5
    ball_eps: float = 0.125
    sep_eps: float = 0.5
    bridge_len: int = 0
    T_star: int = 0
    n1: int = 0
    n2: int = 0
    h1: float = 0.0
    h2: float = 0.0
    holder_alpha: float = 1.0

    @property
    def h_star(self) -> float:
        return min(self.h1, self.h2)

    @property
    def big_h_star(self) -> float:
        return max(self.h1, self.h2)

    def validate(self) -> None:
        if self.a <= self.b:
            raise DichotomyError("measures not MLE-distinguished (a <= b)")
        if not 0 < self.epsilon < (self.a - self.b) / 8:
            raise ValueError("epsilon must lie in (0, (a-b)/8)")
        if self.lam <= self.epsilon / self.holder_alpha:
            raise ValueError("need lambda > epsilon / alpha")
        if not self.b + 2 * self.epsilon < self.a - 3 * self.epsilon:
            raise ValueError("epsilon fails b + 2 eps < a - 3 eps")
        dyadic_exponent(self.ball_eps)
        dyadic_exponent(self.sep_eps)
        if self.bridge_len < 1:
            raise ValueError("bridge length must be positive")

    def n1_conditions(self, n1: int) -> bool:
        hs = self.h_star
        return (n1 * self.gamma > (hs - 3 * self.gamma) * self.bridge_len
                and 2.0 < math.exp(n1 * self.epsilon))

    def n2_conditions(self, n2: int) -> bool:
        return self.l ** 2 * math.exp(self.l) < math.exp(n2 * self.epsilon)

    def measure_label(self, k: int) -> int:
        return (k + 1) % 2 + 1

    def measure_for_level(self, k: int) -> MarkovMeasure:
        return self.mu1 if self.measure_label(k) == 1 else self.mu2

    def entropy_for_level(self, k: int) -> float:
        return self.h1 if self.measure_label(k) == 1 else self.h2


def choose_parameters(A: CocycleSpec, mu1: MarkovMeasure, mu2: MarkovMeasure,
                      gamma: float, *, n_mle: int = 8,
                      regularity_l: float | None = None) -> SchemeParams:
    """Derive consistent scheme parameters from the two measures.

    Exponents a, b come from exact measure integrals; ``epsilon`` defaults
    to (a - b)/16; the bridge length is the mixing gap at the junction
    context depth; n1, n2 are the minimal block lengths meeting their
    growth conditions (n2 is large whenever the regularity level l is not
    tiny: the condition l^2 e^l < e^{n2 eps} forces n2 >= (2 log l + l)/eps,
    which is why certificate-grade runs use explicit overrides).  Raises
    DichotomyError when a <= b.
    """
    space = A.space
    a = mle_of_measure(A, mu1, n_mle).value
    b = mle_of_measure(A, mu2, n_mle).value
    if a <= b + 8e-12:
        raise DichotomyError(
            f"measures not MLE-distinguished: a = {a:.6f} <= b = {b:.6f}"
        )
    eps = (a - b) / 16
    w = dyadic_exponent(0.5)  # junction context depth for delta = 1/2
    params = SchemeParams(
        mu1=mu1, mu2=mu2, a=a, b=b, gamma=gamma, epsilon=eps,
        h1=mu1.entropy(), h2=mu2.entropy(),
        l=regularity_l if regularity_l is not None else 8.0,
        holder_alpha=A.holder_alpha,
    )
    params.bridge_len = space.mixing_gap(depth=w)
    atom_depth = w + 1
    params.T_star = space.word_count(2 * atom_depth + 1)
    n1 = 1
    while not params.n1_conditions(n1):
        n1 += 1
    params.n1 = n1
    n2 = 1
    while not params.n2_conditions(n2):
        n2 += 1
    params.n2 = n2
    params.validate()
    return params


@dataclass
class Level:
    k: int                      # 1-based level index
    n: int                      # block length n_k
    N: int                      # repetition count N_k
    blocks: list                # block SymbolPoints (separated-set members)
    measure_label: int          # 1 or 2
    achieved: int               # separated-set size before trimming
    count_target: float         # exp((h_k - 3 gamma) n_k)
    count_ok: bool


@dataclass
class FractalScheme:
    """Realized gluing data: levels, bridge plan and checkpoint times."""

    params: SchemeParams
    mode: str                   # "full" | "light"
    levels: list

    @property
    def depth(self) -> int:
        return len(self.levels)

    def t(self, k: int) -> int:
        """Checkpoint time t_k = sum_{i<=k} N_i n_i + k N."""
        if not 0 <= k <= self.depth:
            raise ValueError("level out of range")
        return (sum(lv.N * lv.n for lv in self.levels[:k])
                + k * self.params.bridge_len)

    @property
    def t_table(self) -> list:
        return [self.t(k) for k in range(self.depth + 1)]

    def points_total(self, depth: int | None = None) -> int:
        """#T_depth = product over levels of (#S_i)^N_i."""
        depth = self.depth if depth is None else depth
        total = 1
        for lv in self.levels[:depth]:
            total *= len(lv.blocks) ** lv.N
        return total

    def choice_space(self, depth: int | None = None):
        """All choice vectors ((level-1 picks), ..., (level-depth picks))."""
        from itertools import product as iproduct

        depth = self.depth if depth is None else depth
        per_level = [
            list(iproduct(range(len(lv.blocks)), repeat=lv.N))
            for lv in self.levels[:depth]
        ]
        return [tuple(c) for c in iproduct(*per_level)]

    def to_json(self) -> str:
        doc = {
            "mode": self.mode,
            "bridge_len": self.params.bridge_len,
            "gamma": self.params.gamma,
            "epsilon": self.params.epsilon,
            "ball_eps": self.params.ball_eps,
            "sep_eps": self.params.sep_eps,
            "h_star": self.params.h_star,
            "t_table": self.t_table,
            "levels": [
                {
                    "k": lv.k,
                    "n": lv.n,
                    "N": lv.N,
                    "measure": lv.measure_label,
                    "count_ok": bool(lv.count_ok),
                    "blocks": ["".join(str(s) for s in
                                       b.window(0, lv.n - 1).tolist())
                               for b in lv.blocks],
                }
                for lv in self.levels
            ],
        }
        return json.dumps(doc, sort_keys=True, indent=1)


def _default_N_schedule(t_so_far: int, k: int) -> int:
    """N_{k+1} = 2^{k+1} t_k: each level dominates the whole backlog."""
    return max(1, 2 ** (k + 1) * t_so_far)


def _first_diff(u: tuple, v: tuple) -> int:
    for i, (s, r) in enumerate(zip(u, v)):
        if s != r:
            return i
    return len(u)


def _trim_blocks(blocks: list, cap: int, n: int) -> list:
    """Keep ``cap`` blocks whose words split as early as possible.

    Early pairwise divergence makes dynamical balls around assembled points
    separate sooner, tightening measured masses against their combinatorial
    bounds.  Deterministic: sort by word, then greedily minimize the
    earliest pairwise split.
    """
    if len(blocks) <= cap:
        return blocks
    words = sorted((tuple(b.window(0, n - 1).tolist()), b) for b in blocks)
    best = None
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            d = _first_diff(words[i][0], words[j][0])
            if best is None or d < best[0]:
                best = (d, i, j)
    chosen = [best[1], best[2]]
    while len(chosen) < cap:
        scored = []
        for i in range(len(words)):
            if i in chosen:
                continue
            worst = min(_first_diff(words[i][0], words[c][0]) for c in chosen)
            scored.append((worst, words[i][0], i))
        scored.sort()
        chosen.append(scored[0][2])
    return [words[i][1] for i in sorted(chosen)]


def build_scheme(params: SchemeParams, depth: int, mode: str = "full", *,
                 seed=0, pool_size: int = 4096,
                 n_requests: list | None = None,
                 N_overrides: list | None = None,
                 size_caps: list | None = None,
                 light_n0: int = 4, light_ratio: int = 4,
                 enumeration_cap: int = 200_000) -> FractalScheme:
    """Assemble the level data of a gluing scheme.

    Full mode extracts each level's blocks with the separated-set algorithm
    on the level's measure (block length at least the request, which
    defaults to n1/n2) and repeats them N_k times, following the schedule
    N_{k+1} = 2^{k+1} t_k unless overridden; ``size_caps`` trims each
    level's block set, preferring early-splitting representatives.  Light
    mode uses every level exactly once with n_k = light_n0 * light_ratio^k.

    The count condition #S_k >= exp((h_k - 3 gamma) n_k) is evaluated and
    recorded per level; a shortfall is reported in the level data, not
    raised.
    """
    params.validate()
    if mode not in ("full", "light"):
        raise ValueError(f"unknown mode {mode!r}")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    levels: list[Level] = []
    t_so_far = 0
    for k in range(1, depth + 1):
        label = params.measure_label(k)
        mu = params.measure_for_level(k)
        h_k = params.entropy_for_level(k)
        if mode == "light":
            n_k = (n_requests[k - 1] if n_requests
                   else light_n0 * light_ratio ** k)
            N_k = 1
            blocks = [mu.sample_point(half_window=n_k + 32,
                                      seed=(seed, "light", k))]
            achieved = 1
        else:
            want = (n_requests[k - 1] if n_requests
                    else (params.n1 if label == 1 else params.n2))
            N_k = (N_overrides[k - 1] if N_overrides
                   else _default_N_schedule(t_so_far, k - 1))
            res = katok_separated_sets(
                mu, delta=params.delta, varsigma=params.varsigma,
                sep_eps=params.sep_eps, n_floor=want, pool_size=pool_size,
                seed=(seed, k),
            )
            n_k = res.n
            blocks = res.points
            achieved = len(blocks)
            if size_caps and size_caps[k - 1] is not None:
                blocks = _trim_blocks(blocks, size_caps[k - 1], n_k)
        target = math.exp((h_k - 3 * params.gamma) * n_k)
        levels.append(Level(k=k, n=n_k, N=N_k, blocks=blocks,
                            measure_label=label, achieved=achieved,
                            count_target=target,
                            count_ok=len(blocks) >= target))
        t_so_far += N_k * n_k + params.bridge_len
        if mode == "full":
            total = 1
            for lv in levels:
                total *= len(lv.blocks) ** lv.N
            if total > enumeration_cap:
                raise BudgetError(
                    f"#T_{k} = {total} exceeds the enumeration cap "
                    f"{enumeration_cap}"
                )
    return FractalScheme(params=params, mode=mode, levels=levels)


def _bridge_point(space, out_block: SymbolPoint, n_out: int,
                  in_block: SymbolPoint, N: int, w: int) -> SymbolPoint:
    """A point whose orbit runs the bridge: it continues the outgoing
    block's orbit for w+1 symbols, crosses with the lexicographically
    smallest admissible connector, and enters the incoming block through
    its own past w symbols, so both junction jumps stay below 2^-w."""
    if N < 2 * w + 1:
        raise ShiftError(f"bridge length {N} below junction contexts {2*w+1}")
    head = tuple(out_block.window(n_out, n_out + w).tolist())
    tail = tuple(in_block.window(-w, -1).tolist()) if w else ()
    mid = space.bridge(head, tail + (in_block[0],), N - len(head) - len(tail))
    word = head + mid + tail

    def rule(i, _out=out_block, _in=in_block, _word=word, _N=N, _n=n_out):
        if i < 0:
            return _out[_n + i]
        if i < _N:
            return _word[i]
        return _in[i - _N]

    return SymbolPoint(space, rule, provenance="bridge")


def _assemble_pseudo_orbit(scheme: FractalScheme, choices) -> PseudoOrbit:
    """The glued pseudo-orbit of a choice vector, bridges included."""
    params = scheme.params
    space = params.mu1.space
    w = dyadic_exponent(params.delta)
    N = params.bridge_len
    segs = []
    prev = None  # (block point, block length)
    for lv, level_choices in zip(scheme.levels, choices):
        if len(level_choices) != lv.N:
            raise ValueError(f"level {lv.k} needs {lv.N} choices")
        for j, c in enumerate(level_choices):
            block = lv.blocks[c]
            if prev is not None and j == 0:
                segs.append((_bridge_point(space, prev[0], prev[1], block,
                                           N, w), N))
            segs.append((block, lv.n))
            prev = (block, lv.n)
    return PseudoOrbit(segments=segs, delta=params.delta)


def construct_point(scheme: FractalScheme, choices) -> SymbolPoint:
    """The shadowing point of the glued pseudo-orbit for a choice vector.

    ``choices`` picks one block of S_k for each of the N_k slots at every
    level; the result's provenance records the picks.
    """
    po = _assemble_pseudo_orbit(scheme, choices)
    if not verify_pseudo(po):
        raise ShiftError("assembled segments do not form a delta-pseudo-orbit")
    z = shadow(po)
    z.provenance = f"scheme-point{tuple(choices)!r}"
    return z


@dataclass
class DivergenceReport:
    """Checkpoint exponents with the finite-depth irregularity verdict."""

    times: list
    values: list
    odd_floor: float
    even_ceiling: float
    irregular: bool
    backlog_slack: list         # per checkpoint: backlog share * log C
    a_target: float
    b_target: float

    def rows(self):
        return list(zip(self.times, self.values))


def divergence_checkpoints(A: CocycleSpec, p: SymbolPoint,
                           scheme: FractalScheme,
                           K: int | None = None) -> DivergenceReport:
    """(1/t_k) log ||A(p, t_k)|| at every checkpoint, with the verdict.

    Odd levels pull toward the larger exponent, even levels toward the
    smaller; the point is flagged irregular when the odd minimum exceeds
    the even maximum.  The reported slack bounds the influence of
    everything before the current level: (t_{k-1} + k N)/t_k * log C.
    """
    params = scheme.params
    K = scheme.depth if K is None else K
    if K < 1:
        raise ValueError("need at least one checkpoint")
    times = [scheme.t(k) for k in range(1, K + 1)]
    values = mle_checkpoints(A, p, times)
    slack = [
        (scheme.t(k - 1) + k * params.bridge_len) / scheme.t(k)
        * math.log(A.bound)
        for k in range(1, K + 1)
    ]
    odd = [float(v) for k, v in zip(range(1, K + 1), values) if k % 2 == 1]
    even = [float(v) for k, v in zip(range(1, K + 1), values) if k % 2 == 0]
    floor = min(odd) if odd else math.nan
    ceil = max(even) if even else math.nan
    verdict = bool(odd and even and floor > ceil)
    return DivergenceReport(times=times, values=[float(v) for v in values],
                            odd_floor=floor, even_ceiling=ceil,
                            irregular=verdict, backlog_slack=slack,
                            a_target=params.a, b_target=params.b)


# ---------------------------------------------------------------------------
# Ball-mass certificates (full mode)


def _family_windows(scheme: FractalScheme, depth: int, a: int, b: int):
    """The T_depth points and their windows on [a, b]."""
    pts = [construct_point(scheme, c) for c in scheme.choice_space(depth)]
    wins = np.stack([z.window(a, b) for z in pts])
    return pts, wins


def _pairwise_agreement(wins: np.ndarray) -> np.ndarray:
    """agree[i, j] = length of the common prefix of rows i and j."""
    total, width = wins.shape
    diff = wins[:, None, :] != wins[None, :, :]
    any_diff = diff.any(axis=2)
    first = diff.argmax(axis=2)
    return np.where(any_diff, first, width)


def _mass_profile(scheme: FractalScheme, depth: int, radius: float,
                  horizon: int):
    """masses[c, n-1] = omega_depth(B_n(z_c, radius)) for every center z_c
    in T_depth and every n <= horizon, by exact window comparison."""
    m = dyadic_exponent(radius)
    a, b = ball_window(horizon, m)
    _, wins = _family_windows(scheme, depth, a, b)
    agree = _pairwise_agreement(wins)
    total = wins.shape[0]
    masses = np.empty((total, horizon))
    for n in range(1, horizon + 1):
        need = (n - 1 + m) - a + 1  # required agreement length for B_n
        masses[:, n - 1] = (agree >= need).mean(axis=1)
    return masses


@dataclass
class OmegaBallReport:
    n: int
    k: int
    j: int
    mass: float
    raw_bound: float
    exp_bound: float
    count: int
    total: int

    @property
    def ok(self) -> bool:
        return self.mass <= self.raw_bound + 1e-12


def _block_index(scheme: FractalScheme, k: int, n: int) -> int:
    """j with t_k + n_{k+1} j <= n < t_k + n_{k+1} (j+1), clamped to the
    level; bridge-zone times reuse the last pre-bridge index."""
    if k >= scheme.depth:
        return 0
    lv = scheme.levels[k]  # level k+1, 1-based
    n_eff = min(n, scheme.t(k + 1) - scheme.params.bridge_len - 1)
    return int(max(0, min((n_eff - scheme.t(k)) // lv.n, lv.N - 1)))


def omega_ball_bound(scheme: FractalScheme, k: int, p_extra: int,
                     q: SymbolPoint, n: int, eps: float) -> OmegaBallReport:
    """Exact mass of the depth-(k + p_extra) uniform measure on B_n(q, eps)
    against the combinatorial bound (#T_k)^-1 (#S_{k+1})^-j and the
    exponential form exp(-n (h* - 5 gamma))."""
    if scheme.mode != "full":
        raise ShiftError("ball certificates need a full-mode scheme")
    depth = k + p_extra
    if depth > scheme.depth:
        raise ValueError("scheme too shallow for the requested depth")
    if not scheme.t(k) <= n:
        raise ValueError(f"need t_k <= n (t_{k} = {scheme.t(k)}, n = {n})")
    m = dyadic_exponent(eps)
    a, b = ball_window(n, m)
    qa = np.asarray(q.window(a, b))
    _, wins = _family_windows(scheme, depth, a, b)
    count = int((wins == qa[None, :]).all(axis=1).sum())
    total = wins.shape[0]
    j = _block_index(scheme, k, n)
    raw = 1.0 / scheme.points_total(k)
    if k < scheme.depth:
        raw /= len(scheme.levels[k].blocks) ** j
    expb = math.exp(-n * (scheme.params.h_star - 5 * scheme.params.gamma))
    return OmegaBallReport(n=n, k=k, j=j, mass=count / total, raw_bound=raw,
                           exp_bound=expb, count=count, total=total)


@dataclass
class BallSweep:
    """Exhaustive ball-bound verification over all realized centers.

    For every center z in T_depth and every time n in the range, compares
    the measured mass of B_n(z, radius) with the combinatorial bound
    (#T_k)^-1 (#S_{k+1})^-j; ``raw_violations`` collects (center, n) pairs
    that exceed it.  ``worst_exp_margin`` is min over checks of
    log(exp-bound / mass) at the rate s, when a rate is supplied.
    """

    radius: float
    depth: int
    n_lo: int
    n_hi: int
    checks: int
    raw_violations: list
    worst_raw_slack: float
    rate: float | None = None
    worst_exp_margin: float = math.inf
    exp_violations: int = 0


def sweep_ball_bounds(scheme: FractalScheme, radius: float | None = None,
                      depth: int | None = None, rate: float | None = None,
                      n_lo: int = 1, n_hi: int | None = None) -> BallSweep:
    """Verify the combinatorial ball bound exhaustively, sharing one window
    enumeration across all centers and times (much faster than repeated
    omega_ball_bound calls)."""
    if scheme.mode != "full":
        raise ShiftError("ball certificates need a full-mode scheme")
    params = scheme.params
    radius = params.ball_eps if radius is None else radius
    depth = scheme.depth if depth is None else depth
    n_hi = scheme.t(depth) - 1 if n_hi is None else n_hi
    masses = _mass_profile(scheme, depth, radius, n_hi)
    t_table = [scheme.t(k) for k in range(depth + 1)]
    raw_violations = []
    worst_raw = math.inf
    worst_exp = math.inf
    exp_violations = 0
    checks = 0
    for n in range(n_lo, n_hi + 1):
        k = max(i for i in range(depth) if t_table[i] <= n)
        raw = 1.0 / scheme.points_total(k)
        raw /= len(scheme.levels[k].blocks) ** _block_index(scheme, k, n)
        for ci in range(masses.shape[0]):
            mass = masses[ci, n - 1]
            checks += 1
            slack = math.log(raw / mass) if mass > 0 else math.inf
            worst_raw = min(worst_raw, slack)
            if mass > raw + 1e-12:
                raw_violations.append((ci, n))
            if rate is not None:
                margin = (-n * rate - math.log(mass)) if mass > 0 else math.inf
                worst_exp = min(worst_exp, margin)
                if margin < -1e-12:
                    exp_violations += 1
    return BallSweep(radius=radius, depth=depth, n_lo=n_lo, n_hi=n_hi,
                     checks=checks, raw_violations=raw_violations,
                     worst_raw_slack=worst_raw, rate=rate,
                     worst_exp_margin=worst_exp,
                     exp_violations=exp_violations)


@dataclass
class EDPCertificate:
    """Verified premise set for an entropy-distribution lower bound.

    ``value`` is the certified rate s; the verified premise is that every
    enumerated ball of radius 2 * eps centered on a realized scheme point
    has depth-omega mass at most exp(-n s) for all n in [n_min, horizon]
    (an arbitrary-center ball of radius eps meeting the family sits inside
    such a doubled ball).
    """

    value: float
    eps: float
    n_min: int
    horizon: int
    depth: int
    balls_checked: int
    worst_margin: float          # min over checks of log(bound / mass)
    granted: bool
    refused_at: tuple | None = None


def _certify_rate(scheme: FractalScheme, depth: int, eps: float, s: float,
                  times) -> EDPCertificate:
    horizon = max(times)
    masses = _mass_profile(scheme, depth, 2 * eps, horizon)
    worst = math.inf
    refused = None
    checked = 0
    for ci in range(masses.shape[0]):
        for n in times:
            mass = masses[ci, n - 1]
            checked += 1
            margin = (-n * s - math.log(mass)) if mass > 0 else math.inf
            if margin < worst:
                worst = margin
            if margin < -1e-12 and refused is None:
                refused = (ci, n)
    return EDPCertificate(value=s, eps=eps, n_min=min(times), horizon=horizon,
                          depth=depth, balls_checked=checked,
                          worst_margin=worst, granted=refused is None,
                          refused_at=refused)


def edp_lower_bound(scheme: FractalScheme, gamma: float | None = None,
                    eps: float | None = None, depth: int | None = None,
                    n_min: int = 1) -> EDPCertificate:
    """Certify the entropy-distribution premise at rate s = h* - 5 gamma.

    Enumerates all balls of radius 2 * eps centered at realized points of
    T_depth for every time n in [n_min, t_depth - 1] and verifies the mass
    bound exp(-n s) with constant 1.  Any violating ball refuses the
    certificate and is reported.
    """
    if scheme.mode != "full":
        raise ShiftError("the entropy-distribution certificate needs full mode")
    params = scheme.params
    gamma = params.gamma if gamma is None else gamma
    eps = params.ball_eps if eps is None else eps
    depth = scheme.depth if depth is None else depth
    s = params.h_star - 5 * gamma
    times = range(n_min, scheme.t(depth))
    return _certify_rate(scheme, depth, eps, s, list(times))


def packing_lower_bound(scheme: FractalScheme, gamma: float | None = None,
                        eps: float | None = None,
                        depth: int | None = None) -> EDPCertificate:
    """Packing-side certificate at rate H* - 4 gamma, checked at the odd
    checkpoint times t_k (the high-entropy levels)."""
    if scheme.mode != "full":
        raise ShiftError("the packing certificate needs a full-mode scheme")
    params = scheme.params
    gamma = params.gamma if gamma is None else gamma
    eps = params.ball_eps if eps is None else eps
    depth = scheme.depth if depth is None else depth
    s = params.big_h_star - 4 * gamma
    odd_times = [scheme.t(k) for k in range(1, depth + 1) if k % 2 == 1]
    if not odd_times:
        raise ValueError("no odd checkpoints at this depth")
    return _certify_rate(scheme, depth, eps, s, odd_times)
