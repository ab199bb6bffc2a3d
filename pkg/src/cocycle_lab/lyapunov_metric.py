"""Lyapunov scalar products, comparison functions and regular sets.

For a splitting R^m = E_1 + ... + E_l with exponents chi_1 < ... < chi_l,
the epsilon-Lyapunov scalar product makes distinct subspaces orthogonal and
on E_i is the weighted series

    <u, v>_{x,eps} = m * sum_n <A(x,n)u, A(x,n)v> exp(-2 chi_i n - eps|n|).

The series is truncated at |n| <= window; every result carries an explicit
tail bound, estimated from the observed geometric decay of the outermost
terms, and is refused when the terms are not visibly decaying (the
numerical signature of a non-regular point).

The comparison function returned by :func:`k_epsilon` is the tempered
envelope

    K_eps(x) = max_{|j| <= T} Q(f^j x) exp(-eps |j|),

where Q(y) = sup_u ||u||_{y,eps} / ||u|| is the raw comparison ratio.  The
raw ratio itself can jump along an orbit by the factor e^chi / (pointwise
stretch), which exceeds e^eps, so only the tempered envelope can satisfy
the slow-variation inequality

    K(x) e^{-eps n} <= K(f^n x) <= K(x) e^{eps n};

the envelope satisfies it exactly whenever the achieving offsets stay at
least n away from the window boundary, and that margin is reported with the
value.  Pesin blocks (regular sets) are the sublevel sets {K_eps <= l}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cocycle import CocycleError, CocycleSpec
from .shadowing import exponentially_close
from .shift_space import SymbolPoint

__all__ = [
    "SplittingSpec",
    "LyapunovNormContext",
    "NormResult",
    "KEpsilonResult",
    "lyapunov_gram",
    "lyapunov_norm",
    "raw_comparison",
    "k_epsilon",
    "k_epsilon_profile",
    "direction_norm_profile",
    "in_regular_set",
    "lyapunov_operator_norm",
    "NormEstimateReport",
    "verify_norm_estimate",
    "ConeReport",
    "cone_check",
]


@dataclass(frozen=True)
class SplittingSpec:
    """An invariant splitting with its exponents and multiplicities.

    ``basis_at(x)`` returns one unit-column basis matrix per subspace
    (shape (m, m_i)), ordered by increasing exponent.  For the shipped
    fixtures the splitting is analytic: coordinate axes for the diagonal
    cocycle and an explicitly summed slow direction for the triangular one.
    """

    exponents: tuple
    multiplicities: tuple
    basis_at: object

    def __post_init__(self):
        if list(self.exponents) != sorted(self.exponents):
            raise ValueError("exponents must be increasing")
        if len(self.exponents) != len(self.multiplicities):
            raise ValueError("need one multiplicity per exponent")

    @property
    def dimension(self) -> int:
        return int(sum(self.multiplicities))

    @property
    def top(self) -> float:
        return float(self.exponents[-1])

    @property
    def min_gap(self) -> float:
        e = self.exponents
        if len(e) < 2:
            return math.inf
        return min(e[i + 1] - e[i] for i in range(len(e) - 1))


@dataclass(frozen=True)
class LyapunovNormContext:
    """Truncation and tempering parameters for the Lyapunov metric.

    ``epsilon`` must stay below half the smallest exponent gap.  ``window``
    truncates the defining series, ``rel_tail_tol`` caps the accepted tail
    bound relative to the partial sum, and ``temper_window`` is the offset
    range used by the tempered comparison function.

    At periodic points the window-240 tail sits many orders below the
    default gate; at sampled points, rare deviation runs near the window
    edge push the honest bound up to ~1e-5 of the partial sum, which is why
    the default gate is not tighter.  Every returned result still carries
    its actual computed tail bound.
    """

    epsilon: float
    window: int = 240
    rel_tail_tol: float = 3e-5
    temper_window: int = 48

    def check_gap(self, splitting: SplittingSpec) -> None:
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.epsilon >= splitting.min_gap / 2:
            raise ValueError(
                f"epsilon {self.epsilon} must be below half the exponent gap "
                f"{splitting.min_gap}"
            )


def _series_scales(A: CocycleSpec, x: SymbolPoint, V0: np.ndarray, chi: float,
                   eps: float, W: int):
    """Log-scaled push-forwards of the columns V0 through A(x, n), |n| <= W.

    Returns (ells, grams) with ells[n+W] = 2 (log||A(x,n)V0|| - chi n)
    - eps |n| and grams[n+W] the unit-normalized V^T V; the series term at
    index n is m * exp(ells) * grams.  Plain propagation: adequate for
    subspaces whose complement does not grow faster (contamination-free),
    e.g. the top direction or exactly invariant coordinate axes.
    """
    k = V0.shape[1]
    ells = np.empty(2 * W + 1)
    grams = np.empty((2 * W + 1, k, k))

    def record(n, V, logscale):
        nrm = float(np.linalg.norm(V, 2))
        if nrm == 0.0 or not math.isfinite(nrm):
            raise CocycleError("subspace collapsed during series propagation")
        Vh = V / nrm
        logscale = logscale + math.log(nrm)
        ell = 2.0 * (logscale - chi * n) - eps * abs(n)
        if ell > 600.0:
            raise CocycleError(
                "Lyapunov series term overflow: the point is not regular for "
                "this splitting at the requested window"
            )
        ells[n + W] = ell
        grams[n + W] = Vh.T @ Vh
        return Vh, logscale

    V, s = record(0, V0, 0.0)
    base, base_s = V, s
    for n in range(1, W + 1):
        V, s = record(n, A.generator_at(x, n - 1) @ V, s)
    V, s = base, base_s
    for n in range(1, W + 1):
        V, s = record(-n, A.inverse_at(x, -n) @ V, s)
    return ells, grams


class _BasisCache:
    """basis_at(f^t x) memoized by offset, shared within one computation."""

    def __init__(self, splitting: SplittingSpec, x: SymbolPoint):
        self.splitting = splitting
        self.x = x
        self._mem: dict[int, list] = {}

    def __call__(self, t: int) -> list:
        got = self._mem.get(t)
        if got is None:
            got = self.splitting.basis_at(self.x.shift(t))
            self._mem[t] = got
        return got


def _anchored_lambda(A: CocycleSpec, bases: _BasisCache, i: int,
                     t_lo: int, t_hi: int) -> np.ndarray:
    """lam(t) = log ||A(x, t) b_i(x)|| for t in [t_lo, t_hi], re-anchored.

    Each step transfers the analytic basis direction at f^t x through one
    generator; for an A-invariant one-dimensional subspace this telescopes
    to the exact norm and, unlike plain propagation, cannot be contaminated
    by faster-growing complements.
    """
    lam = np.empty(t_hi - t_lo + 1)
    lam[-t_lo] = 0.0
    s = 0.0
    for t in range(1, t_hi + 1):
        v = bases(t - 1)[i][:, 0]
        w = A.generator_at(bases.x, t - 1) @ (v / np.linalg.norm(v))
        s += math.log(float(np.linalg.norm(w)))
        lam[t - t_lo] = s
    s = 0.0
    for t in range(-1, t_lo - 1, -1):
        v = bases(t + 1)[i][:, 0]
        w = A.inverse_at(bases.x, t) @ (v / np.linalg.norm(v))
        s += math.log(float(np.linalg.norm(w)))
        lam[t - t_lo] = s
    return lam


def _tail_bound(ells: np.ndarray, W: int, eps: float, probe: int = 24) -> float:
    """Geometric-envelope tail bound seeded by the outermost terms.

    Beyond the truncation window the summand envelope of a regular point
    decays like e^{-eps |n|} (growth deviations average out), so each side
    contributes at most 4 * max(outermost terms) * r / (1 - r) with
    r = e^-eps; the factor 4 absorbs short deviation excursions just past
    the window.  A side whose outermost block of terms dominates the block
    before it by more than that same excursion factor is flagged as not
    decaying, the numerical symptom of a non-regular point.
    """
    if 2 * probe > 2 * W + 1:
        probe = W
    r = math.exp(-eps)
    tail = 0.0
    for outer, inner in ((slice(2 * W + 1 - probe, 2 * W + 1),
                          slice(2 * W + 1 - 2 * probe, 2 * W + 1 - probe)),
                         (slice(0, probe), slice(probe, 2 * probe))):
        seg_out = np.exp(ells[outer])
        seg_in = np.exp(ells[inner])
        if seg_out.mean() > 4.0 * seg_in.mean():
            raise CocycleError(
                "Lyapunov series tail is not decaying; increase the window "
                "or use a regular point"
            )
        tail += 4.0 * float(seg_out.max()) * r / (1.0 - r)
    return tail


class _PointNorms:
    """Cached subspace quadratic forms of the Lyapunov product at one point.

    For u = sum_i B_i c_i the squared Lyapunov norm is sum_i c_i^T Q_i c_i
    with Q_i = m * sum_n exp(ell_n) * gram_n; all component norms, the full
    Gram matrix and the raw comparison ratio derive from the Q_i.
    """

    def __init__(self, ctx: LyapunovNormContext, splitting: SplittingSpec,
                 A: CocycleSpec, x: SymbolPoint):
        ctx.check_gap(splitting)
        self.m = A.dimension
        self.bases = splitting.basis_at(x)
        self.exponents = splitting.exponents
        self.B = np.hstack(self.bases)
        self.C = np.linalg.inv(self.B)
        self.Q = []
        self.tail = 0.0
        W = ctx.window
        offs = np.arange(-W, W + 1)
        decay = -ctx.epsilon * np.abs(offs)
        cache = _BasisCache(splitting, x)
        for i, (basis, chi) in enumerate(zip(self.bases, splitting.exponents)):
            if basis.shape[1] == 1:
                lam = _anchored_lambda(A, cache, i, -W, W)
                ell = 2.0 * (lam - chi * offs) + decay
                total, t = _windowed_sum(ell, W, ctx.epsilon)
                self.Q.append(np.array([[self.m * total]]))
                self.tail += self.m * t
            else:
                ells, grams = _series_scales(A, x, basis, chi, ctx.epsilon, W)
                self.Q.append(self.m * np.einsum("n,nij->ij", np.exp(ells),
                                                 grams))
                self.tail += self.m * _tail_bound(ells, W, ctx.epsilon)
        partial = sum(float(np.trace(Q)) for Q in self.Q)
        if self.tail > ctx.rel_tail_tol * max(partial, 1.0):
            raise CocycleError(
                f"series tail bound {self.tail:.3g} above tolerance for "
                f"partial sum {partial:.3g}; increase the window"
            )

    def component_sq(self, u) -> list[float]:
        c = self.C @ np.asarray(u, dtype=float)
        out = []
        row = 0
        for Q in self.Q:
            k = Q.shape[0]
            ci = c[row:row + k]
            out.append(float(ci @ Q @ ci))
            row += k
        return out

    def norm(self, u) -> float:
        return math.sqrt(sum(self.component_sq(u)))

    def top_and_perp(self, u) -> tuple[float, float]:
        sq = self.component_sq(u)
        return math.sqrt(sq[-1]), math.sqrt(sum(sq[:-1]))

    def top_component(self, u) -> np.ndarray:
        c = self.C @ np.asarray(u, dtype=float)
        k = self.bases[-1].shape[1]
        return self.bases[-1] @ c[-k:]

    def low_component(self, u) -> np.ndarray:
        return np.asarray(u, dtype=float) - self.top_component(u)

    def gram(self) -> np.ndarray:
        m = self.B.shape[0]
        G = np.zeros((m, m))
        row = 0
        for Q in self.Q:
            k = Q.shape[0]
            Ci = self.C[row:row + k, :]
            G += Ci.T @ Q @ Ci
            row += k
        return (G + G.T) / 2


def lyapunov_gram(ctx: LyapunovNormContext, splitting: SplittingSpec,
                  A: CocycleSpec, x: SymbolPoint):
    """Gram matrix of the truncated Lyapunov scalar product in standard
    coordinates, with its tail bound: <u, v>_{x,eps} ~ u^T G v."""
    pn = _PointNorms(ctx, splitting, A, x)
    return pn.gram(), pn.tail


@dataclass(frozen=True)
class NormResult:
    value: float
    tail_bound: float

    def __float__(self):
        return self.value


def lyapunov_norm(ctx: LyapunovNormContext, splitting: SplittingSpec,
                  A: CocycleSpec, x: SymbolPoint, u) -> NormResult:
    """Truncated-series Lyapunov norm of u at x, with its tail bound."""
    u = np.asarray(u, dtype=float)
    if not u.any():
        raise ValueError("u must be nonzero")
    pn = _PointNorms(ctx, splitting, A, x)
    return NormResult(value=pn.norm(u), tail_bound=pn.tail)


def _power_iteration(G: np.ndarray, iters: int = 500, tol: float = 1e-14) -> float:
    v = np.ones(G.shape[0]) / math.sqrt(G.shape[0])
    lam = 0.0
    for _ in range(iters):
        w = G @ v
        nrm = float(np.linalg.norm(w))
        if nrm == 0.0:
            return 0.0
        w /= nrm
        new = float(w @ G @ w)
        if abs(new - lam) <= tol * max(1.0, abs(new)):
            return new
        lam, v = new, w
    return lam


def raw_comparison(ctx: LyapunovNormContext, splitting: SplittingSpec,
                   A: CocycleSpec, x: SymbolPoint) -> float:
    """Q(x) = sup_u ||u||_{x,eps} / ||u||, by power iteration on the Gram."""
    G, _ = lyapunov_gram(ctx, splitting, A, x)
    return math.sqrt(_power_iteration(G))


def _orbit_comparison_profile(ctx: LyapunovNormContext, splitting: SplittingSpec,
                              A: CocycleSpec, x: SymbolPoint,
                              j_lo: int, j_hi: int) -> np.ndarray:
    """Q(f^j x) for j_lo <= j <= j_hi from a single propagated sweep.

    Valid for splittings with one-dimensional subspaces: A-invariance means
    the basis at f^j x is the normalized push-forward A(x, j) b_i, so one
    log-scaled sweep of each direction over [j_lo - W, j_hi + W] yields
    every offset's series by reindexing:

        ell_j(n) = 2 (lam(j + n) - lam(j) - chi_i n) - eps |n|.
    """
    if any(k != 1 for k in splitting.multiplicities):
        return np.array([raw_comparison(ctx, splitting, A, x.shift(j))
                         for j in range(j_lo, j_hi + 1)])
    ctx.check_gap(splitting)
    W = ctx.window
    eps = ctx.epsilon
    m = A.dimension
    lo, hi = j_lo - W, j_hi + W
    span = hi - lo + 1
    cache = _BasisCache(splitting, x)
    n_sub = len(splitting.exponents)
    lam = np.empty((n_sub, span))
    vecs = np.empty((n_sub, span, m))

    for i in range(n_sub):
        lam[i] = _anchored_lambda(A, cache, i, lo, hi)
        for t in range(lo, hi + 1):
            v = cache(t)[i][:, 0]
            vecs[i, t - lo] = v / np.linalg.norm(v)

    offs = np.arange(-W, W + 1)
    decay = -eps * np.abs(offs)
    out = np.empty(j_hi - j_lo + 1)
    for j in range(j_lo, j_hi + 1):
        c = j - lo
        q = np.empty(n_sub)
        tail = 0.0
        for i in range(n_sub):
            chi = splitting.exponents[i]
            ell = 2.0 * (lam[i, c - W:c + W + 1] - lam[i, c] - chi * offs) + decay
            total, t = _windowed_sum(ell, W, eps)
            q[i] = m * total
            tail += m * t
        B = vecs[:, c, :].T
        C = np.linalg.inv(B)
        G = C.T @ np.diag(q) @ C
        partial = float(np.trace(G))
        if tail > ctx.rel_tail_tol * max(partial, 1.0):
            raise CocycleError(
                f"series tail bound {tail:.3g} above tolerance at offset {j}; "
                "increase the window"
            )
        out[j - j_lo] = math.sqrt(_power_iteration((G + G.T) / 2))
    return out


def _windowed_sum(ell: np.ndarray, W: int, eps: float):
    """(sum of exp(ell), tail bound) with the envelope sanity checks."""
    if ell.max() > 600.0:
        raise CocycleError(
            "Lyapunov series term overflow: the point is not regular for "
            "this splitting at the requested window"
        )
    terms = np.exp(ell)
    probe = min(24, W)
    r = math.exp(-eps)
    tail = 0.0
    for outer, inner in ((slice(2 * W + 1 - probe, 2 * W + 1),
                          slice(2 * W + 1 - 2 * probe, 2 * W + 1 - probe)),
                         (slice(0, probe), slice(probe, 2 * probe))):
        if terms[outer].mean() > 4.0 * terms[inner].mean():
            raise CocycleError(
                "Lyapunov series tail is not decaying; increase the window "
                "or use a regular point"
            )
        tail += 4.0 * float(terms[outer].max()) * r / (1.0 - r)
    return float(terms.sum()), tail


def direction_norm_profile(ctx: LyapunovNormContext, splitting: SplittingSpec,
                           A: CocycleSpec, x: SymbolPoint, sub_index: int,
                           n_lo: int, n_hi: int) -> np.ndarray:
    """||A(x, n) b_i||_{f^n x, eps} for n in [n_lo, n_hi], one sweep.

    b_i is the (one-dimensional) subspace direction at x; together with the
    n = 0 value this gives the two-sided growth comparison along the orbit
    in the subspace's own exponent.
    """
    if splitting.multiplicities[sub_index] != 1:
        raise ValueError("direction profiles need a one-dimensional subspace")
    ctx.check_gap(splitting)
    W = ctx.window
    eps = ctx.epsilon
    chi = splitting.exponents[sub_index]
    m = A.dimension
    lo, hi = n_lo - W, n_hi + W
    lam = _anchored_lambda(A, _BasisCache(splitting, x), sub_index, lo, hi)
    offs = np.arange(-W, W + 1)
    decay = -eps * np.abs(offs)
    out = np.empty(n_hi - n_lo + 1)
    for n in range(n_lo, n_hi + 1):
        c = n - lo
        ell = 2.0 * (lam[c - W:c + W + 1] - chi * offs) + decay
        shift = 2.0 * lam[c]
        total, _ = _windowed_sum(ell - shift, W, eps)
        out[n - n_lo] = math.sqrt(m * total * math.exp(shift))
    return out


@dataclass(frozen=True)
class KEpsilonResult:
    value: float
    raw: float                # Q(x) itself, >= 1 always
    arg_offset: int           # offset achieving the tempered max
    boundary_margin: int      # distance of that offset from the window edge

    def __float__(self):
        return self.value


def k_epsilon(ctx: LyapunovNormContext, splitting: SplittingSpec,
              A: CocycleSpec, x: SymbolPoint) -> KEpsilonResult:
    """Tempered comparison function K_eps(x) (see module docstring).

    Satisfies ||u|| <= ||u||_{x,eps} <= K_eps(x) ||u|| and varies slowly
    along orbits: K(x) e^{-eps n} <= K(f^n x) <= K(x) e^{eps n} holds
    exactly for every n up to the reported boundary margin.
    """
    T = ctx.temper_window
    qs = _orbit_comparison_profile(ctx, splitting, A, x, -T, T)
    js = np.arange(-T, T + 1)
    cands = qs * np.exp(-ctx.epsilon * np.abs(js))
    k = int(cands.argmax())
    return KEpsilonResult(value=float(cands[k]), raw=float(qs[T]),
                          arg_offset=int(js[k]),
                          boundary_margin=T - abs(int(js[k])))


def k_epsilon_profile(ctx: LyapunovNormContext, splitting: SplittingSpec,
                      A: CocycleSpec, x: SymbolPoint, j_lo: int,
                      j_hi: int) -> np.ndarray:
    """K_eps(f^j x) for every j in [j_lo, j_hi], from one shared sweep."""
    T = ctx.temper_window
    qs = _orbit_comparison_profile(ctx, splitting, A, x, j_lo - T, j_hi + T)
    out = np.empty(j_hi - j_lo + 1)
    weights = np.exp(-ctx.epsilon * np.abs(np.arange(-T, T + 1)))
    for j in range(j_lo, j_hi + 1):
        c = j - (j_lo - T)
        out[j - j_lo] = float((qs[c - T:c + T + 1] * weights).max())
    return out


def in_regular_set(ctx, splitting, A, x, l: float) -> bool:
    """Membership in the Pesin block {K_eps <= l}."""
    return k_epsilon(ctx, splitting, A, x).value <= l


def lyapunov_operator_norm(ctx: LyapunovNormContext, splitting: SplittingSpec,
                           A: CocycleSpec, x: SymbolPoint, y: SymbolPoint,
                           B: np.ndarray) -> float:
    """||B||_{y <- x} = sup ||B u||_{y,eps} / ||u||_{x,eps}."""
    Gx, _ = lyapunov_gram(ctx, splitting, A, x)
    Gy, _ = lyapunov_gram(ctx, splitting, A, y)
    Lx = np.linalg.cholesky(Gx)
    Lxi = np.linalg.inv(Lx)
    M = Lxi @ (np.asarray(B, float).T @ Gy @ B) @ Lxi.T
    M = (M + M.T) / 2
    return math.sqrt(max(0.0, float(np.linalg.eigvalsh(M)[-1])))


def _scaled_product(A: CocycleSpec, x: SymbolPoint, n: int):
    """(normalized matrix M, log scale s) with A(x, n) = e^s M."""
    M = np.eye(A.dimension)
    s = 0.0
    for i in range(n):
        M = A.generator_at(x, i) @ M
        r = float(np.linalg.norm(M))
        M /= r
        s += math.log(r)
    return M, s


@dataclass
class NormEstimateReport:
    status: str                    # "ok" | "violated" | "indeterminate"
    log_lhs_std: float | None = None
    log_rhs_std: float | None = None
    log_lhs_op: float | None = None
    log_rhs_op: float | None = None
    slack_std: float | None = None
    slack_op: float | None = None
    k_start: float | None = None
    k_end: float | None = None
    reason: str = ""


def verify_norm_estimate(ctx: LyapunovNormContext, splitting: SplittingSpec,
                         A: CocycleSpec, x: SymbolPoint, y: SymbolPoint,
                         n: int, l: float, tau: float = 2.0,
                         lam: float = math.log(2.0),
                         k_values: tuple | None = None) -> NormEstimateReport:
    """Norm bounds for a cocycle along an orbit that stays exponentially
    close to an l-regular segment.

    For x with x and f^n x in the Pesin block {K_eps <= l}, and y whose
    orbit segment is exponentially tau-close to x's with exponent
    lam > eps / alpha, verifies in log form

        standard norm:  log ||A(y,n)||            <= 2 log l + l + n (chi + eps)
        Lyapunov norm:  log ||A(y,n)||_{f^n x<-x} <= l + n (chi + eps)

    and reports the slacks.  Unverifiable preconditions give an
    indeterminate report, never a silent pass.  ``k_values`` may supply
    precomputed (K_eps(x), K_eps(f^n x)) to avoid recomputation.
    """
    if lam <= ctx.epsilon / A.holder_alpha:
        return NormEstimateReport(status="indeterminate",
                                  reason="need lambda > epsilon / alpha")
    close = exponentially_close(x, y, n, tau, lam)
    if not close.ok:
        return NormEstimateReport(
            status="indeterminate",
            reason=(f"orbit segments not exponentially {tau}-close: margin "
                    f"{close.worst_margin:.3g} at i={close.worst_index}"),
        )
    if k_values is None:
        kx = k_epsilon(ctx, splitting, A, x).value
        kfx = k_epsilon(ctx, splitting, A, x.shift(n)).value
    else:
        kx, kfx = k_values
    if kx > l or kfx > l:
        return NormEstimateReport(status="indeterminate", k_start=kx, k_end=kfx,
                                  reason="segment endpoints are not l-regular")
    chi = splitting.top
    M, s = _scaled_product(A, y, n)
    log_lhs_std = s + math.log(float(np.linalg.norm(M, 2)))
    log_rhs_std = 2 * math.log(l) + l + n * (chi + ctx.epsilon)
    log_lhs_op = s + math.log(
        lyapunov_operator_norm(ctx, splitting, A, x, x.shift(n), M)
    )
    log_rhs_op = l + n * (chi + ctx.epsilon)
    slack_std = log_rhs_std - log_lhs_std
    slack_op = log_rhs_op - log_lhs_op
    status = "ok" if (slack_std >= 0 and slack_op >= 0) else "violated"
    return NormEstimateReport(status=status, log_lhs_std=log_lhs_std,
                              log_rhs_std=log_rhs_std, log_lhs_op=log_lhs_op,
                              log_rhs_op=log_rhs_op, slack_std=slack_std,
                              slack_op=slack_op, k_start=kx, k_end=kfx)


@dataclass
class ConeReport:
    status: str                    # "ok" | "violated"
    worst_cone_margin: float       # min over samples of (1-eta)||v'|| - ||v_perp||
    worst_growth_margin: float     # min of ||v'||_{i+1} - e^{chi-2eps} ||u'||_i
    worst_location: tuple | None
    samples: int = 0


def cone_check(ctx: LyapunovNormContext, splitting: SplittingSpec,
               A: CocycleSpec, x: SymbolPoint, y: SymbolPoint, n: int,
               eta: float, n_samples: int = 16, seed: int = 0) -> ConeReport:
    """Invariance and growth of the top-direction cones along a segment.

    At each step i the cone K_i = {u : ||u_perp||_i <= ||u'||_i} is built
    from the splitting at f^i x with Lyapunov norms; boundary vectors are
    sampled, pushed through the generator at f^i y, and the images are
    tested for membership in the shrunken cone at step i+1 and for the
    growth bound ||v'||_{i+1} >= e^{chi - 2 eps} ||u'||_i.  Nonpositive
    margins are reported, not raised: a degenerate cone (eta = 1) simply
    fails with margin <= 0.
    """
    rng = np.random.default_rng(seed)
    grow = math.exp(splitting.top - 2 * ctx.epsilon)
    worst_cone = math.inf
    worst_growth = math.inf
    where = None
    count = 0
    norms_next = _PointNorms(ctx, splitting, A, x)
    for i in range(n):
        norms_i = norms_next
        norms_next = _PointNorms(ctx, splitting, A, x.shift(i + 1))
        Gy = A.generator_at(y, i)
        bases = norms_i.bases
        top_dim = bases[-1].shape[1]
        low_dim = A.dimension - top_dim
        for s in range(n_samples):
            ctop = rng.standard_normal(top_dim)
            u_top = bases[-1] @ ctop
            u_top = u_top / norms_i.top_and_perp(u_top)[0]
            if low_dim:
                clow = rng.standard_normal(low_dim)
                u_low = np.hstack(bases[:-1]) @ clow
                u_low = u_low / norms_i.top_and_perp(u_low)[1]
                u = u_top + u_low       # Lyapunov-norm cone boundary vector
            else:
                u = u_top
            u_top_norm = norms_i.top_and_perp(u)[0]
            v = Gy @ u
            v_top, v_perp = norms_next.top_and_perp(v)
            cone_margin = (1 - eta) * v_top - v_perp
            growth_margin = v_top - grow * u_top_norm
            count += 1
            if cone_margin < worst_cone:
                worst_cone = cone_margin
                where = (i, s)
            worst_growth = min(worst_growth, growth_margin)
    status = "ok" if (worst_cone > 0 and worst_growth > 0) else "violated"
    return ConeReport(status=status, worst_cone_margin=worst_cone,
                      worst_growth_margin=worst_growth, worst_location=where,
                      samples=count)
