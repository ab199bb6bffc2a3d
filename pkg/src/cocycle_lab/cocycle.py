"""Matrix cocycles with locally constant generators.

A cocycle assigns to each point x an invertible m x m matrix A(x) and
composes along orbits:

    A(x, n) = A(f^{n-1} x) ... A(f x) A(x)      for n > 0,
    A(x, 0) = I,
    A(x, -n) = A(f^{-n} x, n)^{-1}.

Generators here are locally constant: A(x) depends on the forward word
x_0 ... x_{d-1} for a configurable depth d (default 1).  Locally constant
generators are Holder for every exponent, and they make measure integrals of
log ||A(x, n)|| exact finite sums over cylinders.

Norm accumulation is done in the log domain with per-step renormalization,
so finite-time exponents are stable for orbit lengths well beyond float
overflow range.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .shift_space import BudgetError, ShiftSpace, SymbolPoint

__all__ = [
    "CocycleError",
    "CocycleSpec",
    "SpectrumReport",
    "MeasureMLE",
    "product",
    "finite_time_mle",
    "mle_checkpoints",
    "oseledec_spectrum",
    "integrated_lognorm",
    "integrated_lognorm_mc",
    "mle_of_measure",
]


class CocycleError(Exception):
    pass


def _spectral_norm(M: np.ndarray) -> float:
    return float(np.linalg.norm(M, 2))


@dataclass(frozen=True)
class CocycleSpec:
    """A locally constant GL(m, R)-valued generator over a shift space.

    ``generators`` maps each admissible word of length ``depth`` to an
    invertible matrix.  ``bound`` is C = max over generators of
    max(||A||, ||A^-1||); finite-time exponents always lie in
    [-log C, log C].
    """

    space: ShiftSpace
    dimension: int
    depth: int
    generators: dict
    holder_alpha: float = 1.0
    det_floor: float = 1e-12
    bound: float = field(init=False, default=0.0)
    _inverses: dict = field(init=False, default_factory=dict, repr=False)

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("generator depth must be >= 1")
        gens = {}
        invs = {}
        C = 0.0
        for word, M in self.generators.items():
            w = tuple(int(s) for s in word)
            M = np.asarray(M, dtype=float).reshape(self.dimension, self.dimension)
            det = abs(np.linalg.det(M))
            if det < self.det_floor:
                raise CocycleError(f"generator at {w} has |det| {det} below floor")
            gens[w] = M
            invs[w] = np.linalg.inv(M)
            C = max(C, _spectral_norm(M), _spectral_norm(invs[w]))
        for w in self.space.words(self.depth):
            if w not in gens:
                raise CocycleError(f"missing generator for admissible word {w}")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "_inverses", invs)
        object.__setattr__(self, "bound", C)

    @property
    def log_bound(self) -> float:
        return math.log(self.bound)

    def generator_word(self, x: SymbolPoint, i: int) -> tuple:
        if self.depth == 1:
            return (x[i],)
        return tuple(x.window(i, i + self.depth - 1).tolist())

    def generator_at(self, x: SymbolPoint, i: int) -> np.ndarray:
        return self.generators[self.generator_word(x, i)]

    def inverse_at(self, x: SymbolPoint, i: int) -> np.ndarray:
        return self._inverses[self.generator_word(x, i)]

    def holder_constant(self) -> float:
        """H with ||A(x) - A(y)|| <= H d(x,y)^alpha for all points.

        Generators differing forces d(x, y) >= 2^-(depth-1), which gives the
        exact worst-case constant from the generator table.
        """
        worst = 0.0
        gens = list(self.generators.values())
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                worst = max(worst, _spectral_norm(gens[i] - gens[j]))
        return worst * 2.0 ** (self.holder_alpha * (self.depth - 1))

    # -- serialization ----------------------------------------------------
    def to_json(self) -> str:
        doc = {
            "dimension": self.dimension,
            "depth": self.depth,
            "det_floor": self.det_floor,
            "holder_alpha": self.holder_alpha,
            "generators": {
                "".join(map(str, w)): [float(v) for v in M.ravel()]
                for w, M in sorted(self.generators.items())
            },
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, space: ShiftSpace, text: str) -> "CocycleSpec":
        doc = json.loads(text)
        m = int(doc["dimension"])
        gens = {
            tuple(int(c) for c in word): np.asarray(flat, dtype=float).reshape(m, m)
            for word, flat in doc["generators"].items()
        }
        return cls(
            space=space,
            dimension=m,
            depth=int(doc["depth"]),
            generators=gens,
            holder_alpha=float(doc.get("holder_alpha", 1.0)),
            det_floor=float(doc.get("det_floor", 1e-12)),
        )


def product(A: CocycleSpec, x: SymbolPoint, n: int) -> np.ndarray:
    """The matrix A(x, n); n may be negative.  Intended for moderate |n|
    (no renormalization): use finite_time_mle for long orbits."""
    if n == 0:
        return np.eye(A.dimension)
    if n < 0:
        return np.linalg.inv(product(A, x.shift(n), -n))
    P = np.eye(A.dimension)
    for i in range(n):
        P = A.generator_at(x, i) @ P
        if not np.isfinite(P).all():
            raise CocycleError(f"overflow in raw product at step {i}; "
                               "use renormalized operations for long orbits")
    return P


def _lognorm_walk(A: CocycleSpec, x: SymbolPoint, times):
    """log ||A(x, t)|| at the requested increasing times, one forward pass.

    Accumulates Frobenius rescalings per step and corrects each checkpoint
    with the spectral norm of the renormalized running product, which is
    exact: ||A(x,t)||_2 = exp(acc) * ||M||_2 for the tracked (M, acc).
    """
    times = [int(t) for t in times]
    if any(t < 1 for t in times) or sorted(times) != times:
        raise ValueError("checkpoint times must be increasing positive integers")
    out = np.empty(len(times))
    M = np.eye(A.dimension)
    acc = 0.0
    step = 0
    for j, t in enumerate(times):
        while step < t:
            M = A.generator_at(x, step) @ M
            s = float(np.linalg.norm(M))
            if not math.isfinite(s) or s == 0.0:
                raise CocycleError(f"renormalization failed at step {step}")
            M /= s
            acc += math.log(s)
            step += 1
        out[j] = acc + math.log(_spectral_norm(M))
    return out


def finite_time_mle(A: CocycleSpec, x: SymbolPoint, n: int) -> float:
    """(1/n) log ||A(x, n)|| with per-step renormalization."""
    if n < 1:
        raise ValueError("n must be positive")
    val = _lognorm_walk(A, x, [n])[0] / n
    if abs(val) > A.log_bound + 1e-9:
        raise CocycleError("finite-time exponent exceeds the generator bound")
    return float(val)


def mle_checkpoints(A: CocycleSpec, x: SymbolPoint, times) -> np.ndarray:
    """(1/t) log ||A(x, t)|| at each checkpoint time, in one pass."""
    times = list(times)
    logs = _lognorm_walk(A, x, times)
    return logs / np.asarray(times, dtype=float)


@dataclass
class SpectrumReport:
    """Oseledec spectrum estimate from the QR push-forward recursion."""

    exponents: np.ndarray      # decreasing order
    drift: np.ndarray          # |last-quarter mean - total mean| per exponent
    det_rate: float            # (1/n) log |det A(x, n)|
    n: int

    def sum_matches_det(self, tol: float = 1e-6) -> bool:
        return abs(self.exponents.sum() - self.det_rate) <= tol


def oseledec_spectrum(A: CocycleSpec, x: SymbolPoint, n: int,
                      ortho_every: int = 1) -> SpectrumReport:
    """Estimate all Lyapunov exponents along one orbit.

    Pushes an orthonormal frame through the cocycle, re-orthogonalizes every
    ``ortho_every`` steps by QR with positive diagonal, and averages the log
    stretch factors.  The drift diagnostic compares the last-quarter running
    average against the full average.
    """
    if n < 4:
        raise ValueError("n must be at least 4")
    m = A.dimension
    Q = np.eye(m)
    logsum = np.zeros(m)
    logdet = 0.0
    tail_start = n - n // 4
    tail = np.zeros(m)
    for i in range(n):
        G = A.generator_at(x, i)
        Q = G @ Q
        logdet += math.log(abs(np.linalg.det(G)))
        if (i + 1) % ortho_every == 0 or i == n - 1:
            Q, R = np.linalg.qr(Q)
            diag = np.diag(R).copy()
            flip = diag < 0
            Q[:, flip] *= -1
            diag = np.abs(diag)
            if (diag < 1e-300).any():
                raise CocycleError(f"frame degeneracy at step {i}")
            logs = np.log(diag)
            logsum += logs
            if i >= tail_start:
                tail += logs
    exponents = logsum / n
    order = np.argsort(exponents)[::-1]
    tail_avg = tail / max(1, n - tail_start)
    drift = np.abs(tail_avg - exponents)[order]
    return SpectrumReport(exponents=exponents[order], drift=drift,
                          det_rate=logdet / n, n=n)


def _admissible_weighted_words(A: CocycleSpec, mu, length: int, cap: int):
    """(word, weight, lognorm-precursor) iteration support for exact sums."""
    count = A.space.word_count(length)
    if count > cap:
        raise BudgetError(
            f"exact sum needs {count} cylinders of length {length} (cap {cap}); "
            "use integrated_lognorm_mc as a Monte Carlo fallback"
        )
    return A.space.words(length)


def _word_lognorm(A: CocycleSpec, word: tuple, n: int) -> float:
    """log ||A(x, n)|| for any x in the cylinder [word at 0]; needs
    len(word) == n + depth - 1."""
    M = np.eye(A.dimension)
    acc = 0.0
    for i in range(n):
        M = A.generators[word[i:i + A.depth]] @ M
        s = float(np.linalg.norm(M))
        M /= s
        acc += math.log(s)
    return acc + math.log(_spectral_norm(M))


def integrated_lognorm(A: CocycleSpec, mu, n: int, cap: int = 2**18) -> float:
    """Integral of log ||A(x, n)|| d mu, as an exact finite sum.

    log ||A(x, n)|| is constant on cylinders of length n + depth - 1 for
    locally constant generators, so the integral is the weighted sum over
    admissible words of that length.
    """
    if n < 1:
        raise ValueError("n must be positive")
    length = n + A.depth - 1
    words = _admissible_weighted_words(A, mu, length, cap)
    total = 0.0
    for w in words:
        weight = mu.cylinder_weight(w)
        if weight > 0.0:
            total += weight * _word_lognorm(A, w, n)
    return total


def integrated_lognorm_mc(A: CocycleSpec, mu, n: int, samples: int, seed: int):
    """Monte Carlo estimate of the same integral, with standard error."""
    vals = np.empty(samples)
    for k in range(samples):
        x = mu.sample_point(half_window=n + A.depth + 2, seed=(seed, k))
        vals[k] = _lognorm_walk(A, x, [n])[0]
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples))


@dataclass
class MeasureMLE:
    """min_n (1/n) integral log||A(x,n)|| with its subadditivity certificate.

    The sequence a_n is subadditive, so the reported minimum upper-bounds
    the measure's maximal Lyapunov exponent inf_n (1/n) a_n.
    """

    value: float
    sequence: np.ndarray          # a_n for n = 1..n_max
    subadd_violation: float       # max over tested (n,k) of a_{n+k}-a_n-a_k
    argmin: int

    @property
    def per_n(self) -> np.ndarray:
        n = np.arange(1, len(self.sequence) + 1)
        return self.sequence / n


def mle_of_measure(A: CocycleSpec, mu, n_max: int, cap: int = 2**18,
                   subadd_tol: float = 1e-9) -> MeasureMLE:
    """Upper bound for the measure's maximal Lyapunov exponent.

    Computes a_n = integral log||A(x,n)|| exactly for n <= n_max, verifies
    subadditivity a_{n+k} <= a_n + a_k on every tested pair, and returns
    min_n a_n / n.  A subadditivity violation beyond tolerance indicates a
    broken product and is raised as an error.
    """
    seq = np.array([integrated_lognorm(A, mu, n, cap=cap)
                    for n in range(1, n_max + 1)])
    worst = -np.inf
    for n in range(1, n_max + 1):
        for k in range(1, n_max + 1 - n):
            worst = max(worst, seq[n + k - 1] - seq[n - 1] - seq[k - 1])
    if worst > subadd_tol:
        raise CocycleError(f"subadditivity violated by {worst}")
    per_n = seq / np.arange(1, n_max + 1)
    argmin = int(per_n.argmin())
    return MeasureMLE(value=float(per_n[argmin]), sequence=seq,
                      subadd_violation=float(worst), argmin=argmin + 1)
