"""Two-sided subshifts of finite type.

Phase spaces are sets of bi-infinite symbol sequences constrained by a 0/1
transition matrix, equipped with the standard metric

    d(x, y) = 2^(-min{|k| : x_k != y_k}),

and the dynamical (Bowen) distances d_n built from it.  The metric base is
fixed to 2 and all resolutions are powers of 1/2, so every separation,
spanning and ball computation reduces to exact word combinatorics: an open
ball of radius 2^-m in the d_n metric is exactly a cylinder on the window
[-m, n-1+m], and two points are (n, 2^-m)-separated exactly when their words
on [-(m-1), n-1+(m-1)] differ.

Every distance result carries the coordinate window it used.  Values that
could change outside that window are flagged as uncertified instead of being
silently reported as zero.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ShiftError",
    "WindowError",
    "AdmissibilityError",
    "BudgetError",
    "ShiftSpace",
    "SymbolPoint",
    "Cylinder",
    "SeparatedSet",
    "DistanceResult",
    "full_shift",
    "golden_mean_shift",
    "periodic_point",
    "constant_point",
    "word_point",
    "point_from_text",
    "point_distance",
    "bowen_distance",
    "dyadic_exponent",
    "ball_window",
    "separation_window",
]


class ShiftError(Exception):
    """Base error for symbolic-dynamics operations."""


class WindowError(ShiftError):
    """A computation needed coordinates outside the available window."""


class AdmissibilityError(ShiftError):
    """A word or coordinate pair violates the transition matrix."""


class BudgetError(ShiftError):
    """An exact enumeration would exceed the configured budget."""


def dyadic_exponent(eps: float) -> int:
    """Return m >= 1 with eps == 2**-m, or raise for non-dyadic resolutions."""
    if not 0 < eps <= 0.5:
        raise ValueError(f"resolution must be in (0, 1/2], got {eps}")
    m = round(-math.log2(eps))
    if 2.0 ** (-m) != eps:
        raise ValueError(f"resolution must be a power of 1/2, got {eps}")
    return m


def ball_window(n: int, m: int) -> tuple[int, int]:
    """Agreement window of the open ball B_n(x, 2^-m): d_n(x,y) < 2^-m
    holds exactly when x and y agree on [-m, n-1+m]."""
    return (-m, n - 1 + m)


def separation_window(n: int, m: int) -> tuple[int, int]:
    """Window on which (n, 2^-m)-separated points must differ:
    d_n(x,y) > 2^-m holds exactly when they differ on [-(m-1), n-1+(m-1)]."""
    return (-(m - 1), n - 1 + (m - 1))


@dataclass(frozen=True)
class DistanceResult:
    """A metric value together with the window that certified it.

    ``certified`` is False only for window-limited zeros: no disagreement was
    seen inside the window, so the true value is < 2**-window but may be
    nonzero.
    """

    value: float
    certified: bool
    window: int

    def __float__(self) -> float:
        return self.value


class ShiftSpace:
    """A two-sided subshift of finite type on symbols 0..q-1.

    Parameters
    ----------
    alphabet_size : int
        Number of symbols q.
    transitions : array_like, shape (q, q)
        0/1 matrix; transitions[a, b] == 1 means symbol b may follow a.
        Must have no all-zero row or column and must be primitive (some
        power entrywise positive), i.e. the shift is topologically mixing.
    metric_base : float
        Fixed to 2; kept as an explicit field so serialized spaces record it.
    """

    def __init__(self, alphabet_size, transitions, metric_base=2.0):
        if metric_base != 2.0:
            raise ValueError("only metric base 2 is supported")
        q = int(alphabet_size)
        M = np.asarray(transitions, dtype=np.int8)
        if M.shape != (q, q):
            raise ValueError(f"transition matrix must be {q}x{q}")
        if not np.isin(M, (0, 1)).all():
            raise ValueError("transition matrix entries must be 0 or 1")
        if (M.sum(axis=1) == 0).any() or (M.sum(axis=0) == 0).any():
            raise AdmissibilityError("transition matrix has a dead symbol")
        self.q = q
        self.metric_base = 2.0
        self.transitions = M
        self.transitions.setflags(write=False)
        self._prim_index = self._primitivity_index()

    def _primitivity_index(self) -> int:
        # Wielandt: a primitive q x q matrix has M^g > 0 for g = q^2 - 2q + 2.
        bound = max(1, self.q * self.q - 2 * self.q + 2)
        B = self.transitions > 0
        P = B.copy()
        for g in range(1, bound + 1):
            if P.all():
                return g
            P = (P.astype(np.int64) @ B.astype(np.int64)) > 0
        raise AdmissibilityError(
            "transition matrix is not primitive: not topologically mixing"
        )

    @property
    def primitivity_index(self) -> int:
        """Least g with M^g entrywise positive."""
        return self._prim_index

    def allowed(self, a: int, b: int) -> bool:
        return bool(self.transitions[a, b])

    def is_admissible(self, word) -> bool:
        w = np.asarray(word, dtype=np.int64)
        if w.size == 0:
            return True
        if (w < 0).any() or (w >= self.q).any():
            return False
        if w.size == 1:
            return True
        return bool(self.transitions[w[:-1], w[1:]].all())

    def assert_admissible(self, word) -> None:
        if not self.is_admissible(word):
            raise AdmissibilityError(f"word {tuple(word)} is not admissible")

    def mixing_gap(self, depth: int = 0) -> int:
        """Smallest N such that for every pair of depth-`depth` cylinders U, V
        and every n >= N the set U intersect f^-n(V) is nonempty.

        Equals the primitivity index plus the window width 2*depth: placing
        two words on windows [-depth, depth] and [n-depth, n+depth] leaves
        n - 2*depth transition steps between them, and every count of steps
        at or beyond the primitivity index connects any symbol to any other.
        """
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        return self._prim_index + 2 * depth

    def _reach_to(self, target_first: int, max_steps: int) -> np.ndarray:
        # reach[t, s]: an admissible path of exactly t transitions goes s -> target_first
        reach = np.zeros((max_steps + 1, self.q), dtype=bool)
        reach[0, target_first] = True
        B = self.transitions > 0
        for t in range(1, max_steps + 1):
            reach[t] = (B & reach[t - 1][None, :]).any(axis=1)
        return reach

    def bridge(self, from_word, to_word, length: int):
        """Lexicographically smallest word w of the given length such that
        from_word + w + to_word is admissible.

        With length 0 the junction must be directly admissible.  A solution
        always exists once length + 1 >= primitivity_index.
        """
        from_word = tuple(int(s) for s in from_word)
        to_word = tuple(int(s) for s in to_word)
        if not from_word or not to_word:
            raise ValueError("bridge requires nonempty junction words")
        self.assert_admissible(from_word)
        self.assert_admissible(to_word)
        last, first = from_word[-1], to_word[0]
        if length < 0:
            raise ValueError("length must be nonnegative")
        if length == 0:
            if self.allowed(last, first):
                return ()
            raise AdmissibilityError(
                f"no admissible junction {last} -> {first} at bridge length 0"
            )
        reach = self._reach_to(first, length)
        word = []
        prev = last
        for i in range(length):
            # after placing w_i there remain length-1-i free symbols, i.e. a
            # path of exactly length-i transitions from w_i to `first`
            chosen = None
            for s in range(self.q):
                if self.allowed(prev, s) and reach[length - i, s]:
                    chosen = s
                    break
            if chosen is None:
                raise AdmissibilityError(
                    f"no admissible bridge of length {length} from {from_word} to {to_word}"
                )
            word.append(chosen)
            prev = chosen
        return tuple(word)

    def words(self, length: int) -> list[tuple]:
        """All admissible words of the given length, lexicographic order."""
        if length < 0:
            raise ValueError("length must be nonnegative")
        if length == 0:
            return [()]
        out: list[tuple] = []
        stack = [(s,) for s in range(self.q - 1, -1, -1)]
        while stack:
            w = stack.pop()
            if len(w) == length:
                out.append(w)
                continue
            for s in range(self.q - 1, -1, -1):
                if self.transitions[w[-1], s]:
                    stack.append(w + (s,))
        return out

    def word_count(self, length: int) -> int:
        """Exact number of admissible words, via transfer-matrix powers."""
        if length <= 0:
            return 1
        if length == 1:
            return self.q
        M = self.transitions.astype(object)
        P = np.linalg.matrix_power(M, length - 1)
        return int(P.sum())

    def spectral_radius(self) -> float:
        return float(np.abs(np.linalg.eigvals(self.transitions.astype(float))).max())

    def enumerate_separated(self, n: int, eps: float, cap: int = 2**22) -> "SeparatedSet":
        """A maximal (n, eps)-separated set for the whole space, as words.

        At dyadic eps = 2^-m two points are separated exactly when their
        words on [-(m-1), n-1+(m-1)] differ, so the admissible words on that
        window form a maximal separated set and their number is s_n(X, eps).
        """
        if n < 1:
            raise ValueError("n must be positive")
        m = dyadic_exponent(eps)
        a, b = separation_window(n, m)
        length = b - a + 1
        count = self.word_count(length)
        if count > cap:
            raise BudgetError(
                f"enumeration needs words of length {length} "
                f"({count} words > cap {cap})"
            )
        return SeparatedSet(n=n, eps=eps, window=(a, b), words=self.words(length))

    def cylinder(self, word, start: int) -> "Cylinder":
        word = tuple(int(s) for s in word)
        self.assert_admissible(word)
        return Cylinder(space=self, a=start, b=start + len(word) - 1, word=word)

    def partition(self, depth: int) -> list["Cylinder"]:
        """Cylinder partition by words on the symmetric window [-depth, depth]."""
        return [self.cylinder(w, -depth) for w in self.words(2 * depth + 1)]

    # -- serialization ----------------------------------------------------
    def to_json(self) -> str:
        return json.dumps(
            {
                "alphabet_size": self.q,
                "transitions": [int(v) for v in self.transitions.ravel()],
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "ShiftSpace":
        doc = json.loads(text)
        q = int(doc["alphabet_size"])
        flat = doc["transitions"]
        if len(flat) != q * q:
            raise ValueError("transitions must be a row-major q*q list")
        return cls(q, np.asarray(flat, dtype=np.int8).reshape(q, q))

    def __repr__(self):
        return f"ShiftSpace(q={self.q})"

    def __eq__(self, other):
        return (
            isinstance(other, ShiftSpace)
            and self.q == other.q
            and np.array_equal(self.transitions, other.transitions)
        )

    def __hash__(self):
        return hash((self.q, self.transitions.tobytes()))


def full_shift(q: int = 2) -> ShiftSpace:
    return ShiftSpace(q, np.ones((q, q), dtype=np.int8))


def golden_mean_shift() -> ShiftSpace:
    """The two-symbol shift forbidding the word 11."""
    return ShiftSpace(2, np.array([[1, 1], [1, 0]], dtype=np.int8))


@dataclass(frozen=True)
class Cylinder:
    """The set of points whose word on [a, b] equals ``word``.

    ``diameter`` is the conventional strict upper bound 2^(-min(|a|,|b|)) on
    pairwise distances inside the cylinder when 0 lies in [a, b]; the exact
    supremum on a full shift is half of that (the nearest unconstrained
    coordinate sits one step beyond the window).
    """

    space: ShiftSpace
    a: int
    b: int
    word: tuple

    def __post_init__(self):
        if len(self.word) != self.b - self.a + 1:
            raise ValueError("word length must match the window")
        self.space.assert_admissible(self.word)

    @property
    def diameter(self) -> float:
        if not self.a <= 0 <= self.b:
            return 1.0
        return 2.0 ** (-min(abs(self.a), abs(self.b)))

    @property
    def strict_diameter_exponent(self) -> int:
        """e such that all pairwise distances are <= 2^-e (exact bound)."""
        if not self.a <= 0 <= self.b:
            return 0
        return min(abs(self.a), abs(self.b)) + 1

    def contains(self, x: "SymbolPoint") -> bool:
        return bool(np.array_equal(x.window(self.a, self.b), np.asarray(self.word)))


@dataclass
class SeparatedSet:
    n: int
    eps: float
    window: tuple[int, int]
    words: list[tuple]

    @property
    def cardinality(self) -> int:
        return len(self.words)


class SymbolPoint:
    """A bi-infinite admissible symbol sequence with total coordinate access.

    Coordinates come from a deterministic rule (same index always yields the
    same symbol) and are cached; exposed consecutive pairs are checked
    against the transition matrix.  Points are immutable and safe to share.
    """

    def __init__(self, space: ShiftSpace, rule, offset: int = 0,
                 provenance: str = "", _cache=None, text: str | None = None):
        self.space = space
        self._rule = rule
        self.offset = offset
        self.provenance = provenance
        self._cache = {} if _cache is None else _cache
        self._text = text

    def __getitem__(self, i: int) -> int:
        j = i + self.offset
        s = self._cache.get(j)
        if s is None:
            s = int(self._rule(j))
            if not 0 <= s < self.space.q:
                raise AdmissibilityError(f"rule produced symbol {s} at index {j}")
            self._cache[j] = s
        return s

    def window(self, a: int, b: int) -> np.ndarray:
        """Symbols on [a, b] inclusive, validated against the transitions."""
        if b < a:
            return np.empty(0, dtype=np.int8)
        w = np.fromiter((self[i] for i in range(a, b + 1)), dtype=np.int8,
                        count=b - a + 1)
        if w.size > 1 and not self.space.transitions[w[:-1], w[1:]].all():
            k = int(np.flatnonzero(self.space.transitions[w[:-1], w[1:]] == 0)[0])
            raise AdmissibilityError(
                f"inadmissible pair ({w[k]}, {w[k+1]}) at index {a + k}"
            )
        return w

    def shift(self, k: int) -> "SymbolPoint":
        """The point f^k(x); shares the coordinate cache with x."""
        if k == 0:
            return self
        return SymbolPoint(self.space, self._rule, self.offset + k,
                           provenance=self.provenance, _cache=self._cache)

    def text(self) -> str | None:
        """Text form for eventually periodic points, else None."""
        if self._text is None or self.offset != 0:
            return None
        return self._text

    def __repr__(self):
        base = self._text or self.provenance or "rule"
        if self.offset:
            return f"SymbolPoint({base}, shifted {self.offset})"
        return f"SymbolPoint({base})"


def periodic_point(space: ShiftSpace, left, core, right, offset: int = 0,
                   provenance: str = "") -> SymbolPoint:
    """Eventually periodic point: ...LLL [core starting at `offset`] RRR...

    ``left`` repeats to fill (-inf, offset) and ``right`` repeats on
    [offset + len(core), +inf); both must be nonempty admissible cycles and
    all seams must be admissible.
    """
    left = tuple(int(s) for s in left)
    core = tuple(int(s) for s in core)
    right = tuple(int(s) for s in right)
    if not left or not right:
        raise ValueError("left and right periodic words must be nonempty")
    for cyc in (left, right):
        space.assert_admissible(cyc + (cyc[0],))
    space.assert_admissible(core)
    head = core[0] if core else right[0]
    if not space.allowed(left[-1], head):
        raise AdmissibilityError("left period does not connect to the core")
    if core and not space.allowed(core[-1], right[0]):
        raise AdmissibilityError("core does not connect to the right period")

    nl, nc, nr = len(left), len(core), len(right)
    lo, hi = offset, offset + nc

    def rule(i, _l=left, _c=core, _r=right):
        if lo <= i < hi:
            return _c[i - lo]
        if i < lo:
            return _l[(i - lo) % nl]
        return _r[(i - hi) % nr]

    text = (f"L({''.join(map(str, left))}) C({''.join(map(str, core))})@{offset} "
            f"R({''.join(map(str, right))})")
    return SymbolPoint(space, rule, provenance=provenance or "periodic", text=text)


def constant_point(space: ShiftSpace, symbol: int) -> SymbolPoint:
    if not space.allowed(symbol, symbol):
        raise AdmissibilityError(f"symbol {symbol} has no self-transition")
    return periodic_point(space, (symbol,), (), (symbol,))


_POINT_RE = re.compile(r"^L\((\d*)\)\s+C\((\d*)\)@(-?\d+)\s+R\((\d*)\)$")


def point_from_text(space: ShiftSpace, text: str) -> SymbolPoint:
    """Parse the text form ``L(w) C(w)@k R(w)`` of an eventually periodic point."""
    m = _POINT_RE.match(text.strip())
    if not m:
        raise ValueError(f"cannot parse point text {text!r}")
    left, core, off, right = m.groups()
    return periodic_point(space, [int(c) for c in left], [int(c) for c in core],
                          [int(c) for c in right], offset=int(off))


def _shortest_bridge(space: ShiftSpace, last: int, first: int) -> tuple:
    for length in range(space.primitivity_index + 1):
        try:
            return space.bridge((last,), (first,), length)
        except AdmissibilityError:
            continue
    raise AdmissibilityError("no bridge within the primitivity bound")


def word_point(space: ShiftSpace, word, start: int = 0) -> SymbolPoint:
    """Deterministic periodic completion of a finite word.

    The word is closed into a cycle by the shortest (then lexicographically
    smallest) bridge from its last symbol back to its first, and that cycle
    is repeated bi-infinitely with the word placed at ``start``.
    """
    word = tuple(int(s) for s in word)
    if not word:
        raise ValueError("word must be nonempty")
    space.assert_admissible(word)
    closure = _shortest_bridge(space, word[-1], word[0])
    period = word + closure
    n = len(period)

    def rule(i, _p=period, _n=n, _s=start):
        return _p[(i - _s) % _n]

    return SymbolPoint(space, rule, provenance=f"word@{start}")


def point_distance(x: SymbolPoint, y: SymbolPoint, window: int = 64) -> DistanceResult:
    """d(x, y) certified on the window [-window, window]."""
    ax = x.window(-window, window)
    ay = y.window(-window, window)
    diff = np.flatnonzero(ax != ay)
    if diff.size == 0:
        return DistanceResult(0.0, certified=False, window=window)
    k = int(np.abs(diff - window).min())
    return DistanceResult(2.0 ** (-k), certified=True, window=window)


def bowen_distance(x: SymbolPoint, y: SymbolPoint, n: int, window: int = 64) -> DistanceResult:
    """d_n(x, y) = max over 0 <= i < n of d(f^i x, f^i y).

    Scans the window [-window, n-1+window].  Equals 2^-e where e is the
    smallest distance from a disagreement index to the interval [0, n-1];
    with no disagreement in the window the result is a window-limited zero.
    """
    if n < 1:
        raise ValueError("n must be positive")
    a, b = -window, n - 1 + window
    ax = x.window(a, b)
    ay = y.window(a, b)
    diff = np.flatnonzero(ax != ay) + a
    if diff.size == 0:
        return DistanceResult(0.0, certified=False, window=window)
    dist = np.maximum(0, np.maximum(-diff, diff - (n - 1)))
    return DistanceResult(2.0 ** (-int(dist.min())), certified=True, window=window)
