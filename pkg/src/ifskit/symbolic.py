"""Words, symbol streams, weak-hyperbolicity certificates and target-set samples.

Composition order matters here.  This module works in CODING order: for a
word ``w = w0 w1 ... w(n-1)`` the composition is ``f_w0 o f_w1 o ... o f_w(n-1)``,
so the LAST symbol's map is applied FIRST.  Appending a symbol composes on the
right and can only shrink the image of the domain.  The chaos game
(:mod:`ifskit.chaos`) uses the opposite order.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import NoCertificateError, StreamExhaustedError
from .hutchinson import bh_iterate
from .sets import Box


class Word(tuple):
    """Finite word over ``{1, ..., k}``; the empty word is the identity."""

    def __new__(cls, symbols=()):
        if isinstance(symbols, str):
            # "121" for k < 10, "1.12.3" when symbols need more than one digit
            parts = symbols.split(".") if "." in symbols else list(symbols.strip())
            symbols = [int(p) for p in parts if p]
        return super().__new__(cls, (int(s) for s in symbols))

    def __add__(self, other):
        return Word(tuple(self) + tuple(other))

    def __getitem__(self, item):
        out = super().__getitem__(item)
        return Word(out) if isinstance(item, slice) else out

    def reversed(self):
        return Word(self[::-1])

    def check(self, k):
        bad = [s for s in self if not 1 <= s <= k]
        if bad:
            raise ValueError(f"symbols {bad} out of range 1..{k}")
        return self

    def __str__(self):
        if all(s < 10 for s in self):
            return "".join(map(str, self))
        return ".".join(map(str, self))

    def __repr__(self):
        return f"Word({str(self)!r})"


# -- streams -------------------------------------------------------------------
class SymbolStream:
    """An infinite (or, for :class:`Explicit`, finite) symbol sequence."""

    length = None

    def take(self, n):
        """First ``n`` symbols as an int64 array (1-based symbols)."""
        raise NotImplementedError


@dataclass(frozen=True)
class Periodic(SymbolStream):
    word: Word

    def __post_init__(self):
        object.__setattr__(self, "word", Word(self.word))
        if not self.word:
            raise ValueError("periodic stream needs a non-empty word")

    def take(self, n):
        w = np.array(self.word, dtype=np.int64)
        return np.resize(w, n)


@dataclass(frozen=True)
class Disjunctive(SymbolStream):
    """All words over ``{1..k}`` concatenated by length, then lexicographically."""

    k: int

    def take(self, n):
        return disjunctive_array(self.k, n)


@dataclass(frozen=True)
class Random(SymbolStream):
    """I.i.d. symbols drawn by inverse CDF from a counter-based generator."""

    seed: int
    weights: tuple

    def __post_init__(self):
        w = tuple(float(v) for v in self.weights)
        if any(v <= 0 for v in w) or abs(sum(w) - 1) > 1e-12:
            raise ValueError(f"invalid weights {w}")
        object.__setattr__(self, "weights", w)

    def take(self, n):
        rng = np.random.Generator(np.random.Philox(key=self.seed))
        u = rng.random(n)
        cdf = np.cumsum(self.weights)
        idx = np.searchsorted(cdf, u, side="right")
        return np.minimum(idx, len(self.weights) - 1).astype(np.int64) + 1


@dataclass(frozen=True)
class Explicit(SymbolStream):
    symbols: Word

    def __post_init__(self):
        object.__setattr__(self, "symbols", Word(self.symbols))

    @property
    def length(self):
        return len(self.symbols)

    def take(self, n):
        if n > len(self.symbols):
            raise StreamExhaustedError(f"explicit stream has {len(self.symbols)} symbols, {n} requested")
        return np.array(self.symbols[:n], dtype=np.int64)


def random_stream(S, seed):
    """Random stream with the IFS weights (uniform when the IFS has none)."""
    w = S.weights if S.weights is not None else (1.0 / S.k,) * S.k
    return Random(seed, w)


def disjunctive_array(k, n):
    out = []
    total, length = 0, 1
    while total < n:
        # base-k digits of 0..k^L-1 give the length-L words in lexicographic order
        count = k ** length
        codes = np.arange(count, dtype=np.int64)
        digits = np.empty((count, length), dtype=np.int64)
        for j in range(length - 1, -1, -1):
            digits[:, j] = codes % k
            codes //= k
        flat = digits.ravel() + 1
        out.append(flat[: n - total])
        total += flat.size
        length += 1
    return np.concatenate(out)[:n] if out else np.zeros(0, dtype=np.int64)


def disjunctive_prefix(k, n):
    """First ``n`` symbols of the canonical disjunctive sequence over ``{1..k}``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Word(disjunctive_array(k, n).tolist())


# -- coding-order images ----------------------------------------------------------
def _clip_box(S, lo, hi):
    return np.clip(lo, S.domain.lo, S.domain.hi), np.clip(hi, S.domain.lo, S.domain.hi)


def coding_composition_image(S, w):
    """Enclosure of ``f_w0 o ... o f_w(n-1) (X)``; the last symbol acts first."""
    w = Word(w).check(S.k)
    lo, hi = S.domain.lo[None, :], S.domain.hi[None, :]
    for s in reversed(w):
        lo, hi = S.maps[s - 1].image_bounds(lo, hi)
        lo, hi = _clip_box(S, lo, hi)
    return Box(lo[0], hi[0])


def batch_coding_images(S, words):
    """Coding-order enclosures for an ``(N, L)`` array of equal-length words."""
    words = np.asarray(words, dtype=np.int64)
    n = words.shape[0]
    lo = np.repeat(S.domain.lo[None, :], n, axis=0)
    hi = np.repeat(S.domain.hi[None, :], n, axis=0)
    for col in range(words.shape[1] - 1, -1, -1):
        sym = words[:, col]
        for i, f in enumerate(S.maps, start=1):
            rows = sym == i
            if rows.any():
                lo[rows], hi[rows] = f.image_bounds(lo[rows], hi[rows])
        lo, hi = _clip_box(S, lo, hi)
    return lo, hi


def _diameters(lo, hi):
    return np.sqrt(np.sum((hi - lo) ** 2, axis=1))


def coding_eval(S, w, x):
    """Evaluate ``f_w0 o ... o f_w(n-1)`` at points ``x`` (clipped like the orbit kernel)."""
    x = np.atleast_2d(np.asarray(x, dtype=float)).reshape(-1, S.dimension)
    for s in reversed(Word(w).check(S.k)):
        x = S.apply(s, x)
    return x


# -- certification ------------------------------------------------------------------
@dataclass(frozen=True)
class Certified:
    prefix_length: int
    box: Box
    word: Word


@dataclass(frozen=True)
class Undetermined:
    """No certificate within budget.  This does NOT show the sequence is not weakly hyperbolic."""

    budget: int
    diameter: float


def certify_weak_hyperbolic(S, stream, eps, budget=1000):
    """Shortest prefix whose coding-order image has diameter at most ``eps``.

    The image diameter is non-increasing in the prefix length, so the search
    doubles the length until it certifies and then bisects.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    limit = budget
    if stream.length is not None and stream.length < budget:
        limit = stream.length
    cache = {}

    def diam(n):
        if n not in cache:
            w = Word(stream.take(n).tolist())
            box = coding_composition_image(S, w)
            cache[n] = (box.diameter, box, w)
        return cache[n][0]

    hi = 1
    while hi < limit and diam(hi) > eps:
        hi = min(2 * hi, limit)
    if limit < 1 or diam(hi) > eps:
        if limit < budget:
            raise StreamExhaustedError(
                f"explicit stream exhausted after {limit} symbols without a certificate")
        return Undetermined(budget, diam(limit) if limit >= 1 else S.domain.diameter)
    lo = hi // 2  # diam(lo) > eps, or lo == 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if diam(mid) <= eps:
            hi = mid
        else:
            lo = mid
    _, box, w = cache[hi]
    return Certified(hi, box, w)


@dataclass(frozen=True)
class CertifiedTargetPoint:
    """Approximation of ``pi(w...)`` valid for every continuation of ``word``."""

    point: tuple
    word: Word
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "point", tuple(float(v) for v in np.atleast_1d(self.point)))
        if self.radius < 0:
            raise ValueError("radius must be non-negative")


def coding_point(S, stream, eps, budget=1000):
    res = certify_weak_hyperbolic(S, stream, eps, budget)
    if isinstance(res, Undetermined):
        raise NoCertificateError(
            f"no prefix certified at eps={eps} within {budget} symbols (diameter {res.diameter:.3g})")
    return CertifiedTargetPoint(res.box.center, res.word, res.box.diameter)


def target_sample(S, max_len, eps, grid=None, blocks=None):
    """Certified target points from words of length at most ``max_len``.

    Words grow on the right (coding order); a branch stops as soon as its
    image diameter drops to ``eps`` and emits its certificate.  ``blocks``
    restricts words to concatenations of the given words.  With ``grid``,
    points sharing a cell are deduplicated, keeping the lexicographically
    first word.  An empty result is a valid answer.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    if blocks is None:
        blocks = [Word((i,)) for i in range(1, S.k + 1)]
    blocks = [Word(b).check(S.k) for b in blocks]
    min_block = min(len(b) for b in blocks)
    found = []
    frontier = [Word()]
    while frontier:
        children = [w + b for w in frontier for b in blocks if len(w) + len(b) <= max_len]
        frontier = []
        by_len = {}
        for c in children:
            by_len.setdefault(len(c), []).append(c)
        for length, group in by_len.items():
            lo, hi = batch_coding_images(S, np.array(group, dtype=np.int64))
            d = _diameters(lo, hi)
            for j in np.flatnonzero(d <= eps):
                found.append(CertifiedTargetPoint((lo[j] + hi[j]) / 2, group[j], float(d[j])))
            frontier.extend(group[j] for j in np.flatnonzero(d > eps) if length + min_block <= max_len)
    found.sort(key=lambda t: tuple(t.word))
    if grid is None:
        return found
    seen, out = set(), []
    for t in found:
        key = tuple(grid.cell_of(np.array(t.point))[0])
        if key not in seen:
            seen.add(key)
            out.append(t)
    return out


def find_seed(S, grid, max_len=16, budget=2000):
    """A certified target point good to one grid unit: fixed points of single
    maps first, then the first word of a target sample."""
    for i in range(1, S.k + 1):
        res = certify_weak_hyperbolic(S, Periodic(Word((i,))), grid.unit, budget)
        if isinstance(res, Certified):
            return CertifiedTargetPoint(res.box.center, res.word, res.box.diameter)
    sample = target_sample(S, max_len, grid.unit)
    if not sample:
        raise NoCertificateError(f"S_wh empty at budget: no word of length <= {max_len} certifies")
    return sample[0]


def semifractal_approx(S, seed, grid, n=200, tol=None, reference=None):
    """Iterate B from the singleton cell of a certified target point.

    The iterates converge to the closure of the target set; the final set is
    the canonical approximation of the semifractal.
    """
    point = seed.point if isinstance(seed, CertifiedTargetPoint) else seed
    return bh_iterate(S, grid.singleton(point), n, tol=tol, reference=reference)


def target_points_csv(points):
    lines = ["word,coordinates,radius"]
    for t in points:
        coords = " ".join(f"{v:.17g}" for v in t.point)
        lines.append(f"{t.word},{coords},{t.radius:.17g}")
    return "\n".join(lines) + "\n"


def words_up_to(k, n):
    """All words over ``{1..k}`` of length 1..n in length-lexicographic order."""
    for length in range(1, n + 1):
        for w in itertools.product(range(1, k + 1), repeat=length):
            yield Word(w)
