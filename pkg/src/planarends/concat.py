"""Infinite configurations as words over a finite library of compatible blocks.

Block m of the word occupies levels phi_m .. phi_m + h_m with phi_0 = 0 and
phi_{m+1} = phi_m + h_m; consecutive blocks share their seam point. An index
rule (periodic, substitution fixed point, or explicit window) says which
library block sits at position m.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import balance
from .balance import FiniteConfiguration, certify, residual_force
from .configspace import Configuration, _parse_pair

COMPAT_TOL = 1e-10


class IncompatibleBlocksError(ValueError):
    pass


class WindowNotCoverableError(ValueError):
    pass


# ---------------------------------------------------------------------------
# index rules


@dataclass(frozen=True)
class Periodic:
    word: tuple

    def __post_init__(self):
        word = tuple(int(x) for x in self.word)
        if not word:
            raise ValueError("periodic word must be non-empty")
        object.__setattr__(self, "word", word)

    def letters(self):
        return set(self.word)

    def indices(self, m_lo, m_hi):
        m = np.arange(m_lo, m_hi + 1)
        return np.asarray(self.word, dtype=np.int64)[m % len(self.word)]

    def minimal_period(self):
        w = np.asarray(self.word)
        L = len(w)
        for T in range(1, L + 1):
            if L % T == 0 and np.array_equal(w, np.roll(w, -T)):
                return T
        return L


@dataclass(frozen=True)
class Substitution:
    """Two-sided fixed point of a non-erasing substitution.

    ``seed = (left, right)``: positions m >= 0 read sigma^infinity(right),
    positions m < 0 read sigma^infinity(left) from its end. A power p is used
    so that sigma^p(right) starts with right and sigma^p(left) ends with left.
    """

    rules: tuple
    seed: tuple
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        rules = self.rules
        if isinstance(rules, dict):
            rules = tuple(sorted((int(a), tuple(int(x) for x in img)) for a, img in rules.items()))
        object.__setattr__(self, "rules", tuple((int(a), tuple(img)) for a, img in rules))
        table = dict(self.rules)
        if any(len(img) == 0 for img in table.values()):
            raise ValueError("substitution must be non-erasing")
        for img in table.values():
            missing = set(img) - set(table)
            if missing:
                raise ValueError(f"letters {sorted(missing)} have no rule")
        left, right = (int(x) for x in self.seed)
        if left not in table or right not in table:
            raise ValueError("seed letters must have rules")
        object.__setattr__(self, "seed", (left, right))
        object.__setattr__(self, "_cache", {})
        self.power  # validates the seed

    @property
    def table(self):
        return dict(self.rules)

    def apply(self, word, times=1):
        table = self.table
        for _ in range(times):
            word = [x for a in word for x in table[a]]
        return word

    @property
    def power(self):
        if "power" not in self._cache:
            table = self.table
            left, right = self.seed
            nl = len(table)
            for p in range(1, 2 * nl + 1):
                a, b = right, left
                for _ in range(p):
                    a, b = table[a][0], table[b][-1]
                if a == right and b == left:
                    grows = len(self.apply([right], p * nl + 1)) > len(self.apply([right], p)) and \
                        len(self.apply([left], p * nl + 1)) > len(self.apply([left], p))
                    if not grows:
                        raise ValueError("seed words do not grow under the substitution")
                    self._cache["power"] = p
                    break
            else:
                raise ValueError("seed does not generate a two-sided fixed point")
        return self._cache["power"]

    def letters(self):
        return set(self.table)

    def _sides(self, n_right, n_left):
        p = self.power
        right = self._cache.get("right", [self.seed[1]])
        left = self._cache.get("left", [self.seed[0]])
        while len(right) < n_right:
            right = self.apply(right, p)
        while len(left) < n_left:
            left = self.apply(left, p)
        self._cache["right"], self._cache["left"] = right, left
        return right, left

    def indices(self, m_lo, m_hi):
        right, left = self._sides(max(m_hi + 1, 1), max(-m_lo, 1))
        out = np.empty(m_hi - m_lo + 1, dtype=np.int64)
        m = np.arange(m_lo, m_hi + 1)
        pos = m >= 0
        out[pos] = np.asarray(right, dtype=np.int64)[m[pos]]
        out[~pos] = np.asarray(left, dtype=np.int64)[len(left) + m[~pos]]
        return out

    def recurrent_letters(self):
        """Letters occurring infinitely often in the fixed point."""
        table = self.table
        letters = sorted(table)
        pos = {a: j for j, a in enumerate(letters)}
        M = [[0] * len(letters) for _ in letters]
        for a, img in table.items():
            for x in img:
                M[pos[x]][pos[a]] += 1

        def step(v):
            return [sum(M[i][j] * v[j] for j in range(len(v))) for i in range(len(v))]

        v = [0] * len(letters)
        for s in self.seed:
            v[pos[s]] += 1
        J = 2 * len(letters) + 2
        mid = None
        for j in range(2 * J):
            v = step(v)
            if j == J - 1:
                mid = list(v)
        return {a for a in letters if v[pos[a]] > mid[pos[a]]}


@dataclass(frozen=True)
class Explicit:
    """Blocks m_min .. m_min + len(indices) - 1; outside, ``fill`` or undefined."""

    m_min: int
    indices: tuple
    fill: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(x) for x in self.indices))
        if not self.indices:
            raise ValueError("explicit word must be non-empty")

    @property
    def m_max(self):
        return self.m_min + len(self.indices) - 1

    def letters(self):
        s = set(self.indices)
        if self.fill is not None:
            s.add(self.fill)
        return s

    def indices_at(self, m):
        if self.m_min <= m <= self.m_max:
            return self.indices[m - self.m_min]
        if self.fill is None:
            raise WindowNotCoverableError(
                f"block {m} outside the explicit range [{self.m_min}, {self.m_max}]"
            )
        return self.fill

    def indices_range(self, m_lo, m_hi):
        return np.array([self.indices_at(m) for m in range(m_lo, m_hi + 1)], dtype=np.int64)


def rule_indices(rule, m_lo, m_hi):
    if isinstance(rule, Explicit):
        return rule.indices_range(m_lo, m_hi)
    return rule.indices(m_lo, m_hi)


# ---------------------------------------------------------------------------
# words


@dataclass(frozen=True, eq=False)
class BlockWord:
    library: tuple
    rule: object
    tol: float = COMPAT_TOL

    def __post_init__(self):
        lib = tuple(self.library)
        if not lib:
            raise ValueError("block library is empty")
        object.__setattr__(self, "library", lib)
        res = [residual_force(b) for b in lib]
        for j, r in enumerate(res):
            if abs(r - res[0]) > self.tol * max(1.0, abs(res[0])):
                raise IncompatibleBlocksError(
                    f"block {j} has residual force {r}, block 0 has {res[0]}"
                )
        bad = {x for x in self.rule.letters() if not 0 <= x < len(lib)}
        if bad:
            raise ValueError(f"rule uses indices {sorted(bad)} outside the library")

    @property
    def residual(self):
        return residual_force(self.library[0])

    def index_at(self, m):
        return int(rule_indices(self.rule, m, m)[0])

    def block_at(self, m):
        return self.library[self.index_at(m)]


@dataclass(frozen=True)
class ConcatPlan:
    """Blocks m_lo..m_hi with their level offsets phi_m and translations."""

    m_lo: int
    blocks: tuple
    offsets: tuple
    translations: tuple

    @property
    def m_hi(self):
        return self.m_lo + len(self.blocks) - 1


def plan(word: BlockWord, k_lo, k_hi) -> ConcatPlan:
    """Blocks whose levels meet [k_lo, k_hi]; block 0 starts at the origin."""
    if k_hi < k_lo:
        raise ValueError("empty level window")
    lib = word.library
    entries = []
    # forward: block m spans phi .. phi + h
    m, phi, start = 0, 0, 0j
    while phi <= k_hi:
        idx = word.index_at(m)
        b = lib[idx]
        tr = start - b.first
        if phi + b.height >= k_lo:
            entries.append((m, idx, phi, tr))
        start = b.last + tr
        phi += b.height
        m += 1
    # backward: block m spans end - h .. end
    back = []
    m, end, stop = -1, 0, 0j
    while end > k_lo:
        idx = word.index_at(m)
        b = lib[idx]
        tr = stop - b.last
        phi = end - b.height
        if phi <= k_hi:
            back.append((m, idx, phi, tr))
        stop = b.first + tr
        end = phi
        m -= 1
    entries = back[::-1] + entries
    return ConcatPlan(
        entries[0][0],
        tuple(e[1] for e in entries),
        tuple(e[2] for e in entries),
        tuple(e[3] for e in entries),
    )


def concatenate(word: BlockWord, window) -> Configuration:
    """Realize the word over the level window (k_lo, k_hi), seams stored once."""
    k_lo, k_hi = (int(x) for x in window)
    pl = plan(word, k_lo, k_hi)
    levels = {}
    prev_last = None
    for idx, phi, tr in zip(pl.blocks, pl.offsets, pl.translations):
        b = word.library[idx]
        for k, lv in enumerate(b.levels):
            kk = phi + k
            pts = lv + tr
            if k == 0 and prev_last is not None:
                pts = np.array([prev_last])
            if k_lo <= kk <= k_hi:
                levels[kk] = pts
        prev_last = b.last + tr
    return Configuration.from_points(levels)


def certify_word(word: BlockWord, **kw):
    """Uniform certificate: the minimum of the per-block certificates."""
    if not word.library:
        raise ValueError("block library is empty")
    used = sorted(word.rule.letters())
    certs = {j: certify(word.library[j], **kw) for j in used}
    failed = [j for j, c in certs.items() if not c.passed]
    if failed:
        raise balance.BalanceError(f"blocks {failed} fail their certificates")
    return UniformCertificate(min(c.sigma_min for c in certs.values()), certs)


@dataclass
class UniformCertificate:
    sigma_min: float
    blocks: dict

    @property
    def passed(self):
        return self.sigma_min > 0 and all(c.passed for c in self.blocks.values())

    def to_json(self):
        return {
            "sigma_min": self.sigma_min,
            "pass": self.passed,
            "blocks": {str(j): c.to_json() for j, c in self.blocks.items()},
        }


# ---------------------------------------------------------------------------
# periodicity


@dataclass
class PeriodicityVerdict:
    kind: str  # "periodic", "quasiperiodic" or "not_detected"
    period: int | None = None
    witnesses: list = field(default_factory=list)
    max_window: int = 0
    max_shift: int = 0
    exact_shift: int | None = None

    def to_json(self):
        return {
            "kind": self.kind,
            "period": self.period,
            "witnesses": [{"window": w, "shift": T} for w, T in self.witnesses],
            "bounds": {"max_window": self.max_window, "max_shift": self.max_shift},
            "exact_shift": self.exact_shift,
        }


def recurrence_witnesses(seq, centre, max_window, max_shift):
    """For each w <= max_window the least T in 1..max_shift with
    seq[centre + m + T] == seq[centre + m] for all |m| <= w (None if absent).

    ``seq`` must cover centre - max_window .. centre + max_window + max_shift.
    """
    seq = np.asarray(seq)
    shifts = np.arange(1, max_shift + 1)
    alive = seq[centre + shifts] == seq[centre]
    out = []
    for w in range(0, max_window + 1):
        if w > 0:
            for m in (-w, w):
                alive &= seq[centre + m + shifts] == seq[centre + m]
        hits = np.flatnonzero(alive)
        out.append((w, int(shifts[hits[0]]) if hits.size else None))
    return out


def classify(word: BlockWord, max_window=32, max_shift=10946):
    rule = word.rule
    if isinstance(rule, Periodic):
        return PeriodicityVerdict("periodic", period=rule.minimal_period(),
                                  max_window=max_window, max_shift=max_shift,
                                  exact_shift=rule.minimal_period())
    if isinstance(rule, Explicit):
        return PeriodicityVerdict("not_detected", max_window=max_window, max_shift=max_shift)
    lo, hi = -max_window, max_window + max_shift
    seq = rule_indices(rule, lo, hi)
    found = recurrence_witnesses(seq, -lo, max_window, max_shift)
    # an exact period would repeat the whole generated range
    exact = None
    n = len(seq)
    for T in range(1, min(max_shift, n // 2) + 1):
        if np.array_equal(seq[T:], seq[:n - T]):
            exact = T
            break
    if exact is not None:
        return PeriodicityVerdict("periodic", period=exact, max_window=max_window,
                                  max_shift=max_shift, exact_shift=exact)
    wit = [(w, T) for w, T in found if w >= 1]
    if all(T is not None for _, T in wit):
        return PeriodicityVerdict("quasiperiodic", witnesses=wit, max_window=max_window,
                                  max_shift=max_shift)
    return PeriodicityVerdict("not_detected", witnesses=[(w, T) for w, T in wit if T],
                              max_window=max_window, max_shift=max_shift)


# ---------------------------------------------------------------------------
# genus


def block_genus(fc: FiniteConfiguration):
    return sum(n - 1 for n in fc.sizes)


def genus(word: BlockWord, window=None):
    """sum (n_k - 1), or "infinite" when a block with n_k >= 2 recurs forever.

    Without a window the whole word is summed (finite only for explicit words
    whose fill block, if any, is a chain).
    """
    wide = {j for j, b in enumerate(word.library) if block_genus(b) > 0}
    rule = word.rule
    if isinstance(rule, Periodic):
        recurring = set(rule.word)
    elif isinstance(rule, Substitution):
        recurring = rule.recurrent_letters()
    else:
        recurring = {rule.fill} if rule.fill is not None else set()
    if recurring & wide:
        return "infinite"
    if window is not None:
        cfg = concatenate(word, window)
        return sum(n - 1 for n in cfg.sizes)
    if not isinstance(rule, Explicit):
        return 0
    return sum(block_genus(word.library[j]) for j in rule.indices)


# ---------------------------------------------------------------------------
# word files


def _block_ref(ref):
    if not isinstance(ref, dict):
        raise ValueError(f"block reference must be an object, got {ref!r}")
    if "builtin" in ref:
        extra = set(ref) - {"builtin", "params", "scale", "scale_to"}
        if extra:
            raise ValueError(f"unknown block reference fields {sorted(extra)}")
        fc = balance.builtin(ref["builtin"], **ref.get("params", {}))
        if "scale" in ref:
            s = ref["scale"]
            fc = balance.scale(fc, _parse_pair(s, "scale") if isinstance(s, list) else float(s))
        if "scale_to" in ref:
            fc = balance.scale_to(fc, _parse_pair(ref["scale_to"], "scale_to"))
        return fc
    return balance.block_from_json(ref)


def rule_from_json(obj):
    kind = obj.get("kind")
    if kind == "periodic":
        return Periodic(tuple(obj["word"]))
    if kind == "substitution":
        return Substitution({int(a): img for a, img in obj["rules"].items()}, tuple(obj["seed"]))
    if kind == "explicit":
        return Explicit(int(obj.get("m_min", 0)), tuple(obj["indices"]), obj.get("fill"))
    raise ValueError(f"unknown rule kind {kind!r}")


def rule_to_json(rule):
    if isinstance(rule, Periodic):
        return {"kind": "periodic", "word": list(rule.word)}
    if isinstance(rule, Substitution):
        return {"kind": "substitution", "rules": {str(a): list(img) for a, img in rule.rules},
                "seed": list(rule.seed)}
    out = {"kind": "explicit", "m_min": rule.m_min, "indices": list(rule.indices)}
    if rule.fill is not None:
        out["fill"] = rule.fill
    return out


def word_from_json(obj) -> BlockWord:
    """Parse {"library": [refs], "rule": {...}, "target_residual": [re, im]?}."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    extra = set(obj) - {"library", "rule", "target_residual"}
    if extra:
        raise ValueError(f"unknown word fields {sorted(extra)}")
    lib = [_block_ref(r) for r in obj["library"]]
    if "target_residual" in obj:
        lib = balance.make_compatible(lib, _parse_pair(obj["target_residual"], "target_residual"))
    return BlockWord(tuple(lib), rule_from_json(obj["rule"]))


def word_to_json(word: BlockWord):
    return {
        "library": [balance.block_to_json(b, name=f"block{j}") for j, b in enumerate(word.library)],
        "rule": rule_to_json(word.rule),
    }


def verdict_summary(v: PeriodicityVerdict):
    if v.kind == "periodic":
        return f"periodic with minimal period {v.period}"
    if v.kind == "quasiperiodic":
        worst = max(T for _, T in v.witnesses)
        return (f"recurrent: witnesses for windows 1..{v.max_window}, "
                f"largest least shift {worst} (searched <= {v.max_shift})")
    return f"no recurrence detected within windows <= {v.max_window}, shifts <= {v.max_shift}"

