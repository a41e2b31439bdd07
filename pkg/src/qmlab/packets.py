"""Wavelet-packet combinatorics: tilings of the nonnegative integers by
scaled index blocks, expansion coefficients of the packet basis change, and
desk-scale cascade synthesis of the packet functions on dyadic grids.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HorizonError, ResourceCapError, UnsupportedBankError
from .filters import SQRT2, FilterBank
from .operators import SparseSequence, apply_S_star

DEFAULT_HORIZON = 2 ** 16


@dataclass(frozen=True)
class Tiling:
    """Candidate pairs (p, n); each claims the block [2^p n, 2^p (n+1))."""

    pairs: frozenset[tuple[int, int]]
    horizon: int = DEFAULT_HORIZON

    def __post_init__(self):
        h = self.horizon
        if h < 1 or h & (h - 1):
            raise ValueError("horizon must be a power of two")
        for p, n in self.pairs:
            if p < 0 or n < 0:
                raise ValueError("pairs must be nonnegative")

    @classmethod
    def from_pairs(cls, pairs, horizon: int = DEFAULT_HORIZON) -> "Tiling":
        return cls(frozenset((int(p), int(n)) for p, n in pairs), horizon)


@dataclass(frozen=True)
class TilingReport:
    valid: bool
    violation: int | None = None     # smallest uncovered / multiply covered m
    kind: str | None = None          # "gap" or "overlap"

    def __str__(self):
        if self.valid:
            return "valid"
        return f"invalid: {self.kind} at {self.violation}"


def validate_tiling(tiling: Tiling) -> TilingReport:
    """Exact coverage check of [0, horizon) by the claimed blocks.

    A block crossing the horizon is rejected outright (enlarge the horizon);
    duplicated pairs count as overlaps.
    """
    h = tiling.horizon
    counts = np.zeros(h, dtype=np.int64)
    for p, n in tiling.pairs:
        start = (1 << p) * n
        end = (1 << p) * (n + 1)
        if end > h:
            raise HorizonError(
                f"block [{start}, {end}) crosses the horizon {h}")
        counts[start:end] += 1
    bad = np.flatnonzero(counts != 1)
    if len(bad) == 0:
        return TilingReport(True)
    m = int(bad[0])
    return TilingReport(False, m, "gap" if counts[m] == 0 else "overlap")


def classic_tiling(horizon: int = DEFAULT_HORIZON) -> Tiling:
    """{(0,0)} plus {(p,1)}: the octave-band splitting, with the unit cell
    at zero included so the blocks cover everything from 0 on."""
    pairs = [(0, 0)]
    p = 0
    while (1 << (p + 1)) <= horizon:
        pairs.append((p, 1))
        p += 1
    return Tiling.from_pairs(pairs, horizon)


def singleton_tiling(horizon: int = DEFAULT_HORIZON) -> Tiling:
    """All unit cells: {(0, n)} for n = 0..horizon-1 (no scaling used)."""
    return Tiling.from_pairs([(0, n) for n in range(horizon)], horizon)


def refine_pair(tiling: Tiling, pair: tuple[int, int]) -> Tiling:
    """Replace (p, n) by its two children (p-1, 2n), (p-1, 2n+1)."""
    p, n = pair
    if pair not in tiling.pairs:
        raise ValueError(f"{pair} is not in the tiling")
    if p == 0:
        raise ValueError("unit cells cannot be refined")
    pairs = set(tiling.pairs)
    pairs.remove(pair)
    pairs.update({(p - 1, 2 * n), (p - 1, 2 * n + 1)})
    return Tiling(frozenset(pairs), tiling.horizon)


def packet_index(p: int, n: int, word) -> int:
    """m = 2^p n + i_1 + 2 i_2 + ... + 2^(p-1) i_p; ranges over the block
    [2^p n, 2^p (n+1)) as the binary word varies."""
    word = tuple(int(d) for d in word)
    if len(word) != p:
        raise ValueError(f"word length {len(word)} does not match p = {p}")
    if any(d not in (0, 1) for d in word):
        raise ValueError("digits must be binary")
    return (n << p) + sum(d << j for j, d in enumerate(word))


@dataclass(frozen=True)
class CoefficientMap:
    """Coefficients <e_j | S*_{i_p} ... S*_{i_1} e_k> keyed by (word, j)."""

    p: int
    source: int
    entries: dict[tuple[tuple[int, ...], int], complex]

    def word_entries(self, word) -> dict[int, complex]:
        word = tuple(int(d) for d in word)
        return {j: v for (w, j), v in self.entries.items() if w == word}

    def word_marginal(self, word) -> float:
        return float(sum(abs(v) ** 2 for v in self.word_entries(word).values()))

    def total(self) -> float:
        return float(sum(abs(v) ** 2 for v in self.entries.values()))


def expansion_coefficients(bank: FilterBank, p: int, k: int,
                           cap: int = 12,
                           prune: float = 1e-15) -> CoefficientMap:
    """All words of length p applied to e_k; entries below the prune
    threshold are dropped (coefficients vanish outside a finite j-range for
    finite filters, so the stored map is exact up to the prune level)."""
    if bank.n_branches != 2:
        raise UnsupportedBankError("packet coefficients use two branches")
    if p > cap:
        raise ResourceCapError(f"p = {p} exceeds the cap {cap}")
    entries: dict[tuple[tuple[int, ...], int], complex] = {}
    stack = [((), SparseSequence.basis(k))]
    while stack:
        word, xi = stack.pop()
        if len(word) == p:
            for j, v in xi.entries.items():
                if abs(v) >= prune:
                    entries[(word, j)] = v
            continue
        for d in (0, 1):
            stack.append((word + (d,), apply_S_star(bank.branches[d], xi)))
    return CoefficientMap(p, k, entries)


def _two_scale_step(values: np.ndarray, coeffs, stride: int) -> np.ndarray:
    """One application of f -> sqrt2 sum_k c_k f(2x - k) to a piecewise
    constant f; halves the cell width, so the integer shift k moves by
    `stride` cells of the input grid."""
    coeffs = np.asarray(coeffs, dtype=complex)
    out = np.zeros(len(values) + (len(coeffs) - 1) * stride, dtype=complex)
    for k, c in enumerate(coeffs):
        if c != 0:
            out[k * stride: k * stride + len(values)] += SQRT2 * c * values
    return out


def cascade(bank: FilterBank, n: int, iterations: int,
            resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Sampled iteration-t approximation to the packet function with index n.

    Starts from the indicator of the unit interval, runs the low-pass
    two-scale map until the binary digits of n take over (most significant
    digit first), and resamples onto `resolution` cells per unit length.
    Returns (left cell edges, values).
    """
    if bank.n_branches != 2:
        raise UnsupportedBankError("cascade synthesis uses two branches")
    if n < 0:
        raise ValueError("packet index must be nonnegative")
    if not 0 < iterations <= 20:
        raise ValueError("iterations must be in 1..20")
    if resolution < 1 or resolution & (resolution - 1):
        raise ValueError("resolution must be a power of two")
    digits = [int(b) for b in bin(n)[2:]] if n > 0 else []
    if len(digits) > iterations:
        raise ValueError(f"need at least {len(digits)} iterations for index {n}")
    schedule = [0] * (iterations - len(digits)) + digits
    values = np.ones(1, dtype=complex)
    for t, d in enumerate(schedule):
        values = _two_scale_step(values, bank.branches[d], 1 << t)
    step = 1 << iterations
    support = max(len(b) for b in bank.branches) - 1
    support = max(support, 1)
    full = np.zeros(support * step, dtype=complex)
    full[: len(values)] = values[: len(full)]
    if resolution <= step:
        factor = step // resolution
        full = full.reshape(-1, factor).mean(axis=1)
    else:
        full = np.repeat(full, resolution // step)
    values = np.real_if_close(full, tol=1000)
    xs = np.arange(len(values)) / float(resolution)
    return xs, values
