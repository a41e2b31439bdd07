"""The subdivision measure on N-adic intervals.

Each digit word (i_1, ..., i_k) addresses the interval
[xi, xi + N^{-k}) with xi = sum_j i_j N^{-j}; its mass is the squared norm
of e_0 pushed through the compressed adjoints, || F_{i_k} ... F_{i_1} e_0 ||^2,
which agrees with the full sequence-space computation because the window is
invariant.  Everything else here (grids, bounds, asymptotic ratio scans,
density scans) is bookkeeping around that product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ResourceCapError, UnsupportedBankError
from .filters import SQRT2, FilterBank
from .operators import SparseSequence, apply_word_star, restrict_to_M
from .spectral import dominant_eigendata, find_dominant, spectrum_F0

#: orbit components below this are structural zeros (exact-zero digit paths);
#: clamping avoids denormal churn on deep grids.
ZERO_CLAMP = 1e-300

DEFAULT_GRID_CAP = 3 ** 12


@dataclass(frozen=True)
class NAdicInterval:
    """Base-N interval [sum i_j N^-j, sum i_j N^-j + N^-k)."""

    base: int
    digits: tuple[int, ...]

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        for d in self.digits:
            if not 0 <= d < self.base:
                raise ValueError(f"digit {d} out of range for base {self.base}")

    @property
    def depth(self) -> int:
        return len(self.digits)

    @property
    def left(self) -> Fraction:
        x = Fraction(0)
        for j, d in enumerate(self.digits, start=1):
            x += Fraction(d, self.base ** j)
        return x

    @property
    def length(self) -> Fraction:
        return Fraction(1, self.base ** self.depth)

    def child(self, digit: int) -> "NAdicInterval":
        return NAdicInterval(self.base, self.digits + (int(digit),))

    def __str__(self):
        return "".join(str(d) for d in self.digits) or "(root)"


def _digits_of(interval, base: int) -> tuple[int, ...]:
    if isinstance(interval, NAdicInterval):
        if interval.base != base:
            raise ValueError(f"interval base {interval.base} does not match "
                             f"bank base {base}")
        return interval.digits
    digits = tuple(int(d) for d in interval)
    for d in digits:
        if not 0 <= d < base:
            raise ValueError(f"digit {d} out of range for base {base}")
    return digits


@lru_cache(maxsize=64)
def _branch_matrices(bank: FilterBank) -> tuple[np.ndarray, ...]:
    return tuple(restrict_to_M(bank, i).matrix
                 for i in range(bank.n_branches))


def _orbit(bank: FilterBank, digits) -> np.ndarray:
    mats = _branch_matrices(bank)
    vec = np.zeros(mats[0].shape[0], dtype=complex)
    vec[0] = 1.0
    for d in digits:
        vec = mats[d] @ vec
    return vec


def mu0_interval(bank: FilterBank, interval) -> float:
    """Mass of an N-adic interval: squared norm of the e_0 orbit."""
    digits = _digits_of(interval, bank.n_branches)
    vec = _orbit(bank, digits)
    return float(np.vdot(vec, vec).real)


def mu_f_interval(bank: FilterBank, f: SparseSequence, interval) -> float:
    """Mass seen from a unit vector f, computed on full sparse sequences
    (f need not lie in the finite window)."""
    if abs(f.norm_sq() - 1.0) > 1e-10:
        raise ValueError("f must be a unit vector")
    digits = _digits_of(interval, bank.n_branches)
    return apply_word_star(bank, digits, f).norm_sq()


@dataclass(frozen=True)
class MeasureTable:
    """All depth-k masses, indexed by digit words in lexicographic order."""

    base: int
    depth: int
    masses: np.ndarray

    def word(self, index: int) -> tuple[int, ...]:
        digits = []
        for _ in range(self.depth):
            index, d = divmod(index, self.base)
            digits.append(d)
        return tuple(reversed(digits))

    def left_endpoints(self) -> np.ndarray:
        return np.arange(len(self.masses)) / float(self.base ** self.depth)

    def total(self) -> float:
        return float(self.masses.sum())


def measure_levels(bank: FilterBank, depth: int,
                   cap: int = DEFAULT_GRID_CAP) -> list[np.ndarray]:
    """Mass arrays for every level 1..depth, sharing one level-by-level
    sweep of orbit vectors (one matrix product per node)."""
    n = bank.n_branches
    if n ** depth > cap:
        raise ResourceCapError(f"{n}^{depth} exceeds the grid cap {cap}")
    mats = _branch_matrices(bank)
    dim = mats[0].shape[0]
    orbits = np.zeros((dim, 1), dtype=complex)
    orbits[0, 0] = 1.0
    levels = []
    for _ in range(depth):
        nxt = np.empty((dim, orbits.shape[1] * n), dtype=complex)
        for d in range(n):
            nxt[:, d::n] = mats[d] @ orbits
        small = np.abs(nxt) < ZERO_CLAMP
        if small.any():
            nxt[small] = 0.0
        orbits = nxt
        levels.append(np.einsum("ij,ij->j", orbits.conj(), orbits).real)
    return levels


def measure_grid(bank: FilterBank, depth: int,
                 cap: int = DEFAULT_GRID_CAP) -> MeasureTable:
    masses = measure_levels(bank, depth, cap)[-1]
    return MeasureTable(bank.n_branches, depth, masses)


def lower_bound(bank: FilterBank, interval) -> float:
    """|a_0|^(2 #zeros) |a_{2D-1}|^(2 #ones), a floor under the interval
    mass for validated two-branch banks (checked here as a self-test)."""
    if bank.n_branches != 2:
        raise UnsupportedBankError("the digit-count bound is a two-branch result")
    digits = _digits_of(interval, 2)
    a = bank.lowpass
    zeros = digits.count(0)
    ones = len(digits) - zeros
    bound = abs(a[0]) ** (2 * zeros) * abs(a[-1]) ** (2 * ones)
    mass = mu0_interval(bank, digits)
    if mass < bound - 1e-12:
        raise ArithmeticError(
            f"mass {mass} fell below its floor {bound}; bank is not a valid "
            "quadrature-mirror family")
    return bound


def fractal_scale(bank: FilterBank) -> float | None:
    """-ln|a_0|^2 / ln 2 when the corner eigenvalue strictly dominates the
    rest of the narrow compression's spectrum; None otherwise."""
    return spectrum_F0(bank).scale


@dataclass(frozen=True)
class ScanResult:
    ratios: np.ndarray
    estimate: float
    residual: float
    converged: bool

    def to_json_dict(self) -> dict:
        return {"ratios": [float(r) for r in self.ratios],
                "estimate": self.estimate,
                "residual": self.residual,
                "converged": self.converged}


def _ratio_scan(matrix: np.ndarray, start: np.ndarray, scale: complex,
                n_max: int, rtol: float) -> ScanResult:
    ratios = []
    z = start.astype(complex)
    converged = False
    for _ in range(n_max):
        z = matrix @ z / scale
        ratios.append(float(np.vdot(z, z).real))
        if len(ratios) > 1 and abs(ratios[-1] - ratios[-2]) < rtol:
            converged = True
            break
    residual = abs(ratios[-1] - ratios[-2]) if len(ratios) > 1 else math.inf
    return ScanResult(np.array(ratios), ratios[-1], residual, converged)


def fractal_ratio_scan(bank: FilterBank, base_word, n_max: int = 60,
                       rtol: float = 1e-6) -> ScanResult:
    """Ratios mass([xi, xi + 2^-(n+k))) / a_0^(2n) for n = 1..n_max, where
    xi is addressed by base_word and zeros are appended.

    Requires the corner eigenvalue to dominate strictly; the Daubechies-type
    banks (dominant 1/sqrt2) are served by daubechies_ratio_scan instead.
    """
    data = spectrum_F0(bank)
    corner = restrict_to_M(bank, 0).matrix[0, 0]
    if not data.strict or data.scale is None:
        raise UnsupportedBankError(
            "no strictly dominant corner eigenvalue; for banks whose top "
            "eigenvalue is 1/sqrt2 use daubechies_ratio_scan")
    digits = _digits_of(base_word, bank.n_branches)
    start = _orbit(bank, digits)
    mats = _branch_matrices(bank)
    return _ratio_scan(mats[0], start, corner, n_max, rtol)


def daubechies_ratio_scan(bank: FilterBank, base_word, n_max: int = 60,
                          rtol: float = 1e-6) -> ScanResult:
    """Ratios mass([xi, xi + 2^-(n+k))) / 2^-n; converges when 1/sqrt2 is
    the dominant eigenvalue of the narrow low-pass compression."""
    data = spectrum_F0(bank)
    if not data.strict or abs(abs(data.dominant) - 1 / SQRT2) > 1e-8:
        raise UnsupportedBankError(
            "dyadic normalization needs 1/sqrt2 as the dominant eigenvalue")
    digits = _digits_of(base_word, bank.n_branches)
    start = _orbit(bank, digits)
    mats = _branch_matrices(bank)
    return _ratio_scan(mats[0], start, 1.0 / SQRT2, n_max, rtol)


def scaled_orbit_limit(bank: FilterBank, base_word) -> tuple[float, np.ndarray]:
    """Independent reference for the dominant-scan limit: the linear-solve
    eigenvector xi = e_0 + v and the value (a_0^#0 a_{2D-1}^#1)^2 (1+|v|^2)."""
    f = restrict_to_M(bank, 0).matrix
    a0 = f[0, 0]
    w = np.zeros(f.shape[0], dtype=complex)
    w[0] = 1.0
    xi = dominant_eigendata(f, a0, w).right
    digits = _digits_of(base_word, bank.n_branches)
    a = bank.lowpass
    zeros = digits.count(0)
    ones = len(digits) - zeros
    prefactor = (abs(a[0]) ** zeros * abs(a[-1]) ** ones) ** 2
    limit = prefactor * float(np.vdot(xi, xi).real)
    return limit, xi


def unboundedness_scan(bank: FilterBank, open_interval: tuple[float, float],
                       depth: int) -> dict[int, float]:
    """Maximum of mass(J)/|J| over dyadic J inside the given interval, per
    depth 1..depth.  Depths with no dyadic interval inside are omitted."""
    if bank.n_branches != 2:
        raise UnsupportedBankError("density scan runs on dyadic grids")
    lo, hi = float(open_interval[0]), float(open_interval[1])
    if not 0.0 <= lo < hi <= 1.0:
        raise ValueError("interval must satisfy 0 <= lo < hi <= 1")
    mats = _branch_matrices(bank)
    maxima: dict[int, float] = {}
    root = np.zeros(mats[0].shape[0], dtype=complex)
    root[0] = 1.0

    def visit(vec, k, left):
        width = 2.0 ** -k
        if left >= hi or left + width <= lo:
            return
        if k > 0 and left >= lo and left + width <= hi:
            density = float(np.vdot(vec, vec).real) / width
            maxima[k] = max(maxima.get(k, 0.0), density)
        if k < depth:
            visit(mats[0] @ vec, k + 1, left)
            visit(mats[1] @ vec, k + 1, left + width / 2)

    visit(root, 0, 0.0)
    return maxima
