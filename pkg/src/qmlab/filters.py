"""Filter banks: construction, the one-parameter real family, and the
orthogonality/unitarity checks that make a coefficient list a valid
quadrature-mirror bank.

Conventions used throughout the package:

* a branch symbol is the polynomial m(z) = sum_k c_k z^k restricted to the
  unit circle;
* for two-branch banks the high-pass is derived from the low-pass by
  coefficient reversal with alternating signs, b_k = (-1)^k conj(a_{2D-1-k});
* the genus D of a two-branch bank is half its (even) coefficient length.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedBankError

SQRT2 = math.sqrt(2.0)


def _as_complex_tuple(coeffs) -> tuple[complex, ...]:
    out = tuple(complex(c) for c in coeffs)
    if not out:
        raise ValueError("empty coefficient sequence")
    return out


def highpass_coeffs(lowpass) -> tuple[complex, ...]:
    """b_k = (-1)^k conj(a_{2D-1-k}) for k = 0..2D-1."""
    a = _as_complex_tuple(lowpass)
    n = len(a)
    return tuple((-1) ** k * a[n - 1 - k].conjugate() for k in range(n))


@dataclass(frozen=True)
class FilterBank:
    """An N-branch filter bank.

    branches holds the coefficient sequences of m_0, ..., m_{N-1}; for
    two-branch banks branches[0] is the low-pass (a_0, ..., a_{2D-1}) and
    branches[1] is derived from it unless supplied explicitly.
    """

    n_branches: int
    branches: tuple[tuple[complex, ...], ...]
    genus: int = field(default=0)

    def __post_init__(self):
        if self.n_branches < 2:
            raise ValueError("need at least two branches")
        if len(self.branches) != self.n_branches:
            raise ValueError("branch count does not match n_branches")
        for b in self.branches:
            if len(b) == 0:
                raise ValueError("empty coefficient sequence")
        if self.genus == 0:
            longest = max(len(b) for b in self.branches)
            object.__setattr__(self, "genus", (longest + 1) // 2)
        if self.genus < 1:
            raise ValueError("genus must be >= 1")

    @property
    def lowpass(self) -> tuple[complex, ...]:
        return self.branches[0]

    def branch_array(self, i: int) -> np.ndarray:
        return np.asarray(self.branches[i], dtype=complex)

    @property
    def is_real(self) -> bool:
        return all(abs(c.imag) == 0.0 for b in self.branches for c in b)

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        doc = {"N": self.n_branches,
               "coeffs": [[c.real, c.imag] for c in self.lowpass]}
        if self.n_branches != 2:
            doc["branches"] = [[[c.real, c.imag] for c in b] for b in self.branches]
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, doc: dict) -> "FilterBank":
        n = int(doc["N"])
        if "branches" in doc:
            branches = tuple(tuple(complex(re, im) for re, im in b)
                             for b in doc["branches"])
            return cls(n_branches=n, branches=branches)
        coeffs = tuple(complex(re, im) for re, im in doc["coeffs"])
        if n != 2:
            raise ValueError("banks with N != 2 need explicit branches")
        return from_lowpass(coeffs)

    @classmethod
    def from_json(cls, text: str) -> "FilterBank":
        return cls.from_json_dict(json.loads(text))


def from_lowpass(coeffs) -> FilterBank:
    """Two-branch bank from a low-pass coefficient list of even length."""
    a = _as_complex_tuple(coeffs)
    if len(a) % 2 != 0:
        raise ValueError("low-pass length must be even (2D) for two branches")
    return FilterBank(n_branches=2, branches=(a, highpass_coeffs(a)),
                      genus=len(a) // 2)


def beta_family(beta: float) -> FilterBank:
    """The real genus-2 family: all real solutions of the orthogonality,
    cross-lag and sum rules are parameterized by an angle."""
    c, s = math.cos(beta), math.sin(beta)
    a = ((1 + SQRT2 * c) / (2 * SQRT2),
         (1 + SQRT2 * s) / (2 * SQRT2),
         (1 - SQRT2 * c) / (2 * SQRT2),
         (1 - SQRT2 * s) / (2 * SQRT2))
    return from_lowpass(a)


def daubechies() -> FilterBank:
    """The four-tap Daubechies low-pass (two vanishing moments)."""
    r3 = math.sqrt(3.0)
    a = ((1 + r3) / (4 * SQRT2), (3 + r3) / (4 * SQRT2),
         (3 - r3) / (4 * SQRT2), (1 - r3) / (4 * SQRT2))
    return from_lowpass(a)


# The four degenerate four-tap variants where two coefficients vanish; all
# give Lebesgue measure.  Variant 2 is the "stretched" two-tap filter.
_HAAR_VARIANTS = {
    1: (1 / SQRT2, 1 / SQRT2, 0.0, 0.0),
    2: (1 / SQRT2, 0.0, 0.0, 1 / SQRT2),
    3: (0.0, 1 / SQRT2, 1 / SQRT2, 0.0),
    4: (0.0, 0.0, 1 / SQRT2, 1 / SQRT2),
}

HAAR_VARIANT_ANGLES = {1: math.pi / 4, 2: -math.pi / 4,
                       3: 3 * math.pi / 4, 4: -3 * math.pi / 4}


def haar_variant(variant: int = 1) -> FilterBank:
    if variant not in _HAAR_VARIANTS:
        raise ValueError("haar variant must be 1..4")
    return from_lowpass(_HAAR_VARIANTS[variant])


def highpass(bank: FilterBank) -> tuple[complex, ...]:
    """Reversal-with-alternating-signs high-pass of a two-branch bank."""
    if bank.n_branches != 2:
        raise UnsupportedBankError(
            "high-pass derivation is defined for two branches only; "
            "supply the branches explicitly for larger N")
    return highpass_coeffs(bank.lowpass)


def eval_symbol(coeffs, z: complex, tolerance: float = 1e-9) -> complex:
    """Evaluate sum_k c_k z^k for z on the unit circle."""
    z = complex(z)
    if abs(abs(z) - 1.0) > tolerance:
        raise ValueError(f"|z| = {abs(z)} is not on the unit circle")
    acc = 0j
    for c in reversed(_as_complex_tuple(coeffs)):
        acc = acc * z + c
    return acc


def modulation_matrix(bank: FilterBank, z: complex) -> np.ndarray:
    """(1/sqrt2) [[m0(z), m0(-z)], [m1(z), m1(-z)]] for a two-branch bank."""
    if bank.n_branches != 2:
        raise UnsupportedBankError("modulation matrix is the N = 2 case; "
                                   "see fractal.validate_ON for general N")
    m0, m1 = bank.branches
    return np.array([[eval_symbol(m0, z), eval_symbol(m0, -z)],
                     [eval_symbol(m1, z), eval_symbol(m1, -z)]],
                    dtype=complex) / SQRT2


def unitarity_residual(m: np.ndarray) -> float:
    """|| M* M - I || (Frobenius)."""
    m = np.asarray(m, dtype=complex)
    return float(np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0])))


@dataclass(frozen=True)
class ValidationReport:
    orthogonality_residuals: dict[int, float]
    sum_residual: float
    unitarity_max_residual: float
    tolerance: float
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "orthogonality_residuals": {str(k): v for k, v in
                                        sorted(self.orthogonality_residuals.items())},
            "sum_residual": self.sum_residual,
            "unitarity_max_residual": self.unitarity_max_residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def orthogonality_residuals(coeffs, base: int = 2) -> dict[int, float]:
    """|sum_k conj(c_k) c_{k+base*l} - delta_{0,l}| for every overlapping lag."""
    a = np.asarray(_as_complex_tuple(coeffs))
    n = len(a)
    out = {}
    lag = 0
    while base * lag < n:
        s = np.vdot(a[: n - base * lag], a[base * lag:])
        out[lag] = float(abs(s - (1.0 if lag == 0 else 0.0)))
        lag += 1
    return out


def validate_qmf(bank: FilterBank, tolerance: float = 1e-10,
                 samples: int = 256) -> ValidationReport:
    """Check the two-branch conditions: orthogonality at all even lags, the
    sum rule sum a_k = sqrt2, and sampled unitarity of the modulation matrix.
    """
    if bank.n_branches != 2:
        raise UnsupportedBankError("validate_qmf covers two-branch banks; "
                                   "use fractal.validate_ON for general N")
    if len(bank.lowpass) % 2 != 0:
        raise ValueError("low-pass length must be even")
    orth = orthogonality_residuals(bank.lowpass)
    sum_res = float(abs(sum(bank.lowpass) - SQRT2))
    unit_res = 0.0
    for j in range(samples):
        z = cmath.exp(2j * math.pi * j / samples)
        unit_res = max(unit_res, unitarity_residual(modulation_matrix(bank, z)))
    passed = (max(orth.values()) <= tolerance and sum_res <= tolerance
              and unit_res <= tolerance)
    return ValidationReport(orth, sum_res, unit_res, tolerance, passed)


def block_coefficient_matrices(bank: FilterBank) -> list[np.ndarray]:
    """The D polyphase blocks A_k = [[a_{2k}, a_{2k+1}],
    [conj(a_{2(D-k)-1}), -conj(a_{2(D-k-1)})]] of a two-branch bank."""
    if bank.n_branches != 2:
        raise UnsupportedBankError("block matrices are defined for N = 2")
    a = bank.lowpass
    d = bank.genus
    mats = []
    for k in range(d):
        mats.append(np.array(
            [[a[2 * k], a[2 * k + 1]],
             [a[2 * (d - k) - 1].conjugate(), -a[2 * (d - k - 1)].conjugate()]],
            dtype=complex))
    return mats


def block_unitarity_residuals(mats) -> dict[int, tuple[float, float]]:
    """Residuals of sum_k A_{k+n} A_k* = delta I and sum_k A_k* A_{k+n} = delta I
    for each lag n = 0..D-1."""
    mats = [np.asarray(m, dtype=complex) for m in mats]
    d = len(mats)
    eye = np.eye(2)
    out = {}
    for n in range(d):
        right = sum(mats[k + n] @ mats[k].conj().T for k in range(d - n))
        left = sum(mats[k].conj().T @ mats[k + n] for k in range(d - n))
        target = eye if n == 0 else 0.0
        out[n] = (float(np.linalg.norm(right - target)),
                  float(np.linalg.norm(left - target)))
    return out


def cuntz_symbol_residual(bank: FilterBank, samples: int = 1024) -> float:
    """Max over sampled points of |(1/N) sum_{w^N = z} conj(m_i(w)) m_j(w)
    - delta_{ij}|, the branch-orthogonality identity on the circle."""
    n = bank.n_branches
    worst = 0.0
    for t in range(samples):
        roots = [cmath.exp(2j * math.pi * (t / samples + r) / n) for r in range(n)]
        vals = [[eval_symbol(b, w) for w in roots] for b in bank.branches]
        for i in range(n):
            for j in range(n):
                s = sum(vals[i][r].conjugate() * vals[j][r] for r in range(n)) / n
                worst = max(worst, abs(s - (1.0 if i == j else 0.0)))
    return worst
