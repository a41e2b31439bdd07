"""Isometries on finitely supported sequences and their compressions.

A branch with coefficients (c_0, ..., c_{L-1}) acts on l2(Z) by
(S xi)_n = sum_k c_{n - N k} xi_k and its adjoint by
(S* xi)_n = sum_k conj(c_{k - N n}) xi_k, where N is the branching factor.
Two finite windows of basis indices are invariant under every adjoint:
the wide one (dimension 2D) and the narrow one (dimension 2D - 1), both
ending at index 0.  Compressing S* to either window gives a small dense
matrix; its entry at (row r, col c) is conj(c_{N r - c}) in the basis
e_0, e_{-1}, e_{-2}, ...
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .filters import FilterBank, _as_complex_tuple


class SparseSequence:
    """Finitely supported sequence over Z, stored as {index: value}."""

    __slots__ = ("entries",)

    def __init__(self, entries=None):
        self.entries = {int(k): complex(v) for k, v in (entries or {}).items()
                        if v != 0}

    @classmethod
    def basis(cls, n: int) -> "SparseSequence":
        return cls({n: 1.0})

    def support(self):
        return sorted(self.entries)

    def norm_sq(self) -> float:
        return float(sum(abs(v) ** 2 for v in self.entries.values()))

    def norm(self) -> float:
        return self.norm_sq() ** 0.5

    def inner(self, other: "SparseSequence") -> complex:
        """<self | other>, conjugate-linear in self."""
        if len(other.entries) < len(self.entries):
            return other.inner(self).conjugate()
        return sum(v.conjugate() * other.entries[k]
                   for k, v in self.entries.items() if k in other.entries)

    def scaled(self, c: complex) -> "SparseSequence":
        return SparseSequence({k: c * v for k, v in self.entries.items()})

    def __add__(self, other):
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0j) + v
        return SparseSequence(out)

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def __getitem__(self, n: int) -> complex:
        return self.entries.get(int(n), 0j)

    def __len__(self):
        return len(self.entries)

    def __repr__(self):
        return f"SparseSequence({self.entries!r})"


def apply_S(coeffs, xi: SparseSequence, base: int = 2) -> SparseSequence:
    c = _as_complex_tuple(coeffs)
    out: dict[int, complex] = {}
    for k, val in xi.entries.items():
        for j, cj in enumerate(c):
            if cj == 0:
                continue
            idx = base * k + j
            out[idx] = out.get(idx, 0j) + cj * val
    return SparseSequence(out)


def apply_S_star(coeffs, xi: SparseSequence, base: int = 2) -> SparseSequence:
    c = _as_complex_tuple(coeffs)
    out: dict[int, complex] = {}
    for k, val in xi.entries.items():
        for j, cj in enumerate(c):
            if cj == 0:
                continue
            q, r = divmod(k - j, base)
            if r == 0:
                out[q] = out.get(q, 0j) + cj.conjugate() * val
    return SparseSequence(out)


def apply_word_star(bank: FilterBank, word, xi: SparseSequence) -> SparseSequence:
    """S*_{i_k} ... S*_{i_1} xi for the digit word (i_1, ..., i_k)."""
    for d in word:
        xi = apply_S_star(bank.branches[d], xi, base=bank.n_branches)
    return xi


def cuntz_completeness_residual(bank: FilterBank, xi: SparseSequence) -> float:
    """|| sum_i S_i S_i* xi - xi ||."""
    total = SparseSequence()
    for b in bank.branches:
        total = total + apply_S(b, apply_S_star(b, xi, bank.n_branches),
                                bank.n_branches)
    return (total - xi).norm()


@dataclass(frozen=True)
class RestrictedOperator:
    """A branch adjoint compressed to a contiguous index window ending at 0.

    window lists the basis indices in matrix order (0, -1, -2, ...); the
    matrix acts on coordinate vectors in that basis, so e_0 is the first
    coordinate.
    """

    matrix: np.ndarray
    window: tuple[int, ...]
    branch: int

    @property
    def dim(self) -> int:
        return len(self.window)

    def apply(self, vec) -> np.ndarray:
        return self.matrix @ np.asarray(vec, dtype=complex)

    def to_json_dict(self) -> dict:
        return {"branch": self.branch,
                "window": list(self.window),
                "matrix": [[[z.real, z.imag] for z in row] for row in self.matrix]}


def _restrict(bank: FilterBank, branch: int, dim: int) -> RestrictedOperator:
    coeffs = bank.branches[branch]
    base = bank.n_branches
    mat = np.zeros((dim, dim), dtype=complex)
    for r in range(dim):
        for c in range(dim):
            j = base * r - c
            if 0 <= j < len(coeffs):
                mat[r, c] = complex(coeffs[j]).conjugate()
    return RestrictedOperator(mat, tuple(-i for i in range(dim)), branch)


def restrict_to_M(bank: FilterBank, branch: int = 0) -> RestrictedOperator:
    """Compression to the narrow invariant window, dimension 2D - 1."""
    return _restrict(bank, branch, 2 * bank.genus - 1)


def restrict_to_L(bank: FilterBank, branch: int = 0) -> RestrictedOperator:
    """Compression to the wide invariant window, dimension 2D."""
    return _restrict(bank, branch, 2 * bank.genus)


def embed_in_window(xi: SparseSequence, window) -> np.ndarray:
    """Coordinate vector of xi in the window basis; raises if xi has
    support outside the window."""
    vec = np.zeros(len(window), dtype=complex)
    pos = {n: i for i, n in enumerate(window)}
    for k, v in xi.entries.items():
        if k not in pos:
            raise ValueError(f"index {k} lies outside the window")
        vec[pos[k]] = v
    return vec


def absorption_depth(bank: FilterBank, n: int, max_iter: int = 64) -> int | None:
    """Smallest k <= max_iter with supp(S*^k e_n) inside the wide window,
    iterating the branch-0 adjoint; None if max_iter is exceeded."""
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    lo = -2 * bank.genus + 1
    xi = SparseSequence.basis(n)
    for k in range(max_iter + 1):
        if all(lo <= m <= 0 for m in xi.entries):
            return k
        if k == max_iter:
            break
        xi = apply_S_star(bank.lowpass, xi, base=bank.n_branches)
    return None
