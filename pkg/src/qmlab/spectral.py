"""Eigenanalysis of the compressed adjoint operators.

The narrow compression of the low-pass adjoint always has 1/sqrt2 in its
spectrum (the all-ones row vector is a left eigenvector), and its (0,0)
entry conj(a_0) is always an eigenvalue as well.  When one eigenvalue
strictly dominates the rest in modulus, scaled matrix powers converge to a
rank-one projection; the convergence data (left/right vector pair) is what
the measure asymptotics run on.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularResolventError
from .filters import SQRT2, FilterBank
from .operators import RestrictedOperator, restrict_to_M

#: relative margin by which a dominant eigenvalue must beat the runner-up;
#: keeps the boundary cases (two eigenvalues of equal modulus) non-dominant.
DOMINANCE_MARGIN = 1e-9


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: np.ndarray
    dominant: complex | None = None
    strict: bool = False
    left: np.ndarray | None = None      # unit w with F* w = conj(a) w
    right: np.ndarray | None = None     # xi with F xi = a xi, <w|xi> = 1
    scale: float | None = None          # -ln|a_0|^2 / ln 2 when a_0 dominates

    def to_json_dict(self) -> dict:
        def vec(v):
            return None if v is None else [[z.real, z.imag] for z in v]
        return {
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
            "dominant": None if self.dominant is None
            else [self.dominant.real, self.dominant.imag],
            "strict": self.strict,
            "left": vec(self.left),
            "right": vec(self.right),
            "scale": self.scale,
        }


def _matrix(f) -> np.ndarray:
    if isinstance(f, RestrictedOperator):
        return f.matrix
    return np.asarray(f, dtype=complex)


def find_dominant(eigenvalues) -> tuple[complex | None, bool]:
    """Largest-modulus eigenvalue and whether it strictly dominates."""
    ev = sorted(np.asarray(eigenvalues, dtype=complex), key=abs, reverse=True)
    if not ev:
        return None, False
    if len(ev) == 1:
        return complex(ev[0]), True
    top, second = abs(ev[0]), abs(ev[1])
    strict = top - second > DOMINANCE_MARGIN * max(top, 1e-300)
    return complex(ev[0]), strict


def eigenvalues_closed_form_3(f: np.ndarray) -> np.ndarray:
    """Spectrum of a 3x3 matrix whose first row is (x, 0, 0): x together
    with the roots of the trailing 2x2 block's characteristic polynomial."""
    tr = f[1, 1] + f[2, 2]
    det = f[1, 1] * f[2, 2] - f[1, 2] * f[2, 1]
    disc = cmath.sqrt(tr * tr - 4 * det)
    return np.array([f[0, 0], (tr + disc) / 2, (tr - disc) / 2], dtype=complex)


def spectrum_F0(bank: FilterBank) -> SpectralData:
    """Spectral data of the narrow low-pass compression.

    Uses the closed form for three-dimensional windows (genus 2) and a dense
    eigensolver otherwise.  The left/right vector pair is attached whenever
    some eigenvalue strictly dominates; the fractal scale is attached only
    when that eigenvalue is the (0,0) corner entry conj(a_0).
    """
    op = restrict_to_M(bank, 0)
    f = op.matrix
    if op.dim == 3:
        ev = eigenvalues_closed_form_3(f)
    elif op.dim == 1:
        ev = np.array([f[0, 0]])
    else:
        ev = np.linalg.eigvals(f)
    dominant, strict = find_dominant(ev)
    left = right = None
    scale = None
    if strict:
        left = left_eigenvector(f, dominant)
        data = dominant_eigendata(f, dominant, left)
        right = data.right
        corner = f[0, 0]
        if abs(dominant - corner) <= 1e-9 * max(abs(corner), 1e-300):
            scale = -math.log(abs(corner) ** 2) / math.log(2.0)
    return SpectralData(np.asarray(ev, dtype=complex), dominant, strict,
                        left, right, scale)


def left_eigenvector(f, a: complex) -> np.ndarray:
    """Unit w with F* w = conj(a) w, from the eigenbasis of F*."""
    f = _matrix(f)
    vals, vecs = np.linalg.eig(f.conj().T)
    i = int(np.argmin(np.abs(vals - np.conj(a))))
    w = vecs[:, i]
    return w / np.linalg.norm(w)


def left_ones_check(bank: FilterBank) -> float:
    """|| w F0 - (1/sqrt2) w || for the all-ones row vector w."""
    f = restrict_to_M(bank, 0).matrix
    w = np.ones(f.shape[0], dtype=complex)
    return float(np.linalg.norm(w @ f - w / SQRT2))


def dominant_eigendata(f, a: complex, w, tolerance: float = 1e-12) -> SpectralData:
    """Right vector for a simple dominant eigenvalue from the block split.

    Given F* w = conj(a) w with unit w, write the space as the line through
    w plus its orthocomplement; in that basis F = [[a, 0], [eta, G]] and the
    normalized eigenvector is xi = w + (a - G)^{-1} eta.
    """
    f = _matrix(f)
    a = complex(a)
    w = np.asarray(w, dtype=complex)
    w = w / np.linalg.norm(w)
    d = f.shape[0]
    # unitary basis change with w as the first column
    basis = np.eye(d, dtype=complex)
    basis[:, 0] = w
    q, _ = np.linalg.qr(basis)
    # qr may flip the first column's phase; undo so q[:,0] == w
    phase = np.vdot(q[:, 0], w)
    q[:, 0] = w
    if d > 1 and abs(abs(phase) - 1.0) > 1e-8:
        raise SingularResolventError("left eigenvector could not anchor the basis")
    fb = q.conj().T @ f @ q
    eta = fb[1:, 0]
    g = fb[1:, 1:]
    if d == 1:
        xi = w.copy()
    else:
        shifted = a * np.eye(d - 1) - g
        gap = min(abs(a - mu) for mu in np.linalg.eigvals(g))
        if gap <= tolerance * max(abs(a), 1.0):
            raise SingularResolventError(
                "eigenvalue lies in the spectrum of the complementary block")
        tail = np.linalg.solve(shifted, eta)
        xi = q @ np.concatenate(([1.0 + 0j], tail))
    ev = np.linalg.eigvals(f)
    _, strict = find_dominant(ev)
    return SpectralData(ev, a, strict, w, xi, None)


def power_limit(f, a: complex, w, xi, x, n: int) -> tuple[np.ndarray, float]:
    """(a^{-n} F^n x, distance to <w|x> xi), iterating in the scaled
    variable F/a so nothing overflows."""
    f = _matrix(f)
    a = complex(a)
    w = np.asarray(w, dtype=complex)
    xi = np.asarray(xi, dtype=complex)
    z = np.asarray(x, dtype=complex).copy()
    limit = np.vdot(w, z) * xi
    for _ in range(n):
        z = f @ z / a
    return z, float(np.linalg.norm(z - limit))
