"""Weyl-Heisenberg nice error basis for prime-power dimensions.

A phase point ``(x, z)`` in F_p^e x F_p^e labels the operator
``X^x1 Z^z1 (x) ... (x) X^xe Z^ze``; two such operators commute exactly when
the symplectic form of their labels vanishes.
"""

from __future__ import annotations

import functools
import itertools
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from mubforge.errors import ConstructionError
from mubforge.field import check_prime
from mubforge.linalg import INPUT_TOL

MAX_BASIS_DIM = 64


@dataclass(frozen=True, order=True)
class PhasePoint:
    p: int
    e: int
    x: tuple[int, ...]
    z: tuple[int, ...]

    def __post_init__(self):
        if len(self.x) != self.e or len(self.z) != self.e:
            raise ValueError(f"phase point needs {self.e} x and z coordinates")
        if any(not 0 <= c < self.p for c in self.x + self.z):
            raise ValueError(f"coordinates must lie in [0, {self.p})")

    @classmethod
    def of(cls, p: int, x: Sequence[int], z: Sequence[int]) -> PhasePoint:
        return cls(p, len(x), tuple(c % p for c in x), tuple(c % p for c in z))

    @classmethod
    def zero(cls, p: int, e: int) -> PhasePoint:
        return cls(p, e, (0,) * e, (0,) * e)

    def _check(self, other: PhasePoint) -> None:
        if (self.p, self.e) != (other.p, other.e):
            raise ValueError(f"phase points over (p, e) = {(self.p, self.e)} and {(other.p, other.e)}")

    def __add__(self, other: PhasePoint) -> PhasePoint:
        self._check(other)
        p = self.p
        return PhasePoint(
            p,
            self.e,
            tuple((a + b) % p for a, b in zip(self.x, other.x)),
            tuple((a + b) % p for a, b in zip(self.z, other.z)),
        )

    def scaled(self, c: int) -> PhasePoint:
        return PhasePoint.of(self.p, [c * a for a in self.x], [c * a for a in self.z])

    def is_zero(self) -> bool:
        return not any(self.x) and not any(self.z)


def phase_points(p: int, e: int) -> Iterator[PhasePoint]:
    """All points, lexicographic on ``(x_1..x_e, z_1..z_e)``."""
    for coords in itertools.product(range(p), repeat=2 * e):
        yield PhasePoint(p, e, coords[:e], coords[e:])


@functools.lru_cache(maxsize=None)
def _shift_clock(d: int) -> tuple[np.ndarray, np.ndarray]:
    omega = np.exp(2j * np.pi / d)
    x = np.zeros((d, d), dtype=complex)
    for k in range(d):
        x[k, (k + 1) % d] = 1
    z = np.diag(omega ** np.arange(d))
    x.setflags(write=False)
    z.setflags(write=False)
    return x, z


def generalized_pauli(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Shift ``X = sum |k><k+1|`` and clock ``Z = sum w^k |k><k|`` with ``w = exp(2 pi i/d)``.

    Any ``d >= 2`` is accepted; the nice error basis itself only uses prime ``d``.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    x, z = _shift_clock(d)
    return x.copy(), z.copy()


def pauli_x(p: int) -> np.ndarray:
    check_prime(p)
    return generalized_pauli(p)[0]


def pauli_z(p: int) -> np.ndarray:
    check_prime(p)
    return generalized_pauli(p)[1]


@functools.lru_cache(maxsize=None)
def _xz_power(p: int, a: int, b: int) -> np.ndarray:
    x, z = _shift_clock(p)
    m = np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(z, b)
    m.setflags(write=False)
    return m


def rho(pt: PhasePoint) -> np.ndarray:
    """``X^x1 Z^z1 (x) ... (x) X^xe Z^ze`` as a dense ``p^e x p^e`` matrix."""
    out = np.ones((1, 1), dtype=complex)
    for a, b in zip(pt.x, pt.z):
        out = np.kron(out, _xz_power(pt.p, a, b))
    return out


def symplectic_f(u: PhasePoint, v: PhasePoint) -> int:
    u._check(v)
    return sum(a * b2 - a2 * b for a, b, a2, b2 in zip(u.x, u.z, v.x, v.z)) % u.p


def commutes(u: PhasePoint, v: PhasePoint) -> bool:
    return symplectic_f(u, v) == 0


@dataclass(frozen=True)
class NiceErrorBasis:
    p: int
    e: int
    elements: dict[PhasePoint, np.ndarray]

    @property
    def d(self) -> int:
        return self.p**self.e

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, pt: PhasePoint) -> np.ndarray:
        return self.elements[pt]

    def max_trace_deviation(self) -> float:
        """Largest ``|tr(U^dagger V) - d delta_UV|`` over all ordered pairs."""
        mats = np.stack(list(self.elements.values()))
        n = len(mats)
        gram = mats.reshape(n, -1).conj() @ mats.reshape(n, -1).T
        return float(np.max(np.abs(gram - self.d * np.eye(n))))

    def validate(self, tol: float = INPUT_TOL) -> None:
        d = self.d
        if len(self.elements) != d * d:
            raise ConstructionError(f"expected {d * d} elements, got {len(self.elements)}")
        ident = self.elements[PhasePoint.zero(self.p, self.e)]
        if np.max(np.abs(ident - np.eye(d))) > tol:
            raise ConstructionError("rho(0, 0) is not the identity")
        for pt, m in self.elements.items():
            if np.max(np.abs(m.conj().T @ m - np.eye(d))) > tol:
                raise ConstructionError(f"element {pt} is not unitary")
        dev = self.max_trace_deviation()
        if dev > tol:
            raise ConstructionError(f"trace orthogonality violated by {dev:.3e}")


def build_basis(p: int, e: int) -> NiceErrorBasis:
    check_prime(p)
    if e < 1:
        raise ValueError(f"extension degree must be >= 1, got {e}")
    if p**e > MAX_BASIS_DIM:
        raise ValueError(f"dimension {p}^{e} exceeds the materialisation limit {MAX_BASIS_DIM}")
    basis = NiceErrorBasis(p, e, {pt: rho(pt) for pt in phase_points(p, e)})
    basis.validate()
    return basis

