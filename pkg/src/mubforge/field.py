"""Arithmetic in GF(p^e) with the trace map, dual bases and the phase-space map.

Elements are polynomials over F_p of degree < e, stored as coefficient
tuples with the constant term first, reduced modulo a monic irreducible
polynomial of degree e.  The basis ``{a_i}`` is the power basis
``1, x, ..., x^(e-1)`` and ``{b_i}`` its trace-dual basis.
"""

from __future__ import annotations

import functools
import itertools
import re
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field as dc_field

MAX_ORDER = 2**31


def smallest_factor(n: int) -> int:
    """Smallest prime factor of ``n >= 2`` by trial division."""
    if n < 2:
        raise ValueError(f"{n} has no prime factors")
    if n % 2 == 0:
        return 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return f
        f += 2
    return n


def is_prime(n: int) -> bool:
    return n >= 2 and smallest_factor(n) == n


def factorize(n: int) -> dict[int, int]:
    """Prime factorization ``{p: exponent}`` by trial division."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: dict[int, int] = {}
    while n > 1:
        p = smallest_factor(n)
        out[p] = out.get(p, 0) + 1
        n //= p
    return out


def check_prime(p: int) -> None:
    if p < 2:
        raise ValueError(f"characteristic must be a prime, got {p}")
    f = smallest_factor(p)
    if f != p:
        raise ValueError(f"characteristic {p} is not prime: divisible by {f}")


# ---------------------------------------------------------------------------
# polynomials over F_p: tuples, constant term first, no trailing zeros unless
# stated otherwise


def _trim(a: Sequence[int]) -> tuple[int, ...]:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def _poly_sub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim((x - y) % p for x, y in zip(a, b))


def _poly_mul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(c % p for c in out)


def _poly_divmod(a, b, p):
    a = list(_trim(a))
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = a[-1] * inv_lead % p
        q[shift] = c
        for i, y in enumerate(b):
            a[shift + i] = (a[shift + i] - c * y) % p
        a = list(_trim(a))
    return _trim(q), tuple(a)


def _is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    modulus = _trim(modulus)
    e = len(modulus) - 1
    for deg in range(1, e // 2 + 1):
        for low in itertools.product(range(p), repeat=deg):
            divisor = tuple(low) + (1,)
            if not _poly_divmod(modulus, divisor, p)[1]:
                return False
    return True


def format_poly(coeffs: Sequence[int]) -> str:
    """Render ``(1, 1, 1)`` as ``x^2+x+1``."""
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        if k == 0:
            terms.append(str(c))
            continue
        mono = "x" if k == 1 else f"x^{k}"
        terms.append(mono if c == 1 else f"{c}{mono}")
    return "+".join(terms) if terms else "0"


_TERM = re.compile(r"^(\d*)(x(?:\^(\d+))?)?$")


def parse_poly(text: str) -> tuple[int, ...]:
    """Inverse of :func:`format_poly`."""
    coeffs: dict[int, int] = {}
    for term in text.replace(" ", "").split("+"):
        m = _TERM.match(term)
        if not term or m is None or (not m.group(1) and not m.group(2)):
            raise ValueError(f"bad polynomial term {term!r} in {text!r}")
        c = int(m.group(1)) if m.group(1) else 1
        k = 0 if not m.group(2) else int(m.group(3) or 1)
        coeffs[k] = coeffs.get(k, 0) + c
    deg = max(coeffs)
    return tuple(coeffs.get(k, 0) for k in range(deg + 1))


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteField:
    """GF(p^e) realised as F_p[x] / (modulus).

    ``modulus`` holds e+1 coefficients, constant term first, leading 1.
    Use :func:`make_field` for the canonical modulus.
    """

    p: int
    e: int
    modulus: tuple[int, ...]
    _validated: bool = dc_field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if not self._validated:
            check_prime(self.p)
            mod = tuple(c % self.p for c in self.modulus)
            if len(mod) != self.e + 1 or mod[-1] != 1:
                raise ValueError(f"modulus must be monic of degree {self.e}")
            if not _is_irreducible(mod, self.p):
                raise ValueError(f"{format_poly(mod)} is reducible over F_{self.p}")
            object.__setattr__(self, "modulus", mod)

    @property
    def order(self) -> int:
        return self.p**self.e

    def __str__(self) -> str:
        return f"GF({self.p}^{self.e}) mod {format_poly(self.modulus)}"

    # element construction -------------------------------------------------

    def element(self, coeffs: Sequence[int]) -> FieldElement:
        coeffs = [c % self.p for c in coeffs]
        if len(coeffs) > self.e:
            _, coeffs = _poly_divmod(coeffs, self.modulus, self.p)
        coeffs = tuple(coeffs) + (0,) * (self.e - len(coeffs))
        return FieldElement(self, coeffs)

    def scalar(self, c: int) -> FieldElement:
        return self.element([c])

    @property
    def zero(self) -> FieldElement:
        return self.scalar(0)

    @property
    def one(self) -> FieldElement:
        return self.scalar(1)

    def from_int(self, n: int) -> FieldElement:
        """Element whose base-p digits (least significant first) are its coefficients."""
        if not 0 <= n < self.order:
            raise ValueError(f"{n} out of range for {self}")
        digits = []
        for _ in range(self.e):
            n, r = divmod(n, self.p)
            digits.append(r)
        return FieldElement(self, tuple(digits))

    def elements(self) -> Iterator[FieldElement]:
        """All elements in field element order (see :meth:`FieldElement.to_int`)."""
        return (self.from_int(n) for n in range(self.order))

    @functools.cached_property
    def power_basis(self) -> tuple[FieldElement, ...]:
        return tuple(self.element([0] * i + [1]) for i in range(self.e))

    @functools.cached_property
    def dual(self) -> tuple[FieldElement, ...]:
        return dual_basis(self)

    @functools.cached_property
    def trace_coeffs(self) -> tuple[int, ...]:
        """``T(x^i)`` for the power basis; T is F_p-linear so these determine it."""
        return tuple(trace(a) for a in self.power_basis)


@dataclass(frozen=True)
class FieldElement:
    field: FiniteField
    coeffs: tuple[int, ...]

    def _check(self, other: FieldElement) -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"expected FieldElement, got {type(other).__name__}")
        if other.field != self.field:
            raise ValueError(f"elements of {self.field} and {other.field} cannot be combined")

    def __add__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        p = self.field.p
        return FieldElement(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> FieldElement:
        p = self.field.p
        return FieldElement(self.field, tuple(-a % p for a in self.coeffs))

    def __sub__(self, other: FieldElement) -> FieldElement:
        return self + (-other)

    def __mul__(self, other: FieldElement | int) -> FieldElement:
        if isinstance(other, int):
            other = self.field.scalar(other)
        self._check(other)
        f = self.field
        prod = _poly_mul(_trim(self.coeffs), _trim(other.coeffs), f.p)
        return f.element(_poly_divmod(prod, f.modulus, f.p)[1])

    __rmul__ = __mul__

    def __pow__(self, n: int) -> FieldElement:
        if n < 0:
            return self.inverse() ** (-n)
        result, base = self.field.one, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> FieldElement:
        """Multiplicative inverse by the extended Euclidean algorithm."""
        f = self.field
        if self.is_zero():
            raise ZeroDivisionError(f"zero has no inverse in {f}")
        p = f.p
        r0, r1 = f.modulus, _trim(self.coeffs)
        s0, s1 = (), (1,)
        while r1:
            q, r = _poly_divmod(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1, p), p)
        # r0 is a nonzero constant since the modulus is irreducible
        c = pow(r0[0], -1, p)
        return f.element([x * c for x in s0])

    def __truediv__(self, other: FieldElement) -> FieldElement:
        return self * other.inverse()

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_int(self) -> int:
        return sum(c * self.field.p**i for i, c in enumerate(self.coeffs))

    def frobenius(self) -> FieldElement:
        return self ** self.field.p

    def __str__(self) -> str:
        return format_poly(self.coeffs)


def make_field(p: int, e: int) -> FiniteField:
    """GF(p^e) with the lexicographically smallest monic irreducible modulus.

    Candidates are compared on ``(c_{e-1}, ..., c_0)``.
    """
    check_prime(p)
    if e < 1:
        raise ValueError(f"extension degree must be >= 1, got {e}")
    if p**e > MAX_ORDER:
        raise ValueError(f"field order {p}^{e} exceeds 2^31")
    for high_first in itertools.product(range(p), repeat=e):
        modulus = tuple(reversed(high_first)) + (1,)
        if _is_irreducible(modulus, p):
            return FiniteField(p, e, modulus, _validated=True)
    raise AssertionError(f"no irreducible polynomial of degree {e} over F_{p}")  # pragma: no cover


_FIELD_RE = re.compile(r"^\s*GF\((\d+)\^(\d+)\)\s+mod\s+(\S+)\s*$")


def parse_field(text: str) -> FiniteField:
    """Parse the ``GF(p^e) mod <polynomial>`` description produced by ``str``."""
    m = _FIELD_RE.match(text)
    if m is None:
        raise ValueError(f"cannot parse field description {text!r}")
    p, e = int(m.group(1)), int(m.group(2))
    return FiniteField(p, e, parse_poly(m.group(3)))


def trace(a: FieldElement) -> int:
    """Absolute trace ``a + a^p + ... + a^(p^(e-1))`` as an integer in [0, p)."""
    total, term = a, a
    for _ in range(a.field.e - 1):
        term = term.frobenius()
        total = total + term
    if any(total.coeffs[1:]):
        raise AssertionError(f"trace of {a} left the prime field: {total}")
    return total.coeffs[0]


def linear_trace(a: FieldElement) -> int:
    """Same value as :func:`trace`, evaluated through the cached trace coefficients."""
    return sum(c * t for c, t in zip(a.coeffs, a.field.trace_coeffs)) % a.field.p


def _inverse_mod_p(m: list[list[int]], p: int) -> list[list[int]]:
    n = len(m)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] % p), None)
        if pivot is None:
            raise AssertionError("trace form is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = pow(aug[col][col], -1, p)
        aug[col] = [x * inv % p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                c = aug[r][col]
                aug[r] = [(x - c * y) % p for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def dual_basis(fld: FiniteField) -> tuple[FieldElement, ...]:
    """The basis ``b_j`` with ``T(a_i b_j) = delta_ij`` for the power basis ``a_i``."""
    a = fld.power_basis
    gram = [[trace(ai * ak) for ak in a] for ai in a]
    inv = _inverse_mod_p(gram, fld.p)
    # b_j = sum_k inv[k][j] a_k
    return tuple(fld.element([inv[k][j] for k in range(fld.e)]) for j in range(fld.e))


def phi(x: Sequence[int], z: Sequence[int], fld: FiniteField) -> tuple[FieldElement, FieldElement]:
    """Map ``(x, z)`` in F_p^{2e} to ``(sum x_i a_i, sum z_i b_i)`` in F_d x F_d."""
    if len(x) != fld.e or len(z) != fld.e:
        raise ValueError(f"expected coordinate lists of length {fld.e}, got {len(x)} and {len(z)}")
    alpha = fld.element(x)
    beta = fld.zero
    for zi, bi in zip(z, fld.dual):
        beta = beta + bi * (zi % fld.p)
    return alpha, beta


def phi_inverse(alpha: FieldElement, beta: FieldElement) -> tuple[tuple[int, ...], tuple[int, ...]]:
    fld = alpha.field
    x = tuple(linear_trace(alpha * b) for b in fld.dual)
    z = tuple(linear_trace(beta * a) for a in fld.power_basis)
    return x, z


def form_g(u: tuple[FieldElement, FieldElement], v: tuple[FieldElement, FieldElement]) -> FieldElement:
    """The F_d-symplectic form ``alpha beta' - alpha' beta``."""
    (a, b), (a2, b2) = u, v
    return a * b2 - a2 * b
