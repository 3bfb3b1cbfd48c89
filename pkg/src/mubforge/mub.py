"""Mutually unbiased bases from partitions of the Weyl-Heisenberg error basis.

For ``d = p^e`` the phase space F_p^{2e} is identified with the plane
F_d x F_d; its d+1 lines through the origin give d+1 commuting classes whose
common eigenbases are mutually unbiased.  Composite dimensions use tensor
products of per-prime-power classes.
"""

from __future__ import annotations

import concurrent.futures
import functools
import itertools
import logging
import os
from collections.abc import Sequence
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from mubforge.errorbasis import MAX_BASIS_DIM, PhasePoint, rho
from mubforge.errors import ConstructionError
from mubforge.field import FieldElement, FiniteField, factorize, make_field, phi_inverse
from mubforge.linalg import (
    INPUT_TOL,
    OUTPUT_TOL,
    is_unitary,
    noncommuting_pair,
    simultaneous_eigenbasis,
)

logger = logging.getLogger(__name__)

THREADS_ENV = "MUBFORGE_THREADS"


def n_of_d(d: int) -> int:
    """Number of MUBs from the reduce-to-prime-power construction: ``min_p d_p + 1``."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    return min(p**k for p, k in factorize(d).items()) + 1


def _max_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# line partition


@dataclass(frozen=True)
class LinePartition:
    """The d+1 lines of F_d x F_d pulled back to phase points.

    ``slopes[k]`` is the slope of ``lines[k]``; ``None`` stands for the
    vertical line.  Slopes come in field element order with infinity last.
    """

    field: FiniteField
    slopes: tuple[FieldElement | None, ...]
    lines: tuple[tuple[PhasePoint, ...], ...]

    def validate(self) -> None:
        fld = self.field
        d = fld.order
        origin = PhasePoint.zero(fld.p, fld.e)
        if len(self.lines) != d + 1:
            raise ConstructionError(f"expected {d + 1} lines, got {len(self.lines)}")
        seen: set[PhasePoint] = set()
        for k, line in enumerate(self.lines):
            pts = set(line)
            if len(pts) != d or origin not in pts:
                raise ConstructionError(f"line {k} has {len(pts)} distinct points or misses the origin")
            overlap = (pts - {origin}) & seen
            if overlap:
                raise ConstructionError(f"line {k} meets an earlier line at {min(overlap)}")
            seen |= pts - {origin}
        if len(seen) != d * d - 1:
            raise ConstructionError("lines do not cover every nonzero point")

    def slope_label(self, k: int) -> str:
        s = self.slopes[k]
        return "inf" if s is None else str(s.to_int())


def line_partition(fld: FiniteField) -> LinePartition:
    slopes: list[FieldElement | None] = list(fld.elements()) + [None]
    lines = []
    for s in slopes:
        pts = []
        for t in fld.elements():
            alpha, beta = (fld.zero, t) if s is None else (t, s * t)
            x, z = phi_inverse(alpha, beta)
            pts.append(PhasePoint(fld.p, fld.e, x, z))
        lines.append(tuple(pts))
    part = LinePartition(fld, tuple(slopes), tuple(lines))
    part.validate()
    return part


# ---------------------------------------------------------------------------
# collections and verification


@dataclass(frozen=True)
class MubReport:
    dim: int
    orthonormality: tuple[float, ...]
    max_bias: float
    tol: float

    @property
    def max_orthonormality(self) -> float:
        return max(self.orthonormality, default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_orthonormality <= self.tol and self.max_bias <= self.tol

    def lines(self) -> list[str]:
        out = []
        for k, dev in enumerate(self.orthonormality):
            out.append(f"{'PASS' if dev <= self.tol else 'FAIL'} basis {k} orthonormal (max deviation {dev:.3e})")
        out.append(
            f"{'PASS' if self.max_bias <= self.tol else 'FAIL'} mutual unbiasedness "
            f"(max ||<a|b>|^2 - 1/{self.dim}| = {self.max_bias:.3e})"
        )
        return out


@dataclass(frozen=True)
class MubCollection:
    """Orthonormal bases of C^d; each basis is a ``(d, d)`` array of column vectors."""

    dim: int
    bases: tuple[np.ndarray, ...]
    provenance: str = ""
    seed: int = 0
    report: MubReport | None = dc_field(default=None, compare=False)

    def __len__(self) -> int:
        return len(self.bases)


def verify_mubs(mc: MubCollection, tol: float = OUTPUT_TOL) -> MubReport:
    d = mc.dim
    ortho = []
    for b in mc.bases:
        ortho.append(float(np.max(np.abs(b.conj().T @ b - np.eye(d)))))
    bias = 0.0
    for b1, b2 in itertools.combinations(mc.bases, 2):
        overlaps = np.abs(b1.conj().T @ b2) ** 2
        bias = max(bias, float(np.max(np.abs(overlaps - 1 / d))))
    return MubReport(d, tuple(ortho), bias, tol)


# ---------------------------------------------------------------------------
# constructions


def _check_classes(classes: Sequence[Sequence[np.ndarray]], orthogonality: bool = True) -> int:
    if not classes:
        raise ValueError("need at least one class")
    d = np.asarray(classes[0][0]).shape[0]
    ident = np.eye(d)
    rest = []
    owner = []
    for k, cls in enumerate(classes):
        if len(cls) != d:
            raise ValueError(f"class {k} has {len(cls)} matrices, expected {d}")
        has_identity = False
        for t, m in enumerate(cls):
            m = np.asarray(m)
            if m.shape != (d, d):
                raise ValueError(f"class {k} matrix {t} has shape {m.shape}, expected {(d, d)}")
            if not is_unitary(m):
                raise ValueError(f"class {k} matrix {t} is not unitary")
            if np.max(np.abs(m - ident)) <= INPUT_TOL:
                has_identity = True
            else:
                rest.append(m)
                owner.append((k, t))
        if not has_identity:
            raise ValueError(f"class {k} does not contain the identity")
        pair = noncommuting_pair([np.asarray(m) for m in cls])
        if pair is not None:
            raise ValueError(f"class {k}: matrices {pair[0]} and {pair[1]} do not commute")
    if rest and orthogonality:
        flat = np.stack(rest).reshape(len(rest), -1)
        gram = np.abs(flat.conj() @ flat.T - d * np.eye(len(rest)))
        gram[np.tril_indices(len(rest))] = 0
        i, j = np.unravel_index(np.argmax(gram), gram.shape)
        if gram[i, j] > INPUT_TOL * d:
            (k1, t1), (k2, t2) = owner[i], owner[j]
            raise ValueError(
                f"class {k1} matrix {t1} and class {k2} matrix {t2} are not trace-orthogonal"
            )
    return d


def build_mubs_from_partition(
    classes: Sequence[Sequence[np.ndarray]],
    seed: int = 0,
    provenance: str = "partition",
    tol: float = OUTPUT_TOL,
    check_orthogonality: bool = True,
) -> MubCollection:
    """One basis per class of commuting unitaries, then a numerical unbiasedness check.

    The collection is returned even when the check fails; inspect ``report``.
    ``check_orthogonality=False`` skips the all-pairs trace check, which is
    quadratic in the number of matrices; callers that know their classes are
    drawn from an error basis with distinct labels may skip it.
    """
    d = _check_classes(classes, check_orthogonality)
    children = np.random.SeedSequence(seed).spawn(len(classes))
    workers = min(_max_threads(), len(classes))
    # inputs were validated above
    extract = functools.partial(simultaneous_eigenbasis, tol=tol, check_inputs=False)
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(workers) as pool:
            bases = list(pool.map(extract, classes, children))
    else:
        bases = [extract(c, s) for c, s in zip(classes, children)]
    mc = MubCollection(d, tuple(bases), provenance, seed)
    report = verify_mubs(mc, tol)
    if not report.passed:
        logger.warning(
            "classes satisfy the partition hypotheses but the bases are biased by %.3e; "
            "this points to a numerical problem",
            report.max_bias,
        )
    return MubCollection(d, mc.bases, provenance, seed, report)


def prime_power_classes(p: int, e: int) -> list[list[np.ndarray]]:
    """Commuting classes of the (p, e) error basis, one per line, infinity last."""
    part = line_partition(make_field(p, e))
    return [[rho(pt) for pt in line] for line in part.lines]


def build_mubs_prime_power(p: int, e: int, seed: int = 0, tol: float = OUTPUT_TOL) -> MubCollection:
    d = p**e
    if d > MAX_BASIS_DIM:
        raise ValueError(f"dimension {d} exceeds the limit {MAX_BASIS_DIM}")
    # classes carry distinct phase-point labels (LinePartition.validate), hence
    # are trace-orthogonal
    mc = build_mubs_from_partition(
        prime_power_classes(p, e), seed, f"prime-power {p}^{e}", tol, check_orthogonality=False
    )
    if len(mc) != d + 1 or not mc.report.passed:
        raise ConstructionError(f"prime-power construction failed for d={d}: {mc.report}")
    return mc


def build_mubs_composite(d: int, seed: int = 0, tol: float = OUTPUT_TOL) -> MubCollection:
    """``n_of_d(d)`` bases from tensor products of per-factor classes matched by index."""
    n = n_of_d(d)
    factors = sorted(factorize(d).items())
    for p, k in factors:
        if p**k > MAX_BASIS_DIM:
            raise ValueError(f"prime-power factor {p}^{k} of {d} exceeds {MAX_BASIS_DIM}")
    if len(factors) == 1:
        (p, k), = factors
        return build_mubs_prime_power(p, k, seed, tol)

    per_factor = [prime_power_classes(p, k)[:n] for p, k in factors]
    classes = []
    for idx in range(n):
        tensor_class = []
        for parts in itertools.product(*(fc[idx] for fc in per_factor)):
            m = parts[0]
            for q in parts[1:]:
                m = np.kron(m, q)
            tensor_class.append(m)
        classes.append(tensor_class)
    label = "tensor composite " + " x ".join(f"{p}^{k}" for p, k in factors)
    mc = build_mubs_from_partition(classes, seed, label, tol)
    if len(mc) != n or not mc.report.passed:
        raise ConstructionError(f"composite construction failed for d={d}: {mc.report}")
    return mc


def build_mubs(d: int, seed: int = 0, tol: float = OUTPUT_TOL) -> MubCollection:
    """Dispatch to the prime-power or composite construction."""
    return build_mubs_composite(d, seed, tol)


# ---------------------------------------------------------------------------
# file format


class MubFormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _fmt(x: float) -> str:
    return format(x, ".17g")


def format_mub_file(mc: MubCollection) -> str:
    d = mc.dim
    out = [f"MUB v1 dim={d} bases={len(mc)} seed={mc.seed}"]
    for k, b in enumerate(mc.bases):
        out.append(f"basis {k}")
        for j in range(d):
            vec = b[:, j]
            out.append(" ".join(f"{_fmt(c.real)}:{_fmt(c.imag)}" for c in vec))
    return "\n".join(out) + "\n"


def write_mub_file(mc: MubCollection, path: str | Path) -> None:
    Path(path).write_text(format_mub_file(mc))


def parse_mub_file(text: str) -> MubCollection:
    lines = text.splitlines()
    if not lines:
        raise MubFormatError(1, "empty file")
    head = lines[0].split()
    if head[:2] != ["MUB", "v1"]:
        raise MubFormatError(1, f"expected 'MUB v1' header, got {lines[0]!r}")
    try:
        fields = dict(tok.split("=", 1) for tok in head[2:])
        d, n, seed = int(fields["dim"]), int(fields["bases"]), int(fields["seed"])
    except (KeyError, ValueError) as exc:
        raise MubFormatError(1, f"malformed header {lines[0]!r}") from exc
    if d < 1 or n < 0:
        raise MubFormatError(1, "dimension and basis count must be positive")

    expected = 1 + n * (d + 1)
    body = lines[1:]
    while body and not body[-1].strip():
        body.pop()
    if len(body) + 1 != expected:
        raise MubFormatError(min(len(body), expected - 1) + 1, f"expected {expected} lines, found {len(body) + 1}")

    bases = []
    lineno = 1
    for k in range(n):
        lineno += 1
        if body[lineno - 2].split() != ["basis", str(k)]:
            raise MubFormatError(lineno, f"expected 'basis {k}'")
        b = np.empty((d, d), dtype=complex)
        for j in range(d):
            lineno += 1
            toks = body[lineno - 2].split()
            if len(toks) != d:
                raise MubFormatError(lineno, f"expected {d} entries, got {len(toks)}")
            for i, tok in enumerate(toks):
                try:
                    re_s, im_s = tok.split(":")
                    b[i, j] = complex(float(re_s), float(im_s))
                except ValueError as exc:
                    raise MubFormatError(lineno, f"bad entry {tok!r}") from exc
        bases.append(b)
    return MubCollection(d, tuple(bases), "file", seed)


def read_mub_file(path: str | Path) -> MubCollection:
    return parse_mub_file(Path(path).read_text())
