"""Dense complex linear algebra: trace inner product, Jacobi eigensolver,
and common eigenbases of commuting unitaries.

Matrices are plain ``numpy`` complex128 arrays.  A basis is a ``(d, d)``
array whose *columns* are the basis vectors.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

INPUT_TOL = 1e-10
OUTPUT_TOL = 1e-8
MAX_SWEEPS = 100
MAX_RETRIES = 32
MIN_GAP = 1e-6


class EigenError(RuntimeError):
    """Raised when an eigen-decomposition cannot be completed."""


def trace_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """``tr(a^dagger b)``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"trace inner product needs equal square shapes, got {a.shape} and {b.shape}")
    return complex(np.vdot(a, b))


def apply_phase_convention(vectors: np.ndarray, tie_tol: float = 1e-10) -> np.ndarray:
    """Rotate each column so its first entry of largest modulus is real positive.

    Entries within ``tie_tol`` of the maximal modulus count as ties; the
    lowest index wins.
    """
    out = np.array(vectors, dtype=complex, copy=True)
    for j in range(out.shape[1]):
        col = out[:, j]
        mags = np.abs(col)
        k = int(np.argmax(mags >= mags.max() - tie_tol))
        if mags[k] > 0:
            out[:, j] = col * (abs(col[k]) / col[k])
            out[k, j] = abs(col[k])
    return out


def _check_square(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValueError("matrix has non-finite entries")
    return h


def _round_robin(d: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Rounds of disjoint index pairs covering every pair once (circle method)."""
    n = d + (d % 2)
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        pairs = [(players[i], players[n - 1 - i]) for i in range(n // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < d and b < d]
        if pairs:
            rounds.append((np.array([a for a, _ in pairs]), np.array([b for _, b in pairs])))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def hermitian_eig(h: np.ndarray, max_sweeps: int = MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Pairs are visited in round-robin order so that each round rotates
    disjoint index pairs at once.  Returns ascending eigenvalues and a
    unitary whose columns are the eigenvectors, with
    :func:`apply_phase_convention` applied.
    """
    a = _check_square(h).copy()
    dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if dev > INPUT_TOL:
        raise ValueError(f"matrix is not Hermitian (max |h - h^dagger| = {dev:.3e})")
    a = (a + a.conj().T) / 2
    d = a.shape[0]
    v = np.eye(d, dtype=complex)
    norm = np.linalg.norm(a)
    threshold = 1e-12 * norm
    # after convergence one extra sweep at rounding level; Jacobi converges
    # quadratically so this costs one sweep and sharpens the eigenvectors
    skip = threshold
    polished = False
    rounds = _round_robin(d)

    for _ in range(max_sweeps):
        off = np.abs(a - np.diag(np.diag(a)))
        if off.max(initial=0.0) <= threshold:
            if polished:
                break
            polished = True
            skip = np.finfo(float).eps * norm
        for ps, qs in rounds:
            apq = a[ps, qs]
            mag = np.abs(apq)
            keep = mag > skip
            if not keep.any():
                continue
            ps, qs, apq, mag = ps[keep], qs[keep], apq[keep], mag[keep]
            phase = apq / mag
            theta = (a[qs, qs].real - a[ps, ps].real) / (2 * mag)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta * theta + 1))
            c = 1 / np.sqrt(t * t + 1)
            s = t * c
            # per pair J = diag(1, conj(phase)) @ [[c, s], [-s, c]]; A <- J^H A J
            cp = phase.conj()
            for m in (a, v):
                colp, colq = m[:, ps].copy(), m[:, qs]
                m[:, ps] = colp * c - colq * (s * cp)
                m[:, qs] = colp * s + colq * (c * cp)
            rowp, rowq = a[ps, :].copy(), a[qs, :]
            a[ps, :] = c[:, None] * rowp - (s * phase)[:, None] * rowq
            a[qs, :] = s[:, None] * rowp + (c * phase)[:, None] * rowq
            a[ps, qs] = 0
            a[qs, ps] = 0
            a[ps, ps] = a[ps, ps].real
            a[qs, qs] = a[qs, qs].real
    else:
        raise EigenError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")

    evals = np.diag(a).real
    order = np.argsort(evals, kind="stable")
    return evals[order], apply_phase_convention(v[:, order])


def is_unitary(u: np.ndarray, tol: float = INPUT_TOL) -> bool:
    u = np.asarray(u)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def max_offdiag(basis: np.ndarray, m: np.ndarray) -> float:
    """Largest off-diagonal magnitude of ``basis^dagger m basis``."""
    t = basis.conj().T @ m @ basis
    return float(np.max(np.abs(t - np.diag(np.diag(t))), initial=0.0))


def noncommuting_pair(ms: Sequence[np.ndarray], tol: float = INPUT_TOL) -> tuple[int, int] | None:
    """First pair ``(i, j)``, ``i < j``, with ``max |M_i M_j - M_j M_i| > tol``."""
    stack = np.stack(ms)
    for i in range(len(stack) - 1):
        rest = stack[i + 1 :]
        comm = np.abs(stack[i] @ rest - rest @ stack[i]).reshape(len(rest), -1).max(axis=1)
        bad = np.flatnonzero(comm > tol)
        if bad.size:
            return i, i + 1 + int(bad[0])
    return None


def simultaneous_eigenbasis(
    ms: Sequence[np.ndarray],
    seed: int | np.random.SeedSequence = 0,
    tol: float = OUTPUT_TOL,
    check_inputs: bool = True,
) -> np.ndarray:
    """Common eigenbasis of pairwise commuting unitaries.

    Diagonalises ``H = sum_t (c_t U_t + conj(c_t) U_t^dagger)`` for random
    complex ``c_t``; a fresh draw is made whenever two eigenvalues of ``H``
    are closer than ``MIN_GAP``.
    """
    ms = [_check_square(m) for m in ms]
    if not ms:
        raise ValueError("need at least one matrix")
    d = ms[0].shape[0]
    for i, m in enumerate(ms):
        if m.shape != (d, d):
            raise ValueError(f"matrix {i} has shape {m.shape}, expected {(d, d)}")
    if check_inputs:
        for i, m in enumerate(ms):
            if not is_unitary(m):
                raise ValueError(f"matrix {i} is not unitary")
        pair = noncommuting_pair(ms)
        if pair is not None:
            raise ValueError(f"matrices {pair[0]} and {pair[1]} do not commute")

    rng = np.random.default_rng(seed)
    for _ in range(MAX_RETRIES + 1):
        coeffs = rng.uniform(-1, 1, len(ms)) + 1j * rng.uniform(-1, 1, len(ms))
        h = np.zeros((d, d), dtype=complex)
        for c, m in zip(coeffs, ms):
            h += c * m
        h = h + h.conj().T
        evals, basis = hermitian_eig(h)
        if d > 1 and np.min(np.diff(evals)) < MIN_GAP:
            continue
        # a nearly degenerate draw can pass the gap test yet mix eigenvectors
        worst = max(max_offdiag(basis, m) for m in ms)
        if worst <= tol:
            return basis
    raise EigenError(
        f"could not separate eigenvalues after {MAX_RETRIES} retries; try a different seed"
    )
