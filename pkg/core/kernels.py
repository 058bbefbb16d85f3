"""
Dense complex linear-algebra kernels: permanents, determinants, immanants
"""
import logging
from functools import lru_cache
from itertools import permutations
from typing import Iterator, Sequence, Tuple, Union

import numpy as np

from config import numerics_config
from core.data_models import DimensionError, Partition, SimulationError, SizeBoundError

logger = logging.getLogger(__name__)

PartitionLike = Union[Partition, Sequence[int]]


def _as_matrix(m) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise DimensionError(f"Expected a matrix, got an array of shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise SimulationError("Matrix has non-finite entries")
    return arr


def _as_square(m) -> np.ndarray:
    arr = _as_matrix(m)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"Expected a square matrix, got shape {arr.shape}")
    return arr


def permanent(m) -> complex:
    """Permanent by Ryser's formula with Gray-code column updates, O(2^n n)"""
    a = _as_square(m)
    n = a.shape[0]
    if n == 0:
        return 1 + 0j
    if n > numerics_config.MAX_PERMANENT_N:
        raise SizeBoundError(f"Permanent supports n <= {numerics_config.MAX_PERMANENT_N}, got {n}")

    row_sums = np.zeros(n, dtype=complex)
    total = 0j
    old_gray = 0
    for k in range(1, 2 ** n):
        gray = k ^ (k >> 1)
        flipped = gray ^ old_gray
        column = flipped.bit_length() - 1
        if gray & flipped:
            row_sums += a[:, column]
        else:
            row_sums -= a[:, column]
        # popcount(gray) has the parity of k
        term = np.prod(row_sums)
        total += -term if k & 1 else term
        old_gray = gray
    return complex(-total if n & 1 else total)


def determinant(m) -> complex:
    a = _as_square(m)
    if a.shape[0] == 0:
        return 1 + 0j
    return complex(np.linalg.det(a))


def cycle_type(sigma: Sequence[int]) -> Tuple[int, ...]:
    """Cycle lengths of a permutation of range(n), non-increasing"""
    seen = [False] * len(sigma)
    lengths = []
    for start in range(len(sigma)):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = sigma[i]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


@lru_cache(maxsize=None)
def _character(parts: Tuple[int, ...], cycles: Tuple[int, ...]) -> int:
    if not cycles:
        return 1 if not parts else 0
    r, rest = cycles[0], cycles[1:]
    k = len(parts)
    # beta numbers: removing a rim hook of length r moves one bead down by r
    beta = [parts[i] + (k - 1 - i) for i in range(k)]
    occupied = set(beta)
    total = 0
    for b in beta:
        target = b - r
        if target < 0 or target in occupied:
            continue
        height = sum(1 for c in beta if target < c < b)
        moved = sorted((occupied - {b}) | {target}, reverse=True)
        reduced = tuple(p for p in (moved[i] - (k - 1 - i) for i in range(k)) if p > 0)
        total += (-1) ** height * _character(reduced, rest)
    return total


def _parts(lam: PartitionLike) -> Tuple[int, ...]:
    return lam.parts if isinstance(lam, Partition) else Partition(tuple(lam)).parts


def character(lam: PartitionLike, cycles: Sequence[int]) -> int:
    """Irreducible S_n character by the Murnaghan-Nakayama rule"""
    parts = _parts(lam)
    cycles = tuple(sorted((int(c) for c in cycles), reverse=True))
    if sum(parts) != sum(cycles):
        raise DimensionError(f"Partition {parts} and cycle type {cycles} have different sizes")
    return _character(parts, cycles)


def partitions(n: int) -> Iterator[Tuple[int, ...]]:
    """All partitions of n in reverse lexicographic order"""
    def _gen(remaining: int, largest: int):
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, largest), 0, -1):
            for rest in _gen(remaining - first, first):
                yield (first,) + rest
    yield from _gen(n, n)


def immanant(m, lam: PartitionLike) -> complex:
    """Character-weighted permutation sum; permanent for [n], determinant for [1^n]"""
    a = _as_square(m)
    n = a.shape[0]
    parts = _parts(lam)
    if sum(parts) != n:
        raise DimensionError(f"Partition {parts} does not have {n} boxes")
    if n > numerics_config.MAX_IMMANANT_N:
        raise SizeBoundError(f"Immanant supports n <= {numerics_config.MAX_IMMANANT_N}, got {n}")
    if n == 0:
        return 1 + 0j
    if parts == (n,):
        return permanent(a)
    if parts == (1,) * n:
        return determinant(a)
    return brute_force_immanant(a, parts)


def brute_force_immanant(m, lam: PartitionLike) -> complex:
    a = _as_square(m)
    n = a.shape[0]
    parts = _parts(lam)
    if sum(parts) != n:
        raise DimensionError(f"Partition {parts} does not have {n} boxes")
    rows = np.arange(n)
    total = 0j
    for sigma in permutations(range(n)):
        chi = _character(parts, cycle_type(sigma))
        if chi:
            total += chi * np.prod(a[rows, list(sigma)])
    return complex(total)


def brute_force_permanent(m) -> complex:
    """Direct sum over all permutations; test oracle"""
    a = _as_square(m)
    n = a.shape[0]
    rows = np.arange(n)
    return complex(sum(np.prod(a[rows, list(sigma)]) for sigma in permutations(range(n))))


def submatrix(m, row_indices: Sequence[int], col_indices: Sequence[int]) -> np.ndarray:
    """Rows and columns selected in the given order; indices are 0-based"""
    a = _as_matrix(m)
    for name, indices, bound in (('row', row_indices, a.shape[0]), ('column', col_indices, a.shape[1])):
        if len(set(indices)) != len(indices):
            raise DimensionError(f"Repeated {name} index in {list(indices)}")
        if any(i < 0 or i >= bound for i in indices):
            raise DimensionError(f"{name.capitalize()} index out of range 0..{bound - 1}: {list(indices)}")
    return a[np.ix_(list(row_indices), list(col_indices))]


def unitarity_defect(m) -> float:
    """Max-norm of m^dagger m - 1"""
    a = _as_square(m)
    if a.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))))


def is_unitary(m, tol: float = None) -> bool:
    tol = numerics_config.UNITARITY_TOL if tol is None else tol
    return unitarity_defect(m) <= tol


def close(a: complex, b: complex) -> bool:
    """Absolute or relative agreement, whichever is looser"""
    diff = abs(a - b)
    return diff <= max(numerics_config.ABS_TOL, numerics_config.REL_TOL * max(abs(a), abs(b)))
