"""
Two-photon first quantization and the System (x) Label unitary-unitary decomposition
"""
import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np

from config import numerics_config
from core.data_models import (
    DimensionError, DualityDecomposition, FirstQuantizedState, NormalizationError, PureState
)
from core.fock import trim_labels

logger = logging.getLogger(__name__)

INV_SQRT2 = 1 / math.sqrt(2)


def _require_two_photons(state: PureState):
    if state.n != 2:
        raise DimensionError(f"Two-photon analysis needs N = 2, got N = {state.n}")


def first_quantize(state: PureState) -> FirstQuantizedState:
    """Map each Fock array to its symmetrized two-particle wavefunction"""
    _require_two_photons(state)
    S, L = state.shape.S, state.shape.L
    psi = np.zeros((S, L, S, L), dtype=complex)
    for key, amp in state.terms.items():
        modes = [(s, l) for s, row in enumerate(key.occ) for l, k in enumerate(row) for _ in range(k)]
        a, b = modes
        if a == b:
            psi[a + b] += amp
        else:
            psi[a + b] += amp * INV_SQRT2
            psi[b + a] += amp * INV_SQRT2
    return FirstQuantizedState(psi)


def _irrep_bases(d: int) -> Tuple[List[Tuple[int, int]], np.ndarray, List[Tuple[int, int]], np.ndarray]:
    """Triplet (xx, sym(xy), yy ...) and singlet columns over the d*d product basis"""
    sym = [(x, y) for x in range(d) for y in range(x, d)]
    anti = [(x, y) for x in range(d) for y in range(x + 1, d)]
    p_sym = np.zeros((d * d, len(sym)))
    for j, (x, y) in enumerate(sym):
        if x == y:
            p_sym[x * d + x, j] = 1.0
        else:
            p_sym[x * d + y, j] = INV_SQRT2
            p_sym[y * d + x, j] = INV_SQRT2
    p_anti = np.zeros((d * d, len(anti)))
    for j, (x, y) in enumerate(anti):
        p_anti[x * d + y, j] = INV_SQRT2
        p_anti[y * d + x, j] = -INV_SQRT2
    return sym, p_sym, anti, p_anti


def _coefficient_matrix(fq: FirstQuantizedState) -> np.ndarray:
    """C[(s1, s2), (l1, l2)]"""
    S, L = fq.system_dim, fq.label_dim
    return fq.amplitudes.transpose(0, 2, 1, 3).reshape(S * S, L * L)


def _block_dict(matrix: np.ndarray, rows, cols, labels) -> Dict[Tuple[Tuple[int, int], Tuple[int, int]], complex]:
    out = {}
    for i, (x, y) in enumerate(rows):
        for j, (a, b) in enumerate(cols):
            value = complex(matrix[i, j])
            if abs(value) >= numerics_config.PRUNE_TOL:
                out[((x + 1, y + 1), (labels[a] + 1, labels[b] + 1))] = value
    return out


def _singular_values(matrix: np.ndarray) -> np.ndarray:
    if matrix.size == 0:
        return np.zeros(0)
    return np.linalg.svd(matrix, compute_uv=False)


def decompose(state: PureState) -> DualityDecomposition:
    """Exact change of basis to triplet and singlet blocks, Labels projected to the occupied ones"""
    _require_two_photons(state)
    trimmed, labels = trim_labels(state)
    fq = first_quantize(trimmed)
    S, L = fq.system_dim, fq.label_dim
    c = _coefficient_matrix(fq)
    sys_sym, ps_sym, sys_anti, ps_anti = _irrep_bases(S)
    lab_sym, pl_sym, lab_anti, pl_anti = _irrep_bases(L)
    triplet = ps_sym.T @ c @ pl_sym
    singlet = ps_anti.T @ c @ pl_anti

    sectors = {
        "triplet": tuple(float(v) for v in _singular_values(triplet)),
        "singlet": tuple(float(v) for v in _singular_values(singlet)),
    }
    schmidt = tuple(sorted(sectors["triplet"] + sectors["singlet"], reverse=True))
    return DualityDecomposition(
        system_dim=S,
        label_dim=state.shape.L,
        labels=labels,
        triplet_matrix=triplet,
        singlet_matrix=singlet,
        triplet=_block_dict(triplet, sys_sym, lab_sym, labels),
        singlet=_block_dict(singlet, sys_anti, lab_anti, labels),
        schmidt_coefficients=schmidt,
        sector_coefficients=sectors,
    )


def reconstruct(dec: DualityDecomposition) -> FirstQuantizedState:
    """Inverse change of basis back to psi[s1, l1, s2, l2] over the full declared Label space"""
    S, Lp = dec.system_dim, len(dec.labels)
    _, ps_sym, _, ps_anti = _irrep_bases(S)
    _, pl_sym, _, pl_anti = _irrep_bases(Lp)
    c = ps_sym @ dec.triplet_matrix @ pl_sym.T + ps_anti @ dec.singlet_matrix @ pl_anti.T
    projected = c.reshape(S, S, Lp, Lp).transpose(0, 2, 1, 3)
    psi = np.zeros((S, dec.label_dim, S, dec.label_dim), dtype=complex)
    idx = np.array(dec.labels)
    psi[np.ix_(range(S), idx, range(S), idx)] = projected
    return FirstQuantizedState(psi)


def schmidt_rank(state: PureState, tol: Optional[float] = None) -> int:
    tol = numerics_config.SCHMIDT_TOL if tol is None else tol
    return int(sum(1 for v in decompose(state).schmidt_coefficients if v > tol))


def singlet_weight(state: PureState) -> float:
    """Squared norm of the antisymmetric block, relative to the state's squared norm"""
    weight = state.norm ** 2
    if weight <= numerics_config.NORM_TOL:
        raise NormalizationError("Singlet weight of a state with zero norm")
    return decompose(state).singlet_weight / weight


def system_vector(state: PureState) -> np.ndarray:
    """Leading System singular vector of the triplet block, in the symmetric System basis.

    For a product state this is the System factor; its global phase is arbitrary.
    """
    triplet = decompose(state).triplet_matrix
    if not np.any(np.abs(triplet) > numerics_config.NORM_TOL):
        raise NormalizationError("Triplet block is empty")
    left, _, _ = np.linalg.svd(triplet, full_matrices=False)
    return left[:, 0]


def decomposition_to_json(dec: DualityDecomposition) -> dict:
    def _entries(block):
        return [
            {"system": list(sys_key), "label": list(label_key), "re": v.real, "im": v.imag}
            for (sys_key, label_key), v in block.items()
        ]
    return {
        "triplet": _entries(dec.triplet),
        "singlet": _entries(dec.singlet),
        "schmidt_coefficients": list(dec.schmidt_coefficients),
        "weights": {"triplet": dec.triplet_weight, "singlet": dec.singlet_weight},
    }
