"""
Interferometer action U (x) 1 on Fock states, with a creation-operator oracle
"""
import logging
import math
from collections import defaultdict
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import numerics_config
from core.data_models import (
    DimensionError, FockArray, Interferometer, PureState, SimulationError, SizeBoundError
)
from core.fock import compositions, creation_operator_expansion
from core.kernels import determinant, permanent

logger = logging.getLogger(__name__)


def identity(S: int) -> Interferometer:
    return Interferometer(np.eye(S, dtype=complex))


def dagger(intf: Interferometer) -> Interferometer:
    return Interferometer(intf.u.conj().T)


def compose(a: Interferometer, b: Interferometer) -> Interferometer:
    """b first, then a"""
    if a.dim != b.dim:
        raise DimensionError(f"Cannot compose {a.dim}-mode and {b.dim}-mode interferometers")
    return Interferometer(a.u @ b.u)


def embed(S: int, ports: Sequence[int], block) -> Interferometer:
    """Identity on S modes with `block` acting on the listed 1-based ports"""
    block = np.asarray(block, dtype=complex)
    ports = [int(p) for p in ports]
    if block.shape != (len(ports), len(ports)):
        raise DimensionError(f"Block of shape {block.shape} does not fit {len(ports)} ports")
    if len(set(ports)) != len(ports):
        raise DimensionError(f"Ports must be distinct, got {ports}")
    if any(p < 1 or p > S for p in ports):
        raise DimensionError(f"Port out of range 1..{S}: {ports}")
    u = np.eye(S, dtype=complex)
    idx = [p - 1 for p in ports]
    u[np.ix_(idx, idx)] = block
    return Interferometer(u)


def beamsplitter_block(mixing: float = math.pi / 4, phase: Optional[float] = None) -> np.ndarray:
    """[[cos m, i e^{i p} sin m], [i e^{-i p} sin m, cos m]]; m = pi/4, p = 0 is the balanced splitter"""
    phase = numerics_config.BEAMSPLITTER_PHASE if phase is None else phase
    c, s = math.cos(mixing), math.sin(mixing)
    return np.array([
        [c, 1j * np.exp(1j * phase) * s],
        [1j * np.exp(-1j * phase) * s, c],
    ], dtype=complex)


def embed_beamsplitter(S: int, port_a: int, port_b: int,
                       mixing: float = math.pi / 4, phase: Optional[float] = None) -> Interferometer:
    return embed(S, (port_a, port_b), beamsplitter_block(mixing, phase))


def _column_amplitudes(u: np.ndarray, n_in: Tuple[int, ...],
                       cache: Dict[Tuple[int, ...], List[Tuple[Tuple[int, ...], complex]]]):
    """Transition amplitudes of one Label column: <m| U |n_in> for every output m"""
    if n_in in cache:
        return cache[n_in]
    photons = sum(n_in)
    cols = [s for s, k in enumerate(n_in) for _ in range(k)]
    in_norm = math.prod(math.factorial(k) for k in n_in)
    out = []
    for m_out in compositions(photons, len(n_in)):
        rows = [t for t, k in enumerate(m_out) for _ in range(k)]
        norm = math.sqrt(in_norm * math.prod(math.factorial(k) for k in m_out))
        amp = permanent(u[np.ix_(rows, cols)]) / norm if photons else 1 + 0j
        if abs(amp) >= numerics_config.PRUNE_TOL:
            out.append((m_out, amp))
    cache[n_in] = out
    return out


def _check(intf: Interferometer, state: PureState):
    if intf.dim != state.shape.S:
        raise DimensionError(
            f"Interferometer acts on {intf.dim} modes but the state has S={state.shape.S}"
        )


def apply(intf: Interferometer, state: PureState) -> PureState:
    """Evolve each Label column independently with permanents of occupation-repeated submatrices"""
    _check(intf, state)
    if state.n > numerics_config.MAX_EVOLVE_N:
        raise SizeBoundError(f"Evolution supports N <= {numerics_config.MAX_EVOLVE_N}, got {state.n}")
    S, L = state.shape.S, state.shape.L
    cache: Dict[Tuple[int, ...], list] = {}
    out: Dict[FockArray, complex] = defaultdict(complex)
    for key, amplitude in state.terms.items():
        per_column = [_column_amplitudes(intf.u, key.column(l), cache) for l in range(L)]
        # fixed column order keeps the reduction deterministic
        for choice in product(*per_column):
            amp = amplitude
            for _, column_amp in choice:
                amp *= column_amp
            grid = tuple(tuple(choice[l][0][s] for l in range(L)) for s in range(S))
            out[FockArray(grid)] += amp
    logger.debug(f"Evolved {len(state)} terms into {len(out)} terms")
    return PureState(state.shape, state.n, dict(out), normalized=state.normalized)


def symbolic_apply(intf: Interferometer, state: PureState) -> PureState:
    """Ground truth: substitute a^dag_{sl} -> sum_t U[t,s] a^dag_{tl} and expand"""
    _check(intf, state)
    if state.n > numerics_config.ORACLE_MAX_N:
        raise SizeBoundError(f"Oracle supports N <= {numerics_config.ORACLE_MAX_N}, got {state.n}")
    if state.shape.S * state.shape.L > numerics_config.ORACLE_MAX_MODES:
        raise SizeBoundError(
            f"Oracle supports S*L <= {numerics_config.ORACLE_MAX_MODES}, "
            f"got {state.shape.S * state.shape.L}"
        )
    S = state.shape.S
    out: Dict[FockArray, complex] = defaultdict(complex)
    for key, amplitude in state.terms.items():
        factors = []
        weight = 1.0
        for s, row in enumerate(key.occ):
            for l, k in enumerate(row):
                weight *= math.factorial(k)
                factors.extend([{(t, l): intf.u[t, s] for t in range(S)}] * k)
        expanded = creation_operator_expansion(state.shape, factors)
        scale = amplitude / math.sqrt(weight)
        for target, amp in expanded.items():
            out[target] += scale * amp
    return PureState(state.shape, state.n, dict(out), normalized=state.normalized)


def two_photon_representation(intf: Interferometer) -> Tuple[np.ndarray, np.ndarray]:
    """Symmetric [2] and antisymmetric [1,1] two-photon representation matrices.

    Bases are pairs (x, y) with x <= y (symmetric) and x < y (antisymmetric) in
    ascending order; entries are normalized permanents and determinants of 2x2
    submatrices.
    """
    S = intf.dim
    sym = [(x, y) for x in range(S) for y in range(x, S)]
    anti = [(x, y) for x in range(S) for y in range(x + 1, S)]
    u = intf.u
    sym_rep = np.zeros((len(sym), len(sym)), dtype=complex)
    for i, (x, y) in enumerate(sym):
        for j, (s, t) in enumerate(sym):
            norm = math.sqrt((2 if x == y else 1) * (2 if s == t else 1))
            sym_rep[i, j] = permanent(u[np.ix_([x, y], [s, t])]) / norm
    anti_rep = np.zeros((len(anti), len(anti)), dtype=complex)
    for i, (x, y) in enumerate(anti):
        for j, (s, t) in enumerate(anti):
            anti_rep[i, j] = determinant(u[np.ix_([x, y], [s, t])])
    return sym_rep, anti_rep


def interferometer_to_json(intf: Interferometer) -> dict:
    return {"dim": intf.dim, "re": intf.u.real.tolist(), "im": intf.u.imag.tolist()}


def interferometer_from_json(data: dict) -> Interferometer:
    try:
        dim = int(data["dim"])
        u = np.array(data["re"], dtype=float) + 1j * np.array(data["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise SimulationError(f"Malformed interferometer JSON: {e}") from e
    if u.shape != (dim, dim):
        raise DimensionError(f"Declared dim {dim} but matrix has shape {u.shape}")
    return Interferometer(u)
